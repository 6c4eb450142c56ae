//! Real root isolation by Descartes' rule of signs on rational intervals, and
//! certified complex root disks from Weierstrass inclusion radii.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::zpoly::{to_f64, ZPoly};

pub type Interval = (BigRational, BigRational);

pub(crate) fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as u64)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as u64)
    }
}

/// Power of two strictly above every root modulus (Cauchy bound).
pub fn root_bound(f: &ZPoly) -> BigRational {
    let lc = f.lc().abs();
    let m = f.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
    let b = BigRational::one() + BigRational::new(m, lc);
    let mut p = BigRational::one();
    while p <= b {
        p *= q(2);
    }
    p
}

fn taylor_shift(c: &mut [BigInt], a: &BigInt) {
    let n = c.len();
    if n < 2 || a.is_zero() {
        return;
    }
    let unit = a.is_one();
    for i in 0..n - 1 {
        for j in (i..n - 1).rev() {
            if unit {
                let t = c[j + 1].clone();
                c[j] += t;
            } else {
                let t = &c[j + 1] * a;
                c[j] += t;
            }
        }
    }
}

/// Descartes bound for the number of roots in the open interval (a, b); exact when 0 or 1.
pub fn descartes_count(f: &ZPoly, a: &BigRational, b: &BigRational) -> usize {
    use num_integer::Integer;
    let n = f.deg();
    let d = a.denom().lcm(b.denom());
    let start = a.numer() * (&d / a.denom());
    let width = b.numer() * (&d / b.denom()) - &start;
    // d^n f((start + width·y)/d) has integer coefficients.
    let mut c: Vec<BigInt> = Vec::with_capacity(n + 1);
    let mut dp = BigInt::one();
    let mut scaled = vec![BigInt::zero(); n + 1];
    for i in (0..=n).rev() {
        scaled[i] = f.coeff(i) * &dp;
        dp *= &d;
    }
    c.extend(scaled);
    taylor_shift(&mut c, &start);
    let mut wp = BigInt::one();
    for ci in c.iter_mut() {
        *ci *= &wp;
        wp *= &width;
    }
    c.reverse();
    taylor_shift(&mut c, &BigInt::one());
    let mut count = 0;
    let mut last = 0i32;
    for ci in &c {
        let s = ci.sign();
        let s = match s {
            num_bigint::Sign::Plus => 1,
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Roots in the closed interval, certified only when the answer is 0 or 1
/// (f squarefree).
pub fn count_closed(f: &ZPoly, lo: &BigRational, hi: &BigRational) -> usize {
    if lo == hi {
        return usize::from(f.sign_at(lo) == 0);
    }
    descartes_count(f, lo, hi) + usize::from(f.sign_at(lo) == 0) + usize::from(f.sign_at(hi) == 0)
}

/// Isolating intervals of the real roots of a squarefree polynomial, in
/// increasing order. Rational roots come back as degenerate intervals.
pub fn isolate_real(f: &ZPoly) -> Vec<Interval> {
    if f.deg() == 0 {
        return Vec::new();
    }
    let b = root_bound(f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match descartes_count(f, &lo, &hi) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / q(2);
                if f.sign_at(&mid) == 0 {
                    out.push((mid.clone(), mid.clone()));
                }
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Bisects an isolating interval of a squarefree f down to width ≤ w.
pub fn refine_real(f: &ZPoly, iv: &Interval, w: &BigRational) -> Interval {
    let (mut lo, mut hi) = iv.clone();
    if lo == hi {
        return (lo, hi);
    }
    let slo = f.sign_at(&lo);
    if slo == 0 {
        return (lo.clone(), lo);
    }
    if f.sign_at(&hi) == 0 {
        return (hi.clone(), hi);
    }
    while &(&hi - &lo) > w {
        let mid = (&lo + &hi) / q(2);
        let s = f.sign_at(&mid);
        if s == 0 {
            return (mid.clone(), mid);
        }
        if s == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// ⌈√x·2^bits⌉/2^bits ≥ √x.
pub fn sqrt_upper(x: &BigRational, bits: u32) -> BigRational {
    if !x.is_positive() {
        return BigRational::zero();
    }
    let scaled = x * pow2(2 * bits as i64);
    let n = scaled.ceil().to_integer();
    let mut r = n.sqrt();
    if &r * &r < n {
        r += 1;
    }
    BigRational::new(r, BigInt::one() << bits)
}

/// ⌊√x·2^bits⌋/2^bits ≤ √x.
pub fn sqrt_lower(x: &BigRational, bits: u32) -> BigRational {
    if !x.is_positive() {
        return BigRational::zero();
    }
    let scaled = x * pow2(2 * bits as i64);
    BigRational::new(scaled.floor().to_integer().sqrt(), BigInt::one() << bits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CQ {
    pub re: BigRational,
    pub im: BigRational,
}

impl CQ {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CQ { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CQ { re, im: BigRational::zero() }
    }

    pub fn add(&self, o: &CQ) -> CQ {
        CQ::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &CQ) -> CQ {
        CQ::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &CQ) -> CQ {
        CQ::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn div(&self, o: &CQ) -> CQ {
        let d = o.norm_sq();
        let conj = CQ::new(o.re.clone(), -&o.im);
        let n = self.mul(&conj);
        CQ::new(n.re / &d, n.im / d)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_f64(&self.re), rat_f64(&self.im))
    }

    fn round(&self, bits: u32) -> CQ {
        let s = pow2(bits as i64);
        let r = |x: &BigRational| (x * &s).round() / &s;
        CQ::new(r(&self.re), r(&self.im))
    }
}

pub(crate) fn rat_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| to_f64(&x.numer().clone()) / to_f64(x.denom()))
}

fn rat_of_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// A closed disk holding exactly one root; disks of one call are pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDisk {
    pub center: CQ,
    pub radius: BigRational,
}

impl RootDisk {
    pub fn meets_real_axis(&self) -> bool {
        self.center.im.abs() <= self.radius
    }

    /// Enclosure of |z|.
    pub fn modulus(&self, bits: u32) -> Interval {
        let n = self.center.norm_sq();
        let lo = sqrt_lower(&n, bits) - &self.radius;
        let lo = if lo.is_negative() { BigRational::zero() } else { lo };
        (lo, sqrt_upper(&n, bits) + &self.radius)
    }

    /// Enclosure of |z|².
    pub fn modulus_sq(&self, bits: u32) -> Interval {
        let (lo, hi) = self.modulus(bits);
        (&lo * &lo, &hi * &hi)
    }

    pub fn contains(&self, z: &CQ) -> bool {
        z.sub(&self.center).norm_sq() <= &self.radius * &self.radius
    }

    /// Bounding box as (re interval, im interval).
    pub fn rectangle(&self) -> (Interval, Interval) {
        let r = &self.radius;
        (
            (&self.center.re - r, &self.center.re + r),
            (&self.center.im - r, &self.center.im + r),
        )
    }
}

fn aberth(f: &ZPoly) -> Vec<Complex64> {
    let n = f.deg();
    let lc = to_f64(&f.lc());
    let c: Vec<Complex64> = f.coeffs().iter().map(|x| Complex64::new(to_f64(x) / lc, 0.0)).collect();
    let dc: Vec<Complex64> = (1..=n).map(|i| c[i] * i as f64).collect();
    let eval = |p: &[Complex64], z: Complex64| p.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &b| a * z + b);
    let r = c[..n].iter().map(|x| x.norm()).fold(0.0f64, f64::max).max(1e-3).min(1e6);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(r.sqrt(), 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let ratio = eval(&c, z[i]) / eval(&dc, z[i]);
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Weierstrass corrections W_i = f(z_i) / (lc·∏_{j≠i}(z_i − z_j)).
fn weierstrass(f: &ZPoly, z: &[CQ]) -> Option<Vec<CQ>> {
    let lc = CQ::real(BigRational::from_integer(f.lc()));
    let mut out = Vec::with_capacity(z.len());
    for (i, zi) in z.iter().enumerate() {
        let val = f
            .coeffs()
            .iter()
            .rev()
            .fold(CQ::real(BigRational::zero()), |acc, c| acc.mul(zi).add(&CQ::real(BigRational::from_integer(c.clone()))));
        let mut den = lc.clone();
        for (j, zj) in z.iter().enumerate() {
            if i != j {
                den = den.mul(&zi.sub(zj));
            }
        }
        if den.norm_sq().is_zero() {
            return None;
        }
        out.push(val.div(&den));
    }
    Some(out)
}

/// Certified disks around all complex roots of a squarefree f, each of radius
/// below 2^-min_bits, pairwise disjoint. The real roots' disks come first
/// when `separate_real` succeeds, which is always attempted.
pub fn complex_roots(f: &ZPoly, min_bits: u32) -> Vec<RootDisk> {
    let n = f.deg();
    assert!(n >= 1, "no roots");
    let real_count = isolate_real(f).len();
    let mut z: Vec<CQ> = aberth(f).into_iter().map(|c| CQ::new(rat_of_f64(c.re), rat_of_f64(c.im))).collect();
    let mut bits = 60u32;
    let nq = q(n as i64);
    loop {
        assert!(bits <= 1 << 16, "complex root certification did not converge");
        if let Some(w) = weierstrass(f, &z) {
            let radii: Vec<BigRational> = w.iter().map(|wi| &nq * sqrt_upper(&wi.norm_sq(), bits + 8)).collect();
            let small = radii.iter().all(|r| r < &pow2(-(min_bits as i64)));
            let disjoint = (0..n).all(|i| {
                (i + 1..n).all(|j| {
                    let s = &radii[i] + &radii[j];
                    z[i].sub(&z[j]).norm_sq() > &s * &s
                })
            });
            if small && disjoint {
                let disks: Vec<RootDisk> =
                    z.iter().zip(radii).map(|(c, r)| RootDisk { center: c.clone(), radius: r }).collect();
                if disks.iter().filter(|d| d.meets_real_axis()).count() == real_count {
                    let mut disks = disks;
                    disks.sort_by(|a, b| {
                        (!a.meets_real_axis(), &a.center.re, &a.center.im).cmp(&(!b.meets_real_axis(), &b.center.re, &b.center.im))
                    });
                    return disks;
                }
            }
            z = z.iter().zip(&w).map(|(zi, wi)| zi.sub(wi).round(bits)).collect();
        } else {
            // Coincident approximations: perturb.
            z = z.iter().enumerate().map(|(i, zi)| zi.add(&CQ::new(pow2(-20) * q(i as i64 + 1), pow2(-21)))).collect();
        }
        bits = (bits * 3) / 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolation_and_refinement() {
        let f = ZPoly::from_i64s(&[1, -3, 1]);
        let roots = isolate_real(&f);
        assert_eq!(roots.len(), 2);
        let (lo, hi) = refine_real(&f, &roots[1], &pow2(-30));
        let v = rat_f64(&lo);
        assert!((v - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-8 && lo < hi);
        let g = ZPoly::from_i64s(&[-2, 1]).mul(&ZPoly::from_i64s(&[1, 1]));
        let r = isolate_real(&g);
        assert_eq!(r.len(), 2);
        assert_eq!(count_closed(&g, &q(2), &q(2)), 1);
    }

    #[test]
    fn disks_for_cubic() {
        let f = ZPoly::from_i64s(&[-4, 0, 0, 1]);
        let d = complex_roots(&f, 20);
        assert_eq!(d.len(), 3);
        assert!(d[0].meets_real_axis() && !d[1].meets_real_axis());
        let m = d[1].modulus(40);
        let c = 4f64.cbrt();
        assert!(rat_f64(&m.0) <= c && c <= rat_f64(&m.1));
    }
}
