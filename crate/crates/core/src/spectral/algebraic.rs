//! Algebraic numbers as (minimal polynomial, isolating rectangle).
//!
//! Real numbers carry a degenerate imaginary interval [0, 0] and an isolating
//! real interval; arithmetic is implemented for them only.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::factor::{find_factor, is_irreducible_z};
use super::resultant::{power_poly, product_poly, quotient_poly};
use super::roots::{complex_roots, count_closed, isolate_real, pow2, q, rat_f64, refine_real, sqrt_lower, sqrt_upper, Interval, RootDisk};
use super::zpoly::ZPoly;
use super::SpectralError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicNumber {
    min_poly: ZPoly,
    re: Interval,
    im: Interval,
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        if self.is_real() {
            write!(f, "root of {} near {:.12}", self.min_poly, self.to_f64())
        } else {
            let (a, b) = self.approx_complex();
            write!(f, "root of {} near {:.12}{:+.12}i", self.min_poly, a, b)
        }
    }
}

fn zero_iv() -> Interval {
    (BigRational::zero(), BigRational::zero())
}

fn width(iv: &Interval) -> BigRational {
    &iv.1 - &iv.0
}

impl AlgebraicNumber {
    pub fn rational(r: BigRational) -> Self {
        let p = ZPoly::new(vec![-r.numer().clone(), r.denom().clone()]).primitive();
        AlgebraicNumber { min_poly: p, re: (r.clone(), r), im: zero_iv() }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(q(n))
    }

    /// Real root of the irreducible `min_poly` isolated by `iv`.
    pub fn real_root(min_poly: ZPoly, iv: Interval) -> Self {
        let min_poly = min_poly.primitive();
        if min_poly.deg() == 1 {
            let r = BigRational::new(-min_poly.coeff(0), min_poly.coeff(1));
            return Self::rational(r);
        }
        AlgebraicNumber { min_poly, re: iv, im: zero_iv() }
    }

    /// Non-real root of the irreducible `min_poly` inside the rectangle.
    pub fn complex_root(min_poly: ZPoly, re: Interval, im: Interval) -> Self {
        AlgebraicNumber { min_poly: min_poly.primitive(), re, im }
    }

    pub fn min_poly(&self) -> &ZPoly {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.deg()
    }

    pub fn re_interval(&self) -> &Interval {
        &self.re
    }

    pub fn im_interval(&self) -> &Interval {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.0.is_zero() && self.im.1.is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        (self.min_poly.deg() == 1).then(|| BigRational::new(-self.min_poly.coeff(0), self.min_poly.coeff(1)))
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    /// Real part to double precision.
    pub fn to_f64(&self) -> f64 {
        if !self.is_real() {
            return self.approx_complex().0;
        }
        let (lo, hi) = self.enclosure(60);
        rat_f64(&((lo + hi) / q(2)))
    }

    pub fn approx_complex(&self) -> (f64, f64) {
        if self.is_real() {
            return (self.to_f64(), 0.0);
        }
        let c = self.disk(60).center;
        (rat_f64(&c.re), rat_f64(&c.im))
    }

    fn rough_center(&self) -> (f64, f64) {
        (rat_f64(&((&self.re.0 + &self.re.1) / q(2))), rat_f64(&((&self.im.0 + &self.im.1) / q(2))))
    }

    /// Positive real root, certified.
    pub fn is_positive_real(&self) -> bool {
        self.is_real() && {
            let mut a = self.clone();
            a.sign() > 0
        }
    }

    /// Sign of a real number.
    pub fn sign(&mut self) -> i32 {
        assert!(self.is_real(), "sign of a non-real number");
        loop {
            if self.re.0.is_positive() {
                return 1;
            }
            if self.re.1.is_negative() {
                return -1;
            }
            if self.re.0.is_zero() && self.re.1.is_zero() {
                return 0;
            }
            self.refine_real_to(&(width(&self.re) / q(4)));
        }
    }

    fn refine_real_to(&mut self, w: &BigRational) {
        if width(&self.re) > *w {
            self.re = refine_real(&self.min_poly, &self.re, w);
        }
    }

    /// Shrinks the isolating interval below 2^-bits (real numbers only).
    pub fn refine(&mut self, bits: u32) {
        assert!(self.is_real(), "refining a non-real number");
        self.refine_real_to(&pow2(-(bits as i64)));
    }

    /// Real interval of width ≤ 2^-bits containing the number.
    pub fn enclosure(&self, bits: u32) -> Interval {
        let mut a = self.clone();
        a.refine(bits);
        a.re
    }

    /// Certified equality.
    pub fn equals(&self, other: &Self) -> bool {
        if self.min_poly != other.min_poly {
            return false;
        }
        if self.is_real() != other.is_real() {
            return false;
        }
        if !self.is_real() {
            return complex_same_root(self, other);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        loop {
            if a.re.1 < b.re.0 || b.re.1 < a.re.0 {
                return false;
            }
            let lo = a.re.0.clone().min(b.re.0.clone());
            let hi = a.re.1.clone().max(b.re.1.clone());
            if count_closed(&a.min_poly, &lo, &hi) == 1 {
                return true;
            }
            let w = width(&a.re).max(width(&b.re)) / q(4);
            a.refine_real_to(&w);
            b.refine_real_to(&w);
        }
    }

    /// Certified order of two real numbers.
    pub fn cmp_real(&self, other: &Self) -> Ordering {
        if self.equals(other) {
            return Ordering::Equal;
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        loop {
            if a.re.1 < b.re.0 {
                return Ordering::Less;
            }
            if b.re.1 < a.re.0 {
                return Ordering::Greater;
            }
            let w = width(&a.re).max(width(&b.re)) / q(4);
            a.refine_real_to(&w);
            b.refine_real_to(&w);
        }
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.cmp_real(&Self::rational(r.clone()))
    }

    pub fn neg(&self) -> Self {
        assert!(self.is_real(), "negating a non-real number");
        AlgebraicNumber {
            min_poly: self.min_poly.negate_var().primitive(),
            re: (-&self.re.1, -&self.re.0),
            im: zero_iv(),
        }
    }

    pub fn abs(&self) -> Self {
        let mut a = self.clone();
        if a.sign() < 0 {
            a.neg()
        } else {
            a
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let Some(r) = other.as_rational() {
            return self.scale(&r);
        }
        if let Some(r) = self.as_rational() {
            return other.scale(&r);
        }
        let r = product_poly(&self.min_poly, &other.min_poly);
        locate(&r, |bits| iv_mul(&self.enclosure(bits), &other.enclosure(bits)))
    }

    /// other ≠ 0.
    pub fn div(&self, other: &Self) -> Self {
        if let Some(r) = other.as_rational() {
            assert!(!r.is_zero(), "division by zero");
            return self.scale(&r.recip());
        }
        if self.equals(other) {
            return Self::integer(1);
        }
        if let Some(r) = self.as_rational() {
            return other.recip().scale(&r);
        }
        let r = quotient_poly(&self.min_poly, &other.min_poly);
        locate(&r, |bits| iv_div(&self.enclosure(bits), &other.enclosure_nonzero(bits + 8)))
    }

    pub fn recip(&self) -> Self {
        assert!(self.is_real(), "reciprocal of a non-real number");
        if let Some(r) = self.as_rational() {
            return Self::rational(r.recip());
        }
        let mut a = self.clone();
        a.sign();
        let (lo, hi) = a.re;
        AlgebraicNumber { min_poly: self.min_poly.reverse().primitive(), re: (hi.recip(), lo.recip()), im: zero_iv() }
    }

    /// Enclosure at ≥ `bits` precision that excludes zero (self ≠ 0).
    fn enclosure_nonzero(&self, bits: u32) -> Interval {
        let mut b = bits;
        loop {
            let e = self.enclosure(b);
            if e.0.is_positive() || e.1.is_negative() {
                return e;
            }
            b += 8;
        }
    }

    /// c·self for rational c.
    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::integer(0);
        }
        if let Some(r) = self.as_rational() {
            return Self::rational(r * c);
        }
        let (a, b) = (&self.re.0 * c, &self.re.1 * c);
        let re = if c.is_positive() { (a, b) } else { (b, a) };
        AlgebraicNumber { min_poly: self.min_poly.scale_roots(c), re, im: zero_iv() }
    }

    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::integer(1);
        }
        if let Some(r) = self.as_rational() {
            return Self::rational(num_traits::pow(r, k as usize));
        }
        let r = power_poly(&self.min_poly, k as usize);
        locate(&r, |bits| iv_pow(&self.enclosure(bits + 4 * k), k))
    }

    /// Nonnegative square root of a nonnegative real.
    pub fn sqrt(&self) -> Self {
        let r = self.min_poly.inflate(2);
        locate(&r, |bits| {
            let (lo, hi) = self.enclosure(2 * bits + 4);
            (sqrt_lower(&lo, bits + 2), sqrt_upper(&hi, bits + 2))
        })
    }

    /// Whether self = a·b, decided without factoring: self must be a root of the
    /// product polynomial, and an enclosure of a·b must hold no other root of it.
    pub fn is_product_of(&self, a: &Self, b: &Self) -> bool {
        if let Some(r) = b.as_rational() {
            return self.equals(&a.scale(&r));
        }
        if let Some(r) = a.as_rational() {
            return self.equals(&b.scale(&r));
        }
        // a, b are irrational, hence nonzero: test whichever of self = a·b,
        // a = self/b, b = self/a has the smallest resultant.
        let (da, db, dc) = (a.degree(), b.degree(), self.degree());
        if da * db <= dc * da.min(db) {
            let r = product_poly(a.min_poly(), b.min_poly());
            return self.relation_root(&r, |bits| iv_mul(&a.enclosure(bits), &b.enclosure(bits)));
        }
        if self.as_rational().is_some_and(|c| c.is_zero()) || !self.is_real() {
            return false;
        }
        let (x, y) = if db <= da { (a, b) } else { (b, a) };
        // x = self / y
        let r = quotient_poly(&self.min_poly, y.min_poly());
        x.relation_root(&r, |bits| iv_div(&self.enclosure(bits), &y.enclosure_nonzero(bits + 8)))
    }

    /// Whether self = a^k.
    pub fn is_power_of(&self, a: &Self, k: u32) -> bool {
        let r = power_poly(a.min_poly(), k as usize);
        self.relation_root(&r, |bits| iv_pow(&a.enclosure(bits + 4 * k), k))
    }

    fn relation_root(&self, r: &ZPoly, enclosure: impl Fn(u32) -> Interval) -> bool {
        if !self.is_real() || !r.rem_is_zero(&self.min_poly) {
            return false;
        }
        let mut rest = r.clone();
        while let Some(q) = rest.div_exact(&self.min_poly) {
            rest = q;
        }
        let mut me = self.clone();
        let mut bits = 16;
        loop {
            let (lo, hi) = enclosure(bits);
            me.refine(bits + 2);
            if me.re.1 < lo || hi < me.re.0 {
                return false;
            }
            // Both values are roots of r lying in the hull.
            let lo = lo.min(me.re.0.clone());
            let hi = hi.max(me.re.1.clone());
            if count_closed(&rest, &lo, &hi) == 0 && count_closed(&me.min_poly, &lo, &hi) == 1 {
                return true;
            }
            bits += 16;
            assert!(bits < 1 << 14, "relation check did not converge");
        }
    }

    /// All roots of the minimal polynomial: real ones in increasing order, then
    /// the non-real ones.
    pub fn conjugates(&self) -> Vec<AlgebraicNumber> {
        conjugates_of(&self.min_poly)
    }

    /// Certified disk around the number at the requested precision.
    pub fn disk(&self, bits: u32) -> RootDisk {
        let disks = complex_roots(&self.min_poly, bits);
        let (a, b) = self.rough_center();
        disks
            .into_iter()
            .filter(|d| {
                let (re, im) = d.rectangle();
                !(re.1 < self.re.0 || self.re.1 < re.0 || im.1 < self.im.0 || self.im.1 < im.0)
            })
            .min_by(|x, y| {
                let dx = (rat_f64(&x.center.re) - a).hypot(rat_f64(&x.center.im) - b);
                let dy = (rat_f64(&y.center.re) - a).hypot(rat_f64(&y.center.im) - b);
                dx.total_cmp(&dy)
            })
            .expect("the isolating rectangle meets a root disk")
    }
}

/// Roots of an irreducible polynomial as algebraic numbers.
pub fn conjugates_of(min_poly: &ZPoly) -> Vec<AlgebraicNumber> {
    let mut out: Vec<AlgebraicNumber> =
        isolate_real(min_poly).into_iter().map(|iv| AlgebraicNumber::real_root(min_poly.clone(), iv)).collect();
    if out.len() < min_poly.deg() {
        for d in complex_roots(min_poly, 16) {
            if d.meets_real_axis() {
                continue;
            }
            let (re, im) = d.rectangle();
            out.push(AlgebraicNumber::complex_root(min_poly.clone(), re, im));
        }
    }
    out
}

fn complex_same_root(a: &AlgebraicNumber, b: &AlgebraicNumber) -> bool {
    let (da, db) = (a.disk(24), b.disk(24));
    da == db
}

/// Locates the irreducible factor of `f` having the value enclosed by
/// `enclosure(bits)` as a root, refining until the enclosure isolates it.
pub fn locate(f: &ZPoly, enclosure: impl Fn(u32) -> Interval) -> AlgebraicNumber {
    let s = f.squarefree_part();
    let mut bits = 8;
    loop {
        let (lo, hi) = enclosure(bits);
        if count_closed(&s, &lo, &hi) == 1 {
            if s.sign_at(&lo) == 0 {
                return AlgebraicNumber::rational(lo);
            }
            if s.sign_at(&hi) == 0 {
                return AlgebraicNumber::rational(hi);
            }
            let m = find_factor(&s, &mut |g| count_closed(g, &lo, &hi) == 1).expect("a factor has the root");
            return AlgebraicNumber::real_root(m, (lo, hi));
        }
        bits += 8;
        assert!(bits < 1 << 14, "root location did not converge");
    }
}

pub(crate) fn iv_mul(a: &Interval, b: &Interval) -> Interval {
    let c = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let lo = c.iter().min().cloned().expect("nonempty");
    let hi = c.iter().max().cloned().expect("nonempty");
    (lo, hi)
}

fn iv_div(a: &Interval, b: &Interval) -> Interval {
    assert!(b.0.is_positive() || b.1.is_negative(), "divisor interval contains zero");
    iv_mul(a, &(b.1.recip(), b.0.recip()))
}

fn iv_pow(a: &Interval, k: u32) -> Interval {
    let mut acc = (BigRational::one(), BigRational::one());
    for _ in 0..k {
        acc = iv_mul(&acc, a);
    }
    if k % 2 == 0 && a.0.is_negative() && a.1.is_positive() {
        acc.0 = BigRational::zero();
    }
    acc
}

/// `{"minPoly": [...], "isolation": {"re": [a, b], "im": [c, d]}}`, coefficients
/// lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicJson {
    #[serde(rename = "minPoly")]
    pub min_poly: Vec<String>,
    pub isolation: IsolationJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolationJson {
    pub re: [String; 2],
    pub im: [String; 2],
}

impl AlgebraicJson {
    pub fn from_number(a: &AlgebraicNumber) -> Self {
        AlgebraicJson {
            min_poly: a.min_poly.coeffs().iter().map(BigInt::to_string).collect(),
            isolation: IsolationJson {
                re: [a.re.0.to_string(), a.re.1.to_string()],
                im: [a.im.0.to_string(), a.im.1.to_string()],
            },
        }
    }

    pub fn to_number(&self) -> Result<AlgebraicNumber, SpectralError> {
        let bad = |s: &str| SpectralError::Parse(format!("bad number \"{s}\""));
        let coeffs =
            self.min_poly.iter().map(|s| s.trim().parse::<BigInt>().map_err(|_| bad(s))).collect::<Result<Vec<_>, _>>()?;
        let p = ZPoly::new(coeffs);
        if !is_irreducible_z(&p) {
            return Err(SpectralError::NotIrreducible(p.to_string()));
        }
        let rat = |s: &str| s.trim().parse::<BigRational>().map_err(|_| bad(s));
        let re = (rat(&self.isolation.re[0])?, rat(&self.isolation.re[1])?);
        let im = (rat(&self.isolation.im[0])?, rat(&self.isolation.im[1])?);
        if re.0 > re.1 || im.0 > im.1 {
            return Err(SpectralError::Parse("empty isolation rectangle".into()));
        }
        if im.0.is_zero() && im.1.is_zero() {
            if count_closed(&p, &re.0, &re.1) != 1 {
                return Err(SpectralError::NotIsolating(p.to_string()));
            }
            return Ok(AlgebraicNumber::real_root(p, re));
        }
        Ok(AlgebraicNumber::complex_root(p, re, im))
    }
}
