//! Factorization over Z: a modular factorization over a small prime, Hensel
//! lifting along a factor tree, then subset recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::zpoly::ZPoly;
use crate::funcfield::{factor as factor_fp, Fp, FpPoly, Poly};

/// Primitive irreducible factors with multiplicities, sorted by degree then
/// coefficients. Constants and the sign are dropped.
pub fn factor_z(f: &ZPoly) -> Vec<(ZPoly, u32)> {
    let mut out = Vec::new();
    for (g, e) in f.squarefree_decomposition() {
        for h in factor_squarefree(&g) {
            out.push((h, e));
        }
    }
    out.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())));
    out
}

pub fn is_irreducible_z(f: &ZPoly) -> bool {
    let fs = factor_z(f);
    fs.len() == 1 && fs[0].1 == 1 && f.deg() >= 1
}

/// Irreducible factors of a squarefree polynomial.
pub fn factor_squarefree(f: &ZPoly) -> Vec<ZPoly> {
    let mut out = Vec::new();
    factor_squarefree_until(f, &mut |g| {
        out.push(g.clone());
        false
    });
    out.sort_by(|a, b| a.deg().cmp(&b.deg()).then_with(|| a.coeffs().cmp(b.coeffs())));
    out
}

/// Irreducible factor of the squarefree `f` satisfying `pred`; factors are
/// produced lazily so the search stops as soon as one qualifies.
pub fn find_factor(f: &ZPoly, pred: &mut dyn FnMut(&ZPoly) -> bool) -> Option<ZPoly> {
    let mut hit = None;
    factor_squarefree_until(f, &mut |g| {
        if pred(g) {
            hit = Some(g.clone());
            true
        } else {
            false
        }
    });
    hit
}

/// Feeds irreducible factors to `sink` until it returns true.
fn factor_squarefree_until(f: &ZPoly, sink: &mut dyn FnMut(&ZPoly) -> bool) -> bool {
    let mut f = f.primitive();
    if f.deg() == 0 {
        return false;
    }
    if f.coeff(0).is_zero() {
        let x = ZPoly::from_i64s(&[0, 1]);
        if sink(&x) {
            return true;
        }
        f = f.div_exact(&x).expect("x divides").primitive();
        if f.deg() == 0 {
            return false;
        }
    }
    if f.deg() == 1 {
        return sink(&f);
    }
    let (p, modular) = choose_prime(&f);
    if modular.len() == 1 {
        return sink(&f);
    }
    let n = f.deg() as u64;
    let bound = f.lc().abs() * f.norm2_ceil() * (BigInt::one() << n) * 2;
    let pb = BigInt::from(p);
    let mut modulus = pb.clone();
    while modulus <= bound {
        modulus = &modulus * &modulus;
    }
    let lifted = lift_tree(&f, &modular, p, &modulus);
    recombine(f, lifted, &modulus, sink)
}

/// Among a few primes keeping f squarefree, the one with fewest modular factors.
fn choose_prime(f: &ZPoly) -> (u64, Vec<FpPoly>) {
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    let mut p = 2u64;
    while tried < 6 {
        p += 1;
        if !crate::funcfield::field::is_prime_u64(p) {
            continue;
        }
        let fp = Fp::new(p);
        let fbar = reduce_fp(f, fp);
        if fbar.deg() != f.deg() || !fbar.gcd(&fbar.derivative()).is_one() {
            continue;
        }
        tried += 1;
        let facs: Vec<FpPoly> = factor_fp(&fbar).factors.into_iter().map(|(g, _)| g).collect();
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        if best.as_ref().is_some_and(|(_, b)| b.len() == 1) {
            break;
        }
    }
    best.expect("a good prime exists")
}

fn reduce_fp(f: &ZPoly, fp: Fp) -> FpPoly {
    Poly::new(fp, f.coeffs().iter().map(|c| fp_of(c, fp.p())).collect())
}

fn fp_of(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("reduced")
}

fn lift_fp(g: &FpPoly) -> ZPoly {
    ZPoly::new(g.coeffs().iter().map(|&c| BigInt::from(c)).collect())
}

fn modp(f: &ZPoly, m: &BigInt) -> ZPoly {
    ZPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn symmetric(f: &ZPoly, m: &BigInt) -> ZPoly {
    let half: BigInt = m / 2;
    ZPoly::new(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// (q, r) with a = q·h + r mod m, h monic.
fn divrem_monic(a: &ZPoly, h: &ZPoly, m: &BigInt) -> (ZPoly, ZPoly) {
    let dh = h.deg();
    let mut rem: Vec<BigInt> = a.coeffs().iter().map(|c| c.mod_floor(m)).collect();
    if rem.len() <= dh {
        return (ZPoly::zero(), ZPoly::new(rem));
    }
    let mut q = vec![BigInt::zero(); rem.len() - dh];
    for k in (0..q.len()).rev() {
        let c = rem[k + dh].mod_floor(m);
        if c.is_zero() {
            continue;
        }
        for (j, hj) in h.coeffs().iter().enumerate() {
            rem[k + j] = (&rem[k + j] - &c * hj).mod_floor(m);
        }
        q[k] = c;
    }
    rem.truncate(dh);
    (ZPoly::new(q), ZPoly::new(rem))
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    assert!(e.gcd.is_one(), "leading coefficient not invertible");
    e.x.mod_floor(m)
}

/// One quadratic Hensel step: f ≡ g·h and s·g + t·h ≡ 1 mod m, lifted to m².
#[allow(clippy::too_many_arguments)]
fn hensel_step(f: &ZPoly, g: &ZPoly, h: &ZPoly, s: &ZPoly, t: &ZPoly, m: &BigInt) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let mm = m * m;
    let e = modp(&f.sub(&g.mul(h)), &mm);
    let (q, r) = divrem_monic(&s.mul(&e), h, &mm);
    let g2 = modp(&g.add(&t.mul(&e)).add(&q.mul(g)), &mm);
    let h2 = modp(&h.add(&r), &mm);
    let b = modp(&s.mul(&g2).add(&t.mul(&h2)).sub(&ZPoly::one()), &mm);
    let (c, d) = divrem_monic(&s.mul(&b), &h2, &mm);
    let s2 = modp(&s.sub(&d), &mm);
    let t2 = modp(&t.sub(&t.mul(&b)).sub(&c.mul(&g2)), &mm);
    (g2, h2, s2, t2)
}

/// Monic lifts mod `target` (a power p^(2^j)) of the monic modular factors of f.
fn lift_tree(f: &ZPoly, factors: &[FpPoly], p: u64, target: &BigInt) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let inv = inv_mod(&f.lc(), target);
        return vec![modp(&f.scale(&inv), target)];
    }
    let fp = Fp::new(p);
    let (left, right) = factors.split_at(factors.len() / 2);
    let prod = |fs: &[FpPoly]| fs.iter().fold(Poly::one(fp), |acc, g| acc.mul_ref(g));
    let lc = fp_of(&f.lc(), p);
    let gbar = prod(left).scale(&lc);
    let hbar = prod(right);
    let (one, sbar, tbar) = gbar.ext_gcd(&hbar);
    assert!(one.is_one(), "modular factors not coprime");
    let mut m = BigInt::from(p);
    let (mut g, mut h, mut s, mut t) = (lift_fp(&gbar), lift_fp(&hbar), lift_fp(&sbar), lift_fp(&tbar));
    while &m < target {
        (g, h, s, t) = hensel_step(f, &g, &h, &s, &t, &m);
        m = &m * &m;
    }
    let mut out = lift_tree(&g, left, p, target);
    out.extend(lift_tree(&h, right, p, target));
    out
}

fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut c = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                cur = Some(c);
                break;
            }
        }
        Some(out)
    })
}

fn recombine(mut f: ZPoly, mut lifted: Vec<ZPoly>, m: &BigInt, sink: &mut dyn FnMut(&ZPoly) -> bool) -> bool {
    let mut s = 1;
    'outer: while 2 * s <= lifted.len() {
        for subset in combinations(lifted.len(), s) {
            let lc = f.lc();
            let mut g = ZPoly::constant(lc.clone());
            for &i in &subset {
                g = modp(&g.mul(&lifted[i]), m);
            }
            let h = symmetric(&g, m).primitive();
            if h.deg() == 0 || h.coeff(0).is_zero() || !(f.coeff(0) % h.coeff(0)).is_zero() {
                continue;
            }
            if let Some(q) = f.div_exact(&h) {
                if sink(&h) {
                    return true;
                }
                f = q.primitive();
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
                continue 'outer;
            }
        }
        s += 1;
    }
    f.deg() > 0 && sink(&f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(c: &[i64]) -> ZPoly {
        ZPoly::from_i64s(c)
    }

    #[test]
    fn swinnerton_dyer_like_and_products() {
        // x^4 − 10x^2 + 1 is irreducible but splits mod every prime.
        let f = z(&[1, 0, -10, 0, 1]);
        assert_eq!(factor_squarefree(&f), vec![f.clone()]);
        let g = z(&[-2, 0, 1]).mul(&z(&[-3, 0, 1])).mul(&z(&[1, 1, 1])).mul(&z(&[5, 3]));
        let fs = factor_squarefree(&g);
        assert_eq!(fs, vec![z(&[5, 3]), z(&[-3, 0, 1]), z(&[-2, 0, 1]), z(&[1, 1, 1])]);
        let h = z(&[-1, 1]).pow(3).mul(&z(&[0, 1]));
        assert_eq!(factor_z(&h), vec![(z(&[-1, 1]), 3), (z(&[0, 1]), 1)]);
    }

    #[test]
    fn cyclotomic_product() {
        let f = z(&[-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        let fs = factor_squarefree(&f);
        assert_eq!(fs.len(), 6);
        let prod = fs.iter().fold(ZPoly::one(), |a, g| a.mul(g));
        assert_eq!(prod, f);
    }
}
