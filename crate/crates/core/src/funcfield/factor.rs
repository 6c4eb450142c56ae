//! Factorization over F_p: squarefree decomposition, distinct-degree
//! splitting, then Cantor–Zassenhaus equal-degree splitting.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{prime_factors_u64, Fp};
use super::poly::Poly;

pub type FpPoly = Poly<Fp>;

/// unit · ∏ factor^mult with monic irreducible factors, sorted by (degree, coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(FpPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self, fp: Fp) -> FpPoly {
        let mut acc = Poly::constant(fp, self.unit);
        for (f, e) in &self.factors {
            acc = acc.mul_ref(&f.pow(*e as u64));
        }
        acc
    }
}

const FACTOR_SEED: u64 = 0x5eed_fac7;

/// Complete factorization of a nonzero polynomial. Deterministic.
pub fn factor(f: &FpPoly) -> Factorization {
    assert!(!f.is_zero(), "factor of the zero polynomial");
    let unit = f.lc();
    let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
    let mut factors: Vec<(FpPoly, u32)> = Vec::new();
    for (sq, mult) in squarefree_decomposition(&f.monic()) {
        for (block, d) in distinct_degree(&sq) {
            for g in equal_degree(&block, d, &mut rng) {
                factors.push((g, mult));
            }
        }
    }
    sort_factors(&mut factors);
    Factorization { unit, factors }
}

fn sort_factors(factors: &mut Vec<(FpPoly, u32)>) {
    factors.sort_by(|a, b| {
        a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
    });
    let mut merged: Vec<(FpPoly, u32)> = Vec::with_capacity(factors.len());
    for (g, e) in factors.drain(..) {
        match merged.last_mut() {
            Some((h, m)) if *h == g => *m += e,
            _ => merged.push((g, e)),
        }
    }
    *factors = merged;
}

/// p-th root of a polynomial whose exponents are all multiples of p.
fn pth_root(f: &FpPoly) -> FpPoly {
    let p = f.field().p() as usize;
    f.deflate(p).expect("exponents divisible by p")
}

/// Yun-style decomposition valid in characteristic p: monic squarefree
/// coprime parts with their multiplicities.
pub fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let fp = *f.field();
    let p = fp.p() as u32;
    let f = f.monic();
    if f.deg() == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree_decomposition(&pth_root(&f)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_exact(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y);
        if fac.deg() > 0 {
            out.push((fac, i));
        }
        i += 1;
        c = c.div_exact(&y);
        w = y;
    }
    if !c.is_one() {
        for (g, m) in squarefree_decomposition(&pth_root(&c)) {
            out.push((g, m * p));
        }
    }
    out
}

/// t^(p^k) mod m for k = 1.., by repeated p-th powering.
fn frobenius_step(h: &FpPoly, m: &FpPoly) -> FpPoly {
    h.pow_mod_u64(h.field().p(), m)
}

/// Splits a monic squarefree polynomial into products of irreducibles of equal degree.
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let fp = *f.field();
    let mut out = Vec::new();
    let mut rest = f.monic();
    let x = Poly::x(fp);
    let mut h = x.rem(&rest);
    let mut i = 1usize;
    while rest.deg() >= 2 * i {
        h = frobenius_step(&h, &rest);
        let g = h.sub_ref(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

fn random_poly_below(fp: Fp, n: usize, rng: &mut impl Rng) -> FpPoly {
    let coeffs = (0..n).map(|_| rng.gen_range(0..fp.p())).collect();
    Poly::new(fp, coeffs)
}

/// Splits a monic squarefree product of degree-d irreducibles.
pub fn equal_degree(f: &FpPoly, d: usize, rng: &mut impl Rng) -> Vec<FpPoly> {
    let n = f.deg();
    if n == d {
        return vec![f.monic()];
    }
    let fp = *f.field();
    let p = fp.p();
    loop {
        let a = random_poly_below(fp, n, rng);
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut acc = a.clone();
            let mut cur = a.clone();
            for _ in 1..d {
                cur = cur.mul_mod(&cur, f);
                acc = acc.add_ref(&cur);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
            a.pow_mod(&e, f).sub_ref(&Poly::one(fp))
        };
        let g = b.gcd(f);
        if g.deg() > 0 && g.deg() < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.div_exact(&g), d, rng));
            return out;
        }
    }
}

/// Rabin's test: f of degree n is irreducible iff t^(p^n) ≡ t mod f and
/// gcd(t^(p^(n/q)) − t, f) = 1 for every prime q dividing n.
pub fn is_irreducible(f: &FpPoly) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let fp = *f.field();
    let m = f.monic();
    let x = Poly::x(fp);
    let mut powers = Vec::with_capacity(n + 1);
    let mut h = x.rem(&m);
    powers.push(h.clone());
    for _ in 0..n {
        h = frobenius_step(&h, &m);
        powers.push(h.clone());
    }
    if powers[n] != x.rem(&m) {
        return false;
    }
    prime_factors_u64(n as u64).into_iter().all(|q| {
        let k = n / q as usize;
        powers[k].sub_ref(&x).gcd(&m).is_one()
    })
}

/// Uniform monic irreducible of degree d by rejection sampling.
pub fn random_irreducible(fp: Fp, d: usize, rng: &mut impl Rng) -> FpPoly {
    assert!(d >= 1, "degree must be positive");
    loop {
        let mut coeffs: Vec<u64> = (0..d).map(|_| rng.gen_range(0..fp.p())).collect();
        coeffs.push(1);
        let f = Poly::new(fp, coeffs);
        if is_irreducible(&f) {
            return f;
        }
    }
}

pub fn random_irreducible_seeded(fp: Fp, d: usize, seed: u64) -> FpPoly {
    random_irreducible(fp, d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Multiplicity of the irreducible `pi` in `f` (f nonzero).
pub fn multiplicity(f: &FpPoly, pi: &FpPoly) -> u32 {
    let mut k = 0;
    let mut cur = f.clone();
    loop {
        let (q, r) = cur.div_rem(pi);
        if !r.is_zero() {
            return k;
        }
        cur = q;
        k += 1;
    }
}
