//! Membership of S-unit points in Laurent hypersurfaces, by evaluation in
//! random residue fields F_p[t]/(m), plus an exact path for two-term equations.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::funcfield::{random_irreducible, FpPoly, FpRat, Poly};

use super::{
    eval_coord_mod, frobenius_root, p_adic_valuation, represent, root_depth, GeneratorBasis, LaurentEquation,
    SUnit, SUnitError, SUnitPoint,
};

/// Modulus degree, number of independent moduli and master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OracleParams {
    pub degree: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams { degree: 40, trials: 4, seed: 0 }
    }
}

/// Residues of the generators modulo one irreducible m.
#[derive(Clone, Debug)]
pub struct ModContext {
    pub modulus: FpPoly,
    pub gens: Vec<FpPoly>,
    /// p^d − 1, the order of F_{p^d}^*.
    pub group_order: BigInt,
}

impl ModContext {
    pub fn new(basis: &GeneratorBasis, modulus: FpPoly) -> Result<Self, SUnitError> {
        if basis.is_bad_modulus(&modulus) {
            return Err(SUnitError::BadModulus(modulus.render("t")));
        }
        let gens = basis.generators().iter().map(|g| g.rem(&modulus)).collect();
        let group_order = num_traits::pow(BigInt::from(basis.p()), modulus.deg()) - 1;
        Ok(ModContext { modulus, gens, group_order })
    }

    /// c mod m, or None when m divides the denominator.
    pub fn reduce(&self, c: &FpRat) -> Option<FpPoly> {
        let den = c.den().rem(&self.modulus);
        let inv = den.inv_mod(&self.modulus)?;
        Some(c.num().rem(&self.modulus).mul_mod(&inv, &self.modulus))
    }
}

/// An equation evaluated at a point and pulled back by the maximal Frobenius
/// root: value = (Σ c_k·M_k)^{p^descent}.
#[derive(Clone, Debug)]
pub struct DescendedEquation {
    pub terms: Vec<(FpRat, SUnit)>,
    pub descent: u32,
    /// Degree bound for L·Σ c_k·M_k, with L clearing every denominator.
    pub d_max: BigInt,
}

pub fn descend_equation(
    basis: &GeneratorBasis,
    point: &SUnitPoint,
    eq: &LaurentEquation,
) -> Result<DescendedEquation, SUnitError> {
    let fp = basis.fp();
    let p = fp.p();
    let point = point.padded(basis.len());
    let terms = eq.poly.substitute(&point, fp)?;
    const CAP: u32 = 4096;
    let mut k = CAP;
    for (_, m) in &terms {
        for e in m.exps.iter().filter(|e| !e.is_zero()) {
            k = k.min(p_adic_valuation(e, p, k));
        }
    }
    if k == CAP {
        k = 0;
    }
    for (c, _) in &terms {
        k = k.min(root_depth(c, CAP));
    }
    let scale = num_traits::pow(BigInt::from(p), k as usize);
    let terms: Vec<(FpRat, SUnit)> = terms
        .into_iter()
        .map(|(c, m)| {
            let m = SUnit { unit: m.unit, exps: m.exps.iter().map(|e| e / &scale).collect() };
            (frobenius_root(&c, k), m)
        })
        .collect();
    let d_max = degree_bound(basis, &terms);
    Ok(DescendedEquation { terms, descent: k, d_max })
}

fn degree_bound(basis: &GeneratorBasis, terms: &[(FpRat, SUnit)]) -> BigInt {
    let degs = basis.degrees();
    let mut l_deg = BigInt::zero();
    for (j, &d) in degs.iter().enumerate() {
        let worst = terms.iter().map(|(_, m)| -&m.exps[j]).max().unwrap_or_default();
        if worst.is_positive() {
            l_deg += worst * d;
        }
    }
    let mut dens: Vec<&FpPoly> = Vec::new();
    for (c, _) in terms {
        if !c.den().is_one() && !dens.contains(&c.den()) {
            dens.push(c.den());
        }
    }
    l_deg += dens.iter().map(|d| d.deg()).sum::<usize>();
    let top = terms
        .iter()
        .map(|(c, m)| {
            let mono: BigInt = m.exps.iter().zip(&degs).map(|(e, &d)| e * d).sum();
            mono + c.num().deg() - c.den().deg()
        })
        .max()
        .unwrap_or_default();
    (top + l_deg).max(BigInt::zero())
}

#[derive(Clone, Debug, PartialEq)]
pub enum MembershipVerdict {
    /// Certified: the equation is nonzero at the point. `modulus` is the
    /// residue-field witness, or None when the decision was exact.
    NotMember { equation: usize, modulus: Option<FpPoly>, trial: Option<usize> },
    /// Every equation vanished modulo every drawn modulus.
    /// `error_bound_log2` is None when the bound is exactly zero.
    ProbablyMember { error_bound_log2: Option<f64>, d_max: BigInt, moduli: Vec<FpPoly> },
    /// Decided exactly.
    Member,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        !matches!(self, MembershipVerdict::NotMember { .. })
    }

    pub fn is_certain(&self) -> bool {
        !matches!(self, MembershipVerdict::ProbablyMember { .. })
    }
}

/// log2 of (D·d/p^d)^trials, or None for D = 0.
pub fn error_bound_log2(p: u64, d: usize, d_max: &BigInt, trials: usize) -> Option<f64> {
    if d_max.is_zero() {
        return None;
    }
    Some(trials as f64 * (log2_big(d_max) + (d as f64).log2() - d as f64 * (p as f64).log2()))
}

fn log2_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().expect("finite").log2()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("finite").log2() + shift as f64
    }
}

fn check_parameters(p: u64, d: usize, d_max: &BigInt) -> Result<(), SUnitError> {
    if d_max.is_zero() {
        return Ok(());
    }
    // p^d/d ≤ D_max
    if d as f64 * (p as f64).log2() - (d as f64).log2() <= log2_big(d_max) {
        return Err(SUnitError::BadParameters { p, d, d_max: d_max.clone() });
    }
    Ok(())
}

/// Draws `params.trials` moduli of degree `params.degree`, one ChaCha8 stream
/// per trial, redrawing generators and divisors of equation coefficients.
pub fn draw_moduli(
    basis: &GeneratorBasis,
    equations: &[LaurentEquation],
    params: &OracleParams,
) -> Result<Vec<ModContext>, SUnitError> {
    let fp = basis.fp();
    let coeff_polys: Vec<&FpPoly> = equations
        .iter()
        .flat_map(|e| e.poly.terms().flat_map(|(_, c)| [c.num(), c.den()]))
        .filter(|q| !q.is_constant())
        .collect();
    (0..params.trials)
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(trial as u64);
            loop {
                let m = random_irreducible(fp, params.degree, &mut rng);
                if basis.is_bad_modulus(&m) || coeff_polys.iter().any(|q| q.rem(&m).is_zero()) {
                    continue;
                }
                return ModContext::new(basis, m);
            }
        })
        .collect()
}

fn eval_descended(ctx: &ModContext, eq: &DescendedEquation) -> FpPoly {
    let fp = *ctx.modulus.field();
    let mut acc = Poly::zero(fp);
    for (c, m) in &eq.terms {
        let c = ctx.reduce(c).expect("moduli avoid coefficient denominators");
        acc = acc.add_ref(&c.mul_mod(&eval_coord_mod(ctx, m), &ctx.modulus));
    }
    acc
}

/// The probabilistic test with caller-supplied moduli (all of one degree).
pub fn membership_with_moduli(
    basis: &GeneratorBasis,
    point: &SUnitPoint,
    equations: &[LaurentEquation],
    moduli: &[ModContext],
) -> Result<MembershipVerdict, SUnitError> {
    let p = basis.p();
    let d = moduli.first().map(|m| m.modulus.deg()).unwrap_or(0);
    let descended = equations
        .iter()
        .map(|e| descend_equation(basis, point, e))
        .collect::<Result<Vec<_>, _>>()?;
    let d_max = descended.iter().map(|e| e.d_max.clone()).max().unwrap_or_default();
    if !descended.is_empty() {
        check_parameters(p, d, &d_max)?;
    }
    let witness = moduli
        .par_iter()
        .enumerate()
        .find_map_first(|(trial, ctx)| {
            descended
                .iter()
                .position(|eq| !eval_descended(ctx, eq).is_zero())
                .map(|equation| (trial, equation))
        });
    if let Some((trial, equation)) = witness {
        return Ok(MembershipVerdict::NotMember {
            equation,
            modulus: Some(moduli[trial].modulus.clone()),
            trial: Some(trial),
        });
    }
    let bound = if descended.is_empty() { None } else { error_bound_log2(p, d, &d_max, moduli.len()) };
    Ok(MembershipVerdict::ProbablyMember {
        error_bound_log2: bound,
        d_max,
        moduli: moduli.iter().map(|m| m.modulus.clone()).collect(),
    })
}

pub fn membership_test(
    basis: &GeneratorBasis,
    point: &SUnitPoint,
    equations: &[LaurentEquation],
    params: &OracleParams,
) -> Result<MembershipVerdict, SUnitError> {
    let moduli = draw_moduli(basis, equations, params)?;
    membership_with_moduli(basis, point, equations, &moduli)
}

/// Exact verdict for one equation when its value has at most two distinct
/// monomials: c_1·M_1 + c_2·M_2 = 0 iff M_1/M_2 = −c_2/c_1 as S-units.
pub fn decide_binomial(
    basis: &GeneratorBasis,
    point: &SUnitPoint,
    eq: &LaurentEquation,
) -> Result<Option<bool>, SUnitError> {
    let fp = basis.fp();
    let point = point.padded(basis.len());
    let mut merged: Vec<(FpRat, Vec<BigInt>)> = Vec::new();
    for (c, m) in eq.poly.substitute(&point, fp)? {
        let c = c.scale(&m.unit);
        match merged.iter_mut().find(|(_, e)| *e == m.exps) {
            Some(slot) => slot.0 = slot.0.add(&c),
            None => merged.push((c, m.exps)),
        }
        if merged.len() > 2 {
            return Ok(None);
        }
    }
    merged.retain(|(c, _)| !c.is_zero());
    Ok(Some(match merged.as_slice() {
        [] => true,
        [_] => false,
        [(c1, e1), (c2, e2)] => {
            let ratio = c2.neg().div(c1).expect("nonzero");
            match represent(basis, &ratio) {
                Err(_) => false,
                Ok(r) => r.unit == 1 && r.exps.iter().zip(e1.iter().zip(e2)).all(|(x, (a, b))| *x == a - b),
            }
        }
        _ => unreachable!(),
    }))
}

/// Exact decision when every equation is binomial, else the probabilistic test
/// with the given moduli.
pub fn membership_auto(
    basis: &GeneratorBasis,
    point: &SUnitPoint,
    equations: &[LaurentEquation],
    moduli: &[ModContext],
) -> Result<MembershipVerdict, SUnitError> {
    let mut exact = Vec::with_capacity(equations.len());
    for eq in equations {
        match decide_binomial(basis, point, eq)? {
            Some(v) => exact.push(v),
            None => return membership_with_moduli(basis, point, equations, moduli),
        }
    }
    Ok(match exact.iter().position(|v| !v) {
        Some(equation) => MembershipVerdict::NotMember { equation, modulus: None, trial: None },
        None => MembershipVerdict::Member,
    })
}
