//! The unipotent system on G_m^6
//! x ↦ ((t+1)²x1, x1x2, t²x3, x3x4, (t−1)²x5, x5x6) from α = (t+1, 1, t, 1, t−1, 1),
//! whose return set into α·C1·C2·C3·C4 contains every p^m + p^{2m}.
//!
//! Membership at n = p^m + p^{2m} is shown by an explicit witness
//! (u, v, w, x) = (t^{p^m}, t^{p^{2m}}, t^{p^{3m}}, t^{p^{4m}}). Non-membership at
//! other indices is certified through an eliminant of the odd coordinates:
//! writing x1 = (t+1)a², x3 = t·b², x5 = (t−1)c², any point of the image has
//! a = ±(u+1)(v+1), b = ±uv, c = ±(u−1)(v−1), hence ±a ± c ∓ 2b − 2 = 0 for
//! some signs, and the product over all sign patterns is a polynomial E(a², b², c²).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, REPORT_SCHEMA};
use crate::funcfield::field::is_prime_u64;
use crate::funcfield::{parse_ratfunc, Field, Fp, FpRat, RatFunc};
use crate::linalg::IntMatrix;
use crate::sunit::{
    add_constant, draw_moduli, membership_auto, membership_with_moduli, AddConstantOptions, BasisExtension,
    GeneratorBasis, LaurentEquation, LaurentPoly, MembershipVerdict, OracleParams, SUnit, SUnitPoint,
};
use crate::torusdyn::{iterate, IterMode, ShiftedMonomialMap};

/// The map over the basis (t+1, t, t−1) and the start α.
pub fn unipotent_six(p: u64) -> Result<(ShiftedMonomialMap, SUnitPoint), ExperimentError> {
    if !is_prime_u64(p) {
        return Err(ExperimentError::Precondition(format!("{p} is not prime")));
    }
    let basis = GeneratorBasis::parse(Fp::new(p), &["t + 1", "t", "t - 1"])?;
    let mut a = IntMatrix::zeros(6, 6);
    for b in 0..3 {
        a.set(2 * b, 2 * b, BigInt::one());
        a.set(2 * b + 1, 2 * b, BigInt::one());
        a.set(2 * b + 1, 2 * b + 1, BigInt::one());
    }
    let g = |j: usize, e: i64| SUnit::generator(3, j, BigInt::from(e));
    let c = SUnitPoint::new(vec![g(0, 2), SUnit::one(3), g(1, 2), SUnit::one(3), g(2, 2), SUnit::one(3)]);
    let start = SUnitPoint::new(vec![g(0, 1), SUnit::one(3), g(1, 1), SUnit::one(3), g(2, 1), SUnit::one(3)]);
    Ok((ShiftedMonomialMap::monomial(basis, &c, &a)?, start))
}

/// ((t+1)^{2n+1}, (t+1)^{n²}, t^{2n+1}, t^{n²}, (t−1)^{2n+1}, (t−1)^{n²}).
pub fn orbit_closed_form(n: &BigInt) -> SUnitPoint {
    let odd: BigInt = 2 * n + 1;
    let sq = n * n;
    let coords = (0..3)
        .flat_map(|j| [SUnit::generator(3, j, odd.clone()), SUnit::generator(3, j, sq.clone())])
        .collect();
    SUnitPoint::new(coords)
}

type Poly3 = BTreeMap<[u32; 3], BigInt>;

fn mul3(a: &Poly3, b: &Poly3) -> Poly3 {
    let mut out = Poly3::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// E(A, B, C) with E(a², b², c²) = ∏ (s1·a + s2·c − 2·s3·b − 2) over all
/// eight sign patterns; keys are exponents of (A, B, C).
pub fn elimination_polynomial() -> BTreeMap<[u32; 3], BigInt> {
    let mut acc: Poly3 = [([0, 0, 0], BigInt::one())].into_iter().collect();
    for signs in 0..8u32 {
        let s = |bit: u32| if signs >> bit & 1 == 1 { -1 } else { 1 };
        let factor: Poly3 = [
            ([1, 0, 0], BigInt::from(s(0))),
            ([0, 0, 1], BigInt::from(s(1))),
            ([0, 1, 0], BigInt::from(-2 * s(2))),
            ([0, 0, 0], BigInt::from(-2)),
        ]
        .into_iter()
        .collect();
        acc = mul3(&acc, &factor);
    }
    acc.into_iter()
        .map(|(e, c)| {
            assert!(e.iter().all(|k| k % 2 == 0), "sign-symmetric product has even exponents");
            ([e[0] / 2, e[1] / 2, e[2] / 2], c)
        })
        .collect()
}

/// E(x1/(t+1), x3/t, x5/(t−1)) = 0 as an equation in x1..x6.
pub(crate) fn elimination_equation(fp: Fp) -> Result<LaurentEquation, ExperimentError> {
    let parse = |s: &str| parse_ratfunc(&fp, s, "t").map_err(crate::sunit::SUnitError::from);
    let gens = [parse("t + 1")?, parse("t")?, parse("t - 1")?];
    let mut poly = LaurentPoly::zero(fp, 6);
    for (e, c) in elimination_polynomial() {
        let mut coeff: FpRat = RatFunc::constant(fp, fp.from_bigint(&c));
        for (g, &k) in gens.iter().zip(&e) {
            coeff = coeff.mul(&g.pow(-(k as i64)).map_err(crate::sunit::SUnitError::from)?);
        }
        let exps = vec![e[0] as i64, 0, e[1] as i64, 0, e[2] as i64, 0];
        poly = poly.add(&LaurentPoly::monomial(fp, coeff, exps));
    }
    Ok(LaurentEquation::new(poly)?)
}

fn plus(basis: &GeneratorBasis, s: &SUnit, beta: &FpRat) -> Result<SUnit, ExperimentError> {
    let opts = AddConstantOptions { extension: BasisExtension::Forbidden, ..AddConstantOptions::default() };
    Ok(add_constant(basis, s, beta, &opts)?.coord)
}

/// α·C1(u)·C2(v)·C3(w)·C4(x) for (u, v, w, x) = (t^{p^m}, t^{p^{2m}}, t^{p^{3m}}, t^{p^{4m}}).
pub fn witness_point(basis: &GeneratorBasis, m: u32) -> Result<SUnitPoint, ExperimentError> {
    let fp = basis.fp();
    let p = BigInt::from(basis.p());
    let one = RatFunc::one(fp);
    let minus_one = one.neg();
    let t_pow = |k: u32| SUnit::generator(3, 1, num_traits::pow(p.clone(), (k * m) as usize));
    let (u, v, w, x) = (t_pow(1), t_pow(2), t_pow(3), t_pow(4));
    let (up, um) = (plus(basis, &u, &one)?, plus(basis, &u, &minus_one)?);
    let (vp, vm) = (plus(basis, &v, &one)?, plus(basis, &v, &minus_one)?);
    let (wp, wm) = (plus(basis, &w, &one)?, plus(basis, &w, &minus_one)?);
    let (xp, xm) = (plus(basis, &x, &one)?, plus(basis, &x, &minus_one)?);
    let two = BigInt::from(2);
    let prod = |parts: &[(&SUnit, &BigInt)]| {
        parts.iter().fold(SUnit::one(3), |acc, (s, e)| acc.mul(&s.pow(e, fp), fp))
    };
    let one_e = BigInt::one();
    let g = |j| SUnit::generator(3, j, BigInt::one());
    Ok(SUnitPoint::new(vec![
        prod(&[(&g(0), &one_e), (&up, &two), (&vp, &two)]),
        prod(&[(&vp, &one_e), (&wp, &two), (&xp, &one_e)]),
        prod(&[(&g(1), &one_e), (&u, &two), (&v, &two)]),
        prod(&[(&v, &one_e), (&w, &two), (&x, &one_e)]),
        prod(&[(&g(2), &one_e), (&um, &two), (&vm, &two)]),
        prod(&[(&vm, &one_e), (&wm, &two), (&xm, &one_e)]),
    ]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessCheck {
    pub m: u32,
    pub n: String,
    /// The iterated orbit point agrees with the closed form.
    pub closed_form_matches: bool,
    /// Coordinatewise S-unit equality of f^n(α) and the witness point.
    pub exact: Vec<bool>,
    /// Oracle verdict on f^n(α)/witness against x_i = 1.
    pub oracle_member: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error_bound_log2: Option<f64>,
    /// First failing coordinate (1-based).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failed_coordinate: Option<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NonMemberCheck {
    pub n: u64,
    pub certified: bool,
    /// Residue-field modulus on which the eliminant is nonzero.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessReport {
    pub schema: String,
    pub kind: String,
    pub seed: u64,
    pub p: u64,
    pub m_max: u32,
    pub oracle: OracleParams,
    pub witnesses: Vec<WitnessCheck>,
    /// Spot indices are drawn from [3, p^mMax + p^{2mMax}] outside
    /// {p^i + p^j}, where the eliminant vanishes identically.
    pub eliminant: String,
    pub non_members: Vec<NonMemberCheck>,
    pub pass: bool,
}

fn check_witness(
    map: &ShiftedMonomialMap,
    start: &SUnitPoint,
    m: u32,
    oracle: &OracleParams,
) -> Result<WitnessCheck, ExperimentError> {
    let basis = map.basis();
    let fp = basis.fp();
    let p = BigInt::from(basis.p());
    let n = num_traits::pow(p.clone(), m as usize) + num_traits::pow(p, 2 * m as usize);
    let n64: u64 = n.clone().try_into().map_err(|_| ExperimentError::Precondition(format!("n = {n} too large")))?;
    let (point, _) = iterate(map, basis, start, n64, IterMode::ClosedForm, &AddConstantOptions::default())?;
    let closed_form_matches = point == orbit_closed_form(&n);
    let w = witness_point(basis, m)?;
    let exact: Vec<bool> = point.coords.iter().zip(&w.coords).map(|(a, b)| a == b).collect();
    let quotient = point.mul(&w.inv(fp), fp);
    let ones = (1..=6)
        .map(|i| LaurentEquation::parse(fp, 6, &format!("x{i} - 1")))
        .collect::<Result<Vec<_>, _>>()?;
    let moduli = draw_moduli(basis, &ones, oracle)?;
    let verdict = membership_with_moduli(basis, &quotient, &ones, &moduli)?;
    let exact_verdict = membership_auto(basis, &quotient, &ones, &moduli)?;
    let (oracle_member, error_bound_log2, oracle_failed) = match verdict {
        MembershipVerdict::NotMember { equation, .. } => (false, None, Some(equation + 1)),
        MembershipVerdict::ProbablyMember { error_bound_log2, .. } => (true, error_bound_log2, None),
        MembershipVerdict::Member => (true, None, None),
    };
    let failed_coordinate = exact.iter().position(|ok| !ok).map(|i| i + 1).or(oracle_failed);
    Ok(WitnessCheck {
        m,
        n: n.to_string(),
        closed_form_matches,
        pass: closed_form_matches && failed_coordinate.is_none() && oracle_member && exact_verdict.is_member(),
        exact,
        oracle_member,
        error_bound_log2,
        failed_coordinate,
    })
}

/// Indices of the form p^i + p^j up to `hi`.
fn two_power_sums(p: u64, hi: u64) -> BTreeSet<u64> {
    let mut pows = vec![1u64];
    while let Some(next) = pows.last().unwrap().checked_mul(p).filter(|&x| x <= hi) {
        pows.push(next);
    }
    let mut out = BTreeSet::new();
    for a in &pows {
        for b in &pows {
            if a + b <= hi {
                out.insert(a + b);
            }
        }
    }
    out
}

/// Distinct indices in [3, hi] outside {p^i + p^j}, drawn from the seed.
pub fn spot_indices(p: u64, hi: u64, count: usize, seed: u64) -> Vec<u64> {
    let excluded = two_power_sums(p, hi);
    let pool = (hi + 1).saturating_sub(3) as usize - excluded.range(3..=hi).count();
    let count = count.min(pool);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeSet::new();
    while out.len() < count {
        let n = rng.gen_range(3..=hi);
        if !excluded.contains(&n) {
            out.insert(n);
        }
    }
    out.into_iter().collect()
}

pub fn run_quadratic_witness(
    p: u64,
    m_max: u32,
    oracle: OracleParams,
    spot_checks: usize,
) -> Result<WitnessReport, ExperimentError> {
    if p < 11 {
        return Err(ExperimentError::Precondition(format!("p = {p} is below 11")));
    }
    if m_max < 1 {
        return Err(ExperimentError::Precondition("mMax must be at least 1".into()));
    }
    let (map, start) = unipotent_six(p)?;
    let basis = map.basis();
    let witnesses = (0..=m_max)
        .into_par_iter()
        .map(|m| check_witness(&map, &start, m, &oracle))
        .collect::<Result<Vec<_>, _>>()?;
    let hi = p
        .checked_pow(m_max)
        .and_then(|a| p.checked_pow(2 * m_max).and_then(|b| a.checked_add(b)))
        .ok_or_else(|| ExperimentError::Precondition("window overflows u64".into()))?;
    let eq = elimination_equation(basis.fp())?;
    let eqs = [eq];
    let moduli = draw_moduli(basis, &eqs, &oracle)?;
    let non_members = spot_indices(p, hi, spot_checks, oracle.seed)
        .into_par_iter()
        .map(|n| {
            let (point, _) = iterate(&map, basis, &start, n, IterMode::ClosedForm, &AddConstantOptions::default())?;
            Ok(match membership_with_moduli(basis, &point, &eqs, &moduli)? {
                MembershipVerdict::NotMember { modulus, .. } => {
                    NonMemberCheck { n, certified: true, modulus: modulus.map(|m| m.render("t")) }
                }
                _ => NonMemberCheck { n, certified: false, modulus: None },
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let pass = witnesses.iter().all(|w| w.pass) && non_members.iter().all(|c| c.certified);
    Ok(WitnessReport {
        schema: REPORT_SCHEMA.into(),
        kind: "unipotent-witness".into(),
        seed: oracle.seed,
        p,
        m_max,
        oracle,
        witnesses,
        eliminant: eqs[0].render(),
        non_members,
        pass,
    })
}
