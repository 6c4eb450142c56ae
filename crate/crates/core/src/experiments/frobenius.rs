//! Return sets built from the Frobenius: the p-set of the shifted map
//! (x, y, z) ↦ (x^p, (x+1)^p y^p, x^p z^p), and the equality of return sets of
//! an isotrivial system and its Frobenius twist.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{window_mismatches, ExperimentError, REPORT_SCHEMA};
use crate::funcfield::field::is_prime_u64;
use crate::funcfield::{Fp, RatFunc};
use crate::linalg::IntMatrix;
use crate::setalg::{fit_descriptor, DescriptorJson, ExpSumSet, FitLimits, SetDescriptor};
use crate::sunit::{GeneratorBasis, LaurentEquation, OracleParams, SUnit, SUnitPoint};
use crate::torusdyn::{return_set, Factor, MapCoord, ReturnSetReport, ScanOptions, ShiftedMonomialMap, System};

/// Probabilistic members must have an error bound at most 2^this.
pub const P_SET_ERROR_THRESHOLD_LOG2: f64 = -80.0;

fn check_prime(p: u64) -> Result<Fp, ExperimentError> {
    if !is_prime_u64(p) {
        return Err(ExperimentError::Precondition(format!("{p} is not prime")));
    }
    Ok(Fp::new(p))
}

/// The shifted map over the basis (t, t + 1), started at (t, 1, 1), with V: y = z + 1.
pub fn frobenius_p_set_system(p: u64, window: u64, oracle: OracleParams) -> Result<System, ExperimentError> {
    let fp = check_prime(p)?;
    let basis = GeneratorBasis::parse(fp, &["t", "t + 1"])?;
    let pb = BigInt::from(p);
    let zero = RatFunc::zero(fp);
    let f = |source, shift: &crate::funcfield::FpRat| Factor { source, shift: shift.clone(), exp: pb.clone() };
    let coords = vec![
        MapCoord { translation: SUnit::one(2), factors: vec![f(0, &zero)] },
        MapCoord { translation: SUnit::one(2), factors: vec![f(0, &RatFunc::one(fp)), f(1, &zero)] },
        MapCoord { translation: SUnit::one(2), factors: vec![f(0, &zero), f(2, &zero)] },
    ];
    let map = ShiftedMonomialMap::new(basis, coords)?;
    let start = SUnitPoint::new(vec![SUnit::generator(2, 0, BigInt::from(1)), SUnit::one(2), SUnit::one(2)]);
    let equations = vec![LaurentEquation::parse(fp, 3, "x2 = x3 + 1")?];
    Ok(System { map, start, equations, window, oracle })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PSetReport {
    pub schema: String,
    pub kind: String,
    pub seed: u64,
    pub p: u64,
    pub window: u64,
    pub return_set: ReturnSetReport,
    /// S_{p,1,0}(0; 1) = {p^k}.
    pub expected: DescriptorJson,
    pub expected_members: Vec<u64>,
    pub mismatches: Vec<u64>,
    pub worst_error_bound_log2: Option<f64>,
    pub error_threshold_log2: f64,
    pub bounds_below_threshold: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fitted: Option<DescriptorJson>,
    pub fit_recovers: bool,
    pub pass: bool,
}

pub fn run_frobenius_p_set(p: u64, window: u64, oracle: OracleParams) -> Result<PSetReport, ExperimentError> {
    let sys = frobenius_p_set_system(p, window, oracle)?;
    let opts = ScanOptions { oracle, ..ScanOptions::default() };
    let report = return_set(&sys.map, &sys.start, &sys.equations, window, &opts)?;
    let expected = SetDescriptor::exp_sum(ExpSumSet::from_ints(p, 0, &[vec![1]])?);
    let members = report.members();
    let mismatches = window_mismatches(&members, &expected, window);
    let bounds_below_threshold = report
        .entries
        .iter()
        .filter(|e| e.member)
        .all(|e| e.error_bound_log2.is_none_or(|b| b <= P_SET_ERROR_THRESHOLD_LOG2));
    let observed: BTreeSet<u64> = members.iter().copied().collect();
    let top = fit_descriptor(&observed, p, window, &FitLimits::default()).into_iter().next();
    let fit_recovers = top.as_ref() == Some(&expected);
    let expected_members = {
        use num_traits::ToPrimitive;
        expected.window(window).members.iter().filter_map(|x| x.to_u64()).collect()
    };
    Ok(PSetReport {
        schema: REPORT_SCHEMA.into(),
        kind: "frobenius-p-set".into(),
        seed: oracle.seed,
        p,
        window,
        worst_error_bound_log2: report.worst_error_bound_log2(),
        return_set: report,
        expected: DescriptorJson::from_descriptor(&expected),
        expected_members,
        pass: mismatches.is_empty() && bounds_below_threshold,
        mismatches,
        error_threshold_log2: P_SET_ERROR_THRESHOLD_LOG2,
        bounds_below_threshold,
        fitted: top.as_ref().map(DescriptorJson::from_descriptor),
        fit_recovers,
    })
}

/// (x1, x2, x3) ↦ (2·x3, 2·x2, 2·x1) over F_5 from (t, t + 1, t + 1), with V: x1 = x2.
/// The orbit meets V exactly at odd n.
pub fn twist_preset(window: u64, oracle: OracleParams) -> Result<System, ExperimentError> {
    let fp = Fp::new(5);
    let basis = GeneratorBasis::parse(fp, &["t", "t + 1"])?;
    let a = IntMatrix::from_i64(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    let two = SUnit { unit: 2, exps: vec![BigInt::from(0); 2] };
    let c = SUnitPoint::new(vec![two.clone(), two.clone(), two]);
    let map = ShiftedMonomialMap::monomial(basis, &c, &a)?;
    let start = SUnitPoint::new(vec![
        SUnit::generator(2, 0, BigInt::from(1)),
        SUnit::generator(2, 1, BigInt::from(1)),
        SUnit::generator(2, 1, BigInt::from(1)),
    ]);
    let equations = vec![LaurentEquation::parse(fp, 3, "x1 = x2")?];
    Ok(System { map, start, equations, window, oracle })
}

/// Units, shifts and equation coefficients must all lie in F_p.
pub fn check_isotrivial(map: &ShiftedMonomialMap, equations: &[LaurentEquation]) -> Result<(), ExperimentError> {
    for (i, c) in map.coords().iter().enumerate() {
        if !c.translation.is_constant() {
            return Err(ExperimentError::NotIsotrivial(format!("translation of x{} is not constant", i + 1)));
        }
        if let Some(f) = c.factors.iter().find(|f| !f.shift.is_constant()) {
            return Err(ExperimentError::NotIsotrivial(format!(
                "shift {} in x{} is not constant",
                f.shift.render("t"),
                i + 1
            )));
        }
    }
    for (k, e) in equations.iter().enumerate() {
        if let Some((_, c)) = e.poly.terms().find(|(_, c)| !c.is_constant()) {
            return Err(ExperimentError::NotIsotrivial(format!(
                "equation {} has the coefficient {}",
                k + 1,
                c.render("t")
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TwistReport {
    pub schema: String,
    pub kind: String,
    pub seed: u64,
    pub p: u64,
    pub q: String,
    pub window: u64,
    pub equations: Vec<String>,
    pub members: Vec<u64>,
    pub twisted_members: Vec<u64>,
    /// Indices where the two membership verdicts differ.
    pub mismatches: Vec<u64>,
    pub pass: bool,
}

/// Return sets of f and Frob_q ∘ f from the same start, compared entry by entry.
pub fn run_frobenius_twist_equality(system: &System, q: &BigInt, window: u64) -> Result<TwistReport, ExperimentError> {
    check_isotrivial(&system.map, &system.equations)?;
    let twisted = system.map.frobenius_twist(q)?;
    let opts = ScanOptions { oracle: system.oracle, ..ScanOptions::default() };
    let rf = return_set(&system.map, &system.start, &system.equations, window, &opts)?;
    let rg = return_set(&twisted, &system.start, &system.equations, window, &opts)?;
    let mismatches: Vec<u64> =
        rf.entries.iter().zip(&rg.entries).filter(|(a, b)| a.member != b.member).map(|(a, _)| a.n).collect();
    Ok(TwistReport {
        schema: REPORT_SCHEMA.into(),
        kind: "frobenius-twist".into(),
        seed: system.oracle.seed,
        p: system.map.basis().p(),
        q: q.to_string(),
        window,
        equations: rf.equations.clone(),
        members: rf.members(),
        twisted_members: rg.members(),
        pass: mismatches.is_empty() && rf.entries.len() == rg.entries.len(),
        mismatches,
    })
}
