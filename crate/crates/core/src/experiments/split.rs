//! Split systems fX × g on G_m^a × G_m with g a power map y ↦ c·y^d and
//! λ1(fX) < d: return sets next to the exact heights of both projections.
//! The slow side must stay under (λ1 + ε)^n, the fast side over (λ1 + ε0)^n,
//! and a non-preperiodic fast coordinate should leave only finitely many
//! returns into a V that couples the two sides.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, REPORT_SCHEMA};
use crate::funcfield::field::is_prime_u64;
use crate::funcfield::Fp;
use crate::linalg::IntMatrix;
use crate::spectral::{
    ample_gap_lower_check, classify_growth, dynamical_degrees_monomial, ksm_upper_check, AlgebraicJson, BoundCheck,
    GrowthCase, GrowthClass,
};
use crate::sunit::{
    height_of, AddConstantOptions, GeneratorBasis, HeightModel, LaurentEquation, LaurentPoly, OracleParams, SUnit,
    SUnitPoint,
};
use crate::torusdyn::{
    iterate, preperiodicity_check, return_set, IterMode, Preperiodicity, ScanOptions, ShiftedMonomialMap,
};

#[derive(Clone, Debug)]
pub struct SplitInput {
    /// Monomial map on the slow side.
    pub fx: ShiftedMonomialMap,
    /// y ↦ c·y^d.
    pub g: ShiftedMonomialMap,
    pub x0: SUnitPoint,
    pub y0: SUnitPoint,
    /// Equations in x1..xa and x{a+1} = y.
    pub equations: Vec<LaurentEquation>,
    pub window: u64,
    pub oracle: OracleParams,
    pub eps: f64,
    pub eps0: f64,
    pub height_model: HeightModel,
}

/// fX = [[1, 0], [1, 1]] from (t, t), g: y ↦ y² from t, V: x1 = y.
pub fn split_preset(p: u64, window: u64, oracle: OracleParams) -> Result<SplitInput, ExperimentError> {
    if !is_prime_u64(p) {
        return Err(ExperimentError::Precondition(format!("{p} is not prime")));
    }
    let fp = Fp::new(p);
    let basis = GeneratorBasis::parse(fp, &["t"])?;
    let t = SUnit::generator(1, 0, BigInt::from(1));
    let fx = ShiftedMonomialMap::monomial(
        basis.clone(),
        &SUnitPoint::identity(2, 1),
        &IntMatrix::from_i64(&[vec![1, 0], vec![1, 1]]),
    )?;
    let g = ShiftedMonomialMap::monomial(basis, &SUnitPoint::identity(1, 1), &IntMatrix::from_i64(&[vec![2]]))?;
    Ok(SplitInput {
        fx,
        g,
        x0: SUnitPoint::new(vec![t.clone(), t.clone()]),
        y0: SUnitPoint::new(vec![t]),
        equations: vec![LaurentEquation::parse(fp, 3, "x1 = x3")?],
        window,
        oracle,
        eps: 0.5,
        eps0: 1.0,
        height_model: HeightModel::Projective,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitCase {
    /// The fast coordinate is not preperiodic and V involves it.
    Generic,
    /// The fast coordinate is preperiodic: V meets the orbit inside a fiber.
    Fiber,
    /// V ignores the fast coordinate: V = pr_X(V) × G_m.
    Cylinder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitVerdict {
    Compatible,
    ContradictionExhibited,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoSpeedReport {
    pub schema: String,
    pub kind: String,
    pub seed: u64,
    pub p: u64,
    pub window: u64,
    pub equations: Vec<String>,
    pub lambda1: AlgebraicJson,
    pub lambda1_approx: f64,
    pub deg_g: String,
    pub eps: f64,
    pub eps0: f64,
    pub height_model: HeightModel,
    pub return_indices: Vec<u64>,
    /// No return index in the second half of the window.
    pub finite_on_window: bool,
    pub fast_orbit: Preperiodicity,
    pub case: SplitCase,
    /// Return set of the reduced system (X side alone, or the fixed fiber).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reduced_return_indices: Option<Vec<u64>>,
    pub slow_heights: Vec<String>,
    pub fast_heights: Vec<String>,
    pub slow_base: String,
    pub fast_base: String,
    pub slow_growth: GrowthClass,
    pub fast_growth: GrowthClass,
    pub ksm: BoundCheck,
    pub gap: BoundCheck,
    pub verdict: SplitVerdict,
}

impl TwoSpeedReport {
    /// Both sides classified as exponential with the same base.
    pub fn same_exponential(&self) -> bool {
        self.slow_growth.case == GrowthCase::I
            && self.fast_growth.case == GrowthCase::I
            && self.slow_base == self.fast_base
    }

    /// The verdict recomputed from the stored fields.
    pub fn derive_verdict(&self) -> SplitVerdict {
        if self.case == SplitCase::Generic
            && self.finite_on_window
            && self.ksm.pass
            && self.gap.pass
            && !self.same_exponential()
        {
            SplitVerdict::ContradictionExhibited
        } else {
            SplitVerdict::Compatible
        }
    }

    pub fn reduced_matches(&self) -> Option<bool> {
        self.reduced_return_indices.as_ref().map(|r| *r == self.return_indices)
    }
}

fn uses_var(eq: &LaurentEquation, i: usize) -> bool {
    eq.poly.terms().any(|(e, _)| e[i] != 0)
}

/// The equations in the first `a` variables; None if some equation uses a later one.
fn restrict(equations: &[LaurentEquation], a: usize) -> Result<Option<Vec<LaurentEquation>>, ExperimentError> {
    let mut out = Vec::with_capacity(equations.len());
    for eq in equations {
        if (a..eq.nvars()).any(|i| uses_var(eq, i)) {
            return Ok(None);
        }
        let fp = eq.poly.fp();
        let poly = eq
            .poly
            .terms()
            .fold(LaurentPoly::zero(fp, a), |acc, (e, c)| acc.add(&LaurentPoly::monomial(fp, c.clone(), e[..a].to_vec())));
        out.push(LaurentEquation::new(poly)?);
    }
    Ok(Some(out))
}

pub fn classify_split_case(equations: &[LaurentEquation], a: usize, fast: &Preperiodicity) -> SplitCase {
    if equations.iter().all(|eq| (a..eq.nvars()).all(|i| !uses_var(eq, i))) {
        SplitCase::Cylinder
    } else if matches!(fast, Preperiodicity::Preperiodic { .. }) {
        SplitCase::Fiber
    } else {
        SplitCase::Generic
    }
}

fn to_rationals(hs: &[BigUint]) -> Vec<BigRational> {
    hs.iter().map(|h| BigRational::from_integer(BigInt::from(h.clone()))).collect()
}

pub fn run_split_experiment(input: &SplitInput) -> Result<TwoSpeedReport, ExperimentError> {
    let (fx, g) = (&input.fx, &input.g);
    if !fx.is_monomial_affine() || !g.is_monomial_affine() {
        return Err(ExperimentError::Precondition("both maps must be monomial".into()));
    }
    if g.dim() != 1 {
        return Err(ExperimentError::Precondition(format!("g acts on G_m^{}, not G_m", g.dim())));
    }
    let a = fx.dim();
    if input.x0.dim() != a || input.y0.dim() != 1 {
        return Err(ExperimentError::Precondition("start point dimensions do not match the maps".into()));
    }
    if let Some(eq) = input.equations.iter().find(|e| e.nvars() != a + 1) {
        return Err(ExperimentError::Precondition(format!("equation {} is not in {} variables", eq.render(), a + 1)));
    }
    let d = g.matrix().get(0, 0).abs();
    let degrees = dynamical_degrees_monomial(&fx.matrix())?;
    let lambda1 = degrees[1].clone();
    if lambda1.cmp_rational(&BigRational::from_integer(d.clone())) != Ordering::Less {
        return Err(ExperimentError::Hypothesis(format!("λ1(fX) = {:.6} is not below deg g = {d}", lambda1.to_f64())));
    }

    let product = fx.split_product(g)?;
    let basis = product.basis().clone();
    let (_, idx) = fx.basis().merged(g.basis())?;
    let start = input.x0.padded(fx.basis().len()).concat(&input.y0, &idx, basis.len());
    let opts = ScanOptions { oracle: input.oracle, ..ScanOptions::default() };
    let report = return_set(&product, &start, &input.equations, input.window, &opts)?;
    let return_indices = report.members();
    let finite_on_window = return_indices.iter().all(|&n| 2 * n < input.window);

    let add = AddConstantOptions::default();
    let heights: Vec<(BigUint, BigUint)> = (0..=input.window)
        .into_par_iter()
        .map(|n| {
            let (pt, _) = iterate(&product, &basis, &start, n, IterMode::ClosedForm, &add)?;
            let slow = SUnitPoint::new(pt.coords[..a].to_vec());
            let fast = SUnitPoint::new(pt.coords[a..].to_vec());
            Ok((height_of(&basis, &slow, input.height_model).0, height_of(&basis, &fast, input.height_model).0))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let (slow, fast): (Vec<BigUint>, Vec<BigUint>) = heights.into_iter().unzip();

    let lambda1_approx = lambda1.to_f64();
    let ksm = ksm_upper_check(&slow, lambda1_approx, input.eps);
    let gap = ample_gap_lower_check(&fast, lambda1_approx, input.eps0);
    let slow_base = lambda1
        .as_rational()
        .or_else(|| BigRational::from_float(lambda1_approx))
        .ok_or_else(|| ExperimentError::Precondition("λ1 is not finite".into()))?;
    let fast_base = BigRational::from_integer(d.clone());
    let slow_growth = classify_growth(&to_rationals(&slow), &slow_base, 2)?;
    let fast_growth = classify_growth(&to_rationals(&fast), &fast_base, 2)?;

    let fast_orbit = preperiodicity_check(g, &input.y0, input.window, &add)?;
    let case = classify_split_case(&input.equations, a, &fast_orbit);
    let reduced_return_indices = match (&case, &fast_orbit) {
        (SplitCase::Cylinder, _) => {
            let eqs = restrict(&input.equations, a)?.expect("cylinder equations");
            Some(return_set(fx, &input.x0, &eqs, input.window, &opts)?.members())
        }
        (SplitCase::Fiber, Preperiodicity::Preperiodic { tail: 0, period: 1 }) => {
            // The fast coordinate is fixed: freeze it with the identity.
            let frozen = fx.split_product(&ShiftedMonomialMap::identity(g.basis().clone(), 1))?;
            Some(return_set(&frozen, &start, &input.equations, input.window, &opts)?.members())
        }
        _ => None,
    };

    let mut out = TwoSpeedReport {
        schema: REPORT_SCHEMA.into(),
        kind: "two-speed".into(),
        seed: input.oracle.seed,
        p: basis.p(),
        window: input.window,
        equations: report.equations.clone(),
        lambda1: AlgebraicJson::from_number(&lambda1),
        lambda1_approx,
        deg_g: d.to_string(),
        eps: input.eps,
        eps0: input.eps0,
        height_model: input.height_model,
        return_indices,
        finite_on_window,
        fast_orbit,
        case,
        reduced_return_indices,
        slow_heights: slow.iter().map(BigUint::to_string).collect(),
        fast_heights: fast.iter().map(BigUint::to_string).collect(),
        slow_base: slow_base.to_string(),
        fast_base: fast_base.to_string(),
        slow_growth,
        fast_growth,
        ksm,
        gap,
        verdict: SplitVerdict::Compatible,
    };
    out.verdict = out.derive_verdict();
    Ok(out)
}
