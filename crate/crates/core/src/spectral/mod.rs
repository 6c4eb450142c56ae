//! Exact spectral analysis of integer matrices: characteristic polynomials,
//! dynamical degrees and Lyapunov exponents of monomial maps, root-set and
//! hyperbolicity decisions, Galois transport of eigenvectors, and the growth
//! checks for exact sequences.

pub mod algebraic;
pub mod factor;
pub mod growth;
pub mod numfield;
pub mod resultant;
pub mod roots;
pub mod zpoly;

#[cfg(test)]
mod tests;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use algebraic::{conjugates_of, locate, AlgebraicJson, AlgebraicNumber};
pub use factor::{factor_z, is_irreducible_z};
pub use growth::{ample_gap_lower_check, classify_growth, diff_sequence, ksm_upper_check, BoundCheck, GrowthCase, GrowthClass};
pub use numfield::{conjugate_eigvec, generalized_eigvec, ConjugateTransport, NumberFieldVector, NumberFieldVectorJson};
pub use zpoly::{char_poly, companion, eval_at_matrix, exterior_power, ZPoly};

use crate::linalg::IntMatrix;
use roots::{complex_roots, count_closed, isolate_real, Interval};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is singular")]
    Singular,
    #[error("{0} is not a positive real number")]
    NotPositiveReal(String),
    #[error("isolation region does not isolate a single root: {0}")]
    NotIsolating(String),
    #[error("polynomial {0} is not irreducible")]
    NotIrreducible(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("insufficient data: need {needed} terms, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

/// Square integer matrix from JSON rows; entries may be numbers or decimal strings.
pub fn parse_matrix_json(s: &str) -> Result<IntMatrix, SpectralError> {
    let v: serde_json::Value = serde_json::from_str(s).map_err(|e| SpectralError::Parse(e.to_string()))?;
    let rows = v.as_array().ok_or_else(|| SpectralError::Parse("expected an array of rows".into()))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| SpectralError::Parse("expected a row array".into()))?;
        let mut r = Vec::with_capacity(row.len());
        for e in row {
            let text = match e {
                serde_json::Value::String(s) => s.trim().to_string(),
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(SpectralError::Parse(format!("bad matrix entry {other}"))),
            };
            r.push(text.parse::<BigInt>().map_err(|_| SpectralError::Parse(format!("bad integer \"{text}\"")))?);
        }
        out.push(r);
    }
    if out.is_empty() || out.iter().any(|r| r.len() != out.len()) {
        return Err(SpectralError::NotSquare);
    }
    Ok(IntMatrix::from_rows(out))
}

fn require_square(a: &IntMatrix) -> Result<(), SpectralError> {
    if a.rows() == 0 || !a.is_square() {
        return Err(SpectralError::NotSquare);
    }
    Ok(())
}

/// Real root of f (any integer polynomial) isolated by `iv`, with its minimal polynomial.
fn real_root_in(f: &ZPoly, iv: &Interval) -> AlgebraicNumber {
    let s = f.squarefree_part();
    if iv.0 == iv.1 {
        return AlgebraicNumber::rational(iv.0.clone());
    }
    let m = factor::find_factor(&s, &mut |g| count_closed(g, &iv.0, &iv.1) == 1).expect("a factor has the root");
    AlgebraicNumber::real_root(m, iv.clone())
}

/// Real roots of f in increasing order.
pub fn real_roots(f: &ZPoly) -> Vec<AlgebraicNumber> {
    let s = f.squarefree_part();
    isolate_real(&s).iter().map(|iv| real_root_in(&s, iv)).collect()
}

/// All roots of char_poly(A) with multiplicities, grouped by irreducible factor.
pub fn eigenvalues(a: &IntMatrix) -> Result<Vec<(AlgebraicNumber, u32)>, SpectralError> {
    require_square(a)?;
    let mut out = Vec::new();
    for (g, e) in factor_z(&char_poly(a)) {
        for r in conjugates_of(&g) {
            out.push((r, e));
        }
    }
    Ok(out)
}

/// Distinguished root of an irreducible factor: its largest real root if it
/// has one, else the root with largest real part and positive imaginary part.
pub fn min_poly_of_root(factor: &ZPoly) -> Result<AlgebraicNumber, SpectralError> {
    let g = factor.primitive();
    if g.deg() == 0 || !is_irreducible_z(&g) {
        return Err(SpectralError::NotIrreducible(g.to_string()));
    }
    let roots = conjugates_of(&g);
    if let Some(r) = roots.iter().filter(|r| r.is_real()).next_back() {
        return Ok(r.clone());
    }
    Ok(roots
        .into_iter()
        .filter(|r| r.im_interval().0.is_positive())
        .max_by(|a, b| a.to_f64().total_cmp(&b.to_f64()))
        .expect("non-real roots come in pairs"))
}

/// Largest positive real root of the squarefree part of w, if any.
fn largest_positive_root(w: &ZPoly) -> Option<AlgebraicNumber> {
    let s = w.squarefree_part();
    let iv = isolate_real(&s).pop()?;
    (iv.1.is_positive()).then(|| real_root_in(&s, &iv))
}

/// Spectral radius of A, certified.
pub fn spectral_radius(a: &IntMatrix) -> Result<AlgebraicNumber, SpectralError> {
    require_square(a)?;
    let mut best: Option<AlgebraicNumber> = None;
    let mut offer = |c: AlgebraicNumber| {
        if best.as_ref().is_none_or(|b| c.cmp_real(b) == Ordering::Greater) {
            best = Some(c);
        }
    };
    for (g, _) in factor_z(&char_poly(a)) {
        let reals = real_roots(&g);
        if let Some(r) = reals.first() {
            offer(r.abs());
        }
        if let Some(r) = reals.last() {
            offer(r.abs());
        }
        if reals.len() < g.deg() {
            // Products of root pairs; the largest positive one is max |ζ|² when
            // the maximum is attained off the real axis.
            let w = char_poly(&exterior_power(&companion(&g), 2));
            if let Some(beta) = largest_positive_root(&w) {
                offer(beta.sqrt());
            }
        }
    }
    Ok(best.expect("char poly has a root"))
}

/// [λ_0, …, λ_n] with λ_i = ρ(∧^i A).
pub fn dynamical_degrees_monomial(a: &IntMatrix) -> Result<Vec<AlgebraicNumber>, SpectralError> {
    require_square(a)?;
    if a.det().is_zero() {
        return Err(SpectralError::Singular);
    }
    let n = a.rows();
    let mut out = vec![AlgebraicNumber::integer(1)];
    for i in 1..n {
        out.push(spectral_radius(&exterior_power(a, i))?);
    }
    out.push(AlgebraicNumber::rational(BigRational::from_integer(a.det().abs())));
    Ok(out)
}

/// μ_i = λ_i / λ_{i−1}.
pub fn lyapunov_exponents(lambdas: &[AlgebraicNumber]) -> Result<Vec<AlgebraicNumber>, SpectralError> {
    if lambdas.is_empty() || !lambdas[0].is_one() {
        return Err(SpectralError::Precondition("λ_0 must be 1".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| !l.is_positive_real()) {
        return Err(SpectralError::NotPositiveReal(l.to_string()));
    }
    Ok(lambdas.windows(2).map(|w| w[1].div(&w[0])).collect())
}

/// Moduli of the eigenvalues of A with multiplicity, in decreasing order.
/// For monomial data these are the Lyapunov exponents.
pub fn lyapunov_exponents_monomial(a: &IntMatrix) -> Result<Vec<AlgebraicNumber>, SpectralError> {
    require_square(a)?;
    if a.det().is_zero() {
        return Err(SpectralError::Singular);
    }
    let mut out: Vec<AlgebraicNumber> = Vec::with_capacity(a.rows());
    for (g, e) in factor_z(&char_poly(a)) {
        let mut moduli = Vec::new();
        let reals = real_roots(&g);
        for r in &reals {
            moduli.push(r.abs());
        }
        if reals.len() < g.deg() {
            let w = char_poly(&exterior_power(&companion(&g), 2));
            for d in complex_roots(&g, 16) {
                if d.meets_real_axis() || d.center.im.is_negative() {
                    continue;
                }
                let (cre, cim) = (d.center.re.clone(), d.center.im.clone());
                let sq = locate(&w, |bits| {
                    let disks = complex_roots(&g, bits + 4);
                    let near = disks
                        .iter()
                        .filter(|x| !x.center.im.is_negative())
                        .min_by_key(|x| {
                            let dr = &x.center.re - &cre;
                            let di = &x.center.im - &cim;
                            &dr * &dr + &di * &di
                        })
                        .expect("root disks");
                    near.modulus_sq(bits + 4)
                });
                let m = sq.sqrt();
                moduli.push(m.clone());
                moduli.push(m);
            }
        }
        for m in moduli {
            for _ in 0..e {
                out.push(m.clone());
            }
        }
    }
    out.sort_by(|x, y| y.cmp_real(x));
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ExponentChain {
    pub degrees: Vec<AlgebraicNumber>,
    pub exponents: Vec<AlgebraicNumber>,
    /// λ_i = μ_i·λ_{i−1} for every i, with λ from exterior powers and μ from eigenvalue moduli.
    pub products_match: bool,
    pub top_is_det: bool,
    pub ordered: bool,
    pub positive: bool,
}

impl ExponentChain {
    pub fn holds(&self) -> bool {
        self.products_match && self.top_is_det && self.ordered && self.positive
    }
}

/// Cross-checks the two exponent routes exactly.
pub fn exponent_chain_check(a: &IntMatrix) -> Result<ExponentChain, SpectralError> {
    let degrees = dynamical_degrees_monomial(a)?;
    let exponents = lyapunov_exponents_monomial(a)?;
    let products_match = exponents.len() + 1 == degrees.len()
        && (1..degrees.len()).all(|i| degrees[i].is_product_of(&exponents[i - 1], &degrees[i - 1]));
    // With the chain exact, ∏μ_i = λ_n, so the product never has to be formed.
    let det = BigRational::from_integer(a.det().abs());
    let top_is_det = degrees.last().expect("nonempty").cmp_rational(&det) == Ordering::Equal;
    let ordered = exponents.windows(2).all(|w| w[0].cmp_real(&w[1]) != Ordering::Less);
    let positive = exponents.iter().all(AlgebraicNumber::is_positive_real);
    Ok(ExponentChain { degrees, exponents, products_match, top_is_det, ordered, positive })
}

/// μ_i(A^k) = μ_i(A)^k for every i.
pub fn iterate_exponents_check(a: &IntMatrix, k: u32) -> Result<bool, SpectralError> {
    if k == 0 {
        return Err(SpectralError::Precondition("k must be at least 1".into()));
    }
    let base = lyapunov_exponents_monomial(a)?;
    let iterated = lyapunov_exponents_monomial(&a.pow(k as u64))?;
    Ok(base.len() == iterated.len() && base.iter().zip(&iterated).all(|(m, mk)| mk.is_power_of(m, k)))
}

pub fn cayley_hamilton_holds(a: &IntMatrix) -> bool {
    eval_at_matrix(&char_poly(a), a) == IntMatrix::zeros(a.rows(), a.rows())
}

/// μ lies in {a^{1/n} : a, n positive integers}.
pub fn in_root_set(mu: &AlgebraicNumber) -> Result<bool, SpectralError> {
    if !mu.is_positive_real() {
        return Err(SpectralError::NotPositiveReal(mu.to_string()));
    }
    Ok(mu.min_poly().is_positive_binomial())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModulusCriterion {
    /// Every conjugate's modulus enclosure meets μ's enclosure at the final precision.
    pub all_equal: bool,
    /// Some conjugate modulus was certified different from μ.
    pub certified_separation: bool,
    pub bits: u32,
}

const MODULUS_MAX_BITS: u32 = 256;

/// Compares |μ'| with μ for every conjugate μ', raising precision until one
/// separates or the enclosures coincide at the precision cap.
pub fn modulus_criterion(mu: &AlgebraicNumber) -> Result<ModulusCriterion, SpectralError> {
    if !mu.is_positive_real() {
        return Err(SpectralError::NotPositiveReal(mu.to_string()));
    }
    let mut bits = 32;
    loop {
        let (lo, hi) = mu.enclosure(bits);
        let separated = complex_roots(mu.min_poly(), bits).iter().any(|d| {
            let (mlo, mhi) = d.modulus(bits);
            mhi < lo || hi < mlo
        });
        if separated {
            return Ok(ModulusCriterion { all_equal: false, certified_separation: true, bits });
        }
        if bits >= MODULUS_MAX_BITS {
            return Ok(ModulusCriterion { all_equal: true, certified_separation: false, bits });
        }
        bits *= 2;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HyperbolicityReport {
    pub cohomologically_hyperbolic: bool,
    pub root_free: bool,
    pub gap_condition: bool,
}

/// Verdicts for an exponent list and the map's degree.
pub fn hyperbolicity_report(mus: &[AlgebraicNumber], deg_f: &BigInt) -> Result<HyperbolicityReport, SpectralError> {
    let cohomologically_hyperbolic = !mus.iter().any(AlgebraicNumber::is_one);
    let mut root_free = true;
    for m in mus {
        if in_root_set(m)? {
            root_free = false;
        }
    }
    let one = BigRational::from_integer(1.into());
    let deg = BigRational::from_integer(deg_f.clone());
    let gap_condition =
        mus.iter().all(|m| m.cmp_rational(&one) == Ordering::Less || m.cmp_rational(&deg) == Ordering::Greater);
    Ok(HyperbolicityReport { cohomologically_hyperbolic, root_free, gap_condition })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralReport {
    pub matrix: Vec<Vec<String>>,
    pub char_poly: String,
    pub dynamical_degrees: Vec<AlgebraicJson>,
    pub dynamical_degrees_approx: Vec<f64>,
    pub lyapunov_exponents: Vec<AlgebraicJson>,
    pub lyapunov_exponents_approx: Vec<f64>,
    pub in_root_set: Vec<bool>,
    pub hyperbolicity: HyperbolicityReport,
    pub exponent_chain_verified: bool,
}

/// Full spectral summary of a monomial map; deg f is λ_n = |det A|.
pub fn spectral_report(a: &IntMatrix) -> Result<SpectralReport, SpectralError> {
    let chain = exponent_chain_check(a)?;
    let deg_f = a.det().abs();
    let hyperbolicity = hyperbolicity_report(&chain.exponents, &deg_f)?;
    let in_root = chain.exponents.iter().map(in_root_set).collect::<Result<Vec<_>, _>>()?;
    Ok(SpectralReport {
        matrix: a.to_rows().iter().map(|r| r.iter().map(BigInt::to_string).collect()).collect(),
        char_poly: char_poly(a).render("x"),
        dynamical_degrees: chain.degrees.iter().map(AlgebraicJson::from_number).collect(),
        dynamical_degrees_approx: chain.degrees.iter().map(AlgebraicNumber::to_f64).collect(),
        lyapunov_exponents: chain.exponents.iter().map(AlgebraicJson::from_number).collect(),
        lyapunov_exponents_approx: chain.exponents.iter().map(AlgebraicNumber::to_f64).collect(),
        in_root_set: in_root,
        hyperbolicity,
        exponent_chain_verified: chain.holds(),
    })
}
