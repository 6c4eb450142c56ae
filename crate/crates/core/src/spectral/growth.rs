//! Twisted difference sequences and growth classification of exact
//! sequences, plus the exponential upper/lower height-growth checks.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::SpectralError;

/// x^(i)_n = x^(i−1)_n − a·x^(i−1)_(n−1), with x_n = 0 for n < 0.
pub fn diff_sequence(xs: &[BigRational], a: &BigRational, order: usize) -> Vec<BigRational> {
    let mut cur = xs.to_vec();
    for _ in 0..order {
        let mut next = Vec::with_capacity(cur.len());
        for n in 0..cur.len() {
            let prev = if n == 0 { BigRational::zero() } else { a * &cur[n - 1] };
            next.push(&cur[n] - prev);
        }
        cur = next;
    }
    cur
}

/// ln|x|, −∞ at zero; safe for values beyond the f64 range.
pub fn ln_abs(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_big(&x.numer().abs()) - ln_big(x.denom())
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_big(&BigInt::from(x.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthCase {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
}

impl GrowthCase {
    pub fn label(&self) -> &'static str {
        match self {
            GrowthCase::I => "i",
            GrowthCase::II => "ii",
            GrowthCase::III => "iii",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthClass {
    pub case: GrowthCase,
    /// Largest order below m whose difference sequence looks unbounded.
    pub k: Option<usize>,
    pub unbounded: bool,
    /// Whether x^(m) looks bounded on the window.
    pub hypothesis_holds: bool,
    /// Estimate of lim x_n/(n^k a^n) in case (i).
    pub limit_estimate: Option<f64>,
    /// Spread of the running estimate over the last third of the window.
    pub oscillation: Option<f64>,
    /// Case (ii): max |x_n|/n^m; case (iii): max |x_n|.
    pub bound_constant: Option<f64>,
}

/// Window heuristic: the second half's peak exceeds the first half's by a
/// factor of 1.5.
pub fn looks_unbounded(seq: &[BigRational]) -> bool {
    let n = seq.len();
    if n < 4 {
        return false;
    }
    let peak = |s: &[BigRational]| s.iter().map(ln_abs).fold(f64::NEG_INFINITY, f64::max);
    let (first, second) = (peak(&seq[..n / 2]), peak(&seq[n / 2..]));
    if second == f64::NEG_INFINITY {
        return false;
    }
    first == f64::NEG_INFINITY || second - first > 1.5f64.ln()
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn classify_growth(xs: &[BigRational], a: &BigRational, m: usize) -> Result<GrowthClass, SpectralError> {
    if m == 0 {
        return Err(SpectralError::Precondition("m must be positive".into()));
    }
    let needed = 3 * (m + 1);
    if xs.len() < needed {
        return Err(SpectralError::InsufficientData { needed, got: xs.len() });
    }
    let seqs: Vec<Vec<BigRational>> = (0..=m).map(|i| diff_sequence(xs, a, i)).collect();
    let unb: Vec<bool> = seqs.iter().map(|s| looks_unbounded(s)).collect();
    let hypothesis_holds = !unb[m];
    let k = (0..m).rev().find(|&i| unb[i]);
    let modulus = a.abs();
    let n = xs.len();
    let last_third = 2 * n / 3;
    let mut out = GrowthClass {
        case: GrowthCase::III,
        k,
        unbounded: unb[0],
        hypothesis_holds,
        limit_estimate: None,
        oscillation: None,
        bound_constant: None,
    };
    if modulus > BigRational::one() {
        out.case = GrowthCase::I;
        if let (true, Some(k)) = (unb[0], k) {
            // x^(k)_n / a^n converges to k!·lim x_n/(n^k a^n).
            let kf = BigRational::from_integer(factorial(k));
            let mut apow = num_traits::pow(a.clone(), last_third);
            let mut est = Vec::new();
            for (i, v) in seqs[k].iter().enumerate().skip(last_third) {
                if i > last_third {
                    apow *= a;
                }
                let r = v / (&apow * &kf);
                est.push(r.to_f64().unwrap_or(f64::NAN));
            }
            let lo = est.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = est.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            out.limit_estimate = est.last().copied();
            out.oscillation = Some(hi - lo);
        }
    } else if modulus == BigRational::one() {
        out.case = GrowthCase::II;
        let c = xs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, x)| (ln_abs(x) - m as f64 * (i as f64).ln()).exp())
            .fold(0.0, f64::max);
        out.bound_constant = Some(c);
    } else {
        let c = xs.iter().map(|x| ln_abs(x).exp()).fold(0.0, f64::max);
        out.bound_constant = Some(c);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundCheck {
    pub pass: bool,
    /// ln C: the smallest upper constant, or the largest lower constant.
    pub log_constant: f64,
    pub constant: f64,
}

fn ratios(heights: &[BigUint], base: f64) -> Vec<f64> {
    let lb = base.ln();
    heights.iter().enumerate().map(|(n, h)| ln_biguint(h) - n as f64 * lb).collect()
}

const LOG_TOL: f64 = 1e-9;

/// h_n ≤ C(λ+ε)^n with minimal C on the window; passes when the ratio's peak
/// over the second half does not exceed its peak over the first half.
pub fn ksm_upper_check(heights: &[BigUint], lambda: f64, eps: f64) -> BoundCheck {
    let r = ratios(heights, lambda + eps);
    let half = r.len() / 2;
    let peak = |s: &[f64]| s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let c = peak(&r);
    let pass = !r.is_empty() && peak(&r[half..]) <= peak(&r[..half.max(1)]) + LOG_TOL;
    BoundCheck { pass, log_constant: c, constant: c.exp() }
}

/// h_n ≥ C₀(λ+ε₀)^n with maximal C₀; passes when C₀ > 0 and the ratio's floor
/// over the second half is at least its floor over the first half.
pub fn ample_gap_lower_check(heights: &[BigUint], lambda: f64, eps0: f64) -> BoundCheck {
    let r = ratios(heights, lambda + eps0);
    let half = r.len() / 2;
    let floor = |s: &[f64]| s.iter().cloned().fold(f64::INFINITY, f64::min);
    let c = floor(&r);
    let pass = !r.is_empty() && c > f64::NEG_INFINITY && floor(&r[half..]) + LOG_TOL >= floor(&r[..half.max(1)]);
    BoundCheck { pass, log_constant: c, constant: c.exp() }
}

pub fn ints(xs: &[i64]) -> Vec<BigRational> {
    xs.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn n_two_to_the_n() {
        let xs: Vec<BigRational> = (0..60).map(|n| r(n) * num_traits::pow(r(2), n as usize)).collect();
        let d1 = diff_sequence(&xs, &r(2), 1);
        assert!(d1.iter().enumerate().skip(1).all(|(n, v)| *v == num_traits::pow(r(2), n)));
        assert!(diff_sequence(&xs, &r(2), 2).iter().skip(2).all(Zero::is_zero));
        let c = classify_growth(&xs, &r(2), 2).unwrap();
        assert_eq!((c.case, c.k), (GrowthCase::I, Some(1)));
        assert!((c.limit_estimate.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squares_are_case_two() {
        let xs: Vec<BigRational> = (0..60).map(|n| r(n * n)).collect();
        let c = classify_growth(&xs, &r(1), 3).unwrap();
        assert_eq!((c.case, c.k), (GrowthCase::II, Some(1)));
        assert!(c.bound_constant.unwrap() <= 1.0);
        assert!(classify_growth(&xs[..5], &r(1), 3).is_err());
    }

    #[test]
    fn bound_checks() {
        let pow2: Vec<BigUint> = (0..40).map(|n| BigUint::one() << n).collect();
        let up = ksm_upper_check(&pow2, 2.0, 0.1);
        assert!(up.pass && (up.constant - 1.0).abs() < 1e-12);
        let sq: Vec<BigUint> = (0..100u32).map(|n| BigUint::from(n * n)).collect();
        assert!(ksm_upper_check(&sq, 1.0, 0.5).pass);
        assert!(!ample_gap_lower_check(&sq, 1.0, 0.5).pass);
        let pow3: Vec<BigUint> = (0..40u32).map(|n| BigUint::from(3u32).pow(n)).collect();
        assert!(ample_gap_lower_check(&pow3, 2.0, 1.0).pass);
        assert!(ample_gap_lower_check(&pow3, 2.0, 0.5).pass);
    }
}
