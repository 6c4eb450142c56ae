//! Refutes a candidate algebraic relation between
//! a = (z+1)^m/(y+1), b = z^m/y, c = (z−1)^m/(y−1) for m = (1 + p^c)²:
//!
//!   (9b − ¼·S·T)² = 4·(¼·S² − (3/2)·T)·(¼·T² − (3/2)·S·b),
//!   S = a − 2b + c, T = a − c − 2,
//!
//! by comparing the z^{4m} coefficients of both sides. Everything is computed
//! over Z after multiplying through by 16·D⁴, D = y(y² − 1).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, REPORT_SCHEMA};
use crate::funcfield::field::is_prime_u64;
use crate::spectral::ZPoly;

/// Largest z-degree 4m the refutation will expand.
pub const IDENTITY_DEGREE_CAP: u64 = 8192;

/// Σ_k coeffs[k](y)·z^k.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BiPoly(Vec<ZPoly>);

impl BiPoly {
    fn get(&self, k: usize) -> ZPoly {
        self.0.get(k).cloned().unwrap_or_else(ZPoly::zero)
    }

    fn constant(c: ZPoly) -> Self {
        BiPoly(vec![c])
    }

    /// (z + s)^m·g(y).
    fn binomial(m: usize, s: i64, g: &ZPoly) -> Self {
        let mut coeffs = Vec::with_capacity(m + 1);
        let mut binom = BigInt::one();
        let sb = BigInt::from(s);
        for k in 0..=m {
            // C(m, k)·s^{m−k}
            let c = &binom * num_traits::pow(sb.clone(), m - k);
            coeffs.push(g.scale(&c));
            binom = binom * BigInt::from(m - k) / BigInt::from(k + 1);
        }
        BiPoly(coeffs)
    }

    fn monomial(m: usize, g: &ZPoly) -> Self {
        let mut coeffs = vec![ZPoly::zero(); m + 1];
        coeffs[m] = g.clone();
        BiPoly(coeffs)
    }

    fn zip(&self, o: &Self, f: impl Fn(&ZPoly, &ZPoly) -> ZPoly) -> Self {
        let n = self.0.len().max(o.0.len());
        BiPoly((0..n).map(|k| f(&self.get(k), &o.get(k))).collect())
    }

    fn add(&self, o: &Self) -> Self {
        self.zip(o, ZPoly::add)
    }

    fn sub(&self, o: &Self) -> Self {
        self.zip(o, ZPoly::sub)
    }

    fn scale(&self, c: i64) -> Self {
        let c = BigInt::from(c);
        BiPoly(self.0.iter().map(|g| g.scale(&c)).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return BiPoly(vec![]);
        }
        let n = self.0.len() + o.0.len() - 1;
        let coeffs = (0..n)
            .into_par_iter()
            .map(|k| {
                let lo = k.saturating_sub(o.0.len() - 1);
                let hi = k.min(self.0.len() - 1);
                (lo..=hi).fold(ZPoly::zero(), |acc, i| acc.add(&self.0[i].mul(&o.0[k - i])))
            })
            .collect();
        BiPoly(coeffs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityReport {
    pub schema: String,
    pub kind: String,
    pub seed: u64,
    pub p: u64,
    pub c: u32,
    pub m: u64,
    /// z-degree of both sides, 4m.
    pub degree: u64,
    /// z^{4m} coefficients of 16·D⁴·LHS and 16·D⁴·RHS, polynomials in y.
    pub lhs_scaled: String,
    pub rhs_scaled: String,
    pub lhs_expected: String,
    pub rhs_expected: String,
    pub lhs_matches: bool,
    pub rhs_matches: bool,
    pub unequal: bool,
    /// The two coefficients still differ after reduction mod p.
    pub unequal_mod_p: bool,
    pub pass: bool,
}

fn y(c: &[i64]) -> ZPoly {
    ZPoly::from_i64s(c)
}

fn reduce_mod(f: &ZPoly, p: u64) -> ZPoly {
    let pb = BigInt::from(p);
    ZPoly::new(f.coeffs().iter().map(|c| c.mod_floor(&pb)).collect())
}

pub fn run_coefficient_refutation(p: u64, c: u32) -> Result<IdentityReport, ExperimentError> {
    if !is_prime_u64(p) || p < 11 {
        return Err(ExperimentError::Precondition(format!("p = {p} must be a prime of at least 11")));
    }
    if c < 1 {
        return Err(ExperimentError::Precondition("c must be at least 1".into()));
    }
    let m = p
        .checked_pow(c)
        .and_then(|q| q.checked_add(1))
        .and_then(|s| s.checked_mul(s))
        .ok_or(ExperimentError::DegreeCap { needed: u64::MAX, cap: IDENTITY_DEGREE_CAP })?;
    let degree = m.saturating_mul(4);
    if degree > IDENTITY_DEGREE_CAP {
        return Err(ExperimentError::DegreeCap { needed: degree, cap: IDENTITY_DEGREE_CAP });
    }
    let mu = m as usize;
    let d = y(&[0, -1, 0, 1]);
    // D·a, D·b, D·c
    let da = BiPoly::binomial(mu, 1, &y(&[0, -1, 1]));
    let db = BiPoly::monomial(mu, &y(&[-1, 0, 1]));
    let dc = BiPoly::binomial(mu, -1, &y(&[0, 1, 1]));
    let dd = BiPoly::constant(d.clone());
    let s = da.sub(&db.scale(2)).add(&dc);
    let t = da.sub(&dc).sub(&dd.scale(2));
    let inner = dd.mul(&db).scale(36).sub(&s.mul(&t));
    let lhs = inner.mul(&inner);
    let left = s.mul(&s).sub(&t.mul(&dd).scale(6));
    let right = t.mul(&t).sub(&s.mul(&db).scale(6));
    let rhs = left.mul(&right).scale(4);
    let top = 4 * mu;
    let (l, r) = (lhs.get(top), rhs.get(top));
    let degree_ok = lhs.0.len() == top + 1 && rhs.0.len() == top + 1;

    // l/(16D⁴) = 1/(y²(y²−1)⁴) and r/(16D⁴) = 4(3−2y²)/(y⁴(y²−1)⁴), cross-multiplied.
    let d4 = d.pow(4).scale(&BigInt::from(16));
    let ysq_minus_1_4 = y(&[-1, 0, 1]).pow(4);
    let lhs_matches = l.mul(&y(&[0, 0, 1]).mul(&ysq_minus_1_4)) == d4;
    let rhs_matches = r.mul(&y(&[0, 0, 0, 0, 1]).mul(&ysq_minus_1_4)) == d4.mul(&y(&[12, 0, -8]));
    let unequal = l != r;
    let unequal_mod_p = reduce_mod(&l, p) != reduce_mod(&r, p);
    Ok(IdentityReport {
        schema: REPORT_SCHEMA.into(),
        kind: "coefficient-refutation".into(),
        seed: 0,
        p,
        c,
        m,
        degree,
        lhs_scaled: l.render("y"),
        rhs_scaled: r.render("y"),
        lhs_expected: "1/(y^2*(y^2 - 1)^4)".into(),
        rhs_expected: "4*(3 - 2*y^2)/(y^4*(y^2 - 1)^4)".into(),
        pass: degree_ok && lhs_matches && rhs_matches && unequal,
        lhs_matches,
        rhs_matches,
        unequal,
        unequal_mod_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_rows() {
        let b = BiPoly::binomial(3, -1, &ZPoly::one());
        let c: Vec<ZPoly> = [-1, 3, -3, 1].iter().map(|&k| y(&[k])).collect();
        assert_eq!(b, BiPoly(c));
        let sq = BiPoly::binomial(2, 1, &ZPoly::one());
        assert_eq!(sq.mul(&sq), BiPoly::binomial(4, 1, &ZPoly::one()));
        assert!(BiPoly(vec![]).mul(&sq).0.is_empty());
        assert!(BiPoly::monomial(2, &y(&[5])).get(7).is_zero());
    }
}
