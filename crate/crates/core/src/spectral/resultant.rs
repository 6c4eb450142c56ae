//! Resultants over Z and the composed polynomials built from them.
//!
//! Bivariate resultants are evaluated at integer points and interpolated.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::zpoly::ZPoly;
use crate::linalg::IntMatrix;

/// Sylvester resultant of a and b taken with formal degrees m ≥ deg a, n ≥ deg b.
pub fn resultant_formal(a: &ZPoly, m: usize, b: &ZPoly, n: usize) -> BigInt {
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut s = IntMatrix::zeros(size, size);
    for r in 0..n {
        for i in 0..=m {
            s.set(r, r + i, a.coeff(m - i));
        }
    }
    for r in 0..m {
        for i in 0..=n {
            s.set(n + r, r + i, b.coeff(n - i));
        }
    }
    s.det()
}

pub fn resultant(a: &ZPoly, b: &ZPoly) -> BigInt {
    resultant_formal(a, a.deg(), b, b.deg())
}

/// Polynomial through (i, values[i]) for i = 0..; integral by construction of the callers.
fn interpolate(values: &[BigInt]) -> ZPoly {
    let n = values.len();
    // Newton divided differences at nodes 0..n-1.
    let mut dd: Vec<BigRational> = values.iter().map(|v| BigRational::from_integer(v.clone())).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / BigRational::from_integer(BigInt::from(j));
        }
    }
    // Expand Σ dd[k] ∏_{i<k} (x − i) by Horner from the top.
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); n.max(1)];
    for k in (0..n).rev() {
        // acc = acc·(x − k) + dd[k]
        let mut next = vec![BigRational::zero(); n.max(1)];
        for (i, c) in acc.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i + 1 < next.len() {
                next[i + 1] += c;
            }
            next[i] -= c * BigRational::from_integer(BigInt::from(k));
        }
        next[0] += &dd[k];
        acc = next;
    }
    let coeffs = acc
        .into_iter()
        .map(|c| {
            assert!(c.is_integer(), "interpolated resultant is not integral");
            c.to_integer()
        })
        .collect();
    ZPoly::new(coeffs)
}

fn resultant_in_x(degree: usize, at: impl Fn(&BigInt) -> BigInt + Sync) -> ZPoly {
    use rayon::prelude::*;
    let values: Vec<BigInt> = (0..=degree).into_par_iter().map(|x| at(&BigInt::from(x))).collect();
    interpolate(&values)
}

/// Polynomial whose roots are the products α_i·β_j.
pub fn product_poly(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let (da, db) = (a.deg(), b.deg());
    resultant_in_x(da * db, |x| {
        // y^db b(x/y) = Σ b_k x^k y^(db−k)
        let mut c = vec![BigInt::zero(); db + 1];
        let mut xp = BigInt::one();
        for k in 0..=db {
            c[db - k] = b.coeff(k) * &xp;
            xp *= x;
        }
        resultant_formal(a, da, &ZPoly::new(c), db)
    })
    .primitive()
}

/// Polynomial whose roots are the quotients α_i/β_j (b(0) ≠ 0).
pub fn quotient_poly(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let (da, db) = (a.deg(), b.deg());
    resultant_in_x(da * db, |x| {
        // a(x y) = Σ a_k x^k y^k
        let mut c = vec![BigInt::zero(); da + 1];
        let mut xp = BigInt::one();
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = a.coeff(k) * &xp;
            xp *= x;
        }
        resultant_formal(b, db, &ZPoly::new(c), da)
    })
    .primitive()
}

/// Polynomial whose roots are the powers α_i^k.
pub fn power_poly(a: &ZPoly, k: usize) -> ZPoly {
    let da = a.deg();
    resultant_in_x(da, |x| {
        let mut c = vec![BigInt::zero(); k + 1];
        c[0] = x.clone();
        c[k] = -BigInt::one();
        resultant_formal(a, da, &ZPoly::new(c), k)
    })
    .primitive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(c: &[i64]) -> ZPoly {
        ZPoly::from_i64s(c)
    }

    #[test]
    fn composed_polynomials() {
        assert_eq!(resultant(&z(&[-2, 1]), &z(&[-3, 1])), BigInt::from(-1));
        // √2·√3 roots ±√6 twice
        let p = product_poly(&z(&[-2, 0, 1]), &z(&[-3, 0, 1]));
        assert_eq!(p, z(&[-6, 0, 1]).pow(2));
        let q = quotient_poly(&z(&[-6, 1]), &z(&[-2, 1]));
        assert_eq!(q, z(&[-3, 1]));
        let r = power_poly(&z(&[-2, 0, 1]), 2);
        assert_eq!(r, z(&[-2, 1]).pow(2));
        let c = power_poly(&z(&[1, 1, 1]), 3);
        assert_eq!(c, z(&[-1, 1]).pow(2));
    }
}
