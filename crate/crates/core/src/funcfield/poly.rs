//! Dense univariate polynomials over a [`Field`], lowest degree first.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::One;

use super::field::Field;
use super::FuncFieldError;

#[derive(Clone)]
pub struct Poly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<F: Field> Eq for Poly<F> {}

impl<F: Field> Hash for Poly<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.render("t"))
    }
}

impl<F: Field> Poly<F> {
    pub fn new(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn from_i64s(field: F, coeffs: &[i64]) -> Self {
        let c = coeffs.iter().map(|&v| field.from_i64(v)).collect();
        Poly::new(field, c)
    }

    pub fn zero(field: F) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        Poly::new(field, vec![one])
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Poly::new(field, vec![c])
    }

    /// The variable itself.
    pub fn x(field: F) -> Self {
        Self::monomial(field.clone(), field.one(), 1)
    }

    pub fn monomial(field: F, c: F::Elem, deg: usize) -> Self {
        let mut coeffs = vec![field.zero(); deg + 1];
        coeffs[deg] = c;
        Poly::new(field, coeffs)
    }

    /// x + c
    pub fn linear(field: F, c: F::Elem) -> Self {
        let one = field.one();
        Poly::new(field, vec![c, one])
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F::Elem> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> F::Elem {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| self.field.is_one(c))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        Poly::new(f.clone(), self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn monic(&self) -> Self {
        match self.field.inv(&self.lc()) {
            Some(i) => self.scale(&i),
            None => self.clone(),
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => f.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(f.clone(), out)
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        let f = &self.field;
        Poly { field: f.clone(), coeffs: self.coeffs.iter().map(|a| f.neg(a)).collect() }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = f.mul(a, b);
                out[i + j] = f.add(&out[i + j], &prod);
            }
        }
        Poly::new(f.clone(), out)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Poly::one(self.field.clone());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    pub fn checked_div_rem(&self, b: &Self) -> Result<(Self, Self), FuncFieldError> {
        if b.is_zero() {
            return Err(FuncFieldError::DivisionByZero);
        }
        let f = &self.field;
        if self.coeffs.len() < b.coeffs.len() {
            return Ok((Poly::zero(f.clone()), self.clone()));
        }
        let inv_lc = f.inv(&b.lc()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let db = b.coeffs.len() - 1;
        let mut quot = vec![f.zero(); rem.len() - db];
        for k in (0..quot.len()).rev() {
            let c = f.mul(&rem[k + db], &inv_lc);
            if f.is_zero(&c) {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                let t = f.mul(&c, bj);
                rem[k + j] = f.sub(&rem[k + j], &t);
            }
            quot[k] = c;
        }
        rem.truncate(db);
        Ok((Poly::new(f.clone(), quot), Poly::new(f.clone(), rem)))
    }

    /// Panics on a zero divisor; for internal use where the divisor is known nonzero.
    pub fn div_rem(&self, b: &Self) -> (Self, Self) {
        self.checked_div_rem(b).expect("division by the zero polynomial")
    }

    pub fn rem(&self, b: &Self) -> Self {
        self.div_rem(b).1
    }

    /// Quotient of an exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, b: &Self) -> Self {
        let (q, r) = self.div_rem(b);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Self) -> bool {
        !self.is_zero() && other.rem(self).is_zero()
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// (g, s, u) with s·self + u·other = g, g monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let f = self.field.clone();
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f.clone()), Poly::zero(f.clone()));
        let (mut t0, mut t1) = (Poly::zero(f.clone()), Poly::one(f.clone()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub_ref(&q.mul_ref(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub_ref(&q.mul_ref(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(&r0.lc()).expect("nonzero");
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of self modulo m, if it exists.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.rem(m).ext_gcd(m);
        if g.is_one() {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        self.mul_ref(other).rem(m)
    }

    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Poly::one(self.field.clone()).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul_mod(&acc, m);
            if e.bit(i) {
                acc = acc.mul_mod(&base, m);
            }
        }
        acc
    }

    pub fn pow_mod_u64(&self, e: u64, m: &Self) -> Self {
        self.pow_mod(&BigUint::from(e), m)
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(c, &f.from_i64(i as i64)))
            .collect();
        Poly::new(f.clone(), coeffs)
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.add(&f.mul(&acc, x), c);
        }
        acc
    }

    /// self(g), by Horner's rule.
    pub fn compose(&self, g: &Self) -> Self {
        let f = self.field.clone();
        let mut acc = Poly::zero(f.clone());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(g).add_ref(&Poly::constant(f.clone(), c.clone()));
        }
        acc
    }

    /// Replace x by x^k.
    pub fn inflate(&self, k: usize) -> Self {
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        let f = &self.field;
        let mut coeffs = vec![f.zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Poly::new(f.clone(), coeffs)
    }

    /// Inverse of `inflate`; `None` if some exponent is not a multiple of k.
    pub fn deflate(&self, k: usize) -> Option<Self> {
        let f = &self.field;
        if self.coeffs.iter().enumerate().any(|(i, c)| i % k != 0 && !f.is_zero(c)) {
            return None;
        }
        Some(Poly::new(f.clone(), self.coeffs.iter().step_by(k).cloned().collect()))
    }

    /// Largest s such that every exponent is a multiple of k^s (capped at `cap`).
    pub fn deflation_depth(&self, k: usize, cap: u32) -> u32 {
        let mut s = 0;
        let mut cur = self.clone();
        while s < cap && !cur.is_constant() {
            match cur.deflate(k) {
                Some(d) => {
                    cur = d;
                    s += 1;
                }
                None => break,
            }
        }
        if cur.is_constant() {
            cap
        } else {
            s
        }
    }

    /// Sparse rendering such as `3*t^4 + t + 2`, highest degree first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let f = &self.field;
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if f.is_zero(c) {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let term = if i == 0 {
                f.render(c)
            } else if f.is_one(c) {
                mono
            } else if f.is_negative(c) {
                format!("({})*{mono}", f.render(c))
            } else {
                format!("{}*{mono}", f.render(c))
            };
            parts.push(term);
        }
        let mut out = String::new();
        for (k, part) in parts.into_iter().enumerate() {
            if k == 0 {
                out.push_str(&part);
            } else if let Some(rest) = part.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&part);
            }
        }
        out
    }
}

impl<F: Field> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: Self) -> Poly<F> {
        self.add_ref(rhs)
    }
}

impl<F: Field> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: Self) -> Poly<F> {
        self.sub_ref(rhs)
    }
}

impl<F: Field> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: Self) -> Poly<F> {
        self.mul_ref(rhs)
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        self.neg_ref()
    }
}

/// Row `n` of Pascal's triangle.
pub fn binomial_coefficients(n: u64) -> Vec<num_bigint::BigInt> {
    let mut row = vec![num_bigint::BigInt::one()];
    let mut c = num_bigint::BigInt::one();
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::field::Fp;

    fn p(fp: Fp, c: &[i64]) -> Poly<Fp> {
        Poly::from_i64s(fp, c)
    }

    #[test]
    fn ring_identities() {
        let f5 = Fp::new(5);
        let prod = &p(f5, &[1, 1]) * &p(f5, &[-1, 1]);
        assert_eq!(prod, p(f5, &[4, 0, 1]));
        let (q, r) = p(f5, &[0, 0, 0, 1]).div_rem(&p(f5, &[1, 0, 1]));
        assert_eq!(q, p(f5, &[0, 1]));
        assert_eq!(r, p(f5, &[0, 4]));
        let f2 = Fp::new(2);
        assert_eq!(p(f2, &[1, 0, 1]).gcd(&p(f2, &[1, 1])), p(f2, &[1, 1]));
    }

    #[test]
    fn ext_gcd_bezout() {
        let f7 = Fp::new(7);
        let a = p(f7, &[3, 1, 4, 1, 5]);
        let b = p(f7, &[2, 6, 5]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
        assert!(g.divides(&a) && g.divides(&b));
    }

    #[test]
    fn render_sparse() {
        let f5 = Fp::new(5);
        assert_eq!(p(f5, &[2, 1, 0, 0, 3]).render("t"), "3*t^4 + t + 2");
        assert_eq!(Poly::zero(f5).render("t"), "0");
    }

    #[test]
    fn binomials() {
        let row = binomial_coefficients(4);
        let v: Vec<i64> = row.iter().map(|b| i64::try_from(b).unwrap()).collect();
        assert_eq!(v, vec![1, 4, 6, 4, 1]);
        assert_eq!(binomial_coefficients(0).len(), 1);
    }

    #[test]
    fn inflate_and_deflate() {
        let f5 = Fp::new(5);
        let a = p(f5, &[1, 2, 3]);
        let b = a.inflate(25);
        assert_eq!(b.deflate(5).unwrap().deflate(5).unwrap(), a);
        assert_eq!(b.deflation_depth(5, 10), 2);
        assert!(a.deflate(5).is_none());
    }
}
