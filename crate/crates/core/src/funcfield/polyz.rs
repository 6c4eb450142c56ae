//! Polynomials in z whose coefficients are rational functions in y with
//! denominators supported on a fixed list of atoms (e.g. y, y+1, y−1).
//!
//! Coefficients keep a shared-denominator form `num / ∏ atom^e`, which makes
//! long convolutions cheap; reduction to lowest terms happens only on output.

use std::sync::Arc;

use super::field::Field;
use super::poly::{binomial_coefficients, Poly};
use super::ratfunc::RatFunc;
use super::FuncFieldError;

/// The coefficient ring context.
#[derive(Clone, Debug)]
pub struct ZTower<F: Field> {
    field: F,
    atoms: Vec<Poly<F>>,
    degree_cap: usize,
}

/// num / ∏ atoms[i]^den[i]
#[derive(Clone, Debug)]
pub struct Coef<F: Field> {
    num: Poly<F>,
    den: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct PolyZ<F: Field> {
    coeffs: Vec<Coef<F>>,
}

#[derive(Clone, Debug)]
pub enum ZExpr<F: Field> {
    Leaf(Arc<PolyZ<F>>),
    Add(Box<ZExpr<F>>, Box<ZExpr<F>>),
    Sub(Box<ZExpr<F>>, Box<ZExpr<F>>),
    Mul(Box<ZExpr<F>>, Box<ZExpr<F>>),
    Scale(Box<ZExpr<F>>, F::Elem),
    Pow(Box<ZExpr<F>>, u32),
}

impl<F: Field> ZExpr<F> {
    pub fn leaf(p: PolyZ<F>) -> Self {
        ZExpr::Leaf(Arc::new(p))
    }
    pub fn add(self, o: Self) -> Self {
        ZExpr::Add(Box::new(self), Box::new(o))
    }
    pub fn sub(self, o: Self) -> Self {
        ZExpr::Sub(Box::new(self), Box::new(o))
    }
    pub fn mul(self, o: Self) -> Self {
        ZExpr::Mul(Box::new(self), Box::new(o))
    }
    pub fn scale(self, c: F::Elem) -> Self {
        ZExpr::Scale(Box::new(self), c)
    }
    pub fn pow(self, e: u32) -> Self {
        ZExpr::Pow(Box::new(self), e)
    }
}

impl<F: Field> ZTower<F> {
    pub fn new(field: F, atoms: Vec<Poly<F>>, degree_cap: usize) -> Self {
        ZTower { field, atoms, degree_cap }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    fn coef_zero(&self) -> Coef<F> {
        Coef { num: Poly::zero(self.field.clone()), den: vec![0; self.atoms.len()] }
    }

    /// c / atoms[atom]  (or just c when `atom` is None)
    pub fn coef(&self, c: F::Elem, atom: Option<usize>) -> Coef<F> {
        let mut den = vec![0; self.atoms.len()];
        if let Some(i) = atom {
            den[i] = 1;
        }
        Coef { num: Poly::constant(self.field.clone(), c), den }
    }

    fn coef_is_zero(&self, a: &Coef<F>) -> bool {
        a.num.is_zero()
    }

    fn lift(&self, a: &Coef<F>, target: &[u32]) -> Poly<F> {
        let mut num = a.num.clone();
        for (i, (&have, &want)) in a.den.iter().zip(target).enumerate() {
            if want > have {
                num = num.mul_ref(&self.atoms[i].pow((want - have) as u64));
            }
        }
        num
    }

    fn coef_add(&self, a: &Coef<F>, b: &Coef<F>) -> Coef<F> {
        if self.coef_is_zero(a) {
            return b.clone();
        }
        if self.coef_is_zero(b) {
            return a.clone();
        }
        if a.den == b.den {
            return Coef { num: a.num.add_ref(&b.num), den: a.den.clone() };
        }
        let den: Vec<u32> = a.den.iter().zip(&b.den).map(|(x, y)| *x.max(y)).collect();
        let num = self.lift(a, &den).add_ref(&self.lift(b, &den));
        Coef { num, den }
    }

    fn coef_mul(&self, a: &Coef<F>, b: &Coef<F>) -> Coef<F> {
        if self.coef_is_zero(a) || self.coef_is_zero(b) {
            return self.coef_zero();
        }
        Coef {
            num: a.num.mul_ref(&b.num),
            den: a.den.iter().zip(&b.den).map(|(x, y)| x + y).collect(),
        }
    }

    fn coef_scale(&self, a: &Coef<F>, c: &F::Elem) -> Coef<F> {
        Coef { num: a.num.scale(c), den: a.den.clone() }
    }

    /// Reduced rational function value of a coefficient.
    pub fn coef_value(&self, a: &Coef<F>) -> RatFunc<F> {
        let mut den = Poly::one(self.field.clone());
        for (atom, &e) in self.atoms.iter().zip(&a.den) {
            den = den.mul_ref(&atom.pow(e as u64));
        }
        RatFunc::new(a.num.clone(), den).expect("atoms are nonzero")
    }

    pub fn from_coeffs(&self, coeffs: Vec<Coef<F>>) -> PolyZ<F> {
        let mut p = PolyZ { coeffs };
        self.trim(&mut p);
        p
    }

    /// c·(z + s)^m / atom
    pub fn shifted_power(&self, s: i64, m: u64, c: F::Elem, atom: Option<usize>) -> PolyZ<F> {
        let f = &self.field;
        let binom = binomial_coefficients(m);
        let s_elem = f.from_i64(s);
        let mut s_pow = f.one();
        let mut coeffs = vec![self.coef_zero(); m as usize + 1];
        // coefficient of z^k is C(m,k) s^(m−k)
        for k in (0..=m as usize).rev() {
            let v = f.mul(&f.mul(&f.from_bigint(&binom[k]), &s_pow), &c);
            coeffs[k] = self.coef(v, atom);
            s_pow = f.mul(&s_pow, &s_elem);
        }
        self.from_coeffs(coeffs)
    }

    pub fn constant(&self, c: F::Elem) -> PolyZ<F> {
        self.from_coeffs(vec![self.coef(c, None)])
    }

    fn trim(&self, p: &mut PolyZ<F>) {
        while p.coeffs.last().is_some_and(|c| self.coef_is_zero(c)) {
            p.coeffs.pop();
        }
    }

    fn check_cap(&self, deg: usize) -> Result<(), FuncFieldError> {
        if deg > self.degree_cap {
            Err(FuncFieldError::DegreeCapExceeded { needed: deg as u64, cap: self.degree_cap as u64 })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, a: &PolyZ<F>, b: &PolyZ<F>) -> PolyZ<F> {
        let n = a.coeffs.len().max(b.coeffs.len());
        let zero = self.coef_zero();
        let coeffs = (0..n)
            .map(|i| {
                self.coef_add(a.coeffs.get(i).unwrap_or(&zero), b.coeffs.get(i).unwrap_or(&zero))
            })
            .collect();
        self.from_coeffs(coeffs)
    }

    pub fn scale(&self, a: &PolyZ<F>, c: &F::Elem) -> PolyZ<F> {
        self.from_coeffs(a.coeffs.iter().map(|x| self.coef_scale(x, c)).collect())
    }

    pub fn mul(&self, a: &PolyZ<F>, b: &PolyZ<F>) -> Result<PolyZ<F>, FuncFieldError> {
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return Ok(PolyZ { coeffs: Vec::new() });
        }
        let deg = a.coeffs.len() + b.coeffs.len() - 2;
        self.check_cap(deg)?;
        let coeffs = (0..=deg).map(|k| self.convolve_at(a, b, k)).collect();
        Ok(self.from_coeffs(coeffs))
    }

    fn convolve_at(&self, a: &PolyZ<F>, b: &PolyZ<F>, k: usize) -> Coef<F> {
        let mut acc = self.coef_zero();
        let lo = k.saturating_sub(b.coeffs.len().saturating_sub(1));
        let hi = k.min(a.coeffs.len().saturating_sub(1));
        for i in lo..=hi {
            if let (Some(x), Some(y)) = (a.coeffs.get(i), b.coeffs.get(k - i)) {
                acc = self.coef_add(&acc, &self.coef_mul(x, y));
            }
        }
        acc
    }

    /// Fully expands an expression.
    pub fn materialize(&self, e: &ZExpr<F>) -> Result<PolyZ<F>, FuncFieldError> {
        Ok(match e {
            ZExpr::Leaf(p) => (**p).clone(),
            ZExpr::Add(a, b) => self.add(&self.materialize(a)?, &self.materialize(b)?),
            ZExpr::Sub(a, b) => {
                let nb = self.scale(&self.materialize(b)?, &self.field.neg(&self.field.one()));
                self.add(&self.materialize(a)?, &nb)
            }
            ZExpr::Mul(a, b) => self.mul(&self.materialize(a)?, &self.materialize(b)?)?,
            ZExpr::Scale(a, c) => self.scale(&self.materialize(a)?, c),
            ZExpr::Pow(a, k) => {
                let base = self.materialize(a)?;
                let mut acc = self.constant(self.field.one());
                for _ in 0..*k {
                    acc = self.mul(&acc, &base)?;
                }
                acc
            }
        })
    }

    /// Exact coefficient of z^k. Sub-expressions are expanded, but a product at
    /// the top is only convolved at the requested degree.
    pub fn coefficient(&self, e: &ZExpr<F>, k: usize) -> Result<RatFunc<F>, FuncFieldError> {
        Ok(self.coef_value(&self.coefficient_raw(e, k)?))
    }

    fn coefficient_raw(&self, e: &ZExpr<F>, k: usize) -> Result<Coef<F>, FuncFieldError> {
        Ok(match e {
            ZExpr::Leaf(p) => p.coeffs.get(k).cloned().unwrap_or_else(|| self.coef_zero()),
            ZExpr::Add(a, b) => self.coef_add(&self.coefficient_raw(a, k)?, &self.coefficient_raw(b, k)?),
            ZExpr::Sub(a, b) => {
                let nb = self.coef_scale(&self.coefficient_raw(b, k)?, &self.field.neg(&self.field.one()));
                self.coef_add(&self.coefficient_raw(a, k)?, &nb)
            }
            ZExpr::Scale(a, c) => self.coef_scale(&self.coefficient_raw(a, k)?, c),
            ZExpr::Mul(a, b) => {
                let (x, y) = (self.materialize(a)?, self.materialize(b)?);
                self.check_cap(x.degree() + y.degree())?;
                self.convolve_at(&x, &y, k)
            }
            ZExpr::Pow(a, n) => {
                if *n == 0 {
                    return Ok(if k == 0 { self.coef(self.field.one(), None) } else { self.coef_zero() });
                }
                let base = self.materialize(a)?;
                let rest = self.materialize(&ZExpr::Pow(a.clone(), n - 1))?;
                self.check_cap(base.degree() * *n as usize)?;
                self.convolve_at(&rest, &base, k)
            }
        })
    }
}

impl<F: Field> PolyZ<F> {
    /// Degree in z; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}
