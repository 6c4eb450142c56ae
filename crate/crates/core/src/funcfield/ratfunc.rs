//! Reduced rational functions num/den with a monic denominator.

use std::fmt;
use std::hash::Hash;

use super::field::Field;
use super::poly::Poly;
use super::FuncFieldError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<F: Field> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> fmt::Debug for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self.render("t"))
    }
}

impl<F: Field> RatFunc<F> {
    /// Reduces num/den to canonical form.
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self, FuncFieldError> {
        if den.is_zero() {
            return Err(FuncFieldError::DivisionByZero);
        }
        if num.is_zero() {
            let field = den.field().clone();
            return Ok(RatFunc { num, den: Poly::one(field) });
        }
        let g = num.gcd(&den);
        let (n, d) = if g.is_one() { (num, den) } else { (num.div_exact(&g), den.div_exact(&g)) };
        let inv = d.field().inv(&d.lc()).expect("nonzero");
        Ok(RatFunc { num: n.scale(&inv), den: d.scale(&inv) })
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        let field = p.field().clone();
        RatFunc { num: p, den: Poly::one(field) }
    }

    pub fn zero(field: F) -> Self {
        Self::from_poly(Poly::zero(field))
    }

    pub fn one(field: F) -> Self {
        Self::from_poly(Poly::one(field))
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::from_poly(Poly::constant(field, c))
    }

    pub fn x(field: F) -> Self {
        Self::from_poly(Poly::x(field))
    }

    pub fn field(&self) -> &F {
        self.num.field()
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// The constant value if this is a constant.
    pub fn as_constant(&self) -> Option<F::Elem> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::new(self.num.add_ref(&other.num), self.den.clone()).expect("nonzero den");
        }
        let num = self.num.mul_ref(&other.den).add_ref(&other.num.mul_ref(&self.den));
        Self::new(num, self.den.mul_ref(&other.den)).expect("nonzero den")
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg_ref(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        // cross-cancel first to keep intermediate degrees small
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let (a, d2) = cancel(&self.num, &other.den, &g1);
        let (b, d1) = cancel(&other.num, &self.den, &g2);
        Self::new(a.mul_ref(&b), d1.mul_ref(&d2)).expect("nonzero den")
    }

    pub fn inv(&self) -> Result<Self, FuncFieldError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self, FuncFieldError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("nonzero den")
    }

    pub fn pow(&self, e: i64) -> Result<Self, FuncFieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Renders as `num` or `(num) / (den)`.
    pub fn render(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.render(var);
        }
        let wrap = |p: &Poly<F>| {
            let s = p.render(var);
            let single = p.coeffs().iter().filter(|c| !p.field().is_zero(c)).count() == 1
                && !s.contains(' ');
            if single {
                s
            } else {
                format!("({s})")
            }
        };
        format!("{} / {}", wrap(&self.num), wrap(&self.den))
    }
}

fn cancel<F: Field>(a: &Poly<F>, b: &Poly<F>, g: &Poly<F>) -> (Poly<F>, Poly<F>) {
    if g.is_one() || g.is_zero() {
        (a.clone(), b.clone())
    } else {
        (a.div_exact(g), b.div_exact(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::field::Fp;

    #[test]
    fn canonical_form() {
        let f5 = Fp::new(5);
        let num = Poly::from_i64s(f5, &[-1, 0, 1]);
        let den = Poly::from_i64s(f5, &[2, 2]);
        let r = RatFunc::new(num, den).unwrap();
        // (t^2 - 1) / (2t + 2) = (t - 1)/2 = 3t + 2
        assert_eq!(r.num(), &Poly::from_i64s(f5, &[2, 3]));
        assert!(r.den().is_one());
        assert!(RatFunc::new(Poly::one(f5), Poly::zero(f5)).is_err());
    }

    #[test]
    fn field_ops() {
        let f7 = Fp::new(7);
        let t = RatFunc::x(f7);
        let one = RatFunc::one(f7);
        let a = one.div(&t.add(&one)).unwrap();
        let b = t.div(&t.add(&one)).unwrap();
        assert!(a.add(&b).is_one());
        assert_eq!(t.pow(-2).unwrap().mul(&t.pow(2).unwrap()), one);
        assert_eq!(a.render("t"), "1 / (t + 1)");
    }
}
