//! Laurent polynomial equations in x1..xn with coefficients in F_p(t).

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::funcfield::parse::{parse_expr, Expr};
use crate::funcfield::{Field, Fp, FpRat, RatFunc};

use super::{SUnit, SUnitError, SUnitPoint};

/// Σ c_k·x^k with nonzero coefficients, keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    fp: Fp,
    nvars: usize,
    terms: BTreeMap<Vec<i64>, FpRat>,
}

impl LaurentPoly {
    pub fn zero(fp: Fp, nvars: usize) -> Self {
        LaurentPoly { fp, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(fp: Fp, nvars: usize, c: FpRat) -> Self {
        Self::monomial(fp, c, vec![0; nvars])
    }

    pub fn monomial(fp: Fp, c: FpRat, exps: Vec<i64>) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { fp, nvars, terms }
    }

    pub fn var(fp: Fp, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(fp, RatFunc::one(fp), e)
    }

    pub fn fp(&self) -> Fp {
        self.fp
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &FpRat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let v = match out.terms.get(e) {
                Some(old) => old.add(c),
                None => c.clone(),
            };
            if v.is_zero() {
                out.terms.remove(e);
            } else {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.fp, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out = out.add(&Self::monomial(self.fp, ca.mul(cb), e));
            }
        }
        out
    }

    fn single_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        Some(Self::monomial(self.fp, c.inv().ok()?, e.iter().map(|x| -x).collect()))
    }

    pub fn pow(&self, k: i64) -> Option<Self> {
        let base = if k < 0 { self.single_inverse()? } else { self.clone() };
        let mut out = Self::constant(self.fp, self.nvars, RatFunc::one(self.fp));
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Some(out)
    }

    /// Value at a point, as the list of (coefficient, monomial) pairs; terms
    /// whose monomials coincide are not merged.
    pub fn substitute(&self, point: &SUnitPoint, fp: Fp) -> Result<Vec<(FpRat, SUnit)>, SUnitError> {
        if point.dim() != self.nvars {
            return Err(SUnitError::DimensionMismatch(format!(
                "equation in {} variables at a point of dimension {}",
                self.nvars,
                point.dim()
            )));
        }
        let r = point.coords.first().map(|c| c.exps.len()).unwrap_or(0);
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut m = SUnit::one(r);
                for (k, coord) in e.iter().zip(&point.coords) {
                    if *k != 0 {
                        m = m.mul(&coord.pow(&BigInt::from(*k), fp), fp);
                    }
                }
                (c.clone(), m)
            })
            .collect())
    }

    /// Renders as a parseable string in x1..xn and t.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k != 0)
                .map(|(i, k)| if *k == 1 { format!("x{}", i + 1) } else { format!("x{}^({k})", i + 1) })
                .collect();
            let coef = c.render("t");
            let coef_simple = c.is_constant() || (c.is_poly() && !coef.contains(' '));
            let s = match (mono.is_empty(), c.is_one(), coef_simple) {
                (true, _, _) => format!("({coef})"),
                (false, true, _) => mono.join("*"),
                (false, false, true) => format!("{coef}*{}", mono.join("*")),
                (false, false, false) => format!("({coef})*{}", mono.join("*")),
            };
            parts.push(s);
        }
        parts.join(" + ")
    }
}

/// An equation `poly = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentEquation {
    pub poly: LaurentPoly,
}

impl LaurentEquation {
    pub fn new(poly: LaurentPoly) -> Result<Self, SUnitError> {
        if poly.is_zero() {
            return Err(SUnitError::Parse("equation has no terms".into()));
        }
        Ok(LaurentEquation { poly })
    }

    /// Parses `lhs` or `lhs = rhs` in the variables x1..x{nvars} and t.
    pub fn parse(fp: Fp, nvars: usize, s: &str) -> Result<Self, SUnitError> {
        let sides: Vec<&str> = s.split('=').collect();
        let poly = match sides.as_slice() {
            [lhs] => parse_side(fp, nvars, lhs)?,
            [lhs, rhs] => parse_side(fp, nvars, lhs)?.sub(&parse_side(fp, nvars, rhs)?),
            _ => return Err(SUnitError::Parse(format!("more than one '=' in \"{s}\""))),
        };
        Self::new(poly)
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn render(&self) -> String {
        self.poly.render()
    }

    /// Exact check at a point whose coordinates are small enough to expand.
    pub fn holds_exactly(
        &self,
        basis: &super::GeneratorBasis,
        point: &SUnitPoint,
        degree_cap: u64,
    ) -> Result<bool, SUnitError> {
        let mut acc = RatFunc::zero(basis.fp());
        for (c, m) in self.poly.substitute(point, basis.fp())? {
            acc = acc.add(&c.mul(&super::coordinate_value(basis, &m, degree_cap)?));
        }
        Ok(acc.is_zero())
    }
}

fn parse_side(fp: Fp, nvars: usize, s: &str) -> Result<LaurentPoly, SUnitError> {
    let e = parse_expr(s)?;
    eval(fp, nvars, &e)
}

fn var_index(name: &str, nvars: usize) -> Option<usize> {
    let i: usize = name.strip_prefix('x')?.parse().ok()?;
    (1..=nvars).contains(&i).then(|| i - 1)
}

fn eval(fp: Fp, nvars: usize, e: &Expr) -> Result<LaurentPoly, SUnitError> {
    Ok(match e {
        Expr::Num(n) => LaurentPoly::constant(fp, nvars, RatFunc::constant(fp, fp.from_bigint(n))),
        Expr::Var(v) if v == "t" => LaurentPoly::constant(fp, nvars, RatFunc::x(fp)),
        Expr::Var(v) => match var_index(v, nvars) {
            Some(i) => LaurentPoly::var(fp, nvars, i),
            None => return Err(SUnitError::Parse(format!("unknown variable '{v}'"))),
        },
        Expr::Add(a, b) => eval(fp, nvars, a)?.add(&eval(fp, nvars, b)?),
        Expr::Sub(a, b) => eval(fp, nvars, a)?.sub(&eval(fp, nvars, b)?),
        Expr::Mul(a, b) => eval(fp, nvars, a)?.mul(&eval(fp, nvars, b)?),
        Expr::Neg(a) => eval(fp, nvars, a)?.neg(),
        Expr::Div(a, b) => {
            let inv = eval(fp, nvars, b)?
                .single_inverse()
                .ok_or_else(|| SUnitError::Parse("division only by a single nonzero term".into()))?;
            eval(fp, nvars, a)?.mul(&inv)
        }
        Expr::Pow(a, k) => eval(fp, nvars, a)?
            .pow(*k)
            .ok_or_else(|| SUnitError::Parse("negative powers only of a single nonzero term".into()))?,
    })
}
