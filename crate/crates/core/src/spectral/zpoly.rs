//! Dense integer polynomials, lowest degree first, plus the division-free
//! characteristic polynomial.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::funcfield::{Poly, Rationals};
use crate::linalg::IntMatrix;

pub type QPoly = Poly<Rationals>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZPoly(Vec<BigInt>);

impl fmt::Debug for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZPoly({})", self.render("x"))
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ZPoly(coeffs)
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        ZPoly(Vec::new())
    }

    pub fn one() -> Self {
        ZPoly(vec![BigInt::one()])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// x − c
    pub fn linear_root(c: BigInt) -> Self {
        Self::new(vec![-c, BigInt::one()])
    }

    pub fn monomial(c: BigInt, d: usize) -> Self {
        let mut v = vec![BigInt::zero(); d + 1];
        v[d] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Degree, with 0 for the zero polynomial.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Content removed, leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        ZPoly(self.0.iter().map(|c| c / &g).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        ZPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_q(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// Sign of f(x) at a rational point.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        // Homogenize: d^n f(n/d) is an integer with the same sign (d > 0).
        let (n, d) = (x.numer(), x.denom());
        let deg = self.0.len();
        if deg == 0 {
            return 0;
        }
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.0.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
        sign(&acc)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// f(−x)
    pub fn negate_var(&self) -> Self {
        Self::new(self.0.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect())
    }

    /// f(x^k)
    pub fn inflate(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); (self.0.len() - 1) * k + 1];
        for (i, c) in self.0.iter().enumerate() {
            v[i * k] = c.clone();
        }
        Self::new(v)
    }

    /// x^deg f(1/x)
    pub fn reverse(&self) -> Self {
        Self::new(self.0.iter().rev().cloned().collect())
    }

    /// Integer primitive polynomial with the roots of f(x/c), c ≠ 0 rational: the
    /// roots are multiplied by c.
    pub fn scale_roots(&self, c: &BigRational) -> Self {
        let n = self.deg();
        let (a, b) = (c.numer(), c.denom());
        // a^n f(b x / a)·… : coefficient i gets b^i a^(n−i).
        let v = (0..=n)
            .map(|i| self.coeff(i) * b.pow(i as u32) * a.pow((n - i) as u32))
            .collect();
        Self::new(v).primitive()
    }

    pub fn to_q(&self) -> QPoly {
        Poly::new(Rationals, self.0.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Primitive integer multiple of a rational polynomial.
    pub fn from_q(p: &QPoly) -> Self {
        let l = p.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        Self::new(p.coeffs().iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect())
            .primitive()
    }

    /// Exact quotient in Z[x], if self = q · d.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.0.len() < d.0.len() {
            return None;
        }
        let mut rem = self.0.clone();
        let dl = d.lc();
        let dd = d.0.len() - 1;
        let mut q = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..q.len()).rev() {
            let (c, r) = rem[k + dd].div_rem(&dl);
            if !r.is_zero() {
                return None;
            }
            if c.is_zero() {
                continue;
            }
            for (j, bj) in d.0.iter().enumerate() {
                rem[k + j] -= &c * bj;
            }
            q[k] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(q))
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div_exact(self).is_some()
    }

    /// Primitive gcd with positive leading coefficient, by the primitive
    /// pseudo-remainder sequence.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.primitive(), o.primitive());
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.lazy_prem(&b);
            a = b;
            b = r;
        }
        a.primitive()
    }

    /// Primitive part of c·self mod other for some nonzero integer c.
    fn lazy_prem(&self, b: &Self) -> Self {
        let n = b.deg();
        let lb = b.lc();
        let mut r = self.clone();
        while !r.is_zero() && r.deg() >= n {
            let k = r.deg() - n;
            let lr = r.lc();
            let g = lr.gcd(&lb);
            let (ca, cb) = (&lb / &g, &lr / &g);
            let mut v: Vec<BigInt> = r.0.iter().map(|c| c * &ca).collect();
            for (j, bj) in b.0.iter().enumerate() {
                v[j + k] -= &cb * bj;
            }
            v.pop();
            r = Self::new(v);
        }
        r.primitive()
    }

    /// Whether m divides self over Q.
    pub fn rem_is_zero(&self, m: &Self) -> bool {
        self.is_zero() || (m.deg() <= self.deg() && self.lazy_prem(m).is_zero())
    }

    pub fn squarefree_part(&self) -> Self {
        if self.deg() == 0 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        self.primitive().div_exact(&g).expect("gcd divides").primitive()
    }

    /// Yun decomposition: primitive squarefree factors with multiplicities.
    pub fn squarefree_decomposition(&self) -> Vec<(ZPoly, u32)> {
        let f = self.primitive();
        let mut out = Vec::new();
        if f.deg() == 0 {
            return out;
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp).to_q();
        let mut b = f.to_q().div_exact(&a0);
        let c = fp.to_q().div_exact(&a0);
        let mut d = c.sub_ref(&b.derivative());
        let mut i = 1;
        while b.deg() > 0 {
            let a = Self::from_q(&b).gcd(&Self::from_q(&d));
            let aq = a.to_q();
            b = b.div_exact(&aq);
            let c = d.div_exact(&aq);
            d = c.sub_ref(&b.derivative());
            if a.deg() > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// x^d − c with c > 0 and d ≥ 1, monic.
    pub fn is_positive_binomial(&self) -> bool {
        let d = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => return false,
        };
        self.is_monic() && self.0[1..d].iter().all(Zero::is_zero) && self.0[0].is_negative()
    }

    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }

    /// 2-norm rounded up.
    pub fn norm2_ceil(&self) -> BigInt {
        let s: BigInt = self.0.iter().map(|c| c * c).sum();
        s.sqrt() + 1
    }

    pub fn max_abs(&self) -> BigInt {
        self.0.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

pub(crate) fn sign(x: &BigInt) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    }
}

pub(crate) fn to_f64(x: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// det(xI − A), monic, by Berkowitz's division-free recurrence.
pub fn char_poly(a: &IntMatrix) -> ZPoly {
    assert!(a.is_square(), "char_poly of a non-square matrix");
    let n = a.rows();
    if n == 0 {
        return ZPoly::one();
    }
    // Coefficients in descending order.
    let mut c: Vec<BigInt> = vec![BigInt::one(), -a.get(0, 0)];
    for r in 1..n {
        let row: Vec<BigInt> = (0..r).map(|j| a.get(r, j).clone()).collect();
        let mut col: Vec<BigInt> = (0..r).map(|i| a.get(i, r).clone()).collect();
        let mut t = Vec::with_capacity(r + 2);
        t.push(BigInt::one());
        t.push(-a.get(r, r));
        for _ in 0..r {
            let dot: BigInt = row.iter().zip(&col).map(|(x, y)| x * y).sum();
            t.push(-dot);
            col = (0..r).map(|i| (0..r).map(|j| a.get(i, j) * &col[j]).sum()).collect();
        }
        let mut next = vec![BigInt::zero(); r + 2];
        for (i, ni) in next.iter_mut().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                if i >= j {
                    *ni += &t[i - j] * cj;
                }
            }
        }
        c = next;
    }
    c.reverse();
    ZPoly::new(c)
}

/// p(A) by Horner's rule.
pub fn eval_at_matrix(p: &ZPoly, a: &IntMatrix) -> IntMatrix {
    let n = a.rows();
    let mut acc = IntMatrix::zeros(n, n);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(a).add(&IntMatrix::identity(n).scale(c));
    }
    acc
}

/// Companion matrix of a monic polynomial.
pub fn companion(f: &ZPoly) -> IntMatrix {
    assert!(f.is_monic() && f.deg() >= 1, "companion of a non-monic polynomial");
    let n = f.deg();
    let mut m = IntMatrix::zeros(n, n);
    for i in 1..n {
        m.set(i, i - 1, BigInt::one());
    }
    for i in 0..n {
        m.set(i, n - 1, -f.coeff(i));
    }
    m
}

/// Matrix of i×i minors, rows and columns indexed by i-subsets in lexicographic order.
pub fn exterior_power(a: &IntMatrix, i: usize) -> IntMatrix {
    let n = a.rows();
    let subsets = k_subsets(n, i);
    let m = subsets.len();
    let mut out = IntMatrix::zeros(m, m);
    for (r, rs) in subsets.iter().enumerate() {
        for (c, cs) in subsets.iter().enumerate() {
            let sub = IntMatrix::from_rows(rs.iter().map(|&x| cs.iter().map(|&y| a.get(x, y).clone()).collect()).collect());
            out.set(r, c, if i == 0 { BigInt::one() } else { sub.det() });
        }
    }
    out
}

pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn berkowitz_small() {
        let a = IntMatrix::from_i64(&[vec![2, 1], vec![0, 2]]);
        assert_eq!(char_poly(&a), ZPoly::from_i64s(&[4, -4, 1]));
        let b = IntMatrix::from_i64(&[vec![0, -1], vec![1, 3]]);
        assert_eq!(char_poly(&b), ZPoly::from_i64s(&[1, -3, 1]));
        let c = companion(&ZPoly::from_i64s(&[-4, 0, 0, 1]));
        assert_eq!(char_poly(&c), ZPoly::from_i64s(&[-4, 0, 0, 1]));
        let d = IntMatrix::from_i64(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]);
        let p = char_poly(&d);
        assert_eq!(p.coeff(0), -d.det());
        assert_eq!(eval_at_matrix(&p, &d), IntMatrix::zeros(3, 3));
    }

    #[test]
    fn yun_and_sign() {
        let f = ZPoly::from_i64s(&[-1, 1]).pow(2).mul(&ZPoly::from_i64s(&[2, 0, 1]));
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(ZPoly::from_i64s(&[2, 0, 1]), 1), (ZPoly::from_i64s(&[-1, 1]), 2)]);
        let g = ZPoly::from_i64s(&[-2, 0, 1]);
        assert_eq!(g.sign_at(&BigRational::new(3.into(), 2.into())), 1);
        assert_eq!(g.sign_at(&BigRational::new(1.into(), 1.into())), -1);
        assert_eq!(g.sign_at(&BigRational::new((-7).into(), 5.into())), -1);
    }

    #[test]
    fn exterior_of_diagonal() {
        let a = IntMatrix::from_i64(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 5]]);
        let e = exterior_power(&a, 2);
        assert_eq!(char_poly(&e), ZPoly::from_i64s(&[-6, 1]).mul(&ZPoly::from_i64s(&[-10, 1])).mul(&ZPoly::from_i64s(&[-15, 1])));
    }
}
