//! Arithmetic progressions and exponential-sum sets
//! S = {c0 + Σ_i Σ_{j ≤ r_i} c_ij·q^{2^j n_i} : n_i ∈ N}, finite unions of
//! them, and the operations used to classify return sets.

mod fit;
mod json;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::funcfield::field::prime_power;

pub use fit::{fit_descriptor, FitLimits};
pub use json::{DescriptorJson, ExpSumJson, ProgressionJson};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("invalid set: {0}")]
    Invalid(String),
    #[error("declared type {declared} but {reason}")]
    TypeMismatch { declared: u8, reason: String },
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Ambient {
    N,
    Z,
}

/// {m·k + l : k ∈ N} (or k ∈ Z); m = 0 is the singleton {l}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArithProgression {
    pub m: BigInt,
    pub l: BigInt,
    pub ambient: Ambient,
}

impl ArithProgression {
    pub fn new(m: impl Into<BigInt>, l: impl Into<BigInt>) -> Self {
        Self::with_ambient(m, l, Ambient::N)
    }

    /// Normalizes Z-progressions to 0 ≤ l < m.
    pub fn with_ambient(m: impl Into<BigInt>, l: impl Into<BigInt>, ambient: Ambient) -> Self {
        let m: BigInt = m.into();
        let l: BigInt = l.into();
        assert!(!m.is_negative(), "negative step");
        let l = if ambient == Ambient::Z && !m.is_zero() { l.mod_floor(&m) } else { l };
        ArithProgression { m, l, ambient }
    }

    /// The k with n = m·k + l, if any.
    pub fn index_of(&self, n: &BigInt) -> Option<BigInt> {
        let diff = n - &self.l;
        if self.m.is_zero() {
            return diff.is_zero().then(BigInt::zero);
        }
        let (k, r) = diff.div_mod_floor(&self.m);
        let ok = r.is_zero() && (self.ambient == Ambient::Z || !k.is_negative());
        ok.then_some(k)
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        self.index_of(n).is_some()
    }

    /// Members in [lo, hi].
    pub fn members_in(&self, lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
        if self.m.is_zero() {
            return if &self.l >= lo && &self.l <= hi { vec![self.l.clone()] } else { vec![] };
        }
        let mut first = if self.ambient == Ambient::N && &self.l > lo { self.l.clone() } else { lo.clone() };
        let r = (&first - &self.l).mod_floor(&self.m);
        if !r.is_zero() {
            first += &self.m - r;
        }
        let mut out = Vec::new();
        let mut x = first;
        while &x <= hi {
            out.push(x.clone());
            x += &self.m;
        }
        out
    }

    /// Exact intersection by the Chinese remainder theorem.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        match (self.m.is_zero(), other.m.is_zero()) {
            (true, _) => other.contains(&self.l).then(|| self.clone()),
            (_, true) => self.contains(&other.l).then(|| other.clone()),
            _ => {
                let g = self.m.gcd(&other.m);
                let diff = &other.l - &self.l;
                if !diff.is_multiple_of(&g) {
                    return None;
                }
                let lcm = self.m.lcm(&other.m);
                // x = l1 + m1·s with m1·s ≡ l2 − l1 (mod m2)
                let m1g = &self.m / &g;
                let m2g = &other.m / &g;
                let inv = if m2g.is_one() { BigInt::zero() } else { mod_inverse(&m1g, &m2g) };
                let s = ((&diff / &g) * inv).mod_floor(&m2g);
                let x0 = (&self.l + &self.m * s).mod_floor(&lcm);
                let ambient = if self.ambient == Ambient::N || other.ambient == Ambient::N { Ambient::N } else { Ambient::Z };
                if ambient == Ambient::Z {
                    return Some(ArithProgression::with_ambient(lcm, x0, Ambient::Z));
                }
                // smallest x ≡ x0 with x at or above both N-progression starts
                let floor = [self, other]
                    .iter()
                    .filter(|a| a.ambient == Ambient::N)
                    .map(|a| a.l.clone())
                    .max()
                    .expect("one N side");
                let r = (&floor - &x0).mod_floor(&lcm);
                let start = if r.is_zero() { floor } else { floor + (&lcm - r) };
                Some(ArithProgression::new(lcm, start))
            }
        }
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

impl fmt::Display for ArithProgression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = if self.ambient == Ambient::N { "k in N" } else { "k in Z" };
        if self.m.is_zero() {
            write!(f, "{{{}}}", self.l)
        } else {
            write!(f, "{{{}k + {} : {k}}}", self.m, self.l)
        }
    }
}

/// Outcome of a membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Member(Witness),
    NotMember,
    /// Incomplete search: every exponent up to `cap` was tried.
    Unknown { cap: u64 },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Progression { index: usize, k: BigInt },
    ExpSum { index: usize, exponents: Vec<u64> },
    Added,
}

/// c0 + Σ_i Σ_{j ≤ r_i} c_ij·q^{2^j n_i}. Rows are stored without trailing
/// zeros (an all-zero row is kept as [0]), so r_i is the last nonzero index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpSumSet {
    q: u64,
    p: u64,
    c0: BigRational,
    coeffs: Vec<Vec<BigRational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    Pos,
    Neg,
}

impl ExpSumSet {
    pub fn new(q: u64, c0: BigRational, coeffs: Vec<Vec<BigRational>>) -> Result<Self, SetError> {
        let (p, e) = prime_power(&BigInt::from(q))
            .ok_or_else(|| SetError::Invalid(format!("q = {q} is not a prime power")))?;
        debug_assert!(e >= 1);
        if coeffs.is_empty() {
            return Err(SetError::Invalid("d must be at least 1".into()));
        }
        let coeffs = coeffs
            .into_iter()
            .map(|mut row| {
                while row.len() > 1 && row.last().is_some_and(Zero::is_zero) {
                    row.pop();
                }
                if row.is_empty() {
                    row.push(BigRational::zero());
                }
                row
            })
            .collect();
        Ok(ExpSumSet { q, p, c0, coeffs })
    }

    /// Integer coefficients.
    pub fn from_ints(q: u64, c0: i64, coeffs: &[Vec<i64>]) -> Result<Self, SetError> {
        let r = |v: i64| BigRational::from_integer(BigInt::from(v));
        Self::new(q, r(c0), coeffs.iter().map(|row| row.iter().map(|&v| r(v)).collect()).collect())
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn c0(&self) -> &BigRational {
        &self.c0
    }

    pub fn coeffs(&self) -> &[Vec<BigRational>] {
        &self.coeffs
    }

    pub fn d(&self) -> usize {
        self.coeffs.len()
    }

    /// r_i for each variable.
    pub fn r(&self) -> Vec<usize> {
        self.coeffs.iter().map(|row| row.len() - 1).collect()
    }

    /// d + Σ r_i + #{i : r_i > 0}.
    pub fn complexity(&self) -> usize {
        let r = self.r();
        self.d() + r.iter().sum::<usize>() + r.iter().filter(|&&x| x > 0).count()
    }

    /// Σ |numerator| + |denominator| − 1 over all coefficients (0 for zero).
    pub fn coefficient_size(&self) -> BigInt {
        std::iter::once(&self.c0)
            .chain(self.coeffs.iter().flatten())
            .filter(|c| !c.is_zero())
            .map(|c| c.numer().abs() + c.denom() - 1)
            .sum()
    }

    fn qpow(&self, j: usize, k: u64) -> BigInt {
        let e = (1u64 << j) * k;
        num_traits::pow(BigInt::from(self.q), e.to_usize().expect("exponent fits"))
    }

    /// Σ_j c_ij·q^{2^j k}
    pub fn term(&self, i: usize, k: u64) -> BigRational {
        self.coeffs[i]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| c * BigRational::from_integer(self.qpow(j, k)))
            .sum()
    }

    pub fn value(&self, exps: &[u64]) -> BigRational {
        assert_eq!(exps.len(), self.d());
        &self.c0 + exps.iter().enumerate().map(|(i, &k)| self.term(i, k)).sum::<BigRational>()
    }

    /// The common sign of the leading coefficients, if they share one.
    fn dominant_sign(&self) -> Option<Sign> {
        let mut sign = None;
        for row in &self.coeffs {
            let top = row.last().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let s = if top.is_positive() { Sign::Pos } else { Sign::Neg };
            match sign {
                None => sign = Some(s),
                Some(prev) if prev != s => return None,
                _ => {}
            }
        }
        Some(sign.unwrap_or(Sign::Pos))
    }

    /// Whether membership and windows are decided by a complete search.
    pub fn is_complete_searchable(&self) -> bool {
        self.dominant_sign().is_some()
    }

    /// Exclusive exponent bounds K_i such that every solution of
    /// Σ_i s·T_i(n_i) ≤ upper (s the dominant sign) has n_i < K_i.
    ///
    /// With a = |c_top|, C = Σ_{j<top}|c_j| and Q = q^{2^top k}, the lower
    /// terms are at most C·√Q, so s·T(k) ≥ a·Q/2 as soon as a²Q > 4C².
    fn var_bounds(&self, sign: Sign, upper: &BigRational) -> Vec<u64> {
        let s = |x: BigRational| if sign == Sign::Pos { x } else { -x };
        let mut lows = Vec::with_capacity(self.d());
        let mut kstars = Vec::with_capacity(self.d());
        for (i, row) in self.coeffs.iter().enumerate() {
            let top = row.len() - 1;
            if row[top].is_zero() {
                lows.push(BigRational::zero());
                kstars.push(0);
                continue;
            }
            let a = row[top].abs();
            let c: BigRational = row[..top].iter().map(|x| x.abs()).sum();
            let four_c2 = &c * &c * BigRational::from_integer(4.into());
            let mut kstar = 1u64;
            while &a * &a * BigRational::from_integer(self.qpow(top, kstar)) <= four_c2 {
                kstar += 1;
            }
            let low = (0..kstar).map(|k| s(self.term(i, k))).min().expect("kstar ≥ 1");
            lows.push(low.min(BigRational::zero()));
            kstars.push(kstar);
        }
        let total_low: BigRational = lows.iter().sum();
        let two = BigRational::from_integer(2.into());
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let top = row.len() - 1;
                if row[top].is_zero() {
                    return 1;
                }
                let ui = upper - (&total_low - &lows[i]);
                let a = row[top].abs();
                let mut k = kstars[i];
                while &a * BigRational::from_integer(self.qpow(top, k)) / &two <= ui {
                    k += 1;
                }
                k
            })
            .collect()
    }

    fn search(&self, bounds: &[u64], target: &BigRational) -> Option<Vec<u64>> {
        let d = self.d();
        let tables: Vec<Vec<BigRational>> =
            (0..d).map(|i| (0..bounds[i]).map(|k| self.term(i, k)).collect()).collect();
        let mut exps = vec![0u64; d];
        fn rec(
            tables: &[Vec<BigRational>],
            i: usize,
            rest: &BigRational,
            exps: &mut Vec<u64>,
        ) -> bool {
            if i + 1 == tables.len() {
                if let Some(k) = tables[i].iter().position(|v| v == rest) {
                    exps[i] = k as u64;
                    return true;
                }
                return false;
            }
            for (k, v) in tables[i].iter().enumerate() {
                exps[i] = k as u64;
                if rec(tables, i + 1, &(rest - v), exps) {
                    return true;
                }
            }
            false
        }
        if bounds.iter().any(|&b| b == 0) {
            return None;
        }
        rec(&tables, 0, target, &mut exps).then_some(exps)
    }

    /// Exponents (n_1, …, n_d) reaching `n`; complete when the leading
    /// coefficients share a sign, otherwise exponents up to `cap` are tried.
    pub fn contains(&self, n: &BigInt, cap: u64) -> Membership {
        let target = BigRational::from_integer(n.clone()) - &self.c0;
        match self.dominant_sign() {
            Some(sign) => {
                let upper = if sign == Sign::Pos { target.clone() } else { -target.clone() };
                let bounds = self.var_bounds(sign, &upper);
                match self.search(&bounds, &target) {
                    Some(e) => Membership::Member(Witness::ExpSum { index: 0, exponents: e }),
                    None => Membership::NotMember,
                }
            }
            None => match self.search(&vec![cap + 1; self.d()], &target) {
                Some(e) => Membership::Member(Witness::ExpSum { index: 0, exponents: e }),
                None => Membership::Unknown { cap },
            },
        }
    }

    /// All integer members in [lo, hi], or None when the search would be incomplete.
    pub fn members_in(&self, lo: &BigInt, hi: &BigInt) -> Option<BTreeSet<BigInt>> {
        let sign = self.dominant_sign()?;
        let (lo, hi) = (BigRational::from_integer(lo.clone()), BigRational::from_integer(hi.clone()));
        let upper = if sign == Sign::Pos { &hi - &self.c0 } else { &self.c0 - &lo };
        let bounds = self.var_bounds(sign, &upper);
        let tables: Vec<Vec<BigRational>> =
            (0..self.d()).map(|i| (0..bounds[i]).map(|k| self.term(i, k)).collect()).collect();
        let mut out = BTreeSet::new();
        let mut stack: Vec<(usize, BigRational)> = vec![(0, self.c0.clone())];
        while let Some((i, acc)) = stack.pop() {
            if i == tables.len() {
                if acc >= lo && acc <= hi && acc.is_integer() {
                    out.insert(acc.to_integer());
                }
                continue;
            }
            for v in &tables[i] {
                stack.push((i + 1, &acc + v));
            }
        }
        Some(out)
    }

    /// Whether this is S_{q,d,0}(c0/(q−1); c_i/(q−1)) with integers c and
    /// q − 1 | c0 + Σ c_i.
    pub fn is_p_normal_admissible(&self) -> (bool, String) {
        if self.r().iter().any(|&r| r > 0) {
            return (false, "r > 0".into());
        }
        let qm1 = BigRational::from_integer(BigInt::from(self.q - 1));
        let scaled: Vec<BigRational> =
            std::iter::once(&self.c0).chain(self.coeffs.iter().map(|row| &row[0])).map(|c| c * &qm1).collect();
        if let Some(c) = scaled.iter().find(|c| !c.is_integer()) {
            return (false, format!("coefficient {} is not an integer over q - 1 = {}", c / &qm1, self.q - 1));
        }
        let sum: BigInt = scaled.iter().map(|c| c.to_integer()).sum();
        if sum.is_multiple_of(&BigInt::from(self.q - 1)) {
            (true, format!("q - 1 = {} divides {sum}", self.q - 1))
        } else {
            (false, format!("q - 1 = {} does not divide {sum}", self.q - 1))
        }
    }
}

impl fmt::Display for ExpSumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        if !self.c0.is_zero() {
            parts.push(self.c0.to_string());
        }
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let e = if j == 0 { format!("n{}", i + 1) } else { format!("{}*n{}", 1u64 << j, i + 1) };
                let c = if c.is_one() { String::new() } else { format!("{c}*") };
                parts.push(format!("{c}{}^({e})", self.q));
            }
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{{{}}}", parts.join(" + "))
    }
}

/// A finite union of progressions and exponential-sum sets in N, with finite
/// additions and removals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetDescriptor {
    pub progressions: Vec<ArithProgression>,
    pub exp_sums: Vec<ExpSumSet>,
    pub add: BTreeSet<BigInt>,
    pub remove: BTreeSet<BigInt>,
    pub declared_type: u8,
}

/// Default exponent cap for searches that cannot be made complete.
pub const DEFAULT_SEARCH_CAP: u64 = 32;

impl SetDescriptor {
    /// Checks the declared type against the components.
    pub fn new(
        progressions: Vec<ArithProgression>,
        exp_sums: Vec<ExpSumSet>,
        add: BTreeSet<BigInt>,
        remove: BTreeSet<BigInt>,
        declared_type: u8,
    ) -> Result<Self, SetError> {
        if declared_type > 2 {
            return Err(SetError::Invalid(format!("type {declared_type} is not 0, 1 or 2")));
        }
        if declared_type == 0 && !exp_sums.is_empty() {
            return Err(SetError::TypeMismatch { declared: 0, reason: "exponential-sum components present".into() });
        }
        if declared_type == 1 {
            for s in &exp_sums {
                let (ok, why) = s.is_p_normal_admissible();
                if !ok {
                    return Err(SetError::TypeMismatch { declared: 1, reason: format!("{s}: {why}") });
                }
            }
        }
        if let Some(first) = exp_sums.first() {
            if let Some(s) = exp_sums.iter().find(|s| s.p != first.p) {
                return Err(SetError::PrimeMismatch(first.p, s.p));
            }
        }
        if add.intersection(&remove).next().is_some() {
            return Err(SetError::Invalid("an element is both added and removed".into()));
        }
        Ok(SetDescriptor { progressions, exp_sums, add, remove, declared_type })
    }

    pub fn empty() -> Self {
        SetDescriptor {
            progressions: vec![],
            exp_sums: vec![],
            add: BTreeSet::new(),
            remove: BTreeSet::new(),
            declared_type: 0,
        }
    }

    pub fn progression(ap: ArithProgression) -> Self {
        SetDescriptor { progressions: vec![ap], ..Self::empty() }
    }

    /// A single exponential-sum set, typed 1 when admissible and 2 otherwise.
    pub fn exp_sum(s: ExpSumSet) -> Self {
        let ty = if s.is_p_normal_admissible().0 { 1 } else { 2 };
        SetDescriptor { exp_sums: vec![s], declared_type: ty, ..Self::empty() }
    }

    pub fn finite(items: impl IntoIterator<Item = BigInt>) -> Self {
        SetDescriptor { add: items.into_iter().filter(|x| !x.is_negative()).collect(), ..Self::empty() }
    }

    pub fn p(&self) -> Option<u64> {
        self.exp_sums.first().map(|s| s.p)
    }

    fn base_contains(&self, n: &BigInt, cap: u64) -> Membership {
        if n.is_negative() {
            return Membership::NotMember;
        }
        for (index, ap) in self.progressions.iter().enumerate() {
            if let Some(k) = ap.index_of(n) {
                return Membership::Member(Witness::Progression { index, k });
            }
        }
        let mut unknown = None;
        for (index, s) in self.exp_sums.iter().enumerate() {
            match s.contains(n, cap) {
                Membership::Member(Witness::ExpSum { exponents, .. }) => {
                    return Membership::Member(Witness::ExpSum { index, exponents })
                }
                Membership::Unknown { cap } => unknown = Some(cap),
                _ => {}
            }
        }
        unknown.map_or(Membership::NotMember, |cap| Membership::Unknown { cap })
    }

    pub fn contains_with_cap(&self, n: &BigInt, cap: u64) -> Membership {
        if self.remove.contains(n) {
            return Membership::NotMember;
        }
        if self.add.contains(n) && !n.is_negative() {
            return Membership::Member(Witness::Added);
        }
        self.base_contains(n, cap)
    }

    pub fn contains(&self, n: &BigInt) -> Membership {
        self.contains_with_cap(n, DEFAULT_SEARCH_CAP)
    }

    /// Members of [0, N], plus the elements the search could not decide.
    pub fn window(&self, n_max: u64) -> WindowResult {
        let lo = BigInt::zero();
        let hi = BigInt::from(n_max);
        let mut members: BTreeSet<BigInt> = BTreeSet::new();
        for ap in &self.progressions {
            members.extend(ap.members_in(&lo, &hi));
        }
        let mut incomplete = Vec::new();
        for s in &self.exp_sums {
            match s.members_in(&lo, &hi) {
                Some(found) => members.extend(found),
                None => incomplete.push(s),
            }
        }
        let mut unknown = BTreeSet::new();
        if !incomplete.is_empty() {
            let extra: Vec<(u64, Membership)> = (0..=n_max)
                .into_par_iter()
                .filter(|n| !members.contains(&BigInt::from(*n)))
                .map(|n| {
                    let n_big = BigInt::from(n);
                    let mut verdict = Membership::NotMember;
                    for s in &incomplete {
                        match s.contains(&n_big, DEFAULT_SEARCH_CAP) {
                            m @ Membership::Member(_) => return (n, m),
                            m @ Membership::Unknown { .. } => verdict = m,
                            _ => {}
                        }
                    }
                    (n, verdict)
                })
                .collect();
            for (n, v) in extra {
                match v {
                    Membership::Member(_) => {
                        members.insert(BigInt::from(n));
                    }
                    Membership::Unknown { .. } => {
                        unknown.insert(BigInt::from(n));
                    }
                    Membership::NotMember => {}
                }
            }
        }
        for a in self.add.iter().filter(|a| **a >= lo && **a <= hi) {
            members.insert(a.clone());
            unknown.remove(a);
        }
        for r in &self.remove {
            members.remove(r);
            unknown.remove(r);
        }
        WindowResult { members: members.into_iter().collect(), unknown: unknown.into_iter().collect() }
    }

    /// max over the exponential-sum components of d + Σ r_i + #{r_i > 0}.
    pub fn complexity(&self) -> usize {
        self.exp_sums.iter().map(ExpSumSet::complexity).max().unwrap_or(0)
    }

    fn check_prime(&self, other: &Self) -> Result<(), SetError> {
        match (self.p(), other.p()) {
            (Some(a), Some(b)) if a != b => Err(SetError::PrimeMismatch(a, b)),
            _ => Ok(()),
        }
    }

    /// Concatenation; adjustment sets are re-resolved against both operands.
    pub fn union(&self, other: &Self) -> Result<Self, SetError> {
        self.check_prime(other)?;
        let mut out = SetDescriptor {
            progressions: self.progressions.iter().chain(&other.progressions).cloned().collect(),
            exp_sums: self.exp_sums.iter().chain(&other.exp_sums).cloned().collect(),
            add: BTreeSet::new(),
            remove: BTreeSet::new(),
            declared_type: self.declared_type.max(other.declared_type),
        };
        let touched: BTreeSet<BigInt> =
            self.add.iter().chain(&self.remove).chain(&other.add).chain(&other.remove).cloned().collect();
        for x in touched {
            let a = self.contains(&x);
            let b = other.contains(&x);
            if a.is_member() || b.is_member() {
                out.add.insert(x);
            } else if a == Membership::NotMember && b == Membership::NotMember {
                out.remove.insert(x);
            }
        }
        Ok(out)
    }

    /// Exact for progression-only operands; otherwise a lazy conjunction.
    pub fn intersect(&self, other: &Self) -> Result<Intersection, SetError> {
        self.check_prime(other)?;
        if !self.exp_sums.is_empty() || !other.exp_sums.is_empty() {
            return Ok(Intersection::WindowedOnly(WindowedIntersection { parts: vec![self.clone(), other.clone()] }));
        }
        let mut progressions: Vec<ArithProgression> = Vec::new();
        for a in &self.progressions {
            for b in &other.progressions {
                if let Some(c) = a.intersect(b) {
                    if !progressions.contains(&c) {
                        progressions.push(c);
                    }
                }
            }
        }
        let mut out = SetDescriptor { progressions, declared_type: 0, ..Self::empty() };
        let touched: BTreeSet<BigInt> =
            self.add.iter().chain(&self.remove).chain(&other.add).chain(&other.remove).cloned().collect();
        for x in touched {
            if self.contains(&x).is_member() && other.contains(&x).is_member() {
                out.add.insert(x);
            } else {
                out.remove.insert(x);
            }
        }
        Ok(Intersection::Exact(out))
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.progressions.iter().map(|a| a.to_string()).collect();
        parts.extend(self.exp_sums.iter().map(|s| s.to_string()));
        if !self.add.is_empty() {
            let a: Vec<String> = self.add.iter().map(|x| x.to_string()).collect();
            parts.push(format!("{{{}}}", a.join(", ")));
        }
        let mut s = if parts.is_empty() { "{}".to_string() } else { parts.join(" u ") };
        if !self.remove.is_empty() {
            let r: Vec<String> = self.remove.iter().map(|x| x.to_string()).collect();
            s = format!("({s}) \\ {{{}}}", r.join(", "));
        }
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WindowResult {
    pub members: Vec<BigInt>,
    /// Elements the capped search could neither confirm nor exclude.
    pub unknown: Vec<BigInt>,
}

/// A conjunction answered pointwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedIntersection {
    pub parts: Vec<SetDescriptor>,
}

impl WindowedIntersection {
    pub fn contains(&self, n: &BigInt) -> Membership {
        let mut result = None;
        for part in &self.parts {
            match part.contains(n) {
                Membership::NotMember => return Membership::NotMember,
                m @ Membership::Unknown { .. } => result = Some(m),
                m @ Membership::Member(_) => {
                    if result.is_none() {
                        result = Some(m);
                    }
                }
            }
        }
        result.unwrap_or(Membership::NotMember)
    }

    pub fn window(&self, n_max: u64) -> WindowResult {
        let windows: Vec<WindowResult> = self.parts.iter().map(|p| p.window(n_max)).collect();
        let sets: Vec<(BTreeSet<&BigInt>, BTreeSet<&BigInt>)> =
            windows.iter().map(|w| (w.members.iter().collect(), w.unknown.iter().collect())).collect();
        let mut out = WindowResult::default();
        for n in (0..=n_max).map(BigInt::from) {
            let all_member = sets.iter().all(|(m, _)| m.contains(&n));
            let possible = sets.iter().all(|(m, u)| m.contains(&n) || u.contains(&n));
            if all_member {
                out.members.push(n);
            } else if possible {
                out.unknown.push(n);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Exact(SetDescriptor),
    WindowedOnly(WindowedIntersection),
}

impl Intersection {
    pub fn contains(&self, n: &BigInt) -> Membership {
        match self {
            Intersection::Exact(d) => d.contains(n),
            Intersection::WindowedOnly(w) => w.contains(n),
        }
    }

    pub fn window(&self, n_max: u64) -> WindowResult {
        match self {
            Intersection::Exact(d) => d.window(n_max),
            Intersection::WindowedOnly(w) => w.window(n_max),
        }
    }
}

/// Symmetric difference of two windows.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct FiniteDifference {
    pub window: u64,
    pub count: usize,
    /// Up to 20 smallest elements of the difference.
    pub sample: Vec<BigInt>,
    /// Heuristic: no difference element in [N/2, N].
    pub stable: bool,
    /// Elements where either side was Unknown.
    pub undecided: usize,
}

pub fn equal_up_to_finite(a: &SetDescriptor, b: &SetDescriptor, n_max: u64) -> FiniteDifference {
    let wa = a.window(n_max);
    let wb = b.window(n_max);
    let sa: BTreeSet<&BigInt> = wa.members.iter().collect();
    let sb: BTreeSet<&BigInt> = wb.members.iter().collect();
    let undecided: BTreeSet<&BigInt> = wa.unknown.iter().chain(&wb.unknown).collect();
    let delta: Vec<BigInt> =
        sa.symmetric_difference(&sb).filter(|x| !undecided.contains(*x)).map(|x| (*x).clone()).collect();
    let half = BigInt::from(n_max / 2);
    FiniteDifference {
        window: n_max,
        count: delta.len(),
        sample: delta.iter().take(20).cloned().collect(),
        stable: delta.iter().all(|x| *x < half),
        undecided: undecided.len(),
    }
}

#[cfg(test)]
mod tests;
