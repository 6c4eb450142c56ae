//! Points of G_m^n whose coordinates are ζ·∏ g_j^{e_j} for a fixed list of
//! monic irreducible generators g_j, with exact heights and a probabilistic
//! membership oracle that works in random residue fields F_p[t]/(m).

mod equation;
mod json;
mod oracle;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::funcfield::{factor, is_irreducible, Field, Fp, FpPoly, FpRat, FuncFieldError, HeightValue, Poly, RatFunc};

pub use equation::{LaurentEquation, LaurentPoly};
pub use json::{BasisDocument, PointJson};
pub use oracle::{
    decide_binomial, descend_equation, draw_moduli, error_bound_log2, membership_auto, membership_test,
    membership_with_moduli, DescendedEquation, MembershipVerdict, ModContext, OracleParams,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SUnitError {
    #[error("invalid generator basis: {0}")]
    InvalidBasis(String),
    #[error("modulus {0} is a bad place of the basis")]
    BadModulus(String),
    #[error("degree {needed} exceeds the cap {cap}")]
    DegreeCapExceeded { needed: BigInt, cap: u64 },
    #[error("not representable: {0}")]
    NotRepresentable(String),
    #[error("bad oracle parameters: p^d/d = {p}^{d}/{d} does not exceed the degree bound {d_max}")]
    BadParameters { p: u64, d: usize, d_max: BigInt },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    FuncField(#[from] FuncFieldError),
}

/// Distinct monic irreducible polynomials g_1..g_r over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorBasis {
    fp: Fp,
    generators: Vec<FpPoly>,
}

impl GeneratorBasis {
    pub fn new(fp: Fp, generators: Vec<FpPoly>) -> Result<Self, SUnitError> {
        for (i, g) in generators.iter().enumerate() {
            if !g.is_monic() || !is_irreducible(g) {
                return Err(SUnitError::InvalidBasis(format!(
                    "{} is not monic irreducible",
                    g.render("t")
                )));
            }
            if generators[..i].contains(g) {
                return Err(SUnitError::InvalidBasis(format!("{} repeated", g.render("t"))));
            }
        }
        Ok(GeneratorBasis { fp, generators })
    }

    pub fn parse(fp: Fp, gens: &[&str]) -> Result<Self, SUnitError> {
        let polys = gens
            .iter()
            .map(|s| crate::funcfield::parse_poly(&fp, s, "t"))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(fp, polys)
    }

    pub fn fp(&self) -> Fp {
        self.fp
    }

    pub fn p(&self) -> u64 {
        self.fp.p()
    }

    pub fn generators(&self) -> &[FpPoly] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, g: &FpPoly) -> Option<usize> {
        self.generators.iter().position(|h| h == g)
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.generators.iter().map(|g| g.deg() as u64).collect()
    }

    /// A new basis with `extra` appended (already-present entries are skipped).
    pub fn extended(&self, extra: &[FpPoly]) -> Result<Self, SUnitError> {
        let mut gens = self.generators.clone();
        for g in extra {
            if !gens.contains(g) {
                gens.push(g.clone());
            }
        }
        Self::new(self.fp, gens)
    }

    /// Merges two bases over the same prime; returns the merged basis and the
    /// index map of `other` into it.
    pub fn merged(&self, other: &Self) -> Result<(Self, Vec<usize>), SUnitError> {
        if self.fp != other.fp {
            return Err(SUnitError::InvalidBasis(format!(
                "prime mismatch {} vs {}",
                self.p(),
                other.p()
            )));
        }
        let merged = self.extended(&other.generators)?;
        let map = other.generators.iter().map(|g| merged.index_of(g).expect("merged")).collect();
        Ok((merged, map))
    }

    /// True when `m` is one of the generators (the only bad finite places).
    pub fn is_bad_modulus(&self, m: &FpPoly) -> bool {
        self.generators.iter().any(|g| g == m)
    }
}

/// One coordinate ζ·∏ g_j^{e_j}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SUnit {
    pub unit: u64,
    pub exps: Vec<BigInt>,
}

impl SUnit {
    pub fn one(r: usize) -> Self {
        SUnit { unit: 1, exps: vec![BigInt::zero(); r] }
    }

    pub fn generator(r: usize, j: usize, e: BigInt) -> Self {
        let mut s = Self::one(r);
        s.exps[j] = e;
        s
    }

    pub fn padded(&self, r: usize) -> Self {
        let mut s = self.clone();
        s.exps.resize(r, BigInt::zero());
        s
    }

    pub fn mul(&self, other: &Self, fp: Fp) -> Self {
        let r = self.exps.len().max(other.exps.len());
        let a = self.padded(r);
        let b = other.padded(r);
        SUnit {
            unit: fp.mul(&a.unit, &b.unit),
            exps: a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn inv(&self, fp: Fp) -> Self {
        SUnit { unit: fp.inv(&self.unit).expect("unit"), exps: self.exps.iter().map(|e| -e).collect() }
    }

    pub fn pow(&self, k: &BigInt, fp: Fp) -> Self {
        let order = BigInt::from(fp.p() - 1);
        let e = k.mod_floor(&order).to_u64().expect("small");
        SUnit { unit: fp.pow(self.unit, e), exps: self.exps.iter().map(|x| x * k).collect() }
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(Zero::is_zero)
    }

    /// (positive degree, negative degree): degrees of the numerator and denominator.
    pub fn degree_parts(&self, degs: &[u64]) -> (BigInt, BigInt) {
        let mut pos = BigInt::zero();
        let mut neg = BigInt::zero();
        for (e, &d) in self.exps.iter().zip(degs) {
            if e.is_positive() {
                pos += e * d;
            } else if e.is_negative() {
                neg -= e * d;
            }
        }
        (pos, neg)
    }
}

/// A point of G_m^n in S-unit form; all coordinates share one basis length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SUnitPoint {
    pub coords: Vec<SUnit>,
}

impl SUnitPoint {
    pub fn new(coords: Vec<SUnit>) -> Self {
        let r = coords.iter().map(|c| c.exps.len()).max().unwrap_or(0);
        SUnitPoint { coords: coords.into_iter().map(|c| c.padded(r)).collect() }
    }

    pub fn identity(n: usize, r: usize) -> Self {
        SUnitPoint { coords: vec![SUnit::one(r); n] }
    }

    pub fn from_parts(units: Vec<u64>, exps: Vec<Vec<BigInt>>) -> Self {
        Self::new(units.into_iter().zip(exps).map(|(unit, exps)| SUnit { unit, exps }).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn padded(&self, r: usize) -> Self {
        SUnitPoint { coords: self.coords.iter().map(|c| c.padded(r)).collect() }
    }

    /// Coordinatewise product.
    pub fn mul(&self, other: &Self, fp: Fp) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        SUnitPoint::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a.mul(b, fp)).collect())
    }

    pub fn inv(&self, fp: Fp) -> Self {
        SUnitPoint { coords: self.coords.iter().map(|c| c.inv(fp)).collect() }
    }

    pub fn pow(&self, k: &BigInt, fp: Fp) -> Self {
        SUnitPoint { coords: self.coords.iter().map(|c| c.pow(k, fp)).collect() }
    }

    /// Concatenation (a point of G_m^{a+b}); `map` sends the second point's
    /// generator indices into a merged basis of size `r`.
    pub fn concat(&self, other: &Self, map: &[usize], r: usize) -> Self {
        let mut coords: Vec<SUnit> = self.coords.iter().map(|c| c.padded(r)).collect();
        for c in &other.coords {
            let mut s = SUnit::one(r);
            s.unit = c.unit;
            for (j, e) in c.exps.iter().enumerate() {
                s.exps[map[j]] += e;
            }
            coords.push(s);
        }
        SUnitPoint { coords }
    }
}

fn check_basis_len(basis: &GeneratorBasis, c: &SUnit) -> Result<(), SUnitError> {
    if c.exps.len() > basis.len() {
        return Err(SUnitError::DimensionMismatch(format!(
            "exponent vector of length {} over a basis of {} generators",
            c.exps.len(),
            basis.len()
        )));
    }
    Ok(())
}

/// Exact rational function of one coordinate.
pub fn coordinate_value(basis: &GeneratorBasis, c: &SUnit, degree_cap: u64) -> Result<FpRat, SUnitError> {
    check_basis_len(basis, c)?;
    let degs = basis.degrees();
    let (pos, neg) = c.degree_parts(&degs);
    let total = &pos + &neg;
    if total > BigInt::from(degree_cap) {
        return Err(SUnitError::DegreeCapExceeded { needed: total, cap: degree_cap });
    }
    let fp = basis.fp();
    let mut num = Poly::constant(fp, c.unit);
    let mut den = Poly::one(fp);
    for (e, g) in c.exps.iter().zip(basis.generators()) {
        let k = e.abs().to_u64().expect("bounded by cap");
        if e.is_positive() {
            num = num.mul_ref(&g.pow(k));
        } else if e.is_negative() {
            den = den.mul_ref(&g.pow(k));
        }
    }
    Ok(RatFunc::new(num, den)?)
}

/// Exact values of all coordinates.
pub fn exact_value(basis: &GeneratorBasis, point: &SUnitPoint, degree_cap: u64) -> Result<Vec<FpRat>, SUnitError> {
    point.coords.iter().map(|c| coordinate_value(basis, c, degree_cap)).collect()
}

/// Writes a nonzero rational function in the basis, if all of its
/// irreducible factors are generators.
pub fn represent(basis: &GeneratorBasis, x: &FpRat) -> Result<SUnit, Vec<FpPoly>> {
    assert!(!x.is_zero(), "zero is not a unit");
    let mut out = SUnit::one(basis.len());
    out.unit = x.num().lc();
    let mut missing = Vec::new();
    for (poly, sign) in [(x.num(), 1i64), (x.den(), -1i64)] {
        if poly.is_constant() {
            continue;
        }
        for (g, e) in factor(poly).factors {
            match basis.index_of(&g) {
                Some(j) => out.exps[j] += BigInt::from(sign * e as i64),
                None => missing.push(g),
            }
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(missing)
    }
}

/// Height model for points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeightModel {
    /// Σ_i h(x_i)
    PerCoordinateSum,
    /// h([1 : x_1 : … : x_n])
    Projective,
}

/// h(x_i) from exponents alone: max(numerator degree, denominator degree).
pub fn coordinate_height(basis: &GeneratorBasis, c: &SUnit) -> HeightValue {
    let (pos, neg) = c.degree_parts(&basis.degrees());
    HeightValue(pos.max(neg).to_biguint().expect("nonnegative"))
}

pub fn height_of(basis: &GeneratorBasis, point: &SUnitPoint, model: HeightModel) -> HeightValue {
    match model {
        HeightModel::PerCoordinateSum => {
            let total: BigUint = point.coords.iter().map(|c| coordinate_height(basis, c).0).sum();
            HeightValue(total)
        }
        HeightModel::Projective => {
            let degs = basis.degrees();
            let mut total = BigInt::zero();
            // finite places: the generators
            for (j, &d) in degs.iter().enumerate() {
                let worst = point
                    .coords
                    .iter()
                    .map(|c| -c.exps.get(j).cloned().unwrap_or_default())
                    .max()
                    .unwrap_or_default();
                if worst.is_positive() {
                    total += worst * d;
                }
            }
            // infinity: v_∞(x_i) = −Σ_j e_ij deg g_j
            let worst_inf = point
                .coords
                .iter()
                .map(|c| c.exps.iter().zip(&degs).map(|(e, &d)| e * d).sum::<BigInt>())
                .max()
                .unwrap_or_default();
            if worst_inf.is_positive() {
                total += worst_inf;
            }
            HeightValue(total.to_biguint().expect("nonnegative"))
        }
    }
}

/// Policy for irreducible factors that are not yet generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisExtension {
    Allowed,
    Forbidden,
}

#[derive(Clone, Copy, Debug)]
pub struct AddConstantOptions {
    pub extension: BasisExtension,
    /// Cap on the degree of the descended value u + β^{1/p^k}.
    pub degree_cap: u64,
    /// Cap on h(β).
    pub beta_height_cap: u64,
}

impl Default for AddConstantOptions {
    fn default() -> Self {
        AddConstantOptions { extension: BasisExtension::Allowed, degree_cap: 4096, beta_height_cap: 8 }
    }
}

/// v_p(e), stopping early once `limit` is reached.
pub fn p_adic_valuation(e: &BigInt, p: u64, limit: u32) -> u32 {
    if e.is_zero() {
        return limit;
    }
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut cur = e.clone();
    while k < limit {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        cur = q;
        k += 1;
    }
    k
}

/// Largest s ≤ cap with x ∈ F_p(t^{p^s}); cap for constants.
pub fn root_depth(x: &FpRat, cap: u32) -> u32 {
    let p = x.field().p() as usize;
    x.num().deflation_depth(p, cap).min(x.den().deflation_depth(p, cap))
}

/// The p^k-th root of x ∈ F_p(t^{p^k}) (coefficients are fixed by Frobenius).
pub fn frobenius_root(x: &FpRat, k: u32) -> FpRat {
    if k == 0 || x.is_constant() {
        return x.clone();
    }
    let step = (x.field().p() as usize).pow(k);
    let n = x.num().deflate(step).expect("root depth checked");
    let d = x.den().deflate(step).expect("root depth checked");
    RatFunc::new(n, d).expect("nonzero den")
}

/// Result of adding a constant to a coordinate.
#[derive(Clone, Debug)]
pub struct AddConstantOutcome {
    pub coord: SUnit,
    /// The basis after any extension (equal to the input basis otherwise).
    pub basis: GeneratorBasis,
    pub new_generators: Vec<FpPoly>,
    /// Descent depth k used.
    pub descent: u32,
}

/// Represents c + β by Frobenius descent: with p^k dividing every exponent of
/// c and β ∈ F_p(t^{p^k}), c + β = (c^{1/p^k} + β^{1/p^k})^{p^k}.
pub fn add_constant(
    basis: &GeneratorBasis,
    c: &SUnit,
    beta: &FpRat,
    opts: &AddConstantOptions,
) -> Result<AddConstantOutcome, SUnitError> {
    check_basis_len(basis, c)?;
    let fp = basis.fp();
    let p = fp.p();
    let c = c.padded(basis.len());
    if beta.is_zero() {
        return Ok(AddConstantOutcome { coord: c, basis: basis.clone(), new_generators: vec![], descent: 0 });
    }
    let hb = crate::funcfield::height(beta).0;
    if hb > BigUint::from(opts.beta_height_cap) {
        return Err(SUnitError::NotRepresentable(format!(
            "shift {} exceeds the height cap {}",
            beta.render("t"),
            opts.beta_height_cap
        )));
    }
    const DEPTH_CAP: u32 = 4096;
    let mut k = DEPTH_CAP;
    for e in c.exps.iter().filter(|e| !e.is_zero()) {
        k = k.min(p_adic_valuation(e, p, k));
    }
    if k == DEPTH_CAP {
        k = 0; // constant coordinate: nothing to descend
    }
    k = k.min(root_depth(beta, DEPTH_CAP));
    let scale = num_traits::pow(BigInt::from(p), k as usize);
    let root = SUnit { unit: c.unit, exps: c.exps.iter().map(|e| e / &scale).collect() };
    let u = coordinate_value(basis, &root, opts.degree_cap)?;
    let w = u.add(&frobenius_root(beta, k));
    if w.is_zero() {
        return Err(SUnitError::NotRepresentable("the sum is zero".into()));
    }
    let (rep, new_basis, new_generators) = match represent(basis, &w) {
        Ok(rep) => (rep, basis.clone(), vec![]),
        Err(missing) => {
            if opts.extension == BasisExtension::Forbidden {
                let names: Vec<String> = missing.iter().map(|g| g.render("t")).collect();
                return Err(SUnitError::NotRepresentable(format!(
                    "new irreducible factors {}",
                    names.join(", ")
                )));
            }
            let nb = basis.extended(&missing)?;
            let rep = represent(&nb, &w).expect("all factors present after extension");
            (rep, nb, missing)
        }
    };
    let coord = SUnit { unit: rep.unit, exps: rep.exps.iter().map(|e| e * &scale).collect() };
    Ok(AddConstantOutcome { coord, basis: new_basis, new_generators, descent: k })
}

/// ζ·∏ ḡ_j^{e_j mod (p^d−1)} in F_p[t]/(m).
pub fn eval_coord_mod(ctx: &ModContext, c: &SUnit) -> FpPoly {
    let fp = ctx.modulus.field();
    let mut acc = Poly::constant(*fp, c.unit);
    for (e, g) in c.exps.iter().zip(&ctx.gens) {
        if e.is_zero() {
            continue;
        }
        let r = e.mod_floor(&ctx.group_order);
        let (_, mag) = r.into_parts();
        acc = acc.mul_mod(&g.pow_mod(&mag, &ctx.modulus), &ctx.modulus);
    }
    acc
}

/// The image of a point in F_{p^d}^n, d = deg m.
pub fn eval_mod(basis: &GeneratorBasis, point: &SUnitPoint, m: &FpPoly) -> Result<Vec<FpPoly>, SUnitError> {
    let ctx = ModContext::new(basis, m.clone())?;
    Ok(point.coords.iter().map(|c| eval_coord_mod(&ctx, c)).collect())
}

pub(crate) fn bigint_sign_str(e: &BigInt) -> String {
    match e.sign() {
        Sign::Minus => format!("-{}", e.magnitude()),
        _ => e.magnitude().to_string(),
    }
}

#[cfg(test)]
mod tests;
