//! Endomorphisms of G_m^n over F_p(t) of the form
//! x_i ↦ c_i·∏_k (x_{j_k} + β_k)^{m_k}, with orbits kept in S-unit form.

mod json;
mod orbit;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::funcfield::field::prime_power;
use crate::funcfield::{height, FpPoly, FpRat, RatFunc};
use crate::linalg::IntMatrix;
use crate::sunit::{add_constant, AddConstantOptions, GeneratorBasis, SUnit, SUnitError, SUnitPoint};

pub use json::{BigIntStr, MapJson, ShiftJson, System, SystemFile, SYSTEM_SCHEMA};
pub use orbit::{
    orbit, preperiodicity_check, return_set, Certainty, Orbit, OrbitRecord, Preperiodicity, ReturnEntry,
    ReturnSetReport, ScanOptions,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TorusError {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("monomial part is not dominant (det A = 0)")]
    NotDominant,
    #[error("closed-form iteration needs a map without shifts")]
    ModeMismatch,
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("{q} is not a positive power of {p}")]
    NotAPower { q: BigInt, p: u64 },
    #[error("orbit failed at n = {index}: {source}")]
    Orbit { index: u64, source: SUnitError },
    #[error(transparent)]
    SUnit(#[from] SUnitError),
}

/// (x_source + shift)^exp
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub source: usize,
    pub shift: FpRat,
    pub exp: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapCoord {
    pub translation: SUnit,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedMonomialMap {
    basis: GeneratorBasis,
    coords: Vec<MapCoord>,
}

/// Height cap on shifts, matching the add_constant default.
pub const SHIFT_HEIGHT_CAP: u64 = 8;

impl ShiftedMonomialMap {
    pub fn new(basis: GeneratorBasis, coords: Vec<MapCoord>) -> Result<Self, TorusError> {
        let n = coords.len();
        let r = basis.len();
        let mut coords = coords;
        for (i, c) in coords.iter_mut().enumerate() {
            if c.translation.exps.len() > r {
                return Err(TorusError::InvalidMap(format!("translation {} longer than the basis", i + 1)));
            }
            c.translation = c.translation.padded(r);
            if c.translation.unit % basis.p() == 0 {
                return Err(TorusError::InvalidMap(format!("translation unit of coordinate {} is 0", i + 1)));
            }
            for f in &c.factors {
                if f.source >= n {
                    return Err(TorusError::InvalidMap(format!("factor source {} out of range", f.source + 1)));
                }
                if height(&f.shift).0 > SHIFT_HEIGHT_CAP.into() {
                    return Err(TorusError::InvalidMap(format!(
                        "shift {} exceeds the height cap",
                        f.shift.render("t")
                    )));
                }
            }
            // canonical order, with repeated (source, shift) pairs merged
            c.factors.sort_by_key(|f| (f.source, !f.shift.is_zero(), f.shift.render("t")));
            let mut merged: Vec<Factor> = Vec::new();
            for f in c.factors.drain(..) {
                match merged.last_mut() {
                    Some(last) if last.source == f.source && last.shift == f.shift => last.exp += f.exp,
                    _ => merged.push(f),
                }
            }
            merged.retain(|f| !f.exp.is_zero());
            c.factors = merged;
        }
        let map = ShiftedMonomialMap { basis, coords };
        if map.is_monomial_affine() && map.matrix().det().is_zero() {
            return Err(TorusError::NotDominant);
        }
        Ok(map)
    }

    /// c ⊙ x^A: coordinate i is c_i·∏_j x_j^{A_ij}.
    pub fn monomial(basis: GeneratorBasis, translation: &SUnitPoint, a: &IntMatrix) -> Result<Self, TorusError> {
        if !a.is_square() || a.rows() != translation.dim() {
            return Err(TorusError::InvalidMap("matrix and translation shapes differ".into()));
        }
        let fp = basis.fp();
        let coords = (0..a.rows())
            .map(|i| MapCoord {
                translation: translation.coords[i].clone(),
                factors: (0..a.cols())
                    .filter(|&j| !a.get(i, j).is_zero())
                    .map(|j| Factor { source: j, shift: RatFunc::zero(fp), exp: a.get(i, j).clone() })
                    .collect(),
            })
            .collect();
        Self::new(basis, coords)
    }

    pub fn identity(basis: GeneratorBasis, n: usize) -> Self {
        let r = basis.len();
        Self::monomial(basis, &SUnitPoint::identity(n, r), &IntMatrix::identity(n)).expect("identity")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn basis(&self) -> &GeneratorBasis {
        &self.basis
    }

    pub fn coords(&self) -> &[MapCoord] {
        &self.coords
    }

    pub fn is_monomial_affine(&self) -> bool {
        self.coords.iter().all(|c| c.factors.iter().all(|f| f.shift.is_zero()))
    }

    /// Exponents of the unshifted factors.
    pub fn matrix(&self) -> IntMatrix {
        let n = self.dim();
        let mut a = IntMatrix::zeros(n, n);
        for (i, c) in self.coords.iter().enumerate() {
            for f in c.factors.iter().filter(|f| f.shift.is_zero()) {
                let v = a.get(i, f.source) + &f.exp;
                a.set(i, f.source, v);
            }
        }
        a
    }

    pub fn translation(&self) -> SUnitPoint {
        SUnitPoint::new(self.coords.iter().map(|c| c.translation.clone()).collect())
    }

    /// Frob_q ∘ f: every exponent times q and the translation raised to q.
    /// Shifts stay as they are, since (x + β)^{qm} is already Frob_q of (x + β)^m.
    pub fn frobenius_twist(&self, q: &BigInt) -> Result<Self, TorusError> {
        match prime_power(q) {
            Some((p, e)) if p == self.basis.p() && e >= 1 => {}
            _ => return Err(TorusError::NotAPower { q: q.clone(), p: self.basis.p() }),
        }
        let fp = self.basis.fp();
        let coords = self
            .coords
            .iter()
            .map(|c| MapCoord {
                translation: c.translation.pow(q, fp),
                factors: c
                    .factors
                    .iter()
                    .map(|f| Factor { source: f.source, shift: f.shift.clone(), exp: &f.exp * q })
                    .collect(),
            })
            .collect();
        Ok(ShiftedMonomialMap { basis: self.basis.clone(), coords })
    }

    /// f × g on G_m^{a+b} over the merged basis.
    pub fn split_product(&self, other: &Self) -> Result<Self, TorusError> {
        if self.basis.p() != other.basis.p() {
            return Err(TorusError::PrimeMismatch(self.basis.p(), other.basis.p()));
        }
        let (basis, idx) = self.basis.merged(&other.basis)?;
        let r = basis.len();
        let a = self.dim();
        let mut coords: Vec<MapCoord> = self
            .coords
            .iter()
            .map(|c| MapCoord { translation: c.translation.padded(r), factors: c.factors.clone() })
            .collect();
        for c in &other.coords {
            let mut t = SUnit::one(r);
            t.unit = c.translation.unit;
            for (j, e) in c.translation.exps.iter().enumerate() {
                t.exps[idx[j]] += e;
            }
            coords.push(MapCoord {
                translation: t,
                factors: c
                    .factors
                    .iter()
                    .map(|f| Factor { source: f.source + a, shift: f.shift.clone(), exp: f.exp.clone() })
                    .collect(),
            });
        }
        Self::new(basis, coords)
    }
}

/// The image of a point under one application of the map.
#[derive(Clone, Debug)]
pub struct Applied {
    pub point: SUnitPoint,
    pub basis: GeneratorBasis,
    pub new_generators: Vec<FpPoly>,
}

/// f(x) for x over `basis`, which must extend the map's basis.
pub fn apply(
    map: &ShiftedMonomialMap,
    basis: &GeneratorBasis,
    point: &SUnitPoint,
    opts: &AddConstantOptions,
) -> Result<Applied, TorusError> {
    if point.dim() != map.dim() {
        return Err(TorusError::InvalidMap(format!("point of dimension {} for a map on G_m^{}", point.dim(), map.dim())));
    }
    if basis.generators()[..map.basis.len().min(basis.len())] != *map.basis.generators() {
        return Err(TorusError::InvalidMap("point basis does not extend the map basis".into()));
    }
    let fp = basis.fp();
    let mut basis = basis.clone();
    let mut new_generators = Vec::new();
    let mut shifted: Vec<((usize, FpRat), SUnit)> = Vec::new();
    let mut out = Vec::with_capacity(map.dim());
    for c in &map.coords {
        let mut acc = c.translation.padded(basis.len());
        for f in &c.factors {
            let base = if f.shift.is_zero() {
                point.coords[f.source].clone()
            } else {
                let key = (f.source, f.shift.clone());
                match shifted.iter().find(|(k, _)| *k == key) {
                    Some((_, v)) => v.clone(),
                    None => {
                        let src = point.coords[f.source].padded(basis.len());
                        let res = add_constant(&basis, &src, &f.shift, opts)?;
                        new_generators.extend(res.new_generators.iter().cloned());
                        basis = res.basis;
                        shifted.push((key, res.coord.clone()));
                        res.coord
                    }
                }
            };
            acc = acc.mul(&base.pow(&f.exp, fp), fp);
        }
        out.push(acc);
    }
    let r = basis.len();
    let point = SUnitPoint { coords: out.into_iter().map(|c| c.padded(r)).collect() };
    Ok(Applied { point, basis, new_generators })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterMode {
    ClosedForm,
    Step,
}

/// f^n(x). Closed form uses M^n for M = [[A, I], [0, I]], whose top-right
/// block is Σ_{k<n} A^k; units ride along as discrete logs mod p − 1.
pub fn iterate(
    map: &ShiftedMonomialMap,
    basis: &GeneratorBasis,
    point: &SUnitPoint,
    n: u64,
    mode: IterMode,
    opts: &AddConstantOptions,
) -> Result<(SUnitPoint, GeneratorBasis), TorusError> {
    match mode {
        IterMode::Step => {
            let mut basis = basis.clone();
            let mut x = point.padded(basis.len());
            for i in 0..n {
                let step = apply(map, &basis, &x, opts).map_err(|e| match e {
                    TorusError::SUnit(source) => TorusError::Orbit { index: i + 1, source },
                    other => other,
                })?;
                basis = step.basis;
                x = step.point;
            }
            Ok((x, basis))
        }
        IterMode::ClosedForm => {
            if !map.is_monomial_affine() {
                return Err(TorusError::ModeMismatch);
            }
            Ok((closed_form(map, basis, point, n), basis.clone()))
        }
    }
}

fn closed_form(map: &ShiftedMonomialMap, basis: &GeneratorBasis, point: &SUnitPoint, n: u64) -> SUnitPoint {
    let fp = basis.fp();
    let dim = map.dim();
    let r = basis.len();
    let a = map.matrix();
    let id = IntMatrix::identity(dim);
    let m = IntMatrix::block(&a, &id, &IntMatrix::zeros(dim, dim), &id).pow(n);
    let an = m.submatrix(0, 0, dim, dim);
    let sn = m.submatrix(0, dim, dim, dim);
    let g = fp.primitive_root();
    let order = BigInt::from(fp.p() - 1);
    let lift = |x: &SUnitPoint| -> IntMatrix {
        IntMatrix::from_rows(
            x.padded(r)
                .coords
                .iter()
                .map(|c| {
                    let mut row = c.exps.clone();
                    row.push(BigInt::from(fp.discrete_log(g, c.unit)));
                    row
                })
                .collect(),
        )
    };
    let e = an.mul(&lift(point)).add(&sn.mul(&lift(&map.translation())));
    let coords = (0..dim)
        .map(|i| {
            let row = e.row(i);
            let log = (&row[r] % &order + &order) % &order;
            SUnit { unit: fp.pow(g, log.to_u64().expect("small")), exps: row[..r].to_vec() }
        })
        .collect();
    SUnitPoint { coords }
}

#[cfg(test)]
mod tests;
