//! Places of F_p(t), valuations, heights and Northcott enumeration.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use super::factor::{factor, is_irreducible, multiplicity, FpPoly};
use super::field::Fp;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::FuncFieldError;

pub type FpRat = RatFunc<Fp>;

/// Valuation of zero.
pub const VAL_INFINITY: i64 = i64::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Finite(FpPoly),
    Infinity,
}

impl Place {
    /// Checks that the polynomial is monic and irreducible.
    pub fn finite(pi: FpPoly) -> Result<Self, FuncFieldError> {
        if !pi.is_monic() || !is_irreducible(&pi) {
            return Err(FuncFieldError::NotIrreducible(pi.render("t")));
        }
        Ok(Place::Finite(pi))
    }

    pub fn degree(&self) -> u64 {
        match self {
            Place::Finite(pi) => pi.deg() as u64,
            Place::Infinity => 1,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(pi) => write!(f, "({})", pi.render("t")),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

/// v(x), or [`VAL_INFINITY`] for x = 0.
pub fn valuation(x: &FpRat, v: &Place) -> i64 {
    if x.is_zero() {
        return VAL_INFINITY;
    }
    match v {
        Place::Finite(pi) => multiplicity(x.num(), pi) as i64 - multiplicity(x.den(), pi) as i64,
        Place::Infinity => x.den().deg() as i64 - x.num().deg() as i64,
    }
}

/// All places where x has nonzero valuation, with the valuations. Infinity last.
pub fn support(x: &FpRat) -> Vec<(Place, i64)> {
    assert!(!x.is_zero(), "support of zero");
    let mut out: BTreeMap<Vec<u64>, (FpPoly, i64)> = BTreeMap::new();
    for (pi, e) in factor(x.num()).factors {
        out.insert(pi.coeffs().to_vec(), (pi, e as i64));
    }
    for (pi, e) in factor(x.den()).factors {
        out.insert(pi.coeffs().to_vec(), (pi, -(e as i64)));
    }
    let mut v: Vec<(Place, i64)> =
        out.into_values().map(|(pi, e)| (Place::Finite(pi), e)).collect();
    let inf = valuation(x, &Place::Infinity);
    if inf != 0 {
        v.push((Place::Infinity, inf));
    }
    v
}

/// Σ_v deg(v)·v(x) over all places; always 0 for nonzero x.
pub fn product_formula_check(x: &FpRat) -> i64 {
    support(x).iter().map(|(pl, e)| pl.degree() as i64 * e).sum()
}

/// A height in degree units (log base p of the multiplicative height).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HeightValue(pub BigUint);

impl HeightValue {
    pub fn from_u64(v: u64) -> Self {
        HeightValue(BigUint::from(v))
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.0.clone())
    }
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// h(x) = max(deg num, deg den); h(0) = 0.
pub fn height(x: &FpRat) -> HeightValue {
    if x.is_zero() {
        return HeightValue::from_u64(0);
    }
    HeightValue::from_u64(x.num().deg().max(x.den().deg()) as u64)
}

/// Σ_v deg(v)·(−min_i v(x_i)) over all places, ignoring zero coordinates.
pub fn height_projective(coords: &[FpRat]) -> Result<HeightValue, FuncFieldError> {
    let nonzero: Vec<&FpRat> = coords.iter().filter(|x| !x.is_zero()).collect();
    if nonzero.is_empty() {
        return Err(FuncFieldError::AllZeroTuple);
    }
    let mut places: Vec<Place> = Vec::new();
    for x in &nonzero {
        for (pl, _) in support(x) {
            if !places.contains(&pl) {
                places.push(pl);
            }
        }
    }
    if !places.contains(&Place::Infinity) {
        places.push(Place::Infinity);
    }
    let mut total: i64 = 0;
    for pl in &places {
        let m = nonzero.iter().map(|x| valuation(x, pl)).min().expect("nonempty");
        total += pl.degree() as i64 * (-m);
    }
    debug_assert!(total >= 0);
    Ok(HeightValue::from_u64(total as u64))
}

/// max{h(x+y), h(xy)} ≤ h(x) + h(y).
pub fn height_inequality_check(x: &FpRat, y: &FpRat) -> bool {
    let bound = height(x).0 + height(y).0;
    height(&x.add(y)).0 <= bound && height(&x.mul(y)).0 <= bound
}

/// Every x ∈ F_p(t) with h(x) ≤ a, ordered by (den, num) coefficient vectors.
pub fn northcott_enumerate(fp: Fp, a: usize) -> Vec<FpRat> {
    let all_polys = |max_deg: usize| -> Vec<FpPoly> {
        let p = fp.p();
        let total = (p as usize).pow(max_deg as u32 + 1);
        (0..total)
            .map(|mut code| {
                let mut c = Vec::with_capacity(max_deg + 1);
                for _ in 0..=max_deg {
                    c.push((code % p as usize) as u64);
                    code /= p as usize;
                }
                Poly::new(fp, c)
            })
            .collect()
    };
    let polys = all_polys(a);
    let mut out = Vec::new();
    for den in polys.iter().filter(|d| d.is_monic()) {
        for num in &polys {
            if num.gcd(den).is_one() {
                out.push(RatFunc::new(num.clone(), den.clone()).expect("monic den"));
            }
        }
    }
    out
}
