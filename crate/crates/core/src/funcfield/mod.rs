//! Exact arithmetic over F_p, F_p[t] and F_p(t): places, valuations,
//! heights, Northcott enumeration, factorization, and the z-over-Q(y)
//! tower used for coefficient comparisons.

pub mod factor;
pub mod field;
pub mod parse;
pub mod places;
pub mod poly;
pub mod polyz;
pub mod ratfunc;

pub use factor::{factor, is_irreducible, random_irreducible, random_irreducible_seeded, Factorization, FpPoly};
pub use field::{Field, Fp, Rationals};
pub use parse::{parse_poly, parse_ratfunc};
pub use places::{
    height, height_inequality_check, height_projective, northcott_enumerate, product_formula_check,
    valuation, FpRat, HeightValue, Place, VAL_INFINITY,
};
pub use poly::Poly;
pub use polyz::{PolyZ, ZExpr, ZTower};
pub use ratfunc::RatFunc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FuncFieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("all-zero coordinate tuple")]
    AllZeroTuple,
    #[error("{0} is not a monic irreducible polynomial")]
    NotIrreducible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degree {needed} exceeds the cap {cap}")]
    DegreeCapExceeded { needed: u64, cap: u64 },
}
