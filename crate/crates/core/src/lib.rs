//! Exact-arithmetic workbench for orbits of torus endomorphisms over F_p(t):
//! S-unit orbit representations, return sets and their set grammar,
//! dynamical degrees of monomial maps, and height-growth checks.

pub mod experiments;
pub mod funcfield;
pub mod linalg;
pub mod setalg;
pub mod spectral;
pub mod sunit;
pub mod torusdyn;
