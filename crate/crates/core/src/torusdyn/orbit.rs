use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::funcfield::HeightValue;
use crate::sunit::{
    coordinate_height, draw_moduli, membership_auto, membership_with_moduli, AddConstantOptions, GeneratorBasis,
    LaurentEquation, MembershipVerdict, OracleParams, SUnit, SUnitPoint,
};

use super::{apply, iterate, IterMode, ShiftedMonomialMap, TorusError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub n: u64,
    pub point: SUnitPoint,
    pub heights: Vec<HeightValue>,
    /// Length of the basis prefix the point is written over.
    pub basis_len: usize,
}

#[derive(Clone, Debug)]
pub struct Orbit {
    pub basis: GeneratorBasis,
    pub records: Vec<OrbitRecord>,
    /// (step, generator) for every basis extension, in order.
    pub extensions: Vec<(u64, String)>,
}

impl Orbit {
    pub fn point(&self, n: usize) -> SUnitPoint {
        self.records[n].point.padded(self.basis.len())
    }
}

fn record(basis: &GeneratorBasis, n: u64, point: SUnitPoint) -> OrbitRecord {
    let heights = point.coords.iter().map(|c| coordinate_height(basis, c)).collect();
    OrbitRecord { n, point, heights, basis_len: basis.len() }
}

/// f^0(x), …, f^N(x) by repeated application.
pub fn orbit(
    map: &ShiftedMonomialMap,
    start: &SUnitPoint,
    n_max: u64,
    opts: &AddConstantOptions,
) -> Result<Orbit, TorusError> {
    let mut basis = map.basis().clone();
    let mut x = start.padded(basis.len());
    let mut records = vec![record(&basis, 0, x.clone())];
    let mut extensions = Vec::new();
    for n in 1..=n_max {
        let step = apply(map, &basis, &x, opts).map_err(|e| match e {
            TorusError::SUnit(source) => TorusError::Orbit { index: n, source },
            other => other,
        })?;
        for g in &step.new_generators {
            log::info!("orbit step {n}: basis extended by {}", g.render("t"));
            extensions.push((n, g.render("t")));
        }
        basis = step.basis;
        x = step.point;
        records.push(record(&basis, n, x.clone()));
    }
    Ok(Orbit { basis, records, extensions })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certainty {
    Certain,
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnEntry {
    pub n: u64,
    pub member: bool,
    pub certainty: Certainty,
    /// log2 of the error bound; absent for certain entries and exact zeros.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error_bound_log2: Option<f64>,
    /// Index of the equation that failed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equation: Option<usize>,
    /// The residue-field modulus certifying non-membership, or "exact".
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnSetReport {
    pub p: u64,
    pub window: u64,
    pub generators: Vec<String>,
    pub equations: Vec<String>,
    pub oracle: OracleParams,
    /// Moduli shared by every probabilistic entry.
    pub moduli: Vec<String>,
    pub extensions: Vec<(u64, String)>,
    pub entries: Vec<ReturnEntry>,
}

impl ReturnSetReport {
    pub fn members(&self) -> Vec<u64> {
        self.entries.iter().filter(|e| e.member).map(|e| e.n).collect()
    }

    /// Largest error bound over probabilistic members (None when there are none
    /// or all bounds are exactly zero).
    pub fn worst_error_bound_log2(&self) -> Option<f64> {
        self.entries.iter().filter_map(|e| e.error_bound_log2).reduce(f64::max)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    pub oracle: OracleParams,
    pub add: AddConstantOptions,
    /// Decide two-term equations exactly instead of by the oracle.
    pub exact_binomial: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { oracle: OracleParams::default(), add: AddConstantOptions::default(), exact_binomial: true }
    }
}

fn entry(n: u64, v: MembershipVerdict) -> ReturnEntry {
    match v {
        MembershipVerdict::Member => ReturnEntry {
            n,
            member: true,
            certainty: Certainty::Certain,
            error_bound_log2: None,
            equation: None,
            witness: Some("exact".into()),
        },
        MembershipVerdict::ProbablyMember { error_bound_log2, .. } => ReturnEntry {
            n,
            member: true,
            certainty: Certainty::Probabilistic,
            error_bound_log2,
            equation: None,
            witness: None,
        },
        MembershipVerdict::NotMember { equation, modulus, .. } => ReturnEntry {
            n,
            member: false,
            certainty: Certainty::Certain,
            error_bound_log2: None,
            equation: Some(equation),
            witness: Some(modulus.map_or("exact".into(), |m| m.render("t"))),
        },
    }
}

/// Membership of f^n(start) for every n in [0, N].
pub fn return_set(
    map: &ShiftedMonomialMap,
    start: &SUnitPoint,
    equations: &[LaurentEquation],
    n_max: u64,
    opts: &ScanOptions,
) -> Result<ReturnSetReport, TorusError> {
    let (basis, points, extensions): (GeneratorBasis, Vec<SUnitPoint>, Vec<(u64, String)>) =
        if map.is_monomial_affine() {
            let basis = map.basis().clone();
            let start = start.padded(basis.len());
            let pts = (0..=n_max)
                .into_par_iter()
                .map(|n| iterate(map, &basis, &start, n, IterMode::ClosedForm, &opts.add).map(|(x, _)| x))
                .collect::<Result<Vec<_>, _>>()?;
            (basis, pts, vec![])
        } else {
            let orb = orbit(map, start, n_max, &opts.add)?;
            let pts = (0..orb.records.len()).map(|i| orb.point(i)).collect();
            (orb.basis, pts, orb.extensions)
        };
    let moduli = draw_moduli(&basis, equations, &opts.oracle)?;
    let entries = points
        .par_iter()
        .enumerate()
        .map(|(n, x)| {
            let v = if opts.exact_binomial {
                membership_auto(&basis, x, equations, &moduli)
            } else {
                membership_with_moduli(&basis, x, equations, &moduli)
            };
            v.map(|v| entry(n as u64, v)).map_err(|source| TorusError::Orbit { index: n as u64, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReturnSetReport {
        p: basis.p(),
        window: n_max,
        generators: basis.generators().iter().map(|g| g.render("t")).collect(),
        equations: equations.iter().map(LaurentEquation::render).collect(),
        oracle: opts.oracle,
        moduli: moduli.iter().map(|m| m.modulus.render("t")).collect(),
        extensions,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preperiodicity {
    /// f^{tail + period}(x) = f^{tail}(x) with both minimal.
    Preperiodic { tail: u64, period: u64 },
    NoRepeatWithin(u64),
}

fn canonical(point: &SUnitPoint) -> Vec<(u64, Vec<BigInt>)> {
    point
        .coords
        .iter()
        .map(|c: &SUnit| {
            let mut e = c.exps.clone();
            while e.last().is_some_and(Zero::is_zero) {
                e.pop();
            }
            (c.unit, e)
        })
        .collect()
}

/// Looks for an exact repetition among f^0(x), …, f^bound(x).
pub fn preperiodicity_check(
    map: &ShiftedMonomialMap,
    start: &SUnitPoint,
    bound: u64,
    opts: &AddConstantOptions,
) -> Result<Preperiodicity, TorusError> {
    let mut seen: HashMap<Vec<(u64, Vec<BigInt>)>, u64> = HashMap::new();
    let mut basis = map.basis().clone();
    let mut x = start.padded(basis.len());
    for n in 0..=bound {
        if let Some(&first) = seen.get(&canonical(&x)) {
            return Ok(Preperiodicity::Preperiodic { tail: first, period: n - first });
        }
        seen.insert(canonical(&x), n);
        if n < bound {
            let step = apply(map, &basis, &x, opts)?;
            basis = step.basis;
            x = step.point;
        }
    }
    Ok(Preperiodicity::NoRepeatWithin(bound))
}
