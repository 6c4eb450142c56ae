//! Brute-force descriptor search: one progression, or one exponential-sum set
//! with integer coefficients, whose window matches the observation exactly.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::{ArithProgression, ExpSumSet, SetDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FitLimits {
    /// q ranges over p^1..p^max_q_exp.
    pub max_q_exp: u32,
    pub max_d: usize,
    pub max_r: usize,
    /// Integer coefficients in [−bound, bound].
    pub coeff_bound: i64,
}

impl Default for FitLimits {
    fn default() -> Self {
        FitLimits { max_q_exp: 2, max_d: 2, max_r: 1, coeff_bound: 2 }
    }
}

/// Rows of length ≤ max_r + 1 with a nonzero last entry.
fn rows(limits: &FitLimits) -> Vec<Vec<i64>> {
    let b = limits.coeff_bound;
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..=limits.max_r {
        let mut next = Vec::new();
        for prefix in &out {
            for c in -b..=b {
                let mut row = prefix.clone();
                row.push(c);
                if c != 0 {
                    all.push(row.clone());
                }
                next.push(row);
            }
        }
        out = next;
    }
    all.sort();
    all
}

/// Multisets of `d` rows, as sorted index tuples.
fn row_tuples(n: usize, d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for tail in row_tuples(n, d - 1) {
        let start = tail.last().copied().unwrap_or(0);
        for i in start..n {
            let mut t = tail.clone();
            t.push(i);
            out.push(t);
        }
    }
    out
}

/// Candidates ranked by complexity, then coefficient size, then q.
pub fn fit_descriptor(observed: &BTreeSet<u64>, p: u64, n_max: u64, limits: &FitLimits) -> Vec<SetDescriptor> {
    let target: BTreeSet<BigInt> = observed.iter().filter(|&&x| x <= n_max).map(|&x| BigInt::from(x)).collect();
    let mut found: Vec<SetDescriptor> = Vec::new();
    let obs: Vec<&BigInt> = target.iter().collect();
    match obs.as_slice() {
        [] => found.push(SetDescriptor::empty()),
        [x] => found.push(SetDescriptor::progression(ArithProgression::new(0, (*x).clone()))),
        [a, b, ..] => {
            let ap = ArithProgression::new(*b - *a, (*a).clone());
            let members: BTreeSet<BigInt> = ap.members_in(&BigInt::from(0), &BigInt::from(n_max)).into_iter().collect();
            if members == target {
                found.push(SetDescriptor::progression(ap));
            }
        }
    }
    let row_set = rows(limits);
    let zero = BigInt::from(0);
    let hi = BigInt::from(n_max);
    let mut candidates: Vec<(u64, i64, Vec<usize>)> = Vec::new();
    for e in 1..=limits.max_q_exp {
        let q = p.pow(e);
        for d in 1..=limits.max_d {
            for tuple in row_tuples(row_set.len(), d) {
                for c0 in -limits.coeff_bound..=limits.coeff_bound {
                    candidates.push((q, c0, tuple.clone()));
                }
            }
        }
    }
    let mut matches: Vec<ExpSumSet> = candidates
        .par_iter()
        .filter_map(|(q, c0, tuple)| {
            let coeffs: Vec<Vec<i64>> = tuple.iter().map(|&i| row_set[i].clone()).collect();
            let s = ExpSumSet::from_ints(*q, *c0, &coeffs).ok()?;
            let members = s.members_in(&zero, &hi)?;
            (members == target).then_some(s)
        })
        .collect();
    matches.sort_by(|a, b| {
        (a.complexity(), a.coefficient_size(), a.q(), a.to_string())
            .cmp(&(b.complexity(), b.coefficient_size(), b.q(), b.to_string()))
    });
    found.extend(matches.into_iter().map(SetDescriptor::exp_sum));
    found
}
