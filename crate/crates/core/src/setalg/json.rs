//! `{"type":2,"progressions":[{"m":3,"l":1}],"expSums":[{"q":25,"d":2,"r":1,"c0":"0","c":[["1","2"],["1","0"]]}],"add":[],"remove":[]}`

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Ambient, ArithProgression, ExpSumSet, SetDescriptor, SetError};
use crate::torusdyn::BigIntStr;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionJson {
    pub m: BigIntStr,
    pub l: BigIntStr,
    #[serde(default = "ambient_n", skip_serializing_if = "is_n")]
    pub ambient: Ambient,
}

fn ambient_n() -> Ambient {
    Ambient::N
}

fn is_n(a: &Ambient) -> bool {
    *a == Ambient::N
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpSumJson {
    pub q: u64,
    pub d: usize,
    pub r: usize,
    pub c0: String,
    /// d rows of r + 1 rationals.
    pub c: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorJson {
    #[serde(rename = "type")]
    pub declared_type: u8,
    #[serde(default)]
    pub progressions: Vec<ProgressionJson>,
    #[serde(rename = "expSums", default)]
    pub exp_sums: Vec<ExpSumJson>,
    #[serde(default)]
    pub add: Vec<BigIntStr>,
    #[serde(default)]
    pub remove: Vec<BigIntStr>,
}

fn parse_rational(s: &str) -> Result<BigRational, SetError> {
    let bad = |_| SetError::Invalid(format!("bad rational \"{s}\""));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(bad)?;
            let d: BigInt = d.trim().parse().map_err(bad)?;
            if d.is_zero() {
                return Err(SetError::Invalid(format!("zero denominator in \"{s}\"")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(bad)?)),
    }
}

impl ExpSumJson {
    pub fn from_set(s: &ExpSumSet) -> Self {
        let r = s.r().into_iter().max().unwrap_or(0);
        ExpSumJson {
            q: s.q(),
            d: s.d(),
            r,
            c0: s.c0().to_string(),
            c: s
                .coeffs()
                .iter()
                .map(|row| (0..=r).map(|j| row.get(j).map_or("0".into(), |c| c.to_string())).collect())
                .collect(),
        }
    }

    pub fn to_set(&self) -> Result<ExpSumSet, SetError> {
        if self.c.len() != self.d || self.c.iter().any(|row| row.len() != self.r + 1) {
            return Err(SetError::Invalid(format!("coefficient table is not {} x {}", self.d, self.r + 1)));
        }
        let coeffs = self
            .c
            .iter()
            .map(|row| row.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        ExpSumSet::new(self.q, parse_rational(&self.c0)?, coeffs)
    }
}

impl DescriptorJson {
    pub fn from_descriptor(d: &SetDescriptor) -> Self {
        DescriptorJson {
            declared_type: d.declared_type,
            progressions: d
                .progressions
                .iter()
                .map(|a| ProgressionJson { m: BigIntStr(a.m.clone()), l: BigIntStr(a.l.clone()), ambient: a.ambient })
                .collect(),
            exp_sums: d.exp_sums.iter().map(ExpSumJson::from_set).collect(),
            add: d.add.iter().cloned().map(BigIntStr).collect(),
            remove: d.remove.iter().cloned().map(BigIntStr).collect(),
        }
    }

    pub fn to_descriptor(&self) -> Result<SetDescriptor, SetError> {
        let progressions = self
            .progressions
            .iter()
            .map(|a| {
                if a.m.0 < BigInt::zero() {
                    return Err(SetError::Invalid("negative progression step".into()));
                }
                Ok(ArithProgression::with_ambient(a.m.0.clone(), a.l.0.clone(), a.ambient))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let exp_sums = self.exp_sums.iter().map(ExpSumJson::to_set).collect::<Result<Vec<_>, _>>()?;
        let add: BTreeSet<BigInt> = self.add.iter().map(|x| x.0.clone()).collect();
        let remove: BTreeSet<BigInt> = self.remove.iter().map(|x| x.0.clone()).collect();
        SetDescriptor::new(progressions, exp_sums, add, remove, self.declared_type)
    }
}
