//! The `pdml.system/1` system description file.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::funcfield::field::is_prime_u64;
use crate::funcfield::{parse_ratfunc, Fp, RatFunc};
use crate::linalg::IntMatrix;
use crate::sunit::{GeneratorBasis, LaurentEquation, OracleParams, PointJson, SUnitError, SUnitPoint};

use super::{Factor, MapCoord, ShiftedMonomialMap, TorusError};

pub const SYSTEM_SCHEMA: &str = "pdml.system/1";

/// An integer written as a JSON number or a decimal string; always written
/// back as a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigIntStr(pub BigInt);

impl Serialize for BigIntStr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for BigIntStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(BigIntStr(BigInt::from(n))),
            Raw::Str(s) => s.trim().parse().map(BigIntStr).map_err(serde::de::Error::custom),
        }
    }
}

impl fmt::Display for BigIntStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Coordinates and sources are 1-based, matching x1..xn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftJson {
    pub coord: usize,
    pub source: usize,
    pub shift: String,
    pub exp: BigIntStr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    /// matrix[i][j]: exponent of the unshifted x_{j+1} in coordinate i+1.
    pub matrix: Vec<Vec<BigIntStr>>,
    pub translation: PointJson,
    #[serde(default)]
    pub shifts: Vec<ShiftJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub schema: String,
    pub p: u64,
    pub generators: Vec<String>,
    pub map: MapJson,
    pub start: PointJson,
    #[serde(default)]
    pub equations: Vec<String>,
    #[serde(default)]
    pub window: u64,
    #[serde(default)]
    pub oracle: OracleParams,
}

/// A decoded system.
#[derive(Clone, Debug)]
pub struct System {
    pub map: ShiftedMonomialMap,
    pub start: SUnitPoint,
    pub equations: Vec<LaurentEquation>,
    pub window: u64,
    pub oracle: OracleParams,
}

impl MapJson {
    pub fn from_map(map: &ShiftedMonomialMap) -> Self {
        let a = map.matrix();
        let mut shifts = Vec::new();
        for (i, c) in map.coords().iter().enumerate() {
            for f in c.factors.iter().filter(|f| !f.shift.is_zero()) {
                shifts.push(ShiftJson {
                    coord: i + 1,
                    source: f.source + 1,
                    shift: f.shift.render("t"),
                    exp: BigIntStr(f.exp.clone()),
                });
            }
        }
        MapJson {
            matrix: a.to_rows().into_iter().map(|r| r.into_iter().map(BigIntStr).collect()).collect(),
            translation: PointJson::from_point(&map.translation()),
            shifts,
        }
    }

    pub fn to_map(&self, basis: &GeneratorBasis) -> Result<ShiftedMonomialMap, TorusError> {
        let fp = basis.fp();
        let n = self.matrix.len();
        if self.matrix.iter().any(|r| r.len() != n) {
            return Err(TorusError::InvalidMap("matrix must be square".into()));
        }
        let translation = self.translation.to_point(fp)?;
        if translation.dim() != n {
            return Err(TorusError::InvalidMap(format!("translation has {} coordinates, matrix {n}", translation.dim())));
        }
        let a = IntMatrix::from_rows(self.matrix.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect());
        let mut coords: Vec<MapCoord> = (0..n)
            .map(|i| MapCoord {
                translation: translation.coords[i].clone(),
                factors: (0..n)
                    .filter(|&j| !a.get(i, j).is_zero())
                    .map(|j| Factor { source: j, shift: RatFunc::zero(fp), exp: a.get(i, j).clone() })
                    .collect(),
            })
            .collect();
        for s in &self.shifts {
            if s.coord == 0 || s.coord > n || s.source == 0 || s.source > n {
                return Err(TorusError::InvalidMap(format!("shift entry ({}, {}) out of range", s.coord, s.source)));
            }
            let shift = parse_ratfunc(&fp, &s.shift, "t").map_err(SUnitError::from)?;
            coords[s.coord - 1].factors.push(Factor { source: s.source - 1, shift, exp: s.exp.0.clone() });
        }
        ShiftedMonomialMap::new(basis.clone(), coords)
    }
}

impl SystemFile {
    pub fn new(system: &System) -> Self {
        let basis = system.map.basis();
        SystemFile {
            schema: SYSTEM_SCHEMA.into(),
            p: basis.p(),
            generators: basis.generators().iter().map(|g| g.render("t")).collect(),
            map: MapJson::from_map(&system.map),
            start: PointJson::from_point(&system.start),
            equations: system.equations.iter().map(LaurentEquation::render).collect(),
            window: system.window,
            oracle: system.oracle,
        }
    }

    pub fn decode(&self) -> Result<System, TorusError> {
        if self.schema != SYSTEM_SCHEMA {
            return Err(TorusError::InvalidMap(format!("unknown schema \"{}\"", self.schema)));
        }
        if !is_prime_u64(self.p) {
            return Err(TorusError::InvalidMap(format!("{} is not prime", self.p)));
        }
        let fp = Fp::new(self.p);
        let gens: Vec<&str> = self.generators.iter().map(String::as_str).collect();
        let basis = GeneratorBasis::parse(fp, &gens)?;
        let map = self.map.to_map(&basis)?;
        let start = self.start.to_point(fp)?;
        if start.dim() != map.dim() {
            return Err(TorusError::InvalidMap(format!("start point has dimension {}", start.dim())));
        }
        if start.coords.iter().any(|c| c.exps.len() > basis.len()) {
            return Err(TorusError::InvalidMap("start exponents longer than the basis".into()));
        }
        let equations = self
            .equations
            .iter()
            .map(|s| LaurentEquation::parse(fp, map.dim(), s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(System { start: start.padded(basis.len()), map, equations, window: self.window, oracle: self.oracle })
    }
}
