use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::funcfield::Fp;

use super::{bigint_sign_str, GeneratorBasis, SUnit, SUnitError, SUnitPoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub units: Vec<u64>,
    /// Decimal strings, one vector per coordinate.
    pub exponents: Vec<Vec<String>>,
}

impl PointJson {
    pub fn from_point(point: &SUnitPoint) -> Self {
        PointJson {
            units: point.coords.iter().map(|c| c.unit).collect(),
            exponents: point.coords.iter().map(|c| c.exps.iter().map(bigint_sign_str).collect()).collect(),
        }
    }

    pub fn to_point(&self, fp: Fp) -> Result<SUnitPoint, SUnitError> {
        if self.units.len() != self.exponents.len() {
            return Err(SUnitError::DimensionMismatch(format!(
                "{} units but {} exponent vectors",
                self.units.len(),
                self.exponents.len()
            )));
        }
        let mut coords = Vec::new();
        for (&unit, exps) in self.units.iter().zip(&self.exponents) {
            if unit % fp.p() == 0 {
                return Err(SUnitError::Parse(format!("unit {unit} vanishes mod {}", fp.p())));
            }
            let exps = exps
                .iter()
                .map(|s| s.trim().parse::<BigInt>().map_err(|e| SUnitError::Parse(format!("exponent \"{s}\": {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            coords.push(SUnit { unit: unit % fp.p(), exps });
        }
        Ok(SUnitPoint::new(coords))
    }
}

/// `{"p":5,"generators":["t","t + 1"],"points":[...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDocument {
    pub p: u64,
    pub generators: Vec<String>,
    pub points: Vec<PointJson>,
}

impl BasisDocument {
    pub fn new(basis: &GeneratorBasis, points: &[SUnitPoint]) -> Self {
        BasisDocument {
            p: basis.p(),
            generators: basis.generators().iter().map(|g| g.render("t")).collect(),
            points: points.iter().map(PointJson::from_point).collect(),
        }
    }

    pub fn decode(&self) -> Result<(GeneratorBasis, Vec<SUnitPoint>), SUnitError> {
        if !crate::funcfield::field::is_prime_u64(self.p) {
            return Err(SUnitError::Parse(format!("{} is not prime", self.p)));
        }
        let fp = Fp::new(self.p);
        let gens: Vec<&str> = self.generators.iter().map(String::as_str).collect();
        let basis = GeneratorBasis::parse(fp, &gens)?;
        let points = self.points.iter().map(|p| p.to_point(fp)).collect::<Result<Vec<_>, _>>()?;
        for pt in &points {
            for c in &pt.coords {
                if c.exps.len() > basis.len() {
                    return Err(SUnitError::DimensionMismatch(format!(
                        "{} exponents over {} generators",
                        c.exps.len(),
                        basis.len()
                    )));
                }
            }
        }
        let points = points.into_iter().map(|p| p.padded(basis.len())).collect();
        Ok((basis, points))
    }
}
