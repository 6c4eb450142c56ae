//! Vectors over Q(μ) = Q[x]/(m), and transport of generalized eigenvectors to
//! a Galois conjugate.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::algebraic::AlgebraicNumber;
use super::roots::rat_f64;
use super::zpoly::{QPoly, ZPoly};
use super::SpectralError;
use crate::funcfield::{Poly, Rationals};
use crate::linalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberFieldVector {
    modulus: ZPoly,
    entries: Vec<QPoly>,
}

impl NumberFieldVector {
    pub fn new(modulus: ZPoly, entries: Vec<QPoly>) -> Self {
        let m = modulus.to_q();
        let entries = entries.into_iter().map(|e| e.rem(&m)).collect();
        NumberFieldVector { modulus, entries }
    }

    pub fn modulus(&self) -> &ZPoly {
        &self.modulus
    }

    pub fn entries(&self) -> &[QPoly] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    /// (x·I − A)^k v, reduced mod m.
    pub fn shifted_power(&self, a: &IntMatrix, k: usize) -> Self {
        let m = self.modulus.to_q();
        let x = Poly::x(Rationals);
        let mut v = self.entries.clone();
        for _ in 0..k {
            v = (0..v.len())
                .map(|i| {
                    let mut acc = x.mul_ref(&v[i]);
                    for (j, vj) in v.iter().enumerate() {
                        let c = a.get(i, j);
                        if !c.is_zero() {
                            acc = acc.sub_ref(&vj.scale(&BigRational::from_integer(c.clone())));
                        }
                    }
                    acc.rem(&m)
                })
                .collect();
        }
        NumberFieldVector { modulus: self.modulus.clone(), entries: v }
    }

    /// ℓ·v mod m.
    pub fn pair(&self, ell: &[BigInt]) -> QPoly {
        let m = self.modulus.to_q();
        let mut acc = Poly::zero(Rationals);
        for (l, e) in ell.iter().zip(&self.entries) {
            acc = acc.add_ref(&e.scale(&BigRational::from_integer(l.clone())));
        }
        acc.rem(&m)
    }

    /// Entries evaluated at a complex point.
    pub fn evaluate(&self, z: Complex64) -> Vec<Complex64> {
        self.entries
            .iter()
            .map(|e| e.coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + rat_f64(c)))
            .collect()
    }
}

/// `{"modulus": [...], "entries": [[...], ...]}`, coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberFieldVectorJson {
    pub modulus: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

impl NumberFieldVectorJson {
    pub fn from_vector(v: &NumberFieldVector) -> Self {
        NumberFieldVectorJson {
            modulus: v.modulus.coeffs().iter().map(BigInt::to_string).collect(),
            entries: v.entries.iter().map(|e| e.coeffs().iter().map(|c| c.to_string()).collect()).collect(),
        }
    }

    pub fn to_vector(&self) -> Result<NumberFieldVector, SpectralError> {
        let bad = |s: &str| SpectralError::Parse(format!("bad number \"{s}\""));
        let modulus = ZPoly::new(
            self.modulus.iter().map(|s| s.trim().parse::<BigInt>().map_err(|_| bad(s))).collect::<Result<_, _>>()?,
        );
        let entries = self
            .entries
            .iter()
            .map(|e| {
                e.iter()
                    .map(|s| s.trim().parse::<BigRational>().map_err(|_| bad(s)))
                    .collect::<Result<Vec<_>, _>>()
                    .map(|c| Poly::new(Rationals, c))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NumberFieldVector::new(modulus, entries))
    }
}

/// A nonzero v over Q(μ) with (μI − A)^k v = 0, by elimination over the field.
pub fn generalized_eigvec(a: &IntMatrix, mu: &AlgebraicNumber, k: usize) -> Result<NumberFieldVector, SpectralError> {
    let n = a.rows();
    let m = mu.min_poly().to_q();
    // Rows of (xI − A)^k over Q(μ), built column by column from basis vectors.
    let mut mat: Vec<Vec<QPoly>> = vec![vec![Poly::zero(Rationals); n]; n];
    for j in 0..n {
        let mut e = vec![Poly::zero(Rationals); n];
        e[j] = Poly::one(Rationals);
        let col = NumberFieldVector::new(mu.min_poly().clone(), e).shifted_power(a, k);
        for (i, c) in col.entries.into_iter().enumerate() {
            mat[i][j] = c;
        }
    }
    // Reduced row echelon form.
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| !mat[r][col].is_zero()) else { continue };
        mat.swap(row, p);
        let inv = mat[row][col].inv_mod(&m).ok_or_else(|| SpectralError::NotIrreducible(mu.min_poly().to_string()))?;
        for c in 0..n {
            mat[row][c] = mat[row][c].mul_mod(&inv, &m);
        }
        for r in 0..n {
            if r != row && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                for c in 0..n {
                    let t = f.mul_mod(&mat[row][c], &m);
                    mat[r][c] = mat[r][c].sub_ref(&t).rem(&m);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free = (0..n).find(|c| !pivots.contains(c)).ok_or_else(|| {
        SpectralError::Precondition(format!("(μI − A)^{k} is invertible: μ is not an eigenvalue"))
    })?;
    let mut v = vec![Poly::zero(Rationals); n];
    v[free] = Poly::one(Rationals);
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = mat[r][free].neg_ref().rem(&m);
    }
    Ok(NumberFieldVector::new(mu.min_poly().clone(), v))
}

#[derive(Clone, Debug)]
pub struct ConjugateTransport {
    /// σ(v): the residues of v read at μ'.
    pub vector: NumberFieldVector,
    pub source: AlgebraicNumber,
    pub target: AlgebraicNumber,
    /// (μ'I − A)^m σ(v) ≡ 0 mod the minimal polynomial.
    pub kernel_check: bool,
    /// ℓ·σ(v) ≢ 0.
    pub pairing_check: bool,
    pub pairing: QPoly,
    /// σ(v) evaluated at μ' in floating point.
    pub numeric: Vec<Complex64>,
    /// ‖(μ'I − A)^m σ(v)‖∞ evaluated in floating point.
    pub numeric_residual: f64,
}

/// Transports a generalized eigenvector for μ to the conjugate μ'.
pub fn conjugate_eigvec(
    a: &IntMatrix,
    mu: &AlgebraicNumber,
    mu_prime: &AlgebraicNumber,
    v: &NumberFieldVector,
    m: usize,
    ell: &[BigInt],
) -> Result<ConjugateTransport, SpectralError> {
    if mu_prime.min_poly() != mu.min_poly() {
        return Err(SpectralError::Precondition(format!(
            "{} is not a conjugate of {}: minimal polynomials {} and {}",
            mu_prime,
            mu,
            mu_prime.min_poly(),
            mu.min_poly()
        )));
    }
    if v.modulus() != mu.min_poly() {
        return Err(SpectralError::Precondition(format!("vector modulus {} is not {}", v.modulus(), mu.min_poly())));
    }
    if v.dim() != a.rows() || ell.len() != a.rows() {
        return Err(SpectralError::DimensionMismatch { expected: a.rows(), got: v.dim().min(ell.len()) });
    }
    let residue = v.shifted_power(a, m);
    if let Some((i, r)) = residue.entries().iter().enumerate().find(|(_, e)| !e.is_zero()) {
        return Err(SpectralError::Precondition(format!(
            "(μI − A)^{m} v has residue {} at coordinate {}",
            r.render("μ"),
            i + 1
        )));
    }
    if v.pair(ell).is_zero() {
        return Err(SpectralError::Precondition("ℓ·v ≡ 0 mod the minimal polynomial".into()));
    }
    // σ fixes Q and sends the class of x (μ) to μ': the residues are unchanged,
    // and both identities are re-checked in the quotient ring.
    let sigma = NumberFieldVector::new(v.modulus().clone(), v.entries().to_vec());
    let kernel_check = sigma.shifted_power(a, m).is_zero();
    let pairing = sigma.pair(ell);
    let pairing_check = !pairing.is_zero();
    let (re, im) = if mu_prime.is_real() {
        (mu_prime.to_f64(), 0.0)
    } else {
        let d = mu_prime.disk(50);
        (rat_f64(&d.center.re), rat_f64(&d.center.im))
    };
    let z = Complex64::new(re, im);
    let numeric = sigma.evaluate(z);
    let mut w = numeric.clone();
    for _ in 0..m {
        w = (0..w.len())
            .map(|i| {
                let mut acc = z * w[i];
                for (j, wj) in w.iter().enumerate() {
                    acc -= wj * super::zpoly::to_f64(a.get(i, j));
                }
                acc
            })
            .collect();
    }
    let numeric_residual = w.iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(ConjugateTransport {
        vector: sigma,
        source: mu.clone(),
        target: mu_prime.clone(),
        kernel_check,
        pairing_check,
        pairing,
        numeric,
        numeric_residual,
    })
}

/// The constant vector with rational entries over the degree-1 field Q[x]/(x − r).
pub fn rational_vector(r: &BigRational, entries: &[BigRational]) -> NumberFieldVector {
    let modulus = ZPoly::new(vec![-r.numer().clone(), r.denom().clone()]).primitive();
    NumberFieldVector::new(modulus, entries.iter().map(|c| Poly::constant(Rationals, c.clone())).collect())
}
