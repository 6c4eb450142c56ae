use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use super::*;
use crate::funcfield::{Poly, Rationals};

fn z(c: &[i64]) -> ZPoly {
    ZPoly::from_i64s(c)
}

fn m(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_i64(rows)
}

fn ints(xs: &[AlgebraicNumber]) -> Vec<Option<BigRational>> {
    xs.iter().map(AlgebraicNumber::as_rational).collect()
}

fn rat(n: i64) -> Option<BigRational> {
    Some(BigRational::from_integer(BigInt::from(n)))
}

#[test]
fn diagonal_degrees_and_exponents() {
    let a = m(&[vec![2, 0], vec![0, 3]]);
    let l = dynamical_degrees_monomial(&a).unwrap();
    assert_eq!(ints(&l), vec![rat(1), rat(3), rat(6)]);
    assert_eq!(ints(&lyapunov_exponents(&l).unwrap()), vec![rat(3), rat(2)]);
    assert_eq!(ints(&lyapunov_exponents_monomial(&a).unwrap()), vec![rat(3), rat(2)]);
    assert!(iterate_exponents_check(&a, 2).unwrap());
    let b = m(&[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]);
    let lb = dynamical_degrees_monomial(&b).unwrap();
    assert_eq!(ints(&lb), vec![rat(1), rat(2), rat(4), rat(8)]);
    let mb = lyapunov_exponents(&lb).unwrap();
    assert_eq!(ints(&mb), vec![rat(2), rat(2), rat(2)]);
    let h = hyperbolicity_report(&mb, &BigInt::from(8)).unwrap();
    assert_eq!((h.cohomologically_hyperbolic, h.root_free, h.gap_condition), (true, false, false));
}

#[test]
fn unipotent_blocks_have_zero_entropy() {
    let mut a = IntMatrix::zeros(6, 6);
    for b in 0..3 {
        a.set(2 * b, 2 * b, 1.into());
        a.set(2 * b + 1, 2 * b, 1.into());
        a.set(2 * b + 1, 2 * b + 1, 1.into());
    }
    let l = dynamical_degrees_monomial(&a).unwrap();
    assert!(l.iter().all(AlgebraicNumber::is_one));
    let mu = lyapunov_exponents(&l).unwrap();
    assert!(!hyperbolicity_report(&mu, &BigInt::from(1)).unwrap().cohomologically_hyperbolic);
}

#[test]
fn golden_matrix() {
    let a = m(&[vec![0, -1], vec![1, 3]]);
    assert_eq!(char_poly(&a), z(&[1, -3, 1]));
    let l = dynamical_degrees_monomial(&a).unwrap();
    assert_eq!(l[1].min_poly(), &z(&[1, -3, 1]));
    assert!((l[1].to_f64() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    let chain = exponent_chain_check(&a).unwrap();
    assert!(chain.holds());
    assert!(!in_root_set(&chain.exponents[0]).unwrap());
    assert!(iterate_exponents_check(&a, 3).unwrap());
}

#[test]
fn complex_eigenvalues() {
    // Eigenvalues 1 ± 2i and 3: moduli √5, √5, 3.
    let a = m(&[vec![1, -2, 0], vec![2, 1, 0], vec![0, 0, 3]]);
    let mu = lyapunov_exponents_monomial(&a).unwrap();
    assert_eq!(mu[0].as_rational(), rat(3));
    assert_eq!(mu[1].min_poly(), &z(&[-5, 0, 1]));
    assert!(mu[1].equals(&mu[2]));
    assert!(exponent_chain_check(&a).unwrap().holds());
    assert_eq!(spectral_radius(&a).unwrap().as_rational(), rat(3));
    let rot = m(&[vec![1, -2], vec![2, 1]]);
    assert_eq!(spectral_radius(&rot).unwrap().min_poly(), &z(&[-5, 0, 1]));
}

#[test]
fn root_set_examples() {
    let pick = |c: &[i64]| min_poly_of_root(&z(c)).unwrap();
    assert!(in_root_set(&pick(&[-2, 0, 1])).unwrap());
    assert!(!in_root_set(&pick(&[-1, -2, 1])).unwrap());
    assert!(in_root_set(&pick(&[-4, 0, 0, 1])).unwrap());
    assert!(modulus_criterion(&pick(&[-4, 0, 0, 1])).unwrap().all_equal);
    let sep = modulus_criterion(&pick(&[-1, -2, 1])).unwrap();
    assert!(sep.certified_separation && !sep.all_equal);
    assert!(in_root_set(&AlgebraicNumber::integer(-2)).is_err());
    assert!(matches!(dynamical_degrees_monomial(&m(&[vec![1, 2], vec![2, 4]])), Err(SpectralError::Singular)));
}

#[test]
fn matrix_json() {
    let a = parse_matrix_json(r#"[["2","0"],[0,3]]"#).unwrap();
    assert_eq!(a, m(&[vec![2, 0], vec![0, 3]]));
    assert_eq!(parse_matrix_json("[[1,2]]"), Err(SpectralError::NotSquare));
    assert!(matches!(parse_matrix_json(r#"[["x"]]"#), Err(SpectralError::Parse(_))));
}

#[test]
fn conjugate_transport_quadratic() {
    let a = m(&[vec![0, -1], vec![1, 3]]);
    let roots = conjugates_of(&z(&[1, -3, 1]));
    let (small, big) = (&roots[0], &roots[1]);
    let v = generalized_eigvec(&a, big, 1).unwrap();
    let t = conjugate_eigvec(&a, big, small, &v, 1, &[BigInt::from(1), BigInt::from(0)]).unwrap();
    assert!(t.kernel_check && t.pairing_check);
    assert!(t.numeric_residual < 1e-9);
    assert_eq!(t.vector, v);
    let bad = conjugate_eigvec(&a, big, small, &v, 1, &[BigInt::from(0), BigInt::from(0)]);
    assert!(matches!(bad, Err(SpectralError::Precondition(_))));
}

#[test]
fn conjugate_transport_jordan_block() {
    // Companion of (x² − 2)²: generalized eigenvectors of order 2 for ±√2.
    let a = companion(&z(&[-2, 0, 1]).pow(2));
    let roots = conjugates_of(&z(&[-2, 0, 1]));
    let v = generalized_eigvec(&a, &roots[1], 2).unwrap();
    assert!(!v.shifted_power(&a, 1).is_zero());
    let ell: Vec<BigInt> = (1..=4).map(BigInt::from).collect();
    let ell = if v.pair(&ell).is_zero() { vec![1.into(), 0.into(), 0.into(), 0.into()] } else { ell };
    let t = conjugate_eigvec(&a, &roots[1], &roots[0], &v, 2, &ell).unwrap();
    assert!(t.kernel_check && t.pairing_check && t.numeric_residual < 1e-6);
}

#[test]
fn rational_transport_is_identity() {
    let a = m(&[vec![2, 0], vec![0, 3]]);
    let mu = AlgebraicNumber::integer(2);
    let v = numfield::rational_vector(&BigRational::from_integer(2.into()), &[BigRational::from_integer(1.into()), BigRational::zero()]);
    let t = conjugate_eigvec(&a, &mu, &mu, &v, 1, &[BigInt::from(1), BigInt::from(0)]).unwrap();
    assert_eq!(t.vector, v);
    let json = NumberFieldVectorJson::from_vector(&v);
    assert_eq!(json.to_vector().unwrap(), v);
    let _ = Poly::one(Rationals);
}

#[test]
fn algebraic_json() {
    let r = min_poly_of_root(&z(&[-2, 0, 1])).unwrap();
    let j = AlgebraicJson::from_number(&r);
    let text = serde_json::to_string(&j).unwrap();
    assert!(text.starts_with(r#"{"minPoly":["-2","0","1"],"isolation":{"re":["#));
    let back: AlgebraicJson = serde_json::from_str(&text).unwrap();
    assert!(back.to_number().unwrap().equals(&r));
}

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(-4i64..=4, n), n).prop_map(|rows| IntMatrix::from_i64(&rows))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cayley_hamilton(a in small_matrix()) {
        prop_assert!(cayley_hamilton_holds(&a));
    }

    #[test]
    fn diff_is_linear(
        xs in proptest::collection::vec(-50i64..50, 12),
        ys in proptest::collection::vec(-50i64..50, 12),
        a in -3i64..=3,
        order in 0usize..4,
    ) {
        let (x, y) = (growth::ints(&xs), growth::ints(&ys));
        let s: Vec<BigRational> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        let a = BigRational::from_integer(a.into());
        let lhs = diff_sequence(&s, &a, order);
        let dx = diff_sequence(&x, &a, order);
        let dy = diff_sequence(&y, &a, order);
        let rhs: Vec<BigRational> = dx.iter().zip(&dy).map(|(p, q)| p + q).collect();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exponent_chain(a in small_matrix()) {
        prop_assume!(!a.det().is_zero());
        let c = exponent_chain_check(&a).unwrap();
        prop_assert!(c.holds(), "{:?}", a);
    }
}
