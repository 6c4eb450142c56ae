use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::funcfield::{parse_ratfunc, random_irreducible_seeded};

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn p_set_basis(p: u64) -> GeneratorBasis {
    GeneratorBasis::parse(Fp::new(p), &["t", "t + 1"]).unwrap()
}

/// (t^{p^n}, (t+1)^{n p^n}, t^{n p^n})
fn p_set_point(p: u64, n: u32) -> SUnitPoint {
    let q = num_traits::pow(BigInt::from(p), n as usize);
    let nq = &q * n;
    SUnitPoint::from_parts(vec![1, 1, 1], vec![vec![q, big(0)], vec![big(0), nq.clone()], vec![nq, big(0)]])
}

#[test]
fn basis_rejects_reducible_and_repeats() {
    let f5 = Fp::new(5);
    assert!(GeneratorBasis::parse(f5, &["t^2 - 1"]).is_err());
    assert!(GeneratorBasis::parse(f5, &["t", "t"]).is_err());
    assert!(GeneratorBasis::parse(f5, &["2*t"]).is_err());
    assert_eq!(GeneratorBasis::parse(f5, &["t", "t + 1", "t - 1"]).unwrap().len(), 3);
}

#[test]
fn eval_mod_small_field() {
    let f2 = Fp::new(2);
    let basis = GeneratorBasis::parse(f2, &["t"]).unwrap();
    let pt = SUnitPoint::from_parts(vec![1], vec![vec![big(2)]]);
    let m = crate::funcfield::parse_poly(&f2, "t^2 + t + 1", "t").unwrap();
    let v = eval_mod(&basis, &pt, &m).unwrap();
    assert_eq!(v[0].render("t"), "t + 1");
    let id = SUnitPoint::identity(3, 1);
    assert!(eval_mod(&basis, &id, &m).unwrap().iter().all(|x| x.is_one()));
    assert!(matches!(eval_mod(&basis, &pt, &Poly::x(f2)), Err(SUnitError::BadModulus(_))));
}

#[test]
fn eval_mod_reduces_huge_exponents() {
    let f5 = Fp::new(5);
    let basis = GeneratorBasis::parse(f5, &["t"]).unwrap();
    // small case: reduction mod 5^3 − 1 against direct square-and-multiply
    let m = random_irreducible_seeded(f5, 3, 11);
    let pt = SUnitPoint::from_parts(vec![3], vec![vec![big(200)]]);
    let direct = Poly::x(f5).pow_mod_u64(200, &m).scale(&3);
    assert_eq!(eval_mod(&basis, &pt, &m).unwrap()[0], direct);
    // 10^18 over a degree-40 modulus
    let m = random_irreducible_seeded(f5, 40, 3);
    let e: BigInt = "1000000000000000000".parse().unwrap();
    let order = num_traits::pow(BigInt::from(5), 40) - 1;
    let reduced = e.mod_floor(&order).to_biguint().unwrap();
    let pt = SUnitPoint::from_parts(vec![1], vec![vec![e]]);
    assert_eq!(eval_mod(&basis, &pt, &m).unwrap()[0], Poly::x(f5).pow_mod(&reduced, &m));
}

#[test]
fn exact_values() {
    let f5 = Fp::new(5);
    let basis = p_set_basis(5);
    let pt = SUnitPoint::from_parts(vec![1, 2], vec![vec![big(1), big(1)], vec![big(0), big(0)]]);
    let v = exact_value(&basis, &pt, 10).unwrap();
    assert_eq!(v[0].render("t"), "t^2 + t");
    assert_eq!(v[1], RatFunc::constant(f5, 2));
    let big_pt = SUnitPoint::from_parts(vec![1], vec![vec![big(100), big(-1)]]);
    assert!(matches!(exact_value(&basis, &big_pt, 100), Err(SUnitError::DegreeCapExceeded { .. })));
}

#[test]
fn heights_from_exponents() {
    let basis = GeneratorBasis::parse(Fp::new(5), &["t"]).unwrap();
    for k in [-7i64, 0, 3] {
        let pt = SUnitPoint::from_parts(vec![1], vec![vec![big(k)]]);
        assert_eq!(height_of(&basis, &pt, HeightModel::PerCoordinateSum), HeightValue::from_u64(k.unsigned_abs()));
    }
    let basis = p_set_basis(5);
    for n in 1..4u32 {
        let pt = p_set_point(5, n);
        let expected = n as u64 * 5u64.pow(n);
        assert_eq!(coordinate_height(&basis, &pt.coords[1]), HeightValue::from_u64(expected));
    }
}

#[test]
fn add_constant_frobenius_descent() {
    let f5 = Fp::new(5);
    let basis = p_set_basis(5);
    let one = RatFunc::one(f5);
    // t^{5^3} + 1 = (t+1)^{5^3}
    let c = SUnit::generator(2, 0, big(125));
    let out = add_constant(&basis, &c, &one, &AddConstantOptions::default()).unwrap();
    assert_eq!(out.coord, SUnit::generator(2, 1, big(125)));
    assert_eq!(out.descent, 3);
    assert!(out.new_generators.is_empty());
    // t + 1
    let out = add_constant(&basis, &SUnit::generator(2, 0, big(1)), &one, &AddConstantOptions::default()).unwrap();
    assert_eq!(out.coord, SUnit::generator(2, 1, big(1)));
    // (t+1)^{10} − 1 = (t(t+2))^5 needs t+2
    let c = SUnit::generator(2, 1, big(10));
    let minus_one = one.neg();
    let strict = AddConstantOptions { extension: BasisExtension::Forbidden, ..Default::default() };
    assert!(matches!(add_constant(&basis, &c, &minus_one, &strict), Err(SUnitError::NotRepresentable(_))));
    let out = add_constant(&basis, &c, &minus_one, &AddConstantOptions::default()).unwrap();
    assert_eq!(out.new_generators.len(), 1);
    assert_eq!(out.new_generators[0].render("t"), "t + 2");
    assert_eq!(out.coord.exps, vec![big(5), big(0), big(5)]);
    let direct = Poly::from_i64s(f5, &[1, 1]).pow(10).sub_ref(&Poly::one(f5));
    let got = coordinate_value(&out.basis, &out.coord, 100).unwrap();
    assert_eq!(got, RatFunc::from_poly(direct));
}

#[test]
fn add_constant_zero_and_cap() {
    let f5 = Fp::new(5);
    let basis = p_set_basis(5);
    let c = SUnit { unit: 4, exps: vec![big(0), big(0)] };
    assert!(matches!(
        add_constant(&basis, &c, &RatFunc::one(f5), &AddConstantOptions::default()),
        Err(SUnitError::NotRepresentable(_))
    ));
    let tall = parse_ratfunc(&f5, "t^9", "t").unwrap();
    assert!(add_constant(&basis, &SUnit::one(2), &tall, &AddConstantOptions::default()).is_err());
}

#[test]
fn laurent_equation_parse_render() {
    let f5 = Fp::new(5);
    let eq = LaurentEquation::parse(f5, 3, "x2 = x3 + 1").unwrap();
    assert_eq!(eq.poly.len(), 3);
    let back = LaurentEquation::parse(f5, 3, &eq.render()).unwrap();
    assert_eq!(back, eq);
    let eq = LaurentEquation::parse(f5, 2, "x1^-2*x2/(t+1) - (t^2+1)/t").unwrap();
    assert_eq!(LaurentEquation::parse(f5, 2, &eq.render()).unwrap(), eq);
    assert!(LaurentEquation::parse(f5, 2, "x1/(x1 + x2)").is_err());
    assert!(LaurentEquation::parse(f5, 2, "x3").is_err());
    assert!(LaurentEquation::parse(f5, 2, "x1 - x1").is_err());
}

#[test]
fn oracle_on_frobenius_orbit() {
    let basis = p_set_basis(5);
    let fp = basis.fp();
    let eq = [LaurentEquation::parse(fp, 3, "x2 - x3 - 1").unwrap()];
    let params = OracleParams::default();
    match membership_test(&basis, &p_set_point(5, 1), &eq, &params).unwrap() {
        MembershipVerdict::ProbablyMember { error_bound_log2, d_max, .. } => {
            assert!(error_bound_log2.unwrap() <= -80.0);
            assert_eq!(d_max, big(1));
        }
        v => panic!("{v:?}"),
    }
    let v = membership_test(&basis, &p_set_point(5, 2), &eq, &params).unwrap();
    assert!(matches!(v, MembershipVerdict::NotMember { equation: 0, modulus: Some(_), trial: Some(_) }));
    assert!(!eq[0].holds_exactly(&basis, &p_set_point(5, 2), 1000).unwrap());
}

#[test]
fn oracle_trivial_cases() {
    let basis = GeneratorBasis::parse(Fp::new(5), &["t"]).unwrap();
    let fp = basis.fp();
    let id = SUnitPoint::identity(1, 1);
    let params = OracleParams::default();
    let ok = [LaurentEquation::parse(fp, 1, "x1 - 1").unwrap()];
    assert!(membership_test(&basis, &id, &ok, &params).unwrap().is_member());
    let bad = [LaurentEquation::parse(fp, 1, "x1 - t").unwrap()];
    assert!(!membership_test(&basis, &id, &bad, &params).unwrap().is_member());
    let small = OracleParams { degree: 2, ..params };
    let pt = SUnitPoint::from_parts(vec![1], vec![vec![big(1000)]]);
    let eq = [LaurentEquation::parse(fp, 1, "x1 - t - 1").unwrap()];
    assert!(matches!(membership_test(&basis, &pt, &eq, &small), Err(SUnitError::BadParameters { .. })));
}

#[test]
fn binomial_path_is_exact() {
    let basis = p_set_basis(5);
    let fp = basis.fp();
    let q: BigInt = num_traits::pow(BigInt::from(2), 300);
    let pt = SUnitPoint::from_parts(vec![1, 1], vec![vec![q.clone(), big(0)], vec![q.clone(), big(0)]]);
    let eq = LaurentEquation::parse(fp, 2, "x1 = x2").unwrap();
    assert_eq!(decide_binomial(&basis, &pt, &eq).unwrap(), Some(true));
    let eq = LaurentEquation::parse(fp, 2, "x1 = 2*x2").unwrap();
    assert_eq!(decide_binomial(&basis, &pt, &eq).unwrap(), Some(false));
    let eq = LaurentEquation::parse(fp, 2, "x1 = t*x2").unwrap();
    assert_eq!(decide_binomial(&basis, &pt, &eq).unwrap(), Some(false));
    let pt2 = SUnitPoint::from_parts(vec![1, 1], vec![vec![&q + 1, big(0)], vec![q, big(0)]]);
    assert_eq!(decide_binomial(&basis, &pt2, &eq).unwrap(), Some(true));
    let eq = LaurentEquation::parse(fp, 2, "x1 - x2 - 1").unwrap();
    assert_eq!(decide_binomial(&basis, &pt2, &eq).unwrap(), None);
}

#[test]
fn json_document() {
    let basis = p_set_basis(5);
    let pts = vec![p_set_point(5, 2), SUnitPoint::from_parts(vec![3], vec![vec![big(-4), big(7)]])];
    let doc = BasisDocument::new(&basis, &pts);
    let text = serde_json::to_string(&doc).unwrap();
    assert!(text.contains("\"exponents\":[[\"25\",\"0\"]"));
    let back: BasisDocument = serde_json::from_str(&text).unwrap();
    let (b2, p2) = back.decode().unwrap();
    assert_eq!(b2, basis);
    assert_eq!(p2, pts);
}

fn small_point(r: usize, n: usize) -> impl Strategy<Value = SUnitPoint> {
    proptest::collection::vec((1u64..5, proptest::collection::vec(-6i64..7, r)), n).prop_map(|cs| {
        SUnitPoint::new(cs.into_iter().map(|(u, e)| SUnit { unit: u, exps: e.into_iter().map(BigInt::from).collect() }).collect())
    })
}

fn basis3() -> GeneratorBasis {
    GeneratorBasis::parse(Fp::new(5), &["t", "t + 1", "t^2 + 2"]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_mod_is_multiplicative(a in small_point(3, 2), b in small_point(3, 2), seed in 0u64..1000) {
        let basis = basis3();
        let m = random_irreducible_seeded(basis.fp(), 5, seed);
        prop_assume!(!basis.is_bad_modulus(&m));
        let ea = eval_mod(&basis, &a, &m).unwrap();
        let eb = eval_mod(&basis, &b, &m).unwrap();
        let eab = eval_mod(&basis, &a.mul(&b, basis.fp()), &m).unwrap();
        for i in 0..2 {
            prop_assert_eq!(&eab[i], &ea[i].mul_mod(&eb[i], &m));
        }
    }

    #[test]
    fn exact_value_agrees_with_eval_mod(a in small_point(3, 2), seed in 0u64..1000) {
        let basis = basis3();
        let m = random_irreducible_seeded(basis.fp(), 4, seed);
        prop_assume!(!basis.is_bad_modulus(&m));
        let exact = exact_value(&basis, &a, 200).unwrap();
        let ctx = ModContext::new(&basis, m.clone()).unwrap();
        let modded = eval_mod(&basis, &a, &m).unwrap();
        for (x, y) in exact.iter().zip(&modded) {
            prop_assert_eq!(&ctx.reduce(x).unwrap(), y);
        }
    }

    #[test]
    fn heights_match_exact_and_scale(a in small_point(3, 2)) {
        let basis = basis3();
        let exact = exact_value(&basis, &a, 200).unwrap();
        let per: BigUint = exact.iter().map(|x| crate::funcfield::height(x).0).sum();
        prop_assert_eq!(height_of(&basis, &a, HeightModel::PerCoordinateSum).0, per);
        let mut affine = vec![RatFunc::one(basis.fp())];
        affine.extend(exact.iter().cloned());
        prop_assert_eq!(
            height_of(&basis, &a, HeightModel::Projective),
            crate::funcfield::height_projective(&affine).unwrap()
        );
        let doubled = a.mul(&a, basis.fp());
        prop_assert_eq!(
            height_of(&basis, &doubled, HeightModel::PerCoordinateSum).0,
            height_of(&basis, &a, HeightModel::PerCoordinateSum).0 * 2u32
        );
    }

    #[test]
    fn add_then_subtract_restores(e in proptest::collection::vec(-3i64..4, 3), k in 0u32..3, beta in 1u64..5) {
        let basis = basis3();
        let fp = basis.fp();
        let scale = BigInt::from(5u64.pow(k));
        let c = SUnit { unit: 1, exps: e.into_iter().map(|x| BigInt::from(x) * &scale).collect() };
        let b = RatFunc::constant(fp, beta);
        let opts = AddConstantOptions { extension: BasisExtension::Forbidden, ..Default::default() };
        if let Ok(out) = add_constant(&basis, &c, &b, &opts) {
            let back = add_constant(&basis, &out.coord, &b.neg(), &opts).unwrap();
            prop_assert_eq!(back.coord, c);
        }
    }

    #[test]
    fn not_member_is_sound(a in small_point(3, 2), c0 in 0u64..5, c1 in 0u64..5, seed in 0u64..50) {
        let basis = basis3();
        let fp = basis.fp();
        let eq = LaurentEquation::parse(fp, 2, &format!("x1 + {c0}*x2 - {c1}*t - 1"));
        prop_assume!(eq.is_ok());
        let eq = eq.unwrap();
        let params = OracleParams { degree: 12, trials: 2, seed };
        let v = membership_test(&basis, &a, std::slice::from_ref(&eq), &params).unwrap();
        let exact = eq.holds_exactly(&basis, &a, 500).unwrap();
        if !v.is_member() {
            prop_assert!(!exact);
        }
        if exact {
            prop_assert!(v.is_member());
        }
    }

    #[test]
    fn error_bound_monotone(d in 20usize..60, trials in 1usize..8, dmax in 1u64..100_000) {
        let dm = BigInt::from(dmax);
        let b = error_bound_log2(5, d, &dm, trials).unwrap();
        prop_assert!(error_bound_log2(5, d, &dm, trials + 1).unwrap() < b);
        prop_assert!(error_bound_log2(5, d + 1, &dm, trials).unwrap() < b);
    }
}
