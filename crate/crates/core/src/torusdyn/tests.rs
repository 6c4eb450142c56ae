use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::funcfield::{Fp, HeightValue};
use crate::sunit::{coordinate_height, LaurentEquation, OracleParams};

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn sunit(unit: u64, exps: &[i64]) -> SUnit {
    SUnit { unit, exps: exps.iter().map(|&e| big(e)).collect() }
}

/// (x, y, z) ↦ (x^p, (x+1)^p y^p, x^p z^p) over the basis (t, t+1).
fn frobenius_example(p: u64) -> ShiftedMonomialMap {
    let fp = Fp::new(p);
    let basis = GeneratorBasis::parse(fp, &["t", "t + 1"]).unwrap();
    let pb = big(p as i64);
    let zero = RatFunc::zero(fp);
    let f = |source, shift: &FpRat| Factor { source, shift: shift.clone(), exp: pb.clone() };
    let coords = vec![
        MapCoord { translation: SUnit::one(2), factors: vec![f(0, &zero)] },
        MapCoord { translation: SUnit::one(2), factors: vec![f(0, &RatFunc::one(fp)), f(1, &zero)] },
        MapCoord { translation: SUnit::one(2), factors: vec![f(0, &zero), f(2, &zero)] },
    ];
    ShiftedMonomialMap::new(basis, coords).unwrap()
}

/// x ↦ ((t+1)² x1, x1 x2, t² x3, x3 x4, (t−1)² x5, x5 x6) over (t+1, t, t−1).
fn unipotent_six(p: u64) -> (ShiftedMonomialMap, SUnitPoint) {
    let basis = GeneratorBasis::parse(Fp::new(p), &["t + 1", "t", "t - 1"]).unwrap();
    let a = IntMatrix::from_i64(&[
        vec![1, 0, 0, 0, 0, 0],
        vec![1, 1, 0, 0, 0, 0],
        vec![0, 0, 1, 0, 0, 0],
        vec![0, 0, 1, 1, 0, 0],
        vec![0, 0, 0, 0, 1, 0],
        vec![0, 0, 0, 0, 1, 1],
    ]);
    let c = SUnitPoint::new(vec![
        sunit(1, &[2, 0, 0]),
        SUnit::one(3),
        sunit(1, &[0, 2, 0]),
        SUnit::one(3),
        sunit(1, &[0, 0, 2]),
        SUnit::one(3),
    ]);
    let start = SUnitPoint::new(vec![
        sunit(1, &[1, 0, 0]),
        SUnit::one(3),
        sunit(1, &[0, 1, 0]),
        SUnit::one(3),
        sunit(1, &[0, 0, 1]),
        SUnit::one(3),
    ]);
    (ShiftedMonomialMap::monomial(basis, &c, &a).unwrap(), start)
}

fn opts() -> AddConstantOptions {
    AddConstantOptions::default()
}

#[test]
fn apply_unipotent_six_first_step() {
    let (map, start) = unipotent_six(11);
    let out = apply(&map, map.basis(), &start, &opts()).unwrap();
    let expected = SUnitPoint::new(vec![
        sunit(1, &[3, 0, 0]),
        sunit(1, &[1, 0, 0]),
        sunit(1, &[0, 3, 0]),
        sunit(1, &[0, 1, 0]),
        sunit(1, &[0, 0, 3]),
        sunit(1, &[0, 0, 1]),
    ]);
    assert_eq!(out.point, expected);
}

#[test]
fn apply_frobenius_example_twice() {
    let map = frobenius_example(5);
    let start = SUnitPoint::new(vec![sunit(1, &[1, 0]), SUnit::one(2), SUnit::one(2)]);
    let (x, basis) = iterate(&map, map.basis(), &start, 2, IterMode::Step, &opts()).unwrap();
    assert_eq!(basis.len(), 2);
    assert_eq!(x, SUnitPoint::new(vec![sunit(1, &[25, 0]), sunit(1, &[0, 50]), sunit(1, &[50, 0])]));
    assert_eq!(iterate(&map, map.basis(), &start, 2, IterMode::ClosedForm, &opts()), Err(TorusError::ModeMismatch));
}

#[test]
fn identity_and_zero_steps() {
    let basis = GeneratorBasis::parse(Fp::new(7), &["t", "t + 3"]).unwrap();
    let id = ShiftedMonomialMap::identity(basis.clone(), 2);
    let x = SUnitPoint::new(vec![sunit(3, &[4, -1]), sunit(2, &[0, 9])]);
    assert_eq!(apply(&id, &basis, &x, &opts()).unwrap().point, x);
    let (map, start) = unipotent_six(11);
    for mode in [IterMode::Step, IterMode::ClosedForm] {
        assert_eq!(iterate(&map, map.basis(), &start, 0, mode, &opts()).unwrap().0, start);
    }
}

#[test]
fn closed_form_matches_steps_at_seven() {
    let (map, start) = unipotent_six(11);
    let step = iterate(&map, map.basis(), &start, 7, IterMode::Step, &opts()).unwrap().0;
    let closed = iterate(&map, map.basis(), &start, 7, IterMode::ClosedForm, &opts()).unwrap().0;
    assert_eq!(step, closed);
    // ((t+1)^{2n+1}, (t+1)^{n²}, …)
    assert_eq!(closed.coords[0].exps[0], big(15));
    assert_eq!(closed.coords[1].exps[0], big(49));
}

#[test]
fn unipotent_plane_exponents() {
    // x ↦ (c x1, x1 x2) with c = 3·t^{e_c}
    let fp = Fp::new(7);
    let basis = GeneratorBasis::parse(fp, &["t"]).unwrap();
    let a = IntMatrix::from_i64(&[vec![1, 0], vec![1, 1]]);
    let (e1, e2, ec) = (4i64, -3i64, 5i64);
    let c = SUnitPoint::new(vec![sunit(3, &[ec]), SUnit::one(1)]);
    let map = ShiftedMonomialMap::monomial(basis.clone(), &c, &a).unwrap();
    let x = SUnitPoint::new(vec![sunit(2, &[e1]), sunit(5, &[e2])]);
    for n in [0i64, 1, 2, 9, 40] {
        let got = iterate(&map, &basis, &x, n as u64, IterMode::ClosedForm, &opts()).unwrap().0;
        assert_eq!(got.coords[1].exps[0], big(e2 + n * e1 + n * (n - 1) / 2 * ec));
        // unit: 5·2^n·3^{n(n−1)/2}
        let expect_unit = (5 * fp.pow(2, n as u64) % 7) * fp.pow(3, (n * (n - 1) / 2) as u64) % 7;
        assert_eq!(got.coords[1].unit, expect_unit);
    }
}

#[test]
fn heights_follow_closed_form() {
    let (map, start) = unipotent_six(11);
    let orb = orbit(&map, &start, 30, &opts()).unwrap();
    for rec in &orb.records {
        let n = rec.n;
        assert_eq!(rec.heights[0], HeightValue::from_u64(2 * n + 1));
        assert_eq!(rec.heights[1], HeightValue::from_u64(n * n));
    }
}

#[test]
fn frobenius_example_return_set_small() {
    let map = frobenius_example(5);
    let fp = map.basis().fp();
    let start = SUnitPoint::new(vec![sunit(1, &[1, 0]), SUnit::one(2), SUnit::one(2)]);
    let eq = vec![LaurentEquation::parse(fp, 3, "x2 - x3 - 1").unwrap()];
    let rep = return_set(&map, &start, &eq, 30, &ScanOptions::default()).unwrap();
    assert_eq!(rep.members(), vec![1, 5, 25]);
    assert!(rep.worst_error_bound_log2().unwrap() <= -80.0);
    let all = return_set(&map, &start, &[], 10, &ScanOptions::default()).unwrap();
    assert_eq!(all.members(), (0..=10).collect::<Vec<_>>());
}

#[test]
fn twists() {
    let (map, _) = unipotent_six(11);
    let q = big(11);
    let g = map.frobenius_twist(&q).unwrap();
    assert_eq!(g.matrix(), map.matrix().scale(&q));
    assert_eq!(g.translation().coords[0].exps[0], big(22));
    let gg = g.frobenius_twist(&big(121)).unwrap();
    assert_eq!(gg, map.frobenius_twist(&big(1331)).unwrap());
    assert!(map.frobenius_twist(&big(10)).is_err());
    assert!(map.frobenius_twist(&big(1)).is_err());
    let units = ShiftedMonomialMap::monomial(
        map.basis().clone(),
        &SUnitPoint::new(vec![sunit(2, &[0, 0, 0])]),
        &IntMatrix::identity(1),
    )
    .unwrap();
    assert_eq!(units.frobenius_twist(&q).unwrap().translation().coords[0].unit, 2);
}

#[test]
fn split_products() {
    let b1 = GeneratorBasis::parse(Fp::new(5), &["t"]).unwrap();
    let b2 = GeneratorBasis::parse(Fp::new(5), &["t + 1", "t"]).unwrap();
    let prod = ShiftedMonomialMap::identity(b1.clone(), 2).split_product(&ShiftedMonomialMap::identity(b2.clone(), 1)).unwrap();
    assert_eq!(prod.matrix(), IntMatrix::identity(3));
    assert_eq!(prod.basis().len(), 2);
    let other = ShiftedMonomialMap::identity(GeneratorBasis::parse(Fp::new(7), &["t"]).unwrap(), 1);
    assert_eq!(prod.split_product(&other), Err(TorusError::PrimeMismatch(5, 7)));
}

#[test]
fn preperiodicity() {
    let basis = GeneratorBasis::parse(Fp::new(5), &["t"]).unwrap();
    let id = ShiftedMonomialMap::identity(basis.clone(), 1);
    let t = SUnitPoint::new(vec![sunit(1, &[1])]);
    assert_eq!(
        preperiodicity_check(&id, &t, 10, &opts()).unwrap(),
        Preperiodicity::Preperiodic { tail: 0, period: 1 }
    );
    let inv = ShiftedMonomialMap::monomial(basis, &SUnitPoint::identity(1, 1), &IntMatrix::from_i64(&[vec![-1]])).unwrap();
    assert_eq!(
        preperiodicity_check(&inv, &t, 10, &opts()).unwrap(),
        Preperiodicity::Preperiodic { tail: 0, period: 2 }
    );
    let (map, start) = unipotent_six(11);
    assert_eq!(preperiodicity_check(&map, &start, 1000, &opts()).unwrap(), Preperiodicity::NoRepeatWithin(1000));
}

#[test]
fn degenerate_maps_rejected() {
    let basis = GeneratorBasis::parse(Fp::new(5), &["t"]).unwrap();
    let sing = IntMatrix::from_i64(&[vec![1, 1], vec![1, 1]]);
    assert_eq!(
        ShiftedMonomialMap::monomial(basis, &SUnitPoint::identity(2, 1), &sing),
        Err(TorusError::NotDominant)
    );
}

#[test]
fn system_file_round_trip() {
    let map = frobenius_example(5);
    let fp = map.basis().fp();
    let system = System {
        start: SUnitPoint::new(vec![sunit(1, &[1, 0]), SUnit::one(2), SUnit::one(2)]),
        equations: vec![LaurentEquation::parse(fp, 3, "x2 = x3 + 1").unwrap()],
        map,
        window: 40,
        oracle: OracleParams::default(),
    };
    let text = serde_json::to_string_pretty(&SystemFile::new(&system)).unwrap();
    let back: SystemFile = serde_json::from_str(&text).unwrap();
    let decoded = back.decode().unwrap();
    assert_eq!(decoded.map, system.map);
    assert_eq!(decoded.start, system.start);
    assert_eq!(decoded.equations, system.equations);
    let numeric = text.replace("\"5\"", "5");
    assert_eq!(serde_json::from_str::<SystemFile>(&numeric).unwrap().decode().unwrap().map, system.map);
}

fn small_monomial() -> impl Strategy<Value = (IntMatrix, SUnitPoint, SUnitPoint)> {
    let mat = proptest::collection::vec(-2i64..3, 4)
        .prop_filter("dominant", |v| v[0] * v[3] - v[1] * v[2] != 0)
        .prop_map(|v| IntMatrix::from_i64(&[vec![v[0], v[1]], vec![v[2], v[3]]]));
    let pt = || {
        proptest::collection::vec((1u64..7, -3i64..4, -3i64..4), 2)
            .prop_map(|cs| SUnitPoint::new(cs.into_iter().map(|(u, a, b)| sunit(u, &[a, b])).collect()))
    };
    (mat, pt(), pt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn semigroup_and_modes_agree((a, c, x) in small_monomial(), m in 0u64..6, k in 0u64..6) {
        let basis = GeneratorBasis::parse(Fp::new(7), &["t", "t + 1"]).unwrap();
        let map = ShiftedMonomialMap::monomial(basis.clone(), &c, &a).unwrap();
        let o = opts();
        let whole = iterate(&map, &basis, &x, m + k, IterMode::ClosedForm, &o).unwrap().0;
        let first = iterate(&map, &basis, &x, m, IterMode::ClosedForm, &o).unwrap().0;
        let split = iterate(&map, &basis, &first, k, IterMode::ClosedForm, &o).unwrap().0;
        prop_assert_eq!(&whole, &split);
        let step = iterate(&map, &basis, &x, m + k, IterMode::Step, &o).unwrap().0;
        prop_assert_eq!(&whole, &step);
        let h: Vec<_> = step.coords.iter().map(|c| coordinate_height(&basis, c)).collect();
        prop_assert_eq!(h.len(), 2);
    }

    #[test]
    fn product_orbit_is_orbit_pair((a, c, x) in small_monomial(), (a2, c2, y) in small_monomial(), n in 0u64..50) {
        let basis = GeneratorBasis::parse(Fp::new(7), &["t", "t + 1"]).unwrap();
        let f = ShiftedMonomialMap::monomial(basis.clone(), &c, &a).unwrap();
        let g = ShiftedMonomialMap::monomial(basis.clone(), &c2, &a2).unwrap();
        let fg = f.split_product(&g).unwrap();
        let xy = x.concat(&y, &[0, 1], 2);
        let o = opts();
        let lhs = iterate(&fg, &basis, &xy, n, IterMode::ClosedForm, &o).unwrap().0;
        let fx = iterate(&f, &basis, &x, n, IterMode::ClosedForm, &o).unwrap().0;
        let gy = iterate(&g, &basis, &y, n, IterMode::ClosedForm, &o).unwrap().0;
        prop_assert_eq!(lhs, fx.concat(&gy, &[0, 1], 2));
    }
}
