use proptest::prelude::*;

use super::*;

fn b(v: i64) -> BigInt {
    BigInt::from(v)
}

fn set_of(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| b(x)).collect()
}

fn powers_sum(p: u64) -> ExpSumSet {
    ExpSumSet::from_ints(p, 0, &[vec![1], vec![1]]).unwrap()
}

#[test]
fn two_power_sums() {
    let s = powers_sum(5);
    assert_eq!(s.contains(&b(5 + 125), 0), Membership::Member(Witness::ExpSum { index: 0, exponents: vec![1, 3] }));
    assert_eq!(s.contains(&b(3), 0), Membership::NotMember);
    // brute force over exponents ≤ 2: {2, 6, 10, 26, 30, 50}
    let brute: BTreeSet<i64> =
        (0..3).flat_map(|a| (0..3).map(move |c| 5i64.pow(a) + 5i64.pow(c))).collect();
    assert_eq!(brute.into_iter().collect::<Vec<_>>(), vec![2, 6, 10, 26, 30, 50]);
    assert_eq!(s.members_in(&b(0), &b(50)).unwrap().into_iter().collect::<Vec<_>>(), set_of(&[2, 6, 10, 26, 30, 50]));
}

#[test]
fn normalized_power_sets() {
    // (5^n − 1)/4
    let r = |n: i64, d: i64| BigRational::new(b(n), b(d));
    let s = ExpSumSet::new(5, r(-1, 4), vec![vec![r(1, 4)]]).unwrap();
    assert!(s.is_p_normal_admissible().0);
    let expected: Vec<BigInt> = (0..6u32).map(|n| b((5i64.pow(n) - 1) / 4)).filter(|x| *x <= b(1000)).collect();
    let d = SetDescriptor::exp_sum(s);
    assert_eq!(d.declared_type, 1);
    assert_eq!(d.window(1000).members, expected);
    // (1 + 4·5^n)/4 is never an integer
    let t = ExpSumSet::new(5, r(1, 4), vec![vec![r(4, 4)]]).unwrap();
    assert!(!t.is_p_normal_admissible().0);
    assert!(SetDescriptor::exp_sum(t).window(1000).members.is_empty());
}

#[test]
fn windows() {
    let ap = SetDescriptor::progression(ArithProgression::new(3, 1));
    assert_eq!(ap.window(10).members, set_of(&[1, 4, 7, 10]));
    let pow5 = SetDescriptor::exp_sum(ExpSumSet::from_ints(5, 0, &[vec![1]]).unwrap());
    assert_eq!(pow5.window(700).members, set_of(&[1, 5, 25, 125, 625]));
    let tower = SetDescriptor::exp_sum(ExpSumSet::from_ints(11, 0, &[vec![1, 1]]).unwrap());
    assert_eq!(tower.window(20000).members, set_of(&[2, 132, 14762]));
    assert_eq!(tower.declared_type, 2);
}

#[test]
fn closure_operations() {
    let evens = SetDescriptor::progression(ArithProgression::new(2, 0));
    let threes = SetDescriptor::progression(ArithProgression::new(3, 0));
    let odds = SetDescriptor::progression(ArithProgression::new(2, 1));
    match evens.intersect(&threes).unwrap() {
        Intersection::Exact(d) => assert_eq!(d.progressions, vec![ArithProgression::new(6, 0)]),
        other => panic!("{other:?}"),
    }
    match evens.intersect(&odds).unwrap() {
        Intersection::Exact(d) => assert!(d.window(100).members.is_empty()),
        other => panic!("{other:?}"),
    }
    let pow5 = SetDescriptor::exp_sum(ExpSumSet::from_ints(5, 0, &[vec![1]]).unwrap());
    let u = pow5.union(&threes).unwrap();
    assert_eq!(u.declared_type, 1);
    let expected: Vec<BigInt> =
        (0..=30).filter(|n| n % 3 == 0 || [1, 5, 25].contains(n)).map(b).collect();
    assert_eq!(u.window(30).members, expected);
    assert!(matches!(pow5.intersect(&threes).unwrap(), Intersection::WindowedOnly(_)));
    let seven = SetDescriptor::exp_sum(ExpSumSet::from_ints(7, 0, &[vec![1]]).unwrap());
    assert_eq!(pow5.union(&seven), Err(SetError::PrimeMismatch(5, 7)));
}

#[test]
fn progression_crt_offsets() {
    let a = ArithProgression::new(4, 7);
    let c = ArithProgression::new(6, 1);
    let i = a.intersect(&c).unwrap();
    assert_eq!(i, ArithProgression::new(12, 7));
    let z = ArithProgression::with_ambient(4, -1, Ambient::Z);
    assert_eq!(z.l, b(3));
    assert!(z.contains(&b(-5)));
}

#[test]
fn admissibility() {
    let r = |n: i64| BigRational::new(b(n), b(4));
    let ok = ExpSumSet::new(5, r(1), vec![vec![r(3)]]).unwrap();
    assert!(ok.is_p_normal_admissible().0);
    let bad = ExpSumSet::new(5, r(1), vec![vec![r(1)]]).unwrap();
    assert!(!bad.is_p_normal_admissible().0);
    let tower = ExpSumSet::from_ints(5, 0, &[vec![1, 1]]).unwrap();
    let (ok, why) = tower.is_p_normal_admissible();
    assert!(!ok && why.contains("r > 0"));
    assert!(SetDescriptor::new(vec![], vec![tower.clone()], BTreeSet::new(), BTreeSet::new(), 1).is_err());
    assert!(SetDescriptor::new(vec![], vec![tower], BTreeSet::new(), BTreeSet::new(), 0).is_err());
}

#[test]
fn finite_differences() {
    let evens = SetDescriptor::progression(ArithProgression::new(2, 0));
    let same = equal_up_to_finite(&evens, &evens, 100);
    assert_eq!(same.count, 0);
    let mut plus = evens.clone();
    plus.add.extend(set_of(&[1, 3, 5]));
    let d = equal_up_to_finite(&evens, &plus, 100);
    assert_eq!((d.count, d.stable), (3, true));
    assert_eq!(d.sample, set_of(&[1, 3, 5]));
    let odds = SetDescriptor::progression(ArithProgression::new(2, 1));
    let d = equal_up_to_finite(&evens, &odds, 100);
    assert_eq!(d.count, 101);
    assert!(!d.stable);
}

#[test]
fn complexity_examples() {
    assert_eq!(SetDescriptor::exp_sum(powers_sum(5)).complexity(), 2);
    assert_eq!(SetDescriptor::exp_sum(ExpSumSet::from_ints(11, 0, &[vec![1, 1]]).unwrap()).complexity(), 3);
    assert_eq!(SetDescriptor::progression(ArithProgression::new(3, 0)).complexity(), 0);
}

#[test]
fn fitting() {
    let obs: BTreeSet<u64> = [1, 5, 25, 125, 625].into_iter().collect();
    let fits = fit_descriptor(&obs, 5, 700, &FitLimits::default());
    assert_eq!(fits[0], SetDescriptor::exp_sum(ExpSumSet::from_ints(5, 0, &[vec![1]]).unwrap()));
    let obs: BTreeSet<u64> = [0, 3, 6, 9].into_iter().collect();
    let fits = fit_descriptor(&obs, 5, 10, &FitLimits::default());
    assert_eq!(fits[0], SetDescriptor::progression(ArithProgression::new(3, 0)));
    let obs: BTreeSet<u64> = [2, 132, 14762].into_iter().collect();
    let limits = FitLimits { max_q_exp: 1, max_d: 1, max_r: 1, coeff_bound: 1 };
    let fits = fit_descriptor(&obs, 11, 20000, &limits);
    let tower = SetDescriptor::exp_sum(ExpSumSet::from_ints(11, 0, &[vec![1, 1]]).unwrap());
    assert!(fits.contains(&tower));
    assert!(fits.iter().all(|f| f.window(20000).members == set_of(&[2, 132, 14762])));
}

#[test]
fn json_shape() {
    let text = r#"{"type":2,"progressions":[{"m":3,"l":1}],"expSums":[{"q":25,"d":2,"r":1,"c0":"0","c":[["1","2"],["1","0"]]}],"add":[],"remove":[]}"#;
    let d: DescriptorJson = serde_json::from_str(text).unwrap();
    let desc = d.to_descriptor().unwrap();
    assert_eq!(desc.exp_sums[0].r(), vec![1, 0]);
    assert_eq!(desc.complexity(), 2 + 1 + 1);
    let back = DescriptorJson::from_descriptor(&desc);
    assert_eq!(back.to_descriptor().unwrap(), desc);
}

fn ap_strategy() -> impl Strategy<Value = ArithProgression> {
    (0i64..6, 0i64..12).prop_map(|(m, l)| ArithProgression::new(m, l))
}

fn exp_strategy() -> impl Strategy<Value = ExpSumSet> {
    let row = prop_oneof![
        (-2i64..3, 1i64..3).prop_map(|(a, top)| vec![a, top]),
        (1i64..3).prop_map(|top| vec![top]),
        (-2i64..3, -2i64..0).prop_map(|(a, top)| vec![a, top]),
    ];
    (prop_oneof![Just(2u64), Just(3), Just(4), Just(5)], -3i64..4, proptest::collection::vec(row, 1..3))
        .prop_map(|(q, c0, rows)| ExpSumSet::from_ints(q, c0, &rows).unwrap())
}

fn desc_strategy() -> impl Strategy<Value = SetDescriptor> {
    (
        proptest::collection::vec(ap_strategy(), 0..3),
        proptest::collection::vec(exp_strategy(), 0..2),
        proptest::collection::btree_set(0i64..40, 0..3),
        proptest::collection::btree_set(40i64..80, 0..3),
    )
        .prop_map(|(aps, exps, add, rem)| {
            let q = exps.first().map(|s| s.q());
            let exps: Vec<ExpSumSet> = exps.into_iter().filter(|s| Some(s.q()) == q).collect();
            let ty = if exps.is_empty() { 0 } else { 2 };
            SetDescriptor::new(aps, exps, add.into_iter().map(b).collect(), rem.into_iter().map(b).collect(), ty)
                .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contains_agrees_with_window(d in desc_strategy()) {
        let w = d.window(120);
        for n in 0..=120i64 {
            let n = b(n);
            match d.contains(&n) {
                Membership::Member(_) => prop_assert!(w.members.contains(&n)),
                Membership::NotMember => prop_assert!(!w.members.contains(&n) && !w.unknown.contains(&n)),
                Membership::Unknown { .. } => prop_assert!(w.unknown.contains(&n)),
            }
        }
    }

    #[test]
    fn boolean_combinations_pointwise(a in desc_strategy(), c in desc_strategy()) {
        prop_assume!(a.p().is_none() || c.p().is_none() || a.p() == c.p());
        let (wa, wc) = (a.window(100), c.window(100));
        let u = a.union(&c).unwrap().window(100);
        let i = a.intersect(&c).unwrap().window(100);
        for n in (0..=100i64).map(b) {
            let ina = wa.members.contains(&n);
            let inc = wc.members.contains(&n);
            let undecided = wa.unknown.contains(&n) || wc.unknown.contains(&n);
            if !undecided {
                prop_assert_eq!(u.members.contains(&n), ina || inc);
                prop_assert_eq!(i.members.contains(&n), ina && inc);
            }
        }
    }

    #[test]
    fn type_labels_preserved(a in proptest::collection::vec(ap_strategy(), 1..3), c in proptest::collection::vec(ap_strategy(), 1..3)) {
        let da = SetDescriptor::new(a, vec![], BTreeSet::new(), BTreeSet::new(), 0).unwrap();
        let dc = SetDescriptor::new(c, vec![], BTreeSet::new(), BTreeSet::new(), 0).unwrap();
        prop_assert_eq!(da.union(&dc).unwrap().declared_type, 0);
        match da.intersect(&dc).unwrap() {
            Intersection::Exact(d) => prop_assert_eq!(d.declared_type, 0),
            Intersection::WindowedOnly(_) => prop_assert!(false),
        }
    }

    #[test]
    fn complete_search_has_no_boundary_misses(s in exp_strategy(), n in 0i64..400) {
        prop_assume!(s.is_complete_searchable());
        let target = BigRational::from_integer(b(n));
        // brute force over exponents ≤ 8, far past the search bounds for n < 400
        let d = s.d();
        let mut found = false;
        let total = 9usize.pow(d as u32);
        for code in 0..total {
            let mut c = code;
            let exps: Vec<u64> = (0..d).map(|_| { let e = (c % 9) as u64; c /= 9; e }).collect();
            if s.value(&exps) == target {
                found = true;
                break;
            }
        }
        prop_assert_eq!(s.contains(&b(n), 0).is_member(), found);
    }

    #[test]
    fn admissibility_permutation_invariant(c in proptest::collection::vec(-6i64..7, 3), c0 in -6i64..7) {
        let r = |v: i64| BigRational::new(b(v), b(4));
        let fwd = ExpSumSet::new(5, r(c0), c.iter().map(|&x| vec![r(x)]).collect()).unwrap();
        let rev = ExpSumSet::new(5, r(c0), c.iter().rev().map(|&x| vec![r(x)]).collect()).unwrap();
        prop_assert_eq!(fwd.is_p_normal_admissible().0, rev.is_p_normal_admissible().0);
    }
}
