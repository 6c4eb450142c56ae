//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdml_core::experiments::{
    run_coefficient_refutation, run_frobenius_p_set, run_frobenius_twist_equality, run_quadratic_witness,
    run_split_experiment, split_preset, twist_preset, SplitVerdict,
};
use pdml_core::funcfield::places::{height, height_projective, northcott_enumerate, product_formula_check, FpRat};
use pdml_core::funcfield::{Fp, Poly, RatFunc};
use pdml_core::linalg::IntMatrix;
use pdml_core::setalg::{
    fit_descriptor, ArithProgression, ExpSumSet, FitLimits, Intersection, Membership, SetDescriptor,
};
use pdml_core::spectral::{
    self, cayley_hamilton_holds, classify_growth, exponent_chain_check, in_root_set, iterate_exponents_check,
    lyapunov_exponents_monomial, min_poly_of_root, modulus_criterion, GrowthCase, ZPoly,
};
use pdml_core::sunit::OracleParams;

type Outcome = Result<String, String>;

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let note = format!("{:.2}s", took.as_secs_f64());
    match (out, limit) {
        (Ok(msg), Some(lim)) if took > lim => Err(format!("{msg}; took {note}, limit {}s", lim.as_secs())),
        (Ok(msg), _) => Ok(format!("{msg}; {note}")),
        (Err(e), _) => Err(format!("{e}; {note}")),
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn oracle() -> OracleParams {
    OracleParams::default()
}

fn criterion_1() -> Outcome {
    let r = run_frobenius_p_set(5, 700, oracle()).map_err(|e| e.to_string())?;
    let members = r.return_set.members();
    ensure(members == vec![1, 5, 25, 125, 625], format!("members {members:?}"))?;
    let worst = r.worst_error_bound_log2;
    let all_bounded = r.return_set.entries.iter().filter(|e| e.member).all(|e| match e.error_bound_log2 {
        Some(b) => b <= -80.0,
        None => true,
    });
    ensure(all_bounded, format!("worst error bound 2^{worst:?}"))?;
    Ok(format!("members {members:?}, worst bound 2^{}", worst.map_or("-inf".into(), |b| format!("{b:.0}"))))
}

fn criterion_2() -> Outcome {
    let r = run_quadratic_witness(11, 2, oracle(), 20).map_err(|e| e.to_string())?;
    let ns: Vec<&str> = r.witnesses.iter().map(|w| w.n.as_str()).collect();
    ensure(ns == ["2", "132", "14762"], format!("witness indices {ns:?}"))?;
    let bad: Vec<&str> = r.witnesses.iter().filter(|w| !w.pass).map(|w| w.n.as_str()).collect();
    ensure(bad.is_empty(), format!("witnesses failed at {bad:?}"))?;
    ensure(r.non_members.len() == 20, format!("{} spot checks", r.non_members.len()))?;
    let uncertified: Vec<u64> = r.non_members.iter().filter(|c| !c.certified).map(|c| c.n).collect();
    ensure(uncertified.is_empty(), format!("not certified: {uncertified:?}"))?;
    ensure(r.non_members.iter().all(|c| c.n <= 14762), "spot index out of range")?;
    ensure(r.pass, "report did not pass")?;
    Ok("3 witnesses verified, 20 non-members certified".into())
}

fn criterion_3() -> Outcome {
    let r = run_coefficient_refutation(11, 1).map_err(|e| e.to_string())?;
    ensure(r.m == 144 && r.degree == 576, format!("m = {}", r.m))?;
    ensure(r.lhs_matches, format!("lhs coefficient {}", r.lhs_scaled))?;
    ensure(r.rhs_matches, format!("rhs coefficient {}", r.rhs_scaled))?;
    ensure(r.unequal, "coefficients agree")?;
    // Scaled by 16·y⁴(y²−1)⁴ the two coefficients are 16y² and 64(3 − 2y²).
    ensure(r.lhs_scaled == "16*y^2" && r.rhs_scaled == "-128*y^2 + 192", "scaled forms differ")?;
    Ok(format!("z^{} coefficients {} vs {}", r.degree, r.lhs_scaled, r.rhs_scaled))
}

fn criterion_4() -> Outcome {
    let sys = twist_preset(500, oracle()).map_err(|e| e.to_string())?;
    let r = run_frobenius_twist_equality(&sys, &BigInt::from(5), 500).map_err(|e| e.to_string())?;
    ensure(r.mismatches.is_empty(), format!("mismatches {:?}", r.mismatches))?;
    ensure(r.members == r.twisted_members && r.pass, "return sets differ")?;
    ensure(!r.members.is_empty(), "empty return set")?;
    Ok(format!("{} members agree on [0,500]", r.members.len()))
}

fn random_poly(rng: &mut ChaCha8Rng, fp: Fp, max_deg: usize) -> Poly<Fp> {
    let d = rng.gen_range(0..=max_deg);
    Poly::new(fp, (0..=d).map(|_| rng.gen_range(0..fp.p())).collect())
}

fn random_nonzero(rng: &mut ChaCha8Rng, fp: Fp, max_deg: usize) -> FpRat {
    loop {
        let num = random_poly(rng, fp, max_deg);
        let den = random_poly(rng, fp, max_deg);
        if !num.is_zero() && !den.is_zero() {
            return RatFunc::new(num, den).expect("nonzero denominator");
        }
    }
}

/// max(deg num, deg den) after clearing the common factor, by direct polynomial gcd.
fn naive_height(x: &FpRat) -> u64 {
    if x.is_zero() {
        return 0;
    }
    let g = x.num().gcd(x.den());
    (x.num().div_exact(&g).deg().max(x.den().div_exact(&g).deg())) as u64
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    for p in [2u64, 5, 11] {
        let fp = Fp::new(p);
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        let mut fail = [0usize; 5];
        for _ in 0..10_000 {
            let x = random_nonzero(&mut rng, fp, 5);
            let y = random_nonzero(&mut rng, fp, 5);
            let c = random_nonzero(&mut rng, fp, 4);
            let (hx, hy) = (height(&x).0, height(&y).0);
            let bound = &hx + &hy;
            fail[0] += usize::from(product_formula_check(&x) != 0);
            fail[1] += usize::from(height(&x.add(&y)).0 > bound || height(&x.sub(&y)).0 > bound);
            fail[2] += usize::from(height(&x.mul(&y)).0 > bound);
            let one = RatFunc::one(fp);
            let proj = height_projective(&[x.clone(), y.clone(), one.clone()]).unwrap();
            let scaled = height_projective(&[x.mul(&c), y.mul(&c), c.clone()]).unwrap();
            fail[3] += usize::from(proj != scaled);
            // Two routes to h(x): degrees of the reduced fraction, and [x : 1] over all places.
            let naive = naive_height(&x);
            fail[4] += usize::from(height_projective(&[x.clone(), one]).unwrap().0 != naive.into() || hx != naive.into());
        }
        if fail.iter().any(|&f| f > 0) {
            failures.push(format!("p = {p}: failures {fail:?}"));
        }
    }
    ensure(failures.is_empty(), failures.join("; "))?;

    // Brute force over (at + b)/(ct + d) in F_2: classes under cross-multiplication.
    let fp2 = Fp::new(2);
    let mut classes: Vec<[u64; 4]> = Vec::new();
    for code in 0..16u64 {
        let q = [code & 1, code >> 1 & 1, code >> 2 & 1, code >> 3 & 1];
        if q[2] == 0 && q[3] == 0 {
            continue;
        }
        // (a t + b)(c' t + d') = (a' t + b')(c t + d) over F_2
        let same = |r: &[u64; 4]| {
            let lhs = [q[0] * r[2], q[0] * r[3] + q[1] * r[2], q[1] * r[3]];
            let rhs = [r[0] * q[2], r[0] * q[3] + r[1] * q[2], r[1] * q[3]];
            lhs.iter().zip(&rhs).all(|(u, v)| u % 2 == v % 2)
        };
        if !classes.iter().any(same) {
            classes.push(q);
        }
    }
    let listed = northcott_enumerate(fp2, 1);
    ensure(listed.len() == 8 && classes.len() == 8, format!("Northcott count {} vs brute force {}", listed.len(), classes.len()))?;
    ensure(listed.iter().all(|x| naive_height(x) <= 1), "enumerated element above the bound")?;
    Ok("3 x 10^4 instances, 0 failures; Northcott count 8".into())
}

/// x_n = P(n)·a^n + Q(n)·b^n for n in 0..len.
fn family(p: &[i64], a: &BigRational, q: &[i64], b: &BigRational, len: usize) -> Vec<BigRational> {
    let eval = |c: &[i64], n: i64| c.iter().rev().fold(BigInt::zero(), |acc, &k| acc * n + k);
    let (mut an, mut bn) = (BigRational::from_integer(1.into()), BigRational::from_integer(1.into()));
    let mut out = Vec::with_capacity(len);
    for n in 0..len as i64 {
        out.push(&an * BigRational::from_integer(eval(p, n)) + &bn * BigRational::from_integer(eval(q, n)));
        an *= a;
        bn *= b;
    }
    out
}

fn criterion_6() -> Outcome {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    // (a, b, expected case); Q is constant when |b| = 1 so that the m-th difference stays bounded.
    let pairs = [
        (r(2, 1), r(1, 1), GrowthCase::I),
        (r(3, 1), r(1, 2), GrowthCase::I),
        (r(-2, 1), r(-1, 1), GrowthCase::I),
        (r(5, 2), r(1, 3), GrowthCase::I),
        (r(-3, 1), r(0, 1), GrowthCase::I),
        (r(1, 1), r(1, 2), GrowthCase::II),
        (r(-1, 1), r(-1, 3), GrowthCase::II),
        (r(1, 1), r(0, 1), GrowthCase::II),
        (r(1, 2), r(1, 3), GrowthCase::III),
        (r(-1, 2), r(-1, 4), GrowthCase::III),
        (r(2, 3), r(0, 1), GrowthCase::III),
    ];
    let ps: [&[i64]; 5] = [&[3], &[1, 1], &[-2, 0, 1], &[0, 0, 2], &[5, -1]];
    let mut count = 0;
    let mut worst_rel = 0.0f64;
    for (a, b, case) in &pairs {
        for (j, p) in ps.iter().enumerate() {
            let q: Vec<i64> = if b.abs() == r(1, 1) { vec![4] } else { vec![1 + j as i64, -1] };
            let xs = family(p, a, &q, b, 200);
            let deg = p.len() - 1;
            let m = deg + 1;
            let g = classify_growth(&xs, a, m).map_err(|e| e.to_string())?;
            ensure(g.case == *case, format!("P = {p:?}, a = {a}: case {:?}", g.case))?;
            ensure(g.hypothesis_holds, format!("P = {p:?}, a = {a}: m-th difference unbounded"))?;
            let expected_k = match case {
                GrowthCase::I => Some(deg),
                GrowthCase::II => deg.checked_sub(1),
                GrowthCase::III => None,
            };
            ensure(g.k == expected_k, format!("P = {p:?}, a = {a}: k = {:?}, expected {expected_k:?}", g.k))?;
            if *case == GrowthCase::I {
                let lead = *p.last().unwrap() as f64;
                let est = g.limit_estimate.ok_or("no limit estimate")?;
                let rel = ((est - lead) / lead).abs();
                worst_rel = worst_rel.max(rel);
                ensure(rel <= 0.01, format!("P = {p:?}, a = {a}: limit {est} vs {lead}"))?;
            }
            count += 1;
        }
    }
    ensure(count >= 50, format!("only {count} families"))?;
    Ok(format!("{count} families classified, worst limit error {:.1e}", worst_rel))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    loop {
        let n = rng.gen_range(1..=4);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let a = IntMatrix::from_i64(&rows);
        if !a.det().is_zero() {
            return a;
        }
    }
}

fn root_corpus() -> Vec<ZPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut corpus = Vec::new();
    let mut binomials = 0;
    while corpus.len() < 100 {
        let f = if binomials < 40 {
            // x^n − a
            let n = rng.gen_range(1..=6usize);
            let mut c = vec![0i64; n + 1];
            c[0] = -rng.gen_range(2..=40);
            c[n] = 1;
            ZPoly::from_i64s(&c)
        } else {
            let n = rng.gen_range(2..=5usize);
            let mut c: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=6)).collect();
            c.push(1);
            ZPoly::from_i64s(&c)
        };
        if !spectral::is_irreducible_z(&f) {
            continue;
        }
        let Ok(mu) = min_poly_of_root(&f) else { continue };
        if !mu.is_positive_real() {
            continue;
        }
        if binomials < 40 {
            binomials += 1;
        }
        corpus.push(f);
    }
    corpus
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = random_matrix(&mut rng);
        let chain = exponent_chain_check(&a).map_err(|e| e.to_string())?;
        ensure(chain.products_match && chain.top_is_det && chain.ordered, format!("exponent chain fails for {a:?}"))?;
        // Independent float check of ∏μ = |det A|.
        let mus = lyapunov_exponents_monomial(&a).map_err(|e| e.to_string())?;
        let prod: f64 = mus.iter().map(|m| m.to_f64()).product();
        let det = a.det().abs().to_f64().unwrap();
        ensure((prod - det).abs() <= 1e-9 * det.max(1.0), format!("product {prod} vs |det| {det}"))?;
        ensure(mus.windows(2).all(|w| w[0].to_f64() >= w[1].to_f64() - 1e-12), "exponents out of order")?;
        ensure(iterate_exponents_check(&a, 2).map_err(|e| e.to_string())?, format!("μ(A²) ≠ μ(A)² for {a:?}"))?;
        ensure(cayley_hamilton_holds(&a), format!("Cayley-Hamilton residual nonzero for {a:?}"))?;
    }
    let corpus = root_corpus();
    let mut in_set = 0;
    for f in &corpus {
        let mu = min_poly_of_root(f).map_err(|e| e.to_string())?;
        let root = in_root_set(&mu).map_err(|e| e.to_string())?;
        let crit = modulus_criterion(&mu).map_err(|e| e.to_string())?;
        ensure(root == crit.all_equal, format!("root test {root} vs modulus criterion {} for {f}", crit.all_equal))?;
        ensure(crit.all_equal || crit.certified_separation, "criterion neither equal nor separated")?;
        in_set += usize::from(root);
    }
    ensure(in_set > 0 && in_set < corpus.len(), "corpus is one-sided")?;
    Ok(format!("100 matrices; {} polynomials, {in_set} in the root set", corpus.len()))
}

fn criterion_8() -> Outcome {
    let input = split_preset(5, 300, oracle()).map_err(|e| e.to_string())?;
    let r = run_split_experiment(&input).map_err(|e| e.to_string())?;
    ensure(r.lambda1_approx == 1.0, format!("λ1 = {}", r.lambda1_approx))?;
    ensure(r.ksm.pass, "KSM upper check failed")?;
    ensure(r.eps0 <= 1.0 && r.gap.pass, "ample-gap lower check failed")?;
    ensure(r.finite_on_window, format!("return indices {:?}", r.return_indices))?;
    ensure(r.verdict == SplitVerdict::ContradictionExhibited, format!("verdict {:?}", r.verdict))?;
    Ok(format!("return indices {:?}, verdict contradiction-exhibited", r.return_indices))
}

fn random_descriptor(rng: &mut ChaCha8Rng) -> SetDescriptor {
    let mut d = match rng.gen_range(0..3) {
        0 => SetDescriptor::progression(ArithProgression::new(rng.gen_range(0..8i64), rng.gen_range(0..20i64))),
        1 => {
            let q = [5u64, 25][rng.gen_range(0..2)];
            let rows: Vec<Vec<i64>> =
                (0..rng.gen_range(1..=2)).map(|_| (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=3)).collect()).collect();
            SetDescriptor::exp_sum(ExpSumSet::from_ints(q, rng.gen_range(0..3), &rows).unwrap())
        }
        _ => {
            let a = SetDescriptor::progression(ArithProgression::new(rng.gen_range(1..6i64), rng.gen_range(0..6i64)));
            let s = SetDescriptor::exp_sum(ExpSumSet::from_ints(5, 0, &[vec![1]]).unwrap());
            a.union(&s).unwrap()
        }
    };
    for _ in 0..rng.gen_range(0..3) {
        d.add.insert(BigInt::from(rng.gen_range(0..200)));
    }
    d
}

fn member_set(d: &dyn Fn(&BigInt) -> Membership, n: u64) -> Result<BTreeSet<u64>, String> {
    let mut out = BTreeSet::new();
    for k in 0..=n {
        match d(&BigInt::from(k)) {
            Membership::Member(_) => {
                out.insert(k);
            }
            Membership::NotMember => {}
            Membership::Unknown { .. } => return Err(format!("{k} undecided")),
        }
    }
    Ok(out)
}

fn window_set(members: &[BigInt]) -> BTreeSet<u64> {
    members.iter().map(|x| x.to_u64().unwrap()).collect()
}

fn criterion_9(p_set_members: &[u64]) -> Outcome {
    const N: u64 = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut exact = 0;
    for i in 0..1000 {
        let (a, b) = (random_descriptor(&mut rng), random_descriptor(&mut rng));
        let sa = member_set(&|n| a.contains(n), N)?;
        let sb = member_set(&|n| b.contains(n), N)?;
        let wa = a.window(N);
        ensure(wa.unknown.is_empty() && window_set(&wa.members) == sa, format!("pair {i}: window/contains disagree for {a}"))?;
        let u = a.union(&b).map_err(|e| e.to_string())?;
        ensure(u.declared_type == a.declared_type.max(b.declared_type), format!("pair {i}: union type"))?;
        let su: BTreeSet<u64> = sa.union(&sb).copied().collect();
        ensure(window_set(&u.window(N).members) == su, format!("pair {i}: union window for {a} and {b}"))?;
        ensure(member_set(&|n| u.contains(n), N)? == su, format!("pair {i}: union contains"))?;
        let x = a.intersect(&b).map_err(|e| e.to_string())?;
        let si: BTreeSet<u64> = sa.intersection(&sb).copied().collect();
        ensure(window_set(&x.window(N).members) == si, format!("pair {i}: intersection window for {a} and {b}"))?;
        ensure(member_set(&|n| x.contains(n), N)? == si, format!("pair {i}: intersection contains"))?;
        if let Intersection::Exact(d) = &x {
            ensure(d.declared_type == 0 && d.exp_sums.is_empty(), format!("pair {i}: progression intersection typed"))?;
            exact += 1;
        }
    }
    ensure(exact > 0, "no exact progression intersections drawn")?;
    let observed: BTreeSet<u64> = p_set_members.iter().copied().collect();
    let top = fit_descriptor(&observed, 5, 700, &FitLimits::default()).into_iter().next();
    let target = SetDescriptor::exp_sum(ExpSumSet::from_ints(5, 0, &[vec![1]]).unwrap());
    ensure(top.as_ref() == Some(&target), format!("top fit {:?}", top.map(|t| t.to_string())))?;
    Ok(format!("10^3 pairs ({exact} exact intersections), fit recovers {target}"))
}

fn criterion_10() -> Outcome {
    let runs: Vec<(&str, Box<dyn Fn() -> Result<String, String>>)> = vec![
        ("p-set", Box::new(|| ser(&run_frobenius_p_set(5, 700, oracle())))),
        ("witness", Box::new(|| ser(&run_quadratic_witness(11, 2, oracle(), 20)))),
        ("refutation", Box::new(|| ser(&run_coefficient_refutation(11, 1)))),
        (
            "twist",
            Box::new(|| {
                let sys = twist_preset(500, oracle()).map_err(|e| e.to_string())?;
                ser(&run_frobenius_twist_equality(&sys, &BigInt::from(5), 500))
            }),
        ),
        (
            "split",
            Box::new(|| {
                let input = split_preset(5, 300, oracle()).map_err(|e| e.to_string())?;
                ser(&run_split_experiment(&input))
            }),
        ),
    ];
    for (name, run) in &runs {
        let (a, b) = (run()?, run()?);
        ensure(a == b, format!("{name} report differs between runs"))?;
    }
    Ok(format!("{} presets byte-identical", runs.len()))
}

fn ser<T: serde::Serialize, E: std::fmt::Display>(r: &Result<T, E>) -> Result<String, String> {
    match r {
        Ok(v) => serde_json::to_string_pretty(v).map_err(|e| e.to_string()),
        Err(e) => Err(e.to_string()),
    }
}

fn main() {
    // libtest flags such as --nocapture or a name filter are accepted and ignored.
    let p_set_members = run_frobenius_p_set(5, 700, oracle()).map(|r| r.return_set.members()).unwrap_or_default();
    let s = |secs| Some(Duration::from_secs(secs));
    let results = [
        ("1 frobenius p-set", timed(s(10), criterion_1)),
        ("2 unipotent witnesses", timed(s(60), criterion_2)),
        ("3 coefficient refutation", timed(s(30), criterion_3)),
        ("4 frobenius twist", timed(None, criterion_4)),
        ("5 heights", timed(None, criterion_5)),
        ("6 growth classification", timed(None, criterion_6)),
        ("7 spectral", timed(None, criterion_7)),
        ("8 split system", timed(None, criterion_8)),
        ("9 set algebra", timed(None, || criterion_9(&p_set_members))),
        ("10 determinism", timed(None, criterion_10)),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("criterion {name}: PASS ({msg})"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({msg})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
