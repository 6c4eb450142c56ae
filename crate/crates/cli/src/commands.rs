use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use anyhow::Result;
use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use serde_json::Value;

use pdml_core::experiments::{
    run_coefficient_refutation, run_frobenius_p_set, run_frobenius_twist_equality, run_quadratic_witness,
    run_split_experiment, split_preset, twist_preset, SplitVerdict,
};
use pdml_core::funcfield::field::is_prime_u64;
use pdml_core::funcfield::places::{self, FpRat};
use pdml_core::funcfield::{parse_ratfunc, Fp};
use pdml_core::setalg::{
    fit_descriptor, DescriptorJson, FitLimits, Intersection, Membership, SetDescriptor, Witness,
};
use pdml_core::spectral::{
    self, conjugates_of, factor_z, AlgebraicJson, AlgebraicNumber, ZPoly,
};
use pdml_core::sunit::{AddConstantOptions, OracleParams, PointJson};
use pdml_core::torusdyn::{orbit, return_set, ScanOptions, System, SystemFile};

use crate::report::{render, write_atomic, Envelope};
use crate::{Cli, Command, Global, GrowthCommand, SeqArgs, SetCommand, SpectralCommand, SystemArgs, VerifyCommand};

/// Bad arguments or unreadable input; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<System> {
    let file: SystemFile = read_json(path)?;
    file.decode().map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_desc(path: &Path) -> Result<SetDescriptor> {
    let d: DescriptorJson = read_json(path)?;
    d.to_descriptor().map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn prime(p: u64) -> Result<Fp> {
    if !is_prime_u64(p) {
        return Err(usage(format!("{p} is not prime")));
    }
    Ok(Fp::new(p))
}

fn oracle(g: &Global, base: OracleParams, seed: u64) -> OracleParams {
    OracleParams {
        degree: g.oracle_degree.unwrap_or(base.degree),
        trials: g.oracle_trials.unwrap_or(base.trials),
        seed,
    }
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| usage(format!("not an integer: \"{s}\"")))
}

fn parse_rational(s: &str) -> Result<num_rational::BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_bigint(d)?;
            if d == BigInt::from(0) {
                return Err(usage(format!("zero denominator in \"{s}\"")));
            }
            Ok(num_rational::BigRational::new(parse_bigint(n)?, d))
        }
        None => Ok(num_rational::BigRational::from_integer(parse_bigint(s)?)),
    }
}

/// Comma-separated values, or a JSON array read from @file.
fn sequence(arg: &SeqArgs) -> Result<Vec<String>> {
    if let Some(path) = arg.seq.strip_prefix('@') {
        let v: Vec<Value> = read_json(Path::new(path))?;
        return Ok(v.iter().map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string)).collect());
    }
    Ok(arg.seq.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
}

fn int_list(s: &str) -> Result<Vec<BigInt>> {
    let v: Vec<Value> = serde_json::from_str(s).map_err(|e| usage(format!("expected a JSON array: {e}")))?;
    v.iter().map(|x| parse_bigint(x.as_str().map_or(&x.to_string(), |s| s))).collect()
}

fn matrix(s: &str) -> Result<pdml_core::linalg::IntMatrix> {
    spectral::parse_matrix_json(s).map_err(|e| usage(e.to_string()))
}

fn emit(g: &Global, env: &Envelope) -> Result<bool> {
    if let Some(path) = &g.out {
        write_atomic(path, &env.to_json()?)?;
    }
    print!("{}", render(&serde_json::to_value(env)?)?);
    Ok(env.pass)
}

pub fn dispatch(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    let entropy_seed = || g.seed.unwrap_or_else(rand::random);
    let env = match &cli.command {
        Command::Orbit(a) => orbit_cmd(a)?,
        Command::ReturnSet(a) => return_set_cmd(g, a)?,
        Command::Twist { system, q } => {
            let sys = load_system(&system.system)?;
            let seed = g.seed.unwrap_or(sys.oracle.seed);
            let sys = System { oracle: oracle(g, sys.oracle, seed), ..sys };
            let n = system.n.unwrap_or(sys.window);
            let r = run_frobenius_twist_equality(&sys, &parse_bigint(q)?, n)?;
            Envelope::new("twist", seed, r.pass, &r)?
        }
        Command::Set(c) => set_cmd(c, entropy_seed())?,
        Command::Spectral(c) => spectral_cmd(c, entropy_seed())?,
        Command::Growth(c) => growth_cmd(c, entropy_seed())?,
        Command::Verify(c) => verify_cmd(g, c, entropy_seed())?,
        Command::Northcott { p, a } => northcott_cmd(*p, *a, entropy_seed())?,
        Command::Height { p, x } => height_cmd(*p, x, entropy_seed())?,
        Command::Render { report } => {
            let v: Value = read_json(report)?;
            print!("{}", render(&v).map_err(|e| usage(e.to_string()))?);
            return Ok(true);
        }
    };
    emit(g, &env)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OrbitPoint {
    n: u64,
    point: PointJson,
    heights: Vec<String>,
    basis_len: usize,
}

#[derive(Serialize)]
struct OrbitOut {
    p: u64,
    generators: Vec<String>,
    extensions: Vec<(u64, String)>,
    points: Vec<OrbitPoint>,
}

fn orbit_cmd(a: &SystemArgs) -> Result<Envelope> {
    let sys = load_system(&a.system)?;
    let n = a.n.unwrap_or(sys.window);
    let orb = orbit(&sys.map, &sys.start, n, &AddConstantOptions::default())?;
    let out = OrbitOut {
        p: orb.basis.p(),
        generators: orb.basis.generators().iter().map(|g| g.render("t")).collect(),
        extensions: orb.extensions.clone(),
        points: orb
            .records
            .iter()
            .map(|r| OrbitPoint {
                n: r.n,
                point: PointJson::from_point(&r.point),
                heights: r.heights.iter().map(|h| h.to_string()).collect(),
                basis_len: r.basis_len,
            })
            .collect(),
    };
    Envelope::new("orbit", sys.oracle.seed, true, &out)
}

fn return_set_cmd(g: &Global, a: &SystemArgs) -> Result<Envelope> {
    let sys = load_system(&a.system)?;
    let seed = g.seed.unwrap_or(sys.oracle.seed);
    let opts = ScanOptions { oracle: oracle(g, sys.oracle, seed), ..ScanOptions::default() };
    let n = a.n.unwrap_or(sys.window);
    let r = return_set(&sys.map, &sys.start, &sys.equations, n, &opts)?;
    Envelope::new("return-set", seed, true, &r)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MemberOut {
    value: String,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    search_cap: Option<u64>,
}

fn membership_out(value: &BigInt, m: &Membership) -> MemberOut {
    let (verdict, witness, search_cap) = match m {
        Membership::Member(w) => {
            let w = match w {
                Witness::Progression { index, k } => format!("progression {} at k = {k}", index + 1),
                Witness::ExpSum { index, exponents } => format!(
                    "exponential sum {} at exponents ({})",
                    index + 1,
                    exponents.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
                ),
                Witness::Added => "listed element".into(),
            };
            ("member", Some(w), None)
        }
        Membership::NotMember => ("not member", None, None),
        Membership::Unknown { cap } => ("unknown", None, Some(*cap)),
    };
    MemberOut { value: value.to_string(), verdict, witness, search_cap }
}

#[derive(Serialize)]
struct WindowOut {
    n: u64,
    members: Vec<String>,
    unknown: Vec<String>,
}

#[derive(Serialize)]
struct DescriptorOut {
    set: String,
    descriptor: DescriptorJson,
}

impl DescriptorOut {
    fn of(d: &SetDescriptor) -> Self {
        DescriptorOut { set: d.to_string(), descriptor: DescriptorJson::from_descriptor(d) }
    }
}

#[derive(Serialize)]
struct AdmissibleOut {
    set: String,
    admissible: bool,
    reason: String,
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(T::to_string).collect()
}

fn set_cmd(c: &SetCommand, seed: u64) -> Result<Envelope> {
    match c {
        SetCommand::Member { desc, value } => {
            let d = load_desc(desc)?;
            let v = parse_bigint(value)?;
            Envelope::new("set member", seed, true, membership_out(&v, &d.contains(&v)))
        }
        SetCommand::Window { desc, n } => {
            let w = load_desc(desc)?.window(*n);
            let out = WindowOut { n: *n, members: strings(&w.members), unknown: strings(&w.unknown) };
            Envelope::new("set window", seed, true, out)
        }
        SetCommand::Union { desc, other } => {
            let u = load_desc(desc)?.union(&load_desc(other)?).map_err(|e| usage(e.to_string()))?;
            Envelope::new("set union", seed, true, DescriptorOut::of(&u))
        }
        SetCommand::Intersect { desc, other, n } => {
            let x = load_desc(desc)?.intersect(&load_desc(other)?).map_err(|e| usage(e.to_string()))?;
            let out = match &x {
                Intersection::Exact(d) => serde_json::to_value(DescriptorOut::of(d))?,
                Intersection::WindowedOnly(w) => {
                    let r = w.window(*n);
                    serde_json::to_value(WindowOut { n: *n, members: strings(&r.members), unknown: strings(&r.unknown) })?
                }
            };
            Envelope::new("set intersect", seed, true, out)
        }
        SetCommand::Fit { values, report, p, n } => {
            prime(*p)?;
            let observed: BTreeSet<u64> = match (values, report) {
                (Some(v), _) => v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse().map_err(|_| usage(format!("not an index: \"{s}\""))))
                    .collect::<Result<_>>()?,
                (None, Some(path)) => members_of_report(&read_json(path)?)?,
                (None, None) => return Err(usage("give --values or --report")),
            };
            let fits = fit_descriptor(&observed, *p, *n, &FitLimits::default());
            let out: Vec<DescriptorOut> = fits.iter().map(DescriptorOut::of).collect();
            Envelope::new("set fit", seed, !out.is_empty(), out)
        }
        SetCommand::Admissible { desc } => {
            let d = load_desc(desc)?;
            let out: Vec<AdmissibleOut> = d
                .exp_sums
                .iter()
                .map(|s| {
                    let (admissible, reason) = s.is_p_normal_admissible();
                    AdmissibleOut { set: s.to_string(), admissible, reason }
                })
                .collect();
            let pass = out.iter().all(|a| a.admissible);
            Envelope::new("set admissible", seed, pass, out)
        }
    }
}

/// Members from a report envelope or a bare return-set report.
fn members_of_report(v: &Value) -> Result<BTreeSet<u64>> {
    let body = v.get("result").unwrap_or(v);
    let body = body.get("returnSet").unwrap_or(body);
    let entries = body.get("entries").and_then(Value::as_array).ok_or_else(|| usage("report has no entries"))?;
    Ok(entries.iter().filter(|e| e["member"] == true).filter_map(|e| e["n"].as_u64()).collect())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct NumbersOut {
    matrix: Vec<Vec<String>>,
    values: Vec<String>,
    approx: Vec<f64>,
    exact: Vec<AlgebraicJson>,
}

fn numbers_out(a: &pdml_core::linalg::IntMatrix, xs: &[AlgebraicNumber]) -> NumbersOut {
    NumbersOut {
        matrix: a.to_rows().iter().map(|r| strings(r)).collect(),
        values: strings(xs),
        approx: xs.iter().map(AlgebraicNumber::to_f64).collect(),
        exact: xs.iter().map(AlgebraicJson::from_number).collect(),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RootTestOut {
    poly: String,
    root: String,
    root_approx: f64,
    in_root_set: bool,
    moduli_all_equal: bool,
    certified_separation: bool,
    bits: u32,
    agree: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TransportOut {
    factor: String,
    source: String,
    target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel_check: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairing_check: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn spectral_cmd(c: &SpectralCommand, seed: u64) -> Result<Envelope> {
    match c {
        SpectralCommand::Degrees { matrix: m } => {
            let a = matrix(m)?;
            let ds = spectral::dynamical_degrees_monomial(&a)?;
            Envelope::new("spectral degrees", seed, true, numbers_out(&a, &ds))
        }
        SpectralCommand::Lyapunov { matrix: m } => {
            let a = matrix(m)?;
            let mus = spectral::lyapunov_exponents_monomial(&a)?;
            Envelope::new("spectral lyapunov", seed, true, numbers_out(&a, &mus))
        }
        SpectralCommand::RootTest { poly } => {
            let f = ZPoly::new(int_list(poly)?);
            let mu = spectral::min_poly_of_root(&f).map_err(|e| usage(e.to_string()))?;
            if !mu.is_positive_real() {
                return Err(usage(format!("{f} has no positive real root")));
            }
            let in_set = spectral::in_root_set(&mu)?;
            let crit = spectral::modulus_criterion(&mu)?;
            let out = RootTestOut {
                poly: f.render("x"),
                root: mu.to_string(),
                root_approx: mu.to_f64(),
                in_root_set: in_set,
                moduli_all_equal: crit.all_equal,
                certified_separation: crit.certified_separation,
                bits: crit.bits,
                agree: in_set == crit.all_equal,
            };
            Envelope::new("spectral root-test", seed, out.agree, out)
        }
        SpectralCommand::Report { matrix: m } => {
            let r = spectral::spectral_report(&matrix(m)?)?;
            Envelope::new("spectral report", seed, r.exponent_chain_verified, r)
        }
        SpectralCommand::Conjugate { matrix: m, ell, m: power } => {
            let a = matrix(m)?;
            let ell = match ell {
                Some(s) => int_list(s)?,
                None => (0..a.rows()).map(|i| BigInt::from(u8::from(i == 0))).collect(),
            };
            let mut out = Vec::new();
            for (g, _) in factor_z(&spectral::char_poly(&a)).into_iter().filter(|(g, _)| g.deg() >= 2) {
                let mu = spectral::min_poly_of_root(&g)?;
                let v = spectral::generalized_eigvec(&a, &mu, *power)?;
                for target in conjugates_of(&g).into_iter().filter(|c| !c.equals(&mu)) {
                    let base = TransportOut {
                        factor: g.render("x"),
                        source: mu.to_string(),
                        target: target.to_string(),
                        kernel_check: None,
                        pairing_check: None,
                        numeric_residual: None,
                        error: None,
                    };
                    out.push(match spectral::conjugate_eigvec(&a, &mu, &target, &v, *power, &ell) {
                        Ok(t) => TransportOut {
                            kernel_check: Some(t.kernel_check),
                            pairing_check: Some(t.pairing_check),
                            numeric_residual: Some(t.numeric_residual),
                            ..base
                        },
                        Err(e) => TransportOut { error: Some(e.to_string()), ..base },
                    });
                }
            }
            let pass = out.iter().all(|t| t.kernel_check == Some(true) && t.pairing_check == Some(true));
            Envelope::new("spectral conjugate", seed, pass, out)
        }
    }
}

fn growth_cmd(c: &GrowthCommand, seed: u64) -> Result<Envelope> {
    let rationals = |s: &SeqArgs| sequence(s)?.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>();
    let naturals = |s: &SeqArgs| {
        sequence(s)?
            .iter()
            .map(|x| x.parse::<BigUint>().map_err(|_| usage(format!("not a height: \"{x}\""))))
            .collect::<Result<Vec<_>>>()
    };
    match c {
        GrowthCommand::Diff { seq, a, order } => {
            let d = spectral::diff_sequence(&rationals(seq)?, &parse_rational(a)?, *order);
            Envelope::new("growth diff", seed, true, strings(&d))
        }
        GrowthCommand::Classify { seq, a, m } => {
            let g = spectral::classify_growth(&rationals(seq)?, &parse_rational(a)?, *m)
                .map_err(|e| usage(e.to_string()))?;
            Envelope::new("growth classify", seed, g.hypothesis_holds, g)
        }
        GrowthCommand::Ksm { seq, lambda, eps } => {
            let b = spectral::ksm_upper_check(&naturals(seq)?, *lambda, *eps);
            Envelope::new("growth ksm", seed, b.pass, b)
        }
        GrowthCommand::Gap { seq, lambda, eps0 } => {
            let b = spectral::ample_gap_lower_check(&naturals(seq)?, *lambda, *eps0);
            Envelope::new("growth gap", seed, b.pass, b)
        }
    }
}

fn verify_cmd(g: &Global, c: &VerifyCommand, seed: u64) -> Result<Envelope> {
    let orc = oracle(g, OracleParams::default(), seed);
    match c {
        VerifyCommand::PSet { p, n } => {
            prime(*p)?;
            let r = run_frobenius_p_set(*p, *n, orc)?;
            Envelope::new("verify p-set", seed, r.pass, &r)
        }
        VerifyCommand::Unipotent { p, m_max, spots } => {
            let r = run_quadratic_witness(*p, *m_max, orc, *spots)?;
            Envelope::new("verify unipotent", seed, r.pass, &r)
        }
        VerifyCommand::Refutation { p, c } => {
            let r = run_coefficient_refutation(*p, *c)?;
            Envelope::new("verify refutation", seed, r.pass, &r)
        }
        VerifyCommand::FrobTwist { system, q, n } => {
            let sys = match system {
                Some(path) => {
                    let s = load_system(path)?;
                    let seed = g.seed.unwrap_or(s.oracle.seed);
                    System { oracle: oracle(g, s.oracle, seed), ..s }
                }
                None => twist_preset(*n, orc)?,
            };
            let q = match q {
                Some(q) => parse_bigint(q)?,
                None => BigInt::from(sys.map.basis().p()),
            };
            let r = run_frobenius_twist_equality(&sys, &q, *n)?;
            Envelope::new("verify frob-twist", sys.oracle.seed, r.pass, &r)
        }
        VerifyCommand::Split { p, n } => {
            prime(*p)?;
            let r = run_split_experiment(&split_preset(*p, *n, orc)?)?;
            let pass =
                r.ksm.pass && r.gap.pass && r.finite_on_window && r.verdict == SplitVerdict::ContradictionExhibited;
            Envelope::new("verify split", seed, pass, &r)
        }
    }
}

#[derive(Serialize)]
struct NorthcottOut {
    p: u64,
    a: usize,
    count: usize,
    elements: Vec<String>,
}

const NORTHCOTT_LIST_CAP: usize = 1000;

fn northcott_cmd(p: u64, a: usize, seed: u64) -> Result<Envelope> {
    let fp = prime(p)?;
    // p^{2a+2} candidate pairs are enumerated.
    if (2 * a as u32 + 2) as f64 * (p as f64).log2() > 32.0 {
        return Err(usage(format!("p = {p}, a = {a} is too large to enumerate")));
    }
    let xs = places::northcott_enumerate(fp, a);
    let out = NorthcottOut {
        p,
        a,
        count: xs.len(),
        elements: xs.iter().take(NORTHCOTT_LIST_CAP).map(|x| x.render("t")).collect(),
    };
    Envelope::new("northcott", seed, true, out)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct HeightOut {
    coords: Vec<String>,
    height: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    product_formula_residual: Option<i64>,
    /// (place, valuation) pairs.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    support: Vec<(String, i64)>,
}

fn height_cmd(p: u64, x: &str, seed: u64) -> Result<Envelope> {
    let fp = prime(p)?;
    let coords: Vec<FpRat> = x
        .split(',')
        .map(|s| parse_ratfunc(&fp, s.trim(), "t").map_err(|e| usage(format!("\"{}\": {e}", s.trim()))))
        .collect::<Result<_>>()?;
    let rendered = coords.iter().map(|c| c.render("t")).collect();
    let out = if let [c] = coords.as_slice() {
        let nonzero = !c.is_zero();
        HeightOut {
            coords: rendered,
            height: places::height(c).to_string(),
            product_formula_residual: nonzero.then(|| places::product_formula_check(c)),
            support: if nonzero {
                places::support(c).into_iter().map(|(pl, v)| (pl.to_string(), v)).collect()
            } else {
                vec![]
            },
        }
    } else {
        let h = places::height_projective(&coords).map_err(|e| usage(e.to_string()))?;
        HeightOut { coords: rendered, height: h.to_string(), product_formula_residual: None, support: vec![] }
    };
    let pass = out.product_formula_residual.is_none_or(|r| r == 0);
    Envelope::new("height", seed, pass, out)
}
