mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "pdml", version, about = "Orbits, return sets and growth checks for torus maps over F_p(t)")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed; drawn from entropy and recorded when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Degree of the random irreducible moduli.
    #[arg(long, global = true)]
    pub oracle_degree: Option<usize>,
    /// Number of independent moduli.
    #[arg(long, global = true)]
    pub oracle_trials: Option<usize>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Orbit points and coordinate heights.
    Orbit(SystemArgs),
    /// Return set of a system file.
    ReturnSet(SystemArgs),
    /// Compare return sets of f and Frob_q ∘ f.
    Twist {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        q: String,
    },
    /// Set descriptors.
    #[command(subcommand)]
    Set(SetCommand),
    /// Dynamical degrees, exponents and the root test.
    #[command(subcommand)]
    Spectral(SpectralCommand),
    /// Difference sequences and growth checks.
    #[command(subcommand)]
    Growth(GrowthCommand),
    /// Shipped experiment presets.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Count elements of F_p(t) with h(x) ≤ a.
    Northcott {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: usize,
    },
    /// Heights of a rational function or a projective tuple.
    Height {
        #[arg(long)]
        p: u64,
        /// Comma-separated rational functions in t; more than one means a projective point.
        #[arg(long)]
        x: String,
    },
    /// Text summary of an emitted report.
    Render { report: PathBuf },
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    #[arg(long)]
    pub system: PathBuf,
    /// Window; defaults to the file's.
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum SetCommand {
    Member {
        #[arg(long)]
        desc: PathBuf,
        #[arg(long)]
        value: String,
    },
    Window {
        #[arg(long)]
        desc: PathBuf,
        #[arg(long)]
        n: u64,
    },
    Union {
        #[arg(long)]
        desc: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    Intersect {
        #[arg(long)]
        desc: PathBuf,
        #[arg(long)]
        other: PathBuf,
        /// Window used when the intersection is only decidable pointwise.
        #[arg(long, default_value_t = 100)]
        n: u64,
    },
    /// Rank descriptors matching observed indices.
    Fit {
        /// Comma-separated indices.
        #[arg(long, conflicts_with = "report")]
        values: Option<String>,
        /// Take the members of a return-set report.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
    },
    Admissible {
        #[arg(long)]
        desc: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpectralCommand {
    Degrees {
        #[arg(long)]
        matrix: String,
    },
    Lyapunov {
        #[arg(long)]
        matrix: String,
    },
    /// Root-set membership of the distinguished root of an irreducible polynomial.
    RootTest {
        /// Coefficients, lowest degree first, e.g. '[-2,0,1]'.
        #[arg(long)]
        poly: String,
    },
    Report {
        #[arg(long)]
        matrix: String,
    },
    /// Transport generalized eigenvectors to every conjugate eigenvalue.
    Conjugate {
        #[arg(long)]
        matrix: String,
        /// Linear form, e.g. '[1,0]'; defaults to the first coordinate.
        #[arg(long)]
        ell: Option<String>,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SeqArgs {
    /// Comma-separated values, or @file holding a JSON array.
    #[arg(long)]
    pub seq: String,
}

#[derive(Subcommand, Debug)]
pub enum GrowthCommand {
    Diff {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        order: usize,
    },
    Classify {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        m: usize,
    },
    Ksm {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        eps: f64,
    },
    Gap {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        eps0: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Return set {p^k} of the shifted Frobenius map.
    PSet {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 700)]
        n: u64,
    },
    /// Witnesses p^m + p^{2m} for the six-dimensional unipotent system.
    Unipotent {
        #[arg(long, default_value_t = 11)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        m_max: u32,
        /// Random non-family indices to certify.
        #[arg(long, default_value_t = 20)]
        spots: usize,
    },
    /// Top-coefficient refutation for m = (1 + p^c)².
    Refutation {
        #[arg(long, default_value_t = 11)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        c: u32,
    },
    /// Return sets of an isotrivial system and its Frobenius twist.
    FrobTwist {
        /// A system file; the built-in F_5 preset otherwise.
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value_t = 500)]
        n: u64,
    },
    /// Unipotent × squaring two-speed experiment.
    Split {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 300)]
        n: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<commands::UsageError>() { 2 } else { 1 })
        }
    }
}
