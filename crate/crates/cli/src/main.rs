use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gtheta_core::checks::{exact_suite, CheckOutcome, ExactConfig};
use gtheta_core::period::theta_basis;
use gtheta_core::quadratic::DEFAULT_GAUSS_BOUND;
use gtheta_core::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "gtheta", version, about = "Vanishing i-invariant theta constants of Gaussian lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print rank, g, unimodularity, parity and determinant.
    Info(RunArgs),
    /// Count invariant theta characteristics by m0 mod 4.
    Census(RunArgs),
    /// Run the exact identity checks, and the theta evaluation with --numeric.
    Verify(RunArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Builtin {
    #[value(name = "gamma2g")]
    Gamma2g,
    #[value(name = "gauss_zn")]
    GaussZn,
    #[value(name = "gauss_e8")]
    GaussE8,
    #[value(name = "sum")]
    Sum,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, conflicts_with = "file", required_unless_present = "file")]
    builtin: Option<Builtin>,
    /// Lattice JSON with keys label, rank, gram, aut.
    #[arg(long)]
    file: Option<PathBuf>,
    /// g for gamma2g; must be even.
    #[arg(long)]
    g: Option<usize>,
    /// n for gauss_zn.
    #[arg(long)]
    n: Option<usize>,
    /// Summands for `sum`, e.g. `gamma2g:4,gauss_zn:1,gauss_e8`.
    #[arg(long, value_delimiter = ',')]
    parts: Vec<String>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    numeric: bool,
    #[arg(long, default_value_t = DEFAULT_GAUSS_BOUND)]
    gauss_bound: usize,
    #[arg(long, default_value_t = 6)]
    numeric_bound: usize,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

type Outcome<T> = std::result::Result<T, Failure>;

enum Failure {
    Input(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Mismatch(e.to_string())
        }
    }
}

fn builtin(kind: Builtin, g: Option<usize>, n: Option<usize>) -> Outcome<GaussianLattice> {
    match kind {
        Builtin::Gamma2g => Ok(gamma_2g(g.ok_or_else(|| Failure::Input("gamma2g needs --g".into()))?)?),
        Builtin::GaussZn => Ok(gauss_zn(n.ok_or_else(|| Failure::Input("gauss_zn needs --n".into()))?)?),
        Builtin::GaussE8 => Ok(gauss_e8()?),
        Builtin::Sum => Err(Failure::Input("sum cannot be nested".into())),
    }
}

/// `name[:param]` for one summand.
fn part(text: &str) -> Outcome<GaussianLattice> {
    let (name, param) = match text.split_once(':') {
        Some((a, b)) => {
            let p = b.trim().parse::<usize>().map_err(|_| Failure::Input(format!("bad parameter in part {text:?}")))?;
            (a.trim(), Some(p))
        }
        None => (text.trim(), None),
    };
    let kind = Builtin::from_str(name, false).map_err(|_| Failure::Input(format!("unknown part {name:?}")))?;
    builtin(kind, param, param)
}

fn resolve(args: &RunArgs) -> Outcome<GaussianLattice> {
    if let Some(path) = &args.file {
        return Ok(load_lattice(path)?);
    }
    match args.builtin {
        Some(Builtin::Sum) => {
            let mut parts = args.parts.iter().map(|s| part(s));
            let first = parts.next().ok_or_else(|| Failure::Input("sum needs --parts".into()))??;
            parts.try_fold(first, |acc, p| Ok(direct_sum(&acc, &p?)))
        }
        Some(kind) => builtin(kind, args.g, args.n),
        None => Err(Failure::Input("give --builtin or --file".into())),
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Outcome<()> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    match out {
        Some(path) => fs::write(path, json + "\n").map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn info(args: &RunArgs) -> Outcome<()> {
    let l = resolve(args)?;
    let c = classify(&l);
    println!("{} rank={} g={} unimodular={} even={} det={}", l.label(), l.rank(), c.g, c.unimodular, c.even, c.det);
    if let Some(path) = &args.out {
        #[derive(Serialize)]
        struct Info<'a> {
            label: &'a str,
            rank: usize,
            #[serde(flatten)]
            classification: &'a Classification,
        }
        emit(&Info { label: l.label(), rank: l.rank(), classification: &c }, Some(path))?;
    }
    Ok(())
}

fn run_census(args: &RunArgs) -> Outcome<()> {
    let l = resolve(args)?;
    let report = census(&l, &CensusConfig { gauss_bound: args.gauss_bound })?;
    emit(&report, args.out.as_ref())?;
    eprintln!(
        "{}: g={} forms={} m0 mod 4 = {:?} formula={} match={}",
        report.label,
        report.g,
        report.forms.len(),
        report.counts.m0,
        report.formula,
        report.matches
    );
    if report.matches {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("census gives {} vanishing forms, formula {}", report.n2(), report.formula)))
    }
}

#[derive(Serialize)]
struct VerifyReport {
    label: String,
    g: usize,
    seed: u64,
    checks: Vec<CheckOutcome>,
    numeric: Option<VerificationRecord>,
    passed: bool,
}

fn verify(args: &RunArgs) -> Outcome<()> {
    let l = resolve(args)?;
    let t = reduce(&l)?;
    let basis = theta_basis(&l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let config = ExactConfig { gauss_bound: args.gauss_bound, ..ExactConfig::default() };
    let checks = exact_suite(&l, &basis, &t, &config, &mut rng)?;
    let numeric = if args.numeric {
        let report = census(&l, &CensusConfig { gauss_bound: args.gauss_bound })?;
        let config = NumericConfig {
            tol: args.tol,
            numeric_bound: args.numeric_bound,
            seed: args.seed,
            ..NumericConfig::default()
        };
        Some(verify_census_numeric(&l, &report, &config)?)
    } else {
        None
    };
    let passed = checks.iter().all(|c| c.passed) && numeric.as_ref().map_or(true, |v| v.passed);
    let report = VerifyReport { label: l.label().to_string(), g: l.g(), seed: args.seed, checks, numeric, passed };
    emit(&report, args.out.as_ref())?;
    for c in &report.checks {
        eprintln!("{}: {} ({} cases)", c.name, if c.passed { "pass" } else { "FAIL" }, c.cases);
        for f in &c.failures {
            eprintln!("  {f}");
        }
    }
    if let Some(v) = &report.numeric {
        eprintln!(
            "numeric: {} of {} predicted zeros, {} forms, mismatches {:?}",
            v.numeric_vanishing,
            v.predicted_vanishing,
            v.forms.len(),
            v.mismatches
        );
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Mismatch("verification failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Info(a) | Command::Census(a) | Command::Verify(a) => a,
    };
    if let Some(w) = args.workers {
        if w == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if !(args.tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Info(a) => info(a),
        Command::Census(a) => run_census(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("mismatch: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
