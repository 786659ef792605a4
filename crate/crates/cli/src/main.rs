use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use motion_cg::oracle::{check_theorems, estimate_orbit_count, find_witnesses, OracleConfig};
use motion_cg::{branch_multiplicity, cg_multiplicity, enumerate_weights, CGValue, Error, GroupPair, HalfInt, SpinClass, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

/// Environment variable holding the default worker thread count.
const THREADS_ENV: &str = "MOTION_CG_THREADS";
/// Largest |entry| accepted by `table`, doubled.
const TABLE_MAX_TWICE: i64 = 40;

#[derive(Parser)]
#[command(name = "motion-cg", version, about = "Branching multiplicities and Corwin-Greenleaf counts for SO(n) x R^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for the numerical oracle.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Randomized witnesses per case.
    #[arg(long, default_value_t = 200, global = true)]
    samples: usize,
    /// Relative tolerance on spectral moduli.
    #[arg(long = "tol-eig", default_value_t = 1e-9, global = true)]
    tol_eig: f64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// m(tau_lambda restricted to H, sigma_nu), 0 or 1.
    Branch(PairArgs),
    /// Exact Corwin-Greenleaf value with its certificate.
    Cg(PairArgs),
    /// Compare the exact value with the numerical oracle.
    Verify(PairArgs),
    /// (lambda, m, n) for all dominant lambda up to --max.
    Table {
        #[arg(long)]
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long)]
        max: String,
        #[arg(long, value_enum)]
        spin: Option<Spin>,
    },
    /// Sweep all dominant (nu, lambda) up to --max and check the theorems.
    CheckTheorems {
        #[arg(long)]
        pair: String,
        #[arg(long, default_value = "9/2")]
        max: String,
        /// Restrict to one spin class (default: both).
        #[arg(long, value_enum)]
        spin: Option<Spin>,
    },
}

#[derive(clap::Args)]
struct PairArgs {
    #[arg(long)]
    pair: String,
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    #[arg(long, allow_hyphen_values = true)]
    nu: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Spin {
    Int,
    Half,
}

impl From<Spin> for SpinClass {
    fn from(s: Spin) -> Self {
        match s {
            Spin::Int => SpinClass::Integer,
            Spin::Half => SpinClass::HalfInteger,
        }
    }
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotSkew(_) | Error::OddDimension(_) | Error::Empty(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Rendered output plus the exit status it calls for.
struct Output {
    body: String,
    code: u8,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, code: 0 }
    }
}

fn parse_pair(s: &str) -> Result<GroupPair, Failure> {
    Ok(s.parse()?)
}

fn parse_weights(pair: GroupPair, lambda: &str, nu: &str) -> Result<(Weight, Weight), Failure> {
    let lambda = Weight::parse(pair.k(), lambda)?;
    let nu = Weight::parse(pair.h(), nu)?;
    lambda.require_dominant()?;
    nu.require_dominant()?;
    Ok((lambda, nu))
}

fn pretty<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure::Internal(e.to_string()))
}

fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| Failure::Internal(e.to_string());
    w.write_record(header).map_err(internal)?;
    for r in rows {
        w.write_record(r).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Internal(e.to_string()))
}

fn join_sums(v: &[motion_cg::Rational]) -> Vec<String> {
    v.iter().map(|q| if q.is_integer() { q.numer().to_string() } else { q.to_string() }).collect()
}

fn cmd_branch(cli: &Cli, a: &PairArgs) -> Result<Output, Failure> {
    let pair = parse_pair(&a.pair)?;
    let (lambda, nu) = parse_weights(pair, &a.lambda, &a.nu)?;
    let m = branch_multiplicity(pair, &lambda, &nu)?;
    let body = match cli.format {
        Format::Text => format!("{m}\n"),
        Format::Json => pretty(&json!({"pair": pair, "lambda": lambda, "nu": nu, "m": m}))?,
        Format::Csv => csv_rows(&["pair", "lambda", "nu", "m"], &[vec![pair.to_string(), lambda.to_string(), nu.to_string(), m.to_string()]])?,
    };
    Ok(Output::ok(body))
}

fn cmd_cg(cli: &Cli, a: &PairArgs) -> Result<Output, Failure> {
    let pair = parse_pair(&a.pair)?;
    let (lambda, nu) = parse_weights(pair, &a.lambda, &a.nu)?;
    let (value, cert) = cg_multiplicity(&nu, &lambda, pair)?;
    let sums = join_sums(&cert.sums);
    let body = match cli.format {
        Format::Json => pretty(&json!({
            "pair": pair,
            "lambda": lambda,
            "nu": nu,
            "value": value,
            "sums": sums,
            "pfaffian_constraint": cert.pfaffian_constraint,
            "certificate": cert,
        }))?,
        Format::Csv => csv_rows(
            &["pair", "lambda", "nu", "value", "sums", "pfaffian_constraint"],
            &[vec![pair.to_string(), lambda.to_string(), nu.to_string(), value.to_string(), sums.join(";"), cert.pfaffian_constraint.to_string()]],
        )?,
        Format::Text => {
            let mut s = format!("{value}\n");
            if let CGValue::Undetermined { lower_bound } = value {
                let _ = writeln!(
                    s,
                    "lower bound {lower_bound}; run `motion-cg verify --pair {pair} --lambda {lambda} --nu {nu}` for an oracle estimate"
                );
            }
            let _ = writeln!(s, "sums: {}", if sums.is_empty() { "-".into() } else { sums.join(", ") });
            let _ = writeln!(s, "pfaffian constraint: {}", cert.pfaffian_constraint);
            for line in &cert.trace {
                let _ = writeln!(s, "  {line}");
            }
            s
        }
    };
    Ok(Output::ok(body))
}

fn oracle_config(cli: &Cli) -> Result<OracleConfig, Failure> {
    let cfg = OracleConfig { tol_eig: cli.tol_eig, samples: cli.samples, seed: cli.seed, ..OracleConfig::default() };
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct VerifyReport {
    pair: GroupPair,
    lambda: String,
    nu: String,
    exact: CGValue,
    witnesses: usize,
    clusters: Option<usize>,
    verdict: &'static str,
    note: String,
    seed: u64,
    samples: usize,
}

fn cmd_verify(cli: &Cli, a: &PairArgs) -> Result<Output, Failure> {
    let pair = parse_pair(&a.pair)?;
    let (lambda, nu) = parse_weights(pair, &a.lambda, &a.nu)?;
    let cfg = oracle_config(cli)?;
    let (exact, cert) = cg_multiplicity(&nu, &lambda, pair)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ws = find_witnesses(&nu, &lambda, pair, &cfg, &mut rng)?;
    let estimate = if ws.is_empty() || exact.is_zero() {
        None
    } else {
        Some(estimate_orbit_count(&ws, &cert.stabilizer, &nu, &lambda, pair, &cfg, &mut rng)?)
    };
    let clusters = estimate.as_ref().map(|e| e.clusters);
    let verdict = match (exact, ws.is_empty(), clusters) {
        (CGValue::Zero, true, _) => "AGREE",
        (CGValue::One, false, Some(1)) => "AGREE",
        (CGValue::Undetermined { .. }, false, _) => "ESTIMATE",
        _ => "DISAGREE",
    };
    let note = match &estimate {
        Some(e) => e.note.clone(),
        None => format!("{} witness(es) from {} samples", ws.len(), cfg.samples),
    };
    let report = VerifyReport {
        pair,
        lambda: lambda.to_string(),
        nu: nu.to_string(),
        exact,
        witnesses: ws.len(),
        clusters,
        verdict,
        note,
        seed: cfg.seed,
        samples: cfg.samples,
    };
    let body = match cli.format {
        Format::Json => pretty(&report)?,
        Format::Csv => csv_rows(
            &["pair", "lambda", "nu", "exact", "witnesses", "clusters", "verdict"],
            &[vec![
                pair.to_string(),
                report.lambda.clone(),
                report.nu.clone(),
                exact.to_string(),
                ws.len().to_string(),
                clusters.map_or(String::new(), |c| c.to_string()),
                verdict.into(),
            ]],
        )?,
        Format::Text => {
            let mut s = match clusters {
                Some(c) => format!("exact: {exact}, oracle witnesses: {} found, clusters: {c}, {verdict}\n", ws.len()),
                None => format!("exact: {exact}, oracle witnesses: {}, {verdict}\n", ws.len()),
            };
            let _ = writeln!(s, "{}", report.note);
            if verdict == "ESTIMATE" {
                let _ = writeln!(s, "the cluster count is a numerical estimate, not a certificate");
            }
            s
        }
    };
    Ok(Output { body, code: if verdict == "DISAGREE" { 2 } else { 0 } })
}

fn parse_max(s: &str) -> Result<HalfInt, Failure> {
    let m: HalfInt = s.parse()?;
    if m < HalfInt::ZERO {
        return Err(Failure::Usage(format!("--max must be nonnegative, got {s}")));
    }
    Ok(m)
}

#[derive(Serialize)]
struct TableRow {
    lambda: String,
    m: u8,
    n: String,
}

fn cmd_table(cli: &Cli, pair: &str, nu: &str, max: &str, spin: Option<Spin>) -> Result<Output, Failure> {
    let pair = parse_pair(pair)?;
    let nu = Weight::parse(pair.h(), nu)?;
    nu.require_dominant()?;
    let max = parse_max(max)?;
    if max.twice() > TABLE_MAX_TWICE {
        return Err(Error::RangeTooLarge(format!("--max {max} exceeds {}", HalfInt::from_twice(TABLE_MAX_TWICE))).into());
    }
    let class = spin.map_or(nu.spin_class(), SpinClass::from);
    let mut rows = Vec::new();
    for lambda in enumerate_weights(pair.k(), max, class) {
        let m = branch_multiplicity(pair, &lambda, &nu)?;
        let (n, _) = cg_multiplicity(&nu, &lambda, pair)?;
        rows.push(TableRow { lambda: lambda.to_string(), m, n: n.short() });
    }
    let body = match cli.format {
        Format::Json => pretty(&json!({"pair": pair, "nu": nu, "max": max, "spin": class, "rows": rows}))?,
        Format::Csv => csv_rows(&["lambda", "m", "n"], &rows.iter().map(|r| vec![r.lambda.clone(), r.m.to_string(), r.n.clone()]).collect::<Vec<_>>())?,
        Format::Text => {
            let mut s = format!("{:<20} {:>2} {:>4}\n", "lambda", "m", "n");
            for r in &rows {
                let _ = writeln!(s, "{:<20} {:>2} {:>4}", r.lambda, r.m, r.n);
            }
            s
        }
    };
    Ok(Output::ok(body))
}

fn cmd_check(cli: &Cli, pair: &str, max: &str, spin: Option<Spin>) -> Result<Output, Failure> {
    let pair = parse_pair(pair)?;
    let max = parse_max(max)?;
    let cfg = oracle_config(cli)?;
    let classes = match spin {
        Some(s) => vec![s.into()],
        None => vec![SpinClass::Integer, SpinClass::HalfInteger],
    };
    let report = check_theorems(pair, max, &classes, &cfg)?;
    let body = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .cases
                .iter()
                .map(|c| {
                    vec![
                        c.index.to_string(),
                        c.class.to_string(),
                        c.nu.to_string(),
                        c.lambda.to_string(),
                        c.m.to_string(),
                        c.exact.to_string(),
                        c.strongly_dominant.to_string(),
                        c.witnesses.to_string(),
                        c.orbit_estimate.as_ref().map_or(String::new(), |e| e.clusters.to_string()),
                        c.equal_entries.as_ref().map_or(String::new(), |t| t.claim.clone()),
                    ]
                })
                .collect();
            csv_rows(
                &["index", "class", "nu", "lambda", "m", "exact", "strongly_dominant", "witnesses", "orbit_estimate", "equal_entries_claim"],
                &rows,
            )?
        }
    };
    Ok(Output { body, code: if report.has_violation() { 3 } else { 0 } })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Failure::Usage(format!("{THREADS_ENV} must be positive")));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Internal(e.to_string()))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Branch(a) => cmd_branch(cli, a),
        Command::Cg(a) => cmd_cg(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Table { pair, nu, max, spin } => cmd_table(cli, pair, nu, max, *spin),
        Command::CheckTheorems { pair, max, spin } => cmd_check(cli, pair, max, *spin),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &out.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{}", out.body);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(out.code),
                Err(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
