//! `weaksub`: run, verify and tabulate weakly submodular maximization.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod format;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use weaksub::algorithms::{self, AlgorithmSpec, FullLSParams, RunReport};
use weaksub::matroids::Matroid;
use weaksub::par::Execution;
use weaksub::potential::{distorted_guarantee, phi_of};
use weaksub::ratios::{self, RatioReport, RATIO_ENUMERATION_LIMIT};
use weaksub::set_functions::{
    generate_coverage, generate_design_instance, generate_regression_instance, Instance, Oracle, WorstCaseInstance,
};
use weaksub::verify::{self, DEFAULT_SEED, SUITE_IDS};
use weaksub::Error;

#[derive(Parser)]
#[command(name = "weaksub", version, about = "Maximize weakly submodular functions under matroid constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an algorithm on an instance for a range of seeds and write a JSON report.
    Run(RunArgs),
    /// Run property suites (ids, or `all`) and print pass/fail per suite.
    Verify {
        #[arg(default_value = "all")]
        ids: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Write the guarantee comparison curve as CSV.
    Curve {
        #[arg(long)]
        gamma_min: f64,
        #[arg(long)]
        gamma_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an instance file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Correlated predictors and a sparse linear target.
    Regression {
        #[arg(long)]
        n: usize,
        /// Number of samples behind the empirical covariances (default 4n + 12).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bayesian A-optimal design with `p` parameters and `n` observations.
    Aopt {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted coverage of a random universe.
    Coverage {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        universe: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The symmetric worst-case construction.
    Worstcase {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Matroid JSON file, or inline JSON starting with '{'.
    #[arg(long)]
    matroid: String,
    /// One of rrg, ls, dls-exact, dls-full, brute.
    #[arg(long)]
    alg: String,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Inclusive range `a..b`, a comma list, or a single seed.
    #[arg(long, default_value = "0")]
    seeds: String,
    /// Compute the optimum by brute force (n <= 16).
    #[arg(long)]
    verify_opt: bool,
    /// Compute empirical ratios by brute force (n <= 14).
    #[arg(long)]
    ratios: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn instance(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    fn runtime(err: Error) -> Self {
        Failure { code: 1, message: err.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify { ids, seed } => cmd_verify(&ids, seed),
        Command::Curve { gamma_min, gamma_max, steps, out } => cmd_curve(gamma_min, gamma_max, steps, out.as_deref()),
        Command::Generate { kind } => cmd_generate(kind),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::config(format!("invalid --seeds '{text}' (expected a..b, a,b,c or a single seed)"));
    let seeds: Vec<u64> = if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    Instance::from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Failure::config(format!("malformed instance file {}: {msg}", path.display())),
        other => Failure::instance(format!("invalid instance {}: {other}", path.display())),
    })
}

fn load_matroid(arg: &str) -> Result<Matroid, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::config(format!("cannot read matroid {arg}: {e}")))?
    };
    Matroid::from_json(&text).map_err(|e| Failure::config(format!("invalid matroid: {e}")))
}

fn cmd_run(args: RunArgs) -> Result<u8, Failure> {
    if !AlgorithmSpec::IDS.contains(&args.alg.as_str()) {
        return Err(Failure::config(format!(
            "unknown algorithm '{}'; valid ids: {}",
            args.alg,
            AlgorithmSpec::IDS.join(", ")
        )));
    }
    let seeds = parse_seeds(&args.seeds)?;
    let instance = load_instance(&args.instance)?;
    let matroid = load_matroid(&args.matroid)?;
    let n = instance.ground_size();
    if matroid.ground_size() != n {
        return Err(Failure::config(format!("matroid has {} elements but the instance has {n}", matroid.ground_size())));
    }
    if args.verify_opt && n > algorithms::BRUTE_FORCE_LIMIT {
        return Err(Failure::config(format!("--verify-opt needs n <= {}, got {n}", algorithms::BRUTE_FORCE_LIMIT)));
    }
    if args.ratios && n > RATIO_ENUMERATION_LIMIT {
        return Err(Failure::config(format!("--ratios needs n <= {RATIO_ENUMERATION_LIMIT}, got {n}")));
    }
    if args.gamma.is_some() != args.beta.is_some() {
        return Err(Failure::config("--gamma and --beta must be given together"));
    }
    if let (Some(g), Some(b)) = (args.gamma, args.beta) {
        if !(g > 0.0 && g <= 1.0) || !(b > 0.0) || !b.is_finite() {
            return Err(Failure::config(format!("need 0 < gamma <= 1 and beta > 0, got {g}, {b}")));
        }
    }
    if !(args.eps > 0.0) {
        return Err(Failure::config(format!("--eps must be positive, got {}", args.eps)));
    }

    let oracle = Oracle::from_arc(instance.function());
    let ratio_report: Option<RatioReport> = if args.ratios {
        Some(ratios::empirical_ratios(&oracle.fork(), n).map_err(Failure::runtime)?)
    } else {
        None
    };
    let known = match (args.gamma, args.beta, &ratio_report) {
        (Some(g), Some(b), _) => Some((g, b)),
        (_, _, Some(r)) => Some((r.gamma_hat, r.beta_hat)),
        _ => None,
    };
    let spec = match args.alg.as_str() {
        "rrg" => AlgorithmSpec::ResidualRandomGreedy,
        "ls" => AlgorithmSpec::LocalSearch { epsilon: args.eps },
        "dls-exact" => {
            let (gamma, beta) = known.ok_or_else(|| Failure::config("dls-exact needs --gamma and --beta, or --ratios"))?;
            AlgorithmSpec::DistortedExact { gamma, beta }
        }
        "dls-full" => {
            if args.eps > 1.0 {
                return Err(Failure::config(format!("dls-full needs --eps in (0, 1], got {}", args.eps)));
            }
            AlgorithmSpec::DistortedFull { epsilon: args.eps }
        }
        _ => AlgorithmSpec::BruteForce,
    };
    let opt = if args.verify_opt {
        Some(algorithms::brute_force_opt(&oracle.fork(), &matroid).map_err(Failure::runtime)?.1)
    } else {
        None
    };
    let guarantee = known.map(|(g, b)| match spec {
        AlgorithmSpec::ResidualRandomGreedy => g / (g + b),
        AlgorithmSpec::LocalSearch { epsilon } => g * g / ((2.0 - g) * b + g * g + epsilon),
        AlgorithmSpec::DistortedExact { .. } | AlgorithmSpec::DistortedFull { .. } => distorted_guarantee(g, phi_of(g, b)),
        AlgorithmSpec::BruteForce => 1.0,
    });
    let params = run_params(&args, &spec, &matroid, n, known)?;

    let reports = algorithms::run_seeds(Execution::default(), &spec, &oracle, &matroid, &seeds).map_err(|e| match e {
        Error::InvalidPhi(_) | Error::InvalidArgument(_) | Error::SetTooLarge { .. } | Error::GroundSetTooLarge { .. } => {
            Failure::config(e.to_string())
        }
        other => Failure::runtime(other),
    })?;
    let records: Vec<Value> = reports
        .into_iter()
        .map(|r| record(r, opt, ratio_report.as_ref(), guarantee, &params, args.no_timing))
        .collect();
    let mut text = serde_json::to_string_pretty(&records).expect("report serialization cannot fail");
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

fn run_params(
    args: &RunArgs,
    spec: &AlgorithmSpec,
    matroid: &Matroid,
    n: usize,
    known: Option<(f64, f64)>,
) -> Result<Value, Failure> {
    let mut params = json!({
        "instance": args.instance.display().to_string(),
        "matroid": matroid.spec(),
        "n": n,
        "k": matroid.rank(),
    });
    let map = params.as_object_mut().expect("params is an object");
    match *spec {
        AlgorithmSpec::LocalSearch { epsilon } => {
            map.insert("epsilon".into(), json!(epsilon));
        }
        AlgorithmSpec::DistortedExact { gamma, beta } => {
            map.insert("gamma".into(), json!(gamma));
            map.insert("beta".into(), format::extended(beta));
            map.insert("phi".into(), format::extended(phi_of(gamma, beta)));
        }
        AlgorithmSpec::DistortedFull { epsilon } => {
            let full = FullLSParams::new(epsilon, matroid.rank().max(1), n).map_err(|e| Failure::config(e.to_string()))?;
            map.insert("epsilon".into(), json!(epsilon));
            map.insert("full".into(), serde_json::to_value(full).expect("params serialize"));
            map.insert("phi_guesses".into(), json!(full.phi_guesses()));
        }
        _ => {}
    }
    if let Some((g, b)) = known {
        map.insert("gamma_used".into(), json!(g));
        map.insert("beta_used".into(), format::extended(b));
    }
    Ok(params)
}

#[derive(Serialize)]
struct Record<'a> {
    algorithm: String,
    seed: u64,
    solution: Vec<usize>,
    value: f64,
    oracle_calls: u64,
    improvements: u64,
    opt: Option<f64>,
    ratios: Option<&'a RatioReport>,
    guarantee: Option<f64>,
    params: Value,
    wall_time_ms: f64,
}

fn record(
    r: RunReport,
    opt: Option<f64>,
    ratios: Option<&RatioReport>,
    guarantee: Option<f64>,
    params: &Value,
    no_timing: bool,
) -> Value {
    let mut params = params.clone();
    params
        .as_object_mut()
        .expect("params is an object")
        .insert("phi_guesses_used".into(), json!(r.phi_guesses_used));
    let rec = Record {
        algorithm: r.algorithm,
        seed: r.seed,
        solution: r.solution.into_vec(),
        value: r.value,
        oracle_calls: r.oracle_calls,
        improvements: r.improvements,
        opt,
        ratios,
        guarantee: guarantee.or(r.guarantee_used),
        params,
        wall_time_ms: if no_timing { 0.0 } else { r.wall_time_ms },
    };
    serde_json::to_value(rec).expect("record serializes")
}

fn cmd_verify(ids: &[String], seed: u64) -> Result<u8, Failure> {
    let unknown: Vec<&String> = ids.iter().filter(|id| *id != "all" && !SUITE_IDS.contains(&id.as_str())).collect();
    if !unknown.is_empty() {
        return Err(Failure::config(format!(
            "unknown suite id(s) {}; valid ids: all, {}",
            unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
            SUITE_IDS.join(", ")
        )));
    }
    let outcomes = verify::run_suites(ids, seed).map_err(Failure::runtime)?;
    let mut failed = 0;
    for o in &outcomes {
        println!(
            "{:<4} {:<12} worst_residual={:<12} cases={:<6} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            format!("{:.3e}", o.worst_residual),
            o.cases,
            o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!("{} passed, {failed} failed (seed {seed:#x})", outcomes.len() - failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

fn cmd_curve(lo: f64, hi: f64, steps: usize, out: Option<&Path>) -> Result<u8, Failure> {
    let grid = algorithms::uniform_grid(lo, hi, steps).map_err(|e| Failure::config(e.to_string()))?;
    let rows = algorithms::guarantee_curve(&grid).map_err(|e| Failure::config(e.to_string()))?;
    let mut text = String::from("gamma,rrg_old,rrg_new,distorted\n");
    for r in rows {
        text.push_str(&format!(
            "{},{},{},{}\n",
            format::sig15(r.gamma),
            format::sig15(r.rrg_old),
            format::sig15(r.rrg_new),
            format::sig15(r.distorted)
        ));
    }
    write_output(out, &text)?;
    Ok(0)
}

fn cmd_generate(kind: GenerateKind) -> Result<u8, Failure> {
    let bad = |e: Error| Failure::config(e.to_string());
    let (instance, out) = match kind {
        GenerateKind::Regression { n, samples, noise, seed, out } => {
            let m = samples.unwrap_or(4 * n + 12);
            (Instance::Regression(generate_regression_instance(n, m, noise, seed).map_err(bad)?), out)
        }
        GenerateKind::Aopt { p, n, seed, out } => (Instance::Design(generate_design_instance(p, n, seed).map_err(bad)?), out),
        GenerateKind::Coverage { n, universe, seed, out } => {
            (Instance::Coverage(generate_coverage(n, universe, seed).map_err(bad)?), out)
        }
        GenerateKind::Worstcase { k, gamma, out } => (Instance::WorstCase(WorstCaseInstance::new(k, gamma).map_err(bad)?), out),
    };
    let mut text = instance.to_json();
    text.push('\n');
    write_output(out.as_deref(), &text)?;
    Ok(0)
}
