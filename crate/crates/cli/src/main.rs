//! `ghzx`: plan, run and certify GHZ extractions from cluster states.
//!
//! Every command prints one JSON document with `"schema": "v1"` and the
//! parsed configuration. Exit codes: 0 ok, 1 usage, 2 infeasible target,
//! 3 failed internal verification.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ghzx_core::fidelity::DEFAULT_SHOTS;
use ghzx_core::rng;
use ghzx_core::{
    enumerate_feasible, estimate_cluster_bound, estimate_ghz_bound, maximal_pattern, run_extraction,
    synthesize_pattern, ClusterExperiment, EstimatorOptions, ExtractionPlan, ExtractorError,
    FidelityError, GhzExperiment, NoiseModel, Outcome, Outcomes, PlannerError, Setting, ShotTable,
};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "ghzx", version, about = "GHZ extraction from linear cluster states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a target set and synthesize its measurement pattern.
    Plan(TargetArgs),
    /// List every feasible target of one size.
    Enumerate(EnumerateArgs),
    /// Run a plan on a simulated cluster and verify the corrected state.
    Extract(ExtractArgs),
    /// Estimate fidelity lower bounds from two measurement settings.
    Fidelity(FidelityArgs),
}

#[derive(Args, Serialize)]
struct TargetArgs {
    /// Number of cluster qubits (labels 1..=n).
    #[arg(short = 'n')]
    n: usize,
    /// Target vertices, comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present = "max", conflicts_with = "max")]
    vg: Option<Vec<usize>>,
    /// Use the maximal pattern.
    #[arg(long)]
    max: bool,
    /// Close the line into a ring.
    #[arg(long)]
    ring: bool,
}

#[derive(Args, Serialize)]
struct EnumerateArgs {
    #[arg(short = 'n')]
    n: usize,
    /// Target size.
    #[arg(short = 'm')]
    size: usize,
    #[arg(long)]
    ring: bool,
}

#[derive(Args, Serialize)]
struct ExtractArgs {
    #[command(flatten)]
    #[serde(flatten)]
    target: TargetArgs,
    /// Seed for random outcomes.
    #[arg(long, required_unless_present = "force_outcomes")]
    seed: Option<u64>,
    /// Replay outcomes instead of sampling, e.g. `3:+1,5:-1`.
    #[arg(long, value_parser = parse_outcomes, conflicts_with = "seed")]
    force_outcomes: Option<BTreeMap<usize, Outcome>>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyArg {
    /// Rotated cluster on 1..=n (odd n).
    Cluster,
    /// GHZ extracted from the cluster on 1..=n (rotated for odd n).
    Ghz,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Variant {
    Identity,
    NoIdentity,
}

#[derive(Args, Serialize)]
struct FidelityArgs {
    #[arg(long, value_enum, default_value = "cluster")]
    family: FamilyArg,
    #[arg(short = 'n')]
    n: usize,
    /// GHZ target vertices; defaults to the maximal pattern.
    #[arg(long, value_delimiter = ',')]
    vg: Option<Vec<usize>>,
    /// Shots per setting.
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: usize,
    /// Depolarizing probability per qubit.
    #[arg(short = 'p', long = "depolarizing", default_value_t = 0.0)]
    p: f64,
    /// Readout flip probability per qubit.
    #[arg(short = 'q', long = "readout", default_value_t = 0.0)]
    q: f64,
    #[arg(long, required_unless_present = "ingest")]
    seed: Option<u64>,
    /// Which bound to report as `selected`.
    #[arg(long, value_enum, default_value = "identity")]
    variant: Variant,
    /// Rescale the no-identity sums by 1/(1 - 2^-k).
    #[arg(long)]
    renormalize: bool,
    /// Read the all-Z and all-X shot tables instead of sampling.
    #[arg(long, num_args = 2, value_names = ["Z_CSV", "X_CSV"])]
    ingest: Option<Vec<PathBuf>>,
    /// Also write the sampled shot tables.
    #[arg(long, num_args = 2, value_names = ["Z_CSV", "X_CSV"], conflicts_with = "ingest")]
    dump: Option<Vec<PathBuf>>,
}

fn parse_outcomes(s: &str) -> Result<BTreeMap<usize, Outcome>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (v, o) = t
                .split_once(':')
                .ok_or_else(|| format!("expected vertex:outcome, got {t:?}"))?;
            let v = v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"))?;
            let o = match o.trim() {
                "+" | "+1" | "1" => Outcome::Plus,
                "-" | "-1" => Outcome::Minus,
                other => return Err(format!("outcome {other:?} is not ±1")),
            };
            Ok((v, o))
        })
        .collect()
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("infeasible target: {0}")]
    Infeasible(String),
    #[error("internal verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<PlannerError> for CliError {
    fn from(e: PlannerError) -> Self {
        match e {
            PlannerError::Infeasible(r) => CliError::Infeasible(r),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ExtractorError> for CliError {
    fn from(e: ExtractorError) -> Self {
        match e {
            ExtractorError::Planner(p) => p.into(),
            ExtractorError::InfeasiblePlan(r) => CliError::Infeasible(r),
            e @ (ExtractorError::VerificationFailed | ExtractorError::NotGhzClass) => {
                CliError::Verification(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<FidelityError> for CliError {
    fn from(e: FidelityError) -> Self {
        match e {
            FidelityError::Extractor(x) => x.into(),
            FidelityError::Planner(p) => p.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// A report, plus an error to exit with after it has been written.
struct Report {
    doc: Value,
    error: Option<CliError>,
}

fn envelope(command: &str, config: &impl Serialize, body: Value) -> Value {
    let mut config = serde_json::to_value(config).expect("config serializes");
    config["command"] = json!(command);
    let mut doc = json!({ "schema": "v1", "config": config });
    if let Value::Object(fields) = body {
        doc.as_object_mut().unwrap().extend(fields);
    }
    doc
}

fn target_plan(args: &TargetArgs) -> Result<Result<ExtractionPlan, ExtractionPlan>, CliError> {
    let result = match &args.vg {
        None => maximal_pattern(args.n, args.ring),
        Some(vg) => synthesize_pattern(args.n, vg, args.ring),
    };
    match result {
        Ok(p) => Ok(Ok(p)),
        Err(PlannerError::Infeasible(reason)) => {
            let mut vg = args.vg.clone().unwrap_or_default();
            vg.sort_unstable();
            Ok(Err(ExtractionPlan::infeasible(args.n, args.ring, vg, reason)))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_plan(args: &TargetArgs) -> Result<Report, CliError> {
    Ok(match target_plan(args)? {
        Ok(plan) => Report {
            doc: envelope("plan", args, json!({ "plan": plan })),
            error: None,
        },
        Err(plan) => {
            let reason = plan.reason.clone().unwrap_or_default();
            Report {
                doc: envelope("plan", args, json!({ "plan": plan })),
                error: Some(CliError::Infeasible(reason)),
            }
        }
    })
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<Report, CliError> {
    let targets = enumerate_feasible(args.n, args.size, args.ring)?;
    Ok(Report {
        doc: envelope("enumerate", args, json!({ "count": targets.len(), "targets": targets })),
        error: None,
    })
}

fn cmd_extract(args: &ExtractArgs) -> Result<Report, CliError> {
    let plan = match target_plan(&args.target)? {
        Ok(p) => p,
        Err(plan) => {
            let reason = plan.reason.clone().unwrap_or_default();
            return Ok(Report {
                doc: envelope("extract", args, json!({ "plan": plan })),
                error: Some(CliError::Infeasible(reason)),
            });
        }
    };
    let report = match (&args.force_outcomes, args.seed) {
        (Some(forced), _) => run_extraction(&plan, Outcomes::Forced(forced))?,
        (None, Some(seed)) => {
            let mut r = rng::stream(seed, 0);
            run_extraction(&plan, Outcomes::Random(&mut r))?
        }
        (None, None) => return Err(CliError::Usage("extract needs --seed or --force-outcomes".into())),
    };
    Ok(Report {
        doc: envelope("extract", args, json!({ "report": report })),
        error: None,
    })
}

enum Experiment {
    Cluster(ClusterExperiment),
    Ghz(Box<GhzExperiment>),
}

impl Experiment {
    fn labels(&self) -> Vec<usize> {
        match self {
            Experiment::Cluster(c) => (1..=c.state().num_qubits()).collect(),
            Experiment::Ghz(g) => g.plan().vg.clone(),
        }
    }

    fn sample(&self, s: Setting, noise: &NoiseModel, shots: usize, seed: u64) -> Result<ShotTable, FidelityError> {
        match self {
            Experiment::Cluster(c) => c.sample(s, noise, shots, seed),
            Experiment::Ghz(g) => g.sample(s, noise, shots, seed),
        }
    }
}

fn read_table(path: &PathBuf) -> Result<ShotTable, CliError> {
    let f = File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    ShotTable::read_csv(BufReader::new(f)).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_table(path: &PathBuf, t: &ShotTable) -> Result<(), CliError> {
    let f = File::create(path)?;
    t.write_csv(io::BufWriter::new(f))?;
    Ok(())
}

fn cmd_fidelity(args: &FidelityArgs) -> Result<Report, CliError> {
    let noise = NoiseModel::new(args.p, args.q)?;
    let exp = match args.family {
        FamilyArg::Cluster => {
            if args.vg.is_some() {
                return Err(CliError::Usage("--vg only applies to --family ghz".into()));
            }
            Experiment::Cluster(ClusterExperiment::new(args.n)?)
        }
        FamilyArg::Ghz => {
            let vg = args.vg.as_deref();
            Experiment::Ghz(Box::new(if args.n % 2 == 1 {
                GhzExperiment::rotated(args.n, vg)?
            } else {
                GhzExperiment::linear(args.n, vg)?
            }))
        }
    };
    let (z, x) = match (&args.ingest, args.seed) {
        (Some(paths), _) => (read_table(&paths[0])?, read_table(&paths[1])?),
        (None, Some(seed)) => (
            exp.sample(Setting::Z, &noise, args.shots, rng::derive_seed(seed, 0))?,
            exp.sample(Setting::X, &noise, args.shots, rng::derive_seed(seed, 1))?,
        ),
        (None, None) => return Err(CliError::Usage("fidelity needs --seed or --ingest".into())),
    };
    if let Some(paths) = &args.dump {
        write_table(&paths[0], &z)?;
        write_table(&paths[1], &x)?;
    }
    let opts = EstimatorOptions {
        renormalize: args.renormalize,
    };
    let report = match &exp {
        Experiment::Cluster(_) => estimate_cluster_bound(&z, &x, args.n, opts)?,
        Experiment::Ghz(_) => estimate_ghz_bound(&z, &x, &exp.labels(), opts)?,
    };
    let (bound, se) = match args.variant {
        Variant::Identity => (report.bound, report.se_bound),
        Variant::NoIdentity => (report.bound_no_identity, report.se_bound_no_identity),
    };
    let mut body = json!({
        "noise": noise,
        "report": report,
        "selected": { "variant": args.variant, "bound": bound, "se": se },
    });
    if let Experiment::Ghz(g) = &exp {
        body["plan"] = json!(g.plan());
    }
    Ok(Report {
        doc: envelope("fidelity", args, body),
        error: None,
    })
}

fn write_doc(doc: &Value, output: Option<&PathBuf>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).expect("report serializes");
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let out = match &cli.command {
        Command::Plan(a) => cmd_plan(a)?,
        Command::Enumerate(a) => cmd_enumerate(a)?,
        Command::Extract(a) => cmd_extract(a)?,
        Command::Fidelity(a) => cmd_fidelity(a)?,
    };
    write_doc(&out.doc, cli.output.as_ref())?;
    match out.error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ghzx: {e}");
            ExitCode::from(e.code())
        }
    }
}
