//! Command-line front end: reproducible verification runs with JSON
//! certificates.
//!
//! Every emitted certificate embeds its full run configuration (fixtures
//! inlined), so the hidden `check-cert` subcommand can re-execute the run and
//! compare byte for byte. Exit codes: 0 verified/true, 1 falsified/false,
//! 2 inconclusive/partial, 64 usage error.

use crate::certify::{Mode, Verdict};
use crate::convexity::{
    classify_boundary, disk_pipeline, glue_check, BoundaryClass, BoundaryFamily,
    CoreCertificate, PipelineOptions, SffField,
};
use crate::curvature::ricci_from_jets;
use crate::fixtures::{builtin_metric, metric_from_schema, metric_to_schema, MetricSchema};
use crate::isotopy::{
    certify_path_on, check_closed_sphere, combine_verdicts, stage_one_path, stage_two_path,
    PathCertificate,
};
use crate::rational::Rational;
use crate::topo::{
    bp_order_report, component_ledger_eval, genus, lens_admissible, lens_search,
    lens_total_pontryagin, ComponentLedger, LensSpace, PontryaginData, Series,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "riccicert",
    about = "Curvature positivity certificates for warped product metrics and exact \
             characteristic-class arithmetic",
    long_about = None,
    after_help = "Configuration precedence: command-line flag > --config file > built-in default.\n\
                  Thread count: --threads > RICCICERT_THREADS > hardware parallelism."
)]
struct Cli {
    /// JSON config file with defaults: {"grid": N, "lambda_grid": N, "mode": "certified", "threads": N}
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (results are independent of this)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the certificate JSON here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Heuristic,
    Certified,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Heuristic => Mode::Heuristic,
            ModeArg::Certified => Mode::Certified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesArg {
    Ahat,
    L,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Radial grid points (>= 8)
    #[arg(long)]
    grid: Option<usize>,
    /// Deformation-parameter grid points (>= 8)
    #[arg(long)]
    lambda_grid: Option<usize>,
    /// heuristic: grid signs only; certified: Lipschitz margins
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify Ricci positivity of a doubly warped fixture over its interval
    VerifyDrup {
        /// Fixture file or builtin:{s5, round-s5, disk-n2-m4-rho0.1, ...}
        #[arg(long)]
        fixture: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Certify the two-stage deformation path to the round metric
    VerifyPath {
        #[arg(long)]
        fixture: String,
        /// one, two, or full (stage one then two)
        #[arg(long, default_value = "full")]
        stage: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the disk pipeline: ambient positivity, hypersurface convexity,
    /// induced boundary checks, path certificates, round-tail isometry
    VerifyDisk {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        c: f64,
        /// Optional fixture file; default builds the built-in disk fixture
        #[arg(long)]
        fixture: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Check gluing compatibility II1 + II2 > 0 of two sampled forms
    GlueCheck {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Classify a boundary family as core, socket, or neither
    ClassifyBoundary {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Order of the group bP_{4k} of exotic (4k−1)-spheres bounding
    /// parallelizable manifolds
    BpOrder { k: u32 },
    /// Evaluate the Â- or L-genus on Pontryagin numbers
    Genus {
        #[arg(long, value_enum)]
        series: SeriesArg,
        /// JSON file: {"k": 1, "numbers": {"1": -48}}
        #[arg(long)]
        numbers: PathBuf,
    },
    /// Check the lens-space Pontryagin-class vanishing condition
    LensCheck { m: u64, q: Vec<i64> },
    /// Exhaustively enumerate admissible lens tuples mod m
    LensSearch {
        m: u64,
        k: u32,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Path-component ledger: Â-gaps, s-classes, signatures, ⌊m/b_k⌋
    Components {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value = "0")]
        s0: String,
        /// inclusive range, e.g. -10..10
        #[arg(long)]
        q_range: String,
        #[arg(long)]
        m: Vec<u64>,
    },
    /// Re-execute an emitted certificate's embedded config and compare
    #[command(hide = true)]
    CheckCert { file: PathBuf },
}

#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    grid: Option<usize>,
    lambda_grid: Option<usize>,
    mode: Option<String>,
    threads: Option<usize>,
}

/// Run configuration echoed into every certificate, sufficient to re-execute.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    VerifyDrup { fixture: MetricSchema, grid: usize, mode: Mode },
    VerifyPath { fixture: MetricSchema, stage: String, grid: usize, lambda_grid: usize, mode: Mode },
    VerifyDisk { fixture: MetricSchema, n: u32, m: u32, rho: f64, c: f64, grid: usize, lambda_grid: usize },
    GlueCheck { left: SffField, right: SffField },
    ClassifyBoundary { family: BoundaryFamily, tol: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    schema_version: u32,
    config: RunConfig,
    result: T,
}

#[derive(Debug, Serialize, Deserialize)]
struct DrupResult {
    certificates: Vec<crate::certify::PositivityCertificate>,
    overall: Verdict,
}

#[derive(Debug, Serialize, Deserialize)]
struct PathResult {
    /// endpoint profile refs and λ-ranges per stage
    paths: Vec<crate::isotopy::PathSchema>,
    stages: Vec<PathCertificate>,
    endpoint_round_closure: bool,
    overall: Verdict,
}

struct Effective {
    grid: usize,
    lambda_grid: usize,
    mode: Mode,
}

fn effective(grid: &GridArgs, file: &FileConfig) -> Result<Effective, String> {
    let g = grid.grid.or(file.grid).unwrap_or(512);
    let l = grid.lambda_grid.or(file.lambda_grid).unwrap_or(64);
    let mode = match grid.mode {
        Some(m) => m.into(),
        None => match file.mode.as_deref() {
            Some("heuristic") => Mode::Heuristic,
            Some("certified") | None => Mode::Certified,
            Some(other) => return Err(format!("unknown mode '{other}' in config file")),
        },
    };
    if g < 8 || l < 8 {
        return Err("grid counts must be at least 8 per axis".into());
    }
    Ok(Effective { grid: g, lambda_grid: l, mode })
}

fn load_metric(spec: &str) -> Result<crate::curvature::WarpedMetric, String> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_metric(name).map_err(|e| e.to_string());
    }
    let text = std::fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
    let schema: MetricSchema =
        serde_json::from_str(&text).map_err(|e| format!("bad metric JSON in {spec}: {e}"))?;
    metric_from_schema(&schema).map_err(|e| e.to_string())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad JSON in {}: {e}", path.display()))
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Verified | Verdict::GridPositive => EXIT_VERIFIED,
        Verdict::Falsified => EXIT_FALSIFIED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run_drup_config(fixture: &MetricSchema, grid: usize, mode: Mode) -> Result<DrupResult, String> {
    let g = metric_from_schema(fixture).map_err(|e| e.to_string())?;
    let crate::curvature::WarpedMetric::Doubly { h, f, n, m, .. } = &g else {
        return Err("verify-drup expects a doubly warped fixture".into());
    };
    let (lo, hi) = g.guard_band();
    let domain = crate::certify::Rectangle::new(vec![lo], vec![hi]);
    let names = ["ric_rr", "ric_hh", "ric_ff"];
    let mut certificates = Vec::new();
    for (idx, name) in names.iter().enumerate() {
        let field = |x: &[f64]| {
            let ric = ricci_from_jets(h.jet(x[0]), f.jet(x[0]), *n, *m);
            let v = [ric.ric_rr, ric.ric_hh, ric.ric_ff][idx];
            v / (1.0 + v * v).sqrt()
        };
        let cert = crate::certify::certify_positive(
            &field,
            &domain,
            &[grid],
            mode,
            None,
            &format!("{name}/sqrt(1+{name}²) > 0 over the interval"),
        )
        .map_err(|e| e.to_string())?;
        certificates.push(cert);
    }
    let overall = combine_verdicts(certificates.iter().map(|c| c.verdict));
    Ok(DrupResult { certificates, overall })
}

fn run_path_config(
    fixture: &MetricSchema,
    stage: &str,
    grid: usize,
    lambda_grid: usize,
    mode: Mode,
) -> Result<PathResult, String> {
    let g = metric_from_schema(fixture).map_err(|e| e.to_string())?;
    let mut stages = Vec::new();
    let mut paths = Vec::new();
    let mut endpoint_round_closure = false;
    let err = |e: crate::isotopy::IsotopyError| e.to_string();
    let push = |path: &crate::isotopy::MetricPath,
                    stages: &mut Vec<PathCertificate>,
                    paths: &mut Vec<crate::isotopy::PathSchema>|
     -> Result<(), String> {
        if let Some(schema) = path.to_schema() {
            paths.push(schema);
        }
        stages.push(
            certify_path_on(path, None, (grid, lambda_grid), mode, None, false).map_err(err)?,
        );
        Ok(())
    };
    match stage {
        "one" => {
            let path = stage_one_path(&g).map_err(err)?;
            push(&path, &mut stages, &mut paths)?;
        }
        "two" => {
            let path = stage_two_path(&g).map_err(err)?;
            push(&path, &mut stages, &mut paths)?;
            let end = path.metric_at(2.0).map_err(err)?;
            endpoint_round_closure = check_closed_sphere(&end, 1e-9).is_ok();
        }
        "full" => {
            let path1 = stage_one_path(&g).map_err(err)?;
            push(&path1, &mut stages, &mut paths)?;
            let capped = path1.metric_at(1.0).map_err(err)?;
            let path2 = stage_two_path(&capped).map_err(err)?;
            push(&path2, &mut stages, &mut paths)?;
            let end = path2.metric_at(2.0).map_err(err)?;
            endpoint_round_closure = check_closed_sphere(&end, 1e-9).is_ok();
        }
        other => return Err(format!("unknown stage '{other}' (expected one, two, full)")),
    }
    let overall = combine_verdicts(stages.iter().map(|s| s.overall));
    Ok(PathResult { paths, stages, endpoint_round_closure, overall })
}

fn run_disk_config(
    fixture: &MetricSchema,
    n: u32,
    m: u32,
    rho: f64,
    c: f64,
    grid: (usize, usize),
) -> Result<CoreCertificate, String> {
    let g = metric_from_schema(fixture).map_err(|e| e.to_string())?;
    let opts = PipelineOptions { path_grid: grid, tolerance: 1e-6 };
    disk_pipeline(n, m, rho, &g, c, &opts).map_err(|e| e.to_string())
}

/// Deterministic serialization: struct fields in declaration order, floats in
/// shortest round-trip form.
fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization cannot fail")
}

fn execute_config(config: &RunConfig) -> Result<(String, i32), String> {
    match config {
        RunConfig::VerifyDrup { fixture, grid, mode } => {
            let result = run_drup_config(fixture, *grid, *mode)?;
            let code = verdict_exit(result.overall);
            let envelope =
                Envelope { schema_version: 1, config: config.clone(), result };
            Ok((to_json(&envelope), code))
        }
        RunConfig::VerifyPath { fixture, stage, grid, lambda_grid, mode } => {
            let result = run_path_config(fixture, stage, *grid, *lambda_grid, *mode)?;
            let code = verdict_exit(result.overall);
            let envelope =
                Envelope { schema_version: 1, config: config.clone(), result };
            Ok((to_json(&envelope), code))
        }
        RunConfig::VerifyDisk { fixture, n, m, rho, c, grid, lambda_grid } => {
            let result = run_disk_config(fixture, *n, *m, *rho, *c, (*grid, *lambda_grid))?;
            let code = verdict_exit(result.overall);
            let envelope =
                Envelope { schema_version: 1, config: config.clone(), result };
            Ok((to_json(&envelope), code))
        }
        RunConfig::GlueCheck { left, right } => {
            let report = glue_check(left, right).map_err(|e| e.to_string())?;
            let code = verdict_exit(report.verdict);
            let envelope =
                Envelope { schema_version: 1, config: config.clone(), result: report };
            Ok((to_json(&envelope), code))
        }
        RunConfig::ClassifyBoundary { family, tol } => {
            let report = classify_boundary(family, *tol).map_err(|e| e.to_string())?;
            let code = match report.class {
                BoundaryClass::Core | BoundaryClass::Socket => EXIT_VERIFIED,
                BoundaryClass::Neither => EXIT_FALSIFIED,
            };
            let envelope =
                Envelope { schema_version: 1, config: config.clone(), result: report };
            Ok((to_json(&envelope), code))
        }
    }
}

fn init_threads(cli_threads: Option<usize>, file_threads: Option<usize>) {
    let from_env = std::env::var("RICCICERT_THREADS").ok().and_then(|v| v.parse().ok());
    if let Some(n) = cli_threads.or(from_env).or(file_threads) {
        // ignore failure: the global pool can only be initialized once
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run_inner(cli: Cli) -> Result<i32, String> {
    let file_config: FileConfig = match &cli.config {
        Some(path) => read_json(path)?,
        None => FileConfig::default(),
    };
    init_threads(cli.threads, file_config.threads);

    match cli.command {
        Command::VerifyDrup { fixture, grid } => {
            let eff = effective(&grid, &file_config)?;
            let g = load_metric(&fixture)?;
            let schema = metric_to_schema(&g).ok_or("fixture not serializable")?;
            let config = RunConfig::VerifyDrup { fixture: schema, grid: eff.grid, mode: eff.mode };
            let (text, code) = execute_config(&config)?;
            emit(&cli.out, &text)?;
            Ok(code)
        }
        Command::VerifyPath { fixture, stage, grid } => {
            let eff = effective(&grid, &file_config)?;
            let g = load_metric(&fixture)?;
            let schema = metric_to_schema(&g).ok_or("fixture not serializable")?;
            let config = RunConfig::VerifyPath {
                fixture: schema,
                stage,
                grid: eff.grid,
                lambda_grid: eff.lambda_grid,
                mode: eff.mode,
            };
            let (text, code) = execute_config(&config)?;
            emit(&cli.out, &text)?;
            Ok(code)
        }
        Command::VerifyDisk { n, m, rho, c, fixture, grid } => {
            let eff = effective(&grid, &file_config)?;
            let g = match fixture {
                Some(spec) => load_metric(&spec)?,
                None => crate::fixtures::disk_fixture(n, m, rho).map_err(|e| e.to_string())?,
            };
            let schema = metric_to_schema(&g).ok_or("fixture not serializable")?;
            let config = RunConfig::VerifyDisk {
                fixture: schema,
                n,
                m,
                rho,
                c,
                grid: eff.grid,
                lambda_grid: eff.lambda_grid,
            };
            let (text, code) = execute_config(&config)?;
            emit(&cli.out, &text)?;
            Ok(code)
        }
        Command::GlueCheck { left, right } => {
            let config = RunConfig::GlueCheck { left: read_json(&left)?, right: read_json(&right)? };
            let (text, code) = execute_config(&config)?;
            emit(&cli.out, &text)?;
            Ok(code)
        }
        Command::ClassifyBoundary { family, tol } => {
            let config = RunConfig::ClassifyBoundary { family: read_json(&family)?, tol };
            let (text, code) = execute_config(&config)?;
            emit(&cli.out, &text)?;
            Ok(code)
        }
        Command::BpOrder { k } => {
            let report = bp_order_report(k).map_err(|e| e.to_string())?;
            emit(&cli.out, &format!("{}", report.value))?;
            Ok(EXIT_VERIFIED)
        }
        Command::Genus { series, numbers } => {
            let data: PontryaginData = read_json(&numbers)?;
            let s = match series {
                SeriesArg::Ahat => Series::AHat,
                SeriesArg::L => Series::L,
            };
            let value = genus(&data, s).map_err(|e| e.to_string())?;
            let mut out = BTreeMap::new();
            out.insert("genus", format!("{}/{}", value.numer(), value.denom()));
            emit(&cli.out, &to_json(&out))?;
            Ok(EXIT_VERIFIED)
        }
        Command::LensCheck { m, q } => {
            let lens = LensSpace::new(m, q).map_err(|e| e.to_string())?;
            let admissible = lens_admissible(&lens).map_err(|e| e.to_string())?;
            let classes: Vec<String> =
                lens_total_pontryagin(&lens).iter().map(|c| c.to_string()).collect();
            #[derive(Serialize)]
            struct LensCheckOut {
                m: u64,
                q: Vec<i64>,
                admissible: bool,
                pontryagin_classes_mod_m: Vec<String>,
            }
            let out = LensCheckOut { m: lens.m, q: lens.q.clone(), admissible, pontryagin_classes_mod_m: classes };
            emit(&cli.out, &to_json(&out))?;
            Ok(if admissible { EXIT_VERIFIED } else { EXIT_FALSIFIED })
        }
        Command::LensSearch { m, k, budget } => match lens_search(m, k, budget) {
            Ok(result) => {
                let empty = result.admissible.is_empty();
                emit(&cli.out, &to_json(&result))?;
                Ok(if empty { EXIT_FALSIFIED } else { EXIT_VERIFIED })
            }
            Err(e @ crate::topo::TopoError::BudgetExceeded { .. }) => {
                eprintln!("{e}");
                Ok(EXIT_INCONCLUSIVE)
            }
            Err(e) => Err(e.to_string()),
        },
        Command::Components { k, c, s0, q_range, m } => {
            let (a, b) = q_range
                .split_once("..")
                .ok_or_else(|| format!("bad --q-range '{q_range}', expected A..B"))?;
            let a: i64 = a.parse().map_err(|e| format!("bad range start: {e}"))?;
            let b: i64 = b.parse().map_err(|e| format!("bad range end: {e}"))?;
            let ledger = ComponentLedger {
                k,
                c: c.parse::<Rational>().map_err(|e| format!("bad --c: {e}"))?,
                s0: s0.parse::<Rational>().map_err(|e| format!("bad --s0: {e}"))?,
                q_set: (a..=b).collect(),
            };
            let report = component_ledger_eval(&ledger, &m).map_err(|e| e.to_string())?;
            emit(&cli.out, &to_json(&report))?;
            Ok(EXIT_VERIFIED)
        }
        Command::CheckCert { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            #[derive(Deserialize)]
            struct ConfigOnly {
                config: RunConfig,
            }
            let parsed: ConfigOnly =
                serde_json::from_str(&text).map_err(|e| format!("bad certificate: {e}"))?;
            let (reproduced, _) = execute_config(&parsed.config)?;
            if reproduced.trim_end() == text.trim_end() {
                println!("certificate reproduces byte-identically");
                Ok(EXIT_VERIFIED)
            } else {
                let stored = text.trim_end();
                let fresh = reproduced.trim_end();
                let split = stored
                    .bytes()
                    .zip(fresh.bytes())
                    .position(|(a, b)| a != b)
                    .unwrap_or(stored.len().min(fresh.len()));
                let lo = split.saturating_sub(60);
                eprintln!(
                    "certificate does NOT reproduce; first divergence near byte {split}:\n  stored: …{}…\n  fresh:  …{}…",
                    &stored[lo..(split + 60).min(stored.len())],
                    &fresh[lo..(split + 60).min(fresh.len())]
                );
                Ok(EXIT_FALSIFIED)
            }
        }
    }
}

/// Entry point used by the binary: parses argv, maps usage errors to 64.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            // help/version are not usage errors
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_VERIFIED;
            }
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    match run_inner(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
    }
}
