//! The `lplab` command line: argument parsing, suite dispatch and exit codes.
//!
//! Exit codes: 0 every suite passed, 1 some suite failed, 2 inconclusive,
//! 3 configuration or runtime error.

pub mod emit;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field_io::{load_field, save_field};
use crate::grid::{GridSpec, SampledField};
use crate::harness::config::parse_override;
use crate::harness::{run_suite, sample_member, Shaping, SuiteId, SweepConfig, TestFunctionFamily, Verdict};
use crate::norms::{holder_seminorm, lp_norm, NormScales};
use crate::realspace::PairSampling;
use crate::spectral::CutoffProfile;

pub use emit::emit_report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lplab", version, about = "Littlewood-Paley commutator and embedding experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// More output; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one suite and exit with its verdict.
    Verify(RunArgs),
    /// Run several suites (all of them by default); exit with the worst verdict.
    Sweep(SweepArgs),
    /// Tabulate the norm scales of one test field.
    Norms(NormsArgs),
    /// Check the annulus decay hypothesis for a kernel.
    KernelCheck(KernelArgs),
    /// List the suite ids.
    ListSuites,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Override a config entry, e.g. `--set params.s=[0.5]` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid dimension.
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    /// Samples per axis.
    #[arg(long = "grid-N")]
    pub grid_samples: Option<usize>,
    /// Box half width.
    #[arg(long = "grid-L")]
    pub grid_half_width: Option<f64>,
}

impl Overrides {
    fn pairs(&self) -> Result<Vec<(String, Value)>> {
        let mut out = Vec::new();
        if let Some(n) = self.grid_n {
            out.push(("grid.n".to_string(), Value::from(n)));
        }
        if let Some(n) = self.grid_samples {
            out.push(("grid.N".to_string(), Value::from(n)));
        }
        if let Some(l) = self.grid_half_width {
            out.push(("grid.L".to_string(), Value::from(l)));
        }
        if let Some(s) = self.seed {
            out.push(("seed".to_string(), Value::from(s)));
        }
        for s in &self.set {
            out.push(parse_override(s)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Suite id (see `list-suites`).
    #[arg(long)]
    pub suite: Option<String>,
    /// JSON config; partial configs are completed from the suite default.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Suite ids to run with their default configs (repeatable).
    #[arg(long)]
    pub suite: Vec<String>,
    /// Config files to run (repeatable).
    #[arg(long)]
    pub config: Vec<PathBuf>,
    /// Output directory; each run writes to a subdirectory.
    #[arg(long, default_value = "lplab-out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    /// Default-family member to sample.
    #[arg(long, conflicts_with = "field")]
    pub member: Option<String>,
    /// Previously saved field (`.csv` or binary).
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Make the sampled member mean-free.
    #[arg(long)]
    pub mean_free: bool,
    /// Save the sampled field (`.csv` or binary by extension).
    #[arg(long)]
    pub save_field: Option<PathBuf>,
    /// Directory for `norms.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long = "grid-n", default_value_t = 1)]
    pub grid_n: usize,
    #[arg(long = "grid-N")]
    pub grid_samples: Option<usize>,
    #[arg(long = "grid-L")]
    pub grid_half_width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// `littlewood:K`, `power-tail:DECAY` or `truncated-power:ORDER`.
    #[arg(long, default_value = "littlewood:0")]
    pub kernel: String,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub epsilon: Vec<f64>,
    /// Output directory for the report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Sets the worker count from `LPLAB_THREADS` when present.
pub fn configure_threads() {
    if let Some(n) = std::env::var("LPLAB_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // A second initialisation in the same process is harmless to ignore.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let verbose = cli.verbose;
    let outcome = match cli.command {
        Command::Verify(a) => verify(&a, verbose),
        Command::Sweep(a) => sweep(&a, verbose),
        Command::Norms(a) => norms(&a).map(|_| EXIT_PASS),
        Command::KernelCheck(a) => kernel_check(&a, verbose),
        Command::ListSuites => {
            list_suites(&mut std::io::stdout());
            Ok(EXIT_PASS)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn list_suites(out: &mut impl Write) {
    for id in SuiteId::ALL {
        let _ = writeln!(out, "{:<18} {}", id.id(), id.describe());
    }
}

/// Resolves `--suite` / `--config` plus overrides into a validated config.
pub fn load_config(suite: Option<&str>, path: Option<&Path>, overrides: &Overrides) -> Result<SweepConfig> {
    let pairs = overrides.pairs()?;
    match (suite, path) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let config = SweepConfig::from_json(&text, &pairs)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            if let Some(s) = suite {
                let wanted: SuiteId = s.parse()?;
                if wanted != config.suite {
                    return Err(Error::Config(format!(
                        "--suite {wanted} disagrees with the config's suite {}",
                        config.suite
                    )));
                }
            }
            Ok(config)
        }
        (Some(s), None) => SweepConfig::for_suite(s.parse()?, &pairs),
        (None, None) => Err(Error::Config("give --suite or --config".into())),
    }
}

fn code_of(verdict: Verdict) -> i32 {
    verdict.exit_code()
}

fn report_line(label: &str, report: &crate::harness::VerificationReport, dir: &Path, verbose: u8) {
    println!(
        "{label}: {} ({} points, {} skipped) -> {}",
        report.verdict.as_str(),
        report.total,
        report.skipped,
        dir.display()
    );
    if verbose > 0 {
        for a in &report.aggregates {
            let checks: Vec<String> = a.checks.iter().map(|c| format!("{} {:.4}/{}", c.name, c.value, c.threshold)).collect();
            println!("  [{}] {}: {}", a.verdict.as_str(), a.group, checks.join(", "));
        }
    }
    if verbose > 1 {
        for n in &report.notes {
            println!("  note: {n}");
        }
        println!("  runtime {:.2} s", report.metadata.runtime_seconds);
    }
}

fn verify(args: &RunArgs, verbose: u8) -> Result<i32> {
    let config = load_config(args.suite.as_deref(), args.config.as_deref(), &args.overrides)?;
    let report = run_suite(&config)?;
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("lplab-out").join(config.suite.id()));
    emit_report(&report, &dir)?;
    report_line(config.suite.id(), &report, &dir, verbose);
    Ok(code_of(report.verdict))
}

fn sweep(args: &SweepArgs, verbose: u8) -> Result<i32> {
    // Every config is parsed before anything runs or is written.
    let mut jobs: Vec<(String, SweepConfig)> = Vec::new();
    for path in &args.config {
        let config = load_config(None, Some(path), &args.overrides)?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| config.suite.id().into());
        jobs.push((stem, config));
    }
    let suites: Vec<String> = if args.suite.is_empty() && args.config.is_empty() {
        SuiteId::ALL.iter().map(|s| s.id().to_string()).collect()
    } else {
        args.suite.clone()
    };
    for s in &suites {
        let config = load_config(Some(s), None, &args.overrides)?;
        jobs.push((s.clone(), config));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut worst = EXIT_PASS;
    for (label, config) in &jobs {
        let mut unique = label.clone();
        let mut i = 2;
        while labels.contains(&unique) {
            unique = format!("{label}-{i}");
            i += 1;
        }
        labels.push(unique.clone());
        let dir = args.out.join(&unique);
        let code = match run_suite(config).and_then(|r| emit_report(&r, &dir).map(|_| r)) {
            Ok(report) => {
                report_line(&unique, &report, &dir, verbose);
                code_of(report.verdict)
            }
            Err(e) => {
                eprintln!("{unique}: error: {e}");
                EXIT_ERROR
            }
        };
        worst = worse(worst, code);
    }
    Ok(worst)
}

/// Error beats FAIL beats INCONCLUSIVE beats PASS.
fn worse(a: i32, b: i32) -> i32 {
    let rank = |c: i32| match c {
        EXIT_ERROR => 3,
        EXIT_FAIL => 2,
        EXIT_INCONCLUSIVE => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn kernel_check(args: &KernelArgs, verbose: u8) -> Result<i32> {
    let (kind, value) = args
        .kernel
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("kernel '{}' is not of the form kind:value", args.kernel)))?;
    let kernel = match kind {
        "littlewood" => serde_json::json!({ "kind": "littlewood", "k": value.parse::<i32>().map_err(|_| Error::Config(format!("bad band index '{value}'")))? }),
        "power-tail" => serde_json::json!({ "kind": "power_tail", "decay": parse_f64(value)? }),
        "truncated-power" => serde_json::json!({ "kind": "truncated_power", "order": parse_f64(value)? }),
        other => return Err(Error::Config(format!("unknown kernel kind '{other}'"))),
    };
    let mut overrides = args.overrides.clone();
    overrides.set.push(format!("params.kernels=[{kernel}]"));
    overrides.set.push(format!("params.s={}", serde_json::to_string(&args.s)?));
    overrides.set.push(format!("params.epsilon={}", serde_json::to_string(&args.epsilon)?));
    let config = load_config(Some("kernel-hypothesis"), None, &overrides)?;
    let report = run_suite(&config)?;
    for a in &report.aggregates {
        println!("{} [{}]", a.group, a.verdict.as_str());
        for (x, w) in &a.curve {
            println!("  j={x:<3} m_j 2^(j(eps+s)) = {w:.6e}");
        }
        for c in &a.checks {
            println!("  {} {:.4} (limit {})", c.name, c.value, c.threshold);
        }
    }
    if let Some(dir) = &args.out {
        emit_report(&report, dir)?;
        report_line("kernel-hypothesis", &report, dir, verbose);
    }
    Ok(code_of(report.verdict))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Config(format!("'{s}' is not a number")))
}

/// One row of the `norms` table.
#[derive(Clone, Debug, PartialEq)]
pub struct NormRow {
    pub norm: String,
    pub params: String,
    pub value: f64,
    pub tail_estimate: f64,
}

/// Norm table of a field: `L^p`, `Y^{γ,d}`, its dual, the weighted Sobolev
/// sum, `Lip(s)` and the Hölder seminorm.
pub fn norm_table(f: &SampledField) -> Result<Vec<NormRow>> {
    let mut rows = Vec::new();
    let row = |norm: &str, params: String, value: f64, tail: f64| NormRow { norm: norm.into(), params, value, tail_estimate: tail };
    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        rows.push(row("lp", format!("p={p}"), lp_norm(f, p)?, 0.0));
    }
    let scales = NormScales::new(f.spec(), CutoffProfile::default());
    let table = scales.band_annulus_table(f)?;
    for gamma in [0.0, 0.5, 1.0] {
        for d in [0.0, 0.5, 1.0] {
            let label = format!("gamma={gamma} d={d}");
            rows.push(row("y", label.clone(), table.y_norm(gamma, d), 0.0));
            rows.push(row("y_dual", label.clone(), table.y_dual_norm(gamma, d), 0.0));
            let w = scales.weighted_sobolev_sum(f, gamma, d)?;
            rows.push(row("weighted_sobolev_sum", label.clone(), w.value, w.tail_estimate));
            let w = scales.dual_sobolev_sup(f, gamma, d)?;
            rows.push(row("dual_sobolev_sup", label, w.value, w.tail_estimate));
        }
    }
    for s in [0.25, 0.5, 0.75] {
        rows.push(row("lip", format!("s={s}"), scales.lip_s_norm(f, s)?, 0.0));
        rows.push(row("holder", format!("s={s}"), holder_seminorm(f, s, &PairSampling::default())?, 0.0));
    }
    Ok(rows)
}

fn norms(args: &NormsArgs) -> Result<()> {
    let f = match (&args.field, &args.member) {
        (Some(path), _) => load_field(path)?,
        (None, name) => {
            let mut spec = GridSpec::default_for(args.grid_n)?;
            if args.grid_samples.is_some() || args.grid_half_width.is_some() {
                spec = GridSpec::new(
                    args.grid_n,
                    args.grid_samples.unwrap_or(spec.samples()),
                    args.grid_half_width.unwrap_or(spec.half_width()),
                )?;
            }
            let family = TestFunctionFamily::default_for(args.grid_n, args.seed);
            let name = name.as_deref().unwrap_or("gauss-narrow");
            let member = family
                .members
                .iter()
                .find(|m| m.name == name)
                .ok_or_else(|| Error::Config(format!("no member named '{name}' in the default family")))?;
            let shaping = if args.mean_free { Shaping::mean_free() } else { Shaping::plain() };
            sample_member(member, &spec, &shaping)?
        }
    };
    if let Some(path) = &args.save_field {
        save_field(&f, path)?;
    }
    let rows = norm_table(&f)?;
    let mut text = String::from("norm,params,value,tail_estimate\n");
    for r in &rows {
        text.push_str(&format!("{},{},{},{}\n", r.norm, r.params, r.value, r.tail_estimate));
    }
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("norms.csv"), &text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}
