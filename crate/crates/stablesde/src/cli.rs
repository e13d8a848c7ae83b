//! Batch front end: `classify`, `simulate`, `oracle-eval`, `validate` and `run`.
//!
//! Every invocation is resolved into a [`RunConfig`] first, so a command line
//! and its JSON configuration (`run --config FILE`) behave identically.
//! Machine output always carries `schema_version`. Exit codes: 0 on success,
//! 1 on a failed validation or a runtime failure, 2 on a usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::boundary_classifier::{classify_alpha_rho, Verdict};
use crate::error::{Error, Result};
use crate::fluctuation_oracles as fo;
use crate::fluctuation_oracles::OracleResult;
use crate::montecarlo_harness::{run_suite, ValidationOutcome, SUITES};
use crate::parallel::{configure_workers, par_map};
use crate::rng::RandomState;
use crate::sde_timechange::time_change_solve;
use crate::sigma_model::SigmaFunction;
use crate::stable_core::{sample_path, Path, StableParams, StableSampler};
use crate::transforms::{exponent_eval, mean_at_one, ExponentKind, LevyExponent};

/// Version of every machine-readable output format.
pub const SCHEMA_VERSION: u32 = 1;

/// Exit code of a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code of a failed validation or a runtime failure.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code of a usage error.
pub const EXIT_USAGE: i32 = 2;

/// Default number of paths.
pub const DEFAULT_N_PATHS: usize = 10_000;
/// Default Euler step as a fraction of the horizon.
pub const DEFAULT_STEP_FRACTION: f64 = 1e-3;
/// Largest number of times `simulate` doubles the driving path to fill the clock.
pub const MAX_DRIVER_DOUBLINGS: u32 = 64;
/// Doublings of the driving path made at the original step.
pub const FINE_DOUBLINGS: u32 = 4;

/// Environment variable overriding the default seed.
pub const ENV_SEED: &str = "STABLESDE_SEED";
/// Environment variable setting the worker count.
pub const ENV_WORKERS: &str = "STABLESDE_WORKERS";

/// Subcommand recorded in a [`RunConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    Simulate,
    OracleEval,
    Validate,
}

/// Output format of `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Fully resolved run description.
///
/// `step = None` means `DEFAULT_STEP_FRACTION · horizon`. `suite` is used by
/// `validate`, `op` and `points` (named arguments such as `x`, `y`, `z`) by `oracle-eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Command,
    pub alpha: f64,
    pub rho: f64,
    pub sigma: String,
    pub seed: u64,
    pub n_paths: usize,
    pub horizon: f64,
    pub step: Option<f64>,
    pub x0: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub suite: Option<String>,
    pub op: Option<String>,
    pub points: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: Command::Classify,
            alpha: 1.5,
            rho: 0.5,
            sigma: "const:c=1".into(),
            seed: 0,
            n_paths: DEFAULT_N_PATHS,
            horizon: 1.0,
            step: None,
            x0: 0.0,
            output: None,
            format: Format::Csv,
            suite: None,
            op: None,
            points: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    /// Step actually used by `simulate`.
    pub fn effective_step(&self) -> f64 {
        self.step.unwrap_or(DEFAULT_STEP_FRACTION * self.horizon)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "stablesde",
    version,
    about = "SDEs driven by stable Levy processes: classify, simulate, evaluate oracles, validate"
)]
struct Cli {
    /// Worker threads for Monte Carlo fan-out (default: one per core).
    #[arg(long, global = true, env = ENV_WORKERS)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct Driver {
    /// Stability index, in (0, 2).
    #[arg(long)]
    alpha: f64,
    /// Positivity parameter P(X_1 > 0).
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
}

#[derive(Debug, Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Explosion and entrance verdicts at +inf, -inf and +-inf as JSON.
    Classify {
        #[command(flatten)]
        driver: Driver,
        /// Coefficient, e.g. power:c=1,theta=2 or table:path=s.csv,theta=2.
        #[arg(long)]
        sigma: String,
        #[command(flatten)]
        out: Output,
    },
    /// Solution paths of dZ = sigma(Z-) dX built by time change, as CSV or JSON.
    Simulate {
        #[command(flatten)]
        driver: Driver,
        #[arg(long, default_value = "const:c=1")]
        sigma: String,
        /// Starting point.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x0: f64,
        /// End of the time window of Z.
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        /// Euler step of the driving path (default: 1e-3 * horizon).
        #[arg(long)]
        step: Option<f64>,
        /// Number of paths.
        #[arg(long, default_value_t = DEFAULT_N_PATHS)]
        n: usize,
        #[arg(long, env = ENV_SEED, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluates a closed-form identity; `--op list` prints the available names.
    OracleEval {
        /// Identity name.
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        z: Option<f64>,
        /// Lower end of a window or level.
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        /// Upper end of a window.
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
        /// Exponent kind for `exponent` and `exponent-mean`.
        #[arg(long)]
        kind: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Runs named validation suites and prints one JSON line per outcome.
    Validate {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, env = ENV_SEED, default_value_t = 0)]
        seed: u64,
        /// Paths per estimator.
        #[arg(long, default_value_t = DEFAULT_N_PATHS)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Executes a JSON run configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Print the resolved configuration instead of executing it.
        #[arg(long)]
        print: bool,
    },
}

fn points(pairs: &[(&str, Option<f64>)]) -> BTreeMap<String, f64> {
    pairs
        .iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
}

enum Plan {
    Execute(RunConfig),
    Print(RunConfig),
}

fn resolve(sub: Sub) -> Result<Plan> {
    let base = RunConfig::default();
    let cfg = match sub {
        Sub::Classify { driver, sigma, out } => RunConfig {
            subcommand: Command::Classify,
            alpha: driver.alpha,
            rho: driver.rho,
            sigma,
            output: out.output,
            ..base
        },
        Sub::Simulate {
            driver,
            sigma,
            x0,
            horizon,
            step,
            n,
            seed,
            format,
            out,
        } => RunConfig {
            subcommand: Command::Simulate,
            alpha: driver.alpha,
            rho: driver.rho,
            sigma,
            seed,
            n_paths: n,
            horizon,
            step,
            x0,
            output: out.output,
            format,
            ..base
        },
        Sub::OracleEval {
            op,
            alpha,
            rho,
            sigma,
            x,
            y,
            z,
            a,
            b,
            kind,
            out,
        } => {
            let mut pts = points(&[("x", x), ("y", y), ("z", z), ("a", a), ("b", b)]);
            if let Some(k) = kind {
                let idx = exponent_kind_index(&k)?;
                pts.insert("kind".into(), idx as f64);
            }
            RunConfig {
                subcommand: Command::OracleEval,
                alpha,
                rho,
                sigma: sigma.unwrap_or(base.sigma.clone()),
                output: out.output,
                op: Some(op),
                points: pts,
                ..base
            }
        }
        Sub::Validate {
            suite,
            seed,
            n,
            out,
        } => RunConfig {
            subcommand: Command::Validate,
            seed,
            n_paths: n,
            output: out.output,
            suite: Some(suite),
            ..base
        },
        Sub::Run { config, print } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Error::Parse(format!("{}: {e}", config.display())))?;
            let cfg = RunConfig::from_json(&text)?;
            return Ok(if print {
                Plan::Print(cfg)
            } else {
                Plan::Execute(cfg)
            });
        }
    };
    Ok(Plan::Execute(cfg))
}

/// Exit code for a library error: input problems are usage errors.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::OutOfRange(_)
        | Error::InconsistentRho { .. }
        | Error::Domain(_)
        | Error::NonPositive(_)
        | Error::OutOfScope(_)
        | Error::Parse(_)
        | Error::WrongBranch(_)
        | Error::Alpha1
        | Error::TooFewSamples { .. } => EXIT_USAGE,
        Error::ExhaustedPath { .. }
        | Error::HitZero { .. }
        | Error::PoleHit { .. }
        | Error::Io(_) => EXIT_FAILURE,
    }
}

/// Parses `argv` (including the program name), executes and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(w) = cli.workers {
        if let Err(e) = configure_workers(w) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    let outcome = resolve(cli.command).and_then(|plan| match plan {
        Plan::Print(cfg) => {
            let mut text = cfg.to_json()?;
            text.push('\n');
            emit(&None, &text)?;
            Ok(EXIT_OK)
        }
        Plan::Execute(cfg) => execute(&cfg),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Executes a resolved configuration and returns the exit code.
pub fn execute(cfg: &RunConfig) -> Result<i32> {
    match cfg.subcommand {
        Command::Classify => {
            let s = SigmaFunction::parse(&cfg.sigma)?;
            let report = classify_alpha_rho(cfg.alpha, cfg.rho, &s)?;
            let undecided = report
                .explosion
                .all()
                .iter()
                .chain(report.entrance.all().iter())
                .any(|v| v.status == Verdict::Undecided);
            if undecided {
                eprintln!("note: at least one verdict is undecided");
            }
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(&cfg.output, &text)?;
            Ok(EXIT_OK)
        }
        Command::Simulate => {
            let text = simulate(cfg)?;
            emit(&cfg.output, &text)?;
            Ok(EXIT_OK)
        }
        Command::OracleEval => {
            let op = cfg
                .op
                .as_deref()
                .ok_or_else(|| Error::Parse("oracle-eval needs an op".into()))?;
            let mut text = serde_json::to_string_pretty(&oracle_eval(cfg, op)?)?;
            text.push('\n');
            emit(&cfg.output, &text)?;
            Ok(EXIT_OK)
        }
        Command::Validate => {
            let suite = cfg.suite.as_deref().unwrap_or("all");
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else {
                vec![suite]
            };
            if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
                return Err(Error::Parse(format!(
                    "unknown suite '{bad}'; known suites: all, {}",
                    SUITES.join(", ")
                )));
            }
            let mut text = String::new();
            let mut all_pass = true;
            for name in names {
                for o in run_suite(name, cfg.seed, cfg.n_paths)? {
                    eprintln!(
                        "{} {}: {:?} = {:.6} (threshold {}) in {:.1}s",
                        if o.pass { "PASS" } else { "FAIL" },
                        o.name,
                        o.statistic_kind,
                        o.statistic,
                        o.threshold,
                        o.runtime_secs
                    );
                    all_pass &= o.pass;
                    text.push_str(&serde_json::to_string(&outcome_record(name, &o)?)?);
                    text.push('\n');
                }
            }
            emit(&cfg.output, &text)?;
            Ok(if all_pass { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

/// JSON-lines record of an outcome. Wall-clock time goes to standard error
/// only, so that identical arguments give byte-identical output.
fn outcome_record(suite: &str, o: &ValidationOutcome) -> Result<Value> {
    let Value::Object(fields) = serde_json::to_value(o)? else {
        return Err(Error::Io("outcome did not serialize to an object".into()));
    };
    let mut rec = Map::new();
    rec.insert("schema_version".into(), json!(SCHEMA_VERSION));
    rec.insert("suite".into(), json!(suite));
    for (k, v) in fields {
        if k != "runtime_secs" {
            rec.insert(k, v);
        }
    }
    Ok(Value::Object(rec))
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // A closed pipe (for example `| head`) is not a failure of the run.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

/// One solution path of `dZ = σ(Z-) dX` on `[0, horizon]`.
///
/// The driver is sampled on `[0, horizon]` and then extended over `[H, 2H]`
/// until its clock covers the horizon or has plateaued. After
/// [`FINE_DOUBLINGS`] extensions each new segment doubles its step as well,
/// so a driver that has escaped far out costs the same per segment. The
/// stream depends only on `(seed, path index)`.
pub fn simulate_path(
    p: &StableParams,
    s: &SigmaFunction,
    cfg: &RunConfig,
    index: usize,
) -> Result<Path> {
    let step = cfg.effective_step();
    let sampler = StableSampler::new(p);
    let mut rng = RandomState::new(cfg.seed, index as u64);
    let mut x = sample_path(p, cfg.x0, cfg.horizon, step, &mut rng)?;
    let mut segment_step = step;
    for k in 0..=MAX_DRIVER_DOUBLINGS {
        match time_change_solve(&x, s, p.alpha(), cfg.horizon) {
            Ok(mut z) => {
                z.seed = cfg.seed;
                return Ok(z);
            }
            Err(Error::ExhaustedPath { .. }) if k < MAX_DRIVER_DOUBLINGS => {}
            Err(e) => return Err(e),
        }
        if k >= FINE_DOUBLINGS {
            segment_step *= 2.0;
        }
        extend_driver(&mut x, &sampler, segment_step, &mut rng);
    }
    unreachable!("the last iteration returns")
}

/// Appends `[H, 2H]` sampled every `step` to a driver path ending at `H`.
fn extend_driver(x: &mut Path, sampler: &StableSampler, step: f64, rng: &mut RandomState) {
    let start = x.horizon;
    let n = (start / step).round().max(1.0) as usize;
    let mut v = *x.values.last().expect("driver paths are non-empty");
    for k in 1..=n {
        let t = if k == n {
            2.0 * start
        } else {
            start + k as f64 * step
        };
        v += sampler.increment(t - x.times[x.times.len() - 1], rng);
        x.times.push(t);
        x.values.push(v);
    }
    x.horizon = 2.0 * start;
}

fn simulate(cfg: &RunConfig) -> Result<String> {
    if !(cfg.horizon > 0.0) || !cfg.horizon.is_finite() {
        return Err(Error::OutOfRange(format!(
            "horizon = {} must be positive",
            cfg.horizon
        )));
    }
    let step = cfg.effective_step();
    if !(step > 0.0) || step > cfg.horizon {
        return Err(Error::OutOfRange(format!(
            "step = {step} must lie in (0, horizon]"
        )));
    }
    if cfg.n_paths == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let p = StableParams::new(cfg.alpha, cfg.rho)?;
    let s = SigmaFunction::parse(&cfg.sigma)?;
    let paths: Vec<Path> = par_map(cfg.n_paths, |i| simulate_path(&p, &s, cfg, i))
        .into_iter()
        .collect::<Result<_>>()?;
    match cfg.format {
        Format::Json => {
            let doc = json!({ "schema_version": SCHEMA_VERSION, "config": cfg, "paths": paths });
            let mut text = serde_json::to_string(&doc)?;
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let mut buf = format!(
                "# schema_version={SCHEMA_VERSION}\n# alpha={} rho={} sigma={} x0={} horizon={} step={} seed={}\n",
                cfg.alpha, cfg.rho, cfg.sigma, cfg.x0, cfg.horizon, step, cfg.seed
            )
            .into_bytes();
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(["path", "t", "value", "killed_at"])?;
                for (i, path) in paths.iter().enumerate() {
                    let killed = path.killed_at.map(|k| k.to_string()).unwrap_or_default();
                    for (t, v) in path.times.iter().zip(&path.values) {
                        w.write_record([
                            i.to_string(),
                            t.to_string(),
                            v.to_string(),
                            killed.clone(),
                        ])?;
                    }
                }
                w.flush()?;
            }
            String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
        }
    }
}

/// Names accepted by `oracle-eval --op`.
pub const ORACLE_OPS: [&str; 19] = [
    "h",
    "overshoot-cdf",
    "exit-density-avoid-zero",
    "exit-cdf-avoid-zero",
    "strip-exit-density",
    "strip-exit-cdf",
    "positive-exit-density",
    "positive-exit-cdf",
    "creep-probability",
    "killed-potential",
    "hitting-ratio",
    "killed-occupation",
    "halfline-killed-potential",
    "conditioned-clock",
    "explosion-time",
    "sp-exit-density",
    "sp-exit-atom",
    "exponent",
    "exponent-mean",
];

/// Exponent kind names in the order of [`ExponentKind::ALL`].
pub const EXPONENT_KINDS: [&str; 6] = [
    "censored",
    "radial",
    "cond-positive",
    "dagger-spec-pos",
    "hat-uparrow",
    "censored-circ",
];

fn exponent_kind_index(name: &str) -> Result<usize> {
    EXPONENT_KINDS
        .iter()
        .position(|k| *k == name)
        .ok_or_else(|| {
            Error::Parse(format!(
                "unknown exponent kind '{name}'; expected one of {}",
                EXPONENT_KINDS.join(", ")
            ))
        })
}

fn result_record(op: &str, r: OracleResult) -> Value {
    json!({ "schema_version": SCHEMA_VERSION, "op": op, "value": r.value, "abs_error_estimate": r.abs_error_estimate })
}

/// Evaluates the named identity with the arguments in `cfg.points`.
pub fn oracle_eval(cfg: &RunConfig, op: &str) -> Result<Value> {
    if op == "list" {
        return Ok(
            json!({ "schema_version": SCHEMA_VERSION, "ops": ORACLE_OPS, "exponent_kinds": EXPONENT_KINDS }),
        );
    }
    if !ORACLE_OPS.contains(&op) {
        return Err(Error::Parse(format!(
            "unknown op '{op}'; run with --op list for the available names"
        )));
    }
    let get = |k: &str| -> Result<f64> {
        cfg.points
            .get(k)
            .copied()
            .ok_or_else(|| Error::Parse(format!("op '{op}' needs --{k}")))
    };
    let p = StableParams::new(cfg.alpha, cfg.rho)?;
    let sigma = || SigmaFunction::parse(&cfg.sigma);
    let kind = || -> Result<ExponentKind> {
        let k = get("kind")?;
        ExponentKind::ALL
            .get(k as usize)
            .copied()
            .ok_or_else(|| Error::Parse(format!("bad exponent kind index {k}")))
    };
    let r = match op {
        "h" => OracleResult::exact(fo::h_function(&p, get("x")?)?),
        "overshoot-cdf" => fo::overshoot_cdf(
            &p,
            get("z")?,
            cfg.points.get("a").copied().unwrap_or(0.0),
            get("y")?,
        )?,
        "exit-density-avoid-zero" => fo::exit_density_avoid_zero(&p, get("x")?, get("y")?)?,
        "exit-cdf-avoid-zero" => fo::exit_cdf_avoid_zero(&p, get("x")?, get("y")?)?,
        "strip-exit-density" => fo::strip_exit_density(&p, get("x")?, get("y")?)?,
        "strip-exit-cdf" => fo::strip_exit_cdf(&p, get("x")?, get("y")?)?,
        "positive-exit-density" => fo::positive_exit_density(&p, get("x")?, get("y")?)?,
        "positive-exit-cdf" => fo::positive_exit_cdf(&p, get("x")?, get("y")?)?,
        "creep-probability" => fo::creep_probability(&p, get("x")?)?,
        "killed-potential" => fo::killed_potential_density(&p, get("x")?, get("y")?)?,
        "hitting-ratio" => OracleResult::exact(fo::hitting_ratio(&p, get("x")?, get("y")?)?),
        "killed-occupation" => {
            fo::killed_occupation(&p, &sigma()?, get("x")?, get("a")?, get("b")?)?
        }
        "halfline-killed-potential" => fo::halfline_killed_potential(&p, get("x")?, get("y")?)?,
        "conditioned-clock" => fo::conditioned_clock_expectation(&p, &sigma()?, get("x")?)?,
        "explosion-time" => fo::expected_explosion_time(&p, &sigma()?, get("x")?)?,
        "sp-exit-density" => fo::sp_interval_exit_density(&p, get("z")?, get("y")?)?,
        "sp-exit-atom" => {
            let atom = fo::sp_interval_exit_atom(&p, get("z")?)?;
            let mut rec = result_record(op, atom.weight);
            rec["location"] = json!(atom.location);
            return Ok(rec);
        }
        "exponent" => {
            let e = LevyExponent::new(kind()?, p);
            let v = exponent_eval(&e, get("z")?)?;
            return Ok(
                json!({ "schema_version": SCHEMA_VERSION, "op": op, "re": v.re, "im": v.im }),
            );
        }
        "exponent-mean" => OracleResult::exact(mean_at_one(&LevyExponent::new(kind()?, p))?),
        _ => unreachable!("op names are checked against ORACLE_OPS"),
    };
    Ok(result_record(op, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_json() {
        let mut cfg = RunConfig {
            subcommand: Command::Simulate,
            alpha: 0.7,
            n_paths: 12,
            ..Default::default()
        };
        cfg.points.insert("x".into(), 0.25);
        cfg.output = Some("out.csv".into());
        let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn documented_defaults() {
        let cfg = RunConfig::from_json(r#"{"subcommand":"validate"}"#).unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.n_paths, 10_000);
        assert_eq!(cfg.effective_step(), 1e-3 * cfg.horizon);
        assert!(RunConfig::from_json(r#"{"subcommand":"validate","bogus":1}"#).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(
            run([
                "stablesde",
                "classify",
                "--alpha",
                "2",
                "--sigma",
                "power:c=1,theta=2"
            ]),
            EXIT_USAGE
        );
        assert_eq!(
            run([
                "stablesde",
                "classify",
                "--alpha",
                "1.5",
                "--sigma",
                "nonsense"
            ]),
            EXIT_USAGE
        );
        assert_eq!(run(["stablesde", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["stablesde", "oracle-eval", "--op", "h"]), EXIT_USAGE);
        assert_eq!(
            run(["stablesde", "validate", "--suite", "nope"]),
            EXIT_USAGE
        );
    }

    #[test]
    fn oracle_eval_names_every_op() {
        let cfg = RunConfig::default();
        let listed = oracle_eval(&cfg, "list").unwrap();
        assert_eq!(listed["ops"].as_array().unwrap().len(), ORACLE_OPS.len());
        let mut cfg = RunConfig {
            alpha: 1.5,
            rho: 0.5,
            ..Default::default()
        };
        cfg.points.insert("x".into(), 2.0);
        let h = oracle_eval(&cfg, "h").unwrap();
        assert_eq!(h["schema_version"], json!(1));
        let direct = fo::h_function(&StableParams::symmetric(1.5).unwrap(), 2.0).unwrap();
        assert_eq!(h["value"].as_f64().unwrap(), direct);
    }

    #[test]
    fn simulated_paths_are_reproducible() {
        let cfg = RunConfig {
            subcommand: Command::Simulate,
            alpha: 1.5,
            sigma: "power:c=1,theta=2".into(),
            n_paths: 3,
            horizon: 0.5,
            ..Default::default()
        };
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("# schema_version=1\n"));
        assert!(a
            .lines()
            .nth(2)
            .unwrap()
            .starts_with("path,t,value,killed_at"));
    }
}
