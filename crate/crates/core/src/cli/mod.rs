//! The `cfcodes` command-line front end.
//!
//! Every run prints one JSON object per line by default, each carrying the
//! format version, the subcommand and the fully resolved configuration next to
//! the result. Exit codes: 0 on success, 1 on parameter, parse or domain
//! errors, 2 when a work budget would be exceeded.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bits::BitVector;
use crate::bounds;
use crate::code::{emit_code, parse_code, BinaryCode};
use crate::cover::{self, AnalyzeOptions, Mode};
use crate::decoder;
use crate::design::{self, DesignOptions, Model};
use crate::ensemble::{self, EnsembleParams};
use crate::error::{Error, Result};
use crate::golden;

pub use output::Format;

pub const FORMAT_VERSION: &str = "cfcodes/1";

#[derive(Debug, Parser, Serialize)]
#[command(name = "cfcodes", version, about = "Almost cover-free codes and designs")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Work budget override for exhaustive computations.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Classify s-subsets as (s,l)-bad or good.
    Analyze(AnalyzeArgs),
    /// Analyse outcome collisions of the superset family.
    Design(DesignArgs),
    /// Decode an outcome vector.
    Decode(DecodeArgs),
    /// Monte Carlo estimate of the bad-set probability in the random ensemble.
    Simulate(SimulateArgs),
    /// Capacity and error-exponent bounds.
    Bounds(BoundsArgs),
    /// Run the built-in golden checks.
    Selftest,
    /// Delete the column contained in the fewest bad sets.
    Shrink(ShrinkArgs),
    /// Draw a code from the constant-weight ensemble.
    SampleCode(SampleCodeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Strict,
    Relaxed,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Strict => Model::Strict,
            ModelArg::Relaxed => Model::Relaxed,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Maximum number of listed sets.
    #[arg(long, default_value_t = cover::DEFAULT_SET_CAP)]
    pub cap: usize,
    /// Also report the almost cover-free verdict for this epsilon.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DesignArgs {
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Strict)]
    pub model: ModelArg,
    #[arg(long, default_value_t = cover::DEFAULT_SET_CAP)]
    pub cap: usize,
    /// Check the implications between cover-free codes and designs.
    #[arg(long)]
    pub implications: bool,
    /// Report the bound on the strict design error through the code error.
    #[arg(long)]
    pub projection: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DecodeArgs {
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub outcome: String,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
    /// Cross-check with the exhaustive decoder.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, value_enum, default_value_t = ModelArg::Strict)]
    pub model: ModelArg,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long = "Q")]
    #[serde(rename = "Q")]
    pub big_q: f64,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// Also compute the exact probability by exhaustive enumeration.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ShrinkArgs {
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleCodeArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long = "Q")]
    #[serde(rename = "Q")]
    pub big_q: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[command(subcommand)]
    pub which: BoundsCommand,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsCommand {
    /// Random-coding capacity lower bound.
    Capacity(SlArgs),
    /// Error-exponent lower bound at rate R, optionally at a fixed Q.
    Exponent(ExponentArgs),
    /// The 1/(s l) upper bound.
    Upper(SlArgs),
    /// Leading-order asymptotic rate expressions.
    Asymptotic(SlArgs),
    /// Size of the strict superset family.
    Count(CountArgs),
    /// Lower bound on the design error at length N and rate R.
    Floor(FloorArgs),
    /// All auxiliary quantities at one (Q, q).
    Point(PointArgs),
    /// Table over a range of (s, l).
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SlArgs {
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ExponentArgs {
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub rate: f64,
    #[arg(long = "Q")]
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub big_q: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub t: String,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct FloorArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub rate: f64,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PointArgs {
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long = "Q")]
    #[serde(rename = "Q")]
    pub big_q: f64,
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    pub s_min: usize,
    #[arg(long, default_value_t = 6)]
    pub s_max: usize,
    #[arg(long, default_value_t = 2)]
    pub l_min: usize,
    #[arg(long, default_value_t = 3)]
    pub l_max: usize,
    /// Also evaluate the exponent lower bound at this rate.
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            if n == 0 {
                return Err(Error::Parameter("--threads must be >= 1".into()));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?
    };
    let records = pool.install(|| dispatch(cli))?;
    let mut code = 0;
    let mut emitter = output::Emitter::new(cli.format);
    for rec in &records {
        if rec.failed {
            code = 1;
        }
        emitter.emit(out, &envelope(cli, rec), &rec.result)?;
    }
    Ok(code)
}

struct Record {
    result: Value,
    /// Marks a completed run whose outcome is a failed check (selftest).
    failed: bool,
}

impl Record {
    fn ok(result: impl Serialize) -> Result<Self> {
        Ok(Record {
            result: to_value(result)?,
            failed: false,
        })
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(format!("serialisation failed: {e}")))
}

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Analyze(_) => "analyze".into(),
        Command::Design(_) => "design".into(),
        Command::Decode(_) => "decode".into(),
        Command::Simulate(_) => "simulate".into(),
        Command::Bounds(b) => format!(
            "bounds {}",
            match b.which {
                BoundsCommand::Capacity(_) => "capacity",
                BoundsCommand::Exponent(_) => "exponent",
                BoundsCommand::Upper(_) => "upper",
                BoundsCommand::Asymptotic(_) => "asymptotic",
                BoundsCommand::Count(_) => "count",
                BoundsCommand::Floor(_) => "floor",
                BoundsCommand::Point(_) => "point",
                BoundsCommand::Sweep(_) => "sweep",
            }
        ),
        Command::Selftest => "selftest".into(),
        Command::Shrink(_) => "shrink".into(),
        Command::SampleCode(_) => "sample-code".into(),
    }
}

fn envelope(cli: &Cli, rec: &Record) -> Value {
    let mut config = serde_json::to_value(&cli.command).unwrap_or(Value::Null);
    // keep only the argument object of the (possibly nested) subcommand
    while let Value::Object(map) = &config {
        if map.len() == 1 {
            let (_, inner) = map.iter().next().unwrap();
            if inner.is_object() {
                config = inner.clone();
                continue;
            }
        }
        break;
    }
    if let Value::Object(map) = &mut config {
        map.insert("format".into(), to_value(cli.format).unwrap_or(Value::Null));
        map.insert("budget".into(), json!(cli.budget));
        map.insert("threads".into(), json!(cli.threads));
    } else {
        config = json!({ "format": cli.format, "budget": cli.budget, "threads": cli.threads });
    }
    json!({
        "format_version": FORMAT_VERSION,
        "command": command_name(&cli.command),
        "config": config,
        "result": rec.result,
    })
}

fn read_code(path: &PathBuf) -> Result<BinaryCode> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_code(&text)
}

fn dispatch(cli: &Cli) -> Result<Vec<Record>> {
    let budget = cli.budget;
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, budget).map(|r| vec![r]),
        Command::Design(a) => cmd_design(a, budget).map(|r| vec![r]),
        Command::Decode(a) => cmd_decode(a, budget).map(|r| vec![r]),
        Command::Simulate(a) => cmd_simulate(a, budget).map(|r| vec![r]),
        Command::Bounds(b) => cmd_bounds(&b.which),
        Command::Selftest => cmd_selftest().map(|r| vec![r]),
        Command::Shrink(a) => cmd_shrink(a, budget).map(|r| vec![r]),
        Command::SampleCode(a) => cmd_sample_code(a).map(|r| vec![r]),
    }
}

fn cmd_analyze(a: &AnalyzeArgs, budget: Option<u64>) -> Result<Record> {
    let code = read_code(&a.code)?;
    let mode = match a.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Sample => {
            let trials = a
                .trials
                .ok_or_else(|| Error::Parameter("--mode sample needs --trials".into()))?;
            let seed = a
                .seed
                .ok_or_else(|| Error::Parameter("--mode sample needs --seed".into()))?;
            Mode::Sampled { trials, seed }
        }
    };
    let opts = AnalyzeOptions {
        budget: budget.unwrap_or(cover::DEFAULT_BUDGET),
        cap: a.cap,
        keep_sets: true,
    };
    let report = cover::analyze(&code, a.s, a.l, mode, &opts)?;
    let mut value = to_value(&report)?;
    if let Some(eps) = a.epsilon {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Parameter(format!("epsilon must lie in [0,1], got {eps}")));
        }
        let verdict = match mode {
            Mode::Exact => json!(report.epsilon.le_f64(eps)),
            Mode::Sampled { .. } => Value::Null,
        };
        value["is_cf"] = verdict;
    }
    Ok(Record {
        result: value,
        failed: false,
    })
}

fn cmd_design(a: &DesignArgs, budget: Option<u64>) -> Result<Record> {
    let code = read_code(&a.code)?;
    let opts = DesignOptions {
        budget: budget.unwrap_or(design::DEFAULT_SUPERSET_BUDGET),
        cap: a.cap,
    };
    let report = design::analyze_design(&code, a.s, a.l, a.model.into(), &opts)?;
    let mut value = to_value(&report)?;
    if a.implications {
        value["implications"] = to_value(design::check_implications(&code, a.s, a.l, &opts)?)?;
    }
    if a.projection {
        value["projection"] = to_value(design::projection_bad_bound(
            &code,
            a.s,
            a.l,
            a.model == ModelArg::Strict,
            &opts,
        )?)?;
    }
    Ok(Record {
        result: value,
        failed: false,
    })
}

fn cmd_decode(a: &DecodeArgs, budget: Option<u64>) -> Result<Record> {
    let code = read_code(&a.code)?;
    let r: BitVector = a.outcome.parse()?;
    let cost = decoder::decode_cost(code.n_cols(), a.l);
    let limit = budget.unwrap_or(design::DEFAULT_SUPERSET_BUDGET);
    if cost > BigUint::from(limit) {
        return Err(Error::Budget {
            needed: cost.to_string(),
            budget: limit,
            hint: "too many candidate sets for the decoder; raise --budget".into(),
        });
    }
    if a.exhaustive {
        let (res, pre) = decoder::decode_verified(&code, &r, a.s, a.l, a.model.into(), limit)?;
        let mut value = to_value(&res)?;
        value["model"] = to_value(a.model)?;
        value["preimages"] = to_value(&pre)?;
        Ok(Record {
            result: value,
            failed: false,
        })
    } else {
        Record::ok(decoder::decode(&code, &r, a.s, a.l)?)
    }
}

fn cmd_simulate(a: &SimulateArgs, budget: Option<u64>) -> Result<Record> {
    let params = EnsembleParams::new(a.n, a.t, a.big_q)?;
    let est = ensemble::mc_bad_probability(&params, a.s, a.l, a.trials, a.seed)?;
    let ub = ensemble::union_bound_expectation(&params, a.s, a.l)?;
    let exact = if a.exact {
        let limit = budget.unwrap_or(cover::DEFAULT_BUDGET);
        let cost = ensemble::exhaustive_cost(&params, a.s);
        if cost > BigUint::from(limit) {
            return Err(Error::Budget {
                needed: cost.to_string(),
                budget: limit,
                hint: "the exhaustive ensemble oracle is only feasible for tiny N and t".into(),
            });
        }
        Some(ensemble::exhaustive_bad_probability(&params, a.s, a.l)?)
    } else {
        None
    };
    Record::ok(json!({
        "params": params,
        "estimate": est,
        "std_error": est.std_error,
        "union_bound": ub,
        "exact": exact,
    }))
}

fn cmd_shrink(a: &ShrinkArgs, budget: Option<u64>) -> Result<Record> {
    let code = read_code(&a.code)?;
    let opts = AnalyzeOptions {
        budget: budget.unwrap_or(cover::DEFAULT_BUDGET),
        keep_sets: false,
        ..Default::default()
    };
    let before = cover::analyze(&code, a.s, a.l, Mode::Exact, &opts)?;
    let (shrunk, deleted) = cover::shrink_code(&code, a.s, a.l, &opts)?;
    let after = cover::analyze(&shrunk, a.s - 1, a.l, Mode::Exact, &opts)?;
    Record::ok(json!({
        "deleted_column": deleted + 1,
        "epsilon_before": before.epsilon,
        "epsilon_after": after.epsilon,
        "code": emit_code(&shrunk),
    }))
}

fn cmd_sample_code(a: &SampleCodeArgs) -> Result<Record> {
    let params = EnsembleParams::new(a.n, a.t, a.big_q)?;
    let code = ensemble::sample_code(&params, a.seed);
    Record::ok(json!({ "params": params, "code": emit_code(&code) }))
}

fn cmd_selftest() -> Result<Record> {
    let checks = golden::run_golden_checks()?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(Record {
        result: json!({ "passed": passed, "checks": checks }),
        failed: !passed,
    })
}

fn cmd_bounds(which: &BoundsCommand) -> Result<Vec<Record>> {
    let one = |v: Value| Ok(vec![Record { result: v, failed: false }]);
    match which {
        BoundsCommand::Capacity(a) => {
            let r = bounds::capacity_lower(a.s, a.l)?;
            one(json!({
                "s": a.s,
                "l": a.l,
                "value": r.value,
                "argmax_Q": r.argmax_q,
                "z": r.z,
                "q_hat": r.q_hat,
                "capacity_upper": bounds::capacity_upper(a.s, a.l)?,
                "grid_local_maxima": r.grid_local_maxima,
                "solver": r.solver,
            }))
        }
        BoundsCommand::Exponent(a) => match a.big_q {
            Some(q) => one(to_value(bounds::exponent_lower_at_q(a.s, a.l, a.rate, q)?)?),
            None => {
                let r = bounds::exponent_lower(a.s, a.l, a.rate)?;
                one(json!({
                    "s": a.s,
                    "l": a.l,
                    "R": a.rate,
                    "value": r.value,
                    "argmax_Q": r.argmax_q,
                    "argmin_q": r.argmin_q,
                    "q_hat": r.q_hat,
                    "grid_local_maxima": r.grid_local_maxima,
                    "solver": r.solver,
                }))
            }
        },
        BoundsCommand::Upper(a) => one(json!({ "s": a.s, "l": a.l, "value": bounds::capacity_upper(a.s, a.l)? })),
        BoundsCommand::Asymptotic(a) => one(to_value(bounds::asymptotic_rates(a.s, a.l)?)?),
        BoundsCommand::Count(a) => {
            let t: BigUint = a
                .t
                .parse()
                .map_err(|_| Error::Parameter(format!("--t must be a nonnegative integer, got {:?}", a.t)))?;
            let count = bounds::superset_count(&t, a.s, a.l);
            one(json!({
                "t": a.t,
                "s": a.s,
                "l": a.l,
                "count": count.to_string(),
                "log2_count": crate::combin::log2_big(&count),
            }))
        }
        BoundsCommand::Floor(a) => one(json!({
            "N": a.n,
            "R": a.rate,
            "s": a.s,
            "l": a.l,
            "value": bounds::design_error_floor(a.n, a.rate, a.s, a.l)?,
        })),
        BoundsCommand::Point(a) => one(to_value(bounds::bound_point(a.s, a.l, a.big_q, a.q)?)?),
        BoundsCommand::Sweep(a) => {
            if a.s_min > a.s_max || a.l_min > a.l_max {
                return Err(Error::Parameter("empty sweep range".into()));
            }
            let mut rows = Vec::new();
            for s in a.s_min..=a.s_max {
                for l in a.l_min..=a.l_max {
                    let c = bounds::capacity_lower(s, l)?;
                    let asym = bounds::asymptotic_rates(s, l)?;
                    let mut row = json!({
                        "s": s,
                        "l": l,
                        "capacity_lower": c.value,
                        "argmax_Q": c.argmax_q,
                        "z": c.z,
                        "q_hat": c.q_hat,
                        "z_residual": c.solver.residual,
                        "capacity_upper": bounds::capacity_upper(s, l)?,
                        "capacity_lower_asym": asym.capacity_lower_asym,
                    });
                    if let Some(rate) = a.rate {
                        row["R"] = json!(rate);
                        row["exponent_lower"] = json!(bounds::exponent_lower(s, l, rate)?.value);
                    }
                    rows.push(Record { result: row, failed: false });
                }
            }
            Ok(rows)
        }
    }
}
