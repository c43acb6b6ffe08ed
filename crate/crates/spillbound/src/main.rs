//! Command-line surface: simulate trials, estimate effects and bounds,
//! draw the simultaneous confidence region, emit hypothetical bound
//! curves, build the indistinguishable-population pair, and run the
//! verification suites. Every report embeds the resolved configuration.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use spillbound::error::{Error, Result};
use spillbound::estimate::{bound_curves, bounds_binary, bounds_general, point_estimates};
use spillbound::generate::{random_population, toy_a, PopulationParams};
use spillbound::impossibility::{build_counterexample, verify_counterexample, ImpossibilityTarget};
use spillbound::inference::{simultaneous_region, tau_confidence_set, TauSetShape};
use spillbound::io::{
    fmt_sig17, parse_column_map, parse_trial_csv, population_to_json, read_population_json,
    to_json_17, write_trial_csv, ColumnMap, ParsedTrial,
};
use spillbound::population::{OutcomeMode, Population};
use spillbound::randomize::{realize, sample_assignment, Design};
use spillbound::report::{
    normalize_trial, restore_bounds, restore_estimates, restore_extent, restore_tau_set,
    restore_value, EffectDirection, OutputFormat, RunConfig,
};
use spillbound::verify::{run_suite, SuiteOverrides};

#[derive(Parser)]
#[command(
    name = "spillbound",
    version,
    about = "Design-based analysis of cluster-randomized trials with noncompliance and within-cluster spillovers"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Root RNG seed; reruns with the same seed are byte-identical
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Significance level, strictly between 0 and 1
    #[arg(long, global = true, default_value_t = 0.05)]
    alpha: f64,
    /// Which way a beneficial effect moves the outcome
    #[arg(long, global = true, value_enum, default_value_t = EffectDirection::BeneficialIncreasesY)]
    direction: EffectDirection,
    /// Resolution of rasterized grids and derived compliance grids
    #[arg(long, global = true, default_value_t = 201)]
    grid: usize,
    /// Refuse exhaustive enumeration beyond this many assignments
    #[arg(long, global = true, default_value_t = 1_000_000)]
    cap: u64,
    /// Report rendering
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw or load a population, randomize clusters, emit the realized trial
    Simulate(SimulateArgs),
    /// Point estimates, the tau confidence set, and subgroup bounds from a trial CSV
    Estimate(EstimateArgs),
    /// Simultaneous confidence region for the (spillover, effect) pair
    Region(RegionArgs),
    /// Hypothetical bound curves over a compliance-rate grid
    Curves(CurvesArgs),
    /// Build and check a pair of populations no trial can tell apart
    Impossible(ImpossibleArgs),
    /// Run the statistical property suites
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Binary,
    Real,
}

impl From<ModeArg> for OutcomeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Binary => OutcomeMode::Binary,
            ModeArg::Real => OutcomeMode::Real,
        }
    }
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["toy_a", "population", "clusters"])))]
struct SimulateArgs {
    /// Use the built-in four-unit reference population
    #[arg(long = "toy-a")]
    toy_a: bool,
    /// Load a population from a JSON file
    #[arg(long)]
    population: Option<PathBuf>,
    /// Generate a random population with this many clusters
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, default_value_t = 2)]
    size_min: usize,
    #[arg(long, default_value_t = 6)]
    size_max: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Binary)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0.5)]
    p_complier: f64,
    #[arg(long, default_value_t = 0.0)]
    p_always_taker: f64,
    #[arg(long, default_value_t = 0.5)]
    p_never_taker: f64,
    #[arg(long, default_value_t = 0.0)]
    p_defier: f64,
    /// Drop the non-harmful-effects constraint on generated outcome tables
    #[arg(long)]
    free_effects: bool,
    /// Number of treated clusters (required unless --assign is given)
    #[arg(long)]
    treated: Option<usize>,
    /// Explicit assignment vector, e.g. 0,1,1,0; overrides sampling
    #[arg(long)]
    assign: Option<String>,
    /// Also write the population JSON here
    #[arg(long = "pop-out")]
    pop_out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Trial CSV file
    trial: PathBuf,
    /// Column mapping, e.g. cluster_id=school,z=assigned,d=took,y=outcome
    #[arg(long)]
    map: Option<String>,
}

#[derive(Args)]
struct RegionArgs {
    /// Trial CSV file (binary outcomes, one-sided compliance)
    trial: PathBuf,
    /// Column mapping, e.g. cluster_id=school,z=assigned,d=took,y=outcome
    #[arg(long)]
    map: Option<String>,
    /// Write the rasterized membership grid to this CSV file
    #[arg(long = "raster-out")]
    raster_out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    /// Comma-separated hypothetical ratio values; empty for header-only output
    #[arg(long, default_value = "0.75,1.25", allow_hyphen_values = true)]
    taus: String,
    /// Comma-separated compliance rates strictly inside (0,1); defaults to
    /// a grid of --grid interior points
    #[arg(long)]
    compliance: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    TotalEffectCompliers,
    SpilloverAlwaysTakers,
    SpilloverNeverTakers,
    All,
}

#[derive(Args)]
struct ImpossibleArgs {
    /// Which estimand the pair disagrees on
    #[arg(long, value_enum, default_value_t = TargetArg::All)]
    target: TargetArg,
    /// Comma-separated cluster sizes; the first cluster needs at least 2 units
    #[arg(long = "cluster-sizes", default_value = "3,2")]
    cluster_sizes: String,
    /// Treated clusters in the verification design
    #[arg(long, default_value_t = 1)]
    treated: usize,
    /// Intended estimand gap between the two populations
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    delta: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Decomposition,
    OneSidedDecomposition,
    Unbiasedness,
    Impossibility,
    IdentityContainment,
    Consistency,
    Pivotality,
    Coverage,
    Geometry,
    Curves,
    All,
}

impl SuiteArg {
    fn name(self) -> &'static str {
        match self {
            SuiteArg::Decomposition => "decomposition",
            SuiteArg::OneSidedDecomposition => "one-sided-decomposition",
            SuiteArg::Unbiasedness => "unbiasedness",
            SuiteArg::Impossibility => "impossibility",
            SuiteArg::IdentityContainment => "identity-containment",
            SuiteArg::Consistency => "consistency",
            SuiteArg::Pivotality => "pivotality",
            SuiteArg::Coverage => "coverage",
            SuiteArg::Geometry => "geometry",
            SuiteArg::Curves => "curves",
            SuiteArg::All => "all",
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Which property suite to run
    #[arg(value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Override the population count of sampling-based identity suites
    #[arg(long)]
    pops: Option<usize>,
    /// Override the replication count of Monte Carlo suites
    #[arg(long)]
    reps: Option<usize>,
    /// Override the trial count of coverage/geometry suites
    #[arg(long)]
    trials: Option<usize>,
    /// Override the cluster count of the coverage suite
    #[arg(long, alias = "J")]
    clusters: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = RunConfig {
        seed: cli.global.seed,
        alpha: cli.global.alpha,
        direction: cli.global.direction,
        grid_resolution: cli.global.grid,
        enumeration_cap: cli.global.cap,
        output_format: cli.global.format,
    };
    cfg.validate()?;
    let out = cli.global.out.as_deref();
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&cfg, &args, out),
        Command::Estimate(args) => cmd_estimate(&cfg, &args, out),
        Command::Region(args) => cmd_region(&cfg, &args, out),
        Command::Curves(args) => cmd_curves(&cfg, &args, out),
        Command::Impossible(args) => cmd_impossible(&cfg, &args, out),
        Command::Verify(args) => cmd_verify(&cfg, &args, out),
    }
}

// ---- plumbing ----

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(Error::from)
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// key,value rows from a JSON report, arrays indexed, nested keys dotted.
fn flatten_csv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<String>) {
        match v {
            Value::Object(m) => {
                for (k, vv) in m {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, vv, rows);
                }
            }
            Value::Array(a) => {
                for (i, vv) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), vv, rows);
                }
            }
            Value::Null => rows.push(format!("{prefix},")),
            Value::String(s) => rows.push(format!("{prefix},{}", csv_quote(s))),
            other => rows.push(format!("{prefix},{}", to_json_17(other))),
        }
    }
    let mut rows = vec!["key,value".to_string()];
    walk("", v, &mut rows);
    rows.join("\n") + "\n"
}

fn report_skeleton(cfg: &RunConfig, command: &str, invocation: Value) -> Result<Map<String, Value>> {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    m.insert("config".into(), to_value(&cfg.echo())?);
    m.insert("invocation".into(), invocation);
    Ok(m)
}

fn render_report(cfg: &RunConfig, report: &Map<String, Value>, skip_in_csv: &[&str]) -> String {
    let value = Value::Object(report.clone());
    match cfg.output_format {
        OutputFormat::Json => to_json_17(&value) + "\n",
        OutputFormat::Csv => {
            let mut trimmed = report.clone();
            for k in skip_in_csv {
                trimmed.remove(*k);
            }
            flatten_csv(&Value::Object(trimmed))
        }
    }
}

fn parse_f64_list(spec: &str, what: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::invalid(format!("{what}: '{s}' is not a number")))
        })
        .collect()
}

fn parse_usize_list(spec: &str, what: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::invalid(format!("{what}: '{s}' is not a count")))
        })
        .collect()
}

fn column_map(spec: &Option<String>) -> Result<ColumnMap> {
    match spec {
        Some(s) => parse_column_map(s),
        None => Ok(ColumnMap::default()),
    }
}

fn load_trial(path: &Path, map: &Option<String>) -> Result<ParsedTrial> {
    let text = read_file(path)?;
    parse_trial_csv(&text, &column_map(map)?, &path.display().to_string())
}

fn data_summary(parsed: &ParsedTrial) -> Value {
    let t = &parsed.trial;
    let violations: Vec<Value> = parsed
        .one_sided_violations
        .iter()
        .map(|r| Value::from(*r as u64))
        .collect();
    let mut m = Map::new();
    m.insert("n_clusters".into(), Value::from(t.n_clusters() as u64));
    m.insert(
        "n_treated_clusters".into(),
        Value::from(t.n_treated_clusters() as u64),
    );
    m.insert("n_units".into(), Value::from(t.n_units() as u64));
    m.insert("outcomes_binary".into(), Value::Bool(t.outcomes_binary()));
    m.insert("one_sided_violation_rows".into(), Value::Array(violations));
    Value::Object(m)
}

// ---- simulate ----

fn parse_assignment(spec: &str) -> Result<Vec<bool>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(Error::invalid(format!(
                "assignment entries must be 0 or 1, got '{other}'"
            ))),
        })
        .collect()
}

fn cmd_simulate(cfg: &RunConfig, args: &SimulateArgs, out: Option<&Path>) -> Result<ExitCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pop: Population = if args.toy_a {
        toy_a()
    } else if let Some(path) = &args.population {
        read_population_json(&read_file(path)?)?
    } else {
        let params = PopulationParams {
            clusters: args.clusters.expect("required by the source group"),
            size_min: args.size_min,
            size_max: args.size_max,
            mode: args.mode.into(),
            p_complier: args.p_complier,
            p_always_taker: args.p_always_taker,
            p_never_taker: args.p_never_taker,
            p_defier: args.p_defier,
            enforce_nonneg_effects: !args.free_effects,
            require_complier: true,
        };
        random_population(&params, &mut rng)?
    };
    let j = pop.n_clusters();
    let z: Vec<bool> = match &args.assign {
        Some(spec) => {
            let z = parse_assignment(spec)?;
            if z.len() != j {
                return Err(Error::invalid(format!(
                    "assignment has {} entries for {} clusters",
                    z.len(),
                    j
                )));
            }
            z
        }
        None => {
            let m = args.treated.ok_or_else(|| {
                Error::invalid("--treated is required unless --assign is given")
            })?;
            let design = Design::new(j, m)?;
            sample_assignment(&design, &mut rng)
        }
    };
    // both arms must be present, same as any analyzable design
    Design::new(j, z.iter().filter(|b| **b).count())?;
    let trial = realize(&pop, &z)?;
    if let Some(path) = &args.pop_out {
        write_file(path, &population_to_json(&pop)?)?;
    }
    emit(out, &write_trial_csv(&trial, None)?)?;
    Ok(ExitCode::SUCCESS)
}

// ---- estimate ----

fn cmd_estimate(cfg: &RunConfig, args: &EstimateArgs, out: Option<&Path>) -> Result<ExitCode> {
    let parsed = load_trial(&args.trial, &args.map)?;
    let raw = &parsed.trial;
    let design = Design::new(raw.n_clusters(), raw.n_treated_clusters())?;
    let normalized = normalize_trial(raw, cfg.direction);
    let est = point_estimates(&normalized, &design)?;
    if est.tau_hat.is_none() {
        return Err(Error::undefined(
            "assignment shows no effect on receipt (tau_d_hat = 0), so the ratio estimand is undefined",
        ));
    }

    let (tau_interval, tau_diag) = match tau_confidence_set(&normalized, &design, cfg.alpha) {
        Ok(set) => (to_value(&restore_tau_set(&set, cfg.direction))?, None),
        Err(e) => (Value::Null, Some(e.to_string())),
    };

    let (bounds, bounds_diag) = if !parsed.one_sided_violations.is_empty() {
        (
            Value::Null,
            Some(format!(
                "one-sided compliance is violated at rows {:?}; subgroup bounds are undefined",
                parsed.one_sided_violations
            )),
        )
    } else {
        let tau_hat = est.tau_hat.expect("checked above");
        let result = if normalized.outcomes_binary() {
            bounds_binary(tau_hat, est.n_co_hat, est.n_nt_hat)
        } else {
            bounds_general(tau_hat, est.n_co_hat, est.n_nt_hat)
        };
        match result {
            Ok(b) => (to_value(&restore_bounds(&b, cfg.direction))?, None),
            Err(e) => (Value::Null, Some(e.to_string())),
        }
    };

    let mut invocation = Map::new();
    invocation.insert(
        "trial".into(),
        Value::String(args.trial.display().to_string()),
    );
    invocation.insert(
        "column_map".into(),
        args.map.clone().map_or(Value::Null, Value::String),
    );
    let mut report = report_skeleton(cfg, "estimate", Value::Object(invocation))?;
    report.insert("data".into(), data_summary(&parsed));
    report.insert(
        "estimates".into(),
        to_value(&restore_estimates(&est, cfg.direction))?,
    );
    report.insert("tau_interval".into(), tau_interval);
    report.insert(
        "tau_interval_diagnostic".into(),
        tau_diag.map_or(Value::Null, Value::String),
    );
    report.insert("bounds".into(), bounds);
    report.insert(
        "bounds_diagnostic".into(),
        bounds_diag.map_or(Value::Null, Value::String),
    );
    emit(out, &render_report(cfg, &report, &[]))?;
    Ok(ExitCode::SUCCESS)
}

// ---- region ----

fn cmd_region(cfg: &RunConfig, args: &RegionArgs, out: Option<&Path>) -> Result<ExitCode> {
    let parsed = load_trial(&args.trial, &args.map)?;
    if !parsed.one_sided_violations.is_empty() {
        return Err(Error::invalid(format!(
            "one-sided compliance is violated at rows {:?}; the region requires it",
            parsed.one_sided_violations
        )));
    }
    let raw = &parsed.trial;
    let design = Design::new(raw.n_clusters(), raw.n_treated_clusters())?;
    let normalized = normalize_trial(raw, cfg.direction);
    let region = simultaneous_region(&normalized, &design, cfg.alpha)?;
    let raster = region.raster(cfg.grid_resolution)?;

    // band segment on the reported scale, when the set is bounded
    let restored_set = restore_tau_set(&region.tau_set, cfg.direction);
    let band_segment = match restored_set.shape {
        TauSetShape::Interval { lower, upper } => {
            let mut m = Map::new();
            m.insert("tau_lower".into(), Value::from(lower));
            m.insert("tau_upper".into(), Value::from(upper));
            Value::Object(m)
        }
        TauSetShape::Point { value } => {
            let mut m = Map::new();
            m.insert("tau_lower".into(), Value::from(value));
            m.insert("tau_upper".into(), Value::from(value));
            Value::Object(m)
        }
        _ => Value::Null,
    };

    let extent_value = |e: Option<(f64, f64)>| -> Value {
        match e {
            Some((lo, hi)) => Value::Array(vec![Value::from(lo), Value::from(hi)]),
            None => Value::Null,
        }
    };

    // row-major raster on the analysis grid; coordinates are restored
    // only where they are printed (the raster CSV)
    let rows: Vec<Value> = (0..raster.resolution)
        .map(|iy| {
            let row: String = (0..raster.resolution)
                .map(|ix| if raster.at(ix, iy) { '1' } else { '0' })
                .collect();
            Value::String(row)
        })
        .collect();
    let mut raster_obj = Map::new();
    raster_obj.insert(
        "resolution".into(),
        Value::from(raster.resolution as u64),
    );
    raster_obj.insert(
        "orientation".into(),
        Value::String(
            "rows are the effect axis, columns the spillover axis, both on the analysis scale 0..1"
                .into(),
        ),
    );
    raster_obj.insert("rows".into(), Value::Array(rows));

    if let Some(path) = &args.raster_out {
        let mut csv = String::from("x,y,inside\n");
        for iy in 0..raster.resolution {
            for ix in 0..raster.resolution {
                let x = restore_value(raster.coord(ix), cfg.direction);
                let y = restore_value(raster.coord(iy), cfg.direction);
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt_sig17(x),
                    fmt_sig17(y),
                    u8::from(raster.at(ix, iy))
                ));
            }
        }
        write_file(path, &csv)?;
    }

    let mut invocation = Map::new();
    invocation.insert(
        "trial".into(),
        Value::String(args.trial.display().to_string()),
    );
    invocation.insert(
        "column_map".into(),
        args.map.clone().map_or(Value::Null, Value::String),
    );
    invocation.insert(
        "raster_out".into(),
        args.raster_out
            .as_ref()
            .map_or(Value::Null, |p| Value::String(p.display().to_string())),
    );
    let mut report = report_skeleton(cfg, "region", Value::Object(invocation))?;
    report.insert("data".into(), data_summary(&parsed));
    report.insert("r_hat".into(), Value::from(region.r_hat));
    report.insert("p_co_hat".into(), Value::from(region.p_co_hat));
    report.insert("tau_set".into(), to_value(&restored_set)?);
    report.insert("band_segment".into(), band_segment);
    report.insert(
        "x_extent".into(),
        extent_value(restore_extent(region.x_extent, cfg.direction)),
    );
    report.insert(
        "y_extent".into(),
        extent_value(restore_extent(region.y_extent, cfg.direction)),
    );
    report.insert("raster".into(), Value::Object(raster_obj));
    emit(out, &render_report(cfg, &report, &["raster"]))?;
    Ok(ExitCode::SUCCESS)
}

// ---- curves ----

fn cmd_curves(cfg: &RunConfig, args: &CurvesArgs, out: Option<&Path>) -> Result<ExitCode> {
    let taus = parse_f64_list(&args.taus, "--taus")?;
    let grid: Vec<f64> = match &args.compliance {
        Some(spec) => parse_f64_list(spec, "--compliance")?,
        None => {
            let n = cfg.grid_resolution;
            (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
        }
    };
    let rows = bound_curves(&taus, &grid)?;

    // curves are hypothetical, so they stay on the analysis scale
    let mut csv = String::from("tau,p_co,te_lo,te_hi,pe_lo,pe_hi\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_sig17(r.tau),
            fmt_sig17(r.p_co),
            fmt_sig17(r.te_lower),
            fmt_sig17(r.te_upper),
            fmt_sig17(r.pe_lower),
            fmt_sig17(r.pe_upper)
        ));
    }

    match cfg.output_format {
        OutputFormat::Csv => emit(out, &csv)?,
        OutputFormat::Json => {
            let mut invocation = Map::new();
            invocation.insert("taus".into(), Value::String(args.taus.clone()));
            invocation.insert(
                "compliance".into(),
                args.compliance.clone().map_or(Value::Null, Value::String),
            );
            let mut report = report_skeleton(cfg, "curves", Value::Object(invocation))?;
            report.insert("rows".into(), to_value(&rows)?);
            emit(out, &(to_json_17(&Value::Object(report)) + "\n"))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---- impossible ----

fn cmd_impossible(cfg: &RunConfig, args: &ImpossibleArgs, out: Option<&Path>) -> Result<ExitCode> {
    let sizes = parse_usize_list(&args.cluster_sizes, "--cluster-sizes")?;
    let design = Design::new(sizes.len(), args.treated)?;
    let targets: Vec<ImpossibilityTarget> = match args.target {
        TargetArg::TotalEffectCompliers => vec![ImpossibilityTarget::TotalEffectCompliers],
        TargetArg::SpilloverAlwaysTakers => vec![ImpossibilityTarget::SpilloverAlwaysTakers],
        TargetArg::SpilloverNeverTakers => vec![ImpossibilityTarget::SpilloverNeverTakers],
        TargetArg::All => vec![
            ImpossibilityTarget::TotalEffectCompliers,
            ImpossibilityTarget::SpilloverAlwaysTakers,
            ImpossibilityTarget::SpilloverNeverTakers,
        ],
    };

    let mut verdicts = Vec::new();
    let mut all_confirmed = true;
    for (i, target) in targets.iter().enumerate() {
        let pair = build_counterexample(*target, &sizes, args.delta, cfg.seed ^ (i as u64))?;
        let verdict = verify_counterexample(&pair, &design, u128::from(cfg.enumeration_cap))?;
        all_confirmed &= verdict.is_counterexample;
        let mut v = to_value(&verdict)?;
        if let Value::Object(m) = &mut v {
            m.insert(
                "conclusion".into(),
                Value::String(
                    if verdict.is_counterexample {
                        "counterexample confirmed"
                    } else {
                        "counterexample NOT confirmed"
                    }
                    .into(),
                ),
            );
        }
        verdicts.push(v);
    }

    let mut invocation = Map::new();
    invocation.insert(
        "cluster_sizes".into(),
        Value::String(args.cluster_sizes.clone()),
    );
    invocation.insert("treated".into(), Value::from(args.treated as u64));
    invocation.insert("delta".into(), Value::from(args.delta));
    let mut report = report_skeleton(cfg, "impossible", Value::Object(invocation))?;
    report.insert("verdicts".into(), Value::Array(verdicts));
    report.insert("all_confirmed".into(), Value::Bool(all_confirmed));
    emit(out, &render_report(cfg, &report, &[]))?;
    Ok(if all_confirmed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---- verify ----

fn cmd_verify(cfg: &RunConfig, args: &VerifyArgs, out: Option<&Path>) -> Result<ExitCode> {
    let overrides = SuiteOverrides {
        pops: args.pops,
        reps: args.reps,
        trials: args.trials,
        clusters: args.clusters,
    };
    let checks = run_suite(args.suite.name(), cfg.seed, &overrides)?;
    let all_pass = checks.iter().all(|c| c.pass);

    let text = match cfg.output_format {
        OutputFormat::Json => {
            let mut invocation = Map::new();
            invocation.insert("suite".into(), Value::String(args.suite.name().into()));
            let mut report = report_skeleton(cfg, "verify", Value::Object(invocation))?;
            report.insert("checks".into(), to_value(&checks)?);
            report.insert("all_pass".into(), Value::Bool(all_pass));
            to_json_17(&Value::Object(report)) + "\n"
        }
        OutputFormat::Csv => {
            let mut csv = String::from("name,pass,measured,threshold,details\n");
            for c in &checks {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    csv_quote(&c.name),
                    c.pass,
                    csv_quote(&c.measured),
                    csv_quote(&c.threshold),
                    csv_quote(&c.details)
                ));
            }
            csv
        }
    };
    emit(out, &text)?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
