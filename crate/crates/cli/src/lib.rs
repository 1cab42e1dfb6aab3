//! Command-line front end: figure grids, oracle verification, Gaussian
//! moments and the weighted deviance information criterion.

mod config;
mod io;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use wentropy_core::numeric::CentralWeight;
use wentropy_core::scan::{run_scan, Example, Range, ScanGrid, ScanMode, COLUMNS};
use wentropy_core::verify::{run_verify, VerifyConfig};
use wentropy_core::wdic::{
    metropolis_sample, model_by_name, simulate, wdic, Model, PosteriorDraws, Prior, Provenance, SamplerConfig,
    ThetaHatRule, WeightedDataset,
};
use wentropy_core::wick::{central_moment_counted, shifted_moment_counted};
use wentropy_core::{MomentSpec, ShiftSpec};

use io::{fmt_num, num, to_json_string, write_or_print};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Weighted differential entropies of Gaussians: figure grids, oracle
/// verification, Gaussian moments and the weighted deviance information criterion.
#[derive(Parser)]
#[command(name = "wentropy", version)]
struct Cli {
    /// Key-value file mirroring the flags (`key = value`, `subcommand.key = value`); flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep (rho, x3) for one of the worked examples and write CSV
    Scan(ScanArgs),
    /// Compare every closed form with its oracle and write a JSON report
    Verify(VerifyArgs),
    /// Gaussian moment E[∏ (X_k + δ_k)^{r_k}] by pair-partition summation
    Moment(MomentArgs),
    /// Weighted deviance information criterion for a dataset
    Wdic(WdicArgs),
    /// Simulate a dataset in the format read by `wdic`
    GenData(GenDataArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Corrected,
    Wick,
}

#[derive(Args)]
struct ScanArgs {
    /// Worked example (1 or 2)
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    example: u8,
    /// lo:hi:steps, or a single value
    #[arg(long, allow_hyphen_values = true)]
    rho: String,
    /// lo:hi:steps, or a single value
    #[arg(long, allow_hyphen_values = true)]
    x3: String,
    /// Column families to compute
    #[arg(long, value_enum, value_delimiter = ',', default_value = "paper,corrected,wick")]
    modes: Vec<ModeArg>,
    /// Output file (stdout if absent)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Absolute tolerance for comparisons against quadrature
    #[arg(long, default_value_t = 1e-4)]
    tol_quad: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Midpoint nodes per axis on three-dimensional grids
    #[arg(long, default_value_t = 96)]
    quad_points: usize,
    /// Midpoint nodes per axis on two-dimensional grids
    #[arg(long, default_value_t = 320)]
    quad_points_2d: usize,
    /// Grid half-width in standard deviations
    #[arg(long, default_value_t = 9.0)]
    sigmas: f64,
    #[arg(long, default_value_t = 200_000)]
    mc_samples: usize,
    /// Random pmfs per discrete identity
    #[arg(long, default_value_t = 20)]
    pmfs: usize,
    /// Report file (stdout if absent)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MomentArgs {
    /// Covariance: JSON {"mean", "cov"}, a JSON nested array, or text rows
    #[arg(long)]
    cov: PathBuf,
    /// Exponents r_1,…,r_n
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<usize>,
    /// Shifts δ_1,…,δ_n
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    shift: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaHatArg {
    Mean,
    Mode,
}

#[derive(Args)]
struct WdicArgs {
    /// CSV with columns y_1..y_d and optionally weight
    #[arg(long)]
    data: PathBuf,
    /// CSV of posterior draws with columns theta_1..theta_p
    #[arg(long, conflicts_with = "sample", required_unless_present = "sample")]
    draws: Option<PathBuf>,
    /// Run the built-in sampler: steps,burn_in,step_size,seed
    #[arg(long)]
    sample: Option<String>,
    /// normal-mean, normal or laplace
    #[arg(long, default_value = "normal-mean")]
    model: String,
    /// Known standard deviation for normal-mean
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// column, ones, or central:a_1,…,a_d
    #[arg(long, default_value = "column", allow_hyphen_values = true)]
    weights: String,
    #[arg(long, value_enum, default_value = "mean")]
    theta_hat: ThetaHatArg,
    /// Independent normal prior means (flat prior if absent)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "prior_sd")]
    prior_mean: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', requires = "prior_mean")]
    prior_sd: Option<Vec<f64>>,
    /// Also write the sampler draws as CSV
    #[arg(long)]
    write_draws: Option<PathBuf>,
    /// Result file (stdout if absent)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenDataArgs {
    /// normal-mean, normal or laplace
    #[arg(long, default_value = "normal")]
    model: String,
    /// Parameter vector
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    theta: Vec<f64>,
    /// Known standard deviation for normal-mean
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// ones, or central:a_1,…,a_d
    #[arg(long, default_value = "ones", allow_hyphen_values = true)]
    weights: String,
    #[arg(long, short)]
    output: PathBuf,
}

fn parse_range(s: &str, name: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let f = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("--{name}: '{t}' is not a number"));
    match parts.as_slice() {
        [v] => {
            let v = f(v)?;
            Ok(Range { lo: v, hi: v, steps: 1 })
        }
        [lo, hi, steps] => Ok(Range {
            lo: f(lo)?,
            hi: f(hi)?,
            steps: steps.trim().parse().map_err(|_| format!("--{name}: '{steps}' is not a step count"))?,
        }),
        _ => Err(format!("--{name}: expected lo:hi:steps or a single value, got '{s}'")),
    }
}

fn cmd_scan(a: &ScanArgs) -> Result<u8, String> {
    let modes: BTreeSet<ScanMode> = a
        .modes
        .iter()
        .map(|m| match m {
            ModeArg::Paper => ScanMode::Paper,
            ModeArg::Corrected => ScanMode::Corrected,
            ModeArg::Wick => ScanMode::Wick,
        })
        .collect();
    let grid = ScanGrid {
        example: Example::from_number(a.example).map_err(|e| e.to_string())?,
        rho: parse_range(&a.rho, "rho")?,
        x3: parse_range(&a.x3, "x3")?,
        modes,
    };
    let rows = run_scan(&grid).map_err(|e| e.to_string())?;
    let mode_names: Vec<&str> = grid
        .modes
        .iter()
        .map(|m| match m {
            ScanMode::Paper => "paper",
            ScanMode::Corrected => "corrected",
            ScanMode::Wick => "wick",
        })
        .collect();
    let range = |r: &Range| format!("{}:{}:{}", fmt_num(r.lo), fmt_num(r.hi), r.steps);
    let mut out = format!(
        "# wentropy scan v1 example={} rho={} x3={} modes={}\n",
        grid.example.number(),
        range(&grid.rho),
        range(&grid.x3),
        mode_names.join(",")
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| format!("cannot format CSV: {e}");
    w.write_record(COLUMNS).map_err(err)?;
    for r in &rows {
        w.write_record(r.values().iter().map(|v| v.map(fmt_num).unwrap_or_default())).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| format!("cannot format CSV: {e}"))?;
    out.push_str(&String::from_utf8(bytes).expect("ASCII CSV"));
    write_or_print(a.output.as_deref(), &out)?;
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8, String> {
    let cfg = VerifyConfig {
        tol_quad: a.tol_quad,
        seed: a.seed,
        quad_points_3d: a.quad_points,
        quad_points_2d: a.quad_points_2d,
        sigmas: a.sigmas,
        mc_samples: a.mc_samples,
        pmfs: a.pmfs,
    };
    let report = run_verify(&cfg).map_err(|e| e.to_string())?;
    let value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    write_or_print(a.output.as_deref(), &to_json_string(value))?;
    for s in &report.summary {
        eprintln!(
            "{:<10} {:<26} {:<9} max |dev| {:.3e}{}",
            format!("{:?}", s.verdict).to_uppercase(),
            s.formula,
            s.mode,
            s.max_abs_dev,
            if s.gating { "" } else { "  (reported)" }
        );
    }
    if report.passed {
        return Ok(0);
    }
    eprintln!("verification failed: {} gating check(s) outside tolerance", report.gating_failures);
    for e in report.entries.iter().filter(|e| e.gating && !e.passed()) {
        eprintln!("  {} [{}] {:?}: |dev| {:e} > {:e}", e.formula, e.case, e.point, e.abs_dev, e.tolerance);
        if let Some(n) = &e.note {
            eprintln!("    {n}");
        }
    }
    Ok(EXIT_VERIFY_FAILED)
}

fn cmd_moment(a: &MomentArgs) -> Result<u8, String> {
    let dist = io::read_cov(&a.cov)?;
    let spec = MomentSpec::new(a.r.clone());
    let mv = match &a.shift {
        Some(d) => shifted_moment_counted(dist.cov(), &ShiftSpec::new(d.clone()), &spec),
        None => central_moment_counted(dist.cov(), &spec),
    }
    .map_err(|e| e.to_string())?;
    let mut m = Map::new();
    m.insert("exponents".into(), json!(a.r));
    if let Some(d) = &a.shift {
        m.insert("shift".into(), Value::Array(d.iter().map(|&x| num(x)).collect()));
    }
    m.insert("value".into(), num(mv.value));
    m.insert("matchings".into(), json!(mv.matchings));
    print!("{}", to_json_string(Value::Object(m)));
    Ok(0)
}

fn weights_for(spec: &str, obs: &[Vec<f64>], column: Option<Vec<f64>>) -> Result<Vec<f64>, String> {
    if spec == "column" {
        return column.ok_or_else(|| "data file has no 'weight' column (use --weights ones or central:…)".to_string());
    }
    if spec == "ones" {
        return Ok(vec![1.0; obs.len()]);
    }
    if let Some(c) = spec.strip_prefix("central:") {
        let w = CentralWeight::new(io::parse_list(c, "--weights")?).map_err(|e| e.to_string())?;
        let d = WeightedDataset::with_central_weight(obs.to_vec(), &w).map_err(|e| e.to_string())?;
        return Ok(d.weights().to_vec());
    }
    Err(format!("--weights: expected column, ones or central:a_1,…, got '{spec}'"))
}

fn parse_sampler(s: &str) -> Result<SamplerConfig, String> {
    let p: Vec<&str> = s.split(',').map(str::trim).collect();
    let [steps, burn_in, step, seed] = p.as_slice() else {
        return Err(format!("--sample: expected steps,burn_in,step_size,seed, got '{s}'"));
    };
    let int = |t: &str, what: &str| t.parse::<usize>().map_err(|_| format!("--sample: {what} '{t}' is not an integer"));
    Ok(SamplerConfig {
        steps: int(steps, "steps")?,
        burn_in: int(burn_in, "burn_in")?,
        step_size: step.parse().map_err(|_| format!("--sample: step size '{step}' is not a number"))?,
        seed: seed.parse().map_err(|_| format!("--sample: seed '{seed}' is not a 64-bit integer"))?,
    })
}

fn write_draws(path: &Path, model: &dyn Model, draws: &PosteriorDraws) -> Result<(), String> {
    let headers: Vec<String> = (1..=model.dim()).map(|k| format!("theta_{k}")).collect();
    let comment = match draws.provenance() {
        Provenance::Sampler { seed, steps, burn_in } => {
            format!("# wentropy draws v1 model={} seed={seed} steps={steps} burn_in={burn_in}", model.name())
        }
        Provenance::File { path } => format!("# wentropy draws v1 model={} source={path}", model.name()),
    };
    io::write_rows(path, &comment, &headers, draws.draws())
}

fn cmd_wdic(a: &WdicArgs) -> Result<u8, String> {
    let model = model_by_name(&a.model, a.sigma).map_err(|e| e.to_string())?;
    let (obs, column) = io::read_data(&a.data)?;
    let weights = weights_for(&a.weights, &obs, column)?;
    let data = WeightedDataset::new(obs, weights).map_err(|e| format!("{}: {e}", a.data.display()))?;
    let prior = match (&a.prior_mean, &a.prior_sd) {
        (Some(m), Some(s)) => Prior::Normal { mean: m.clone(), sd: s.clone() },
        _ => Prior::Flat,
    };
    let (draws, acceptance) = match (&a.draws, &a.sample) {
        (Some(path), _) => {
            let d = io::read_draws(path)?;
            let prov = Provenance::File { path: path.display().to_string() };
            (PosteriorDraws::new(model.as_ref(), d, prov).map_err(|e| format!("{}: {e}", path.display()))?, None)
        }
        (None, Some(s)) => {
            let run = metropolis_sample(model.as_ref(), &prior, &data, parse_sampler(s)?).map_err(|e| e.to_string())?;
            (run.draws, Some(run.acceptance_rate))
        }
        (None, None) => return Err("one of --draws or --sample is required".into()),
    };
    if let Some(p) = &a.write_draws {
        write_draws(p, model.as_ref(), &draws)?;
    }
    let rule = match a.theta_hat {
        ThetaHatArg::Mean => ThetaHatRule::Mean,
        ThetaHatArg::Mode => ThetaHatRule::Mode,
    };
    let r = wdic(model.as_ref(), &draws, &data, rule, &prior).map_err(|e| e.to_string())?;
    let mut m = Map::new();
    m.insert("wdic".into(), num(r.wdic));
    m.insert("pwd".into(), num(r.pwd));
    m.insert("dev_at_hat".into(), num(r.dev_at_hat));
    m.insert("theta_hat".into(), Value::Array(r.theta_hat.iter().map(|&x| num(x)).collect()));
    if let Some(rate) = acceptance {
        m.insert("acceptance_rate".into(), num(rate));
    }
    m.insert("model".into(), json!(model.name()));
    m.insert("theta_hat_rule".into(), json!(format!("{rule:?}").to_lowercase()));
    m.insert("observations".into(), json!(data.len()));
    m.insert("draws".into(), json!(draws.len()));
    m.insert("provenance".into(), serde_json::to_value(draws.provenance()).map_err(|e| e.to_string())?);
    write_or_print(a.output.as_deref(), &to_json_string(Value::Object(m)))?;
    Ok(0)
}

fn cmd_gen_data(a: &GenDataArgs) -> Result<u8, String> {
    let model = model_by_name(&a.model, a.sigma).map_err(|e| e.to_string())?;
    let obs = simulate(model.as_ref(), &a.theta, a.n, a.seed).map_err(|e| e.to_string())?;
    let weights = weights_for(&a.weights, &obs, None)?;
    let d = obs[0].len();
    let mut headers: Vec<String> = (1..=d).map(|k| format!("y_{k}")).collect();
    headers.push("weight".into());
    let rows: Vec<Vec<f64>> = obs.iter().zip(&weights).map(|(y, &w)| y.iter().copied().chain([w]).collect()).collect();
    let theta: Vec<String> = a.theta.iter().map(|t| t.to_string()).collect();
    let comment = format!(
        "# wentropy data v1 model={} theta={} n={} seed={} weights={}",
        model.name(),
        theta.join(","),
        a.n,
        a.seed,
        a.weights
    );
    io::write_rows(&a.output, &comment, &headers, &rows)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Scan(a) => cmd_scan(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Moment(a) => cmd_moment(a),
        Command::Wdic(a) => cmd_wdic(a),
        Command::GenData(a) => cmd_gen_data(a),
    }
}

fn accepts_flag(sub: &str, key: &str) -> bool {
    Cli::command()
        .find_subcommand(sub)
        .is_some_and(|c| c.get_arguments().any(|a| a.get_long() == Some(key)))
}

/// Runs the tool on a full argument vector (program name first) and returns
/// the exit code: 0 success, 1 verification failure, 2 usage or input error.
pub fn run_args(args: Vec<String>) -> u8 {
    let args = match config::apply(args, accepts_flag) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
