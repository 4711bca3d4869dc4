//! Command-line front end: simulate the peakon ODE or the PDE, fit two-peakon
//! constants, run cross-check suites, and print blow-up/Besov quantities.
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 a
//! mathematically meaningful early halt (blow-up or collision). `verify`
//! returns 1 when a check fails.
//!
//! Every command accepts `--config <file>` with `key = value` lines under
//! bracketed section headers; explicit flags override file values. The fully
//! resolved configuration is echoed to `<out-dir>/config.echo` so a run can
//! be reproduced from its own output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::analysis;
use crate::closed_forms;
use crate::model::{self, LambdaParams, PresetName};
use crate::pde_solver::{self, GridField, PdeStatus};
use crate::peakon_dynamics::{self, PeakonState, TerminationStatus};
use crate::verify::{run_suite, SuiteName};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "peakon-lab", version, about = "Numerical laboratory for quadratic peakon equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the N-peakon ODE system.
    SimulateOde(SimulateOde),
    /// Evolve the PDE pseudospectrally on a periodic domain.
    SimulatePde(SimulatePde),
    /// Fit two-peakon integration constants from initial data.
    FitTwoPeakon(FitTwoPeakon),
    /// Run a named cross-check suite.
    Verify(VerifyCmd),
    /// Compute the wave-breaking time bound.
    Bound(BoundCmd),
    /// Evaluate the critical Besov norm of a peakon state, or construct the
    /// norm-inflation pair.
    Besov(BesovCmd),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Preset name: camassa-holm, degasperis-procesi, xia-qiao, b-family:<b>.
    #[arg(long)]
    pub preset: Option<String>,
    /// Explicit coefficients lambda1..lambda6, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateOde {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial amplitudes, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Initial positions, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
    /// Number of evenly spaced output rows.
    #[arg(long)]
    pub outputs: Option<usize>,
    /// Times at which to write field profiles u(x) as CSV.
    #[arg(long = "field-times")]
    pub field_times: Option<String>,
    #[arg(long = "x-min", allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long = "x-max")]
    pub x_max: Option<f64>,
    #[arg(long = "x-count")]
    pub x_count: Option<usize>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulatePde {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Domain half-length.
    #[arg(long)]
    pub l: Option<f64>,
    /// Grid points (power of two).
    #[arg(long)]
    pub n: Option<usize>,
    /// Time step; defaults to half the launch CFL limit.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Initial condition: "peakons:<p>@<q>,..."; "gaussian:<a>,<w>,<x0>";
    /// "neg-slope:<a>,<w>".
    #[arg(long)]
    pub ic: Option<String>,
    /// Gaussian mollification width applied to the initial condition.
    #[arg(long)]
    pub mollify: Option<f64>,
    /// Times at which to write field snapshots, comma separated.
    #[arg(long = "snapshot-times")]
    pub snapshot_times: Option<String>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitTwoPeakon {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// Also evaluate the closed form over an s-range and write it as CSV.
    #[arg(long = "emit-trajectory")]
    pub emit_trajectory: bool,
    #[arg(long = "s-min")]
    pub s_min: Option<f64>,
    #[arg(long = "s-max")]
    pub s_max: Option<f64>,
    #[arg(long = "s-count")]
    pub s_count: Option<usize>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyCmd {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// lemma1-quadrature, theorem1-residual, ode-vs-closedform, pde-vs-ode,
    /// or besov-illposed.
    #[arg(long)]
    pub suite: Option<String>,
}

#[derive(Debug, Args)]
pub struct BoundCmd {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// H^1 norm of the initial data.
    #[arg(long = "u0-h1")]
    pub u0_h1: Option<f64>,
    /// Infimum of the slope functional u0x - l1/(l6-l2) u0.
    #[arg(long = "slope-min", allow_hyphen_values = true)]
    pub slope_min: Option<f64>,
    /// Supremum of the same functional.
    #[arg(long = "slope-max", allow_hyphen_values = true)]
    pub slope_max: Option<f64>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BesovCmd {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Peakon amplitudes, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Peakon positions, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Highest dyadic block index.
    #[arg(long = "q-max")]
    pub q_max: Option<u32>,
    /// Construct the norm-inflation pair at this block index instead.
    #[arg(long = "illposed-q")]
    pub illposed_q: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda2: Option<f64>,
    /// Time horizon T of the pair construction.
    #[arg(long = "t-horizon")]
    pub t_horizon: Option<f64>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

/// Parsed `key = value` config file: `(section, key, value)` triples in file
/// order.
#[derive(Debug, Default)]
struct FileConfig {
    entries: Vec<(String, String, String)>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> crate::Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)?;
        let mut entries = Vec::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected 'key = value' or '[section]'",
                    path.display(),
                    lineno + 1
                )));
            };
            if section.is_empty() {
                return Err(Error::Config(format!(
                    "{}:{}: key before any [section] header",
                    path.display(),
                    lineno + 1
                )));
            }
            entries.push((section.clone(), key.trim().to_string(), value.trim().to_string()));
        }
        Ok(Self { entries })
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v.as_str())
    }

    /// Rejects keys outside the command's accepted set.
    fn check_known(&self, allowed: &[(&str, &[&str])]) -> crate::Result<()> {
        for (section, key, _) in &self.entries {
            let ok = allowed
                .iter()
                .any(|(s, keys)| s == section && keys.contains(&key.as_str()));
            if !ok {
                return Err(Error::Config(format!("unknown config key [{section}] {key}")));
            }
        }
        Ok(())
    }
}

fn parse_scalar<T: FromStr>(what: &str, s: &str) -> crate::Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {what} from '{s}'")))
}

fn parse_list(what: &str, s: &str) -> crate::Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_scalar(what, t))
        .collect()
}

/// Flag value, else file value, else default, else a missing-key error.
fn resolve<T: FromStr + Clone>(
    flag: Option<T>,
    file: &FileConfig,
    section: &str,
    key: &str,
    default: Option<T>,
) -> crate::Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(raw) = file.get(section, key) {
        return parse_scalar(&format!("[{section}] {key}"), raw);
    }
    default.ok_or_else(|| Error::Config(format!("missing required value [{section}] {key}")))
}

fn resolve_string(
    flag: Option<String>,
    file: &FileConfig,
    section: &str,
    key: &str,
    default: Option<&str>,
) -> crate::Result<String> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(raw) = file.get(section, key) {
        return Ok(raw.to_string());
    }
    default
        .map(str::to_string)
        .ok_or_else(|| Error::Config(format!("missing required value [{section}] {key}")))
}

fn resolve_opt_string(flag: Option<String>, file: &FileConfig, section: &str, key: &str) -> Option<String> {
    flag.or_else(|| file.get(section, key).map(str::to_string))
}

/// Either a preset name or an explicit coefficient tuple, echoed back in the
/// same form it was given.
enum ModelSpec {
    Preset(PresetName, String),
    Lambda(LambdaParams),
}

impl ModelSpec {
    fn params(&self) -> LambdaParams {
        match self {
            ModelSpec::Preset(name, _) => model::preset(*name),
            ModelSpec::Lambda(p) => *p,
        }
    }

    fn echo_line(&self) -> String {
        match self {
            ModelSpec::Preset(_, raw) => format!("preset = {raw}"),
            ModelSpec::Lambda(p) => {
                let a = p.as_array();
                format!(
                    "lambda = {},{},{},{},{},{}",
                    a[0], a[1], a[2], a[3], a[4], a[5]
                )
            }
        }
    }
}

fn resolve_model(args: &ModelArgs, file: &FileConfig) -> crate::Result<ModelSpec> {
    let preset = resolve_opt_string(args.preset.clone(), file, "model", "preset");
    let lambda = resolve_opt_string(args.lambda.clone(), file, "model", "lambda");
    match (preset, lambda) {
        (Some(_), Some(_)) => Err(Error::Config(
            "give either a preset or an explicit lambda tuple, not both".into(),
        )),
        (Some(name), None) => Ok(ModelSpec::Preset(name.parse()?, name)),
        (None, Some(tuple)) => {
            let vals = parse_list("lambda coefficient", &tuple)?;
            let arr: [f64; 6] = vals.try_into().map_err(|v: Vec<f64>| {
                Error::Config(format!("lambda needs 6 coefficients, got {}", v.len()))
            })?;
            Ok(ModelSpec::Lambda(LambdaParams::from_array(arr)?))
        }
        (None, None) => Err(Error::Config("missing required value [model] preset (or lambda)".into())),
    }
}

fn ensure_out_dir(dir: &Path) -> crate::Result<()> {
    std::fs::create_dir_all(dir.join("plots"))?;
    Ok(())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> crate::Result<()> {
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(command: Command) -> crate::Result<i32> {
    match command {
        Command::SimulateOde(args) => cmd_simulate_ode(args),
        Command::SimulatePde(args) => cmd_simulate_pde(args),
        Command::FitTwoPeakon(args) => cmd_fit_two_peakon(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bound(args) => cmd_bound(args),
        Command::Besov(args) => cmd_besov(args),
    }
}

pub fn cmd_simulate_ode(args: SimulateOde) -> crate::Result<i32> {
    let file = FileConfig::load(args.config.as_deref())?;
    file.check_known(&[
        ("model", &["preset", "lambda"]),
        ("ode", &["p", "q", "t-end", "rel-tol", "abs-tol", "outputs"]),
        (
            "output",
            &["dir", "field-times", "x-min", "x-max", "x-count"],
        ),
    ])?;

    let spec = resolve_model(&args.model, &file)?;
    let params = spec.params();
    let p = parse_list("amplitude", &resolve_string(args.p, &file, "ode", "p", None)?)?;
    let q = parse_list("position", &resolve_string(args.q, &file, "ode", "q", None)?)?;
    let t_end = resolve(args.t_end, &file, "ode", "t-end", None)?;
    let rel_tol = resolve(args.rel_tol, &file, "ode", "rel-tol", Some(1e-8))?;
    let abs_tol = resolve(args.abs_tol, &file, "ode", "abs-tol", Some(1e-10))?;
    let outputs = resolve(args.outputs, &file, "ode", "outputs", Some(100usize))?;
    if outputs == 0 {
        return Err(Error::Config("[ode] outputs must be positive".into()));
    }
    let out_dir = args
        .out_dir
        .unwrap_or_else(|| PathBuf::from(file.get("output", "dir").unwrap_or("out")));
    let field_times = match resolve_opt_string(args.field_times, &file, "output", "field-times") {
        Some(raw) => parse_list("field time", &raw)?,
        None => Vec::new(),
    };
    let x_min = resolve(args.x_min, &file, "output", "x-min", Some(-20.0))?;
    let x_max = resolve(args.x_max, &file, "output", "x-max", Some(20.0))?;
    let x_count = resolve(args.x_count, &file, "output", "x-count", Some(801usize))?;
    if !(x_max > x_min) || x_count < 2 {
        return Err(Error::Config("field profile grid needs x-max > x-min and x-count >= 2".into()));
    }

    let state0 = PeakonState::new(p, q, 0.0)?;
    let mut times: Vec<f64> = (1..=outputs)
        .map(|k| state0.t + (t_end - state0.t) * k as f64 / outputs as f64)
        .collect();
    for &ft in &field_times {
        if ft <= state0.t || ft > t_end {
            return Err(Error::Config(format!(
                "field time {ft} outside ({}, {t_end}]",
                state0.t
            )));
        }
        times.push(ft);
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let traj =
        peakon_dynamics::integrate_with_output(&params, &state0, t_end, rel_tol, abs_tol, &times)?;

    ensure_out_dir(&out_dir)?;
    let mut echo = String::from("[model]\n");
    let _ = writeln!(echo, "{}", spec.echo_line());
    let _ = writeln!(echo, "[ode]");
    let _ = writeln!(echo, "p = {}", fmt_list(&state0.p));
    let _ = writeln!(echo, "q = {}", fmt_list(&state0.q));
    let _ = writeln!(echo, "t-end = {t_end}");
    let _ = writeln!(echo, "rel-tol = {rel_tol}");
    let _ = writeln!(echo, "abs-tol = {abs_tol}");
    let _ = writeln!(echo, "outputs = {outputs}");
    let _ = writeln!(echo, "[output]");
    let _ = writeln!(echo, "dir = {}", out_dir.display());
    if !field_times.is_empty() {
        let _ = writeln!(echo, "field-times = {}", fmt_list(&field_times));
        let _ = writeln!(echo, "x-min = {x_min}");
        let _ = writeln!(echo, "x-max = {x_max}");
        let _ = writeln!(echo, "x-count = {x_count}");
    }
    write_file(&out_dir, "config.echo", &echo)?;

    write_file(&out_dir, "trajectory.csv", &peakon_dynamics::trajectory_csv(&traj))?;
    let events = serde_json::to_string_pretty(&peakon_dynamics::events_json(&traj))?;
    write_file(&out_dir, "events.json", &events)?;

    for (k, &ft) in field_times.iter().enumerate() {
        if let Some(snap) = traj.snapshots.iter().find(|s| (s.t - ft).abs() < 1e-12) {
            let mut csv = String::from("x,u\n");
            for j in 0..x_count {
                let x = x_min + (x_max - x_min) * j as f64 / (x_count - 1) as f64;
                let _ = writeln!(csv, "{x:.17e},{:.17e}", snap.field_eval(x));
            }
            write_file(&out_dir, &format!("field_{k:03}.csv"), &csv)?;
        }
    }

    let n = state0.len();
    let mut gp = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    let _ = writeln!(gp, "set xlabel 't'\nset ylabel 'q_i'");
    let cols: Vec<String> = (1..=n)
        .map(|i| format!("'trajectory.csv' using 1:{} with lines", 1 + n + i))
        .collect();
    let _ = writeln!(gp, "plot {}", cols.join(", \\\n     "));
    write_file(&out_dir, "plots/trajectory.gp", &gp)?;

    println!("status: {}", serde_json::to_value(traj.status)?.as_str().unwrap_or("?"));
    Ok(match traj.status {
        TerminationStatus::ReachedTEnd => 0,
        _ => 3,
    })
}

/// Initial-condition builders accepted by `simulate-pde`.
fn build_initial(ic: &str, l: f64, n: usize) -> crate::Result<GridField> {
    let (kind, rest) = ic
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("initial condition '{ic}' lacks a kind prefix")))?;
    match kind {
        "peakons" => {
            let mut peaks = Vec::new();
            for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
                let (p, q) = item.split_once('@').ok_or_else(|| {
                    Error::Config(format!("peakon '{item}' must be <amplitude>@<position>"))
                })?;
                peaks.push((parse_scalar::<f64>("amplitude", p)?, parse_scalar::<f64>("position", q)?));
            }
            if peaks.is_empty() {
                return Err(Error::Config("empty peakon list".into()));
            }
            GridField::from_fn(l, n, 0.0, |x| {
                peaks.iter().map(|(p, q)| p * (-(x - q).abs()).exp()).sum()
            })
        }
        "gaussian" => {
            let v = parse_list("gaussian parameter", rest)?;
            let [a, w, x0]: [f64; 3] = v.try_into().map_err(|_| {
                Error::Config("gaussian takes exactly a,w,x0".into())
            })?;
            if !(w > 0.0) {
                return Err(Error::Config("gaussian width must be positive".into()));
            }
            GridField::from_fn(l, n, 0.0, |x| a * (-((x - x0) / w).powi(2)).exp())
        }
        "neg-slope" => {
            let v = parse_list("neg-slope parameter", rest)?;
            let [a, w]: [f64; 2] = v
                .try_into()
                .map_err(|_| Error::Config("neg-slope takes exactly a,w".into()))?;
            if !(w > 0.0) {
                return Err(Error::Config("neg-slope width must be positive".into()));
            }
            GridField::from_fn(l, n, 0.0, |x| -a * x * (-(x / w).powi(2)).exp())
        }
        other => Err(Error::Config(format!(
            "unknown initial condition kind '{other}' (peakons, gaussian, neg-slope)"
        ))),
    }
}

pub fn cmd_simulate_pde(args: SimulatePde) -> crate::Result<i32> {
    let file = FileConfig::load(args.config.as_deref())?;
    file.check_known(&[
        ("model", &["preset", "lambda"]),
        (
            "pde",
            &["l", "n", "dt", "t-end", "ic", "mollify", "snapshot-times"],
        ),
        ("output", &["dir"]),
    ])?;

    let spec = resolve_model(&args.model, &file)?;
    let params = spec.params();
    let l = resolve(args.l, &file, "pde", "l", Some(40.0))?;
    let n = resolve(args.n, &file, "pde", "n", Some(4096usize))?;
    let t_end = resolve(args.t_end, &file, "pde", "t-end", None)?;
    let ic = resolve_string(args.ic, &file, "pde", "ic", None)?;
    let mollify_width = match resolve_opt_string(
        args.mollify.map(|w| w.to_string()),
        &file,
        "pde",
        "mollify",
    ) {
        Some(raw) => Some(parse_scalar::<f64>("[pde] mollify", &raw)?),
        None => None,
    };
    let snapshot_times = match resolve_opt_string(args.snapshot_times, &file, "pde", "snapshot-times") {
        Some(raw) => parse_list("snapshot time", &raw)?,
        None => Vec::new(),
    };
    let out_dir = args
        .out_dir
        .unwrap_or_else(|| PathBuf::from(file.get("output", "dir").unwrap_or("out")));

    let mut field0 = build_initial(&ic, l, n)?;
    if let Some(w) = mollify_width {
        field0 = pde_solver::mollify(&field0, w)?;
    }
    let dx = field0.dx();
    let default_dt = 0.25 * dx / (params.lambda2.abs() * field0.linf()).max(1.0);
    let dt = resolve(args.dt, &file, "pde", "dt", Some(default_dt))?;

    let mut stops: Vec<f64> = snapshot_times.clone();
    stops.retain(|&t| t > field0.t && t < t_end);
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(t_end);

    ensure_out_dir(&out_dir)?;
    let mut echo = String::from("[model]\n");
    let _ = writeln!(echo, "{}", spec.echo_line());
    let _ = writeln!(echo, "[pde]");
    let _ = writeln!(echo, "l = {l}");
    let _ = writeln!(echo, "n = {n}");
    let _ = writeln!(echo, "dt = {dt}");
    let _ = writeln!(echo, "t-end = {t_end}");
    let _ = writeln!(echo, "ic = {ic}");
    if let Some(w) = mollify_width {
        let _ = writeln!(echo, "mollify = {w}");
    }
    if !snapshot_times.is_empty() {
        let _ = writeln!(echo, "snapshot-times = {}", fmt_list(&snapshot_times));
    }
    let _ = writeln!(echo, "[output]");
    let _ = writeln!(echo, "dir = {}", out_dir.display());
    write_file(&out_dir, "config.echo", &echo)?;

    // Evolve segment by segment so snapshots land exactly on requested times.
    let mut monitors = pde_solver::MonitorSeries::default();
    let mut current = field0;
    let mut status = PdeStatus::ReachedTEnd;
    let mut snapshot_idx = 0usize;
    let write_snapshot = |field: &GridField, idx: usize| -> crate::Result<()> {
        write_file(&out_dir, &format!("snapshot_{idx:03}.csv"), &pde_solver::field_csv(field))?;
        let mut bin = Vec::new();
        pde_solver::write_pklb(field, &mut bin)?;
        std::fs::write(out_dir.join(format!("snapshot_{idx:03}.pklb")), bin)?;
        Ok(())
    };
    write_snapshot(&current, snapshot_idx)?;
    snapshot_idx += 1;
    for &stop in &stops {
        let out = pde_solver::evolve(&params, &current, stop, dt)?;
        let skip = usize::from(!monitors.records.is_empty());
        monitors.records.extend(out.monitors.records.iter().skip(skip));
        current = out.field;
        status = out.status;
        write_snapshot(&current, snapshot_idx)?;
        snapshot_idx += 1;
        if status != PdeStatus::ReachedTEnd {
            break;
        }
    }

    write_file(&out_dir, "monitors.csv", &monitors.csv())?;
    let gp = "set datafile separator ','\nset key autotitle columnhead\n\
              set xlabel 't'\nset logscale y\n\
              plot 'monitors.csv' using 1:2 with lines, \\\n     \
              'monitors.csv' using 1:4 with lines\n";
    write_file(&out_dir, "plots/monitors.gp", gp)?;

    println!("status: {}", serde_json::to_value(status)?.as_str().unwrap_or("?"));
    Ok(match status {
        PdeStatus::ReachedTEnd => 0,
        _ => 3,
    })
}

pub fn cmd_fit_two_peakon(args: FitTwoPeakon) -> crate::Result<i32> {
    let file = FileConfig::load(args.config.as_deref())?;
    file.check_known(&[
        (
            "analysis",
            &["xi1", "xi2", "eta1", "eta2", "t0", "s-min", "s-max", "s-count"],
        ),
        ("output", &["dir"]),
    ])?;
    let xi1 = resolve(args.xi1, &file, "analysis", "xi1", None)?;
    let xi2 = resolve(args.xi2, &file, "analysis", "xi2", None)?;
    let eta1 = resolve(args.eta1, &file, "analysis", "eta1", None)?;
    let eta2 = resolve(args.eta2, &file, "analysis", "eta2", None)?;
    let t0 = resolve(args.t0, &file, "analysis", "t0", Some(0.0))?;
    let out_dir = args
        .out_dir
        .unwrap_or_else(|| PathBuf::from(file.get("output", "dir").unwrap_or("out")));

    let consts = closed_forms::fit_two_peakon(xi1, xi2, eta1, eta2, t0)?;
    let json = serde_json::to_string_pretty(&consts)?;
    println!("{json}");

    ensure_out_dir(&out_dir)?;
    let mut echo = String::from("[analysis]\n");
    let _ = writeln!(echo, "xi1 = {xi1}\nxi2 = {xi2}\neta1 = {eta1}\neta2 = {eta2}\nt0 = {t0}");
    let _ = writeln!(echo, "[output]\ndir = {}", out_dir.display());
    write_file(&out_dir, "config.echo", &echo)?;
    write_file(&out_dir, "constants.json", &json)?;

    if args.emit_trajectory {
        let s_min = resolve(args.s_min, &file, "analysis", "s-min", Some(0.2))?;
        let s_max = resolve(args.s_max, &file, "analysis", "s-max", Some(3.0))?;
        let s_count = resolve(args.s_count, &file, "analysis", "s-count", Some(400usize))?;
        if !(s_max > s_min && s_min > 0.0) || s_count < 2 {
            return Err(Error::Config("s-range needs 0 < s-min < s-max and s-count >= 2".into()));
        }
        let mut csv = String::from("s,t,p1,p2,q1,q2,separation\n");
        for k in 0..s_count {
            let s = s_min + (s_max - s_min) * k as f64 / (s_count - 1) as f64;
            let Ok(state) = closed_forms::two_peakon_state(&consts, s) else {
                continue; // singular s values leave no row
            };
            let sep = state.q[0] - state.q[1];
            let _ = writeln!(
                csv,
                "{s:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{sep:.17e}",
                state.t, state.p[0], state.p[1], state.q[0], state.q[1]
            );
        }
        write_file(&out_dir, "two_peakon.csv", &csv)?;
        let gp = "set datafile separator ','\nset key autotitle columnhead\n\
                  set xlabel 's'\n\
                  plot 'two_peakon.csv' using 1:5 with lines, \\\n     \
                  'two_peakon.csv' using 1:6 with lines\n";
        write_file(&out_dir, "plots/two_peakon.gp", gp)?;
    }
    Ok(0)
}

pub fn cmd_verify(args: VerifyCmd) -> crate::Result<i32> {
    let file = FileConfig::load(args.config.as_deref())?;
    file.check_known(&[("analysis", &["suite"])])?;
    let suite: SuiteName =
        resolve_string(args.suite, &file, "analysis", "suite", None)?.parse()?;
    let report = run_suite(suite)?;
    for check in &report.checks {
        println!(
            "{} {}: measured {:.3e} vs threshold {:.3e}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.measured,
            check.threshold
        );
    }
    if report.passed() {
        println!("suite {}: all {} checks passed", report.suite, report.checks.len());
        Ok(0)
    } else {
        println!("suite {}: FAILED", report.suite);
        Ok(1)
    }
}

pub fn cmd_bound(args: BoundCmd) -> crate::Result<i32> {
    let file = FileConfig::load(args.config.as_deref())?;
    file.check_known(&[
        ("model", &["preset", "lambda"]),
        ("analysis", &["u0-h1", "slope-min", "slope-max"]),
        ("output", &["dir"]),
    ])?;
    let spec = resolve_model(&args.model, &file)?;
    let u0_h1 = resolve(args.u0_h1, &file, "analysis", "u0-h1", None)?;
    let slope_min = resolve(args.slope_min, &file, "analysis", "slope-min", None)?;
    let slope_max = resolve(args.slope_max, &file, "analysis", "slope-max", None)?;

    let cert = analysis::wave_breaking_bound(&spec.params(), u0_h1, slope_min, slope_max)?;
    let text = match &cert {
        Some(cert) => serde_json::to_string_pretty(cert)?,
        None => "no bound applies".to_string(),
    };
    println!("{text}");
    if let Some(dir) = args.out_dir.or_else(|| file.get("output", "dir").map(PathBuf::from)) {
        ensure_out_dir(&dir)?;
        let mut echo = String::from("[model]\n");
        let _ = writeln!(echo, "{}", spec.echo_line());
        let _ = writeln!(
            echo,
            "[analysis]\nu0-h1 = {u0_h1}\nslope-min = {slope_min}\nslope-max = {slope_max}"
        );
        let _ = writeln!(echo, "[output]\ndir = {}", dir.display());
        write_file(&dir, "config.echo", &echo)?;
        write_file(&dir, "certificate.json", &text)?;
    }
    Ok(0)
}

pub fn cmd_besov(args: BesovCmd) -> crate::Result<i32> {
    let file = FileConfig::load(args.config.as_deref())?;
    file.check_known(&[
        (
            "analysis",
            &["p", "q", "q-max", "illposed-q", "lambda1", "lambda2", "t-horizon"],
        ),
        ("output", &["dir"]),
    ])?;

    let illposed_q = match resolve_opt_string(
        args.illposed_q.map(|q| q.to_string()),
        &file,
        "analysis",
        "illposed-q",
    ) {
        Some(raw) => Some(parse_scalar::<u32>("[analysis] illposed-q", &raw)?),
        None => None,
    };

    let text = if let Some(q) = illposed_q {
        let lambda1 = resolve(args.lambda1, &file, "analysis", "lambda1", None)?;
        let lambda2 = resolve(args.lambda2, &file, "analysis", "lambda2", None)?;
        let t = resolve(args.t_horizon, &file, "analysis", "t-horizon", None)?;
        let pair = analysis::illposed_pair(lambda1, lambda2, t, q)?;
        serde_json::to_string_pretty(&pair)?
    } else {
        let p = parse_list("amplitude", &resolve_string(args.p, &file, "analysis", "p", None)?)?;
        let q = parse_list("position", &resolve_string(args.q, &file, "analysis", "q", None)?)?;
        let q_max = resolve(args.q_max, &file, "analysis", "q-max", Some(16u32))?;
        let state = PeakonState::new(p, q, 0.0)?;
        let norm = analysis::besov_32_norm(&state, q_max)?;
        serde_json::to_string_pretty(&norm)?
    };
    println!("{text}");
    if let Some(dir) = args.out_dir.or_else(|| file.get("output", "dir").map(PathBuf::from)) {
        ensure_out_dir(&dir)?;
        write_file(&dir, "besov.json", &text)?;
    }
    Ok(0)
}
