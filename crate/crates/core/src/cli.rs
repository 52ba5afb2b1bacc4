//! The `becback` command line: figure data, single time series and
//! verification runs.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::conservation::{self, Law};
use crate::model::{MuConvention, PhysicalParams};
use crate::modes::{evaluate_mode, VacuumChoice};
use crate::observables::{CorrelatorSet, Ensemble};
use crate::oracle::{integrate_bdg, integrate_zeta, ZetaSource};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Model(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Parser)]
#[command(name = "becback", version, about = "Quench dynamics of a ring condensate")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Data for one of the five figures, one file per sweep member.
    Fig {
        /// Figure number, 1 to 5 (`fig3` is accepted too).
        #[arg(long)]
        id: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the conservation laws and the oracle cross-checks.
    Verify {
        /// Comma-separated subset of norm, number_continuity, energy_balance,
        /// momentum, oracle_modes, oracle_zeta.
        #[arg(long)]
        laws: Option<String>,
        /// One tolerance for every law, replacing the per-law defaults.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Quantum depletion ρ_χ(t).
    Depletion {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Total energy of cloud plus correction.
    Energy {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Power transferred to the condensate correction.
    Power {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// Ring length in healing lengths; a comma list sweeps it in `fig`.
    #[arg(long)]
    ell: Option<String>,
    /// Switching time; a comma list sweeps it in `fig`.
    #[arg(long)]
    tau_s: Option<String>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    v_ext: Option<f64>,
    #[arg(long, value_enum)]
    vacuum: Option<VacuumArg>,
    /// Reference time of the minimal-depletion vacuum.
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Chemical potential used for the condensate energy and power.
    #[arg(long, value_enum)]
    mu: Option<MuArg>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Flat `key = value` file; keys are flag names, flags win over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VacuumArg {
    History,
    Qp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MuArg {
    Instantaneous,
    Final,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Observable written by a series command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Depletion,
    Power,
    TotalEnergy,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Depletion => "depletion",
            Channel::Power => "power",
            Channel::TotalEnergy => "total_energy",
        }
    }

    /// Channel value and a bound on its truncation error.
    pub fn evaluate(self, e: &Ensemble, c: &CorrelatorSet) -> (f64, f64) {
        let f = e.coupling(c.t);
        let mu = e.mu(c.t);
        match self {
            Channel::Depletion => (c.n_dep, c.tails.n_dep),
            Channel::Power => {
                let scale = (2.0 * mu * e.params().ell * f).abs();
                (e.power_zeta_from(c), scale * c.tails.anom)
            }
            Channel::TotalEnergy => {
                let v = e.params().v_ext;
                let tail = 0.5 * c.tails.grad
                    + ((v + f).abs() + f.abs() + mu.abs()) * c.tails.n_dep
                    + f.abs() * c.tails.anom;
                (e.energies_from(c).total, tail)
            }
        }
    }
}

/// A figure: its channel, sweep and time window.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: u8,
    pub channel: Channel,
    /// `(ℓ, τ_s)` per member.
    pub sweep: Vec<(f64, f64)>,
    pub t_range: (f64, f64),
    pub samples: usize,
}

impl FigureSpec {
    pub fn default_for(id: u8) -> Option<Self> {
        let ells = [10.0, 20.0, 40.0, 80.0].map(|l| (l, 0.0)).to_vec();
        let taus = [0.0, 0.5, 1.0, 5.0].map(|t| (20.0, t)).to_vec();
        let (channel, sweep, t_max) = match id {
            1 => (Channel::Depletion, ells, 30.0),
            2 => (Channel::Depletion, taus, 30.0),
            3 => (Channel::Power, ells, 30.0),
            4 => (Channel::Power, taus, 30.0),
            5 => (Channel::TotalEnergy, taus, 15.0),
            _ => return None,
        };
        Some(FigureSpec { id, channel, sweep, t_range: (0.0, t_max), samples: 600 })
    }

    fn sweeps_ell(&self) -> bool {
        matches!(self.id, 1 | 3)
    }
}

/// Everything but the sweep needed to produce a series.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub vacuum: VacuumChoice,
    /// Set when the vacuum came from `--t0`.
    pub t0: Option<f64>,
    pub out: PathBuf,
    pub format: Format,
}

/// A sampled channel with its header metadata.
#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub meta: Vec<(String, String)>,
    pub t: Vec<f64>,
    pub value: Vec<f64>,
}

impl Series {
    pub fn to_csv(&self) -> String {
        let mut s = format!("# becback v{VERSION}\n");
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}={v}");
        }
        s.push_str("t,value\n");
        for (t, v) in self.t.iter().zip(&self.value) {
            let _ = writeln!(s, "{},{}", fmt15(*t), fmt15(*v));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let meta: serde_json::Map<String, Value> =
            self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let doc = json!({
            "version": VERSION,
            "meta": meta,
            "t": self.t.iter().map(|x| fmt15(*x)).collect::<Vec<_>>(),
            "value": self.value.iter().map(|x| fmt15(*x)).collect::<Vec<_>>(),
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json of strings");
        s.push('\n');
        s
    }
}

/// 15 significant digits in scientific notation.
pub fn fmt15(x: f64) -> String {
    if x == 0.0 {
        // fold −0 so identical physics gives identical bytes
        return format!("{:.14e}", 0.0);
    }
    format!("{x:.14e}")
}

/// Evaluates `channel` on `samples` evenly spaced times. Returns the times,
/// values, largest tail bound and the number of samples whose channel tail
/// exceeds `rel_tol·|value|`.
pub fn sample_channel(
    ensemble: &Ensemble,
    channel: Channel,
    t_range: (f64, f64),
    samples: usize,
) -> (Vec<f64>, Vec<f64>, f64, usize) {
    let times = conservation::uniform_grid(t_range.0, t_range.1, samples);
    let rows: Vec<(f64, f64, bool)> = times
        .par_iter()
        .map(|&t| {
            let c = ensemble.correlators(t);
            let (v, tail) = channel.evaluate(ensemble, &c);
            (v, tail, c.converged || tail <= ensemble.params().rel_tol * v.abs())
        })
        .collect();
    let tail = rows.iter().fold(0.0f64, |m, r| m.max(r.1));
    let unconverged = rows.iter().filter(|r| !r.2).count();
    (times, rows.iter().map(|r| r.0).collect(), tail, unconverged)
}

fn base_meta(cfg: &RunConfig) -> Vec<(String, String)> {
    let p = &cfg.params;
    let mut m = vec![
        ("ell".into(), p.ell.to_string()),
        ("tau_s".into(), p.tau_s.to_string()),
        ("v_ext".into(), p.v_ext.to_string()),
        ("n_max".into(), p.n_max.to_string()),
        ("rel_tol".into(), p.rel_tol.to_string()),
        (
            "mu".into(),
            match p.mu_convention {
                MuConvention::Instantaneous => "instantaneous",
                MuConvention::Final => "final",
            }
            .into(),
        ),
    ];
    match cfg.vacuum {
        VacuumChoice::History => m.push(("vacuum".into(), "history".into())),
        VacuumChoice::Quasiparticle { alpha, beta } => {
            m.push(("vacuum".into(), "qp".into()));
            if let Some(t0) = cfg.t0 {
                m.push(("t0".into(), t0.to_string()));
            }
            m.push(("alpha".into(), alpha.to_string()));
            m.push(("beta".into(), beta.to_string()));
        }
    }
    m
}

/// Computes one series; the metadata records every input.
pub fn run_series(
    cfg: &RunConfig,
    channel: Channel,
    t_range: (f64, f64),
    samples: usize,
) -> Result<Series, CliError> {
    let ensemble = Ensemble::new(&cfg.params, cfg.vacuum)?;
    let (t, value, tail, unconverged) = sample_channel(&ensemble, channel, t_range, samples);
    let mut meta = vec![("channel".to_string(), channel.name().to_string())];
    meta.extend(base_meta(cfg));
    meta.extend([
        ("t_min".into(), t_range.0.to_string()),
        ("t_max".into(), t_range.1.to_string()),
        ("samples".into(), samples.to_string()),
        ("tail_bound".into(), fmt15(tail)),
        ("converged".into(), (unconverged == 0).to_string()),
        ("unconverged_samples".into(), unconverged.to_string()),
    ]);
    Ok(Series { meta, t, value })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(io_err(path))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn render(series: &Series, format: Format) -> String {
    match format {
        Format::Csv => series.to_csv(),
        Format::Json => series.to_json(),
    }
}

/// Writes one file per sweep member and returns their paths in sweep order.
pub fn run_figure(spec: &FigureSpec, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(&cfg.out)?;
    let mut paths = Vec::with_capacity(spec.sweep.len());
    for &(ell, tau) in &spec.sweep {
        let mut member = cfg.clone();
        member.params.ell = ell;
        member.params.tau_s = tau;
        member.params.validate()?;
        let mut series = run_series(&member, spec.channel, spec.t_range, spec.samples)?;
        series.meta.insert(0, ("figure".into(), format!("fig{}", spec.id)));
        let tag = if spec.sweeps_ell() { format!("ell{ell}") } else { format!("tau{tau}") };
        let path = cfg.out.join(format!("fig{}_{tag}.{}", spec.id, extension(cfg.format)));
        write_file(&path, &render(&series, cfg.format))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Checks run by `verify` beyond the four conservation laws.
pub const ORACLE_LAWS: [&str; 2] = ["oracle_modes", "oracle_zeta"];

#[derive(Debug, Clone, Serialize)]
pub struct LawOutcome {
    pub law: String,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// Samples dropped near kinks of the coupling.
    pub excluded: Vec<f64>,
}

fn default_tol(law: &str) -> f64 {
    match law {
        "norm" => 1e-9,
        "momentum" => 1e-10,
        _ => 1e-6,
    }
}

/// Modes compared against the integrator by `oracle_modes`.
const ORACLE_MODES: [i64; 4] = [0, 1, 5, 20];

fn oracle_modes(cfg: &RunConfig, t_end: f64) -> Result<f64, CliError> {
    let errs: Vec<Result<f64, crate::Error>> = ORACLE_MODES
        .par_iter()
        .filter(|&&n| n as usize <= cfg.params.n_max)
        .map(|&n| {
            let traj = integrate_bdg(n, t_end, &cfg.params, 1e-10)?;
            let mut worst = 0.0f64;
            for (t, rk) in traj.iter().step_by(7) {
                let exact = evaluate_mode(n, t, &cfg.params, VacuumChoice::History)?;
                worst = worst.max(exact.max_abs_diff(&rk) / exact.max_abs());
            }
            Ok(worst)
        })
        .collect();
    let mut worst = 0.0f64;
    for e in errs {
        worst = worst.max(e?);
    }
    Ok(worst)
}

fn oracle_zeta(ensemble: &Ensemble, t_end: f64) -> Result<f64, CliError> {
    let traj = integrate_zeta(
        t_end,
        ensemble.params(),
        |t| {
            let c = ensemble.correlators(t);
            ZetaSource { n_dep: c.n_dep, anom: c.anom }
        },
        1e-9,
    )?;
    let nodes: Vec<(f64, f64)> = traj.iter().step_by(11).map(|(t, w)| (t, w.re)).collect();
    Ok(nodes
        .par_iter()
        .map(|&(t, re_w)| (re_w + ensemble.correlators(t).n_dep).abs())
        .reduce(|| 0.0, f64::max))
}

/// Runs the requested laws on `grid`; the oracles run on `[0, grid.last()]`.
pub fn run_verify(
    cfg: &RunConfig,
    laws: &[String],
    tol: Option<f64>,
    grid: &[f64],
) -> Result<Vec<LawOutcome>, CliError> {
    let ensemble = Ensemble::new(&cfg.params, cfg.vacuum)?;
    let t_end = grid.last().copied().unwrap_or(0.0);
    let mut out = Vec::with_capacity(laws.len());
    for name in laws {
        let tol = tol.unwrap_or_else(|| default_tol(name));
        let (max_residual, excluded) = match name.as_str() {
            "oracle_modes" | "oracle_zeta" if cfg.vacuum != VacuumChoice::History => {
                return Err(CliError::Usage(format!("{name} needs the history vacuum")));
            }
            "oracle_modes" | "oracle_zeta" if t_end <= 0.0 => {
                return Err(CliError::Usage(format!("{name} needs t_max > 0")));
            }
            "oracle_modes" => (oracle_modes(cfg, t_end)?, vec![]),
            "oracle_zeta" => (oracle_zeta(&ensemble, t_end)?, vec![]),
            other => {
                let law: Law = other.parse().map_err(|e: crate::Error| CliError::Usage(e.to_string()))?;
                let r = conservation::verify_with(&ensemble, law, grid, tol, conservation::FD_STEP)?;
                (r.max_residual, r.excluded)
            }
        };
        out.push(LawOutcome {
            law: name.clone(),
            pass: max_residual.is_finite() && max_residual < tol,
            max_residual,
            tol,
            excluded,
        });
    }
    Ok(out)
}

fn parse_list(flag: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--{flag}: cannot parse {s:?} as a number")))
        })
        .collect()
}

fn single(flag: &str, raw: &Option<String>) -> Result<Option<f64>, CliError> {
    match raw {
        None => Ok(None),
        Some(r) => match parse_list(flag, r)?.as_slice() {
            [x] => Ok(Some(*x)),
            _ => Err(CliError::Usage(format!("--{flag} takes one value here"))),
        },
    }
}

fn build_config(a: &CommonArgs, ell: f64, tau: f64) -> Result<RunConfig, CliError> {
    let mut params = PhysicalParams::new(ell, tau)?;
    if let Some(n) = a.n_max {
        params = params.with_n_max(n);
    }
    if let Some(r) = a.rel_tol {
        params = params.with_rel_tol(r);
    }
    if let Some(v) = a.v_ext {
        params = params.with_v_ext(v);
    }
    if let Some(mu) = a.mu {
        params = params.with_mu_convention(match mu {
            MuArg::Instantaneous => MuConvention::Instantaneous,
            MuArg::Final => MuConvention::Final,
        });
    }
    params.validate()?;

    let qp_flags = a.t0.is_some() || a.alpha.is_some() || a.beta.is_some();
    let (vacuum, t0) = match a.vacuum.unwrap_or(VacuumArg::History) {
        VacuumArg::History if qp_flags => {
            return Err(CliError::Usage("--t0/--alpha/--beta need --vacuum qp".into()));
        }
        VacuumArg::History => (VacuumChoice::History, None),
        VacuumArg::Qp => match (a.t0, a.alpha, a.beta) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(CliError::Usage("give either --t0 or --alpha/--beta, not both".into()));
            }
            (t0, None, None) => {
                let t0 = t0.unwrap_or(0.0);
                (VacuumChoice::minimal_depletion(t0), Some(t0))
            }
            (None, Some(al), Some(be)) => (VacuumChoice::quasiparticle(al, be)?, None),
            _ => return Err(CliError::Usage("--alpha and --beta go together".into())),
        },
    };
    Ok(RunConfig {
        params,
        vacuum,
        t0,
        out: a.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        format: a.format.unwrap_or(Format::Csv),
    })
}

fn time_window(a: &CommonArgs, default: (f64, f64), samples: usize) -> Result<((f64, f64), usize), CliError> {
    let range = (a.t_min.unwrap_or(default.0), a.t_max.unwrap_or(default.1));
    let samples = a.samples.unwrap_or(samples);
    if !(range.0.is_finite() && range.1.is_finite() && range.1 > range.0) || samples < 2 {
        return Err(CliError::Usage("need t_min < t_max and at least 2 samples".into()));
    }
    Ok((range, samples))
}

/// Turns `key = value` lines into flags. Blank lines and `#` comments are skipped.
pub fn config_to_args(text: &str) -> Result<Vec<OsString>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() || k == "config" {
            return Err(CliError::Usage(format!("config line {}: bad key {k:?}", i + 1)));
        }
        out.push(OsString::from(format!("--{k}")));
        out.push(OsString::from(v.trim()));
    }
    Ok(out)
}

/// Splices the `--config` file contents in front of the explicit flags so
/// the latter take precedence.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    let extra = config_to_args(&text)?;
    if args.len() < 2 {
        return Ok(args);
    }
    let mut out = args[..2].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[2..]);
    Ok(out)
}

fn parse_fig_id(raw: &str) -> Result<u8, CliError> {
    let digits = raw.trim().trim_start_matches("fig");
    digits
        .parse::<u8>()
        .ok()
        .filter(|id| (1..=5).contains(id))
        .ok_or_else(|| CliError::Usage(format!("unknown figure id {raw:?}; expected 1 to 5")))
}

fn fig(id: &str, a: &CommonArgs) -> Result<Vec<PathBuf>, CliError> {
    let mut spec = FigureSpec::default_for(parse_fig_id(id)?).expect("validated id");
    let ells = a.ell.as_deref().map(|r| parse_list("ell", r)).transpose()?;
    let taus = a.tau_s.as_deref().map(|r| parse_list("tau-s", r)).transpose()?;
    if ells.is_some() || taus.is_some() {
        let default_ells: Vec<f64> = spec.sweep.iter().map(|m| m.0).collect();
        let default_taus: Vec<f64> = spec.sweep.iter().map(|m| m.1).collect();
        let (ells, taus) = if spec.sweeps_ell() {
            (ells.unwrap_or(default_ells), taus.unwrap_or(vec![0.0]))
        } else {
            (ells.unwrap_or(vec![20.0]), taus.unwrap_or(default_taus))
        };
        let mut ells = ells;
        let mut taus = taus;
        ells.dedup();
        taus.dedup();
        spec.sweep = if spec.sweeps_ell() {
            taus.iter().flat_map(|&t| ells.iter().map(move |&l| (l, t))).collect()
        } else {
            ells.iter().flat_map(|&l| taus.iter().map(move |&t| (l, t))).collect()
        };
    }
    let (range, samples) = time_window(a, spec.t_range, spec.samples)?;
    spec.t_range = range;
    spec.samples = samples;
    let (ell0, tau0) = spec.sweep[0];
    let cfg = build_config(a, ell0, tau0)?;
    run_figure(&spec, &cfg)
}

fn series_command(channel: Channel, a: &CommonArgs) -> Result<PathBuf, CliError> {
    let ell = single("ell", &a.ell)?.unwrap_or(20.0);
    let tau = single("tau-s", &a.tau_s)?.unwrap_or(1.0);
    let cfg = build_config(a, ell, tau)?;
    let (range, samples) = time_window(a, (0.0, 30.0), 600)?;
    let series = run_series(&cfg, channel, range, samples)?;
    ensure_dir(&cfg.out)?;
    let path = cfg
        .out
        .join(format!("{}_ell{ell}_tau{tau}.{}", channel.name(), extension(cfg.format)));
    write_file(&path, &render(&series, cfg.format))?;
    Ok(path)
}

fn verify(laws: &Option<String>, tol: Option<f64>, a: &CommonArgs) -> Result<(PathBuf, bool), CliError> {
    let ell = single("ell", &a.ell)?.unwrap_or(20.0);
    let tau = single("tau-s", &a.tau_s)?.unwrap_or(1.0);
    let cfg = build_config(a, ell, tau)?;
    let laws: Vec<String> = match laws {
        Some(l) => l.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => Law::ALL
            .iter()
            .map(|l| l.name().to_string())
            .chain(ORACLE_LAWS.iter().map(|s| s.to_string()))
            .collect(),
    };
    for l in &laws {
        if !ORACLE_LAWS.contains(&l.as_str()) && l.parse::<Law>().is_err() {
            return Err(CliError::Usage(format!("unknown law {l:?}")));
        }
    }
    if laws.is_empty() {
        return Err(CliError::Usage("--laws is empty".into()));
    }
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
    }
    let (range, samples) = time_window(a, (-1.0, 10.0), 45)?;
    let grid = conservation::uniform_grid(range.0, range.1, samples);
    let outcomes = run_verify(&cfg, &laws, tol, &grid)?;
    let pass = outcomes.iter().all(|o| o.pass);
    let meta: serde_json::Map<String, Value> =
        base_meta(&cfg).into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    let report = json!({
        "version": VERSION,
        "meta": meta,
        "t_min": range.0,
        "t_max": range.1,
        "samples": samples,
        "laws": outcomes,
        "pass": pass,
    });
    ensure_dir(&cfg.out)?;
    let path = cfg.out.join("verify.json");
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    write_file(&path, &text)?;
    Ok((path, pass))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("becback: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Fig { id, common } => fig(id, common).map(|paths| (paths, true)),
        Command::Depletion { common } => series_command(Channel::Depletion, common).map(|p| (vec![p], true)),
        Command::Energy { common } => series_command(Channel::TotalEnergy, common).map(|p| (vec![p], true)),
        Command::Power { common } => series_command(Channel::Power, common).map(|p| (vec![p], true)),
        Command::Verify { laws, tol, common } => verify(laws, *tol, common).map(|(p, ok)| (vec![p], ok)),
    };
    match result {
        Ok((paths, ok)) => {
            for p in paths {
                println!("{}", p.display());
            }
            if ok {
                0
            } else {
                eprintln!("becback: verification failed");
                1
            }
        }
        Err(e) => {
            eprintln!("becback: {e}");
            e.exit_code()
        }
    }
}
