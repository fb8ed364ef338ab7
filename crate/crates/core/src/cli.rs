//! Config-driven experiment runner behind the `hessian-blowup` binary.
//!
//! A run reads one flat TOML file, validates every parameter before any
//! computation, writes CSV/JSON reports into `--out`, and exits with
//!
//! * 0 when the pipeline ran (and, for verification commands, all checks passed),
//! * 1 on a computational failure or a failed check (`failure.json` is written),
//! * 2 when the configuration is invalid; the message names the violated condition.
//!
//! Report bodies are deterministic; the wall-clock timestamp lives in `run_meta.json`.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::barrier::{certify_barriers, default_eps_ladder, normal_form_weight, verify_lemma23, CertifyOptions, CollarGeometry};
use crate::error::Error;
use crate::fd::{asymptotics_report_2d, build_grid, default_bins, exhaust, DomainSpec2D, FdOptions, FdProblem};
use crate::hessian::binomial;
use crate::profile::{profile_table, NonlinearitySpec, ProfileFns, WeightKind, WeightSpec};
use crate::radial::{
    asymptotics_report_with, integrate_blowup_ivp_with, shoot_blowup_radius, solve_exhaustion_bvp, solve_w, BvpOptions,
    IvpOptions, RadialProblem, RadialWeight, ReportLadder,
};
use crate::report::{write_csv, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Profile,
    RadialIvp,
    RadialExhaust,
    FdExhaust,
    CheckBarrier,
    VerifyAsymptotics,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Profile => "profile",
            Self::RadialIvp => "radial-ivp",
            Self::RadialExhaust => "radial-exhaust",
            Self::FdExhaust => "fd-exhaust",
            Self::CheckBarrier => "check-barrier",
            Self::VerifyAsymptotics => "verify-asymptotics",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hessian-blowup", version, about = "Boundary blow-up solutions of k-Hessian equations")]
pub struct Cli {
    /// Pipeline to run; defaults to the `command` key of the config.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Flat TOML experiment file.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for reports (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Seed for quasi-random collar samples; overrides the config key.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suppress the summary line.
    #[arg(long)]
    pub quiet: bool,
}

/// Every key of the experiment file. Unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_k")]
    pub k: usize,

    /// "ball" (alias "disk") or "ellipse".
    #[serde(default = "default_domain")]
    pub domain: String,
    #[serde(default = "one")]
    pub radius: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,

    /// "power" (needs `gamma`) or "exponential" (needs `rate`).
    pub nonlinearity: String,
    pub gamma: Option<f64>,
    pub rate: Option<f64>,

    /// "unit", "constant" (needs `weight_c`) or "power" (needs `alpha`).
    #[serde(default = "default_weight")]
    pub weight: String,
    pub weight_c: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(default = "one")]
    pub delta0: f64,
    #[serde(default = "one")]
    pub b_lower: f64,
    #[serde(default = "one")]
    pub b_upper: f64,

    /// Override the computed limit constants.
    pub c_f: Option<f64>,
    pub c_m: Option<f64>,
    /// Profile amplitude; defaults to ξ̲ of the domain.
    pub xi: Option<f64>,

    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub per_decade: Option<usize>,

    /// Initial value; when absent radial-ivp shoots for R* = radius.
    pub u0: Option<f64>,
    pub tol: Option<f64>,
    pub blowup_threshold: Option<f64>,

    pub j_schedule: Option<Vec<f64>>,
    pub grid_h: Option<f64>,
    pub bins_d_max: Option<f64>,

    pub eps: Option<f64>,
    pub samples: Option<usize>,
    pub sigma_fraction: Option<f64>,
    #[serde(default)]
    pub lemma23: bool,
    pub eps_levels: Option<usize>,

    pub d_min: Option<f64>,
    pub d_max: Option<f64>,
    pub band: Option<f64>,

    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_n() -> usize {
    2
}
fn default_k() -> usize {
    1
}
fn default_domain() -> String {
    "ball".into()
}
fn default_weight() -> String {
    "unit".into()
}
fn one() -> f64 {
    1.0
}
fn default_seed() -> u64 {
    0x5eed
}

/// Why a run stopped.
#[derive(Debug)]
pub enum RunError {
    /// Bad configuration; exit 2.
    Invalid(String),
    /// Computation failed or a check did not pass; exit 1.
    Failed { message: String, details: Value },
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::KellerOssermanViolation { .. } | Error::ConditionViolation { .. } => {
                Self::Invalid(e.to_string())
            }
            other => Self::Failed { message: other.to_string(), details: error_details(&other) },
        }
    }
}

fn error_details(e: &Error) -> Value {
    match e {
        Error::SolveFailure { residual_history, .. } => json!({ "residual_history": residual_history }),
        Error::ExhaustionFailure { completed, centre_values, source } => {
            json!({ "completed": completed, "centre_values": centre_values, "source": error_details(source) })
        }
        Error::IntegrationFailure { r, u, v, .. } => json!({ "r": r, "u": u, "u1": v }),
        Error::ReportTruncated { rows, .. } => json!({ "rows": rows }),
        Error::CertificationFailure { worst_margin } => json!({ "worst_margin": worst_margin }),
        Error::LimitNotDetected { last, .. } => json!({ "last": last }),
        _ => Value::Null,
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Invalid(msg.into()))
}

/// What a successful pipeline reports.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    /// `Some` for verification commands.
    pub passed: Option<bool>,
    pub files: Vec<String>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::Invalid(format!("config: {e}")))
    }

    pub fn nonlinearity_spec(&self) -> Result<NonlinearitySpec, RunError> {
        match self.nonlinearity.as_str() {
            "power" => {
                let Some(gamma) = self.gamma else { return invalid("power nonlinearity needs `gamma`") };
                if !(gamma > self.k as f64) {
                    return invalid(format!(
                        "(f2) violated: u^gamma has a finite Keller-Osserman integral only for gamma > k, got gamma = {gamma}, k = {}",
                        self.k
                    ));
                }
                Ok(NonlinearitySpec::power(gamma)?)
            }
            "exponential" => {
                let Some(rate) = self.rate else { return invalid("exponential nonlinearity needs `rate`") };
                Ok(NonlinearitySpec::exponential(rate)?)
            }
            other => invalid(format!("unknown nonlinearity {other:?} (expected \"power\" or \"exponential\")")),
        }
    }

    pub fn weight_spec(&self) -> Result<WeightSpec, RunError> {
        let kind = match self.weight.as_str() {
            "unit" => {
                if self.b_lower != 1.0 || self.b_upper != 1.0 || self.delta0 != 1.0 {
                    return invalid("weight \"unit\" fixes b_lower = b_upper = delta0 = 1; use \"constant\"");
                }
                return Ok(WeightSpec::unit());
            }
            "constant" => WeightKind::Constant { c: self.weight_c.unwrap_or(1.0) },
            "power" => {
                let Some(alpha) = self.alpha else { return invalid("power weight needs `alpha`") };
                WeightKind::Power { alpha }
            }
            other => return invalid(format!("unknown weight {other:?} (expected \"unit\", \"constant\" or \"power\")")),
        };
        Ok(WeightSpec::new(kind, self.delta0, self.b_lower, self.b_upper)?)
    }

    fn check_dimensions(&self) -> Result<(), RunError> {
        if self.n < 2 || self.k == 0 || self.k > self.n {
            return invalid(format!("need n >= 2 and 1 <= k <= n, got n = {}, k = {}", self.n, self.k));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return invalid(format!("radius must be positive, got {}", self.radius));
        }
        Ok(())
    }

    pub fn profile_fns(&self) -> Result<ProfileFns, RunError> {
        let f = self.nonlinearity_spec()?;
        let w = self.weight_spec()?;
        let mut p = ProfileFns::new(&f, self.k, w)?;
        if let Some(c) = self.c_f {
            p.c_f = c;
        }
        if let Some(c) = self.c_m {
            p.c_m = c;
        }
        p.condition15_ok = p.c_f > 1.0 - p.c_m;
        if !p.condition15_ok {
            return invalid(format!("condition (1.5) violated: need C_f > 1 - C_m, got C_f = {}, C_m = {}", p.c_f, p.c_m));
        }
        Ok(p)
    }

    pub fn geometry(&self) -> Result<CollarGeometry, RunError> {
        match self.domain.as_str() {
            "ball" | "disk" => Ok(CollarGeometry::ball(self.n, self.k, self.radius)?),
            "ellipse" => {
                if self.n != 2 {
                    return invalid("ellipse domains are planar: set n = 2");
                }
                let (a, b) = self.semi_axes()?;
                Ok(CollarGeometry::ellipse(self.k, a, b)?)
            }
            other => invalid(format!("unknown domain {other:?} (expected \"ball\", \"disk\" or \"ellipse\")")),
        }
    }

    fn semi_axes(&self) -> Result<(f64, f64), RunError> {
        match (self.a, self.b) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => invalid("ellipse needs semi-axes `a` and `b`"),
        }
    }

    fn radial_problem(&self) -> Result<RadialProblem, RunError> {
        if self.domain != "ball" && self.domain != "disk" {
            return invalid("radial commands need domain = \"ball\"");
        }
        let f = self.nonlinearity_spec()?;
        let w = self.weight_spec()?;
        Ok(RadialProblem::new(self.n, self.k, self.radius, f, RadialWeight::FromWeight(w))?)
    }

    /// ξ from the config, else ξ̲ for the domain's L₀.
    fn xi_for(&self, p: &ProfileFns) -> Result<f64, RunError> {
        if let Some(xi) = self.xi {
            if !(xi > 0.0) {
                return invalid(format!("xi must be positive, got {xi}"));
            }
            return Ok(xi);
        }
        let geom = self.geometry()?;
        Ok(p.xi_bounds(geom.l0_max, geom.l0_min)?.0)
    }

    fn tol(&self, default: f64) -> Result<f64, RunError> {
        let t = self.tol.unwrap_or(default);
        if !(t > 0.0 && t < 1.0) {
            return invalid(format!("tol must lie in (0, 1), got {t}"));
        }
        Ok(t)
    }

    fn schedule(&self, default: &[f64]) -> Result<Vec<f64>, RunError> {
        let s = self.j_schedule.clone().unwrap_or_else(|| default.to_vec());
        if s.len() < 3 || s.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("j_schedule must be strictly increasing with at least 3 entries");
        }
        Ok(s)
    }

    fn eps(&self, p: &ProfileFns) -> Result<f64, RunError> {
        let eps = self.eps.unwrap_or(0.1);
        if !(eps > 0.0 && eps < 0.5 * p.weight.b_lower && eps < 1.0) {
            return invalid(format!("need 0 < eps < b_lower/2 (and < 1), got eps = {eps}, b_lower = {}", p.weight.b_lower));
        }
        Ok(eps)
    }
}

/// Parses flags, runs, prints the summary and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> i32 {
    let started = Instant::now();
    let result = load_and_execute(cli);
    let status = match &result {
        Ok(o) if o.passed == Some(false) => 1,
        Ok(_) => 0,
        Err(RunError::Invalid(_)) => 2,
        Err(RunError::Failed { .. }) => 1,
    };
    match &result {
        Ok(o) => {
            if !cli.quiet {
                println!("{}", o.summary);
            }
        }
        Err(RunError::Invalid(msg)) => eprintln!("error: {msg}"),
        Err(RunError::Failed { message, details }) => {
            eprintln!("error: {message}");
            if std::fs::create_dir_all(&cli.out).is_ok() {
                let _ = write_json(&cli.out.join("failure.json"), &json!({ "error": message, "details": details }));
            }
        }
    }
    if status != 2 && cli.out.is_dir() {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        let _ = write_json(
            &cli.out.join("run_meta.json"),
            &json!({
                "unix_time": stamp,
                "elapsed_seconds": started.elapsed().as_secs_f64(),
                "exit_status": status,
                "version": env!("CARGO_PKG_VERSION"),
            }),
        );
    }
    status
}

fn load_and_execute(cli: &Cli) -> Result<Outcome, RunError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| RunError::Invalid(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    let command = match (cli.command, cfg.command) {
        (Some(a), Some(b)) if a != b => {
            return invalid(format!("command {} conflicts with config command {}", a.name(), b.name()))
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return invalid("no command given on the command line or in the config"),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| RunError::Failed { message: format!("cannot create {}: {e}", cli.out.display()), details: Value::Null })?;
    execute(command, &cfg, &cli.out)
}

/// Validates `cfg` for `command` and runs the pipeline, writing into `out`.
pub fn execute(command: Command, cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    cfg.check_dimensions()?;
    match command {
        Command::Profile => run_profile(cfg, out),
        Command::RadialIvp => run_radial_ivp(cfg, out),
        Command::RadialExhaust => run_radial_exhaust(cfg, out),
        Command::FdExhaust => run_fd_exhaust(cfg, out),
        Command::CheckBarrier => run_check_barrier(cfg, out),
        Command::VerifyAsymptotics => run_verify_asymptotics(cfg, out),
    }
}

fn io_fail(e: Error) -> RunError {
    RunError::from(e)
}

fn run_profile(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    let p = cfg.profile_fns()?;
    let xi = cfg.xi.unwrap_or(1.0);
    let (t_min, t_max) = (cfg.t_min.unwrap_or(1e-3), cfg.t_max.unwrap_or(1.0));
    let rows = profile_table(&p, xi, t_min, t_max, cfg.per_decade.unwrap_or(4))?;
    write_csv(
        &out.join("profile.csv"),
        &["t", "phi", "phi_prime", "M", "predicted"],
        rows.iter().map(|r| vec![r.t, r.phi, r.phi_prime, r.big_m, r.predicted]),
    )
    .map_err(io_fail)?;
    let geom = cfg.geometry().ok();
    let xi_bounds = geom.as_ref().and_then(|g| p.xi_bounds(g.l0_max, g.l0_min).ok());
    write_json(
        &out.join("profile.json"),
        &json!({
            "f": p.profile.nonlinearity().describe(),
            "weight": p.weight.describe(),
            "k": p.k,
            "c_f": p.c_f,
            "c_m": p.c_m,
            "ko_ok": p.ko_ok,
            "condition15_ok": p.condition15_ok,
            "tail_exponent": p.profile.tail_exponent(),
            "xi_lower": xi_bounds.map(|x| x.0),
            "xi_upper": xi_bounds.map(|x| x.1),
            "xi_table": xi,
        }),
    )
    .map_err(io_fail)?;
    let phi1 = p.phi(1.0)?;
    Ok(Outcome {
        summary: format!("profile: C_f = {:.6}, C_m = {:.6}, phi(1) = {:.6}", p.c_f, p.c_m, phi1),
        passed: None,
        files: vec!["profile.csv".into(), "profile.json".into()],
    })
}

fn ivp_options(cfg: &ExperimentConfig) -> Result<IvpOptions, RunError> {
    let mut opts = IvpOptions { tol: cfg.tol(1e-10)?, ..Default::default() };
    if let Some(t) = cfg.blowup_threshold {
        if !(t > 1e3) {
            return invalid(format!("blowup_threshold must exceed 1e3, got {t}"));
        }
        opts.blowup_threshold = t;
    }
    Ok(opts)
}

fn run_radial_ivp(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    let prob = cfg.radial_problem()?;
    let opts = ivp_options(cfg)?;
    let sol = match cfg.u0 {
        Some(u0) => {
            if !(u0 > 0.0) {
                return invalid(format!("u0 must be positive, got {u0}"));
            }
            integrate_blowup_ivp_with(&prob, u0, &opts)?
        }
        None => shoot_blowup_radius(&prob, &opts, 1e-10)?,
    };
    sol.write_csv(&out.join("radial_ivp.csv")).map_err(io_fail)?;
    write_json(&out.join("radial_ivp.json"), &sol.metadata(&prob)).map_err(io_fail)?;
    Ok(Outcome {
        summary: format!("radial-ivp: u0 = {:.10e}, Rstar = {:.10}", sol.u[0], sol.rstar),
        passed: None,
        files: vec!["radial_ivp.csv".into(), "radial_ivp.json".into()],
    })
}

fn run_radial_exhaust(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    let prob = cfg.radial_problem()?;
    let schedule = cfg.schedule(&[2.0, 4.0, 8.0, 16.0])?;
    let mut opts = BvpOptions { tol: cfg.tol(1e-10)?, ..Default::default() };
    if let Some(h) = cfg.grid_h {
        opts.grid_h = h;
    }
    let levels = solve_exhaustion_bvp(&prob, &schedule, &opts)?;
    let mut header = vec!["r".to_string()];
    header.extend(schedule.iter().map(|j| format!("u_j{j}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let r = &levels[0].r;
    write_csv(
        &out.join("radial_exhaust.csv"),
        &header_refs,
        (0..r.len()).map(|i| std::iter::once(r[i]).chain(levels.iter().map(|l| l.u[i])).collect()),
    )
    .map_err(io_fail)?;
    let min_inc: Vec<f64> = levels
        .windows(2)
        .map(|w| w[1].u.iter().zip(&w[0].u).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min))
        .collect();
    let centre: Vec<f64> = levels.iter().map(|l| l.u[0]).collect();
    let monotone = min_inc.iter().all(|d| *d >= -1e-8);
    let contracting = centre.windows(3).all(|w| (w[2] - w[1]).abs() < (w[1] - w[0]).abs());
    write_json(
        &out.join("radial_exhaust.json"),
        &json!({
            "problem": prob.describe(),
            "j_schedule": schedule,
            "centre_values": centre,
            "min_increments": min_inc,
            "monotone": monotone,
            "centre_contracting": contracting,
            "newton_iterations": levels.iter().map(|l| l.meta.newton_iterations).collect::<Vec<_>>(),
        }),
    )
    .map_err(io_fail)?;
    Ok(Outcome {
        summary: format!("radial-exhaust: centre values {centre:.6?}, monotone = {monotone}"),
        passed: None,
        files: vec!["radial_exhaust.csv".into(), "radial_exhaust.json".into()],
    })
}

fn run_fd_exhaust(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    if cfg.k != 1 || cfg.n != 2 {
        return invalid("fd-exhaust solves the planar k = 1 problem: set n = 2, k = 1");
    }
    let dom = match cfg.domain.as_str() {
        "ball" | "disk" => DomainSpec2D::disk(cfg.radius)?,
        "ellipse" => {
            let (a, b) = cfg.semi_axes()?;
            DomainSpec2D::ellipse(a, b)?
        }
        other => return invalid(format!("unknown domain {other:?}")),
    };
    let p = cfg.profile_fns()?;
    let xi = cfg.xi_for(&p)?;
    let f = cfg.nonlinearity_spec()?;
    let prob = FdProblem::new(dom, f, p.weight.clone());
    let grid = build_grid(&dom, cfg.grid_h.unwrap_or(1.0 / 64.0))?;
    let schedule = cfg.schedule(&[4.0, 6.0, 8.0, 10.0])?;
    let opts = FdOptions { tol: cfg.tol(1e-9)?, ..Default::default() };
    let ex = exhaust(&prob, &grid, &schedule, &opts)?;
    ex.limit().write_csv(&out.join("fd_field.csv")).map_err(io_fail)?;
    let d_max = cfg.bins_d_max.unwrap_or(0.32 * dom.semi_axes().1);
    let prev = &ex.levels[ex.levels.len() - 2];
    // Bins thinner than the mesh hold no nodes.
    let bins: Vec<(f64, f64)> = default_bins(d_max).into_iter().filter(|b| b.1 - b.0 >= grid.h).collect();
    if bins.is_empty() {
        return invalid(format!("grid_h = {} leaves no collar bin below d = {d_max}", grid.h));
    }
    let report = asymptotics_report_2d(ex.limit(), Some(prev), &p, xi, &bins)?;
    report.write_csv(&out.join("fd_bins.csv")).map_err(io_fail)?;
    let d = &ex.diagnostics;
    write_json(
        &out.join("fd_exhaust.json"),
        &json!({
            "domain": dom.describe(),
            "h": grid.h,
            "interior_nodes": grid.interior_count(),
            "xi": xi,
            "j_schedule": d.j_schedule,
            "centre_values": d.centre_values,
            "min_increments": d.min_increments,
            "max_increments": d.max_increments,
            "cauchy_ratios": d.cauchy_ratios,
            "monotone": d.monotone,
            "newton_iterations": d.stats.iter().map(|s| s.newton_iterations).collect::<Vec<_>>(),
            "sor_sweeps": d.stats.iter().map(|s| s.sor_sweeps).collect::<Vec<_>>(),
            "bins": report.bins,
        }),
    )
    .map_err(io_fail)?;
    Ok(Outcome {
        summary: format!(
            "fd-exhaust: {} nodes, centre values {:.6?}, monotone = {}",
            grid.interior_count(),
            d.centre_values,
            d.monotone
        ),
        passed: None,
        files: vec!["fd_field.csv".into(), "fd_bins.csv".into(), "fd_exhaust.json".into()],
    })
}

fn run_check_barrier(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    let p = cfg.profile_fns()?;
    let geom = cfg.geometry()?;
    let eps = cfg.eps(&p)?;
    let opts = CertifyOptions {
        samples: cfg.samples.unwrap_or(200),
        seed: cfg.seed,
        sigma_fraction: cfg.sigma_fraction.unwrap_or(0.25),
        ..Default::default()
    };
    if opts.samples == 0 || !(opts.sigma_fraction > 0.0 && opts.sigma_fraction < 1.0) {
        return invalid("samples must be positive and sigma_fraction in (0, 1)");
    }
    let b = normal_form_weight(&p);
    let cert = certify_barriers(&p, &geom, eps, &b, &opts)?;
    let mut body = json!({ "geometry": geom, "c_f": p.c_f, "c_m": p.c_m, "certification": cert });
    let mut summary = format!(
        "PASS check-barrier: delta_eps = {:.4e}, worst margins {:.3e} (super) {:.3e} (sub)",
        cert.delta_eps, cert.upper.worst_margin, cert.lower.worst_margin
    );
    if cfg.lemma23 {
        let radial = cfg.radial_problem()?;
        let w = solve_w(&radial)?;
        let rep = verify_lemma23(&p, &w, &default_eps_ladder(cfg.eps_levels.unwrap_or(20)), opts.samples, cfg.seed)?;
        summary.push_str(&format!(", lemma eps = {}", rep.eps_found));
        body["lemma23"] = serde_json::to_value(&rep).map_err(|e| RunError::Invalid(e.to_string()))?;
    }
    write_json(&out.join("barrier.json"), &body).map_err(io_fail)?;
    Ok(Outcome { summary, passed: Some(true), files: vec!["barrier.json".into()] })
}

fn run_verify_asymptotics(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    let prob = cfg.radial_problem()?;
    let p = cfg.profile_fns()?;
    let xi = match cfg.xi {
        Some(x) => x,
        None => {
            let l0 = binomial(cfg.n - 1, cfg.k - 1) * cfg.radius.powi(1 - cfg.k as i32);
            p.xi_bounds(l0, l0)?.0
        }
    };
    let (d_min, d_max) = (cfg.d_min.unwrap_or(1e-4), cfg.d_max.unwrap_or(1e-2));
    if !(d_min > 0.0 && d_max > d_min && d_max < cfg.radius) {
        return invalid(format!("need 0 < d_min < d_max < radius, got {d_min}, {d_max}"));
    }
    let band = cfg.band.unwrap_or(0.1);
    let opts = ivp_options(cfg)?;
    let sol = shoot_blowup_radius(&prob, &opts, 1e-12)?;
    let ladder = ReportLadder { d_max, d_min, per_decade: 4 };
    let report = asymptotics_report_with(&sol, &p, xi, &ladder)?;
    report.write_csv(&out.join("asymptotics.csv")).map_err(io_fail)?;
    let in_band = report.rows.iter().all(|r| (r.ratio - 1.0).abs() <= band);
    let near = report.row_near(d_min).map(|r| (r.ratio - 1.0).abs());
    let far = report.row_near(d_max).map(|r| (r.ratio - 1.0).abs());
    let improving = matches!((near, far), (Some(a), Some(b)) if a < b);
    let passed = in_band && improving;
    write_json(
        &out.join("asymptotics.json"),
        &json!({
            "problem": prob.describe(),
            "xi": xi,
            "u0": sol.u[0],
            "rstar": sol.rstar,
            "band": band,
            "in_band": in_band,
            "improving": improving,
            "passed": passed,
            "rows": report.rows,
        }),
    )
    .map_err(io_fail)?;
    let verdict = if passed { "PASS" } else { "FAIL" };
    Ok(Outcome {
        summary: format!(
            "{verdict} verify-asymptotics: |ratio-1| = {:.3e} at d = {d_min:e}, {:.3e} at d = {d_max:e} (band {band})",
            near.unwrap_or(f64::NAN),
            far.unwrap_or(f64::NAN)
        ),
        passed: Some(passed),
        files: vec!["asymptotics.csv".into(), "asymptotics.json".into()],
    })
}
