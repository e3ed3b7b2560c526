//! Flat `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, nested settings use dotted
//! keys (`cutoff.M1 = 50`). Numeric settings that accept `auto` are resolved
//! from the problem data by [`RunConfig::setup`].

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{
    general_case_data, linear_tw_problem, nonlinear_tw_problem, TravelingWaveParams, GENERAL_DOMAIN,
    GENERAL_SNAPSHOTS, LINEAR_TW_DOMAIN, NONLINEAR_TW_DOMAIN,
};
use crate::fluxes::LaxFriedrichs;
use crate::grid::Grid;
use crate::problem::{project_initial_data, CutoffCoupling, ProblemSpec, ScalarFlux};
use crate::state::State;
use crate::stepper::{StepperConfig, DEFAULT_CFL_SAFETY, DEFAULT_NEWTON_MAX_ITER, DEFAULT_NEWTON_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    LinearTw,
    NonlinearTw,
    General,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxKind {
    LaxFriedrichs,
    Godunov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// Crank–Nicolson / semi-implicit Lax–Friedrichs.
    FullyDiscrete,
    /// RK4 on the semi-discrete flux form.
    Rk4,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::FullyDiscrete => "fully_discrete",
            SchemeKind::Rk4 => "rk4",
        }
    }
}

/// A number or `auto`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Auto {
    Auto,
    Value(f64),
}

/// Initial data of the custom problem:
/// `u0 = A sech((x - x0)/w) e^{i k x}`, `v0 = value` on `[left, right]`
/// (0 elsewhere) or a Gaussian `value exp(-((x - x0)/w)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomProblem {
    pub flux: [f64; 3],
    pub cubic: f64,
    pub alpha: f64,
    pub u_amplitude: f64,
    pub u_width: f64,
    pub u_center: f64,
    pub u_wavenumber: f64,
    pub v_shape: VShape,
    pub v_value: f64,
    pub v_left: f64,
    pub v_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VShape {
    Indicator,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub scheme: SchemeKind,
    pub domain: (f64, f64),
    pub h: f64,
    pub tau: Auto,
    pub t_final: f64,
    pub flux: FluxKind,
    pub lambda_lf: Auto,
    pub gamma_lf: Auto,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub cfl_safety: f64,
    pub enforce_cfl: bool,
    pub cutoff: (f64, f64),
    pub snapshot_times: Vec<f64>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub traveling_wave: TravelingWaveParams,
    pub b: f64,
    pub custom: CustomProblem,
    pub h_list: Vec<f64>,
    pub certify_samples: usize,
    pub certify_range: Auto,
    pub certify_a_max: Auto,
}

const KEYS: &[&str] = &[
    "problem",
    "scheme",
    "domain.x_left",
    "domain.x_right",
    "h",
    "tau",
    "T",
    "flux",
    "lambda_lf",
    "gamma_lf",
    "newton_tol",
    "newton_max_iter",
    "cfl_safety",
    "enforce_cfl",
    "cutoff.M1",
    "cutoff.M2",
    "snapshot_times",
    "out_dir",
    "seed",
    "tw.q",
    "tw.k",
    "tw.lambda",
    "tw.gamma",
    "tw.a",
    "tw.c",
    "b",
    "custom.flux",
    "custom.cubic",
    "custom.alpha",
    "custom.u0.amplitude",
    "custom.u0.width",
    "custom.u0.center",
    "custom.u0.wavenumber",
    "custom.v0.shape",
    "custom.v0.value",
    "custom.v0.left",
    "custom.v0.right",
    "study.h_list",
    "certify.samples",
    "certify.range",
    "certify.a_max",
];

/// Raw `key -> (value, line)` pairs; line 0 marks a command-line override.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                Error::config(content.to_string(), format!("line {}: expected `key = value`", i + 1))
            })?;
            raw.insert(key.trim(), value.trim(), i + 1)?;
        }
        Ok(raw)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, item: &str) -> Result<()> {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::config(item.to_string(), "override must look like key=value"))?;
        self.insert(key.trim(), value.trim(), 0)
    }

    fn insert(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::config(key, format!("{}unknown key", where_(line))));
        }
        self.entries.insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.get(key).map(|(v, l)| (v.as_str(), *l))
    }
}

fn where_(line: usize) -> String {
    if line == 0 {
        "override: ".to_string()
    } else {
        format!("line {line}: ")
    }
}

fn bad(key: &str, line: usize, message: impl std::fmt::Display) -> Error {
    Error::config(key, format!("{}{message}", where_(line)))
}

struct Reader<'a>(&'a RawConfig);

impl Reader<'_> {
    fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.0.get(key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| bad(key, line, format!("cannot parse `{v}`"))),
        }
    }

    fn number(&self, key: &str, default: f64) -> Result<f64> {
        let x: f64 = self.parse(key, default)?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(bad(key, self.line(key), "must be finite"))
        }
    }

    fn auto(&self, key: &str) -> Result<Auto> {
        match self.0.get(key) {
            None => Ok(Auto::Auto),
            Some((v, _)) if v.eq_ignore_ascii_case("auto") => Ok(Auto::Auto),
            Some(_) => Ok(Auto::Value(self.number(key, 0.0)?)),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.0.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| bad(key, line, format!("cannot parse `{s}`"))))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn line(&self, key: &str) -> usize {
        self.0.get(key).map(|(_, l)| l).unwrap_or(0)
    }
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let r = Reader(raw);
        let problem = match raw.get("problem") {
            None | Some(("general", _)) => ProblemKind::General,
            Some(("linear_tw", _)) => ProblemKind::LinearTw,
            Some(("nonlinear_tw", _)) => ProblemKind::NonlinearTw,
            Some(("custom", _)) => ProblemKind::Custom,
            Some((v, l)) => {
                return Err(bad("problem", l, format!("`{v}` is not one of linear_tw, nonlinear_tw, general, custom")))
            }
        };
        let scheme = match raw.get("scheme") {
            None | Some(("fully_discrete", _)) => SchemeKind::FullyDiscrete,
            Some(("rk4", _)) => SchemeKind::Rk4,
            Some((v, l)) => return Err(bad("scheme", l, format!("`{v}` is not one of fully_discrete, rk4"))),
        };
        let flux = match raw.get("flux") {
            None | Some(("lax_friedrichs", _)) => FluxKind::LaxFriedrichs,
            Some(("godunov", _)) => FluxKind::Godunov,
            Some((v, l)) => return Err(bad("flux", l, format!("`{v}` is not one of lax_friedrichs, godunov"))),
        };
        let default_domain = match problem {
            ProblemKind::LinearTw => LINEAR_TW_DOMAIN,
            ProblemKind::NonlinearTw => NONLINEAR_TW_DOMAIN,
            ProblemKind::General | ProblemKind::Custom => GENERAL_DOMAIN,
        };
        let t_final = r.number("T", if problem == ProblemKind::General { 2.5 } else { 1.0 })?;
        let snapshot_times = match r.list("snapshot_times")? {
            Some(list) => list,
            None if problem == ProblemKind::General => {
                GENERAL_SNAPSHOTS.iter().copied().filter(|&t| t <= t_final).collect()
            }
            None => vec![0.0, t_final],
        };
        let tw_default = TravelingWaveParams::default();
        let traveling_wave = TravelingWaveParams {
            q: r.number("tw.q", tw_default.q)?,
            k: r.number("tw.k", tw_default.k)?,
            lambda_tw: r.number("tw.lambda", tw_default.lambda_tw)?,
            gamma_tw: r.number("tw.gamma", tw_default.gamma_tw)?,
            a_tw: r.number("tw.a", tw_default.a_tw)?,
            c: r.number("tw.c", tw_default.c)?,
        };
        let custom_flux = r.list("custom.flux")?.unwrap_or_else(|| vec![0.0, 3.0, 0.0]);
        if custom_flux.len() != 3 {
            return Err(bad("custom.flux", r.line("custom.flux"), "expects three coefficients c1, c2, c3 of f = c1 v + c2 v² + c3 v³"));
        }
        let v_shape = match raw.get("custom.v0.shape") {
            None | Some(("indicator", _)) => VShape::Indicator,
            Some(("gaussian", _)) => VShape::Gaussian,
            Some((v, l)) => return Err(bad("custom.v0.shape", l, format!("`{v}` is not one of indicator, gaussian"))),
        };
        let custom = CustomProblem {
            flux: [custom_flux[0], custom_flux[1], custom_flux[2]],
            cubic: r.number("custom.cubic", 1.0)?,
            alpha: r.number("custom.alpha", 1.0)?,
            u_amplitude: r.number("custom.u0.amplitude", 6f64.sqrt())?,
            u_width: r.number("custom.u0.width", 1.0 / 3f64.sqrt())?,
            u_center: r.number("custom.u0.center", 0.0)?,
            u_wavenumber: r.number("custom.u0.wavenumber", 2.5)?,
            v_shape,
            v_value: r.number("custom.v0.value", 1.0)?,
            v_left: r.number("custom.v0.left", -10.0)?,
            v_right: r.number("custom.v0.right", 10.0)?,
        };
        let defaults = CutoffCoupling::default();
        let cfg = RunConfig {
            problem,
            scheme,
            domain: (r.number("domain.x_left", default_domain.0)?, r.number("domain.x_right", default_domain.1)?),
            h: r.number("h", 0.1)?,
            tau: r.auto("tau")?,
            t_final,
            flux,
            lambda_lf: r.auto("lambda_lf")?,
            gamma_lf: r.auto("gamma_lf")?,
            newton_tol: r.number("newton_tol", DEFAULT_NEWTON_TOL)?,
            newton_max_iter: r.parse("newton_max_iter", DEFAULT_NEWTON_MAX_ITER)?,
            cfl_safety: r.number("cfl_safety", DEFAULT_CFL_SAFETY)?,
            enforce_cfl: r.parse("enforce_cfl", true)?,
            cutoff: (r.number("cutoff.M1", defaults.m1())?, r.number("cutoff.M2", defaults.m2())?),
            snapshot_times,
            out_dir: PathBuf::from(raw.get("out_dir").map(|(v, _)| v).unwrap_or("out")),
            seed: r.parse("seed", 0)?,
            traveling_wave,
            b: r.number("b", 1.0)?,
            custom,
            h_list: r.list("study.h_list")?.unwrap_or_else(|| vec![0.4, 0.2, 0.1, 0.05]),
            certify_samples: r.parse("certify.samples", 10_000)?,
            certify_range: r.auto("certify.range")?,
            certify_a_max: r.auto("certify.a_max")?,
        };
        cfg.validate_with(&r)?;
        Ok(cfg)
    }

    fn validate_with(&self, r: &Reader) -> Result<()> {
        let positive = |key: &str, x: f64| {
            if x > 0.0 {
                Ok(())
            } else {
                Err(bad(key, r.line(key), format!("must be positive, got {x}")))
            }
        };
        positive("h", self.h)?;
        if self.t_final < 0.0 {
            return Err(bad("T", r.line("T"), format!("must be >= 0, got {}", self.t_final)));
        }
        if self.domain.0 >= self.domain.1 {
            return Err(bad("domain.x_left", r.line("domain.x_left"), "must be smaller than domain.x_right"));
        }
        for (key, value) in [("tau", self.tau), ("lambda_lf", self.lambda_lf), ("gamma_lf", self.gamma_lf)] {
            if let Auto::Value(x) = value {
                positive(key, x)?;
            }
        }
        positive("newton_tol", self.newton_tol)?;
        if let Some(t) = self.snapshot_times.iter().find(|&&t| !(0.0..=self.t_final).contains(&t)) {
            return Err(bad("snapshot_times", r.line("snapshot_times"), format!("{t} lies outside [0, T]")));
        }
        if self.h_list.iter().any(|&h| h.is_nan() || h <= 0.0) || self.h_list.is_empty() {
            return Err(bad("study.h_list", r.line("study.h_list"), "needs positive mesh sizes"));
        }
        CutoffCoupling::new(self.cutoff.0, self.cutoff.1)
            .map_err(|e| bad("cutoff.M1", r.line("cutoff.M1"), e))?;
        Ok(())
    }

    /// The problem description, before discretisation.
    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let cutoff = CutoffCoupling::new(self.cutoff.0, self.cutoff.1)?;
        let spec = match self.problem {
            ProblemKind::LinearTw => linear_tw_problem(self.traveling_wave)?,
            ProblemKind::NonlinearTw => nonlinear_tw_problem(self.b)?,
            ProblemKind::General => general_case_data(),
            ProblemKind::Custom => custom_problem(&self.custom, self.domain)?,
        };
        Ok(spec.with_cutoff(cutoff))
    }

    /// Discretises the problem at mesh size `h` and resolves `auto` settings.
    pub fn setup_with_h(&self, h: f64) -> Result<Setup> {
        let spec = Arc::new(self.problem_spec()?);
        let grid = Grid::with_spacing(self.domain.0, self.domain.1, h)?;
        let init = project_initial_data(&spec, &grid)?;
        let a_peak = spec.alpha * init.u.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        let (lambda_auto, gamma_auto) = LaxFriedrichs::auto_parameters(&spec.model, spec.lipschitz_bound_m, a_peak);
        let lambda = match self.lambda_lf {
            Auto::Auto => lambda_auto,
            Auto::Value(x) => x,
        };
        let gamma = match self.gamma_lf {
            Auto::Auto => gamma_auto,
            Auto::Value(x) => x,
        };
        let tau = match (self.tau, self.scheme) {
            (Auto::Value(x), _) => x,
            (Auto::Auto, SchemeKind::FullyDiscrete) => self.cfl_safety * lambda * grid.h(),
            (Auto::Auto, SchemeKind::Rk4) => {
                let explicit = 0.25 * grid.h() * grid.h();
                explicit.min(self.cfl_safety * lambda * grid.h())
            }
        };
        let stepper = StepperConfig {
            tau,
            lambda_lf: lambda,
            gamma_lf: gamma,
            newton_tol: self.newton_tol,
            newton_max_iter: self.newton_max_iter,
            cfl_safety: self.cfl_safety,
            enforce_cfl: self.enforce_cfl,
        };
        Ok(Setup { spec, grid, init, stepper, a_peak })
    }

    pub fn setup(&self) -> Result<Setup> {
        self.setup_with_h(self.h)
    }
}

/// A discretised, fully resolved run.
#[derive(Debug, Clone)]
pub struct Setup {
    pub spec: Arc<ProblemSpec>,
    pub grid: Grid,
    pub init: State,
    /// Resolved `tau`, `lambda_lf`, `gamma_lf` and Newton settings.
    pub stepper: StepperConfig,
    /// `alpha max |u0|²` over the cell averages.
    pub a_peak: f64,
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn custom_problem(c: &CustomProblem, domain: (f64, f64)) -> Result<ProblemSpec> {
    if c.u_width.is_nan() || c.u_width <= 0.0 {
        return Err(Error::config("custom.u0.width", "must be positive"));
    }
    let p = c.clone();
    let u0 = move |x: f64| Complex64::from_polar(p.u_amplitude * sech((x - p.u_center) / p.u_width), p.u_wavenumber * x);
    let p = c.clone();
    let v0 = move |x: f64| match p.v_shape {
        VShape::Indicator => {
            if (p.v_left..=p.v_right).contains(&x) {
                p.v_value
            } else {
                0.0
            }
        }
        VShape::Gaussian => p.v_value * (-((x - p.u_center) / p.u_width).powi(2)).exp(),
    };
    let v_sup = (0..=10_000)
        .map(|k| v0(domain.0 + (domain.1 - domain.0) * k as f64 / 10_000.0).abs())
        .fold(0.0, f64::max);
    let mut spec = ProblemSpec::new(
        "custom",
        ScalarFlux::polynomial(c.flux[0], c.flux[1], c.flux[2]),
        CutoffCoupling::default(),
        u0,
        v0,
        (2.0 * v_sup).max(1.0),
    )?;
    spec.cubic = c.cubic;
    spec.alpha = c.alpha;
    spec.validate()?;
    Ok(spec)
}
