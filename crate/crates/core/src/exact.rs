//! Benchmark problems with exact solutions, error norms and the
//! convergence-study driver.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::diagnostics::format_number;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::problem::{project_initial_data, CutoffCoupling, ExactFn, ProblemSpec, ScalarFlux};
use crate::simulate::{run, RunPlan};
use crate::state::State;
use crate::stepper::{Stepper, StepperConfig};

pub const LINEAR_TW_DOMAIN: (f64, f64) = (-40.0, 60.0);
pub const NONLINEAR_TW_DOMAIN: (f64, f64) = (-40.0, 40.0);
pub const GENERAL_DOMAIN: (f64, f64) = (-50.0, 50.0);
/// Snapshot schedule of the general-case figures.
pub const GENERAL_SNAPSHOTS: [f64; 5] = [0.0, 1.0, 1.5, 2.0, 2.5];

pub const STUDY_CSV_HEADER: &str = "h,tau,err_u_l2,err_v_l2,order_u,order_v";

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Working range `max(1, 2 ||v0||∞)` used to size the flux parameters.
fn working_range(v0_sup: f64) -> f64 {
    (2.0 * v0_sup).max(1.0)
}

/// Parameters of the travelling wave of
/// `i u_t + u_xx = k (v u + q |u|² u)`, `v_t + gamma v_x = delta (|u|²)_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingWaveParams {
    pub q: f64,
    pub k: f64,
    pub lambda_tw: f64,
    pub gamma_tw: f64,
    pub a_tw: f64,
    pub c: f64,
}

impl Default for TravelingWaveParams {
    fn default() -> Self {
        TravelingWaveParams { q: 1.0, k: 1.0, lambda_tw: 1.0, gamma_tw: 1.0, a_tw: -2.0, c: 1.5 }
    }
}

impl TravelingWaveParams {
    pub fn new(q: f64, k: f64, lambda_tw: f64, gamma_tw: f64, a_tw: f64, c: f64) -> Result<Self> {
        let p = TravelingWaveParams { q, k, lambda_tw, gamma_tw, a_tw, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.e().is_nan() || self.e() <= 0.0 {
            return Err(Error::config("lambda_tw", format!("E = lambda - c²/4 must be positive, got {}", self.e())));
        }
        if self.beta().is_nan() || self.beta() >= 0.0 {
            return Err(Error::config("a_tw", format!("beta = k (a + q) must be negative, got {}", self.beta())));
        }
        Ok(())
    }

    /// `E = lambda - c²/4`.
    pub fn e(&self) -> f64 {
        self.lambda_tw - 0.25 * self.c * self.c
    }

    /// `delta = a (gamma - c)`.
    pub fn delta(&self) -> f64 {
        self.a_tw * (self.gamma_tw - self.c)
    }

    /// `beta = k (a + q)`.
    pub fn beta(&self) -> f64 {
        self.k * (self.a_tw + self.q)
    }

    /// Peak value of `|u|²`, `2E/|beta|`.
    pub fn peak_intensity(&self) -> f64 {
        2.0 * self.e() / self.beta().abs()
    }
}

/// Travelling wave moving right at speed `c`.
pub fn exact_linear_tw(x: f64, t: f64, p: &TravelingWaveParams) -> (Complex64, f64) {
    let xi = x - p.c * t;
    let s = sech(p.e().sqrt() * xi);
    let amp = p.peak_intensity();
    let u = Complex64::from_polar(amp.sqrt() * s, p.lambda_tw * t + 0.5 * p.c * xi);
    (u, p.a_tw * amp * s * s)
}

/// Standing solution `(e^{ibt} r(x), -r(x))`, `r = (3b/2) sech²(√b x/2)`.
pub fn exact_nonlinear(x: f64, t: f64, b: f64) -> Result<(Complex64, f64)> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::config("b", format!("must be positive, got {b}")));
    }
    let s = sech(0.5 * b.sqrt() * x);
    let r = 1.5 * b * s * s;
    Ok((Complex64::from_polar(r, b * t), -r))
}

/// Linear-flux problem with travelling-wave data. The single coupling
/// strength of [`ProblemSpec`] requires `delta = k`.
pub fn linear_tw_problem(p: TravelingWaveParams) -> Result<ProblemSpec> {
    p.validate()?;
    if (p.delta() - p.k).abs() > 1e-12 * p.k.abs().max(1.0) {
        return Err(Error::config(
            "a_tw",
            format!("coupling strengths must agree: delta = {} but k = {}", p.delta(), p.k),
        ));
    }
    let v_sup = p.a_tw.abs() * p.peak_intensity();
    let mut spec = ProblemSpec::new(
        "linear_tw",
        ScalarFlux::linear(p.gamma_tw),
        CutoffCoupling::default(),
        move |x| exact_linear_tw(x, 0.0, &p).0,
        move |x| exact_linear_tw(x, 0.0, &p).1,
        working_range(v_sup),
    )?
    .with_exact(move |x, t| exact_linear_tw(x, t, &p));
    spec.alpha = p.k;
    spec.cubic = p.k * p.q;
    spec.validate()?;
    Ok(spec)
}

/// `f(v) = v²` problem with the cubic term off and the standing solution.
pub fn nonlinear_tw_problem(b: f64) -> Result<ProblemSpec> {
    exact_nonlinear(0.0, 0.0, b)?;
    let mut spec = ProblemSpec::new(
        "nonlinear_tw",
        ScalarFlux::polynomial(0.0, 1.0, 0.0),
        CutoffCoupling::default(),
        move |x| exact_nonlinear(x, 0.0, b).map(|e| e.0).unwrap_or(Complex64::new(f64::NAN, 0.0)),
        move |x| exact_nonlinear(x, 0.0, b).map(|e| e.1).unwrap_or(f64::NAN),
        working_range(1.5 * b),
    )?
    .with_exact(move |x, t| exact_nonlinear(x, t, b).unwrap_or((Complex64::new(f64::NAN, 0.0), f64::NAN)));
    spec.cubic = 0.0;
    Ok(spec)
}

/// `f(v) = 3v²`, `u0 = e^{5ix/2} √6 sech(√3 x)`, `v0` the indicator of `[-10, 10]`.
pub fn general_case_data() -> ProblemSpec {
    ProblemSpec::new(
        "general",
        ScalarFlux::polynomial(0.0, 3.0, 0.0),
        CutoffCoupling::default(),
        |x| Complex64::from_polar(6f64.sqrt() * sech(3f64.sqrt() * x), 2.5 * x),
        |x| if (-10.0..=10.0).contains(&x) { 1.0 } else { 0.0 },
        working_range(1.0),
    )
    .expect("general-case data is valid")
}

/// Discrete L² distances of `u` and `v` to `exact` at the cell centres, at `state.t`.
pub fn l2_error(state: &State, exact: &ExactFn, grid: &Grid) -> (f64, f64) {
    let h = grid.h();
    let (eu, ev) = state.u.iter().zip(&state.v).enumerate().fold((0.0, 0.0), |(eu, ev), (j, (u, v))| {
        let (ue, ve) = exact(grid.center(j), state.t);
        (eu + h * (u - ue).norm_sqr(), ev + h * (v - ve).powi(2))
    });
    (eu.sqrt(), ev.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub h: f64,
    pub tau: f64,
    pub err_u: f64,
    pub err_v: f64,
    /// `log2(err(previous h) / err(h))`; `None` on the first row.
    pub order_u: Option<f64>,
    pub order_v: Option<f64>,
}

/// Runs the problem to `t_final` at each `h` (in parallel) with
/// `tau = cfl_safety * lambda * h` taken from `template`.
pub fn convergence_study(
    spec: Arc<ProblemSpec>,
    domain: (f64, f64),
    h_list: &[f64],
    t_final: f64,
    template: &StepperConfig,
) -> Result<Vec<StudyRow>> {
    let exact = spec
        .exact
        .clone()
        .ok_or_else(|| Error::config("problem", format!("`{}` has no exact solution", spec.name)))?;
    if h_list.is_empty() {
        return Err(Error::config("h_list", "needs at least one mesh size"));
    }
    let errors: Vec<(f64, f64, f64)> = h_list
        .par_iter()
        .map(|&h| {
            let grid = Grid::with_spacing(domain.0, domain.1, h)?;
            let mut cfg = *template;
            cfg.tau = cfg.max_tau(grid.h());
            let stepper = Stepper::new(grid, spec.clone(), cfg)?;
            let init = project_initial_data(&spec, &grid)?;
            let plan = RunPlan { t_final, tau: cfg.tau, snapshot_times: Vec::new() };
            let out = run(&stepper, init, &plan, None)?;
            let (eu, ev) = l2_error(&out.final_state, &exact, &grid);
            tracing::info!(h, tau = out.tau, err_u = eu, err_v = ev, "study resolution done");
            Ok((out.tau, eu, ev))
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<StudyRow> = Vec::with_capacity(h_list.len());
    for (&h, &(tau, err_u, err_v)) in h_list.iter().zip(&errors) {
        let prev = rows.last();
        rows.push(StudyRow {
            h,
            tau,
            err_u,
            err_v,
            order_u: prev.map(|p| (p.err_u / err_u).log2()),
            order_v: prev.map(|p| (p.err_v / err_v).log2()),
        });
    }
    Ok(rows)
}

/// True when both error columns strictly decrease down the table.
pub fn errors_strictly_decrease(rows: &[StudyRow]) -> bool {
    rows.windows(2).all(|w| w[1].err_u < w[0].err_u && w[1].err_v < w[0].err_v)
}

pub fn study_csv(rows: &[StudyRow]) -> String {
    let opt = |x: Option<f64>| x.map(format_number).unwrap_or_else(|| "NaN".to_string());
    let mut out = String::from(STUDY_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_number(r.h),
            format_number(r.tau),
            format_number(r.err_u),
            format_number(r.err_v),
            opt(r.order_u),
            opt(r.order_v)
        ));
    }
    out
}
