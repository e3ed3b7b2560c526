//! Fully discrete scheme: Crank–Nicolson with Newton iteration for the
//! Schrödinger part, semi-implicit Lax–Friedrichs for the conservation law.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::thomas;
use crate::problem::ProblemSpec;
use crate::semidiscrete::discrete_laplacian;
use crate::state::{boundary, State};

pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;
pub const DEFAULT_NEWTON_MAX_ITER: usize = 25;
pub const DEFAULT_CFL_SAFETY: f64 = 0.5;
/// Number of successive step halvings tried after a failed Newton solve.
pub const MAX_HALVINGS: u32 = 3;

/// Multiple of machine epsilon times the residual's term magnitude below
/// which a residual counts as converged.
const ROUNDING_FLOOR: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub tau: f64,
    pub lambda_lf: f64,
    pub gamma_lf: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub cfl_safety: f64,
    /// Reject `tau > cfl_safety * lambda_lf * h` at construction; when off,
    /// the violation is only logged.
    pub enforce_cfl: bool,
}

impl StepperConfig {
    pub fn new(tau: f64, lambda_lf: f64, gamma_lf: f64) -> Self {
        StepperConfig {
            tau,
            lambda_lf,
            gamma_lf,
            newton_tol: DEFAULT_NEWTON_TOL,
            newton_max_iter: DEFAULT_NEWTON_MAX_ITER,
            cfl_safety: DEFAULT_CFL_SAFETY,
            enforce_cfl: true,
        }
    }

    /// Default time step `cfl_safety * lambda * h`.
    pub fn with_auto_tau(lambda_lf: f64, gamma_lf: f64, h: f64) -> Self {
        let mut cfg = Self::new(0.0, lambda_lf, gamma_lf);
        cfg.tau = cfg.cfl_safety * lambda_lf * h;
        cfg
    }

    pub fn max_tau(&self, h: f64) -> f64 {
        self.cfl_safety * self.lambda_lf * h
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let positive = |key: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive and finite, got {x}")))
            }
        };
        positive("tau", self.tau)?;
        positive("lambda_lf", self.lambda_lf)?;
        positive("gamma_lf", self.gamma_lf)?;
        positive("newton_tol", self.newton_tol)?;
        if self.newton_max_iter == 0 {
            return Err(Error::config("newton_max_iter", "must be at least 1"));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::config("cfl_safety", format!("must lie in (0, 1], got {}", self.cfl_safety)));
        }
        let bound = self.max_tau(grid.h());
        if self.tau > bound * (1.0 + 1e-12) {
            if !self.enforce_cfl {
                tracing::warn!(tau = self.tau, bound, "tau exceeds cfl_safety * lambda_lf * h");
                return Ok(());
            }
            return Err(Error::config(
                "tau",
                format!("tau = {} exceeds cfl_safety * lambda_lf * h = {bound}", self.tau),
            ));
        }
        Ok(())
    }
}

/// Converged Crank–Nicolson update.
#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub u: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Outcome of [`Stepper::advance`].
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: State,
    /// Largest Newton iteration count over the substeps taken.
    pub newton_iterations: usize,
    /// Largest final Newton residual over the substeps taken.
    pub newton_residual: f64,
    /// Number of substeps (1 unless the step was halved).
    pub substeps: usize,
}

/// Owns the configuration for one trajectory.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    spec: Arc<ProblemSpec>,
    cfg: StepperConfig,
}

impl Stepper {
    pub fn new(grid: Grid, spec: Arc<ProblemSpec>, cfg: StepperConfig) -> Result<Self> {
        cfg.validate(&grid)?;
        Ok(Stepper { grid, spec, cfg })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn potential(&self, v: &[f64]) -> Vec<f64> {
        v.iter().map(|&v| self.spec.alpha * self.spec.g(v)).collect()
    }

    /// Residual of the midpoint equation in the unknown `w = (u^{n+1} + u^n)/2`,
    /// together with the magnitude of its largest term.
    fn residual(&self, w: &[Complex64], u_n: &[Complex64], pot: &[f64], tau: f64) -> (Vec<Complex64>, f64) {
        let h = self.grid.h();
        let zero = Complex64::new(0.0, 0.0);
        let lap = discrete_laplacian(w, (zero, zero), h);
        let two_i_tau = Complex64::new(0.0, 2.0 / tau);
        let c = self.spec.cubic;
        let mut scale = 0.0f64;
        let r = (0..w.len())
            .map(|j| {
                let aw = w[j].norm_sqr();
                let nonlinear = (c * aw + pot[j]) * w[j];
                let term = (2.0 / tau) * (w[j].norm() + u_n[j].norm())
                    + 4.0 * w[j].norm().max(u_n[j].norm()) / (h * h)
                    + nonlinear.norm();
                scale = scale.max(term);
                two_i_tau * (w[j] - u_n[j]) + lap[j] - nonlinear
            })
            .collect();
        (r, scale)
    }

    /// Crank–Nicolson update of `u` with the coupling frozen at `v^n`.
    ///
    /// Newton's method treats `conj(w)` as independent, so each iterate is
    /// one complex tridiagonal solve.
    pub fn cn_newton_u_step(&self, state: &State, tau: f64) -> Result<NewtonSolution> {
        let n = state.len();
        let h2 = self.grid.h() * self.grid.h();
        let pot = self.potential(&state.v);
        let off = vec![Complex64::new(1.0 / h2, 0.0); n.saturating_sub(1)];
        let mut w = state.u.clone();
        let mut diag = vec![Complex64::new(0.0, 0.0); n];
        let mut iterations = 0;
        loop {
            let (r, scale) = self.residual(&w, &state.u, &pot, tau);
            let norm = r.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            if !norm.is_finite() {
                return Err(Error::NewtonDiverged { iterations, residual: norm });
            }
            let floor = ROUNDING_FLOOR * f64::EPSILON * scale;
            if norm <= self.cfg.newton_tol.max(floor) {
                let u = w.iter().zip(&state.u).map(|(&w, &u)| 2.0 * w - u).collect();
                return Ok(NewtonSolution { u, iterations, residual: norm });
            }
            if iterations == self.cfg.newton_max_iter {
                return Err(Error::NewtonDiverged { iterations, residual: norm });
            }
            for j in 0..n {
                diag[j] = Complex64::new(
                    -2.0 / h2 - pot[j] - 2.0 * self.spec.cubic * w[j].norm_sqr(),
                    2.0 / tau,
                );
            }
            let neg: Vec<Complex64> = r.iter().map(|z| -z).collect();
            let delta = thomas(&off, &diag, &off, &neg)?;
            for (wj, dj) in w.iter_mut().zip(&delta) {
                *wj += dj;
            }
            iterations += 1;
        }
    }

    /// Semi-implicit Lax–Friedrichs update of `v`: explicit central
    /// differences of `f(v^n)` and `g'(v^n) a^n`, implicit diffusion with
    /// weights `1/(2 lambda h)` and `a^n_{j+1/2}/(2 gamma h)`.
    pub fn silf_v_step(&self, state: &State, u_n: &[Complex64], tau: f64) -> Result<Vec<f64>> {
        let n = state.len();
        let h = self.grid.h();
        let v = &state.v;
        let a: Vec<f64> = u_n.iter().map(|z| self.spec.alpha * z.norm_sqr()).collect();
        let mu = tau / (2.0 * self.cfg.lambda_lf * h);
        let kappa = tau / (2.0 * self.cfg.gamma_lf * h);
        // nu[k] weights the interface between cells k-1 and k
        let nu: Vec<f64> = (0..=n as isize)
            .map(|k| kappa * 0.5 * (boundary::a_at(&a, k - 1) + boundary::a_at(&a, k)))
            .collect();

        let coupled = |j: isize| self.spec.dg(boundary::v_at(v, j)) * boundary::a_at(&a, j);
        let flux = |j: isize| self.spec.f(boundary::v_at(v, j));
        let mut lower = vec![0.0; n - 1];
        let mut upper = vec![0.0; n - 1];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let c = tau / (2.0 * h);
        for j in 0..n {
            let ji = j as isize;
            let left = mu + nu[j];
            let right = mu + nu[j + 1];
            rhs[j] = v[j] - c * (flux(ji + 1) - flux(ji - 1)) + c * (coupled(ji + 1) - coupled(ji - 1));
            diag[j] = 1.0 + left + right;
            // copy ghosts fold the outer neighbour back onto the diagonal
            if j == 0 {
                diag[j] -= left;
            } else {
                lower[j - 1] = -left;
            }
            if j + 1 == n {
                diag[j] -= right;
            } else {
                upper[j] = -right;
            }
        }
        let out = thomas(&lower, &diag, &upper, &rhs)?;
        if let Some(index) = out.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "v update", index });
        }
        Ok(out)
    }

    /// One step of size `tau`, both updates driven by time-`n` data.
    pub fn step_with(&self, state: &State, tau: f64) -> Result<(State, NewtonSolution)> {
        let newton = self.cn_newton_u_step(state, tau)?;
        let v = self.silf_v_step(state, &state.u, tau)?;
        let next = State { t: state.t + tau, u: newton.u.clone(), v };
        Ok((next, newton))
    }

    /// One step with the configured `tau`.
    pub fn step(&self, state: &State) -> Result<State> {
        self.step_with(state, self.cfg.tau).map(|(s, _)| s)
    }

    /// Step of size `tau`; on a Newton failure the step is retried as two
    /// halves, up to [`MAX_HALVINGS`] levels deep.
    pub fn advance(&self, state: &State, tau: f64) -> Result<StepOutcome> {
        self.advance_level(state, tau, 0)
    }

    fn advance_level(&self, state: &State, tau: f64, level: u32) -> Result<StepOutcome> {
        match self.step_with(state, tau) {
            Ok((next, newton)) => Ok(StepOutcome {
                state: next,
                newton_iterations: newton.iterations,
                newton_residual: newton.residual,
                substeps: 1,
            }),
            Err(err @ Error::NewtonDiverged { .. }) if level < MAX_HALVINGS => {
                tracing::debug!(t = state.t, tau, %err, "halving step");
                let first = self.advance_level(state, 0.5 * tau, level + 1)?;
                let second = self.advance_level(&first.state, 0.5 * tau, level + 1)?;
                Ok(StepOutcome {
                    state: State { t: state.t + tau, ..second.state },
                    newton_iterations: first.newton_iterations.max(second.newton_iterations),
                    newton_residual: first.newton_residual.max(second.newton_residual),
                    substeps: first.substeps + second.substeps,
                })
            }
            Err(err) => Err(err),
        }
    }
}
