//! Functionals evaluated on discrete states: norms, mass, energy, quadratic
//! total variation, numerical viscosity, entropy residuals, interpolation
//! (Gagliardo–Nirenberg) ratios and a boundary monitor.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fluxes::{viscosity, NumericalFlux};
use crate::problem::ProblemSpec;
use crate::quadrature::integrate;
use crate::state::{boundary, State};

/// Threshold for [`boundary_monitor`] warnings.
pub const BOUNDARY_WARNING: f64 = 1e-5;
/// Number of outermost cells scanned by default on each side.
pub const BOUNDARY_CELLS: usize = 10;
/// Nodes of the tabulated entropy flux.
pub const ENTROPY_TABLE_NODES: usize = 10_001;

/// `(Σ h |w_j|^p)^{1/p}`; `p = ∞` gives `max |w_j|`.
pub fn discrete_norm<T: Copy + Into<Complex64>>(w: &[T], h: f64, p: f64) -> f64 {
    assert!(p >= 1.0, "discrete_norm needs p >= 1, got {p}");
    let abs = w.iter().map(|&x| Into::<Complex64>::into(x).norm());
    if p.is_infinite() {
        abs.fold(0.0, f64::max)
    } else if p == 2.0 {
        abs.map(|a| h * a * a).sum::<f64>().sqrt()
    } else {
        abs.map(|a| h * a.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `||D+ u||_2` over all `N + 1` interfaces, with zero ghost values.
pub fn dplus_l2(u: &[Complex64], h: f64) -> f64 {
    let n = u.len() as isize;
    let s: f64 = (-1..n)
        .map(|j| (boundary::u_at(u, j + 1) - boundary::u_at(u, j)).norm_sqr())
        .sum();
    (s / h).sqrt()
}

/// `½||D+u||² + (cubic/4)||u||_4^4 + ½ Σ h alpha g(v_j) |u_j|²`.
pub fn energy(state: &State, spec: &ProblemSpec, h: f64) -> f64 {
    let d = dplus_l2(&state.u, h);
    let (quartic, coupling) = state.u.iter().zip(&state.v).fold((0.0, 0.0), |(q, c), (u, &v)| {
        let a = u.norm_sqr();
        (q + h * a * a, c + h * spec.alpha * spec.g(v) * a)
    });
    0.5 * d * d + 0.25 * spec.cubic * quartic + 0.5 * coupling
}

/// `Σ_j (1 + |u_j|²)(v_{j+1} - v_j)²` (no `h` factor).
pub fn qtv_increment(state: &State) -> f64 {
    state
        .v
        .windows(2)
        .zip(&state.u)
        .map(|(w, u)| (1.0 + u.norm_sqr()) * (w[1] - w[0]).powi(2))
        .sum()
}

/// `Σ_j [visc_f(v_j, v_{j+1}) + a_j visc_G(v_j, v_{j+1})]` with intensities
/// `a = alpha |u|²`, for the weight `eta_dd`.
pub fn viscosity_sum(state: &State, flux: &dyn NumericalFlux, eta_dd: &dyn Fn(f64) -> f64, alpha: f64) -> Result<f64> {
    let model = flux.model();
    let mut total = 0.0;
    for (j, w) in state.v.windows(2).enumerate() {
        let (v1, v2) = (w[0], w[1]);
        if v1 == v2 {
            continue;
        }
        total += viscosity(v1, v2, eta_dd, flux.f_plus(v1, v2), |s| model.f(s))?;
        let a = alpha * state.u[j].norm_sqr();
        if a != 0.0 {
            total += a * viscosity(v1, v2, eta_dd, flux.g_bar_plus(v1, v2), |s| -model.dg(s))?;
        }
    }
    Ok(total)
}

/// Entropy fluxes for `eta(v) = v²/2`: `q1' = v f'(v)` (tabulated) and
/// `q2 = v g'(v) - (g(v) - g(0))`, both vanishing at 0.
pub struct EntropyFluxes {
    spec: Arc<ProblemSpec>,
    range: f64,
    step: f64,
    q1: Vec<f64>,
}

impl EntropyFluxes {
    /// Tabulates `q1` on `[-range, range]` by cumulative quadrature from 0.
    pub fn new(spec: Arc<ProblemSpec>, range: f64) -> Result<Self> {
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::config("entropy range", format!("must be positive, got {range}")));
        }
        let half = ENTROPY_TABLE_NODES / 2;
        let step = range / half as f64;
        let dq1 = |v: f64| v * spec.model.flux.df(v);
        let mut q1 = vec![0.0; ENTROPY_TABLE_NODES];
        for k in 1..=half {
            let (a, b) = ((k - 1) as f64 * step, k as f64 * step);
            q1[half + k] = q1[half + k - 1] + integrate(dq1, a, b)?;
            q1[half - k] = q1[half - k + 1] + integrate(dq1, -a, -b)?;
        }
        Ok(EntropyFluxes { spec, range, step, q1 })
    }

    /// Table over `[-M2, M2]` (or the working range when no cutoff is set).
    pub fn for_spec(spec: Arc<ProblemSpec>) -> Result<Self> {
        let range = spec.cutoff.map(|c| c.m2()).unwrap_or(spec.lipschitz_bound_m);
        Self::new(spec, range)
    }

    pub fn q1(&self, v: f64) -> f64 {
        let dq1 = |s: f64| s * self.spec.model.flux.df(s);
        if v.abs() > self.range {
            return integrate(dq1, 0.0, v).unwrap_or(f64::NAN);
        }
        let pos = (v + self.range) / self.step;
        let k = (pos.floor() as usize).min(ENTROPY_TABLE_NODES - 2);
        let t = pos - k as f64;
        let (x0, x1) = (-self.range + k as f64 * self.step, -self.range + (k + 1) as f64 * self.step);
        let (y0, y1) = (self.q1[k], self.q1[k + 1]);
        let (m0, m1) = (dq1(x0) * self.step, dq1(x1) * self.step);
        // cubic Hermite basis
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    pub fn q2(&self, v: f64) -> f64 {
        v * self.spec.dg(v) - (self.spec.g(v) - self.spec.g(0.0))
    }
}

/// Per-cell entropy residual of the step `prev -> next` for `eta = v²/2`:
/// `Δeta/tau + (Q_{j+1/2} - Q_{j-1/2})/h - (eta' g' - q2)(v_j) D+a_j`, with
/// `Q = q1(v̄) - q2(v̄) ā` at interface averages of time-`n` data and
/// `a = alpha |u^n|²`.
pub fn entropy_residual(prev: &State, next: &State, fluxes: &EntropyFluxes, h: f64, tau: f64) -> Vec<f64> {
    let spec = &fluxes.spec;
    let n = prev.len() as isize;
    let a: Vec<f64> = prev.u.iter().map(|z| spec.alpha * z.norm_sqr()).collect();
    let q: Vec<f64> = (-1..n)
        .map(|j| {
            let vbar = 0.5 * (boundary::v_at(&prev.v, j) + boundary::v_at(&prev.v, j + 1));
            let abar = 0.5 * (boundary::a_at(&a, j) + boundary::a_at(&a, j + 1));
            fluxes.q1(vbar) - fluxes.q2(vbar) * abar
        })
        .collect();
    (0..prev.len())
        .map(|j| {
            let v = prev.v[j];
            let deta = 0.5 * (next.v[j] * next.v[j] - v * v) / tau;
            let da = (boundary::a_at(&a, j as isize + 1) - a[j]) / h;
            deta + (q[j + 1] - q[j]) / h - (v * spec.dg(v) - fluxes.q2(v)) * da
        })
        .collect()
}

/// `Σ_j h max(R_j, 0)`.
pub fn positive_part(residual: &[f64], h: f64) -> f64 {
    residual.iter().map(|r| h * r.max(0.0)).sum()
}

/// `(||u||∞ / (||u||₂^{1/2} ||D+u||₂^{1/2}), ||u||₄ / (||u||₂^{3/4} ||D+u||₂^{1/4}))`.
pub fn gns_ratios(u: &[Complex64], h: f64) -> Result<(f64, f64)> {
    let l2 = discrete_norm(u, h, 2.0);
    let d = dplus_l2(u, h);
    if l2 == 0.0 || d == 0.0 {
        return Err(Error::UndefinedRatio("Gagliardo-Nirenberg ratio of a zero or constant sequence"));
    }
    let r_inf = discrete_norm(u, h, f64::INFINITY) / (l2.sqrt() * d.sqrt());
    let r_4 = discrete_norm(u, h, 4.0) / (l2.powf(0.75) * d.powf(0.25));
    Ok((r_inf, r_4))
}

/// Largest `|u_j|` over the `k_cells` outermost cells on each side; warns
/// above [`BOUNDARY_WARNING`].
pub fn boundary_monitor(state: &State, k_cells: usize) -> Result<f64> {
    let n = state.len();
    if 2 * k_cells >= n {
        return Err(Error::config(
            "boundary_cells",
            format!("{k_cells} cells per side needs more than {} cells", 2 * k_cells),
        ));
    }
    let edge = state.u[..k_cells].iter().chain(&state.u[n - k_cells..]);
    let m = edge.map(|z| z.norm()).fold(0.0, f64::max);
    if m > BOUNDARY_WARNING {
        tracing::warn!(t = state.t, value = m, "solution is not small near the boundary");
    }
    Ok(m)
}

/// One row of per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass_u: f64,
    pub l2_v: f64,
    pub linf_v: f64,
    pub l4_u: f64,
    pub energy: f64,
    pub qtv_increment: f64,
    pub viscosity_increment: f64,
    /// `Σ h max(R_j, 0)` for the step ending at `t` (0 at the first row).
    pub entropy_pos_residual: f64,
    pub boundary_max_u: f64,
    pub dplus_u_l2: f64,
    /// `Σ tau * qtv_increment` over the steps before `t`.
    pub qtv_cum: f64,
    /// `Σ tau * viscosity_increment` over the steps before `t`.
    pub visc_cum: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str =
        "t,mass_u,l2_v,linf_v,l4_u,dplus_u_l2,energy,qtv_cum,visc_cum,entropy_pos,boundary_max_u";

    pub fn csv_row(&self) -> String {
        [
            self.t,
            self.mass_u,
            self.l2_v,
            self.linf_v,
            self.l4_u,
            self.dplus_u_l2,
            self.energy,
            self.qtv_cum,
            self.visc_cum,
            self.entropy_pos_residual,
            self.boundary_max_u,
        ]
        .iter()
        .map(|x| format_number(*x))
        .collect::<Vec<_>>()
        .join(",")
    }

    fn is_finite(&self) -> bool {
        [
            self.t,
            self.mass_u,
            self.l2_v,
            self.linf_v,
            self.l4_u,
            self.energy,
            self.qtv_increment,
            self.viscosity_increment,
            self.entropy_pos_residual,
            self.boundary_max_u,
            self.dplus_u_l2,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Extremes and time integrals gathered over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunSummary {
    pub steps: usize,
    pub t_final: f64,
    pub max_rel_mass_drift: f64,
    pub max_linf_v: f64,
    pub max_boundary_u: f64,
    pub max_dplus_u_l2: f64,
    pub qtv_cum: f64,
    pub visc_cum: f64,
    pub min_visc_increment: f64,
    pub entropy_pos_cum: f64,
}

/// Running accumulator owned by the run loop.
pub struct DiagnosticsTracker {
    spec: Arc<ProblemSpec>,
    flux: Arc<dyn NumericalFlux>,
    entropy: EntropyFluxes,
    h: f64,
    boundary_cells: usize,
    norm0: f64,
    last: Option<DiagnosticsRecord>,
    summary: RunSummary,
}

impl DiagnosticsTracker {
    pub fn new(spec: Arc<ProblemSpec>, flux: Arc<dyn NumericalFlux>, h: f64, n_cells: usize) -> Result<Self> {
        let entropy = EntropyFluxes::for_spec(spec.clone())?;
        let boundary_cells = BOUNDARY_CELLS.min((n_cells.saturating_sub(1)) / 2).max(1);
        Ok(DiagnosticsTracker {
            spec,
            flux,
            entropy,
            h,
            boundary_cells,
            norm0: 0.0,
            last: None,
            summary: RunSummary { min_visc_increment: f64::INFINITY, ..RunSummary::default() },
        })
    }

    fn snapshot(&self, state: &State) -> Result<DiagnosticsRecord> {
        let h = self.h;
        let mass_u = discrete_norm(&state.u, h, 2.0).powi(2);
        let record = DiagnosticsRecord {
            t: state.t,
            mass_u,
            l2_v: discrete_norm(&state.v, h, 2.0),
            linf_v: discrete_norm(&state.v, h, f64::INFINITY),
            l4_u: discrete_norm(&state.u, h, 4.0),
            energy: energy(state, &self.spec, h),
            qtv_increment: qtv_increment(state),
            viscosity_increment: viscosity_sum(state, self.flux.as_ref(), &|_| 1.0, self.spec.alpha)?,
            entropy_pos_residual: 0.0,
            boundary_max_u: boundary_monitor(state, self.boundary_cells)?,
            dplus_u_l2: dplus_l2(&state.u, h),
            qtv_cum: self.summary.qtv_cum,
            visc_cum: self.summary.visc_cum,
        };
        Ok(record)
    }

    fn absorb(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        if !record.is_finite() {
            return Err(Error::NonFinite { what: "diagnostics", index: self.summary.steps });
        }
        let s = &mut self.summary;
        s.t_final = record.t;
        if self.norm0 > 0.0 {
            s.max_rel_mass_drift = s.max_rel_mass_drift.max((record.mass_u.sqrt() - self.norm0).abs() / self.norm0);
        }
        s.max_linf_v = s.max_linf_v.max(record.linf_v);
        s.max_boundary_u = s.max_boundary_u.max(record.boundary_max_u);
        s.max_dplus_u_l2 = s.max_dplus_u_l2.max(record.dplus_u_l2);
        s.min_visc_increment = s.min_visc_increment.min(record.viscosity_increment);
        self.last = Some(*record);
        Ok(())
    }

    /// Record for the initial state.
    pub fn start(&mut self, state: &State) -> Result<DiagnosticsRecord> {
        self.norm0 = discrete_norm(&state.u, self.h, 2.0);
        let record = self.snapshot(state)?;
        self.absorb(&record)?;
        Ok(record)
    }

    /// Record for `next`, after integrating the step `prev -> next` of size `tau`.
    pub fn record_step(&mut self, prev: &State, next: &State, tau: f64) -> Result<DiagnosticsRecord> {
        let last = match self.last {
            Some(r) => r,
            None => self.start(prev)?,
        };
        self.summary.steps += 1;
        self.summary.qtv_cum += tau * last.qtv_increment;
        self.summary.visc_cum += tau * last.viscosity_increment;
        let residual = entropy_residual(prev, next, &self.entropy, self.h, tau);
        let pos = positive_part(&residual, self.h);
        self.summary.entropy_pos_cum += tau * pos;
        let mut record = self.snapshot(next)?;
        record.entropy_pos_residual = pos;
        self.absorb(&record)?;
        Ok(record)
    }

    pub fn summary(&self) -> RunSummary {
        self.summary
    }

    pub fn entropy_fluxes(&self) -> &EntropyFluxes {
        &self.entropy
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxes::LaxFriedrichs;
    use crate::problem::{CutoffCoupling, ScalarFlux};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn spec(flux: ScalarFlux) -> Arc<ProblemSpec> {
        Arc::new(ProblemSpec::new("t", flux, CutoffCoupling::default(), |_| c(0.0), |_| 0.0, 2.0).unwrap())
    }

    #[test]
    fn norm_examples() {
        assert!((discrete_norm(&[2.0, 2.0], 0.5, 2.0) - 2.0).abs() < 1e-15);
        assert_eq!(discrete_norm(&[1.0, -3.0, 2.0], 1.0, f64::INFINITY), 3.0);
        assert!((discrete_norm(&[1.0; 4], 0.25, 4.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn energy_examples() {
        let sp = spec(ScalarFlux::zero());
        let mut s = State::zeros(3);
        s.v = vec![3.0, -1.0, 7.0];
        assert_eq!(energy(&s, &sp, 1.0), 0.0);
        let s = State { t: 0.0, u: vec![c(0.0), c(1.0), c(0.0)], v: vec![0.0; 3] };
        assert!((energy(&s, &sp, 1.0) - 1.25).abs() < 1e-15);

        // plateau g = 55 shifts the energy by 55/2 * ||u||²
        let lifted = State { v: vec![70.0; 3], ..s.clone() };
        let shift = energy(&lifted, &sp, 1.0) - energy(&s, &sp, 1.0);
        assert!((shift - 0.5 * 55.0).abs() < 1e-12);
    }

    #[test]
    fn qtv_examples() {
        let s = State { t: 0.0, u: vec![c(0.0); 3], v: vec![4.0; 3] };
        assert_eq!(qtv_increment(&s), 0.0);
        let s = State { t: 0.0, u: vec![c(0.0); 2], v: vec![0.0, 1.0] };
        assert_eq!(qtv_increment(&s), 1.0);
        let s = State { t: 0.0, u: vec![c(3f64.sqrt()), c(-9.0)], v: vec![0.0, 1.0] };
        assert!((qtv_increment(&s) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn viscosity_sum_examples() {
        let sp = spec(ScalarFlux::linear(1.0));
        let lf = LaxFriedrichs::new(sp.model.clone(), 0.5, 1.0).unwrap();
        let s = State { t: 0.0, u: vec![c(0.0); 2], v: vec![0.0, 1.0] };
        assert!((viscosity_sum(&s, &lf, &|_| 1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let s = State { t: 0.0, u: vec![c(0.4); 4], v: vec![0.3; 4] };
        assert_eq!(viscosity_sum(&s, &lf, &|_| 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn entropy_fluxes_match_closed_forms() {
        // f = 3v²: q1' = 6v², q1 = 2v³
        let sp = spec(ScalarFlux::polynomial(0.0, 3.0, 0.0));
        let ef = EntropyFluxes::for_spec(sp).unwrap();
        for v in [-59.3, -7.0, -0.1234, 0.0, 0.5, 3.3, 44.4, 60.0] {
            let exact = 2.0 * v * v * v;
            assert!((ef.q1(v) - exact).abs() <= 1e-9 * exact.abs().max(1.0), "{v}");
        }
        assert!((ef.q1(70.0) - 2.0 * 70f64.powi(3)).abs() < 1e-6);
        // g linear on [-M1, M1]: q2 vanishes there
        for v in [-50.0, -3.0, 0.0, 12.0, 49.9] {
            assert!(ef.q2(v).abs() < 1e-12);
        }
        // q2' = v g''
        let h = 1e-5;
        for v in [52.0, 55.5, 58.0] {
            let fd = (ef.q2(v + h) - ef.q2(v - h)) / (2.0 * h);
            let d2g = {
                let cut = CutoffCoupling::default();
                use crate::problem::Coupling;
                cut.d2g(v)
            };
            assert!((fd - v * d2g).abs() < 1e-5);
        }
    }

    #[test]
    fn entropy_table_handles_nonpolynomial_flux() {
        let flux = ScalarFlux::new(|v: f64| v.sin() * v, |v: f64| v.cos() * v + v.sin());
        let sp = spec(flux);
        let ef = EntropyFluxes::new(sp, 10.0).unwrap();
        for v in [-9.87, -1.0, 0.3, 6.2] {
            let direct = integrate(|s| s * (s.cos() * s + s.sin()), 0.0, v).unwrap();
            assert!((ef.q1(v) - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_residual_of_constant_state_vanishes() {
        let sp = spec(ScalarFlux::polynomial(0.0, 3.0, 0.0));
        let ef = EntropyFluxes::for_spec(sp).unwrap();
        let s = State { t: 0.0, u: vec![c(0.0); 6], v: vec![1.5; 6] };
        let r = entropy_residual(&s, &s, &ef, 0.1, 0.01);
        assert!(r.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn gns_examples() {
        let u = [c(0.0), c(1.0), c(0.0)];
        let (r_inf, _) = gns_ratios(&u, 1.0).unwrap();
        assert!((r_inf - 2f64.powf(-0.25)).abs() < 1e-15);
        let xs: Vec<f64> = (0..40).map(|j| -4.0 + 0.2 * j as f64).collect();
        let u: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(1.0 / x.cosh(), 0.3 * x.sin())).collect();
        let (a, b) = gns_ratios(&u, 0.2).unwrap();
        let scaled: Vec<Complex64> = u.iter().map(|z| z * Complex64::new(-3.0, 1.5)).collect();
        let (a2, b2) = gns_ratios(&scaled, 0.2).unwrap();
        assert!((a - a2).abs() < 1e-12 && (b - b2).abs() < 1e-12);
        assert!(matches!(gns_ratios(&[c(0.0); 4], 1.0), Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn boundary_monitor_examples() {
        let mut s = State::zeros(40);
        s.u[20] = c(1.0);
        assert_eq!(boundary_monitor(&s, 5).unwrap(), 0.0);
        s.u[38] = c(-0.25);
        assert_eq!(boundary_monitor(&s, 5).unwrap(), 0.25);
        assert!(boundary_monitor(&s, 20).is_err());
    }

    #[test]
    fn csv_row_matches_header_width() {
        let r = DiagnosticsRecord {
            t: 0.1,
            mass_u: 1.0,
            l2_v: 2.0,
            linf_v: 3.0,
            l4_u: 4.0,
            energy: 5.0,
            qtv_increment: 6.0,
            viscosity_increment: 7.0,
            entropy_pos_residual: 8.0,
            boundary_max_u: 9.0,
            dplus_u_l2: 10.0,
            qtv_cum: 11.0,
            visc_cum: 12.0,
        };
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), DiagnosticsRecord::CSV_HEADER.split(',').count());
        assert!(row.starts_with("1.0000000000000001e-1,"));
        let back: f64 = row.split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, 0.1);
    }
}
