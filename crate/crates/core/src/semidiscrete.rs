//! Spatial difference operators and the semi-discrete (method-of-lines)
//! system, with a classical RK4 integrator used as a reference.

use std::ops::{Add, Mul, Sub};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fluxes::CombinedFlux;
use crate::grid::Grid;
use crate::problem::ProblemSpec;
use crate::state::{boundary, State};

/// `(u_{j+1} - 2 u_j + u_{j-1}) / h^2`, with the given left/right ghost values.
pub fn discrete_laplacian<T>(u: &[T], ghosts: (T, T), h: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = u.len();
    let inv_h2 = 1.0 / (h * h);
    (0..n)
        .map(|j| {
            let left = if j == 0 { ghosts.0 } else { u[j - 1] };
            let right = if j + 1 == n { ghosts.1 } else { u[j + 1] };
            (right - u[j] - u[j] + left) * inv_h2
        })
        .collect()
}

/// `(u_{j+1} - u_j) / h`; the last entry uses `right_ghost`.
pub fn forward_difference<T>(u: &[T], right_ghost: T, h: f64) -> Vec<T>
where
    T: Copy + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = u.len();
    let inv_h = 1.0 / h;
    (0..n)
        .map(|j| {
            let next = if j + 1 == n { right_ghost } else { u[j + 1] };
            (next - u[j]) * inv_h
        })
        .collect()
}

/// Right-hand side of the semi-discrete system on a bounded mesh.
pub struct SemiDiscreteRhs {
    grid: Grid,
    spec: Arc<ProblemSpec>,
    flux: CombinedFlux,
    certified_range: Option<f64>,
    warned: AtomicBool,
}

impl SemiDiscreteRhs {
    pub fn new(grid: Grid, spec: Arc<ProblemSpec>, flux: CombinedFlux) -> Self {
        SemiDiscreteRhs {
            grid,
            spec,
            flux,
            certified_range: None,
            warned: AtomicBool::new(false),
        }
    }

    /// Range `[-m, m]` on which the flux has been certified; leaving it emits
    /// one warning.
    pub fn with_certified_range(mut self, m: f64) -> Self {
        self.certified_range = Some(m);
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn flux(&self) -> &CombinedFlux {
        &self.flux
    }

    /// Explicit step restriction `tau <= h^2 / 4`.
    pub fn max_step(&self) -> f64 {
        0.25 * self.grid.h() * self.grid.h()
    }

    /// `du/dt = -i (-D²u + cubic |u|² u + alpha g(v) u)`.
    pub fn rhs_schrodinger(&self, state: &State) -> Result<Vec<Complex64>> {
        let zero = Complex64::new(0.0, 0.0);
        let lap = discrete_laplacian(&state.u, (zero, zero), self.grid.h());
        let minus_i = Complex64::new(0.0, -1.0);
        let out: Vec<Complex64> = lap
            .iter()
            .zip(&state.u)
            .zip(&state.v)
            .map(|((&d2u, &u), &v)| {
                let potential = self.spec.cubic * u.norm_sqr() + self.spec.alpha * self.spec.g(v);
                minus_i * (u * potential - d2u)
            })
            .collect();
        if let Some(index) = out.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { what: "du/dt", index });
        }
        Ok(out)
    }

    /// Interface fluxes `F_{j-1/2}` for `j = 0..=N` (one evaluation per
    /// interface, ghost cells included), with intensities `alpha |u|^2`.
    pub fn interface_fluxes(&self, state: &State) -> Result<Vec<f64>> {
        let n = state.len() as isize;
        let a: Vec<f64> = state.u.iter().map(|z| self.spec.alpha * z.norm_sqr()).collect();
        if let Some(m) = self.certified_range {
            let vmax = state.v.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if vmax > m && !self.warned.swap(true, Ordering::Relaxed) {
                tracing::warn!(vmax, range = m, "v left the certified flux range");
            }
        }
        (-1..n)
            .map(|j| {
                let value = self.flux.h_plus(
                    boundary::v_at(&state.v, j),
                    boundary::v_at(&state.v, j + 1),
                    boundary::a_at(&a, j),
                    boundary::a_at(&a, j + 1),
                );
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::NonFinite { what: "interface flux", index: (j + 1) as usize })
                }
            })
            .collect()
    }

    /// `dv/dt = -(F_{j+1/2} - F_{j-1/2}) / h`.
    pub fn rhs_conservation(&self, state: &State) -> Result<Vec<f64>> {
        let fluxes = self.interface_fluxes(state)?;
        let inv_h = 1.0 / self.grid.h();
        Ok(fluxes.windows(2).map(|w| -(w[1] - w[0]) * inv_h).collect())
    }

    fn rhs(&self, state: &State) -> Result<(Vec<Complex64>, Vec<f64>)> {
        Ok((self.rhs_schrodinger(state)?, self.rhs_conservation(state)?))
    }

    /// One classical RK4 step of the joint system.
    pub fn rk4_step(&self, state: &State, tau: f64) -> Result<State> {
        let bound = self.max_step();
        if !(tau > 0.0 && tau <= bound * (1.0 + 1e-12)) {
            return Err(Error::StepRejected { tau, bound });
        }
        let stage = |k: &(Vec<Complex64>, Vec<f64>), c: f64| -> State {
            State {
                t: state.t + c,
                u: state.u.iter().zip(&k.0).map(|(&u, &du)| u + du * c).collect(),
                v: state.v.iter().zip(&k.1).map(|(&v, &dv)| v + dv * c).collect(),
            }
        };
        let k1 = self.rhs(state)?;
        let k2 = self.rhs(&stage(&k1, 0.5 * tau))?;
        let k3 = self.rhs(&stage(&k2, 0.5 * tau))?;
        let k4 = self.rhs(&stage(&k3, tau))?;
        let w = tau / 6.0;
        let u = (0..state.len())
            .map(|j| state.u[j] + (k1.0[j] + (k2.0[j] + k3.0[j]) * 2.0 + k4.0[j]) * w)
            .collect();
        let v = (0..state.len())
            .map(|j| state.v[j] + (k1.1[j] + 2.0 * (k2.1[j] + k3.1[j]) + k4.1[j]) * w)
            .collect();
        let next = State { t: state.t + tau, u, v };
        next.check_finite()?;
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxes::{Godunov, LaxFriedrichs, NumericalFlux};
    use crate::problem::{CutoffCoupling, ScalarFlux};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn spec(flux: ScalarFlux) -> Arc<ProblemSpec> {
        Arc::new(
            ProblemSpec::new("t", flux, CutoffCoupling::default(), |_| c(0.0), |_| 0.0, 2.0)
                .unwrap(),
        )
    }

    fn lf_rhs(grid: Grid, spec: Arc<ProblemSpec>, lambda: f64) -> SemiDiscreteRhs {
        let lf = LaxFriedrichs::new(spec.model.clone(), lambda, 0.9).unwrap();
        SemiDiscreteRhs::new(grid, spec, CombinedFlux::new(Arc::new(lf)))
    }

    #[test]
    fn laplacian_examples() {
        let z = c(0.0);
        assert!(discrete_laplacian(&[c(2.0); 5], (c(2.0), c(2.0)), 0.3).iter().all(|x| x.norm() < 1e-12));
        assert_eq!(discrete_laplacian(&[z, c(1.0), z], (z, z), 1.0)[1], c(-2.0));
        let h = 0.37;
        let xs: Vec<f64> = (0..8).map(|j| 1.0 + j as f64 * h).collect();
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let lap = discrete_laplacian(&sq, (0.0, 0.0), h);
        for v in &lap[1..7] {
            assert!((v - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_difference_examples() {
        assert!(forward_difference(&[3.0; 4], 3.0, 0.1).iter().all(|&d| d == 0.0));
        let h = 0.25;
        let xs: Vec<f64> = (0..6).map(|j| j as f64 * h).collect();
        let d = forward_difference(&xs, 6.0 * h, h);
        assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert_eq!(forward_difference(&[0.0, 2.0], 2.0, 0.5)[0], 4.0);
    }

    #[test]
    fn schrodinger_rhs_examples() {
        let grid = Grid::new(0.0, 5.0, 5).unwrap();
        let rhs = lf_rhs(grid, spec(ScalarFlux::zero()), 1.0);
        assert!(rhs.rhs_schrodinger(&State::zeros(5)).unwrap().iter().all(|z| z.norm() == 0.0));

        let mut s = State::zeros(5);
        s.u[2] = c(1.0);
        let du = rhs.rhs_schrodinger(&s).unwrap();
        assert_eq!(du[2], Complex64::new(0.0, -3.0));

        // plateau value g(v) = 0.75 adds -i * 0.75 * u
        let mut s2 = s.clone();
        s2.v = vec![0.75; 5];
        let du2 = rhs.rhs_schrodinger(&s2).unwrap();
        assert!((du2[2] - du[2] - Complex64::new(0.0, -0.75)).norm() < 1e-15);
    }

    #[test]
    fn conservation_rhs_of_constant_state_vanishes() {
        let grid = Grid::new(0.0, 1.0, 10).unwrap();
        let sp = spec(ScalarFlux::polynomial(0.0, 3.0, 0.0));
        let s = State { t: 0.0, u: vec![Complex64::new(0.6, -0.8); 10], v: vec![0.7; 10] };
        for rhs in [
            lf_rhs(grid, sp.clone(), 0.1),
            SemiDiscreteRhs::new(grid, sp.clone(), CombinedFlux::new(Arc::new(Godunov::new(sp.model.clone())))),
        ] {
            // Dirichlet ghosts for u break constancy at the two end cells only.
            let dv = rhs.rhs_conservation(&s).unwrap();
            assert!(dv[1..9].iter().all(|x| x.abs() < 1e-13), "{}", rhs.flux().base().name());
        }
    }

    #[test]
    fn linear_flux_reduces_to_central_difference_plus_diffusion() {
        let grid = Grid::new(0.0, 1.0, 8).unwrap();
        let lambda = 0.4;
        let rhs = lf_rhs(grid, spec(ScalarFlux::linear(1.0)), lambda);
        let v: Vec<f64> = (0..8).map(|j| ((j * j) as f64 * 0.3).sin()).collect();
        let s = State { t: 0.0, u: vec![c(0.0); 8], v: v.clone() };
        let dv = rhs.rhs_conservation(&s).unwrap();
        let h = grid.h();
        for j in 1..7 {
            let expect = -(v[j + 1] - v[j - 1]) / (2.0 * h)
                + (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (2.0 * lambda * h);
            assert!((dv[j] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn conservation_telescopes_to_boundary_fluxes() {
        let grid = Grid::new(-1.0, 1.0, 12).unwrap();
        let rhs = lf_rhs(grid, spec(ScalarFlux::polynomial(0.0, 3.0, 0.0)), 0.05);
        let s = State {
            t: 0.0,
            u: (0..12).map(|j| Complex64::new((j as f64).cos(), 0.3)).collect(),
            v: (0..12).map(|j| 0.1 * j as f64 - 0.4).collect(),
        };
        let dv = rhs.rhs_conservation(&s).unwrap();
        let fl = rhs.interface_fluxes(&s).unwrap();
        let total: f64 = dv.iter().map(|x| x * grid.h()).sum();
        assert!((total - (fl[0] - fl[12])).abs() < 1e-12);
    }

    #[test]
    fn semidiscrete_mass_identity() {
        let grid = Grid::new(-10.0, 10.0, 80).unwrap();
        let rhs = lf_rhs(grid, spec(ScalarFlux::polynomial(0.0, 3.0, 0.0)), 0.1);
        let xs = grid.centers();
        let s = State {
            t: 0.0,
            u: xs.iter().map(|&x| Complex64::from_polar(2.0 / x.cosh(), 1.5 * x)).collect(),
            v: xs.iter().map(|&x| (-x * x).exp()).collect(),
        };
        let du = rhs.rhs_schrodinger(&s).unwrap();
        let ip: f64 = s.u.iter().zip(&du).map(|(u, d)| (u.conj() * d).re * grid.h()).sum();
        let scale: f64 = du.iter().zip(&s.u).map(|(d, u)| d.norm() * u.norm() * grid.h()).sum();
        assert!(ip.abs() <= 1e-12 * scale, "{ip} vs {scale}");
    }

    #[test]
    fn rk4_guards_step_and_keeps_zero() {
        let grid = Grid::new(0.0, 1.0, 10).unwrap();
        let rhs = lf_rhs(grid, spec(ScalarFlux::linear(1.0)), 0.9);
        assert!(matches!(rhs.rk4_step(&State::zeros(10), 1.0), Err(Error::StepRejected { .. })));
        let s = rhs.rk4_step(&State::zeros(10), 0.002).unwrap();
        assert_eq!(s.u, State::zeros(10).u);
        assert_eq!(s.v, State::zeros(10).v);
        assert!((s.t - 0.002).abs() < 1e-18);
    }

    #[test]
    fn flux_names() {
        let sp = spec(ScalarFlux::zero());
        assert_eq!(Godunov::new(sp.model.clone()).name(), "godunov");
    }
}
