//! Monotone numerical fluxes for the long-wave conservation law.
//!
//! Only the `+` fluxes are implemented. The `-` fluxes are derived from them
//! through the conservation identity `F_-(v1, v2) = -F_+(v2, v1)`, so an
//! interface flux computed from the left cell is by construction the one used
//! from the right cell.

mod certify;
mod godunov;
mod lax_friedrichs;

use std::sync::Arc;

pub use certify::{certify_flux, AxiomCheck, CertificationReport, CONSISTENCY_TOL, INEQUALITY_SLACK};
pub use godunov::{godunov_extremum, Godunov, GODUNOV_SAMPLES, GODUNOV_TOL};
pub use lax_friedrichs::LaxFriedrichs;

use crate::error::Result;
use crate::problem::Model;
use crate::quadrature::integrate;

/// A conservative, consistent, monotone flux family `(f_+, Ḡ_+, G_+)`.
pub trait NumericalFlux: Send + Sync {
    fn name(&self) -> &'static str;

    fn model(&self) -> &Model;

    /// Flux consistent with `f`.
    fn f_plus(&self, v1: f64, v2: f64) -> f64;

    /// Flux consistent with `-g'`.
    fn g_bar_plus(&self, v1: f64, v2: f64) -> f64;

    /// Flux consistent with `-g'(v) (a1 + a2) / 2`.
    fn g_plus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> f64;

    /// Combined flux consistent with `f(v) - g'(v) a`.
    fn h_plus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> f64 {
        self.f_plus(v1, v2) + self.g_plus(v1, v2, a1, a2)
    }

    /// Upper bound on the partial derivatives of `f_+` and `Ḡ_+` for
    /// arguments in `[-m, m]`.
    fn lipschitz_bound(&self, m: f64) -> f64;

    /// Whether `G_+` is itself monotone with `G_+(v1, v2, a, a) = a Ḡ_+(v1, v2)`.
    /// Fluxes that only define the combined `H_+` return false.
    fn splits_coupling_flux(&self) -> bool {
        true
    }

    fn f_minus(&self, v1: f64, v2: f64) -> f64 {
        -self.f_plus(v2, v1)
    }

    fn g_bar_minus(&self, v1: f64, v2: f64) -> f64 {
        -self.g_bar_plus(v2, v1)
    }

    fn g_minus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> f64 {
        -self.g_plus(v2, v1, a2, a1)
    }

    fn h_minus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> f64 {
        -self.h_plus(v2, v1, a2, a1)
    }
}

/// `H_± = f_± + G_±` on top of a base flux family.
#[derive(Clone)]
pub struct CombinedFlux {
    base: Arc<dyn NumericalFlux>,
}

impl CombinedFlux {
    pub fn new(base: Arc<dyn NumericalFlux>) -> Self {
        CombinedFlux { base }
    }

    pub fn base(&self) -> &dyn NumericalFlux {
        self.base.as_ref()
    }

    pub fn shared(&self) -> Arc<dyn NumericalFlux> {
        Arc::clone(&self.base)
    }

    #[inline]
    pub fn h_plus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> f64 {
        self.base.h_plus(v1, v2, a1, a2)
    }

    #[inline]
    pub fn h_minus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> f64 {
        self.base.h_minus(v1, v2, a1, a2)
    }
}

/// Scheme viscosity `∫_{v1}^{v2} η''(v) (f(v) - flux_value) dv`.
///
/// Returned as computed, without clamping; it is non-negative for monotone
/// consistent fluxes. The integral is split at the origin, where weights such
/// as `2|v| + 1` have a kink.
pub fn viscosity(
    v1: f64,
    v2: f64,
    eta_dd: impl Fn(f64) -> f64,
    flux_value: f64,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    if v1 == v2 {
        return Ok(0.0);
    }
    let integrand = |v: f64| eta_dd(v) * (f(v) - flux_value);
    if v1.min(v2) < 0.0 && v1.max(v2) > 0.0 {
        Ok(integrate(integrand, v1, 0.0)? + integrate(integrand, 0.0, v2)?)
    } else {
        integrate(integrand, v1, v2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{CutoffCoupling, FnCoupling, Model, ScalarFlux};

    #[test]
    fn viscosity_examples() {
        assert_eq!(viscosity(0.3, 0.3, |_| 1.0, 5.0, |v| v).unwrap(), 0.0);

        let model = Model::new(ScalarFlux::linear(1.0), CutoffCoupling::default());
        let lf = LaxFriedrichs::new(model, 0.5, 1.0).unwrap();
        let fp = lf.f_plus(0.0, 1.0);
        assert!((fp + 0.5).abs() < 1e-15);
        let visc = viscosity(0.0, 1.0, |_| 1.0, fp, |v| v).unwrap();
        assert!((visc - 1.0).abs() < 1e-12);

        let burgers = Model::new(ScalarFlux::polynomial(0.0, 0.5, 0.0), FnCoupling::none());
        let god = Godunov::new(burgers);
        let fp = god.f_plus(-1.0, 1.0);
        assert!(fp.abs() < 1e-12);
        let visc = viscosity(-1.0, 1.0, |_| 1.0, fp, |v| 0.5 * v * v).unwrap();
        assert!((visc - 1.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn viscosity_with_kinked_weight_across_zero() {
        let left = |v: f64| -2.0 * v.powi(3) / 3.0 + 0.8 * v * v - 0.3 * v;
        let right = |v: f64| 2.0 * v.powi(3) / 3.0 + 0.2 * v * v - 0.3 * v;
        let exact = -left(-1.7) + right(1.9);
        let visc = viscosity(-1.7, 1.9, |v| 2.0 * v.abs() + 1.0, 0.3, |v| v).unwrap();
        assert!((visc - exact).abs() < 1e-11, "{visc} vs {exact}");
    }

    #[test]
    fn minus_fluxes_follow_conservation() {
        let model = Model::new(ScalarFlux::polynomial(0.0, 3.0, 0.0), CutoffCoupling::default());
        let lf = LaxFriedrichs::new(model.clone(), 0.05, 0.7).unwrap();
        let god = Godunov::new(model);
        let fluxes: [&dyn NumericalFlux; 2] = [&lf, &god];
        for flux in fluxes {
            let (v1, v2, a1, a2) = (0.4, -1.3, 2.0, 0.5);
            assert_eq!(flux.f_minus(v2, v1), -flux.f_plus(v1, v2));
            assert_eq!(flux.h_minus(v2, v1, a2, a1), -flux.h_plus(v1, v2, a1, a2));
            assert_eq!(flux.g_minus(v2, v1, a2, a1), -flux.g_plus(v1, v2, a1, a2));
            assert_eq!(flux.g_bar_minus(v2, v1), -flux.g_bar_plus(v1, v2));
            assert_eq!(flux.f_minus(0.7, 0.7), -flux.model().f(0.7));
        }
    }
}
