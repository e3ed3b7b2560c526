use crate::error::{Error, Result};
use crate::problem::{sup_abs_on, Model};

use super::NumericalFlux;

/// Lax-Friedrichs flux family with viscosity parameters `lambda` (for `f`) and
/// `gamma` (for the coupling term).
#[derive(Clone, Debug)]
pub struct LaxFriedrichs {
    model: Model,
    lambda: f64,
    gamma: f64,
}

impl LaxFriedrichs {
    pub const SAFETY: f64 = 0.9;

    pub fn new(model: Model, lambda: f64, gamma: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::config("lambda_lf", format!("must be > 0, got {lambda}")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::config("gamma_lf", format!("must be > 0, got {gamma}")));
        }
        Ok(LaxFriedrichs { model, lambda, gamma })
    }

    /// Parameters that keep the family monotone on `[-m, m] × [0, a_max]`:
    /// `lambda = 0.9 / sup|f'|`, `gamma = 0.9 / max(1, a_max sup|g''|)`.
    pub fn auto_parameters(model: &Model, m: f64, a_max: f64) -> (f64, f64) {
        let sup_df = model.flux.sup_abs_derivative(m);
        let sup_d2g = sup_abs_on(|v| model.coupling.d2g(v), m);
        let lambda = if sup_df > 0.0 { Self::SAFETY / sup_df } else { Self::SAFETY };
        let gamma = Self::SAFETY / (a_max * sup_d2g).max(1.0);
        (lambda, gamma)
    }

    pub fn auto(model: Model, m: f64, a_max: f64) -> Self {
        let (lambda, gamma) = Self::auto_parameters(&model, m, a_max);
        LaxFriedrichs { model, lambda, gamma }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl NumericalFlux for LaxFriedrichs {
    fn name(&self) -> &'static str {
        "lax_friedrichs"
    }

    fn model(&self) -> &Model {
        &self.model
    }

    #[inline]
    fn f_plus(&self, v1: f64, v2: f64) -> f64 {
        0.5 * (self.model.f(v1) + self.model.f(v2)) - (v2 - v1) / (2.0 * self.lambda)
    }

    #[inline]
    fn g_bar_plus(&self, v1: f64, v2: f64) -> f64 {
        -0.5 * (self.model.dg(v1) + self.model.dg(v2)) - (v2 - v1) / (2.0 * self.gamma)
    }

    #[inline]
    fn g_plus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> f64 {
        -0.5 * (self.model.dg(v1) * a1 + self.model.dg(v2) * a2)
            - (v2 - v1) * (a1 + a2) / (4.0 * self.gamma)
    }

    fn lipschitz_bound(&self, m: f64) -> f64 {
        let lf = 0.5 * self.model.flux.sup_abs_derivative(m) + 0.5 / self.lambda;
        let lg = 0.5 * sup_abs_on(|v| self.model.coupling.d2g(v), m) + 0.5 / self.gamma;
        lf.max(lg)
    }
}
