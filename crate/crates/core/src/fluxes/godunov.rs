use crate::error::{Error, Result};
use crate::problem::{sup_abs_on, Model};

use super::NumericalFlux;

pub const GODUNOV_SAMPLES: usize = 64;
pub const GODUNOV_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Godunov value of `phi` between states `v1` and `v2`: the minimum of `phi`
/// over `[v1, v2]` when `v1 <= v2`, the maximum over `[v2, v1]` otherwise.
///
/// The interval is scanned at 64 uniform samples and the best bracket is
/// refined by golden-section search to an absolute width of 1e-12.
pub fn godunov_extremum(phi: impl Fn(f64) -> f64, v1: f64, v2: f64) -> Result<f64> {
    if v1 == v2 {
        let y = phi(v1);
        return if y.is_finite() { Ok(y) } else { Err(Error::FluxEvaluation { s: v1 }) };
    }
    // Minimise psi = sign * phi.
    let (lo, hi, sign) = if v1 < v2 { (v1, v2, 1.0) } else { (v2, v1, -1.0) };
    let psi = |s: f64| -> Result<f64> {
        let y = phi(s);
        if y.is_finite() {
            Ok(sign * y)
        } else {
            Err(Error::FluxEvaluation { s })
        }
    };

    let step = (hi - lo) / (GODUNOV_SAMPLES - 1) as f64;
    let mut best_k = 0;
    let mut best = f64::INFINITY;
    for k in 0..GODUNOV_SAMPLES {
        let s = if k == GODUNOV_SAMPLES - 1 { hi } else { lo + k as f64 * step };
        let y = psi(s)?;
        if y < best {
            best = y;
            best_k = k;
        }
    }

    let mut a = if best_k == 0 { lo } else { lo + (best_k - 1) as f64 * step };
    let mut b = if best_k + 1 >= GODUNOV_SAMPLES { hi } else { lo + (best_k + 1) as f64 * step };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = psi(c)?;
    let mut fd = psi(d)?;
    while b - a > GODUNOV_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = psi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = psi(d)?;
        }
    }
    let refined = psi(0.5 * (a + b))?.min(fc).min(fd);
    Ok(sign * best.min(refined))
}

/// Godunov flux family. `H_+` is defined directly by the extremum of
/// `f(s) - g'(s) (a1 + a2) / 2`; `f_+` and `Ḡ_+` are the Godunov fluxes of
/// `f` and `-g'`, and `G_+ := H_+ - f_+`.
#[derive(Clone, Debug)]
pub struct Godunov {
    model: Model,
}

impl Godunov {
    pub fn new(model: Model) -> Self {
        Godunov { model }
    }

    pub fn try_h_plus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> Result<f64> {
        let abar = 0.5 * (a1 + a2);
        godunov_extremum(|s| self.model.f(s) - self.model.dg(s) * abar, v1, v2)
    }
}

impl NumericalFlux for Godunov {
    fn name(&self) -> &'static str {
        "godunov"
    }

    fn model(&self) -> &Model {
        &self.model
    }

    fn f_plus(&self, v1: f64, v2: f64) -> f64 {
        godunov_extremum(|s| self.model.f(s), v1, v2).unwrap_or(f64::NAN)
    }

    fn g_bar_plus(&self, v1: f64, v2: f64) -> f64 {
        godunov_extremum(|s| -self.model.dg(s), v1, v2).unwrap_or(f64::NAN)
    }

    fn g_plus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> f64 {
        self.h_plus(v1, v2, a1, a2) - self.f_plus(v1, v2)
    }

    fn h_plus(&self, v1: f64, v2: f64, a1: f64, a2: f64) -> f64 {
        self.try_h_plus(v1, v2, a1, a2).unwrap_or(f64::NAN)
    }

    fn lipschitz_bound(&self, m: f64) -> f64 {
        let lf = self.model.flux.sup_abs_derivative(m);
        let lg = sup_abs_on(|v| self.model.coupling.d2g(v), m);
        lf.max(lg)
    }

    fn splits_coupling_flux(&self) -> bool {
        false
    }
}
