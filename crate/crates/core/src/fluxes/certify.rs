//! Randomised certification of the numerical-flux axioms.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{viscosity, NumericalFlux};
use crate::quadrature::integrate;

pub const CONSISTENCY_TOL: f64 = 1e-12;
pub const INEQUALITY_SLACK: f64 = 1e-10;

/// Outcome of one axiom check. `worst_slack` is the smallest margin observed
/// in the inequality `margin >= 0` (for identities, minus the largest
/// deviation); the check passes when `worst_slack >= -tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub axiom: String,
    pub samples: usize,
    pub worst_slack: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub flux: String,
    pub range: f64,
    pub a_max: f64,
    pub lipschitz: f64,
    pub checks: Vec<AxiomCheck>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    /// Checks whose name starts with `prefix`.
    pub fn group<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a AxiomCheck> + 'a {
        self.checks.iter().filter(move |c| c.axiom.starts_with(prefix))
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# flux = {}, range = [-{}, {}], intensity = [0, {}], L = {:.6e}",
            self.flux, self.range, self.range, self.a_max, self.lipschitz
        )?;
        writeln!(f, "{:<44} {:>8} {:>16} {:>6}", "axiom", "samples", "worst_slack", "result")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<44} {:>8} {:>16.6e} {:>6}",
                c.axiom,
                c.samples,
                c.worst_slack,
                if c.passed { "pass" } else { "FAIL" }
            )?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

struct Tracker {
    axiom: &'static str,
    tolerance: f64,
    samples: usize,
    worst: f64,
}

impl Tracker {
    fn new(axiom: &'static str, tolerance: f64) -> Self {
        Tracker { axiom, tolerance, samples: 0, worst: f64::INFINITY }
    }

    /// Records a margin; NaN counts as a failure.
    fn margin(&mut self, m: f64) {
        self.samples += 1;
        let m = if m.is_nan() { f64::NEG_INFINITY } else { m };
        self.worst = self.worst.min(m);
    }

    fn deviation(&mut self, d: f64) {
        self.margin(-d.abs());
    }

    fn finish(self) -> AxiomCheck {
        let worst = if self.samples == 0 { 0.0 } else { self.worst };
        AxiomCheck {
            axiom: self.axiom.to_string(),
            samples: self.samples,
            worst_slack: worst,
            tolerance: self.tolerance,
            passed: worst >= -self.tolerance,
        }
    }
}

/// Draws `(lo, hi)` with `lo < hi` from `[-m, m]`, separated by at least
/// `1e-6 m` so divided differences stay meaningful.
fn ordered_pair(rng: &mut ChaCha8Rng, m: f64) -> (f64, f64) {
    loop {
        let a = rng.gen_range(-m..=m);
        let b = rng.gen_range(-m..=m);
        if (a - b).abs() > 1e-6 * m {
            return if a < b { (a, b) } else { (b, a) };
        }
    }
}

/// Checks consistency, conservation, monotonicity, non-negative viscosity and
/// the quadratic (EGH) bounds of `flux` on `[-m, m] × [0, a_max]`.
///
/// Deterministic for a given `seed`. Failures are reported, never raised.
pub fn certify_flux(
    flux: &dyn NumericalFlux,
    m: f64,
    a_max: f64,
    n_samples: usize,
    seed: u64,
) -> CertificationReport {
    let n_samples = n_samples.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = flux.model().clone();
    let f = |v: f64| model.f(v);
    let dg = |v: f64| model.dg(v);
    let lipschitz = flux.lipschitz_bound(m);
    let splits = flux.splits_coupling_flux();

    let mut cons_f = Tracker::new("consistency f_+(v,v) = f(v)", CONSISTENCY_TOL);
    let mut cons_gbar = Tracker::new("consistency Gbar_+(v,v) = -g'(v)", CONSISTENCY_TOL);
    let mut cons_g = Tracker::new("consistency G_+(v,v,a1,a2) = -g'(v)(a1+a2)/2", CONSISTENCY_TOL);
    let mut cons_ga = Tracker::new("consistency G_+(v1,v2,a,a) = a Gbar_+", CONSISTENCY_TOL);
    let mut cons_h = Tracker::new("consistency H_+(v,v,a,a) = f(v) - g'(v)a", CONSISTENCY_TOL);
    let mut conservation = Tracker::new("conservation F_-(v2,v1) = -F_+(v1,v2)", 0.0);
    let mut mono_f = Tracker::new("monotonicity f_+", INEQUALITY_SLACK);
    let mut mono_gbar = Tracker::new("monotonicity Gbar_+", INEQUALITY_SLACK);
    let mut mono_g = Tracker::new("monotonicity G_+", INEQUALITY_SLACK);
    let mut mono_h = Tracker::new("monotonicity H_+", INEQUALITY_SLACK);
    let mut visc_f = Tracker::new("viscosity f (eta''=1, 2|v|+1) >= 0", INEQUALITY_SLACK);
    let mut visc_g = Tracker::new("viscosity Gbar (eta''=1, 2|v|+1) >= 0", INEQUALITY_SLACK);
    let mut egh = Tracker::new("EGH (f(p) - f_+)^2 <= 2L int(f - f_+)", INEQUALITY_SLACK);
    let mut egh1 = Tracker::new("EGH-1 (f(q) - f_+)^2 <= 2L int(f - f_+)", INEQUALITY_SLACK);
    let mut egh_g = Tracker::new("EGH-G (-g'(xi) - Gbar_+)^2 <= 2L int", INEQUALITY_SLACK);

    let etas: [fn(f64) -> f64; 2] = [|_| 1.0, |v| 2.0 * v.abs() + 1.0];

    for _ in 0..n_samples {
        let v = rng.gen_range(-m..=m);
        let a1 = rng.gen_range(0.0..=a_max);
        let a2 = rng.gen_range(0.0..=a_max);
        cons_f.deviation(flux.f_plus(v, v) - f(v));
        cons_gbar.deviation(flux.g_bar_plus(v, v) + dg(v));
        cons_g.deviation(flux.g_plus(v, v, a1, a2) + dg(v) * 0.5 * (a1 + a2));
        cons_h.deviation(flux.h_plus(v, v, a1, a1) - (f(v) - dg(v) * a1));

        let (p, q) = (rng.gen_range(-m..=m), rng.gen_range(-m..=m));
        if splits {
            cons_ga.deviation(flux.g_plus(p, q, a1, a1) - a1 * flux.g_bar_plus(p, q));
        }
        conservation.deviation(flux.f_minus(q, p) + flux.f_plus(p, q));
        conservation.deviation(flux.h_minus(q, p, a2, a1) + flux.h_plus(p, q, a1, a2));

        // Monotonicity: nondecreasing in the left state, nonincreasing in the right.
        let (lo, hi) = ordered_pair(&mut rng, m);
        let w = rng.gen_range(-m..=m);
        let dv = hi - lo;
        mono_f.margin((flux.f_plus(hi, w) - flux.f_plus(lo, w)) / dv);
        mono_f.margin((flux.f_plus(w, lo) - flux.f_plus(w, hi)) / dv);
        mono_gbar.margin((flux.g_bar_plus(hi, w) - flux.g_bar_plus(lo, w)) / dv);
        mono_gbar.margin((flux.g_bar_plus(w, lo) - flux.g_bar_plus(w, hi)) / dv);
        if splits {
            mono_g.margin((flux.g_plus(hi, w, a1, a2) - flux.g_plus(lo, w, a1, a2)) / dv);
            mono_g.margin((flux.g_plus(w, lo, a1, a2) - flux.g_plus(w, hi, a1, a2)) / dv);
        }
        mono_h.margin((flux.h_plus(hi, w, a1, a2) - flux.h_plus(lo, w, a1, a2)) / dv);
        mono_h.margin((flux.h_plus(w, lo, a1, a2) - flux.h_plus(w, hi, a1, a2)) / dv);

        // Viscosity and quadratic bounds on the pair (p, q).
        let fp = flux.f_plus(p, q);
        let gp = flux.g_bar_plus(p, q);
        for eta in etas {
            visc_f.margin(viscosity(p, q, eta, fp, f).unwrap_or(f64::NAN));
            visc_g.margin(viscosity(p, q, eta, gp, |s| -dg(s)).unwrap_or(f64::NAN));
        }
        let int_f = integrate(|s| f(s) - fp, p, q).unwrap_or(f64::NAN);
        let int_g = integrate(|s| -dg(s) - gp, p, q).unwrap_or(f64::NAN);
        egh.margin(2.0 * lipschitz * int_f - (f(p) - fp).powi(2));
        egh1.margin(2.0 * lipschitz * int_f - (f(q) - fp).powi(2));
        for xi in [p, q] {
            egh_g.margin(2.0 * lipschitz * int_g - (-dg(xi) - gp).powi(2));
        }
    }

    let mut checks = vec![cons_f.finish(), cons_gbar.finish(), cons_g.finish()];
    if splits {
        checks.push(cons_ga.finish());
    }
    checks.extend([cons_h.finish(), conservation.finish(), mono_f.finish(), mono_gbar.finish()]);
    if splits {
        checks.push(mono_g.finish());
    }
    checks.extend([
        mono_h.finish(),
        visc_f.finish(),
        visc_g.finish(),
        egh.finish(),
        egh1.finish(),
        egh_g.finish(),
    ]);

    CertificationReport {
        flux: flux.name().to_string(),
        range: m,
        a_max,
        lipschitz,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxes::{Godunov, LaxFriedrichs};
    use crate::problem::{CutoffCoupling, FnCoupling, Model, ScalarFlux};

    fn quadratic_model() -> Model {
        Model::new(ScalarFlux::polynomial(0.0, 3.0, 0.0), CutoffCoupling::default())
    }

    #[test]
    fn auto_lax_friedrichs_passes() {
        let lf = LaxFriedrichs::auto(quadratic_model(), 2.0, 6.0);
        let report = certify_flux(&lf, 2.0, 6.0, 2000, 7);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn overdriven_lax_friedrichs_fails_monotonicity() {
        // lambda sup|f'| = 4 on [-2, 2]
        let lf = LaxFriedrichs::new(quadratic_model(), 4.0 / 12.0, 0.9).unwrap();
        let report = certify_flux(&lf, 2.0, 6.0, 2000, 7);
        assert!(!report.check("monotonicity f_+").unwrap().passed);
        assert!(!report.passed());
    }

    #[test]
    fn zero_flux_passes() {
        let m = Model::new(ScalarFlux::zero(), FnCoupling::none());
        let lf = LaxFriedrichs::auto(m.clone(), 1.0, 1.0);
        assert!(certify_flux(&lf, 1.0, 1.0, 500, 1).passed());
        assert!(certify_flux(&Godunov::new(m), 1.0, 1.0, 500, 1).passed());
    }

    #[test]
    fn report_is_deterministic_and_renders() {
        let lf = LaxFriedrichs::auto(quadratic_model(), 2.0, 6.0);
        let a = certify_flux(&lf, 2.0, 6.0, 200, 42);
        let b = certify_flux(&lf, 2.0, 6.0, 200, 42);
        assert_eq!(a, b);
        let text = a.to_string();
        assert!(text.contains("monotonicity f_+"));
        assert!(text.ends_with("overall: pass"));
    }
}
