//! Certifies the Lax-Friedrichs and Godunov fluxes for `f(v) = 3v²` and shows
//! an over-driven Lax-Friedrichs flux failing monotonicity.
//!
//! ```text
//! cargo run --release --example certify_fluxes [samples]
//! ```

use swlw::fluxes::{certify_flux, Godunov, LaxFriedrichs, NumericalFlux};
use swlw::{CutoffCoupling, Model, ScalarFlux};

fn main() -> swlw::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let model = Model::new(ScalarFlux::polynomial(0.0, 3.0, 0.0), CutoffCoupling::default());
    let (m, a_max) = (2.0, 6.0);

    let auto = LaxFriedrichs::auto(model.clone(), m, a_max);
    let overdriven = LaxFriedrichs::new(model.clone(), 4.0 / 12.0, auto.gamma())?;
    let godunov = Godunov::new(model);
    let fluxes: [(&str, &dyn NumericalFlux); 3] = [
        ("lax_friedrichs (auto)", &auto),
        ("lax_friedrichs (lambda sup|f'| = 4)", &overdriven),
        ("godunov", &godunov),
    ];
    for (label, flux) in fluxes {
        let report = certify_flux(flux, m, a_max, samples, 1);
        println!("== {label}\n{report}\n");
    }
    Ok(())
}
