//! Tabulates the septic cutoff `g` and the entropy fluxes for `eta = v²/2`,
//! then prints the entropy residual of one step of the general problem.
//!
//! ```text
//! cargo run --release --example cutoff_and_entropy
//! ```

use std::sync::Arc;

use swlw::diagnostics::{entropy_residual, positive_part, EntropyFluxes};
use swlw::exact::{general_case_data, GENERAL_DOMAIN};
use swlw::fluxes::LaxFriedrichs;
use swlw::problem::Coupling;
use swlw::stepper::{Stepper, StepperConfig};
use swlw::{project_initial_data, CutoffCoupling, Grid};

fn main() -> swlw::Result<()> {
    let g = CutoffCoupling::default();
    println!("{:>6} {:>14} {:>10} {:>12}", "v", "g", "g'", "g''");
    for v in [0.0, 25.0, 50.0, 52.5, 55.0, 57.5, 60.0, 70.0] {
        println!("{v:>6.1} {:>14.8} {:>10.6} {:>12.6}", g.g(v), g.dg(v), g.d2g(v));
    }

    let spec = Arc::new(general_case_data());
    let fluxes = EntropyFluxes::for_spec(spec.clone())?;
    println!("\n{:>6} {:>14} {:>14}", "v", "q1", "q2");
    for v in [-2.0, -1.0, 0.0, 1.0, 2.0, 55.0] {
        println!("{v:>6.1} {:>14.8} {:>14.8}", fluxes.q1(v), fluxes.q2(v));
    }

    let grid = Grid::with_spacing(GENERAL_DOMAIN.0, GENERAL_DOMAIN.1, 0.1)?;
    let (lambda, gamma) = LaxFriedrichs::auto_parameters(&spec.model, spec.lipschitz_bound_m, 6.0);
    let cfg = StepperConfig::with_auto_tau(lambda, gamma, grid.h());
    let stepper = Stepper::new(grid, spec.clone(), cfg)?;
    let s0 = project_initial_data(&spec, &grid)?;
    let s1 = stepper.step(&s0)?;
    let r = entropy_residual(&s0, &s1, &fluxes, grid.h(), cfg.tau);
    let (jmax, rmax) = r.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    println!(
        "\none step (tau = {:.4}): sum h max(R, 0) = {:.6e}, largest R = {rmax:.4e} at x = {:.2}",
        cfg.tau,
        positive_part(&r, grid.h()),
        grid.center(jmax)
    );
    Ok(())
}
