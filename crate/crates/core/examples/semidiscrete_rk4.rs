//! Compares the fully discrete scheme with an RK4 integration of the
//! semi-discrete flux form on travelling-wave data: the gap between the two
//! shrinks linearly in the time step.
//!
//! ```text
//! cargo run --release --example semidiscrete_rk4
//! ```

use std::sync::Arc;

use swlw::exact::{linear_tw_problem, TravelingWaveParams};
use swlw::fluxes::{CombinedFlux, LaxFriedrichs};
use swlw::semidiscrete::SemiDiscreteRhs;
use swlw::simulate::{run, RunPlan};
use swlw::stepper::{Stepper, StepperConfig};
use swlw::{project_initial_data, Grid, State};

fn l2_gap(a: &State, b: &State, h: f64) -> f64 {
    let du: f64 = a.u.iter().zip(&b.u).map(|(x, y)| (x - y).norm_sqr()).sum();
    let dv: f64 = a.v.iter().zip(&b.v).map(|(x, y)| (x - y).powi(2)).sum();
    (h * (du + dv)).sqrt()
}

fn main() -> swlw::Result<()> {
    let (h, t_final) = (0.2, 0.1);
    let spec = Arc::new(linear_tw_problem(TravelingWaveParams::default())?);
    let grid = Grid::with_spacing(-40.0, 60.0, h)?;
    let (lambda, gamma) = LaxFriedrichs::auto_parameters(&spec.model, spec.lipschitz_bound_m, 0.875);
    let init = project_initial_data(&spec, &grid)?;

    let lf = LaxFriedrichs::new(spec.model.clone(), lambda, gamma)?;
    let rhs = SemiDiscreteRhs::new(grid, spec.clone(), CombinedFlux::new(Arc::new(lf)));
    let reference_tau = 0.25 * rhs.max_step();
    let plan = RunPlan { t_final, tau: reference_tau, snapshot_times: Vec::new() };
    let reference = run(&rhs, init.clone(), &plan, None)?.final_state;
    println!("RK4 reference: tau = {reference_tau}, lambda = {lambda}, gamma = {gamma}");

    let mut previous: Option<f64> = None;
    for tau in [0.02, 0.01, 0.005, 0.0025] {
        let stepper = Stepper::new(grid, spec.clone(), StepperConfig::new(tau, lambda, gamma))?;
        let plan = RunPlan { t_final, tau, snapshot_times: Vec::new() };
        let state = run(&stepper, init.clone(), &plan, None)?.final_state;
        let gap = l2_gap(&state, &reference, grid.h());
        match previous {
            Some(p) => println!("tau = {tau:<7} gap = {gap:.6e}  ratio = {:.4}", p / gap),
            None => println!("tau = {tau:<7} gap = {gap:.6e}"),
        }
        previous = Some(gap);
    }
    Ok(())
}
