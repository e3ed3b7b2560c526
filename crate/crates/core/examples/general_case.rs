//! Shock/rarefaction interaction run on `[-50, 50]` with the fully discrete
//! scheme, printing a compact diagnostics trace.
//!
//! ```text
//! cargo run --release --example general_case [h] [tau] [lambda] [T]
//! ```

use std::sync::Arc;

use swlw::diagnostics::DiagnosticsTracker;
use swlw::exact::{general_case_data, GENERAL_DOMAIN, GENERAL_SNAPSHOTS};
use swlw::fluxes::{LaxFriedrichs, NumericalFlux};
use swlw::simulate::{run, RunPlan};
use swlw::stepper::{Stepper, StepperConfig};
use swlw::{project_initial_data, Grid};

fn main() -> swlw::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let h = args.first().copied().unwrap_or(0.05);
    let tau = args.get(1).copied().unwrap_or(0.01);
    let lambda = args.get(2).copied().unwrap_or(0.04);
    let t_final = args.get(3).copied().unwrap_or(2.5);

    let spec = Arc::new(general_case_data());
    let grid = Grid::with_spacing(GENERAL_DOMAIN.0, GENERAL_DOMAIN.1, h)?;
    let (_, gamma) = LaxFriedrichs::auto_parameters(&spec.model, spec.lipschitz_bound_m, 6.0);
    let mut cfg = StepperConfig::new(tau, lambda, gamma);
    cfg.enforce_cfl = false;
    let stepper = Stepper::new(grid, spec.clone(), cfg)?;
    let flux: Arc<dyn NumericalFlux> = Arc::new(LaxFriedrichs::new(spec.model.clone(), lambda, gamma)?);
    let mut tracker = DiagnosticsTracker::new(spec.clone(), flux, grid.h(), grid.n_cells())?;

    let init = project_initial_data(&spec, &grid)?;
    let plan = RunPlan { t_final, tau, snapshot_times: GENERAL_SNAPSHOTS.iter().copied().filter(|&t| t <= t_final).collect() };
    let out = run(&stepper, init, &plan, Some(&mut tracker))?;

    for snap in &out.snapshots {
        let peak = snap.u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let vmax = snap.v.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let vmin = snap.v.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        println!("t = {:4.2}  max|u| = {peak:.6}  v in [{vmin:.6}, {vmax:.6}]", snap.t);
    }
    let s = out.summary.expect("tracker attached");
    println!("steps {} (substeps {}), max Newton iterations {}, max residual {:.3e}",
        out.steps, out.substeps, out.max_newton_iterations, out.max_newton_residual);
    println!("max relative mass drift  {:.3e}", s.max_rel_mass_drift);
    println!("max |v|                  {:.6}", s.max_linf_v);
    println!("boundary monitor max     {:.3e}", s.max_boundary_u);
    println!("cumulative QTV           {:.6}", s.qtv_cum);
    println!("cumulative viscosity     {:.6}", s.visc_cum);
    println!("entropy residual (pos.)  {:.6}", s.entropy_pos_cum);
    println!("max ||D+u||              {:.6}", s.max_dplus_u_l2);
    Ok(())
}
