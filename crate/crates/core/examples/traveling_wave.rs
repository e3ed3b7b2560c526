//! Runs the exact travelling-wave problem and compares the computed peak and
//! profile with the exact solution over time.
//!
//! ```text
//! cargo run --release --example traveling_wave [h] [T]
//! ```

use std::sync::Arc;

use swlw::exact::{exact_linear_tw, l2_error, linear_tw_problem, TravelingWaveParams, LINEAR_TW_DOMAIN};
use swlw::fluxes::LaxFriedrichs;
use swlw::simulate::{run, RunPlan};
use swlw::stepper::{Stepper, StepperConfig};
use swlw::{project_initial_data, Grid};

fn main() -> swlw::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let h = args.first().copied().unwrap_or(0.1);
    let t_final = args.get(1).copied().unwrap_or(4.0);

    let p = TravelingWaveParams::default();
    let spec = Arc::new(linear_tw_problem(p)?);
    let grid = Grid::with_spacing(LINEAR_TW_DOMAIN.0, LINEAR_TW_DOMAIN.1, h)?;
    let (lambda, gamma) = LaxFriedrichs::auto_parameters(&spec.model, spec.lipschitz_bound_m, p.peak_intensity());
    let cfg = StepperConfig::with_auto_tau(lambda, gamma, h);
    let stepper = Stepper::new(grid, spec.clone(), cfg)?;

    println!("E = {}, beta = {}, delta = {}, c = {}", p.e(), p.beta(), p.delta(), p.c);
    println!("lambda = {lambda:.4}, gamma = {gamma:.4}, tau = {:.4}", cfg.tau);
    let times: Vec<f64> = (0..=8).map(|k| t_final * k as f64 / 8.0).collect();
    let plan = RunPlan { t_final, tau: cfg.tau, snapshot_times: times };
    let out = run(&stepper, project_initial_data(&spec, &grid)?, &plan, None)?;

    let exact = spec.exact.clone().expect("travelling wave has an exact solution");
    println!("{:>6} {:>10} {:>10} {:>12} {:>12}", "t", "peak x", "c t", "|u| peak", "L2 error");
    for s in &out.snapshots {
        let (j, peak) = s
            .u
            .iter()
            .enumerate()
            .map(|(j, z)| (j, z.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let (eu, ev) = l2_error(s, &exact, &grid);
        println!(
            "{:>6.3} {:>10.3} {:>10.3} {:>12.6} {:>12.4e}",
            s.t,
            grid.center(j),
            p.c * s.t,
            peak,
            eu.hypot(ev)
        );
    }
    let (u_peak, _) = exact_linear_tw(p.c * t_final, t_final, &p);
    println!("exact peak |u| = {:.6}", u_peak.norm());
    Ok(())
}
