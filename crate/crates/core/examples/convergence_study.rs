//! Mesh-refinement study against the two exact solutions.
//!
//! ```text
//! cargo run --release --example convergence_study
//! ```

use std::sync::Arc;

use swlw::exact::{
    convergence_study, errors_strictly_decrease, linear_tw_problem, nonlinear_tw_problem, study_csv,
    TravelingWaveParams, LINEAR_TW_DOMAIN, NONLINEAR_TW_DOMAIN,
};
use swlw::fluxes::LaxFriedrichs;
use swlw::stepper::StepperConfig;

fn main() -> swlw::Result<()> {
    let h_list = [0.4, 0.2, 0.1, 0.05];
    let problems = [
        ("linear flux travelling wave", linear_tw_problem(TravelingWaveParams::default())?, LINEAR_TW_DOMAIN),
        ("nonlinear flux standing wave", nonlinear_tw_problem(1.0)?, NONLINEAR_TW_DOMAIN),
    ];
    for (title, spec, domain) in problems {
        let peak = (0..=2000)
            .map(|k| (spec.u0)(domain.0 + (domain.1 - domain.0) * k as f64 / 2000.0).norm_sqr())
            .fold(0.0, f64::max);
        let (lambda, gamma) = LaxFriedrichs::auto_parameters(&spec.model, spec.lipschitz_bound_m, spec.alpha * peak);
        let template = StepperConfig::new(0.0, lambda, gamma);
        let rows = convergence_study(Arc::new(spec), domain, &h_list, 1.0, &template)?;
        println!("# {title} (lambda = {lambda}, gamma = {gamma})");
        print!("{}", study_csv(&rows));
        println!("# strictly decreasing: {}\n", errors_strictly_decrease(&rows));
    }
    Ok(())
}
