//! Time loop shared by the fully discrete scheme and the RK4 reference.

use crate::diagnostics::{DiagnosticsRecord, DiagnosticsTracker, RunSummary};
use crate::error::{Error, Result};
use crate::semidiscrete::SemiDiscreteRhs;
use crate::state::State;
use crate::stepper::{StepOutcome, Stepper};

/// Something that advances a state by one step of given size.
pub trait TimeStepper {
    fn advance(&self, state: &State, tau: f64) -> Result<StepOutcome>;
}

impl TimeStepper for Stepper {
    fn advance(&self, state: &State, tau: f64) -> Result<StepOutcome> {
        Stepper::advance(self, state, tau)
    }
}

impl TimeStepper for SemiDiscreteRhs {
    fn advance(&self, state: &State, tau: f64) -> Result<StepOutcome> {
        Ok(StepOutcome {
            state: self.rk4_step(state, tau)?,
            newton_iterations: 0,
            newton_residual: 0.0,
            substeps: 1,
        })
    }
}

/// Number of uniform steps covering `[0, t_final]` with steps no larger than
/// `tau`, and the resulting step size.
pub fn uniform_steps(t_final: f64, tau: f64) -> Result<(usize, f64)> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::config("T", format!("must be finite and >= 0, got {t_final}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::config("tau", format!("must be positive, got {tau}")));
    }
    if t_final == 0.0 {
        return Ok((0, tau));
    }
    let n = (t_final / tau * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((n, t_final / n as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub t_final: f64,
    pub tau: f64,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_state: State,
    pub snapshots: Vec<State>,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub summary: Option<RunSummary>,
    /// Step size actually used.
    pub tau: f64,
    pub steps: usize,
    /// Substeps taken, counting halved steps.
    pub substeps: usize,
    pub max_newton_iterations: usize,
    pub max_newton_residual: f64,
}

/// Integrates `init` to `plan.t_final`, storing the states nearest to each
/// snapshot time and, with a tracker, one diagnostics record per step.
pub fn run<S: TimeStepper + ?Sized>(
    stepper: &S,
    init: State,
    plan: &RunPlan,
    mut tracker: Option<&mut DiagnosticsTracker>,
) -> Result<RunOutput> {
    let (steps, tau) = uniform_steps(plan.t_final, plan.tau)?;
    let t0 = init.t;
    let snapshot_steps: Vec<usize> = plan
        .snapshot_times
        .iter()
        .map(|&ts| (((ts - t0) / tau).round().max(0.0) as usize).min(steps))
        .collect();

    let mut out = RunOutput {
        final_state: init.clone(),
        snapshots: Vec::with_capacity(snapshot_steps.len()),
        diagnostics: Vec::new(),
        summary: None,
        tau,
        steps,
        substeps: 0,
        max_newton_iterations: 0,
        max_newton_residual: 0.0,
    };
    let mut pending: Vec<(usize, usize)> = snapshot_steps.iter().copied().enumerate().collect();
    pending.sort_by_key(|&(_, k)| k);
    let mut taken: Vec<Option<State>> = vec![None; snapshot_steps.len()];
    let mut take = |k: usize, s: &State, pending: &mut Vec<(usize, usize)>| {
        while let Some(&(slot, at)) = pending.first() {
            if at != k {
                break;
            }
            taken[slot] = Some(s.clone());
            pending.remove(0);
        }
    };

    if let Some(tr) = tracker.as_deref_mut() {
        out.diagnostics.push(tr.start(&init)?);
    }
    let mut state = init;
    take(0, &state, &mut pending);
    for n in 1..=steps {
        let outcome = stepper.advance(&state, tau)?;
        let mut next = outcome.state;
        next.t = t0 + n as f64 * tau;
        out.substeps += outcome.substeps;
        out.max_newton_iterations = out.max_newton_iterations.max(outcome.newton_iterations);
        out.max_newton_residual = out.max_newton_residual.max(outcome.newton_residual);
        if let Some(tr) = tracker.as_deref_mut() {
            out.diagnostics.push(tr.record_step(&state, &next, tau)?);
        }
        take(n, &next, &mut pending);
        state = next;
    }
    out.snapshots = taken.into_iter().flatten().collect();
    out.summary = tracker.map(|tr| tr.summary());
    out.final_state = state;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Drift;

    impl TimeStepper for Drift {
        fn advance(&self, state: &State, tau: f64) -> Result<StepOutcome> {
            let mut s = state.clone();
            s.v.iter_mut().for_each(|v| *v += tau);
            Ok(StepOutcome { state: s, newton_iterations: 1, newton_residual: 0.0, substeps: 1 })
        }
    }

    #[test]
    fn uniform_step_counts() {
        assert_eq!(uniform_steps(2.5, 0.01).unwrap().0, 250);
        let (n, tau) = uniform_steps(1.0, 0.3).unwrap();
        assert_eq!(n, 4);
        assert!((tau - 0.25).abs() < 1e-15);
        assert_eq!(uniform_steps(0.0, 0.1).unwrap().0, 0);
        assert!(uniform_steps(1.0, 0.0).is_err());
        assert!(uniform_steps(-1.0, 0.1).is_err());
    }

    #[test]
    fn snapshots_land_on_requested_times() {
        let plan = RunPlan { t_final: 1.0, tau: 0.1, snapshot_times: vec![0.5, 0.0, 1.0] };
        let out = run(&Drift, State::zeros(3), &plan, None).unwrap();
        assert_eq!(out.steps, 10);
        let times: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times, vec![0.5, 0.0, 1.0]);
        assert!((out.final_state.v[0] - 1.0).abs() < 1e-14);
        assert!(out.summary.is_none());
    }
}
