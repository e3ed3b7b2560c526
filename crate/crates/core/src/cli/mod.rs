//! Batch front end: `run`, `certify` and `study` subcommands.
//!
//! Exit codes: 0 success, 2 configuration or I/O error, 3 step failure,
//! 4 invariant failure (including failed certification and non-monotone
//! studies).

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::diagnostics::{format_number, DiagnosticsRecord, DiagnosticsTracker, RunSummary};
use crate::error::{Error, Result};
use crate::exact::{convergence_study, errors_strictly_decrease, study_csv, StudyRow};
use crate::fluxes::{certify_flux, CertificationReport, CombinedFlux, Godunov, LaxFriedrichs, NumericalFlux};
use crate::semidiscrete::SemiDiscreteRhs;
use crate::simulate::{run, RunOutput, RunPlan};
use crate::state::State;
use crate::stepper::Stepper;

pub use config::{Auto, FluxKind, ProblemKind, RawConfig, RunConfig, SchemeKind, Setup};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_STEP: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

pub const FIELDS_CSV_HEADER: &str = "t,x,re_u,im_u,abs_u,v";
/// Allowed relative drift of `||u||_2` over a fully discrete run.
pub const MASS_DRIFT_LIMIT: f64 = 1e-6;
/// Slack on the L∞ envelope `max(M2, ||v0||∞)`.
pub const LINF_SLACK: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "swlw", version, about = "Short-wave / long-wave interaction solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a problem and write fields.csv, diagnostics.csv and summary.txt.
    Run(CommonArgs),
    /// Check the monotone-flux axioms for the configured flux.
    Certify(CommonArgs),
    /// Mesh-refinement study against an exact solution; writes study.csv.
    Study(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `out_dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key=value` setting applied after the file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Invariant(_) => EXIT_INVARIANT,
        e if e.is_step_failure() => EXIT_STEP,
        _ => EXIT_CONFIG,
    }
}

/// Reads the configuration named by `args`, applying overrides.
pub fn load_config(args: &CommonArgs) -> Result<RunConfig> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    for item in &args.overrides {
        raw.apply_override(item)?;
    }
    let mut cfg = RunConfig::from_raw(&raw)?;
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

/// Runs the parsed command line and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let (args, which) = match &cli.command {
        Command::Run(a) => (a, "run"),
        Command::Certify(a) => (a, "certify"),
        Command::Study(a) => (a, "study"),
    };
    let result = load_config(args).and_then(|cfg| match which {
        "run" => run_command(&cfg).map(|r| print!("{}", r.summary_text)),
        "certify" => certify_command(&cfg).map(|r| println!("{r}")),
        _ => study_command(&cfg).map(|rows| print!("{}", study_csv(&rows))),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn create_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::config("out_dir", format!("{}: {e}", dir.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::config("out_dir", format!("{}: {e}", path.display())))
}

fn build_flux(cfg: &RunConfig, setup: &Setup) -> Result<Arc<dyn NumericalFlux>> {
    let model = setup.spec.model.clone();
    Ok(match cfg.flux {
        FluxKind::LaxFriedrichs => Arc::new(LaxFriedrichs::new(model, setup.stepper.lambda_lf, setup.stepper.gamma_lf)?),
        FluxKind::Godunov => Arc::new(Godunov::new(model)),
    })
}

/// Result of [`run_command`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output: RunOutput,
    pub summary: RunSummary,
    pub linf_bound: f64,
    pub summary_text: String,
}

pub fn fields_csv(snapshots: &[State], setup: &Setup) -> String {
    let mut out = String::from(FIELDS_CSV_HEADER);
    out.push('\n');
    for s in snapshots {
        for (j, (u, v)) in s.u.iter().zip(&s.v).enumerate() {
            let row = [s.t, setup.grid.center(j), u.re, u.im, u.norm(), *v].map(format_number).join(",");
            out.push_str(&row);
            out.push('\n');
        }
    }
    out
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::from(DiagnosticsRecord::CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

fn auto_note(value: Auto) -> &'static str {
    match value {
        Auto::Auto => " (auto)",
        Auto::Value(_) => "",
    }
}

/// Integrates the configured problem and writes the three output files.
///
/// Fails with [`Error::Invariant`] when the `u`-mass drifts by more than
/// [`MASS_DRIFT_LIMIT`] (fully discrete scheme) or `v` leaves the L∞
/// envelope (RK4 scheme); the files are written first.
pub fn run_command(cfg: &RunConfig) -> Result<RunReport> {
    let setup = cfg.setup()?;
    create_out_dir(&cfg.out_dir)?;
    let flux = build_flux(cfg, &setup)?;
    let mut tracker = DiagnosticsTracker::new(setup.spec.clone(), flux.clone(), setup.grid.h(), setup.grid.n_cells())?;
    let plan = RunPlan { t_final: cfg.t_final, tau: setup.stepper.tau, snapshot_times: cfg.snapshot_times.clone() };
    tracing::info!(problem = %setup.spec.name, n_cells = setup.grid.n_cells(), tau = setup.stepper.tau, "starting run");
    let output = match cfg.scheme {
        SchemeKind::FullyDiscrete => {
            let stepper = Stepper::new(setup.grid, setup.spec.clone(), setup.stepper)?;
            run(&stepper, setup.init.clone(), &plan, Some(&mut tracker))?
        }
        SchemeKind::Rk4 => {
            let rhs = SemiDiscreteRhs::new(setup.grid, setup.spec.clone(), CombinedFlux::new(flux.clone()))
                .with_certified_range(setup.spec.lipschitz_bound_m);
            run(&rhs, setup.init.clone(), &plan, Some(&mut tracker))?
        }
    };
    let summary = output.summary.unwrap_or_default();
    let v0_sup = setup.init.v.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let linf_bound = setup.spec.linf_bound(v0_sup);

    let mut failures = Vec::new();
    if cfg.scheme == SchemeKind::FullyDiscrete && summary.max_rel_mass_drift > MASS_DRIFT_LIMIT {
        failures.push(format!("relative mass drift {:e} exceeds {MASS_DRIFT_LIMIT:e}", summary.max_rel_mass_drift));
    }
    let envelope_ok = summary.max_linf_v <= linf_bound + LINF_SLACK;
    if cfg.scheme == SchemeKind::Rk4 && !envelope_ok {
        failures.push(format!("max |v| = {} exceeds the bound {linf_bound}", summary.max_linf_v));
    }

    let mut text = String::new();
    let s = &setup.stepper;
    let _ = writeln!(text, "problem = {}", setup.spec.name);
    let _ = writeln!(text, "scheme = {}", cfg.scheme.name());
    let _ = writeln!(text, "flux = {}", flux.name());
    let _ = writeln!(text, "domain = [{}, {}]", setup.grid.x_left(), setup.grid.x_right());
    let _ = writeln!(text, "n_cells = {}", setup.grid.n_cells());
    let _ = writeln!(text, "h = {}", format_number(setup.grid.h()));
    let _ = writeln!(text, "tau = {}{}", format_number(output.tau), auto_note(cfg.tau));
    let _ = writeln!(text, "lambda_lf = {}{}", format_number(s.lambda_lf), auto_note(cfg.lambda_lf));
    let _ = writeln!(text, "gamma_lf = {}{}", format_number(s.gamma_lf), auto_note(cfg.gamma_lf));
    let _ = writeln!(text, "T = {}", format_number(cfg.t_final));
    let _ = writeln!(text, "steps = {}", output.steps);
    let _ = writeln!(text, "substeps = {}", output.substeps);
    let _ = writeln!(text, "max_newton_iterations = {}", output.max_newton_iterations);
    let _ = writeln!(text, "max_newton_residual = {}", format_number(output.max_newton_residual));
    let _ = writeln!(text, "max_rel_mass_drift = {}", format_number(summary.max_rel_mass_drift));
    let _ = writeln!(text, "max_linf_v = {}", format_number(summary.max_linf_v));
    let _ = writeln!(text, "linf_bound = {}", format_number(linf_bound));
    let _ = writeln!(text, "linf_envelope = {}", if envelope_ok { "ok" } else { "exceeded" });
    let _ = writeln!(text, "boundary_max_u = {}", format_number(summary.max_boundary_u));
    let _ = writeln!(text, "max_dplus_u_l2 = {}", format_number(summary.max_dplus_u_l2));
    let _ = writeln!(text, "qtv_cum = {}", format_number(summary.qtv_cum));
    let _ = writeln!(text, "visc_cum = {}", format_number(summary.visc_cum));
    let _ = writeln!(text, "entropy_pos_cum = {}", format_number(summary.entropy_pos_cum));
    let _ = writeln!(text, "status = {}", if failures.is_empty() { "ok".to_string() } else { failures.join("; ") });

    write_file(&cfg.out_dir, "fields.csv", &fields_csv(&output.snapshots, &setup))?;
    write_file(&cfg.out_dir, "diagnostics.csv", &diagnostics_csv(&output.diagnostics))?;
    write_file(&cfg.out_dir, "summary.txt", &text)?;
    if !failures.is_empty() {
        return Err(Error::Invariant(failures.join("; ")));
    }
    Ok(RunReport { output, summary, linf_bound, summary_text: text })
}

/// Certifies the configured flux on `[-M, M] × [0, A]` and writes
/// `certification.txt`; fails with [`Error::Invariant`] on any axiom failure.
pub fn certify_command(cfg: &RunConfig) -> Result<CertificationReport> {
    let setup = cfg.setup()?;
    let flux = build_flux(cfg, &setup)?;
    let range = match cfg.certify_range {
        Auto::Auto => setup.spec.lipschitz_bound_m,
        Auto::Value(m) => m,
    };
    let a_max = match cfg.certify_a_max {
        Auto::Auto => setup.a_peak,
        Auto::Value(a) => a,
    };
    let report = certify_flux(flux.as_ref(), range, a_max, cfg.certify_samples, cfg.seed);
    create_out_dir(&cfg.out_dir)?;
    write_file(&cfg.out_dir, "certification.txt", &format!("{report}\n"))?;
    if !report.passed() {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.axiom.as_str()).collect();
        println!("{report}");
        return Err(Error::Invariant(format!("certification failed: {}", failed.join(", "))));
    }
    Ok(report)
}

/// Convergence study over `study.h_list`; writes `study.csv` and fails with
/// [`Error::Invariant`] unless both error columns strictly decrease.
pub fn study_command(cfg: &RunConfig) -> Result<Vec<StudyRow>> {
    let setup = cfg.setup_with_h(cfg.h_list[0])?;
    if setup.spec.exact.is_none() {
        return Err(Error::config("problem", format!("`{}` has no exact solution to study against", setup.spec.name)));
    }
    let rows = convergence_study(setup.spec.clone(), cfg.domain, &cfg.h_list, cfg.t_final, &setup.stepper)?;
    create_out_dir(&cfg.out_dir)?;
    write_file(&cfg.out_dir, "study.csv", &study_csv(&rows))?;
    if !errors_strictly_decrease(&rows) {
        print!("{}", study_csv(&rows));
        return Err(Error::Invariant("study errors do not decrease monotonically".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str, dir: &Path) -> RunConfig {
        let mut c = RunConfig::from_text(text).unwrap();
        c.out_dir = dir.to_path_buf();
        c
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::config("h", "bad")), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::NewtonDiverged { iterations: 3, residual: 1.0 }), EXIT_STEP);
        assert_eq!(exit_code(&Error::Invariant("x".into())), EXIT_INVARIANT);
    }

    #[test]
    fn short_run_writes_schemas() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg("problem = linear_tw\nh = 0.4\nT = 0.2\nsnapshot_times = 0, 0.2", dir.path());
        let report = run_command(&c).unwrap();
        assert!(report.summary.max_rel_mass_drift < 1e-10);
        let fields = fs::read_to_string(dir.path().join("fields.csv")).unwrap();
        let diag = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
        assert_eq!(fields.lines().next().unwrap(), FIELDS_CSV_HEADER);
        assert_eq!(fields.lines().count(), 1 + 2 * 250);
        assert_eq!(diag.lines().next().unwrap(), DiagnosticsRecord::CSV_HEADER);
        assert_eq!(diag.lines().count(), 2 + report.output.steps);
        let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(summary.contains("lambda_lf = 9.0000000000000002e-1 (auto)"));
    }

    #[test]
    fn certify_detects_bad_lambda() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg("lambda_lf = 100\ncertify.samples = 500", dir.path());
        assert!(matches!(certify_command(&c), Err(Error::Invariant(_))));
        let ok = cfg("certify.samples = 500", dir.path());
        assert!(certify_command(&ok).unwrap().passed());
    }

    #[test]
    fn study_requires_exact_solution() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg("problem = general", dir.path());
        assert!(matches!(study_command(&c), Err(Error::Config { .. })));
    }
}
