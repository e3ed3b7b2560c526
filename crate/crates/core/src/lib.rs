//! Solvers and verification diagnostics for the short-wave / long-wave
//! interaction system
//!
//! ```text
//! i u_t + u_xx = |u|^2 u + alpha g(v) u
//! v_t + f(v)_x = alpha (g'(v) |u|^2)_x
//! ```
//!
//! The Schrödinger part is discretised by finite differences, the
//! conservation law by monotone finite-volume fluxes. Two time integrators are
//! provided: the semi-implicit Crank-Nicolson / Lax-Friedrichs scheme
//! ([`stepper`]) and a classical RK4 method of lines on the semi-discrete
//! system ([`semidiscrete`]) used for cross-validation. The [`diagnostics`]
//! module evaluates the a-priori functionals (mass, energy, viscosity,
//! quadratic total variation, entropy residuals) on discrete states, and
//! [`exact`] holds the benchmark problems with closed-form solutions.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod fluxes;
pub mod grid;
pub mod linalg;
pub mod problem;
pub mod quadrature;
pub mod semidiscrete;
pub mod simulate;
pub mod state;
pub mod stepper;

pub use error::{Error, Result};
pub use grid::Grid;
pub use num_complex::Complex64;
pub use problem::{project_initial_data, CutoffCoupling, Model, ProblemSpec, ScalarFlux};
pub use state::State;
