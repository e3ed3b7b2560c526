//! Problem data: conservation-law flux, coupling function, initial data.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quadrature::gauss_legendre5;
use crate::state::State;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(f64, f64) -> (Complex64, f64) + Send + Sync>;

/// Scalar flux `f` with its derivative.
#[derive(Clone)]
pub struct ScalarFlux {
    value: RealFn,
    derivative: RealFn,
}

impl ScalarFlux {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarFlux {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    /// `f(v) = c1 v + c2 v^2 + c3 v^3`.
    pub fn polynomial(c1: f64, c2: f64, c3: f64) -> Self {
        Self::new(
            move |v| v * (c1 + v * (c2 + v * c3)),
            move |v| c1 + v * (2.0 * c2 + 3.0 * c3 * v),
        )
    }

    pub fn linear(speed: f64) -> Self {
        Self::polynomial(speed, 0.0, 0.0)
    }

    pub fn zero() -> Self {
        Self::polynomial(0.0, 0.0, 0.0)
    }

    #[inline]
    pub fn f(&self, v: f64) -> f64 {
        (self.value)(v)
    }

    #[inline]
    pub fn df(&self, v: f64) -> f64 {
        (self.derivative)(v)
    }

    /// Sampled `sup |f'|` on `[-m, m]` (endpoints included).
    pub fn sup_abs_derivative(&self, m: f64) -> f64 {
        sup_abs_on(|v| self.df(v), m)
    }
}

impl fmt::Debug for ScalarFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarFlux")
    }
}

pub(crate) fn sup_abs_on(phi: impl Fn(f64) -> f64, m: f64) -> f64 {
    const SAMPLES: usize = 2001;
    (0..SAMPLES)
        .map(|k| -m + 2.0 * m * k as f64 / (SAMPLES - 1) as f64)
        .map(|v| phi(v).abs())
        .fold(0.0, f64::max)
}

/// Coupling function `g` and its derivatives.
pub trait Coupling: Send + Sync + fmt::Debug {
    fn g(&self, v: f64) -> f64;
    fn dg(&self, v: f64) -> f64;
    fn d2g(&self, v: f64) -> f64;
    fn d3g(&self, v: f64) -> f64;
}

/// `g` with `g' = 1` on `[-M1, M1]`, `g' = 0` outside `[-M2, M2]`, and a
/// degree-7 smoothstep on the transition bands so that `g` is `C^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffCoupling {
    m1: f64,
    m2: f64,
}

impl Default for CutoffCoupling {
    fn default() -> Self {
        CutoffCoupling { m1: 50.0, m2: 60.0 }
    }
}

impl CutoffCoupling {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        if !(m1.is_finite() && m2.is_finite()) || m1 < 0.0 || m1 >= m2 {
            return Err(Error::config(
                "cutoff",
                format!("need 0 <= M1 < M2, got M1 = {m1}, M2 = {m2}"),
            ));
        }
        Ok(CutoffCoupling { m1, m2 })
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    fn width(&self) -> f64 {
        self.m2 - self.m1
    }

    /// Band coordinate of `|v|` in `[0, 1]`, or `None` outside the band.
    fn band(&self, v: f64) -> Option<f64> {
        let a = v.abs();
        if a > self.m1 && a < self.m2 {
            Some((a - self.m1) / self.width())
        } else {
            None
        }
    }
}

// Smoothstep P(x) = 35x^4 - 84x^5 + 70x^6 - 20x^7 and its derivatives; the
// band profile of g' is S = 1 - P.
fn smooth_p(x: f64) -> f64 {
    x * x * x * x * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))
}
fn smooth_p1(x: f64) -> f64 {
    x * x * x * (140.0 + x * (-420.0 + x * (420.0 - 140.0 * x)))
}
fn smooth_p2(x: f64) -> f64 {
    x * x * (420.0 + x * (-1680.0 + x * (2100.0 - 840.0 * x)))
}
fn smooth_p3(x: f64) -> f64 {
    x * (840.0 + x * (-5040.0 + x * (8400.0 - 4200.0 * x)))
}
/// Antiderivative of P vanishing at 0.
fn smooth_p_int(x: f64) -> f64 {
    x.powi(5) * (7.0 + x * (-14.0 + x * (10.0 - 2.5 * x)))
}

impl Coupling for CutoffCoupling {
    fn g(&self, v: f64) -> f64 {
        let a = v.abs();
        let mag = if a <= self.m1 {
            a
        } else if a >= self.m2 {
            self.m1 + 0.5 * self.width()
        } else {
            let x = (a - self.m1) / self.width();
            self.m1 + self.width() * (x - smooth_p_int(x))
        };
        mag.copysign(v)
    }

    fn dg(&self, v: f64) -> f64 {
        let a = v.abs();
        if a <= self.m1 {
            1.0
        } else if a >= self.m2 {
            0.0
        } else {
            1.0 - smooth_p((a - self.m1) / self.width())
        }
    }

    fn d2g(&self, v: f64) -> f64 {
        match self.band(v) {
            Some(x) => -smooth_p1(x) / self.width() * v.signum(),
            None => 0.0,
        }
    }

    fn d3g(&self, v: f64) -> f64 {
        match self.band(v) {
            Some(x) => -smooth_p2(x) / (self.width() * self.width()),
            None => 0.0,
        }
    }
}

impl CutoffCoupling {
    /// Fourth derivative of `g` (used by smoothness probes).
    pub fn d4g(&self, v: f64) -> f64 {
        match self.band(v) {
            Some(x) => -smooth_p3(x) / self.width().powi(3) * v.signum(),
            None => 0.0,
        }
    }
}

/// Returns `(g, g', g'')` of the septic cutoff coupling.
pub fn eval_cutoff_g(m1: f64, m2: f64, v: f64) -> Result<(f64, f64, f64)> {
    let c = CutoffCoupling::new(m1, m2)?;
    Ok((c.g(v), c.dg(v), c.d2g(v)))
}

/// Coupling given by closures; for tests and custom experiments.
#[derive(Clone)]
pub struct FnCoupling {
    g: RealFn,
    dg: RealFn,
    d2g: RealFn,
    d3g: RealFn,
}

impl FnCoupling {
    pub fn new(
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dg: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d3g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnCoupling {
            g: Arc::new(g),
            dg: Arc::new(dg),
            d2g: Arc::new(d2g),
            d3g: Arc::new(d3g),
        }
    }

    /// `g(v) = v^2 / 2`, i.e. `g'(v) = v`.
    pub fn quadratic() -> Self {
        Self::new(|v| 0.5 * v * v, |v| v, |_| 1.0, |_| 0.0)
    }

    /// `g ≡ 0`.
    pub fn none() -> Self {
        Self::new(|_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0)
    }
}

impl fmt::Debug for FnCoupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnCoupling")
    }
}

impl Coupling for FnCoupling {
    fn g(&self, v: f64) -> f64 {
        (self.g)(v)
    }
    fn dg(&self, v: f64) -> f64 {
        (self.dg)(v)
    }
    fn d2g(&self, v: f64) -> f64 {
        (self.d2g)(v)
    }
    fn d3g(&self, v: f64) -> f64 {
        (self.d3g)(v)
    }
}

/// The pair of nonlinearities seen by the numerical fluxes: `f` and `g`.
#[derive(Clone, Debug)]
pub struct Model {
    pub flux: ScalarFlux,
    pub coupling: Arc<dyn Coupling>,
}

impl Model {
    pub fn new(flux: ScalarFlux, coupling: impl Coupling + 'static) -> Self {
        Model {
            flux,
            coupling: Arc::new(coupling),
        }
    }

    #[inline]
    pub fn f(&self, v: f64) -> f64 {
        self.flux.f(v)
    }

    #[inline]
    pub fn dg(&self, v: f64) -> f64 {
        self.coupling.dg(v)
    }
}

/// Complete description of a Cauchy problem
///
/// ```text
/// i u_t + u_xx = cubic |u|^2 u + alpha g(v) u
/// v_t + f(v)_x = alpha (g'(v) |u|^2)_x
/// ```
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub model: Model,
    pub alpha: f64,
    /// Coefficient of the cubic term; 0 makes the Schrödinger equation linear in `u`.
    pub cubic: f64,
    /// `(M1, M2)` of the cutoff, when the coupling is a [`CutoffCoupling`].
    pub cutoff: Option<CutoffCoupling>,
    pub u0: ComplexFn,
    pub v0: RealFn,
    pub exact: Option<ExactFn>,
    /// Working L∞ range `[-M, M]` for `v` used to size flux parameters.
    pub lipschitz_bound_m: f64,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("cubic", &self.cubic)
            .field("cutoff", &self.cutoff)
            .field("has_exact", &self.exact.is_some())
            .field("lipschitz_bound_m", &self.lipschitz_bound_m)
            .finish()
    }
}

impl ProblemSpec {
    /// Problem with the default cutoff coupling, `alpha = 1` and the cubic term on.
    pub fn new(
        name: impl Into<String>,
        flux: ScalarFlux,
        cutoff: CutoffCoupling,
        u0: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        v0: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lipschitz_bound_m: f64,
    ) -> Result<Self> {
        let spec = ProblemSpec {
            name: name.into(),
            model: Model::new(flux, cutoff),
            alpha: 1.0,
            cubic: 1.0,
            cutoff: Some(cutoff),
            u0: Arc::new(u0),
            v0: Arc::new(v0),
            exact: None,
            lipschitz_bound_m,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_exact(
        mut self,
        exact: impl Fn(f64, f64) -> (Complex64, f64) + Send + Sync + 'static,
    ) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn with_cutoff(mut self, cutoff: CutoffCoupling) -> Self {
        self.model.coupling = Arc::new(cutoff);
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_coupling(mut self, coupling: impl Coupling + 'static) -> Self {
        self.model.coupling = Arc::new(coupling);
        self.cutoff = None;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let f0 = self.model.f(0.0);
        if f0.abs() > 1e-14 {
            return Err(Error::config("flux", format!("f(0) must vanish, got {f0}")));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::config("alpha", format!("must be >= 0, got {}", self.alpha)));
        }
        if !self.cubic.is_finite() {
            return Err(Error::config("cubic", "must be finite"));
        }
        if !(self.lipschitz_bound_m.is_finite() && self.lipschitz_bound_m > 0.0) {
            return Err(Error::config(
                "lipschitz_bound_m",
                format!("must be positive, got {}", self.lipschitz_bound_m),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn f(&self, v: f64) -> f64 {
        self.model.f(v)
    }

    #[inline]
    pub fn g(&self, v: f64) -> f64 {
        self.model.coupling.g(v)
    }

    #[inline]
    pub fn dg(&self, v: f64) -> f64 {
        self.model.coupling.dg(v)
    }

    /// The `M` of the maximum principle: `max(M2, ||v0||∞)` when a cutoff is set.
    pub fn linf_bound(&self, v0_sup: f64) -> f64 {
        match self.cutoff {
            Some(c) => c.m2().max(v0_sup),
            None => f64::INFINITY,
        }
    }
}

/// Cell averages of the initial data, 5-point Gauss-Legendre per cell.
pub fn project_initial_data(spec: &ProblemSpec, grid: &Grid) -> Result<State> {
    let h = grid.h();
    let mut u = Vec::with_capacity(grid.n_cells());
    let mut v = Vec::with_capacity(grid.n_cells());
    for j in 0..grid.n_cells() {
        let (a, b) = (grid.edge(j), grid.edge(j) + h);
        let uj: Complex64 = gauss_legendre5(|x| (spec.u0)(x), a, b) / h;
        let vj: f64 = gauss_legendre5(|x| (spec.v0)(x), a, b) / h;
        if !(uj.re.is_finite() && uj.im.is_finite() && vj.is_finite()) {
            return Err(Error::InvalidInitialData {
                cell: j,
                x: grid.center(j),
            });
        }
        u.push(uj);
        v.push(vj);
    }
    State::new(0.0, u, v)
}
