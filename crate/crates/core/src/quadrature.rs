//! Fixed-order and adaptive quadrature rules.

use crate::error::{Error, Result};

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// 5-point Gauss-Legendre rule on `[a, b]`, exact for polynomials of degree 9.
pub fn gauss_legendre5<T, F>(f: F, a: f64, b: f64) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    F: Fn(f64) -> T,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = T::default();
    for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        acc = acc + f(mid + half * x) * (w * half);
    }
    acc
}

pub const SIMPSON_TOL: f64 = 1e-12;
pub const SIMPSON_MAX_DEPTH: u32 = 40;

/// Signed adaptive Simpson integral of `f` over `[a, b]` (`b < a` allowed).
///
/// A panel is accepted when the Richardson estimate drops below its share of
/// `tol`, or below the rounding floor of the panel value.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let out = simpson_rec(&f, a, b, fa, fm, fb, whole, tol, max_depth)?;
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::Quadrature { a, b })
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if !delta.is_finite() {
        return Err(Error::Quadrature { a, b });
    }
    if delta.abs() <= 15.0 * tol || delta.abs() <= floor {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature { a, b });
    }
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Adaptive Simpson with the library defaults (absolute tolerance 1e-12, depth 40).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    adaptive_simpson(f, a, b, SIMPSON_TOL, SIMPSON_MAX_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_exact_to_degree_nine() {
        for k in 0..=9 {
            let got: f64 = gauss_legendre5(|x| x.powi(k), 0.3, 1.7);
            let exact = (1.7f64.powi(k + 1) - 0.3f64.powi(k + 1)) / (k + 1) as f64;
            assert_relative_eq!(got, exact, max_relative = 1e-13);
        }
    }

    #[test]
    fn simpson_is_signed_and_accurate() {
        let fwd = integrate(|x| x.sin(), 0.0, 2.0).unwrap();
        let back = integrate(|x| x.sin(), 2.0, 0.0).unwrap();
        assert!((fwd - (1.0 - 2f64.cos())).abs() < 1e-11);
        assert!((fwd + back).abs() < 1e-14);
        // kink at zero
        let k = integrate(|x| x.abs() + 1.0, -1.0, 2.0).unwrap();
        assert!((k - 5.5).abs() < 1e-11);
    }

    #[test]
    fn simpson_reports_failure() {
        let r = adaptive_simpson(|x| 1.0 / x, -1.0, 1.0, 1e-12, 5);
        assert!(r.is_err());
    }
}
