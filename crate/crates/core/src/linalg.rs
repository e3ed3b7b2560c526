//! Tridiagonal systems (Thomas algorithm) over real or complex scalars.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

pub trait Scalar:
    Copy
    + Debug
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// `lower[i]` multiplies `x[i]` in row `i + 1`; `upper[i]` multiplies
/// `x[i + 1]` in row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
    pub rhs: Vec<T>,
}

impl<T: Scalar> TridiagonalSystem<T> {
    pub fn new(lower: Vec<T>, diag: Vec<T>, upper: Vec<T>, rhs: Vec<T>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || rhs.len() != n || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::config(
                "tridiagonal",
                format!(
                    "inconsistent lengths: lower {}, diag {}, upper {}, rhs {}",
                    lower.len(),
                    n,
                    upper.len(),
                    rhs.len()
                ),
            ));
        }
        Ok(TridiagonalSystem { lower, diag, upper, rhs })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Weak row diagonal dominance.
    pub fn is_diagonally_dominant(&self) -> bool {
        (0..self.len()).all(|i| {
            let off = if i > 0 { self.lower[i - 1].modulus() } else { 0.0 }
                + if i + 1 < self.len() { self.upper[i].modulus() } else { 0.0 };
            self.diag[i].modulus() >= off
        })
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y = y + self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y = y + self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                self.diag[i].modulus()
                    + if i > 0 { self.lower[i - 1].modulus() } else { 0.0 }
                    + if i + 1 < n { self.upper[i].modulus() } else { 0.0 }
            })
            .fold(0.0, f64::max)
    }

    /// `‖A x - b‖∞`.
    pub fn residual(&self, x: &[T]) -> f64 {
        self.apply(x)
            .iter()
            .zip(&self.rhs)
            .map(|(&ax, &b)| (ax - b).modulus())
            .fold(0.0, f64::max)
    }
}

/// Thomas algorithm: forward elimination and back substitution, no pivoting.
pub fn solve_tridiagonal<T: Scalar>(sys: &TridiagonalSystem<T>) -> Result<Vec<T>> {
    if !sys.is_diagonally_dominant() {
        tracing::warn!(n = sys.len(), "tridiagonal system is not diagonally dominant");
    }
    thomas(&sys.lower, &sys.diag, &sys.upper, &sys.rhs)
}

pub(crate) fn thomas<T: Scalar>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut x = vec![T::zero(); n];
    let mut pivot = diag[0];
    if pivot.modulus().is_nan() || pivot.modulus() == 0.0 {
        return Err(Error::SingularSystem { row: 0 });
    }
    if n > 1 {
        c[0] = upper[0] / pivot;
    }
    x[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        if !(pivot.modulus() > 0.0 && pivot.modulus().is_finite()) {
            return Err(Error::SingularSystem { row: i });
        }
        if i + 1 < n {
            c[i] = upper[i] / pivot;
        }
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        x[i] = x[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let b = vec![1.0, -2.0, 3.5, 4.0];
        let sys = TridiagonalSystem::new(vec![0.0; 3], vec![1.0; 4], vec![0.0; 3], b.clone()).unwrap();
        assert_eq!(solve_tridiagonal(&sys).unwrap(), b);
    }

    #[test]
    fn three_by_three() {
        let sys = TridiagonalSystem::new(
            vec![-1.0, -1.0],
            vec![2.0, 2.0, 2.0],
            vec![-1.0, -1.0],
            vec![1.0, 0.0, 1.0],
        )
        .unwrap();
        let x = solve_tridiagonal(&sys).unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_row_and_errors() {
        let sys = TridiagonalSystem::new(vec![], vec![4.0], vec![], vec![2.0]).unwrap();
        assert_eq!(solve_tridiagonal(&sys).unwrap(), vec![0.5]);
        assert!(TridiagonalSystem::new(vec![1.0], vec![1.0], vec![], vec![1.0]).is_err());
        let singular =
            TridiagonalSystem::new(vec![1.0], vec![1.0, 1.0], vec![1.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(solve_tridiagonal(&singular), Err(Error::SingularSystem { row: 1 })));
    }

    #[test]
    fn complex_system() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let sys = TridiagonalSystem::new(
            vec![one; 4],
            vec![4.0 * one + i; 5],
            vec![-one; 4],
            vec![one, i, -one, 2.0 * i, one],
        )
        .unwrap();
        let x = solve_tridiagonal(&sys).unwrap();
        assert!(sys.residual(&x) < 1e-14);
    }
}
