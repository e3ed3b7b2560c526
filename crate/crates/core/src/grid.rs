//! Uniform one-dimensional cell grid.

use crate::error::{Error, Result};

/// Uniform mesh of `n_cells` cells covering `[x_left, x_right]`.
///
/// Cell `j` is `[x_left + j h, x_left + (j + 1) h]` with center
/// `x_left + (j + 1/2) h`. Values outside the mesh are provided by
/// `ghost` layers on each side (see [`crate::state::boundary`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_left: f64,
    x_right: f64,
    n_cells: usize,
    h: f64,
    ghost: usize,
}

impl Grid {
    pub const MIN_CELLS: usize = 3;

    pub fn new(x_left: f64, x_right: f64, n_cells: usize) -> Result<Self> {
        if !(x_left.is_finite() && x_right.is_finite()) || x_left >= x_right {
            return Err(Error::config(
                "domain",
                format!("need finite x_left < x_right, got [{x_left}, {x_right}]"),
            ));
        }
        if n_cells < Self::MIN_CELLS {
            return Err(Error::config(
                "n_cells",
                format!("need at least {} cells, got {n_cells}", Self::MIN_CELLS),
            ));
        }
        Ok(Grid {
            x_left,
            x_right,
            n_cells,
            h: (x_right - x_left) / n_cells as f64,
            ghost: 1,
        })
    }

    /// Builds the grid whose spacing is closest to `h`. The spacing is then
    /// adjusted to `(x_right - x_left) / n_cells` exactly.
    pub fn with_spacing(x_left: f64, x_right: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::config("h", format!("cell width must be positive, got {h}")));
        }
        let n = ((x_right - x_left) / h).round();
        if !(n.is_finite() && n >= 1.0) {
            return Err(Error::config("h", format!("cell width {h} does not fit the domain")));
        }
        Self::new(x_left, x_right, n as usize)
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn ghost(&self) -> usize {
        self.ghost
    }

    pub fn center(&self, j: usize) -> f64 {
        self.x_left + (j as f64 + 0.5) * self.h
    }

    /// Left edge of cell `j`.
    pub fn edge(&self, j: usize) -> f64 {
        self.x_left + j as f64 * self.h
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.center(j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_geometry() {
        assert!(Grid::new(1.0, 0.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
        assert!(Grid::with_spacing(0.0, 1.0, -0.1).is_err());
        assert!(Grid::with_spacing(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn centers_are_uniform() {
        let g = Grid::with_spacing(-50.0, 50.0, 0.05).unwrap();
        assert_eq!(g.n_cells(), 2000);
        let xs = g.centers();
        for w in xs.windows(2) {
            let d = w[1] - w[0];
            assert!(d > 0.0);
            assert!((d - g.h()).abs() <= 4.0 * f64::EPSILON * 50.0);
        }
        assert!((xs[0] - (-50.0 + 0.025)).abs() < 1e-12);
    }
}
