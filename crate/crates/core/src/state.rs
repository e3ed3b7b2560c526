use num_complex::Complex64;

use crate::error::{Error, Result};

/// Time-stamped discrete solution: complex short wave `u` and real long wave
/// `v`, one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: Vec<Complex64>,
    pub v: Vec<f64>,
}

impl State {
    pub fn new(t: f64, u: Vec<Complex64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::config(
                "state",
                format!("length mismatch: u has {} cells, v has {}", u.len(), v.len()),
            ));
        }
        let s = State { t, u, v };
        s.check_finite()?;
        Ok(s)
    }

    pub fn zeros(n: usize) -> Self {
        State {
            t: 0.0,
            u: vec![Complex64::new(0.0, 0.0); n],
            v: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(index) = self.u.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { what: "u", index });
        }
        if let Some(index) = self.v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "v", index });
        }
        Ok(())
    }

    /// Cell intensities `|u_j|^2`.
    pub fn intensity(&self) -> Vec<f64> {
        self.u.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Ghost-cell policy. The analysis lives on the whole line, so the mesh is
/// closed with homogeneous Dirichlet data for `u` and zero-order extrapolation
/// (outflow) for `v`.
pub mod boundary {
    use num_complex::Complex64;

    #[inline]
    pub fn u_at(u: &[Complex64], j: isize) -> Complex64 {
        if j < 0 || j as usize >= u.len() {
            Complex64::new(0.0, 0.0)
        } else {
            u[j as usize]
        }
    }

    #[inline]
    pub fn v_at(v: &[f64], j: isize) -> f64 {
        let n = v.len() as isize;
        v[j.clamp(0, n - 1) as usize]
    }

    /// `|u|^2` with Dirichlet ghosts.
    #[inline]
    pub fn a_at(a: &[f64], j: isize) -> f64 {
        if j < 0 || j as usize >= a.len() {
            0.0
        } else {
            a[j as usize]
        }
    }
}
