//! Dense reference solvers used as independent oracles.
#![allow(dead_code)]

use swlw::Complex64;

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            if m == 0.0 {
                continue;
            }
            let (top, rest) = a.split_at_mut(i);
            for (x, y) in rest[0][k..].iter_mut().zip(&top[k][k..]) {
                *x -= m * y;
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Damped Newton on a real system with a central-difference Jacobian.
pub fn dense_newton(residual: impl Fn(&[f64]) -> Vec<f64>, mut x: Vec<f64>, tol: f64) -> Vec<f64> {
    let n = x.len();
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for _ in 0..100 {
        let r = residual(&x);
        if norm(&r) < tol {
            break;
        }
        let mut jac = vec![vec![0.0; n]; n];
        for k in 0..n {
            let d = 1e-7 * x[k].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += d;
            xm[k] -= d;
            let (rp, rm) = (residual(&xp), residual(&xm));
            for i in 0..n {
                jac[i][k] = (rp[i] - rm[i]) / (2.0 * d);
            }
        }
        let step = dense_solve(jac, r.iter().map(|v| -v).collect());
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + t * b).collect();
            if norm(&residual(&trial)) < norm(&r) || t < 1e-6 {
                x = trial;
                break;
            }
            t *= 0.5;
        }
    }
    x
}

/// One Crank–Nicolson step of `i u_t + u_xx = cubic |u|² u + pot u` on
/// Dirichlet-padded cells, written out in real form and solved densely.
pub fn dense_cn_step(u0: &[Complex64], pot: &[f64], cubic: f64, h: f64, tau: f64) -> Vec<Complex64> {
    let n = u0.len();
    let residual = |x: &[f64]| -> Vec<f64> {
        let un1: Vec<Complex64> = (0..n).map(|j| Complex64::new(x[j], x[j + n])).collect();
        let sum = |k: isize| {
            if (0..n as isize).contains(&k) {
                un1[k as usize] + u0[k as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let mut out = vec![0.0; 2 * n];
        for j in 0..n {
            let ji = j as isize;
            let w = 0.5 * sum(ji);
            let lhs = Complex64::i() * (un1[j] - u0[j]) / tau + (sum(ji + 1) - 2.0 * sum(ji) + sum(ji - 1)) / (2.0 * h * h);
            let r = lhs - cubic * w.norm_sqr() * w - pot[j] * w;
            out[j] = r.re;
            out[j + n] = r.im;
        }
        out
    };
    let start: Vec<f64> = u0.iter().map(|z| z.re).chain(u0.iter().map(|z| z.im)).collect();
    let x = dense_newton(residual, start, 1e-14);
    (0..n).map(|j| Complex64::new(x[j], x[j + n])).collect()
}

/// Extremum of `phi` over `[min(v1,v2), max(v1,v2)]` (minimum when
/// `v1 <= v2`) by repeated zooming of a dense grid.
pub fn dense_extremum(phi: impl Fn(f64) -> f64, v1: f64, v2: f64) -> f64 {
    let sign = if v1 <= v2 { 1.0 } else { -1.0 };
    let (mut lo, mut hi) = (v1.min(v2), v1.max(v2));
    let (glo, ghi) = (lo, hi);
    let mut best = f64::INFINITY;
    for _ in 0..8 {
        let n = 2000;
        let step = (hi - lo) / n as f64;
        let mut arg = lo;
        for k in 0..=n {
            let s = lo + k as f64 * step;
            let y = sign * phi(s);
            if y < best {
                best = y;
                arg = s;
            }
        }
        lo = (arg - 2.0 * step).max(glo);
        hi = (arg + 2.0 * step).min(ghi);
        if hi - lo < 1e-15 {
            break;
        }
    }
    sign * best
}
