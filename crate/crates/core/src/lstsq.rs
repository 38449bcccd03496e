//! Least-squares solves shared by the AR fitter and the ADF regression.
//!
//! Designs here are tall and narrow (a few dozen rows, at most a couple of
//! dozen columns), so a one-sided Jacobi SVD is both accurate and cheap. It
//! also isolates exactly collinear columns cleanly, which the minimum-norm
//! fallback relies on.

/// Singular values below `RCOND * s_max` count as zero.
const RCOND: f64 = 1e-10;
const MAX_SWEEPS: usize = 80;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

pub(crate) struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub sse: f64,
    pub rank: usize,
    /// Pseudo-inverse of `X'X`, row-major `cols x cols`.
    pub unscaled_covariance: Vec<f64>,
}

/// Minimum-norm least-squares solution of `design * beta ~ target`.
pub(crate) fn solve(design: &Matrix, target: &[f64]) -> LeastSquares {
    let (m, n) = (design.rows, design.cols);
    assert_eq!(target.len(), m, "target length must match design rows");

    // Column-major working copy; columns are rotated until mutually orthogonal.
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..m).map(|r| design.get(r, c)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..n).map(|r| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = a.iter().map(|col| dot(col, col).sqrt()).collect();
    let s_max = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = RCOND * s_max;

    let mut coefficients = vec![0.0; n];
    let mut cov = vec![0.0; n * n];
    let mut rank = 0;
    for j in 0..n {
        let s = sigma[j];
        if s == 0.0 || s <= cutoff {
            continue;
        }
        rank += 1;
        // u_j = a_j / s_j, so (u_j . y) / s_j = (a_j . y) / s_j^2
        let weight = dot(&a[j], target) / (s * s);
        for (k, coef) in coefficients.iter_mut().enumerate() {
            *coef += v[j][k] * weight;
        }
        let inv = 1.0 / (s * s);
        for r in 0..n {
            for c in 0..n {
                cov[r * n + c] += v[j][r] * v[j][c] * inv;
            }
        }
    }

    let sse = (0..m)
        .map(|r| {
            let fitted: f64 = (0..n).map(|c| design.get(r, c) * coefficients[c]).sum();
            let e = target[r] - fitted;
            e * e
        })
        .sum();

    LeastSquares {
        coefficients,
        sse,
        rank,
        unscaled_covariance: cov,
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}
