use crate::error::{Error, Result};
use crate::matrices::OperatorMatrix;
use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Smallest singular values of `A − zI` for many shifts `z`.
///
/// Triangular compressions are used as they are; anything else is first
/// reduced to complex Schur form `A = Q T Q*`, which leaves singular values
/// unchanged. Each shift then costs a Lanczos run on
/// `(T − z)^{−*}(T − z)^{−1}` with two triangular solves per step.
#[derive(Debug, Clone)]
pub struct ShiftedSolver {
    t: DMatrix<Complex64>,
    lower: bool,
}

const LANCZOS_MAX: usize = 80;
const LANCZOS_TOL: f64 = 1e-11;

impl ShiftedSolver {
    pub fn new(a: &OperatorMatrix) -> Self {
        let s = a.structure();
        if s.is_lower() {
            Self {
                t: a.entries().clone(),
                lower: true,
            }
        } else if s.is_upper() {
            Self {
                t: a.entries().clone(),
                lower: false,
            }
        } else {
            let (_, t) = Schur::new(a.entries().clone()).unpack();
            let n = t.nrows();
            // Clear the rounding residue below the diagonal.
            let t = DMatrix::from_fn(n, n, |i, j| if i > j { Complex64::new(0.0, 0.0) } else { t[(i, j)] });
            Self { t, lower: false }
        }
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// `x ← (T − z)^{−1} x`.
    fn solve(&self, z: Complex64, x: &mut [Complex64]) {
        let n = x.len();
        if self.lower {
            for k in 0..n {
                let col = self.t.column(k);
                let col = col.as_slice();
                let xk = x[k] / (col[k] - z);
                x[k] = xk;
                for (xi, a) in x[k + 1..].iter_mut().zip(&col[k + 1..]) {
                    *xi -= a * xk;
                }
            }
        } else {
            for k in (0..n).rev() {
                let col = self.t.column(k);
                let col = col.as_slice();
                let xk = x[k] / (col[k] - z);
                x[k] = xk;
                for (xi, a) in x[..k].iter_mut().zip(&col[..k]) {
                    *xi -= a * xk;
                }
            }
        }
    }

    /// `x ← (T − z)^{−*} x`.
    fn solve_adjoint(&self, z: Complex64, x: &mut [Complex64]) {
        let n = x.len();
        if self.lower {
            for k in (0..n).rev() {
                let col = self.t.column(k);
                let col = col.as_slice();
                let s: Complex64 = col[k + 1..]
                    .iter()
                    .zip(&x[k + 1..])
                    .map(|(a, y)| a.conj() * y)
                    .sum();
                x[k] = (x[k] - s) / (col[k] - z).conj();
            }
        } else {
            for k in 0..n {
                let col = self.t.column(k);
                let col = col.as_slice();
                let s: Complex64 = col[..k].iter().zip(&x[..k]).map(|(a, y)| a.conj() * y).sum();
                x[k] = (x[k] - s) / (col[k] - z).conj();
            }
        }
    }

    /// `σ_min(A − zI)`.
    pub fn sigma_min(&self, z: Complex64) -> f64 {
        let n = self.dim();
        if (0..n).any(|k| self.t[(k, k)] == z) {
            return 0.0;
        }
        match self.lanczos(z) {
            Some(s) => s,
            None => sigma_min_dense(&self.t, z),
        }
    }

    /// Largest eigenvalue of `(T − z)^{−*}(T − z)^{−1}` by Lanczos with full
    /// reorthogonalization; `None` when the solves overflow.
    fn lanczos(&self, z: Complex64) -> Option<f64> {
        let n = self.dim();
        let steps = LANCZOS_MAX.min(n);
        let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(steps);
        let start: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(1.0 + 0.5 * (k as f64 * 0.7).sin(), 0.3 * (k as f64 * 1.3).cos()))
            .collect();
        let nrm = norm(&start);
        q.push(start.iter().map(|v| v / nrm).collect());
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut theta_prev = 0.0;
        for j in 0..steps {
            let mut w = q[j].clone();
            self.solve(z, &mut w);
            self.solve_adjoint(z, &mut w);
            if !w.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                return None;
            }
            let a = dot(&q[j], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                for qi in &q {
                    let c = dot(qi, &w);
                    for (wk, qk) in w.iter_mut().zip(qi) {
                        *wk -= c * qk;
                    }
                }
            }
            let b = norm(&w);
            let m = alpha.len();
            let tri = DMatrix::from_fn(m, m, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(tri);
            let (idx, theta) = eig
                .eigenvalues
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
            let residual = b * eig.eigenvectors[(m - 1, idx)].abs();
            let done = residual <= LANCZOS_TOL * theta
                || (j > 0 && (theta - theta_prev).abs() <= 1e-14 * theta)
                || b <= 1e-300
                || j + 1 == steps;
            theta_prev = theta;
            if done {
                return (theta > 0.0 && theta.is_finite()).then(|| 1.0 / theta.sqrt());
            }
            beta.push(b);
            q.push(w.iter().map(|v| v / b).collect());
        }
        None
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `σ_min(M − zI)` by a dense SVD.
pub fn sigma_min_dense(m: &DMatrix<Complex64>, z: Complex64) -> f64 {
    let n = m.nrows();
    let shifted = m - DMatrix::<Complex64>::identity(n, n) * z;
    shifted
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `σ_min(A − zI)` for a single shift.
pub fn sigma_min(a: &OperatorMatrix, z: Complex64) -> f64 {
    ShiftedSolver::new(a).sigma_min(z)
}

/// Rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudospectrumGrid {
    pub bounds: GridBox,
    pub nx: usize,
    pub ny: usize,
    pub order: usize,
    /// Row-major in `y`: `values[j * nx + i]` belongs to `point(i, j)`.
    pub values: Vec<f64>,
}

/// Largest grid accepted by [`pseudospectrum_grid`] along either axis.
pub const MAX_GRID: usize = 400;

fn axis(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        a
    } else {
        a + (b - a) * i as f64 / (n - 1) as f64
    }
}

impl PseudospectrumGrid {
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            axis(self.bounds.x0, self.bounds.x1, self.nx, i),
            axis(self.bounds.y0, self.bounds.y1, self.ny, j),
        )
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Largest `|z|` among grid points with `σ_min ≤ ε`.
    pub fn max_modulus_below(&self, eps: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.value(i, j) <= eps {
                    let r = self.point(i, j).norm();
                    best = Some(best.map_or(r, |b: f64| b.max(r)));
                }
            }
        }
        best
    }
}

/// `σ_min(A − zI)` on an `nx × ny` grid over `bounds`.
pub fn pseudospectrum_grid(a: &OperatorMatrix, bounds: GridBox, resolution: (usize, usize)) -> Result<PseudospectrumGrid> {
    let (nx, ny) = resolution;
    if nx == 0 || ny == 0 || nx > MAX_GRID || ny > MAX_GRID {
        return Err(Error::InvalidArgument(format!(
            "grid resolution {nx}x{ny} must lie between 1 and {MAX_GRID} per axis"
        )));
    }
    let finite = [bounds.x0, bounds.x1, bounds.y0, bounds.y1].iter().all(|v| v.is_finite());
    if !finite || bounds.x0 > bounds.x1 || bounds.y0 > bounds.y1 {
        return Err(Error::InvalidArgument(format!("invalid box {bounds:?}")));
    }
    let solver = ShiftedSolver::new(a);
    let values: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % nx, idx / nx);
            let z = Complex64::new(axis(bounds.x0, bounds.x1, nx, i), axis(bounds.y0, bounds.y1, ny, j));
            solver.sigma_min(z)
        })
        .collect();
    Ok(PseudospectrumGrid {
        bounds,
        nx,
        ny,
        order: a.order(),
        values,
    })
}

/// Radial resolution of [`pseudospectral_radius`].
pub const RADIAL_RESOLUTION: f64 = 1e-2;

/// Outermost crossing of `σ_min ≤ ε` along the ray at angle `theta`, found by
/// marching inward from a radius where `σ_min > ε` is guaranteed. Steps of
/// `σ_min − ε` are safe because `σ_min` is 1-Lipschitz in `z`.
fn ray_crossing(solver: &ShiftedSolver, theta: f64, eps: f64, start: f64) -> Option<f64> {
    let dir = Complex64::from_polar(1.0, theta);
    let mut r = start;
    let mut outside = start;
    loop {
        let s = solver.sigma_min(dir * r);
        if s <= eps {
            // Bisect between the last radius known outside and r.
            let (mut lo, mut hi) = (r, outside);
            while hi - lo > 0.1 * RADIAL_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                if solver.sigma_min(dir * mid) <= eps {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(lo);
        }
        outside = r;
        if r <= 0.0 {
            return None;
        }
        r = (r - (s - eps).max(1e-3)).max(0.0);
    }
}

/// Largest `|z|` with `σ_min(A − zI) ≤ ε`: 64 rays, then two rounds of angular
/// refinement around the best ray, each crossing located to within a tenth of
/// the radial resolution.
pub fn pseudospectral_radius(a: &OperatorMatrix, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("ε = {eps} must be positive")));
    }
    let solver = ShiftedSolver::new(a);
    let start = a.frobenius_norm() + eps + 1e-3;
    let rays = 64;
    let crossings: Vec<(f64, f64)> = (0..rays)
        .into_par_iter()
        .filter_map(|k| {
            let th = 2.0 * PI * k as f64 / rays as f64;
            ray_crossing(&solver, th, eps, start).map(|r| (th, r))
        })
        .collect();
    let Some(&(mut best_theta, mut best)) = crossings.iter().max_by(|x, y| x.1.total_cmp(&y.1)) else {
        return Ok(0.0);
    };
    let mut width = 2.0 * PI / rays as f64;
    for _ in 0..2 {
        let refined: Vec<(f64, f64)> = (-8..=8)
            .into_par_iter()
            .filter(|&k| k != 0)
            .filter_map(|k| {
                let th = best_theta + width * k as f64 / 8.0;
                ray_crossing(&solver, th, eps, start).map(|r| (th, r))
            })
            .collect();
        for (th, r) in refined {
            if r > best {
                best = r;
                best_theta = th;
            }
        }
        width /= 8.0;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{cesaro_matrix, composition_matrix_affine, diagonal_matrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spec_examples() {
        assert!((sigma_min(&OperatorMatrix::identity(10), c(0.0, 0.0)) - 1.0).abs() < 1e-12);
        let d = diagonal_matrix(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((sigma_min(&d, c(0.5, 0.0)) - 0.5).abs() < 1e-12);
        assert!(sigma_min(&cesaro_matrix(100), c(1.0, 0.0)) <= 1e-3);
    }

    #[test]
    fn agrees_with_dense_svd() {
        let cases = [
            cesaro_matrix(40),
            cesaro_matrix(40).adjoint(),
            composition_matrix_affine(c(0.6, 0.0), c(0.4, 0.0), 30).unwrap(),
            cesaro_matrix(20).product(&cesaro_matrix(20).adjoint()).unwrap(),
        ];
        for a in &cases {
            let solver = ShiftedSolver::new(a);
            for z in [c(1.5, 0.3), c(0.4, -0.6), c(2.2, 0.0), c(-0.3, 0.1), c(0.02, 0.01)] {
                let fast = solver.sigma_min(z);
                let dense = sigma_min_dense(a.entries(), z);
                assert!((fast - dense).abs() <= 1e-8 * dense.max(1e-6), "{z}: {fast} vs {dense}");
            }
        }
    }

    #[test]
    fn radius_examples() {
        let r = pseudospectral_radius(&OperatorMatrix::identity(6), 0.1).unwrap();
        assert!((r - 1.1).abs() <= RADIAL_RESOLUTION, "{r}");
        let d = diagonal_matrix(&[c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        let r = pseudospectral_radius(&d, 0.01).unwrap();
        assert!((r - 2.01).abs() <= RADIAL_RESOLUTION, "{r}");
    }

    #[test]
    fn grid_layout() {
        let a = OperatorMatrix::identity(3);
        let g = pseudospectrum_grid(&a, GridBox { x0: 0.0, x1: 2.0, y0: -1.0, y1: 1.0 }, (5, 3)).unwrap();
        assert_eq!(g.values.len(), 15);
        assert_eq!(g.point(4, 2), c(2.0, 1.0));
        assert!((g.value(2, 1) - 0.0).abs() < 1e-15);
        assert!((g.value(0, 0) - 2f64.sqrt()).abs() < 1e-12);
        assert!(pseudospectrum_grid(&a, g.bounds, (401, 2)).is_err());
    }
}
