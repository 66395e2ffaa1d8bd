//! Gauss rules on finite intervals.
//!
//! [`GaussRule::legendre`] is computed by Newton iteration on the Legendre
//! three-term recurrence. [`GaussRule::jacobi_unit`] handles the weight `u^β` on
//! `[0, 1]` through the Golub–Welsch eigenproblem of the Jacobi matrix. The
//! geometric mesh in [`graded_unit_interval`] combines both to integrate
//! functions with an algebraic (possibly oscillating) singularity at `u = 0`.

use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Nodes and weights of a quadrature rule on a fixed reference interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss–Legendre rule with `n` nodes on `[-1, 1]`.
    pub fn legendre(n: usize) -> Self {
        assert!(n > 0, "a Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Gauss–Jacobi rule for `∫_0^1 u^β g(u) du`, `β > -1`.
    pub fn jacobi_unit(n: usize, beta: f64) -> Self {
        assert!(n > 0, "a Gauss rule needs at least one node");
        assert!(beta > -1.0 && beta.is_finite(), "Jacobi exponent must exceed -1");
        if beta == 0.0 {
            let leg = Self::legendre(n);
            return leg.mapped(0.0, 1.0);
        }
        // Jacobi matrix for (1-x)^0 (1+x)^β on [-1, 1].
        let a = 0.0_f64;
        let b = beta;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let fi = i as f64;
            jac[(i, i)] = if i == 0 {
                (b - a) / (a + b + 2.0)
            } else {
                let s = 2.0 * fi + a + b;
                (b * b - a * a) / (s * (s + 2.0))
            };
            if i + 1 < n {
                let k = fi + 1.0;
                let s = 2.0 * k + a + b;
                let off = 2.0 / s
                    * (k * (k + a) * (k + b) * (k + a + b) / ((s + 1.0) * (s - 1.0))).sqrt();
                jac[(i, i + 1)] = off;
                jac[(i + 1, i)] = off;
            }
        }
        let eig = SymmetricEigen::new(jac);
        // Total mass of (1+x)^β on [-1,1] is 2^{β+1}/(β+1); on [0,1] the weight u^β has mass 1/(β+1).
        let mass = 1.0 / (beta + 1.0);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let x = eig.eigenvalues[j];
                let v0 = eig.eigenvectors[(0, j)];
                (0.5 * (1.0 + x), mass * v0 * v0)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Affinely maps a rule from `[-1, 1]` to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Self {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        Self {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| half * w).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Geometric mesh on `[0, 1]` refined toward `u = 0`.
///
/// Returns nodes and weights approximating `∫_0^1 u^β g(u) du`. The intervals
/// `[q^{l+1}, q^l]` for `l < levels` carry Gauss–Legendre rules with the weight
/// `u^β` folded into the weights; the innermost interval `[0, q^levels]` uses
/// the Gauss–Jacobi rule for `u^β`.
pub fn graded_unit_interval(beta: f64, ratio: f64, levels: usize, per_level: usize) -> GaussRule {
    assert!(ratio > 0.0 && ratio < 1.0);
    let leg = GaussRule::legendre(per_level);
    let mut nodes = Vec::with_capacity((levels + 1) * per_level);
    let mut weights = Vec::with_capacity((levels + 1) * per_level);
    let mut hi = 1.0_f64;
    for _ in 0..levels {
        let lo = hi * ratio;
        for (x, w) in leg.mapped(lo, hi).iter() {
            nodes.push(x);
            weights.push(w * x.powf(beta));
        }
        hi = lo;
    }
    let inner = GaussRule::jacobi_unit(per_level, beta);
    let scale = hi.powf(beta + 1.0);
    for (x, w) in inner.iter() {
        nodes.push(hi * x);
        weights.push(scale * w);
    }
    GaussRule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = GaussRule::legendre(7);
        for deg in 0..14 {
            let approx: f64 = rule.iter().map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((approx - exact).abs() < 1e-14, "degree {deg}: {approx} vs {exact}");
        }
    }

    #[test]
    fn legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 33, 64] {
            let s: f64 = GaussRule::legendre(n).weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: {s}");
        }
    }

    #[test]
    fn jacobi_moments_match_beta_integrals() {
        // ∫_0^1 u^β u^k du = 1/(β+k+1)
        for beta in [-0.7, -0.5, 0.3, 1.5] {
            let rule = GaussRule::jacobi_unit(12, beta);
            for k in 0..20 {
                let approx: f64 = rule.iter().map(|(u, w)| w * u.powi(k)).sum();
                let exact = 1.0 / (beta + k as f64 + 1.0);
                assert!(
                    ((approx - exact) / exact).abs() < 1e-12,
                    "beta={beta} k={k}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn graded_mesh_handles_log_singularity() {
        // ∫_0^1 u^{-1/2} ln(u) du = -4
        let rule = graded_unit_interval(-0.5, 0.25, 60, 16);
        let approx: f64 = rule.iter().map(|(u, w)| w * u.ln()).sum();
        assert!((approx + 4.0).abs() < 1e-12, "{approx}");
    }
}
