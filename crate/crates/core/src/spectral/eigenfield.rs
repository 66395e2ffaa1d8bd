use super::calculators::generator_point_spectrum_region;
use crate::analytic::{coeffs_from_samples, sample_on_circle, CirclePlan, CoeffVector};
use crate::error::{fmt_c, Error, Result};
use crate::quadrature::GaussRule;
use crate::semiflows::Semiflow;
use crate::subordination::{general_subordinated_apply_offset, laplace_transform, subordinate_matrix, BorelMeasure};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Rectangular grid of exponents `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuGrid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl MuGrid {
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let t = |a: f64, b: f64, n: usize, k: usize| {
            if n == 1 {
                a
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        };
        Complex64::new(t(self.re.0, self.re.1, self.nx, i), t(self.im.0, self.im.1, self.ny, j))
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.ny)
            .flat_map(|j| (0..self.nx).map(move |i| (i, j)))
            .map(|(i, j)| self.point(i, j))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenfieldMode {
    /// Evaluate `𝓗_ν e^{μh}` at 32 points of `|z| ≤ 0.9`.
    Pointwise,
    /// Compare coefficient vectors through the order-`N` compression.
    Coefficient { order: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenfieldEntry {
    pub mu: Complex64,
    /// `𝓛(ν)(−μ)`.
    pub eigenvalue: Complex64,
    pub residual: f64,
    /// Truncation allowance in coefficient mode; zero in pointwise mode.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenfieldReport {
    pub entries: Vec<EigenfieldEntry>,
    /// `|∮ 𝓛(ν)(−μ) dμ|` around each grid cell.
    pub cauchy_residuals: Vec<f64>,
    /// Constant `C` of the coefficient-mode allowance.
    pub tail_constant: Option<f64>,
}

impl EigenfieldReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    pub fn max_cauchy(&self) -> f64 {
        self.cauchy_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Sample points for the pointwise mode: four radii up to 0.9, eight angles each.
pub fn witness_points() -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(32);
    for (i, r) in [0.3, 0.55, 0.75, 0.9].iter().enumerate() {
        for j in 0..8 {
            let th = 2.0 * PI * (j as f64 + 0.25 * i as f64) / 8.0;
            pts.push(Complex64::from_polar(*r, th));
        }
    }
    pts
}

const SUBSEGMENTS: usize = 8;

/// `∮ g dμ` around the rectangle with corners `a` (lower left) and `b` (upper
/// right), four Gauss–Legendre nodes on each of eight pieces per edge.
fn cell_contour(g: &dyn Fn(Complex64) -> Result<Complex64>, a: Complex64, b: Complex64) -> Result<Complex64> {
    let corners = [a, Complex64::new(b.re, a.im), b, Complex64::new(a.re, b.im), a];
    let rule = GaussRule::legendre(4);
    let mut total = Complex64::new(0.0, 0.0);
    for edge in corners.windows(2) {
        let (p, q) = (edge[0], edge[1]);
        for k in 0..SUBSEGMENTS {
            let s0 = k as f64 / SUBSEGMENTS as f64;
            let s1 = (k + 1) as f64 / SUBSEGMENTS as f64;
            for (s, w) in rule.mapped(s0, s1).iter() {
                total += g(p + (q - p) * s)? * (q - p) * w;
            }
        }
    }
    Ok(total)
}

/// Checks `𝓗_ν e^{μh} = 𝓛(ν)(−μ) e^{μh}` over a grid of exponents inside the
/// open region where `e^{μh} ∈ H^p`, and the analyticity of
/// `μ ↦ 𝓛(ν)(−μ)` through contour integrals over the grid cells.
///
/// An analytic family of eigenvectors on an open set is exactly what rules out
/// the single-valued extension property.
pub fn eigenfield_witness(
    flow: &Semiflow,
    nu: &BorelMeasure,
    grid: &MuGrid,
    p: f64,
    mode: EigenfieldMode,
) -> Result<EigenfieldReport> {
    if grid.nx == 0 || grid.ny == 0 {
        return Err(Error::InvalidArgument("empty exponent grid".into()));
    }
    let (inner, _) = generator_point_spectrum_region(flow, p)?;
    let mus = grid.points();
    if let Some(bad) = mus.iter().find(|m| !inner.contains(**m)) {
        return Err(Error::Domain(format!(
            "μ = {} lies outside the region where e^{{μh}} belongs to H^{p}",
            fmt_c(*bad)
        )));
    }

    let mut entries = Vec::with_capacity(mus.len());
    let mut tail_constant = None;
    match mode {
        EigenfieldMode::Pointwise => {
            let zs = witness_points();
            for &mu in &mus {
                let eigenvalue = laplace_transform(nu, -mu)?;
                let f = move |s: Complex64| (mu * flow.koenigs_unchecked(s)).exp();
                let f_offset = move |s: Complex64, w: Complex64| (mu * flow.koenigs_at_offset(s, w)).exp();
                let mut residual = 0.0f64;
                for &z in &zs {
                    let mut value: Complex64 = nu
                        .atoms()
                        .iter()
                        .map(|&(t, w)| w * f(flow.phi_unchecked(t, z)))
                        .sum();
                    if let Some(d) = nu.density() {
                        value += general_subordinated_apply_offset(flow, d, &f_offset, z, mu.re.max(0.0), 1e-13)?.value;
                    }
                    residual = residual.max((value - eigenvalue * f(z)).norm());
                }
                entries.push(EigenfieldEntry {
                    mu,
                    eigenvalue,
                    residual,
                    tolerance: 0.0,
                });
            }
        }
        EigenfieldMode::Coefficient { order } => {
            let h = subordinate_matrix(flow, nu, order, None)?;
            let h_scale = (0..=order)
                .flat_map(|k| (0..=order).map(move |m| (m, k)))
                .map(|(m, k)| (k as f64 + 1.0) * h.entry(m, k).norm())
                .fold(0.0f64, f64::max);
            let plan = CirclePlan::for_order(order);
            let mut c_max = 0.0f64;
            for &mu in &mus {
                let eigenvalue = laplace_transform(nu, -mu)?;
                let samples = sample_on_circle(|s| (mu * flow.koenigs_unchecked(s)).exp(), &plan);
                let x: CoeffVector = coeffs_from_samples(&samples, &plan, order)?.coeffs;
                let hx = h.apply(&x)?;
                let residual = hx
                    .coeffs()
                    .iter()
                    .zip(x.coeffs())
                    .take(order / 2 + 1)
                    .map(|(a, b)| (a - eigenvalue * b).norm())
                    .fold(0.0f64, f64::max);
                let cx = x
                    .coeffs()
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, v)| v.norm() * (k as f64).powf(1.0 - mu.re))
                    .fold(0.0f64, f64::max);
                let c = cx * h_scale;
                c_max = c_max.max(c);
                // Σ_{k>N} k^{Re μ − 2} ≤ N^{Re μ − 1}/(1 − Re μ)
                let tail = (order as f64).powf(mu.re - 1.0) / (1.0 - mu.re);
                entries.push(EigenfieldEntry {
                    mu,
                    eigenvalue,
                    residual,
                    tolerance: c * tail,
                });
            }
            tail_constant = Some(c_max);
        }
    }

    let g = |mu: Complex64| laplace_transform(nu, -mu);
    let mut cauchy_residuals = Vec::new();
    for j in 0..grid.ny.saturating_sub(1) {
        for i in 0..grid.nx.saturating_sub(1) {
            let a = grid.point(i, j);
            let b = grid.point(i + 1, j + 1);
            cauchy_residuals.push(cell_contour(&g, a, b)?.norm());
        }
    }
    Ok(EigenfieldReport {
        entries,
        cauchy_residuals,
        tail_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(mu: Complex64) -> MuGrid {
        MuGrid { re: (mu.re, mu.re), im: (mu.im, mu.im), nx: 1, ny: 1 }
    }

    #[test]
    fn spec_examples() {
        let flow = Semiflow::affine();
        let nu = BorelMeasure::exponential(c(1.0, 0.0)).unwrap();
        for (mu, lam) in [(0.0, 1.0), (-1.0, 0.5), (0.3, 1.0 / 0.7)] {
            let r = eigenfield_witness(&flow, &nu, &single(c(mu, 0.0)), 2.0, EigenfieldMode::Pointwise).unwrap();
            let e = r.entries[0];
            assert!((e.eigenvalue - c(lam, 0.0)).norm() < 1e-11, "μ={mu}");
            assert!(e.residual <= 1e-10, "μ={mu}: {}", e.residual);
        }
        let r = eigenfield_witness(&flow, &nu, &single(c(0.0, 0.0)), 2.0, EigenfieldMode::Pointwise).unwrap();
        assert!(r.entries[0].residual <= 1e-12);
    }

    #[test]
    fn outside_region_rejected() {
        let flow = Semiflow::affine();
        let nu = BorelMeasure::exponential(c(1.0, 0.0)).unwrap();
        assert!(matches!(
            eigenfield_witness(&flow, &nu, &single(c(0.5, 0.0)), 2.0, EigenfieldMode::Pointwise),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn coefficient_mode_within_allowance() {
        let flow = Semiflow::affine();
        let nu = BorelMeasure::exponential(c(1.0, 0.0)).unwrap();
        let grid = MuGrid { re: (-1.0, 0.4), im: (-0.5, 0.5), nx: 3, ny: 2 };
        let r = eigenfield_witness(&flow, &nu, &grid, 2.0, EigenfieldMode::Coefficient { order: 96 }).unwrap();
        assert!(r.tail_constant.unwrap() > 0.0);
        for e in &r.entries {
            assert!(e.residual <= e.tolerance + 1e-9, "{}: {} > {}", e.mu, e.residual, e.tolerance);
        }
        assert!(r.max_cauchy() < 1e-8);
    }

    #[test]
    fn hyperbolic_automorphism_eigenfield() {
        let flow = Semiflow::hyperbolic_automorphism();
        let nu = BorelMeasure::exponential(c(1.0, 0.0)).unwrap();
        let grid = MuGrid { re: (-0.4, 0.4), im: (-0.3, 0.3), nx: 2, ny: 2 };
        let r = eigenfield_witness(&flow, &nu, &grid, 2.0, EigenfieldMode::Pointwise).unwrap();
        assert!(r.max_residual() < 1e-8, "{}", r.max_residual());
    }
}
