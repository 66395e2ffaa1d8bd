use super::Density;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use num_complex::Complex64;

/// Composite Gauss–Legendre discretization of `∫_0^{T_max} · dt`.
///
/// Panels start narrow at the origin and widen geometrically up to a cap. The
/// first panel switches to a Gauss–Jacobi rule when the density behaves like
/// `t^p` there.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePlan {
    t_max: f64,
    panels: Vec<(f64, f64)>,
    nodes_per_panel: usize,
    tail_bound: f64,
    tolerance: f64,
}

/// Panel count above which a plan is refused as impractical.
const MAX_PANELS: usize = 200_000;

impl QuadraturePlan {
    pub fn new(
        t_max: f64,
        first_width: f64,
        max_width: f64,
        nodes_per_panel: usize,
        tail_bound: f64,
        tolerance: f64,
    ) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("T_max {t_max} must be positive")));
        }
        if !(first_width > 0.0 && max_width >= first_width) || nodes_per_panel == 0 {
            return Err(Error::InvalidArgument("invalid panel layout".into()));
        }
        let mut panels = Vec::new();
        let mut a = 0.0;
        let mut w = first_width;
        while a < t_max {
            let b = (a + w).min(t_max);
            panels.push((a, b));
            a = b;
            w = (w * 1.5).min(max_width);
            if panels.len() > MAX_PANELS {
                return Err(Error::InvalidArgument(format!(
                    "T_max {t_max} needs more than {MAX_PANELS} panels"
                )));
            }
        }
        Ok(Self {
            t_max,
            panels,
            nodes_per_panel,
            tail_bound,
            tolerance,
        })
    }

    /// Plan for `∫ e^{−zt} ρ(t) dt` at accuracy `tol`: the tail
    /// `M e^{−(ω+Re z)T}/(ω+Re z)` is kept below `tol/10` and panels resolve the
    /// oscillation of `e^{−zt}ρ(t)`.
    pub fn for_laplace(density: &Density, z: Complex64, tol: f64) -> Result<Self> {
        let b = density.bound();
        let d = b.omega + z.re;
        if !(d > 0.0) {
            return Err(Error::DivergentLaplace {
                z: crate::error::fmt_c(z),
                bound: -b.omega,
            });
        }
        let t_max = required_t_max(b.m, d, tol).max(1.0);
        let freq = z.norm() + density.frequency();
        let max_width = 0.25f64.min(8.0 / freq.max(1e-300));
        let first = max_width.min(0.125);
        Self::new(t_max, first, max_width, 16, tail(b.m, d, t_max), tol)
    }

    /// Plan for the Bochner integral of a compression of order `order` against
    /// `density`, for a semigroup with `‖T_t‖ ≤ M e^{ωt}`.
    pub fn for_subordination(
        density: &Density,
        growth: (f64, f64),
        order: usize,
        tol: f64,
    ) -> Result<Self> {
        let b = density.bound();
        let (m, omega) = growth;
        let d = b.omega - omega;
        if !(d > 0.0) {
            return Err(Error::Inadmissible(format!(
                "density decay {} does not beat semigroup growth {omega}",
                b.omega
            )));
        }
        let t_max = required_t_max(b.m * m, d, tol).max(1.0);
        let max_width = 0.25f64.min(8.0 / density.frequency().max(1e-300));
        let first = (2.0 / (order as f64 + 1.0)).min(max_width);
        Self::new(t_max, first, max_width, 16, tail(b.m * m, d, t_max), tol)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn panels(&self) -> &[(f64, f64)] {
        &self.panels
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Nodes `t_i` and weights `c_i` with `Σ c_i g(t_i) ≈ ∫_0^{T} ρ(t) g(t) dt`.
    pub fn density_nodes(&self, density: &Density) -> Vec<(f64, Complex64)> {
        self.nodes_with(self.nodes_per_panel, density.endpoint_power(), |t, first| {
            if first {
                density.eval_smooth(t)
            } else {
                density.eval(t)
            }
        })
    }

    /// Generic driver: on the first panel `weight(t, true)` must return the
    /// integrand divided by `t^p`; elsewhere the integrand itself.
    pub(crate) fn nodes_with(
        &self,
        per_panel: usize,
        endpoint_power: f64,
        weight: impl Fn(f64, bool) -> Complex64,
    ) -> Vec<(f64, Complex64)> {
        let leg = GaussRule::legendre(per_panel);
        let mut out = Vec::with_capacity(self.panels.len() * per_panel);
        for (i, &(a, b)) in self.panels.iter().enumerate() {
            if i == 0 && a == 0.0 {
                let jac = GaussRule::jacobi_unit(per_panel, endpoint_power);
                let scale = b.powf(endpoint_power + 1.0);
                for (u, w) in jac.iter() {
                    let t = b * u;
                    out.push((t, weight(t, true) * (scale * w)));
                }
            } else {
                for (t, w) in leg.mapped(a, b).iter() {
                    out.push((t, weight(t, false) * w));
                }
            }
        }
        out
    }
}

fn tail(m: f64, d: f64, t: f64) -> f64 {
    m * (-d * t).exp() / d
}

/// Smallest `T` with `m e^{−dT}/d ≤ tol/10`.
pub(crate) fn required_t_max(m: f64, d: f64, tol: f64) -> f64 {
    ((10.0 * m / (d * tol)).ln() / d).max(0.0)
}
