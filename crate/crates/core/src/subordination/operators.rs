use super::{BorelMeasure, Density, QuadraturePlan};
use crate::error::{fmt_c, Error, Result};
use crate::matrices::{CompressionExactness, OperatorMatrix, Structure};
use crate::quadrature::graded_unit_interval;
use crate::semiflows::{FlowKind, Semiflow};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Default entrywise tolerance for [`subordinate_matrix`].
pub const DEFAULT_SUBORDINATION_TOL: f64 = 1e-10;

/// Value of a quadrature together with an a posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureValue {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Compression of `𝓗_ν = ∫ T_t dν(t)`, with `T_t = C_{φ_t}` on `H²`.
///
/// Atoms contribute `w_j M(φ_{t_j})`; the density is integrated entrywise on
/// `plan` (built by [`QuadraturePlan::for_subordination`] when `None`). The
/// affine flow keeps its exact upper-triangular structure.
pub fn subordinate_matrix(
    flow: &Semiflow,
    nu: &BorelMeasure,
    order: usize,
    plan: Option<&QuadraturePlan>,
) -> Result<OperatorMatrix> {
    nu.check_admissible(flow.type_on_hp(2.0))?;
    let n = order + 1;
    let mut acc = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut add = |t: f64, w: Complex64| -> Result<()> {
        let m = flow.composition_matrix(t, order, None)?;
        acc.zip_apply(m.entries(), |a, b| *a += w * b);
        Ok(())
    };
    for &(t, w) in nu.atoms() {
        add(t, w)?;
    }
    if let Some(density) = nu.density() {
        let growth = flow.h2_growth_bound();
        let owned;
        let plan = match plan {
            Some(p) => p,
            None => {
                owned = QuadraturePlan::for_subordination(
                    density,
                    growth,
                    order,
                    DEFAULT_SUBORDINATION_TOL,
                )?;
                &owned
            }
        };
        let (m, omega) = growth;
        let b = density.bound();
        let d = b.omega - omega;
        if !(d > 0.0) {
            return Err(Error::Inadmissible(format!(
                "density decay {} does not beat semigroup growth {omega}",
                b.omega
            )));
        }
        let tail = b.m * m * (-d * plan.t_max()).exp() / d;
        if tail > plan.tolerance() {
            return Err(Error::PlanTooSmall {
                tail,
                tol: plan.tolerance(),
                required_t_max: super::plan::required_t_max(b.m * m, d, plan.tolerance()),
            });
        }
        for (t, w) in plan.density_nodes(density) {
            add(t, w)?;
        }
    }
    if flow.kind() == FlowKind::AffineHyperbolic {
        for k in 0..n {
            for m in k + 1..n {
                acc[(m, k)] = Complex64::new(0.0, 0.0);
            }
        }
        OperatorMatrix::new(acc, Structure::Upper, CompressionExactness::ExactUpper)
    } else {
        OperatorMatrix::general(acc)
    }
}

fn check_point(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisc { z: fmt_c(z) })
    }
}

/// `(𝓗_{ν_λ} f)(z)` for `ν_λ = e^{−λt} dt`, i.e. `R(λ, Δ) f` evaluated at `z`.
///
/// For the hyperbolic entries the integral `e^{λh(z)} ∫_z^1 h'(s) e^{−λh(s)} f(s) ds`
/// is taken along `s = 1 − (1 − z)u`, which turns it into `∫_0^1 u^{αλ−1} A(u) du`
/// with `A` analytic. The real part of the exponent goes into a Gauss–Jacobi
/// weight on a mesh graded toward `u = 0`; `u^{i Im αλ}` stays in the integrand.
/// Other flows integrate `∫ e^{−λt} f(φ_t(z)) dt` along the trajectory.
///
/// Any `Re λ > 0` is accepted; the identity with the resolvent needs
/// `Re λ` above the type of the semigroup on the space in question.
pub fn averaging_apply(
    flow: &Semiflow,
    lambda: Complex64,
    f: &dyn Fn(Complex64) -> Complex64,
    z: Complex64,
) -> Result<Complex64> {
    if !(lambda.re > 0.0) {
        return Err(Error::Inadmissible(format!(
            "Re λ = {} leaves a non-integrable endpoint",
            lambda.re
        )));
    }
    check_point(z)?;
    let alpha = flow.time_scale();
    let kappa = lambda * alpha;
    let one = Complex64::new(1.0, 0.0);
    let segment_factor: Option<Box<dyn Fn(Complex64) -> Complex64>> = match flow.kind() {
        FlowKind::AffineHyperbolic => Some(Box::new(move |_s| Complex64::new(alpha, 0.0))),
        FlowKind::HyperbolicAutomorphism => {
            let lz = (one + z).ln();
            Some(Box::new(move |s: Complex64| {
                2.0 * alpha / (one + s) * (kappa * (lz - (one + s).ln())).exp()
            }))
        }
        _ => None,
    };
    match segment_factor {
        Some(factor) => {
            let rule = graded_unit_interval(kappa.re - 1.0, 0.25, 60, 16);
            let mut sum = Complex64::new(0.0, 0.0);
            for (u, w) in rule.iter() {
                let s = one - (one - z) * u;
                let phase = Complex64::from_polar(1.0, kappa.im * u.ln());
                sum += w * phase * factor(s) * f(s);
            }
            Ok(sum)
        }
        None => {
            let density = Density::exponential(lambda);
            let plan = QuadraturePlan::for_laplace(&density, Complex64::new(0.0, 0.0), 1e-13)?;
            Ok(plan
                .density_nodes(&density)
                .iter()
                .map(|&(t, c)| c * f(flow.phi_unchecked(t, z)))
                .sum())
        }
    }
}

/// `(𝓗_{ν_ρ} f)(z) = ∫_z^1 h'(s) ρ(h(s) − h(z)) f(s) ds` for `dν = ρ dt`.
///
/// The path is parametrized by `s(t) = 1 − (1 − z)e^{−t/α}`, along which
/// `h(s) − h(z) = t + δ(t)` with `δ ≡ 0` for the affine flow and
/// `δ = α(log(1+s) − log(1+z))` for the hyperbolic automorphisms; a complex
/// `δ` requires the holomorphic extension of `ρ`. Flows without Koenigs data
/// use the trajectory `s = φ_t(z)` instead.
///
/// `growth` bounds the exponential rate of `|f(s(t))|` along the path and
/// lengthens the `t`-interval accordingly. The estimate adds the tail bound
/// and the gap to a coarser rule on the same panels.
pub fn general_subordinated_apply(
    flow: &Semiflow,
    density: &Density,
    f: &dyn Fn(Complex64) -> Complex64,
    z: Complex64,
    growth: f64,
    tol: f64,
) -> Result<QuadratureValue> {
    general_subordinated_apply_offset(flow, density, &|s, _| f(s), z, growth, tol)
}

/// As [`general_subordinated_apply`], with `f` receiving both `s` and the
/// offset `1 − s`. On the Koenigs paths the offset is `(1 − z)e^{−t/α}`
/// computed without cancellation, so integrands singular at the Denjoy–Wolff
/// point stay accurate after `s` itself has rounded to 1.
pub fn general_subordinated_apply_offset(
    flow: &Semiflow,
    density: &Density,
    f: &dyn Fn(Complex64, Complex64) -> Complex64,
    z: Complex64,
    growth: f64,
    tol: f64,
) -> Result<QuadratureValue> {
    check_point(z)?;
    let plan = QuadraturePlan::for_laplace(density, Complex64::new(-growth.max(0.0), 0.0), tol)?;
    let alpha = flow.time_scale();
    let one = Complex64::new(1.0, 0.0);
    let p = density.endpoint_power();
    let kind = flow.kind();
    if kind == FlowKind::HyperbolicAutomorphism && !density.has_sector_extension() {
        return Err(Error::Inadmissible(
            "the hyperbolic automorphism path needs a holomorphic extension of the density".into(),
        ));
    }
    let lz = (one + z).ln();
    let integrand = |t: f64, first: bool| -> Complex64 {
        match kind {
            FlowKind::AffineHyperbolic => {
                let w = (one - z) * (-t / alpha).exp();
                let r = if first { density.eval_smooth(t) } else { density.eval(t) };
                r * f(one - w, w)
            }
            FlowKind::HyperbolicAutomorphism => {
                let off = (one - z) * (-t / alpha).exp();
                let s = one - off;
                let w = t + alpha * ((one + s).ln() - lz);
                let r = if first {
                    let ratio = if t > 0.0 { w / t } else { one };
                    density.eval_sector_smooth(w).unwrap_or_default() * ratio.powf(p)
                } else {
                    density.eval_sector(w).unwrap_or_default()
                };
                2.0 / (one + s) * r * f(s, off)
            }
            _ => {
                let s = flow.phi_unchecked(t, z);
                let r = if first { density.eval_smooth(t) } else { density.eval(t) };
                r * f(s, one - s)
            }
        }
    };
    let fine = plan.nodes_with(plan.nodes_per_panel(), p, &integrand);
    let coarse = plan.nodes_with(plan.nodes_per_panel() - 6, p, &integrand);
    let value: Complex64 = fine.iter().map(|&(_, c)| c).sum();
    let rough: Complex64 = coarse.iter().map(|&(_, c)| c).sum();
    let scale = fine
        .iter()
        .map(|&(t, c)| {
            let r = density.eval(t).norm();
            if r > 0.0 && t > 0.0 {
                (c.norm() / r).min(1e300)
            } else {
                0.0
            }
        })
        .fold(1.0f64, f64::max);
    Ok(QuadratureValue {
        value,
        error_estimate: (value - rough).norm() + plan.tail_bound() * scale,
    })
}
