use super::{BorelMeasure, QuadraturePlan};
use crate::error::{fmt_c, Error, Result};
use num_complex::Complex64;

pub const DEFAULT_LAPLACE_TOL: f64 = 1e-12;

/// `𝓛(ν)(z) = ∫ e^{−zt} dν(t)` at the default tolerance.
pub fn laplace_transform(nu: &BorelMeasure, z: Complex64) -> Result<Complex64> {
    Ok(laplace_transform_with(nu, z, DEFAULT_LAPLACE_TOL)?.0)
}

/// Atoms are summed exactly; the density part is integrated by a plan sized
/// for `z`, which is returned alongside the value.
pub fn laplace_transform_with(
    nu: &BorelMeasure,
    z: Complex64,
    tol: f64,
) -> Result<(Complex64, Option<QuadraturePlan>)> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite argument {}", fmt_c(z))));
    }
    let mut total: Complex64 = nu.atoms().iter().map(|&(t, w)| w * (-z * t).exp()).sum();
    let Some(density) = nu.density() else {
        return Ok((total, None));
    };
    let plan = QuadraturePlan::for_laplace(density, z, tol)?;
    let nodes = plan.density_nodes(density);
    total += nodes.iter().map(|&(t, c)| c * (-z * t).exp()).sum::<Complex64>();
    Ok((total, Some(plan)))
}
