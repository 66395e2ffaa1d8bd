use crate::analytic::CoeffVector;
use crate::error::{Error, Result};
use crate::matrices::{CompressionExactness, OperatorMatrix};
use num_complex::Complex64;

/// `r_n = ‖Aⁿx‖^{1/n}` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRadiusTrace {
    /// `(n, r_n)`.
    pub values: Vec<(usize, f64)>,
    /// `log ‖Aⁿx‖`, kept separately so that tiny or huge norms stay exact.
    pub log_norms: Vec<f64>,
    /// First `n` with `Aⁿx = 0` exactly.
    pub nilpotent_at: Option<usize>,
    /// Whether `A` is an exact lower compression, so that `‖Aⁿx‖` equals
    /// `‖P_N Tⁿ x‖` for the underlying operator `T`.
    pub exact_truncated_norms: bool,
    pub renormalize_every: usize,
}

impl LocalRadiusTrace {
    pub fn radius(&self, n: usize) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == n).map(|(_, r)| *r)
    }

    /// First `n` in `from..=to` where `r_{n+1} ≤ r_n`, if any.
    pub fn first_non_increase(&self, from: usize, to: usize) -> Option<usize> {
        (from..to).find(|&n| match (self.radius(n), self.radius(n + 1)) {
            (Some(a), Some(b)) => b <= a,
            _ => false,
        })
    }

    pub fn is_strictly_increasing(&self, from: usize, to: usize) -> bool {
        self.first_non_increase(from, to).is_none()
    }
}

/// Renormalized powering with the default schedule (renormalize every step).
pub fn local_radius_trace(a: &OperatorMatrix, x: &CoeffVector, n_max: usize) -> Result<LocalRadiusTrace> {
    local_radius_trace_with(a, x, n_max, 1)
}

/// As [`local_radius_trace`], rescaling the iterate to unit norm every
/// `renormalize_every` steps and accumulating the logarithm of the scale.
pub fn local_radius_trace_with(
    a: &OperatorMatrix,
    x: &CoeffVector,
    n_max: usize,
    renormalize_every: usize,
) -> Result<LocalRadiusTrace> {
    if x.order() != a.order() {
        return Err(Error::OrderMismatch {
            left: a.order(),
            right: x.order(),
        });
    }
    if renormalize_every == 0 {
        return Err(Error::InvalidArgument("renormalization interval must be positive".into()));
    }
    let x0 = x.h2_norm();
    if x0 == 0.0 {
        return Err(Error::InvalidArgument("starting vector must be nonzero".into()));
    }
    let mut v: Vec<Complex64> = x.coeffs().iter().map(|c| c / x0).collect();
    let mut log_scale = x0.ln();
    let mut values = Vec::with_capacity(n_max);
    let mut log_norms = Vec::with_capacity(n_max);
    let mut nilpotent_at = None;
    for n in 1..=n_max {
        if nilpotent_at.is_some() {
            values.push((n, 0.0));
            log_norms.push(f64::NEG_INFINITY);
            continue;
        }
        v = a.apply_slice(&v);
        let nrm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            nilpotent_at = Some(n);
            values.push((n, 0.0));
            log_norms.push(f64::NEG_INFINITY);
            continue;
        }
        let log_norm = log_scale + nrm.ln();
        values.push((n, (log_norm / n as f64).exp()));
        log_norms.push(log_norm);
        if n % renormalize_every == 0 {
            log_scale += nrm.ln();
            for c in &mut v {
                *c /= nrm;
            }
        }
    }
    Ok(LocalRadiusTrace {
        values,
        log_norms,
        nilpotent_at,
        exact_truncated_norms: a.exactness() == CompressionExactness::ExactLower,
        renormalize_every,
    })
}
