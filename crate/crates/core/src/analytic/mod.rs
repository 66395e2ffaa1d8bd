//! Truncated power series on the unit disc.

mod membership;
mod sampling;

pub use membership::{
    binomial_coeffs, default_radii, hp_membership_classifier, BinomialCoeffs, CoeffSource,
    Membership, MembershipConfig, MembershipReport,
};
pub use sampling::{circle_values, coeffs_from_samples, hp_mean, sample_on_circle, Extraction};

use crate::error::{fmt_c, Error, Result};
use num_complex::Complex64;

/// Taylor coefficients `c_0, …, c_N` of an analytic function on the disc.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    coeffs: Vec<Complex64>,
}

impl CoeffVector {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a coefficient vector needs at least the constant term".into(),
            ));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { coeffs })
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); order + 1],
        }
    }

    /// `z^k` as a vector of truncation order `order ≥ k`.
    pub fn monomial(k: usize, order: usize) -> Self {
        assert!(k <= order, "monomial degree exceeds truncation order");
        let mut v = Self::zeros(order);
        v.coeffs[k] = Complex64::new(1.0, 0.0);
        v
    }

    /// Truncation order `N`; the vector holds `N + 1` coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Horner evaluation. Points outside the closed unit disc are rejected.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 {
            return Err(Error::OutsideDisc { z: fmt_c(z) });
        }
        Ok(self.horner(z))
    }

    pub(crate) fn horner(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Termwise derivative; order drops by one (a constant maps to the zero
    /// vector of order 0).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zeros(0);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(n, &c)| c * (n as f64 + 1.0))
            .collect();
        Self { coeffs }
    }

    /// `‖f‖_{H²} = (Σ |c_n|²)^{1/2}`.
    pub fn h2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Zero-pads or truncates to the given order.
    pub fn resized(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(zero);
                let b = other.coeffs.get(i).copied().unwrap_or(zero);
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Discretisation of the circle `|z| = radius` by `sample_count` equispaced
/// points `radius·ω^j`, `ω = e^{2πi/K}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePlan {
    radius: f64,
    sample_count: usize,
}

impl CirclePlan {
    pub const DEFAULT_RADIUS: f64 = 0.9;

    pub fn new(radius: f64, sample_count: usize) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "circle radius {radius} must lie strictly inside (0, 1)"
            )));
        }
        if sample_count == 0 || sample_count % 4 != 0 {
            return Err(Error::InvalidArgument(format!(
                "sample count {sample_count} must be a positive multiple of 4"
            )));
        }
        Ok(Self {
            radius,
            sample_count,
        })
    }

    /// Radius 0.9 with `K = 4(N+1)` samples.
    pub fn for_order(order: usize) -> Self {
        Self {
            radius: Self::DEFAULT_RADIUS,
            sample_count: 4 * (order + 1),
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let k = self.sample_count as f64;
        (0..self.sample_count)
            .map(move |j| Complex64::from_polar(self.radius, 2.0 * std::f64::consts::PI * j as f64 / k))
    }
}
