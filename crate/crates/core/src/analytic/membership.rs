//! Numerical `H^p` membership test for functions given by coefficient
//! sequences.
//!
//! The integral means `M_p(r_j, f)` are computed on radii approaching the
//! circle. Two growth exponents against `L = log(1/(1-r))` are fitted:
//!
//! * the slope of `log M_p`, reported as the growth exponent;
//! * the slope of `log |M_p^p(r_{j+1}) - M_p^p(r_j)|` over the outer half of
//!   the schedule. For a member the increments must be summable, so this slope
//!   is negative; for a power-law nonmember it is positive. Near the critical
//!   exponent this separates cases where the first slope is still in transit.

use super::sampling::{circle_values, p_mean};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// A source of Taylor coefficients.
pub trait CoeffSource {
    /// The first `count` coefficients.
    fn prefix(&self, count: usize) -> Vec<Complex64>;
}

impl<F> CoeffSource for F
where
    F: Fn(usize) -> Complex64,
{
    fn prefix(&self, count: usize) -> Vec<Complex64> {
        (0..count).map(self).collect()
    }
}

/// Coefficients of `(1-z)^{-λ}`: `c_0 = 1`, `c_{n+1} = c_n (λ+n)/(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialCoeffs {
    pub lambda: Complex64,
}

pub fn binomial_coeffs(lambda: Complex64) -> BinomialCoeffs {
    BinomialCoeffs { lambda }
}

impl BinomialCoeffs {
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.prefix(n + 1)[n]
    }
}

impl CoeffSource for BinomialCoeffs {
    fn prefix(&self, count: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(count);
        let mut c = Complex64::new(1.0, 0.0);
        for n in 0..count {
            out.push(c);
            c = c * (self.lambda + n as f64) / (n as f64 + 1.0);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Member,
    Nonmember,
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct MembershipConfig {
    pub radii: Vec<f64>,
    /// Growth exponents at or below this count as bounded means.
    pub slope_tol: f64,
    /// Growth exponents at or above this count as unbounded means.
    pub nonmember_slope: f64,
    /// Increment exponents beyond `±increment_tol` decide the remaining cases.
    pub increment_tol: f64,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            slope_tol: 0.02,
            nonmember_slope: 0.1,
            increment_tol: 0.05,
        }
    }
}

/// `r_j = 1 - 2^{-j}` for `j = 3..=14`.
pub fn default_radii() -> Vec<f64> {
    (3..=14).map(|j| 1.0 - 2f64.powi(-j)).collect()
}

#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub verdict: Membership,
    /// Fitted slope of `log M_p(r)` against `log(1/(1-r))`.
    pub growth_exponent: f64,
    /// Fitted slope of the log-increments of `M_p^p`; `None` when the increments
    /// vanish to roundoff.
    pub increment_exponent: Option<f64>,
    /// `(r_j, M_p(r_j))` pairs.
    pub means: Vec<(f64, f64)>,
    pub overflow: bool,
}

/// Classifies `f = Σ c_n z^n` as a member of `H^p` or not.
pub fn hp_membership_classifier(
    source: &dyn CoeffSource,
    p: f64,
    config: &MembershipConfig,
) -> Result<MembershipReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must satisfy 1 <= p < inf")));
    }
    let radii = &config.radii;
    if radii.len() < 4 {
        return Err(Error::InvalidArgument("need at least four radii".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::InvalidArgument(
            "radii must increase strictly inside (0, 1)".into(),
        ));
    }
    let terms = |r: f64| ((40.0 / (1.0 - r)).ceil() as usize).max(64);
    let coeffs = source.prefix(terms(*radii.last().unwrap()));

    let mut means = Vec::with_capacity(radii.len());
    let mut powered = Vec::with_capacity(radii.len());
    let mut overflow = false;
    for &r in radii {
        let n = terms(r).min(coeffs.len());
        let k = (2 * n).next_power_of_two();
        let values = circle_values(&coeffs[..n], r, k);
        let m = p_mean(&values, p);
        let mp = m.powf(p);
        if !m.is_finite() || !mp.is_finite() {
            overflow = true;
        }
        means.push((r, m));
        powered.push(mp);
    }
    let logs: Vec<f64> = radii.iter().map(|r| (1.0 / (1.0 - r)).ln()).collect();

    if overflow {
        return Ok(MembershipReport {
            verdict: Membership::Nonmember,
            growth_exponent: f64::INFINITY,
            increment_exponent: None,
            means,
            overflow,
        });
    }

    let log_means: Vec<f64> = means.iter().map(|(_, m)| m.ln()).collect();
    let growth_exponent = fit_slope(&logs, &log_means);

    let increments: Vec<f64> = powered.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = powered.iter().copied().fold(0.0, f64::max);
    let negligible = increments.iter().all(|d| d.abs() <= 1e-12 * scale);
    let increment_exponent = if negligible {
        None
    } else {
        let start = increments.len() / 2;
        let xs: Vec<f64> = (start..increments.len())
            .map(|j| 0.5 * (logs[j] + logs[j + 1]))
            .collect();
        let ys: Vec<f64> = increments[start..]
            .iter()
            .map(|d| d.abs().max(f64::MIN_POSITIVE).ln())
            .collect();
        Some(fit_slope(&xs, &ys))
    };

    let verdict = if growth_exponent >= config.nonmember_slope {
        Membership::Nonmember
    } else {
        match increment_exponent {
            None => Membership::Member,
            Some(s) if s <= -config.increment_tol => Membership::Member,
            Some(s) if s >= config.increment_tol => Membership::Nonmember,
            Some(_) if growth_exponent <= config.slope_tol => Membership::Member,
            Some(_) => Membership::Indeterminate,
        }
    };
    Ok(MembershipReport {
        verdict,
        growth_exponent,
        increment_exponent,
        means,
        overflow,
    })
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
