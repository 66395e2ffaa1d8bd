//! Measures on `[0, ∞)` and the operators `𝓗_ν = ∫ T_t dν(t)` they induce.
//!
//! A [`BorelMeasure`] is a finite list of atoms plus an optional [`Density`]
//! with a declared exponential bound `|ρ(t)| ≤ M e^{−ω t}`. That bound drives
//! every truncation decision: the length of the `t`-interval, the tail
//! estimate, and admissibility against the type of a semigroup.

mod laplace;
mod operators;
mod plan;
mod regularity;

pub use laplace::{laplace_transform, laplace_transform_with, DEFAULT_LAPLACE_TOL};
pub use operators::{
    averaging_apply, general_subordinated_apply, general_subordinated_apply_offset, subordinate_matrix, QuadratureValue,
};
pub use plan::QuadraturePlan;
pub use regularity::{check_measure_regularity, RegularityReport, RegularityVerdict};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

pub type RealDensityFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type SectorDensityFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Declared bound `|ρ(t)| ≤ m·e^{−omega·t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBound {
    pub m: f64,
    pub omega: f64,
}

#[derive(Clone)]
pub enum Density {
    /// `ρ(t) = t^power e^{−rate·t}`, `power > −1`.
    Gamma { power: f64, rate: Complex64 },
    /// A user-supplied density. `endpoint_power` is the exponent `p` of the
    /// `t^p` behaviour at the origin, so that `ρ(t)/t^p` is smooth there.
    Custom {
        real: RealDensityFn,
        sector: Option<SectorDensityFn>,
        bound: DensityBound,
        endpoint_power: f64,
    },
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Gamma { power, rate } => f
                .debug_struct("Gamma")
                .field("power", power)
                .field("rate", rate)
                .finish(),
            Density::Custom {
                sector,
                bound,
                endpoint_power,
                ..
            } => f
                .debug_struct("Custom")
                .field("bound", bound)
                .field("endpoint_power", endpoint_power)
                .field("has_sector", &sector.is_some())
                .finish(),
        }
    }
}

impl Density {
    /// `e^{−λt}`.
    pub fn exponential(rate: Complex64) -> Self {
        Density::Gamma { power: 0.0, rate }
    }

    /// `t^p e^{−λt}`.
    pub fn gamma(power: f64, rate: Complex64) -> Result<Self> {
        if !(power > -1.0 && power.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "density power {power} must exceed -1"
            )));
        }
        if !(rate.re.is_finite() && rate.im.is_finite()) {
            return Err(Error::InvalidArgument("density rate must be finite".into()));
        }
        Ok(Density::Gamma { power, rate })
    }

    pub fn custom(
        real: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        sector: Option<SectorDensityFn>,
        bound: DensityBound,
        endpoint_power: f64,
    ) -> Self {
        Density::Custom {
            real: Arc::new(real),
            sector,
            bound,
            endpoint_power,
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            Density::Gamma { power, rate } => {
                let e = (-rate * t).exp();
                if *power == 0.0 {
                    e
                } else {
                    e * t.powf(*power)
                }
            }
            Density::Custom { real, .. } => real(t),
        }
    }

    /// `ρ(t)/t^p`, bounded near the origin.
    pub(crate) fn eval_smooth(&self, t: f64) -> Complex64 {
        match self {
            Density::Gamma { rate, .. } => (-rate * t).exp(),
            Density::Custom {
                real,
                endpoint_power,
                ..
            } => real(t) / t.powf(*endpoint_power),
        }
    }

    /// Holomorphic extension of the density, if one is known.
    pub fn eval_sector(&self, z: Complex64) -> Option<Complex64> {
        match self {
            Density::Gamma { power, rate } => {
                let e = (-rate * z).exp();
                Some(if *power == 0.0 { e } else { e * z.powf(*power) })
            }
            Density::Custom { sector, real, .. } => match sector {
                Some(s) => Some(s(z)),
                None if z.im == 0.0 && z.re >= 0.0 => Some(real(z.re)),
                None => None,
            },
        }
    }

    /// Ratio `ρ(w)/w^p` on the holomorphic extension.
    pub(crate) fn eval_sector_smooth(&self, z: Complex64) -> Option<Complex64> {
        match self {
            Density::Gamma { rate, .. } => Some((-rate * z).exp()),
            Density::Custom { endpoint_power, .. } => {
                Some(self.eval_sector(z)? / z.powf(*endpoint_power))
            }
        }
    }

    pub fn has_sector_extension(&self) -> bool {
        match self {
            Density::Gamma { .. } => true,
            Density::Custom { sector, .. } => sector.is_some(),
        }
    }

    pub fn endpoint_power(&self) -> f64 {
        match self {
            Density::Gamma { power, .. } => *power,
            Density::Custom { endpoint_power, .. } => *endpoint_power,
        }
    }

    /// Characteristic frequency of the density, used to size quadrature panels.
    pub(crate) fn frequency(&self) -> f64 {
        match self {
            Density::Gamma { rate, .. } => rate.norm(),
            Density::Custom { bound, .. } => bound.omega.abs(),
        }
    }

    /// Declared exponential bound. For `t^p e^{−λt}` with `p < 0` the bound
    /// holds for `t ≥ 1/4`, which is all that tail estimates need.
    pub fn bound(&self) -> DensityBound {
        match self {
            Density::Gamma { power, rate } => {
                let a = rate.re;
                let p = *power;
                if p == 0.0 {
                    DensityBound { m: 1.0, omega: a }
                } else if p > 0.0 {
                    let theta = if a > 0.0 { (0.5 * a).min(1.0) } else { 1.0 };
                    DensityBound {
                        m: (p / (std::f64::consts::E * theta)).powf(p),
                        omega: a - theta,
                    }
                } else {
                    DensityBound {
                        m: 0.25f64.powf(p),
                        omega: a,
                    }
                }
            }
            Density::Custom { bound, .. } => *bound,
        }
    }

    /// `Γ(p+1)/(z+λ)^{p+1}` for the gamma family.
    pub fn laplace_closed_form(&self, z: Complex64) -> Option<Complex64> {
        match self {
            Density::Gamma { power, rate } => {
                let w = z + rate;
                if w.re <= 0.0 {
                    return None;
                }
                Some(libm::tgamma(power + 1.0) / w.powf(power + 1.0))
            }
            Density::Custom { .. } => None,
        }
    }
}

/// Finite complex Borel measure on `[0, ∞)`: atoms plus an optional density.
#[derive(Debug, Clone)]
pub struct BorelMeasure {
    atoms: Vec<(f64, Complex64)>,
    density: Option<Density>,
    margin: f64,
}

/// Default moment margin `δ`.
pub const DEFAULT_MARGIN: f64 = 0.1;

impl BorelMeasure {
    /// Validates atoms (`t ≥ 0`), the margin (`δ > 0`), and spot-checks the
    /// declared density bound at `t = j/4`, `j = 1..=64`, with 1% slack.
    pub fn new(atoms: Vec<(f64, Complex64)>, density: Option<Density>, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin.is_finite()) {
            return Err(Error::InvalidArgument(format!("margin {margin} must be positive")));
        }
        for &(t, w) in &atoms {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!("atom at t = {t} is not in [0, ∞)")));
            }
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::InvalidArgument("atom weight must be finite".into()));
            }
        }
        if let Some(d) = &density {
            let b = d.bound();
            if !(b.m > 0.0 && b.m.is_finite() && b.omega.is_finite()) {
                return Err(Error::Inadmissible(format!("declared bound {b:?} is not usable")));
            }
            for j in 1..=64 {
                let t = 0.25 * j as f64;
                let v = d.eval(t).norm();
                let cap = 1.01 * b.m * (-b.omega * t).exp();
                if !(v <= cap) {
                    return Err(Error::Inadmissible(format!(
                        "|ρ({t})| = {v:e} exceeds the declared bound {cap:e}"
                    )));
                }
            }
        }
        Ok(Self {
            atoms,
            density,
            margin,
        })
    }

    pub fn dirac(t: f64) -> Result<Self> {
        Self::new(vec![(t, Complex64::new(1.0, 0.0))], None, DEFAULT_MARGIN)
    }

    pub fn from_density(density: Density) -> Result<Self> {
        Self::new(Vec::new(), Some(density), DEFAULT_MARGIN)
    }

    /// `e^{−λt} dt`.
    pub fn exponential(rate: Complex64) -> Result<Self> {
        Self::from_density(Density::exponential(rate))
    }

    pub fn with_margin(mut self, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin.is_finite()) {
            return Err(Error::InvalidArgument(format!("margin {margin} must be positive")));
        }
        self.margin = margin;
        Ok(self)
    }

    pub fn atoms(&self) -> &[(f64, Complex64)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Exponential decay rate available to tail estimates; infinite for purely
    /// atomic measures.
    pub fn decay_rate(&self) -> f64 {
        self.density.as_ref().map_or(f64::INFINITY, |d| d.bound().omega)
    }

    /// Moment condition `∫ e^{(ω₀+δ)t} d|ν| < ∞`, certified through `ω_ρ > ω₀ + δ`.
    pub fn check_admissible(&self, omega0: f64) -> Result<()> {
        let w = self.decay_rate();
        if w > omega0 + self.margin {
            Ok(())
        } else {
            Err(Error::Inadmissible(format!(
                "density decay {w} does not exceed type {omega0} plus margin {}",
                self.margin
            )))
        }
    }
}
