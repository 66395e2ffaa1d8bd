//! Catalog of holomorphic semiflows on the unit disc.
//!
//! Every entry carries closed forms for the flow `φ_t`, its generator `G`
//! (`∂_t φ_t = G∘φ_t`), and, for non-elliptic flows, the Koenigs function `h`
//! with `φ_t = h^{-1}(h + t)`, `h(0) = 0`, `G·h' = 1`. A positive time scale `α`
//! turns an entry into the flow `t ↦ φ_{t/α}`, whose Koenigs function is `α·h`.
//!
//! Logarithms and powers use the principal branch. On the disc `1 - z` and
//! `1 + z` lie in the right half-plane, so every branch below is unambiguous.

use crate::analytic::CirclePlan;
use crate::error::{fmt_c, Error, Result};
use crate::matrices::{composition_matrix_affine, composition_matrix_general, OperatorMatrix};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowKind {
    /// `φ_t(z) = e^{-t} z + 1 - e^{-t}`.
    AffineHyperbolic,
    /// Hyperbolic automorphisms fixing `±1`.
    HyperbolicAutomorphism,
    /// Parabolic automorphisms fixing `1`.
    ParabolicAutomorphism,
    /// `φ_t(z) = e^{-t} z / ((e^{-t} - 1) z + 1)`.
    EllipticRotationlike,
    /// `ψ_t(z) = 1 - (1 - z)^{e^{-t}}`.
    EllipticPower,
}

impl FlowKind {
    pub const ALL: [FlowKind; 5] = [
        FlowKind::AffineHyperbolic,
        FlowKind::HyperbolicAutomorphism,
        FlowKind::ParabolicAutomorphism,
        FlowKind::EllipticRotationlike,
        FlowKind::EllipticPower,
    ];

    /// Name used by the command line.
    pub fn name(self) -> &'static str {
        match self {
            FlowKind::AffineHyperbolic => "affine",
            FlowKind::HyperbolicAutomorphism => "hyp-auto",
            FlowKind::ParabolicAutomorphism => "para-auto",
            FlowKind::EllipticRotationlike => "elliptic-rot",
            FlowKind::EllipticPower => "elliptic-pow",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

/// Stored geometry of the Koenigs domain `Ω = h(𝔻)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowGeometry {
    pub classification: Classification,
    /// Width of the smallest horizontal strip containing `Ω`.
    pub gamma: Option<f64>,
    /// Width of the widest horizontal strip contained in `Ω`.
    pub beta_max: Option<f64>,
    /// Whether `Ω` contains a horizontal strip; `None` outside the hyperbolic case.
    pub contains_strip: Option<bool>,
    /// Whether `Ω` is itself a horizontal strip.
    pub is_strip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Semiflow {
    kind: FlowKind,
    time_scale: f64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

impl Semiflow {
    pub fn new(kind: FlowKind) -> Self {
        Self {
            kind,
            time_scale: 1.0,
        }
    }

    /// The flow `t ↦ φ_{t/α}`; its Koenigs function is `α·h`.
    pub fn with_time_scale(kind: FlowKind, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("time scale {alpha} must be positive")));
        }
        Ok(Self {
            kind,
            time_scale: alpha,
        })
    }

    pub fn affine() -> Self {
        Self::new(FlowKind::AffineHyperbolic)
    }

    pub fn hyperbolic_automorphism() -> Self {
        Self::new(FlowKind::HyperbolicAutomorphism)
    }

    pub fn parabolic_automorphism() -> Self {
        Self::new(FlowKind::ParabolicAutomorphism)
    }

    pub fn elliptic_rotationlike() -> Self {
        Self::new(FlowKind::EllipticRotationlike)
    }

    pub fn elliptic_power() -> Self {
        Self::new(FlowKind::EllipticPower)
    }

    pub fn catalog() -> Vec<Self> {
        FlowKind::ALL.into_iter().map(Self::new).collect()
    }

    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn time_scale(&self) -> f64 {
        self.time_scale
    }

    pub fn classification(&self) -> Classification {
        match self.kind {
            FlowKind::AffineHyperbolic | FlowKind::HyperbolicAutomorphism => Classification::Hyperbolic,
            FlowKind::ParabolicAutomorphism => Classification::Parabolic,
            FlowKind::EllipticRotationlike | FlowKind::EllipticPower => Classification::Elliptic,
        }
    }

    pub fn is_elliptic(&self) -> bool {
        self.classification() == Classification::Elliptic
    }

    /// Denjoy–Wolff point for non-elliptic flows, interior fixed point otherwise.
    pub fn dw_point(&self) -> Complex64 {
        if self.is_elliptic() {
            c(0.0, 0.0)
        } else {
            ONE
        }
    }

    pub fn geometry(&self) -> FlowGeometry {
        let a = self.time_scale;
        match self.kind {
            FlowKind::AffineHyperbolic => FlowGeometry {
                classification: Classification::Hyperbolic,
                gamma: Some(a * PI),
                beta_max: None,
                contains_strip: Some(false),
                is_strip: false,
            },
            FlowKind::HyperbolicAutomorphism => FlowGeometry {
                classification: Classification::Hyperbolic,
                gamma: Some(a * PI),
                beta_max: Some(a * PI),
                contains_strip: Some(true),
                is_strip: true,
            },
            FlowKind::ParabolicAutomorphism => FlowGeometry {
                classification: Classification::Parabolic,
                gamma: None,
                beta_max: None,
                contains_strip: None,
                is_strip: false,
            },
            FlowKind::EllipticRotationlike | FlowKind::EllipticPower => FlowGeometry {
                classification: Classification::Elliptic,
                gamma: None,
                beta_max: None,
                contains_strip: None,
                is_strip: false,
            },
        }
    }

    /// `(classification, γ, β_max, contains_strip)` from the catalog.
    pub fn classify(&self) -> FlowGeometry {
        self.geometry()
    }

    /// `φ_t(z)` for `t ≥ 0`, `|z| < 1`.
    pub fn phi(&self, t: f64, z: Complex64) -> Result<Complex64> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("time {t} must be finite and nonnegative")));
        }
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisc { z: fmt_c(z) });
        }
        Ok(self.phi_unchecked(t, z))
    }

    /// `φ_t(z)` without domain checks; also valid on the boundary where the
    /// closed form extends.
    pub fn phi_unchecked(&self, t: f64, z: Complex64) -> Complex64 {
        let s = t / self.time_scale;
        match self.kind {
            FlowKind::AffineHyperbolic => {
                let a = (-s).exp();
                z * a + (-(-s).exp_m1())
            }
            FlowKind::HyperbolicAutomorphism => {
                let e = s.exp();
                let em1 = s.exp_m1();
                ((e + 1.0) * z + em1) / (em1 * z + (e + 1.0))
            }
            FlowKind::ParabolicAutomorphism => {
                let it = I * s;
                ((ONE - it) * z + it) / (-it * z + ONE + it)
            }
            FlowKind::EllipticRotationlike => {
                let a = (-s).exp();
                a * z / ((-s).exp_m1() * z + 1.0)
            }
            FlowKind::EllipticPower => ONE - (ONE - z).powf((-s).exp()),
        }
    }

    /// Infinitesimal generator `G(z)`.
    pub fn generator(&self, z: Complex64) -> Complex64 {
        let g = match self.kind {
            FlowKind::EllipticPower => (ONE - z) * (ONE - z).ln(),
            _ => {
                let [g0, g1, g2] = self.generator_poly().expect("polynomial generator");
                g0 + z * (g1 + z * g2)
            }
        };
        g
    }

    /// Coefficients `[g0, g1, g2]` of `G` when it is a polynomial of degree ≤ 2.
    pub fn generator_poly(&self) -> Option<[Complex64; 3]> {
        let a = 1.0 / self.time_scale;
        let poly = match self.kind {
            FlowKind::AffineHyperbolic => [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
            FlowKind::HyperbolicAutomorphism => [c(0.5, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
            FlowKind::ParabolicAutomorphism => [I, -2.0 * I, I],
            FlowKind::EllipticRotationlike => [c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)],
            FlowKind::EllipticPower => return None,
        };
        Some(poly.map(|g| g * a))
    }

    fn require_koenigs(&self) -> Result<()> {
        if self.is_elliptic() {
            Err(Error::NoKoenigsData { flow: self.name() })
        } else {
            Ok(())
        }
    }

    /// Koenigs function `h(z)`, normalised by `h(0) = 0`.
    pub fn koenigs(&self, z: Complex64) -> Result<Complex64> {
        self.require_koenigs()?;
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisc { z: fmt_c(z) });
        }
        Ok(self.koenigs_unchecked(z))
    }

    pub(crate) fn koenigs_unchecked(&self, z: Complex64) -> Complex64 {
        let a = self.time_scale;
        a * match self.kind {
            FlowKind::AffineHyperbolic => -(ONE - z).ln(),
            FlowKind::HyperbolicAutomorphism => (ONE + z).ln() - (ONE - z).ln(),
            FlowKind::ParabolicAutomorphism => -I * z / (ONE - z),
            _ => unreachable!("elliptic flows carry no Koenigs data"),
        }
    }

    /// `h(s)` from `s` and its offset `w = 1 − s` from the Denjoy–Wolff point,
    /// which keeps full relative accuracy where `s` itself rounds to 1.
    pub(crate) fn koenigs_at_offset(&self, s: Complex64, w: Complex64) -> Complex64 {
        let a = self.time_scale;
        a * match self.kind {
            FlowKind::AffineHyperbolic => -w.ln(),
            FlowKind::HyperbolicAutomorphism => (ONE + s).ln() - w.ln(),
            FlowKind::ParabolicAutomorphism => -I * s / w,
            _ => unreachable!("elliptic flows carry no Koenigs data"),
        }
    }

    /// Closed-form `h'(z)`.
    pub fn koenigs_derivative(&self, z: Complex64) -> Result<Complex64> {
        self.require_koenigs()?;
        Ok(self.koenigs_derivative_unchecked(z))
    }

    pub(crate) fn koenigs_derivative_unchecked(&self, z: Complex64) -> Complex64 {
        let a = self.time_scale;
        a * match self.kind {
            FlowKind::AffineHyperbolic => ONE / (ONE - z),
            FlowKind::HyperbolicAutomorphism => 2.0 / (ONE - z * z),
            FlowKind::ParabolicAutomorphism => -I / ((ONE - z) * (ONE - z)),
            _ => unreachable!("elliptic flows carry no Koenigs data"),
        }
    }

    /// `h^{-1}(w)`; `w` must lie in the Koenigs domain.
    pub fn koenigs_inv(&self, w: Complex64) -> Result<Complex64> {
        self.require_koenigs()?;
        let z = self.koenigs_inv_unchecked(w);
        if !(self.domain_defect(w) > 0.0) {
            return Err(Error::Domain(format!(
                "{} is outside the Koenigs domain of {}",
                fmt_c(w),
                self.name()
            )));
        }
        Ok(z)
    }

    pub(crate) fn koenigs_inv_unchecked(&self, w: Complex64) -> Complex64 {
        let u = w / self.time_scale;
        match self.kind {
            FlowKind::AffineHyperbolic => ONE - (-u).exp(),
            FlowKind::HyperbolicAutomorphism => (u * 0.5).tanh(),
            FlowKind::ParabolicAutomorphism => u / (u - I),
            _ => unreachable!("elliptic flows carry no Koenigs data"),
        }
    }

    /// Sign-reliable form of `1 - |h^{-1}(w)|^2`: positive exactly on the Koenigs
    /// domain, computed without the cancellation of the naive expression far out
    /// along the domain.
    pub fn domain_defect(&self, w: Complex64) -> f64 {
        let u = w / self.time_scale;
        match self.kind {
            // |1 - e^{-u}|^2 = 1 - e^{-x}(2 cos y - e^{-x})
            FlowKind::AffineHyperbolic => {
                let e = (-u.re).exp();
                e * (2.0 * u.im.cos() - e)
            }
            // 1 - |tanh(v)|^2 = 2 cos 2y / (cosh 2x + cos 2y), v = u/2
            FlowKind::HyperbolicAutomorphism => {
                let (x, y) = (u.re, u.im);
                2.0 * y.cos() / (x.cosh() + y.cos())
            }
            // |u - i|^2 - |u|^2 = 1 - 2 Im u
            FlowKind::ParabolicAutomorphism => (1.0 - 2.0 * u.im) / (u - I).norm_sqr(),
            _ => f64::NAN,
        }
    }

    /// `‖C_{φ_t}‖_{H²} ≤ M e^{ω t}` as `(M, ω)`, from Littlewood's bound
    /// `‖C_φ‖² ≤ (1 + |φ(0)|)/(1 - |φ(0)|)`.
    pub fn h2_growth_bound(&self) -> (f64, f64) {
        let a = self.time_scale;
        match self.kind {
            FlowKind::AffineHyperbolic => (2f64.sqrt(), 0.5 / a),
            FlowKind::HyperbolicAutomorphism => (1.0, 0.5 / a),
            // 2 sqrt(1 + s^2) <= 3.1 e^{s/4}
            FlowKind::ParabolicAutomorphism => (3.1, 0.25 / a),
            FlowKind::EllipticRotationlike | FlowKind::EllipticPower => (1.0, 0.0),
        }
    }

    /// Type `ω₀` of the induced composition semigroup on `H^p`: `π/(pγ)` for the
    /// hyperbolic entries, `0` otherwise.
    pub fn type_on_hp(&self, p: f64) -> f64 {
        match self.geometry().gamma {
            Some(gamma) => PI / (p * gamma),
            None => 0.0,
        }
    }

    /// Compression of `C_{φ_t}` of order `N`. The affine entry is built exactly;
    /// the others are sampled on `plan` (default radius 0.9, `K = 4(N+1)`).
    pub fn composition_matrix(&self, t: f64, order: usize, plan: Option<&CirclePlan>) -> Result<OperatorMatrix> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("time {t} must be finite and nonnegative")));
        }
        match self.kind {
            FlowKind::AffineHyperbolic => {
                let s = t / self.time_scale;
                composition_matrix_affine(c((-s).exp(), 0.0), c(-(-s).exp_m1(), 0.0), order)
            }
            _ => {
                let default = CirclePlan::for_order(order);
                let plan = plan.unwrap_or(&default);
                Ok(composition_matrix_general(|z| self.phi_unchecked(t, z), order, plan)?.0)
            }
        }
    }
}

/// Sampling resolution for [`estimate_strip_widths`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripGrid {
    /// Radial samples, geometrically clustered toward `max_radius`.
    pub radial: usize,
    pub angular: usize,
    pub max_radius: f64,
    /// Half-length `R` of the real segment tested at each height.
    pub reach: f64,
    pub real_samples: usize,
    pub height_step: f64,
}

impl Default for StripGrid {
    fn default() -> Self {
        Self {
            radial: 48,
            angular: 16384,
            max_radius: 1.0 - 1e-4,
            reach: 50.0,
            real_samples: 401,
            height_step: 0.005,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripEstimate {
    pub gamma: f64,
    pub beta_max: Option<f64>,
    pub height_step: f64,
}

/// Numerical cross-check of the catalog `γ` and `β_max`.
///
/// `γ̂ = sup Im h − inf Im h` over a polar grid; `β̂_max` is the extent of the
/// longest run of heights `c` with `x + ic ∈ Ω` for every sampled
/// `x ∈ [−R, R]`.
pub fn estimate_strip_widths(flow: &Semiflow, grid: &StripGrid) -> Result<StripEstimate> {
    flow.require_koenigs()?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let depth = -(1.0 - grid.max_radius).log10();
    for i in 0..grid.radial {
        let frac = i as f64 / (grid.radial - 1).max(1) as f64;
        let r = 1.0 - 10f64.powf(-depth * frac);
        let r = if i == 0 { 0.0 } else { r };
        for j in 0..grid.angular {
            let th = 2.0 * PI * j as f64 / grid.angular as f64;
            let im = flow.koenigs_unchecked(Complex64::from_polar(r, th)).im;
            lo = lo.min(im);
            hi = hi.max(im);
        }
    }
    let gamma = hi - lo;

    let center = 0.5 * (hi + lo);
    let half = 0.5 * gamma + 1.0;
    let steps = (2.0 * half / grid.height_step).ceil() as usize;
    let xs: Vec<f64> = (0..grid.real_samples)
        .map(|k| -grid.reach + 2.0 * grid.reach * k as f64 / (grid.real_samples - 1) as f64)
        .collect();
    let mut best = 0usize;
    let mut run = 0usize;
    for s in 0..=steps {
        let height = center - half + s as f64 * grid.height_step;
        let inside = xs
            .iter()
            .all(|&x| flow.domain_defect(Complex64::new(x, height)) > 0.0);
        if inside {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    let beta_max = (best >= 2).then(|| (best - 1) as f64 * grid.height_step);
    Ok(StripEstimate {
        gamma,
        beta_max,
        height_step: grid.height_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_grid() -> Vec<Complex64> {
        let mut pts = Vec::new();
        for i in 0..8 {
            let r = 0.9 * (i as f64 + 0.5) / 8.0;
            for j in 0..8 {
                pts.push(Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.3 * i as f64) / 8.0));
            }
        }
        pts
    }

    #[test]
    fn time_zero_is_identity() {
        for flow in Semiflow::catalog() {
            for z in test_grid() {
                assert!((flow.phi(0.0, z).unwrap() - z).norm() < 1e-13, "{}", flow.name());
            }
        }
    }

    #[test]
    fn phi_examples() {
        let aff = Semiflow::affine();
        for t in [0.1, 1.0, 3.0] {
            let v = aff.phi(t, c(0.0, 0.0)).unwrap();
            assert!((v - c(1.0 - (-t).exp(), 0.0)).norm() < 1e-15);
        }
        let hyp = Semiflow::hyperbolic_automorphism();
        let e = 1f64.exp();
        let v = hyp.phi(1.0, c(0.0, 0.0)).unwrap();
        assert!((v.re - (e - 1.0) / (e + 1.0)).abs() < 1e-15);
        assert!((v.re - 0.46212).abs() < 1e-5);
        assert!(aff.phi(1.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn koenigs_examples() {
        let aff = Semiflow::affine();
        assert_eq!(aff.koenigs(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((aff.koenigs(c(0.5, 0.0)).unwrap() - c(2f64.ln(), 0.0)).norm() < 1e-15);
        let hyp = Semiflow::hyperbolic_automorphism();
        let z = c(0.5f64.tanh(), 0.0);
        assert!((hyp.koenigs(z).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        for flow in Semiflow::catalog() {
            if flow.is_elliptic() {
                assert!(matches!(flow.koenigs(c(0.1, 0.0)), Err(Error::NoKoenigsData { .. })));
            } else {
                assert_eq!(flow.koenigs(c(0.0, 0.0)).unwrap().norm(), 0.0);
                for z in test_grid() {
                    let back = flow.koenigs_inv(flow.koenigs(z).unwrap()).unwrap();
                    assert!((back - z).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn parabolic_koenigs_conjugates_to_translation() {
        let flow = Semiflow::parabolic_automorphism();
        for z in test_grid() {
            for t in [0.3, 1.0, 4.0] {
                let via = flow.koenigs_inv(flow.koenigs(z).unwrap() + t).unwrap();
                assert!((via - flow.phi(t, z).unwrap()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let g = Semiflow::affine().classify();
        assert_eq!(g.classification, Classification::Hyperbolic);
        assert_eq!(g.gamma, Some(PI));
        assert_eq!(g.beta_max, None);
        assert_eq!(g.contains_strip, Some(false));
        let g = Semiflow::hyperbolic_automorphism().classify();
        assert_eq!((g.gamma, g.beta_max, g.contains_strip), (Some(PI), Some(PI), Some(true)));
        let g = Semiflow::parabolic_automorphism().classify();
        assert_eq!(g.classification, Classification::Parabolic);
        assert_eq!((g.gamma, g.beta_max), (None, None));
    }

    #[test]
    fn flow_names_round_trip() {
        for k in FlowKind::ALL {
            assert_eq!(FlowKind::from_name(k.name()), Some(k));
        }
        assert_eq!(FlowKind::from_name("nope"), None);
    }

    #[test]
    fn strip_width_estimates() {
        let grid = StripGrid::default();
        let est = estimate_strip_widths(&Semiflow::affine(), &grid).unwrap();
        assert!(est.gamma >= PI - 0.05 && est.gamma <= PI, "{}", est.gamma);
        assert_eq!(est.beta_max, None);

        let est = estimate_strip_widths(&Semiflow::hyperbolic_automorphism(), &grid).unwrap();
        assert!(est.gamma >= PI - 0.05 && est.gamma <= PI, "{}", est.gamma);
        let b = est.beta_max.unwrap();
        assert!(b >= PI - 0.05 && b <= PI, "{b}");

        let scaled = Semiflow::with_time_scale(FlowKind::HyperbolicAutomorphism, 2.0).unwrap();
        let est = estimate_strip_widths(&scaled, &grid).unwrap();
        assert!((est.gamma - 2.0 * PI).abs() < 0.1, "{}", est.gamma);
    }

    #[test]
    fn elliptic_flows_have_no_strip_estimate() {
        assert!(estimate_strip_widths(&Semiflow::elliptic_power(), &StripGrid::default()).is_err());
    }
}
