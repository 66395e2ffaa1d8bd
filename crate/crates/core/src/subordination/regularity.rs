use super::BorelMeasure;
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityVerdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub verdict: RegularityVerdict,
    /// Sampled `sup |z^{1−η} ρ(z)|` near the origin, at `n` and `2n` radii.
    pub near: Vec<f64>,
    /// Sampled `sup |z^{1+ξ} e^{(ω₀+δ)z} ρ(z)|` away from the origin.
    pub far: Vec<f64>,
    pub witnesses: Vec<String>,
}

impl RegularityReport {
    fn fail(reason: String) -> Self {
        Self {
            verdict: RegularityVerdict::Fail,
            near: Vec::new(),
            far: Vec::new(),
            witnesses: vec![reason],
        }
    }
}

const ANGLES: usize = 9;

/// Largest sampled log-magnitude over radii `2^{sign·j/4}`, `j = 0..=n`, and
/// nine angles spanning `[−ξ, ξ]`.
fn sector_sup(n: usize, sign: f64, xi: f64, log_mag: &dyn Fn(Complex64) -> f64) -> (f64, Complex64) {
    let mut best = (f64::NEG_INFINITY, Complex64::new(1.0, 0.0));
    for j in 0..=n {
        let r = (sign * j as f64 / 4.0).exp2();
        for a in 0..ANGLES {
            let theta = xi * (2.0 * a as f64 / (ANGLES - 1) as f64 - 1.0);
            let z = Complex64::from_polar(r, theta);
            let v = log_mag(z);
            if v.is_nan() || v > best.0 {
                best = (if v.is_nan() { f64::INFINITY } else { v }, z);
            }
        }
    }
    best
}

/// Sampled check of the sector conditions
/// `sup_{|z|≤1} |z^{1−η} ρ(z)| < ∞` and `sup_{|z|≥1} |z^{1+ξ} e^{(ω₀+δ)z} ρ(z)| < ∞`
/// on `S_ξ = {|arg z| < ξ}`.
///
/// The moment condition `ω_ρ > ω₀ + δ` is checked first and fails without
/// sampling. Both suprema are then taken with `samples` and `2·samples`
/// radii; a ratio below 1.1 passes, a ratio of 10 or more fails.
pub fn check_measure_regularity(
    nu: &BorelMeasure,
    omega0: f64,
    delta: f64,
    eta: f64,
    xi: f64,
    samples: usize,
) -> Result<RegularityReport> {
    if !(eta > 0.0 && eta <= 1.0) || !(xi > 0.0 && xi < 1.0) || samples == 0 || !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < η ≤ 1, 0 < ξ < 1, δ > 0 and samples > 0 (got η={eta}, ξ={xi}, δ={delta}, samples={samples})"
        )));
    }
    if !nu.atoms().is_empty() {
        return Ok(RegularityReport::fail("measure has atoms, so it has no density".into()));
    }
    let Some(density) = nu.density() else {
        return Ok(RegularityReport::fail("measure has no density".into()));
    };
    let decay = density.bound().omega;
    if !(decay > omega0 + delta) {
        return Ok(RegularityReport::fail(format!(
            "moment condition fails: decay {decay} ≤ ω₀ + δ = {}",
            omega0 + delta
        )));
    }
    if !density.has_sector_extension() {
        return Ok(RegularityReport::fail("density has no sector extension".into()));
    }
    let rho_log = |z: Complex64| density.eval_sector(z).map_or(f64::NAN, |v| v.norm().ln());
    let near_mag = |z: Complex64| (1.0 - eta) * z.norm().ln() + rho_log(z);
    let far_mag = |z: Complex64| (1.0 + xi) * z.norm().ln() + (omega0 + delta) * z.re + rho_log(z);

    let mut near = Vec::new();
    let mut far = Vec::new();
    let mut witnesses = Vec::new();
    for n in [samples, 2 * samples] {
        let (a, za) = sector_sup(n, -1.0, xi, &near_mag);
        let (b, zb) = sector_sup(n, 1.0, xi, &far_mag);
        near.push(a.exp());
        far.push(b.exp());
        witnesses.push(format!("n={n}: near sup {:.6e} at {za}, far sup {:.6e} at {zb}", a.exp(), b.exp()));
    }
    let ratio = |v: &[f64]| if v[0] > 0.0 { v[1] / v[0] } else if v[1] > 0.0 { f64::INFINITY } else { 1.0 };
    let ratios = [ratio(&near), ratio(&far)];
    let finite = near.iter().chain(&far).all(|v| v.is_finite());
    let verdict = if !finite || ratios.iter().any(|r| !(*r < 10.0)) {
        RegularityVerdict::Fail
    } else if ratios.iter().all(|r| *r < 1.1) {
        RegularityVerdict::Pass
    } else {
        RegularityVerdict::Indeterminate
    };
    witnesses.push(format!("doubling ratios: near {:.4}, far {:.4}", ratios[0], ratios[1]));
    Ok(RegularityReport {
        verdict,
        near,
        far,
        witnesses,
    })
}
