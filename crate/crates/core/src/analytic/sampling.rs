use super::{CirclePlan, CoeffVector};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Coefficients recovered from circle samples, with error estimates.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub coeffs: CoeffVector,
    /// Estimated aliasing error per coefficient: the size of the top quarter of
    /// the spectrum (the sampled tail at radius `r`) amplified by `r^{-N}`.
    pub alias_estimate: f64,
    /// Roundoff floor `ε·max|s_j|·r^{-N}` of the inverse transform.
    pub roundoff_estimate: f64,
}

impl Extraction {
    pub fn error_estimate(&self) -> f64 {
        self.alias_estimate + self.roundoff_estimate
    }
}

/// Samples `f` at the points of `plan`.
pub fn sample_on_circle(f: impl Fn(Complex64) -> Complex64, plan: &CirclePlan) -> Vec<Complex64> {
    plan.points().map(f).collect()
}

/// Values of `Σ c_n z^n` at `z = r·ω^j`, `j < k`, by one FFT. Coefficients past
/// `k` are folded modulo `k`, which is exact for these sample points.
pub fn circle_values(coeffs: &[Complex64], radius: f64, k: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); k];
    let mut scale = 1.0;
    for (n, &c) in coeffs.iter().enumerate() {
        buf[n % k] += c * scale;
        scale *= radius;
    }
    FftPlanner::new().plan_fft_inverse(k).process(&mut buf);
    buf
}

/// Recovers `c_0..c_N` from samples at `r·ω^j` via
/// `c_n = r^{-n}·(1/K)·Σ_j s_j ω^{-jn}`.
pub fn coeffs_from_samples(samples: &[Complex64], plan: &CirclePlan, order: usize) -> Result<Extraction> {
    let k = plan.sample_count();
    if samples.len() != k {
        return Err(Error::InvalidArgument(format!(
            "expected {k} samples, got {}",
            samples.len()
        )));
    }
    if k < 2 * (order + 1) {
        return Err(Error::Aliasing {
            samples: k,
            coeffs: order + 1,
        });
    }
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(k).process(&mut buf);
    let r = plan.radius();
    let inv_k = 1.0 / k as f64;
    let mut scale = 1.0;
    let mut coeffs = Vec::with_capacity(order + 1);
    for b in buf.iter().take(order + 1) {
        coeffs.push(b * inv_k * scale);
        scale /= r;
    }
    let amplification = r.powi(-(order as i32));
    let tail = buf[(3 * k) / 4..]
        .iter()
        .map(|b| b.norm() * inv_k)
        .fold(0.0, f64::max);
    let peak = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    Ok(Extraction {
        coeffs: CoeffVector::new(coeffs)?,
        alias_estimate: tail * amplification,
        roundoff_estimate: 4.0 * f64::EPSILON * peak * amplification,
    })
}

/// Integral mean `M_p(r, f) = ((1/K) Σ_j |f(r ω^j)|^p)^{1/p}`.
pub fn hp_mean(f: &CoeffVector, p: f64, plan: &CirclePlan) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must satisfy 1 <= p < inf")));
    }
    let values = circle_values(f.coeffs(), plan.radius(), plan.sample_count());
    Ok(p_mean(&values, p))
}

/// `((1/K) Σ |v_j|^p)^{1/p}`, scaled by the peak to avoid overflow.
pub(crate) fn p_mean(values: &[Complex64], p: f64) -> f64 {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 || !peak.is_finite() {
        return peak;
    }
    let mean = values.iter().map(|v| (v.norm() / peak).powf(p)).sum::<f64>() / values.len() as f64;
    peak * mean.powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_samples_give_constant_function() {
        let plan = CirclePlan::new(0.7, 16).unwrap();
        let ex = coeffs_from_samples(&vec![c(1.0); 16], &plan, 3).unwrap();
        assert!((ex.coeffs.coeffs()[0] - c(1.0)).norm() < 1e-15);
        for k in 1..4 {
            assert!(ex.coeffs.coeffs()[k].norm() < 1e-15);
        }
    }

    #[test]
    fn identity_samples_at_half_radius() {
        let plan = CirclePlan::new(0.5, 8).unwrap();
        let samples = sample_on_circle(|z| z, &plan);
        let ex = coeffs_from_samples(&samples, &plan, 2).unwrap();
        let expect = [c(0.0), c(1.0), c(0.0)];
        for (a, b) in ex.coeffs.coeffs().iter().zip(expect) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn geometric_series_from_samples() {
        let plan = CirclePlan::new(0.5, 64).unwrap();
        let samples = sample_on_circle(|z| 1.0 / (1.0 - z), &plan);
        let ex = coeffs_from_samples(&samples, &plan, 4).unwrap();
        for a in ex.coeffs.coeffs() {
            assert!((a - c(1.0)).norm() < 1e-14, "{a}");
        }
        // true aliasing error is 0.5^64/(1-0.5^64), far below the roundoff floor
        assert!(ex.error_estimate() < 1e-13);
    }

    #[test]
    fn too_few_samples_rejected() {
        let plan = CirclePlan::new(0.5, 8).unwrap();
        let samples = vec![c(1.0); 8];
        assert_eq!(
            coeffs_from_samples(&samples, &plan, 4).unwrap_err(),
            Error::Aliasing { samples: 8, coeffs: 5 }
        );
    }

    #[test]
    fn hp_mean_examples() {
        let one = CoeffVector::from_real(&[1.0]).unwrap();
        for p in [1.0, 2.0, 3.5] {
            let m = hp_mean(&one, p, &CirclePlan::new(0.3, 8).unwrap()).unwrap();
            assert!((m - 1.0).abs() < 1e-15);
        }
        let z = CoeffVector::from_real(&[0.0, 1.0]).unwrap();
        let m = hp_mean(&z, 2.0, &CirclePlan::new(0.5, 8).unwrap()).unwrap();
        assert!((m - 0.5).abs() < 1e-15);

        let geo = CoeffVector::from_real(&[1.0; 513]).unwrap();
        let m = hp_mean(&geo, 2.0, &CirclePlan::for_order(512)).unwrap();
        let oracle = (0..=512).map(|n| 0.81f64.powi(n)).sum::<f64>().sqrt();
        assert!((m - oracle).abs() < 1e-6, "{m} vs {oracle}");
    }

    #[test]
    fn hp_mean_rejects_bad_exponent() {
        let one = CoeffVector::from_real(&[1.0]).unwrap();
        assert!(hp_mean(&one, 0.5, &CirclePlan::for_order(0)).is_err());
    }
}
