//! Verification suites. Each suite runs a fixed list of named checks and
//! reports measured values against tolerances.

use crate::config::{ConfigError, ExperimentConfig};
use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::TAU;
use std::path::PathBuf;
use std::time::Instant;
use subspec_core::analytic::{
    binomial_coeffs, coeffs_from_samples, hp_membership_classifier, sample_on_circle, Membership, MembershipConfig,
};
use subspec_core::matrices::{cesaro_matrix, resolvent_solve};
use subspec_core::spectral::{
    eigenfield_witness, local_radius_trace, pseudospectral_radius, sigma_min, spectral_radius_formula, EigenfieldMode,
    MuGrid, ShiftedSolver,
};
use subspec_core::subordination::{averaging_apply, check_measure_regularity, subordinate_matrix, RegularityVerdict};
use subspec_core::{
    BorelMeasure, CirclePlan, Classification, CoeffVector, Complex64, Density, FlowKind, Semiflow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    /// `null` when not finite or not numeric.
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub runtime_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub artifacts: Vec<PathBuf>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<CheckRecord>) -> Self {
        let ran: Vec<&CheckRecord> = checks.iter().filter(|c| c.status != Status::Skip).collect();
        let status = if ran.iter().all(|c| c.status == Status::Pass) { Status::Pass } else { Status::Fail };
        Self { suite: suite.to_string(), status, checks, artifacts: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// JSON with sorted keys.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports always serialize")
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Collects checks while timing each one from the previous record.
struct Recorder<'a> {
    config: &'a ExperimentConfig,
    checks: Vec<CheckRecord>,
    clock: Instant,
}

impl<'a> Recorder<'a> {
    fn new(config: &'a ExperimentConfig) -> Self {
        Self { config, checks: Vec::new(), clock: Instant::now() }
    }

    fn lap(&mut self) -> f64 {
        let secs = self.clock.elapsed().as_secs_f64();
        self.clock = Instant::now();
        secs
    }

    /// Passes when `measured <= tolerance` (overridable by name).
    fn at_most(&mut self, name: &str, measured: f64, default_tol: f64) {
        let tol = self.config.tolerance(name, default_tol);
        let pass = measured <= tol;
        self.push(name, pass, Some(measured), Some(tol), None);
    }

    /// Passes when `measured >= bound` (overridable by name).
    fn at_least(&mut self, name: &str, measured: f64, default_bound: f64) {
        let bound = self.config.tolerance(name, default_bound);
        let pass = measured >= bound;
        self.push(name, pass, Some(measured), Some(bound), Some("lower bound".into()));
    }

    fn flag(&mut self, name: &str, pass: bool, measured: Option<f64>, note: Option<String>) {
        self.push(name, pass, measured, None, note);
    }

    fn skip(&mut self, name: &str, note: String) {
        let runtime_s = self.lap();
        self.checks.push(CheckRecord {
            name: name.into(),
            status: Status::Skip,
            measured: None,
            tolerance: None,
            runtime_s,
            note: Some(note),
        });
    }

    fn push(&mut self, name: &str, pass: bool, measured: Option<f64>, tolerance: Option<f64>, note: Option<String>) {
        let runtime_s = self.lap();
        self.checks.push(CheckRecord {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            measured: measured.filter(|v| v.is_finite()),
            tolerance,
            runtime_s,
            note,
        });
    }

    fn finish(self, suite: &str) -> SuiteReport {
        SuiteReport::new(suite, self.checks)
    }
}

/// Runs the named suite. Configuration problems surface as [`ConfigError`];
/// failing checks are reported, not raised.
pub fn run_suite(name: &str, config: &ExperimentConfig, seed: u64) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut report = match name {
        "semiflow-identities" => semiflow_identities(config, seed)?,
        "resolvent-threeway" => resolvent_threeway(config)?,
        "cesaro-transpose" => cesaro_transpose(config)?,
        "eigenfield" => eigenfield(config)?,
        "membership" => membership(config)?,
        "pseudospectra-disk" => pseudospectra_disk(config, seed)?,
        "radius-formula" => radius_formula(config)?,
        "cesaro-as-resolvent" => cesaro_as_resolvent(config)?,
        "measure-regularity" => measure_regularity(config)?,
        "local-radius" => local_radius(config)?,
        other => return Err(ConfigError(format!("unknown suite {other:?}")).into()),
    };
    let total = started.elapsed().as_secs_f64();
    if let Some(budget) = runtime_budget(name) {
        let tol = config.tolerance("runtime", budget);
        report.checks.push(CheckRecord {
            name: "runtime".into(),
            status: if total <= tol { Status::Pass } else { Status::Fail },
            measured: Some(total),
            tolerance: Some(tol),
            runtime_s: 0.0,
            note: None,
        });
        report = SuiteReport::new(&report.suite, report.checks);
    }
    Ok(report)
}

fn runtime_budget(name: &str) -> Option<f64> {
    match name {
        "semiflow-identities" | "measure-regularity" => Some(5.0),
        "resolvent-threeway" => Some(30.0),
        "cesaro-transpose" | "membership" => Some(60.0),
        "pseudospectra-disk" => Some(600.0),
        _ => None,
    }
}

fn flows(config: &ExperimentConfig) -> Result<Vec<Semiflow>, ConfigError> {
    match &config.flow {
        Some(_) => Ok(vec![config.flow()?]),
        None => Ok(Semiflow::catalog()),
    }
}

fn semiflow_identities(config: &ExperimentConfig, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let disc = |rng: &mut ChaCha8Rng| Complex64::from_polar(0.95 * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
    let flows = flows(config)?;
    let (mut law, mut conj, mut gh) = (0.0f64, 0.0f64, 0.0f64);
    let mut koenigs_flows = 0;
    for flow in &flows {
        for _ in 0..100 {
            let (t, s) = (3.0 * rng.random::<f64>(), 3.0 * rng.random::<f64>());
            let z = disc(&mut rng);
            law = law.max((flow.phi(t + s, z)? - flow.phi(t, flow.phi(s, z)?)?).norm());
            if flow.is_elliptic() {
                continue;
            }
            conj = conj.max((flow.koenigs_inv(flow.koenigs(z)? + t)? - flow.phi(t, z)?).norm());
            let w = Complex64::from_polar(0.9 * rng.random::<f64>(), TAU * rng.random::<f64>());
            let h = 1e-3;
            let k = |d: f64| flow.koenigs(w + d);
            let dh = (k(-2.0 * h)? - 8.0 * k(-h)? + 8.0 * k(h)? - k(2.0 * h)?) / (12.0 * h);
            gh = gh.max((flow.generator(w) * dh - 1.0).norm());
        }
        if !flow.is_elliptic() {
            koenigs_flows += 1;
        }
    }
    rec.at_most("semigroup-law", law, 1e-12);
    if koenigs_flows > 0 {
        rec.at_most("koenigs-conjugacy", conj, 1e-10);
        rec.at_most("generator-koenigs", gh, 1e-8);
    } else {
        rec.skip("koenigs-conjugacy", "elliptic flows carry no Koenigs data".into());
        rec.skip("generator-koenigs", "elliptic flows carry no Koenigs data".into());
    }

    let hyperbolic: Vec<&Semiflow> = flows.iter().filter(|f| f.classification() == Classification::Hyperbolic).collect();
    if hyperbolic.is_empty() {
        rec.skip("denjoy-wolff", "no hyperbolic flow selected".into());
    } else {
        let mut monotone = true;
        let mut last = 0.0f64;
        for flow in hyperbolic {
            let tau = flow.dw_point();
            let dist: Vec<f64> = (0..=100)
                .map(|j| flow.phi(0.1 * j as f64, c(0.0, 0.0)).map(|w| (w - tau).norm()))
                .collect::<Result<_, _>>()?;
            monotone &= dist.windows(2).all(|p| p[1] < p[0]);
            last = last.max(dist[100]);
        }
        let tol = config.tolerance("denjoy-wolff", 0.05);
        rec.push("denjoy-wolff", monotone && last <= tol, Some(last), Some(tol), None);
    }

    if flows.iter().any(|f| f.kind() == FlowKind::AffineHyperbolic && f.time_scale() == 1.0) {
        let affine = Semiflow::affine();
        let one = c(1.0, 0.0);
        let worst = (0..=20)
            .map(|j| {
                let t = 0.25 * j as f64;
                let d = (affine.phi_unchecked(t, one) - affine.phi_unchecked(t, one - 1e-4)) / 1e-4;
                (d - (-t).exp()).norm()
            })
            .fold(0.0f64, f64::max);
        rec.at_most("boundary-derivative", worst, 1e-6);
    } else {
        rec.skip("boundary-derivative", "defined for the affine flow".into());
    }
    Ok(rec.finish("semiflow-identities"))
}

fn resolvent_threeway(config: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let order = config.order_or(128);
    let flow = config.flow()?;
    let polys: [&[f64]; 3] = [&[1.0], &[0.0, 1.0], &[0.0, 3.0, 1.0]];
    let plan = CirclePlan::new(0.5, 32)?;
    let mut worst = 0.0f64;
    for lambda in [c(1.0, 0.0), c(2.0, 0.0), c(1.5, 0.7)] {
        let nu = BorelMeasure::exponential(lambda)?;
        let h = subordinate_matrix(&flow, &nu, order, None)?;
        for p in polys {
            let mut cs = p.to_vec();
            cs.resize(order + 1, 0.0);
            let f = CoeffVector::from_real(&cs)?;
            let solved = resolvent_solve(&flow, lambda, &f)?;
            let quad = h.apply(&f)?;
            let fz = CoeffVector::from_real(p)?;
            let g = |z: Complex64| fz.eval(z).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let values = sample_on_circle(
                |z| averaging_apply(&flow, lambda, &g, z).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                &plan,
            );
            let avg = coeffs_from_samples(&values, &plan, 15)?.coeffs.resized(order);
            worst = worst
                .max(solved.max_abs_diff(&quad))
                .max(solved.max_abs_diff(&avg))
                .max(quad.max_abs_diff(&avg));
        }
    }
    rec.at_most("pairwise-gap", if worst.is_nan() { f64::INFINITY } else { worst }, 1e-8);
    Ok(rec.finish("resolvent-threeway"))
}

fn cesaro_transpose(config: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let order = config.order_or(64);
    let nu = BorelMeasure::exponential(c(1.0, 0.0))?;
    let h = subordinate_matrix(&Semiflow::affine(), &nu, order, None)?;
    let err = h.max_abs_diff(&cesaro_matrix(order).adjoint())?;
    rec.at_most("max-entry-error", err, 1e-10);
    Ok(rec.finish("cesaro-transpose"))
}

fn eigenfield(config: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let grid = MuGrid { re: (-1.0, 0.4), im: (-0.5, 0.5), nx: 5, ny: 5 };
    let report = eigenfield_witness(&config.flow()?, &config.measure()?, &grid, config.p_or_2(), EigenfieldMode::Pointwise)?;
    rec.at_most("pointwise-residual", report.max_residual(), 1e-8);
    rec.at_most("cauchy-residual", report.max_cauchy(), 1e-8);
    Ok(rec.finish("eigenfield"))
}

fn membership(config: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let classifier = MembershipConfig::default();
    let p = config.p_or_2();
    let threshold = 1.0 / p;
    for lambda in [0.25, 0.45, 0.55, 0.75] {
        let want = if lambda < threshold { Membership::Member } else { Membership::Nonmember };
        let report = hp_membership_classifier(&binomial_coeffs(c(lambda, 0.0)), p, &classifier)?;
        rec.flag(
            &format!("lambda-{lambda}"),
            report.verdict == want,
            Some(report.growth_exponent),
            Some(format!("{:?}, expected {want:?}", report.verdict)),
        );
    }
    Ok(rec.finish("membership"))
}

fn pseudospectra_disk(config: &ExperimentConfig, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let order = config.order_or(200);
    let eps = config.eps.unwrap_or(1e-4);
    let orders = [order / 4, order / 2, order];
    if orders[0] == 0 {
        return Err(ConfigError(format!("N = {order} is too small for three nested orders")).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let solvers: Vec<ShiftedSolver> = orders.iter().map(|&n| ShiftedSolver::new(&cesaro_matrix(n))).collect();
    let mut inside_bad = 0usize;
    let mut outside_ratio = f64::INFINITY;
    for _ in 0..32 {
        let th = TAU * rng.random::<f64>();
        let inner = c(1.0, 0.0) + Complex64::from_polar(0.9 * rng.random::<f64>().sqrt(), th);
        let outer = c(1.0, 0.0) + Complex64::from_polar(1.1 + rng.random::<f64>(), th);
        let si: Vec<f64> = solvers.iter().map(|s| s.sigma_min(inner)).collect();
        let so: Vec<f64> = solvers.iter().map(|s| s.sigma_min(outer)).collect();
        inside_bad += usize::from(!si.windows(2).all(|p| p[1] < p[0]));
        outside_ratio = so.windows(2).map(|p| p[1] / p[0]).fold(outside_ratio, f64::min);
    }
    rec.at_most("inside-decreasing", inside_bad as f64, 0.0);
    rec.at_least("outside-stable", outside_ratio, 0.9);
    let cesaro = cesaro_matrix(order);
    rec.at_most("sigma-min-at-one", sigma_min(&cesaro, c(1.0, 0.0)), 1e-3);
    let r = pseudospectral_radius(&cesaro, eps)?;
    let (lo, hi) = (1.85, 2.05);
    rec.flag("pseudospectral-radius", (lo..=hi).contains(&r), Some(r), Some(format!("window [{lo}, {hi}]")));
    Ok(rec.finish("pseudospectra-disk"))
}

fn radius_formula(config: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let flow = config.flow()?;
    let (p, t) = (config.p_or_2(), config.t.unwrap_or(1.0));
    let order = config.order_or(200);
    let eps = config.eps.unwrap_or(1e-4);
    if flow.classification() != Classification::Hyperbolic {
        rec.skip("pseudospectral-radius", format!("{} is not hyperbolic", flow.name()));
        return Ok(rec.finish("radius-formula"));
    }
    let target = spectral_radius_formula(&flow, p, t)?;
    let comp = flow.composition_matrix(t, order, None)?;
    let r = pseudospectral_radius(&comp, eps)?;
    let (lo, hi) = (target - 0.15, target + 0.05);
    rec.flag(
        "pseudospectral-radius",
        (lo..=hi).contains(&r),
        Some(r),
        Some(format!("target {target:.6}, window [{lo:.6}, {hi:.6}]")),
    );
    Ok(rec.finish("radius-formula"))
}

fn cesaro_as_resolvent(config: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let order = config.order_or(64);
    let nu = BorelMeasure::exponential(c(1.0, 0.0))?;
    let h = subordinate_matrix(&Semiflow::elliptic_power(), &nu, order, None)?;
    let err = h.max_abs_diff(&cesaro_matrix(order))?;
    rec.at_most("max-entry-error", err, 1e-4);
    Ok(rec.finish("cesaro-as-resolvent"))
}

fn measure_regularity(config: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let (omega0, delta) = (0.5, 0.1);
    let rate = c(omega0 + 2.0 * delta, 0.0);
    let cases = [
        ("smooth-density", BorelMeasure::exponential(rate)?, omega0, 1.0, RegularityVerdict::Pass),
        ("growing-density", BorelMeasure::exponential(c(-1.0, 0.0))?, 0.0, 1.0, RegularityVerdict::Fail),
        (
            "singular-density",
            BorelMeasure::from_density(Density::gamma(-0.5, rate)?)?,
            omega0,
            0.5,
            RegularityVerdict::Pass,
        ),
    ];
    for (name, nu, w0, eta, want) in cases {
        let got = check_measure_regularity(&nu, w0, delta, eta, 0.5, 32)?.verdict;
        rec.flag(name, got == want, None, Some(format!("{got:?}, expected {want:?}")));
    }
    Ok(rec.finish("measure-regularity"))
}

/// `‖𝒞ⁿ e₀‖` on the first `N+1` coordinates, from
/// `(𝒞ⁿ e₀)_k = h_{n−1}(1, 1/2, …, 1/(k+1))/(k+1)` with `h_m` the complete
/// homogeneous symmetric polynomials.
pub fn cesaro_power_norms(order: usize, n_max: usize) -> Vec<f64> {
    let mut h = vec![0.0f64; n_max.max(1)];
    h[0] = 1.0;
    let mut sq = vec![0.0f64; n_max + 1];
    for k in 0..=order {
        let x = 1.0 / (k as f64 + 1.0);
        for m in 1..n_max {
            h[m] += x * h[m - 1];
        }
        for n in 1..=n_max {
            let v = h[n - 1] * x;
            sq[n] += v * v;
        }
    }
    sq.iter().map(|s| s.sqrt()).collect()
}

fn local_radius(config: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rec = Recorder::new(config);
    let order = config.order_or(4096);
    let n_max = config.n_max.unwrap_or(40);
    if n_max < 3 {
        return Err(ConfigError(format!("n_max = {n_max} must be at least 3")).into());
    }
    let trace = local_radius_trace(&cesaro_matrix(order), &CoeffVector::monomial(0, order), n_max)?;
    let oracle = cesaro_power_norms(order, n_max);
    let worst = (1..=n_max)
        .map(|n| {
            let exact = oracle[n].powf(1.0 / n as f64);
            trace.radius(n).map_or(f64::INFINITY, |r| (r - exact).abs() / exact)
        })
        .fold(0.0f64, f64::max);
    rec.at_most("oracle-relative-error", worst, 1e-10);
    let drop = trace.first_non_increase(2, n_max);
    rec.flag(
        "strictly-increasing",
        drop.is_none(),
        drop.map(|n| n as f64),
        drop.map(|n| {
            format!(
                "r_{} <= r_{n} ({:.6} <= {:.6})",
                n + 1,
                trace.radius(n + 1).unwrap_or(f64::NAN),
                trace.radius(n).unwrap_or(f64::NAN)
            )
        }),
    );
    Ok(rec.finish("local-radius"))
}
