use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::time::Instant;
use subspec_core::analytic::{
    binomial_coeffs, coeffs_from_samples, hp_membership_classifier, sample_on_circle, Membership, MembershipConfig,
};
use subspec_core::matrices::{cesaro_matrix, resolvent_solve};
use subspec_core::spectral::{
    eigenfield_witness, generator_spectrum_region, map_region_laplace, map_region_resolvent, pseudospectral_radius,
    local_radius_trace, pseudospectrum_grid, semigroup_spectrum_region, spectral_radius_formula,
    EigenfieldMode, GridBox, MuGrid, ShiftedSolver,
};
use subspec_core::subordination::{
    averaging_apply, check_measure_regularity, subordinate_matrix, RegularityVerdict,
};
use subspec_core::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within_budget(start: Instant, budget_s: f64) -> (bool, String) {
    let secs = start.elapsed().as_secs_f64();
    (secs <= budget_s, format!("{secs:.2} s of {budget_s} s"))
}

fn cesaro_transpose() -> Outcome {
    let start = Instant::now();
    let nu = BorelMeasure::exponential(c(1.0, 0.0)).unwrap();
    let h = subordinate_matrix(&Semiflow::affine(), &nu, 256, None).unwrap();
    let err = h.max_abs_diff(&cesaro_matrix(256).adjoint()).unwrap();
    let (fast, time) = within_budget(start, 60.0);
    outcome(err <= 1e-10 && fast, format!("N=256 max entry error {err:.2e} (<= 1e-10), {time}"))
}

fn resolvent_threeway() -> Outcome {
    let start = Instant::now();
    let order = 128;
    let flow = Semiflow::affine();
    let polys: [&[f64]; 3] = [&[1.0], &[0.0, 1.0], &[0.0, 3.0, 1.0]];
    let plan = CirclePlan::new(0.5, 32).unwrap();
    let mut worst = 0.0f64;
    for lambda in [c(1.0, 0.0), c(2.0, 0.0), c(1.5, 0.7)] {
        let nu = BorelMeasure::exponential(lambda).unwrap();
        let h = subordinate_matrix(&flow, &nu, order, None).unwrap();
        for p in polys {
            let mut cs = p.to_vec();
            cs.resize(order + 1, 0.0);
            let f = CoeffVector::from_real(&cs).unwrap();
            let solved = resolvent_solve(&flow, lambda, &f).unwrap();
            let quad = h.apply(&f).unwrap();
            let fz = CoeffVector::from_real(p).unwrap();
            let g = |z: Complex64| fz.eval(z).unwrap();
            let values = sample_on_circle(|z| averaging_apply(&flow, lambda, &g, z).unwrap(), &plan);
            let avg = coeffs_from_samples(&values, &plan, 15).unwrap().coeffs.resized(order);
            worst = worst
                .max(solved.max_abs_diff(&quad))
                .max(solved.max_abs_diff(&avg))
                .max(quad.max_abs_diff(&avg));
        }
    }
    let (fast, time) = within_budget(start, 30.0);
    outcome(worst <= 1e-8 && fast, format!("N=128 worst pairwise gap {worst:.2e} (<= 1e-8), {time}"))
}

fn eigenfield() -> Outcome {
    let nu = BorelMeasure::exponential(c(1.0, 0.0)).unwrap();
    let grid = MuGrid { re: (-1.0, 0.4), im: (-0.5, 0.5), nx: 5, ny: 5 };
    let r = eigenfield_witness(&Semiflow::affine(), &nu, &grid, 2.0, EigenfieldMode::Pointwise).unwrap();
    let (res, cauchy) = (r.max_residual(), r.max_cauchy());
    outcome(
        res <= 1e-8 && cauchy <= 1e-8 && r.entries.len() == 25,
        format!("5x5 grid max residual {res:.2e}, max cell contour {cauchy:.2e} (both <= 1e-8)"),
    )
}

fn semiflow_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = [0.0f64; 3];
    let mut dw_ok = true;
    let disc = |rng: &mut ChaCha8Rng| Complex64::from_polar(0.95 * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
    for flow in Semiflow::catalog() {
        for _ in 0..100 {
            let (t, s) = (3.0 * rng.random::<f64>(), 3.0 * rng.random::<f64>());
            let z = disc(&mut rng);
            let law = (flow.phi(t + s, z).unwrap() - flow.phi(t, flow.phi(s, z).unwrap()).unwrap()).norm();
            worst[0] = worst[0].max(law);
            if flow.is_elliptic() {
                continue;
            }
            let conj = (flow.koenigs_inv(flow.koenigs(z).unwrap() + t).unwrap() - flow.phi(t, z).unwrap()).norm();
            worst[1] = worst[1].max(conj);
            let w = Complex64::from_polar(0.9 * rng.random::<f64>(), TAU * rng.random::<f64>());
            let h = 1e-3;
            let k = |d: f64| flow.koenigs(w + d).unwrap();
            let dh = (k(-2.0 * h) - 8.0 * k(-h) + 8.0 * k(h) - k(2.0 * h)) / (12.0 * h);
            worst[2] = worst[2].max((flow.generator(w) * dh - 1.0).norm());
        }
        if flow.classification() == Classification::Hyperbolic {
            let tau = flow.dw_point();
            let dist: Vec<f64> = (0..=100).map(|j| (flow.phi(0.1 * j as f64, c(0.0, 0.0)).unwrap() - tau).norm()).collect();
            dw_ok &= dist.windows(2).all(|p| p[1] < p[0]) && dist[100] < 0.05;
        }
    }
    let affine = Semiflow::affine();
    let one = c(1.0, 0.0);
    let boundary = (0..=20)
        .map(|j| {
            let t = 0.25 * j as f64;
            let d = (affine.phi_unchecked(t, one) - affine.phi_unchecked(t, one - 1e-4)) / 1e-4;
            (d - (-t).exp()).norm()
        })
        .fold(0.0f64, f64::max);
    let (fast, time) = within_budget(start, 10.0);
    let pass = worst[0] <= 1e-12 && worst[1] <= 1e-10 && worst[2] <= 1e-8 && dw_ok && boundary <= 1e-6 && fast;
    outcome(
        pass,
        format!(
            "law {:.1e}, conjugacy {:.1e}, G*h' {:.1e}, Denjoy-Wolff {}, boundary derivative {:.1e}, {time}",
            worst[0],
            worst[1],
            worst[2],
            if dw_ok { "ok" } else { "violated" },
            boundary
        ),
    )
}

fn region_coherence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let affine = Semiflow::affine();
    let sigma = generator_spectrum_region(&affine, 2.0).unwrap();
    let mut misclassified = 0;
    let mut max_res = 0.0f64;
    for lambda in [c(1.0, 0.0), c(2.0, 0.0), c(1.5, 0.7)] {
        let closed = map_region_resolvent(&sigma, lambda).unwrap();
        let nu = BorelMeasure::exponential(lambda).unwrap();
        let cloud = map_region_laplace(&sigma.negated(), &nu, true, 160).unwrap();
        let SpectralRegion::Cloud { resolution, .. } = &cloud else { unreachable!() };
        max_res = max_res.max(*resolution);
        let d = 0.5 / (lambda.re - 0.5);
        for _ in 0..1000 {
            let w = c(rng.random_range(-0.5..2.0 * d + 0.5), rng.random_range(-d - 0.5..d + 0.5));
            if closed.contains(w) != cloud.contains(w) && closed.boundary_distance(w) > *resolution {
                misclassified += 1;
            }
        }
    }

    let mut predicates_ok = true;
    let hyp = Semiflow::hyperbolic_automorphism();
    let disk = map_region_resolvent(&sigma, c(1.0, 0.0)).unwrap();
    let annulus = semigroup_spectrum_region(&hyp, 2.0, 1.0).unwrap();
    let circle = semigroup_spectrum_region(&Semiflow::parabolic_automorphism(), 2.0, 1.0).unwrap();
    for p in [1.0, 2.0, 4.0] {
        let half = generator_spectrum_region(&affine, p).unwrap();
        let strip = generator_spectrum_region(&hyp, p).unwrap();
        for _ in 0..1000 {
            let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            predicates_ok &= half.contains(z) == (z.re <= 1.0 / p);
            predicates_ok &= strip.contains(z) == (z.re.abs() <= 1.0 / p);
            if p == 2.0 {
                predicates_ok &= disk.contains(z) == ((z - 1.0).norm() <= 1.0);
                let m = z.norm();
                predicates_ok &= annulus.contains(z) == ((-0.5f64).exp() <= m && m <= 0.5f64.exp());
            }
        }
    }
    predicates_ok &= circle.contains(Complex64::from_polar(1.0, 0.3)) && !circle.contains(c(0.5, 0.0));
    outcome(
        misclassified == 0 && predicates_ok,
        format!(
            "3x1000 probes, {misclassified} misclassified beyond cloud resolution {max_res:.3}; closed forms as predicates {}",
            if predicates_ok { "ok" } else { "differ" }
        ),
    )
}

fn pseudospectra() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let solvers: Vec<ShiftedSolver> = [50, 100, 200].iter().map(|&n| ShiftedSolver::new(&cesaro_matrix(n))).collect();
    let mut inside_ok = true;
    let mut outside_ok = true;
    let mut outside_ratio = f64::INFINITY;
    for _ in 0..32 {
        let th = TAU * rng.random::<f64>();
        let inner = c(1.0, 0.0) + Complex64::from_polar(0.9 * rng.random::<f64>().sqrt(), th);
        let outer = c(1.0, 0.0) + Complex64::from_polar(1.1 + rng.random::<f64>(), th);
        let si: Vec<f64> = solvers.iter().map(|s| s.sigma_min(inner)).collect();
        let so: Vec<f64> = solvers.iter().map(|s| s.sigma_min(outer)).collect();
        inside_ok &= si.windows(2).all(|p| p[1] < p[0]);
        outside_ok &= so.windows(2).all(|p| p[1] >= 0.9 * p[0]);
        outside_ratio = so.windows(2).map(|p| p[1] / p[0]).fold(outside_ratio, f64::min);
    }
    let grid = pseudospectrum_grid(
        &cesaro_matrix(200),
        GridBox { x0: -0.5, x1: 2.5, y0: -1.5, y1: 1.5 },
        (200, 200),
    )
    .unwrap();
    let grid_ok = grid.values.len() == 40000 && grid.values.iter().all(|v| *v >= 0.0);

    let r_cesaro = pseudospectral_radius(&cesaro_matrix(200), 1e-4).unwrap();
    let comp = Semiflow::affine().composition_matrix(1.0, 200, None).unwrap();
    let r_comp = pseudospectral_radius(&comp, 1e-4).unwrap();
    let target = spectral_radius_formula(&Semiflow::affine(), 2.0, 1.0).unwrap();
    let cesaro_in = (1.85..=2.05).contains(&r_cesaro);
    let comp_in = (target - 0.15..=target + 0.05).contains(&r_comp);
    let (fast, time) = within_budget(start, 600.0);
    outcome(
        inside_ok && outside_ok && grid_ok && cesaro_in && comp_in && fast,
        format!(
            "inside decreasing {inside_ok}, outside stable {outside_ok} (worst ratio {outside_ratio:.3}), 200x200 grid {grid_ok}; \
             r_eps(cesaro) = {r_cesaro:.3} in [1.85, 2.05]: {cesaro_in}; \
             r_eps(C_phi1) = {r_comp:.3} in [{:.3}, {:.3}]: {comp_in}; {time}",
            target - 0.15,
            target + 0.05
        ),
    )
}

fn membership() -> Outcome {
    let start = Instant::now();
    let config = MembershipConfig::default();
    let mut verdicts = Vec::new();
    for (lambda, want) in [
        (0.25, Membership::Member),
        (0.45, Membership::Member),
        (0.55, Membership::Nonmember),
        (0.75, Membership::Nonmember),
    ] {
        let got = hp_membership_classifier(&binomial_coeffs(c(lambda, 0.0)), 2.0, &config).unwrap().verdict;
        verdicts.push((lambda, got, got == want));
    }
    let all = verdicts.iter().all(|v| v.2);
    let (fast, time) = within_budget(start, 60.0);
    let listing: Vec<String> = verdicts.iter().map(|(l, v, _)| format!("{l}: {v:?}")).collect();
    outcome(all && fast, format!("{}, {time}", listing.join(", ")))
}

fn cesaro_as_resolvent() -> Outcome {
    let nu = BorelMeasure::exponential(c(1.0, 0.0)).unwrap();
    let h = subordinate_matrix(&Semiflow::elliptic_power(), &nu, 64, None).unwrap();
    let cesaro = cesaro_matrix(64);
    let err = h.max_abs_diff(&cesaro).unwrap();
    let (m, k) = (0..=64)
        .flat_map(|m| (0..=64).map(move |k| (m, k)))
        .max_by(|a, b| {
            let da = (h.entry(a.0, a.1) - cesaro.entry(a.0, a.1)).norm();
            let db = (h.entry(b.0, b.1) - cesaro.entry(b.0, b.1)).norm();
            da.total_cmp(&db)
        })
        .unwrap();
    outcome(
        err <= 1e-4,
        format!(
            "N=64 max entry error {err:.2e} (<= 1e-4) at ({m},{k}): subordinated {:.4}, cesaro {:.4}",
            h.entry(m, k).re,
            cesaro.entry(m, k).re
        ),
    )
}

/// `‖𝒞ⁿ e₀‖` on the first `N+1` coordinates, from
/// `(𝒞ⁿ e₀)_k = h_{n−1}(1, 1/2, …, 1/(k+1))/(k+1)` with `h_m` the complete
/// homogeneous symmetric polynomials, accumulated by `H_m ← H_m + x_j H_{m−1}`.
fn cesaro_power_norms(order: usize, n_max: usize) -> Vec<f64> {
    let mut h = vec![0.0f64; n_max];
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

fn local_radius() -> Outcome {
    let order = 4096;
    let trace = local_radius_trace(&cesaro_matrix(order), &CoeffVector::monomial(0, order), 40).unwrap();
    let oracle = cesaro_power_norms(order, 40);
    let worst = (1..=40)
        .map(|n| {
            let exact = oracle[n].powf(1.0 / n as f64);
            (trace.radius(n).unwrap() - exact).abs() / exact
        })
        .fold(0.0f64, f64::max);
    let first_drop = trace.first_non_increase(2, 40);
    let increasing = first_drop.is_none();
    outcome(
        increasing && worst <= 1e-10,
        format!(
            "oracle relative error {worst:.1e} (<= 1e-10); strictly increasing on 2..40: {}",
            match first_drop {
                None => "yes".to_string(),
                Some(n) => format!("no, r_{} <= r_{n} ({:.6} <= {:.6})", n + 1, trace.radius(n + 1).unwrap(), trace.radius(n).unwrap()),
            }
        ),
    )
}

fn measure_regularity() -> Outcome {
    let start = Instant::now();
    let (omega0, delta) = (0.5, 0.1);
    let rate = c(omega0 + 2.0 * delta, 0.0);
    let smooth = check_measure_regularity(&BorelMeasure::exponential(rate).unwrap(), omega0, delta, 1.0, 0.5, 32)
        .unwrap()
        .verdict;
    let growing = check_measure_regularity(&BorelMeasure::exponential(c(-1.0, 0.0)).unwrap(), 0.0, delta, 1.0, 0.5, 32)
        .unwrap()
        .verdict;
    let singular = BorelMeasure::from_density(Density::gamma(-0.5, rate).unwrap()).unwrap();
    let singular = check_measure_regularity(&singular, omega0, delta, 0.5, 0.5, 32).unwrap().verdict;
    let (fast, time) = within_budget(start, 5.0);
    let pass = smooth == RegularityVerdict::Pass
        && growing == RegularityVerdict::Fail
        && singular == RegularityVerdict::Pass
        && fast;
    outcome(pass, format!("{smooth:?}/{growing:?}/{singular:?} (want Pass/Fail/Pass), {time}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("cesaro-subordination identity", cesaro_transpose),
        ("resolvent three-way agreement", resolvent_threeway),
        ("eigenfield witness", eigenfield),
        ("semiflow identity suite", semiflow_identities),
        ("spectral-region coherence", region_coherence),
        ("pseudospectral evidence", pseudospectra),
        ("membership classifier vs strips", membership),
        ("cesaro as elliptic resolvent", cesaro_as_resolvent),
        ("local-radius trend", local_radius),
        ("measure-regularity checker", measure_regularity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {:>2} {name}: {} ({:.2} s)",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
