use super::region::{Side, SpectralRegion};
use crate::error::{fmt_c, Error, Result};
use crate::semiflows::{Classification, Semiflow};
use crate::subordination::{laplace_transform, BorelMeasure};
use num_complex::Complex64;
use std::f64::consts::PI;

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("Hardy exponent p = {p} must be at least 1")))
    }
}

fn hyperbolic_gamma(flow: &Semiflow) -> Result<f64> {
    let g = flow.geometry();
    match (g.classification, g.gamma) {
        (Classification::Hyperbolic, Some(gamma)) => Ok(gamma),
        _ => Err(Error::UnsupportedFlow(flow.name())),
    }
}

/// `σ(Δ; H^p)` for a hyperbolic flow: `{Re λ ≤ π/(pγ)}` when the Koenigs domain
/// contains no horizontal strip, `{|Re λ| ≤ π/(pγ)}` when it is a strip.
pub fn generator_spectrum_region(flow: &Semiflow, p: f64) -> Result<SpectralRegion> {
    check_p(p)?;
    let gamma = hyperbolic_gamma(flow)?;
    let c = PI / (p * gamma);
    let geometry = flow.geometry();
    if geometry.contains_strip == Some(true) {
        if !geometry.is_strip {
            return Err(Error::UnsupportedFlow(flow.name()));
        }
        Ok(SpectralRegion::Strip {
            a: -c,
            b: c,
            left_closed: true,
            right_closed: true,
        })
    } else {
        Ok(SpectralRegion::HalfPlane {
            c,
            side: Side::Left,
            closed: true,
        })
    }
}

/// Inclusions `inner ⊂ σ_p(Δ; H^p) ⊂ outer` for a hyperbolic flow.
pub fn generator_point_spectrum_region(flow: &Semiflow, p: f64) -> Result<(SpectralRegion, SpectralRegion)> {
    check_p(p)?;
    let gamma = hyperbolic_gamma(flow)?;
    let c = PI / (p * gamma);
    let geometry = flow.geometry();
    match (geometry.contains_strip, geometry.beta_max) {
        (Some(true), Some(beta)) => {
            let a = -PI / (p * beta);
            Ok((
                SpectralRegion::Strip {
                    a,
                    b: c,
                    left_closed: false,
                    right_closed: false,
                },
                SpectralRegion::Strip {
                    a,
                    b: c,
                    left_closed: false,
                    right_closed: true,
                },
            ))
        }
        _ => Ok((
            SpectralRegion::HalfPlane {
                c,
                side: Side::Left,
                closed: false,
            },
            SpectralRegion::HalfPlane {
                c,
                side: Side::Left,
                closed: true,
            },
        )),
    }
}

/// `σ(C_{φ_t}; H^p)`: the closed disk of radius `e^{πt/(pγ)}`, the annulus
/// `e^{−πt/(pγ)} ≤ |w| ≤ e^{πt/(pγ)}`, or the unit circle for the parabolic
/// automorphisms.
pub fn semigroup_spectrum_region(flow: &Semiflow, p: f64, t: f64) -> Result<SpectralRegion> {
    check_p(p)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time {t} must be nonnegative")));
    }
    let zero = Complex64::new(0.0, 0.0);
    match flow.classification() {
        Classification::Elliptic => Err(Error::UnsupportedFlow(flow.name())),
        Classification::Parabolic => Ok(SpectralRegion::Circle {
            center: zero,
            radius: 1.0,
        }),
        Classification::Hyperbolic => {
            if t == 0.0 {
                return Ok(SpectralRegion::Point(Complex64::new(1.0, 0.0)));
            }
            let r = spectral_radius_formula(flow, p, t)?;
            match generator_spectrum_region(flow, p)? {
                SpectralRegion::Strip { .. } => Ok(SpectralRegion::Annulus {
                    center: zero,
                    r_in: 1.0 / r,
                    r_out: r,
                }),
                _ => Ok(SpectralRegion::Disk {
                    center: zero,
                    radius: r,
                    closed: true,
                }),
            }
        }
    }
}

/// `r(C_{φ_t}; H^p) = φ_t'(1)^{−1/p} = e^{πt/(pγ)}`; `1` at `t = 0` for every flow.
pub fn spectral_radius_formula(flow: &Semiflow, p: f64, t: f64) -> Result<f64> {
    check_p(p)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time {t} must be nonnegative")));
    }
    let gamma = hyperbolic_gamma(flow)?;
    Ok((PI * t / (p * gamma)).exp())
}

/// Disk bounded by the image of the line `Re z = c` under `z ↦ 1/(λ − z)`.
fn line_image(lambda: Complex64, c: f64) -> (Complex64, f64) {
    let d = lambda.re - c;
    (Complex64::new(0.5 / d, 0.0), 0.5 / d.abs())
}

fn with_origin(region: SpectralRegion) -> SpectralRegion {
    if region.contains(Complex64::new(0.0, 0.0)) {
        region
    } else {
        SpectralRegion::Union(vec![region, SpectralRegion::Point(Complex64::new(0.0, 0.0))])
    }
}

/// `σ(R(λ, Δ)) = {0} ∪ {1/(λ − z) : z ∈ σ(Δ)}`.
///
/// Half-planes and strips have closed-form images (a disk through the origin,
/// or the region between two circles tangent at the origin). Other regions are
/// mapped as point clouds.
pub fn map_region_resolvent(region: &SpectralRegion, lambda: Complex64) -> Result<SpectralRegion> {
    let inside = || Error::InsideRegion { z: fmt_c(lambda) };
    match region {
        SpectralRegion::HalfPlane { c, side, closed } => {
            let ok = match side {
                Side::Left => lambda.re > *c,
                Side::Right => lambda.re < *c,
            };
            if !ok {
                return Err(inside());
            }
            let (center, radius) = line_image(lambda, *c);
            Ok(with_origin(SpectralRegion::Disk {
                center,
                radius,
                closed: *closed,
            }))
        }
        SpectralRegion::Strip {
            a,
            b,
            left_closed,
            right_closed,
        } => {
            // The boundary line nearer to λ gives the outer circle.
            let (near, near_closed, far, far_closed) = if lambda.re > *b {
                (*b, *right_closed, *a, *left_closed)
            } else if lambda.re < *a {
                (*a, *left_closed, *b, *right_closed)
            } else {
                return Err(inside());
            };
            let (oc, or) = line_image(lambda, near);
            let (ic, ir) = line_image(lambda, far);
            Ok(with_origin(SpectralRegion::Crescent {
                outer_center: oc,
                outer_radius: or,
                outer_closed: near_closed,
                inner_center: ic,
                inner_radius: ir,
                inner_closed: !far_closed,
            }))
        }
        SpectralRegion::Point(p) => {
            if *p == lambda {
                return Err(inside());
            }
            Ok(SpectralRegion::Union(vec![
                SpectralRegion::Point(1.0 / (lambda - p)),
                SpectralRegion::Point(Complex64::new(0.0, 0.0)),
            ]))
        }
        SpectralRegion::Union(parts) => {
            let mapped = parts
                .iter()
                .map(|r| map_region_resolvent(r, lambda))
                .collect::<Result<Vec<_>>>()?;
            Ok(SpectralRegion::Union(mapped))
        }
        other => {
            if other.contains(lambda) {
                return Err(inside());
            }
            let cloud = map_region_cloud(other, 200, None, &|z| {
                if z == lambda {
                    Err(inside())
                } else {
                    Ok(1.0 / (lambda - z))
                }
            })?;
            Ok(with_origin(cloud))
        }
    }
}

enum Sample {
    Finite(Complex64),
    Infinite,
    Outside,
}

/// Point of `region` at parameters `(u, v) ∈ [0, 1]²`.
fn parameter_point(region: &SpectralRegion, u: f64, v: f64) -> Sample {
    let tan_y = |v: f64| {
        if v <= 0.0 || v >= 1.0 {
            None
        } else {
            Some((PI * (v - 0.5)).tan())
        }
    };
    match region {
        SpectralRegion::HalfPlane { c, side, .. } => {
            if u >= 1.0 {
                return Sample::Infinite;
            }
            let Some(y) = tan_y(v) else { return Sample::Infinite };
            let x = (0.5 * PI * u).tan();
            let re = match side {
                Side::Left => c - x,
                Side::Right => c + x,
            };
            Sample::Finite(Complex64::new(re, y))
        }
        SpectralRegion::Strip { a, b, .. } => {
            let Some(y) = tan_y(v) else { return Sample::Infinite };
            Sample::Finite(Complex64::new(a + (b - a) * u, y))
        }
        SpectralRegion::Disk { center, radius, .. } => {
            Sample::Finite(center + Complex64::from_polar(radius * u, 2.0 * PI * v))
        }
        SpectralRegion::Circle { center, radius } => {
            Sample::Finite(center + Complex64::from_polar(*radius, 2.0 * PI * v))
        }
        SpectralRegion::Annulus { center, r_in, r_out } => Sample::Finite(
            center + Complex64::from_polar(r_in + (r_out - r_in) * u, 2.0 * PI * v),
        ),
        SpectralRegion::Crescent {
            outer_center,
            outer_radius,
            ..
        } => {
            let z = outer_center + Complex64::from_polar(outer_radius * u, 2.0 * PI * v);
            if region.contains_within(z, 1e-12) {
                Sample::Finite(z)
            } else {
                Sample::Outside
            }
        }
        SpectralRegion::Point(p) => Sample::Finite(*p),
        SpectralRegion::Union(_) | SpectralRegion::Cloud { .. } => Sample::Outside,
    }
}

/// Samples `region` on an `n × n` parameter grid and maps it through `f`.
/// Resolution is the largest image diameter of a grid cell; cells touching
/// infinity count only when `at_infinity` supplies a limit value.
fn map_region_cloud(
    region: &SpectralRegion,
    n: usize,
    at_infinity: Option<Complex64>,
    f: &dyn Fn(Complex64) -> Result<Complex64>,
) -> Result<SpectralRegion> {
    match region {
        SpectralRegion::Union(parts) => {
            let mut points = Vec::new();
            let mut resolution = 0.0f64;
            for part in parts {
                if let SpectralRegion::Cloud { points: p, resolution: r } = map_region_cloud(part, n, at_infinity, f)? {
                    points.extend(p);
                    resolution = resolution.max(r);
                }
            }
            return Ok(SpectralRegion::Cloud { points, resolution });
        }
        SpectralRegion::Cloud { points, resolution } => {
            let h = resolution.max(1e-12);
            let mut stretch = 0.0f64;
            let mut out = Vec::with_capacity(points.len());
            for &z in points {
                let w = f(z)?;
                let w2 = f(z + h)?;
                stretch = stretch.max((w2 - w).norm() / h);
                out.push(w);
            }
            return Ok(SpectralRegion::Cloud {
                points: out,
                resolution: resolution * stretch,
            });
        }
        SpectralRegion::Point(p) => {
            return Ok(SpectralRegion::Cloud {
                points: vec![f(*p)?],
                resolution: 0.0,
            });
        }
        _ => {}
    }
    let n = n.max(2);
    let mut grid: Vec<Option<Complex64>> = Vec::with_capacity(n * n);
    let mut points = Vec::with_capacity(n * n);
    let mut finite_infinity = false;
    for i in 0..n {
        let u = i as f64 / (n - 1) as f64;
        for j in 0..n {
            let v = j as f64 / (n - 1) as f64;
            let image = match parameter_point(region, u, v) {
                Sample::Finite(z) => {
                    let w = f(z)?;
                    points.push(w);
                    Some(w)
                }
                Sample::Infinite => {
                    finite_infinity = at_infinity.is_some();
                    at_infinity
                }
                Sample::Outside => None,
            };
            grid.push(image);
        }
    }
    let mut resolution = 0.0f64;
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let corners = [grid[i * n + j], grid[i * n + j + 1], grid[(i + 1) * n + j], grid[(i + 1) * n + j + 1]];
            if corners.iter().any(Option::is_none) {
                continue;
            }
            let cs: Vec<Complex64> = corners.iter().flatten().copied().collect();
            for a in 0..4 {
                for b in a + 1..4 {
                    resolution = resolution.max((cs[a] - cs[b]).norm());
                }
            }
        }
    }
    if finite_infinity {
        points.extend(at_infinity);
    }
    Ok(SpectralRegion::Cloud { points, resolution })
}

/// `𝓛(ν)` evaluated with closed forms where the density family has one.
fn laplace_evaluator(nu: &BorelMeasure) -> impl Fn(Complex64) -> Result<Complex64> + '_ {
    move |z| {
        if let Some(closed) = nu.density().and_then(|d| d.laplace_closed_form(z)) {
            let atoms: Complex64 = nu.atoms().iter().map(|&(t, w)| w * (-z * t).exp()).sum();
            Ok(atoms + closed)
        } else {
            laplace_transform(nu, z)
        }
    }
}

/// `𝓛(ν)(σ̃(−Δ))` as a point cloud on a `sampling × sampling` parameter grid.
///
/// With `include_infinity`, the value `𝓛(ν)(∞)` (the total weight of atoms at
/// `t = 0`; densities contribute `0`) is appended. The region passed in is the
/// spectrum of `−Δ`, so negate `σ(Δ)` first.
pub fn map_region_laplace(
    region: &SpectralRegion,
    nu: &BorelMeasure,
    include_infinity: bool,
    sampling: usize,
) -> Result<SpectralRegion> {
    let at_inf: Complex64 = nu
        .atoms()
        .iter()
        .filter(|(t, _)| *t == 0.0)
        .map(|&(_, w)| w)
        .sum();
    let limit_exists = nu.atoms().iter().all(|(t, _)| *t == 0.0);
    let eval = laplace_evaluator(nu);
    let cloud = map_region_cloud(region, sampling, limit_exists.then_some(at_inf), &eval)?;
    match cloud {
        SpectralRegion::Cloud { mut points, resolution } => {
            if include_infinity && !points.contains(&at_inf) {
                points.push(at_inf);
            }
            Ok(SpectralRegion::Cloud { points, resolution })
        }
        other => Ok(other),
    }
}
