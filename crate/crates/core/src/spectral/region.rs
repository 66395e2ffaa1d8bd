use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `Re z ≤ c` (or `<` when open).
    Left,
    /// `Re z ≥ c` (or `>` when open).
    Right,
}

/// Subsets of the plane produced by the spectral calculators.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralRegion {
    HalfPlane {
        c: f64,
        side: Side,
        closed: bool,
    },
    Strip {
        a: f64,
        b: f64,
        left_closed: bool,
        right_closed: bool,
    },
    Disk {
        center: Complex64,
        radius: f64,
        closed: bool,
    },
    Circle {
        center: Complex64,
        radius: f64,
    },
    /// Closed annulus `r_in ≤ |z − center| ≤ r_out`.
    Annulus {
        center: Complex64,
        r_in: f64,
        r_out: f64,
    },
    /// Outer disk with an inner disk removed. `inner_closed` refers to the
    /// removed disk, so the default crescent has `inner_closed = false`.
    Crescent {
        outer_center: Complex64,
        outer_radius: f64,
        outer_closed: bool,
        inner_center: Complex64,
        inner_radius: f64,
        inner_closed: bool,
    },
    Point(Complex64),
    Union(Vec<SpectralRegion>),
    /// Sampled image; membership means lying within `resolution` of a sample.
    Cloud {
        points: Vec<Complex64>,
        resolution: f64,
    },
}

impl SpectralRegion {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SpectralRegion::HalfPlane { .. } => "halfplane",
            SpectralRegion::Strip { .. } => "strip",
            SpectralRegion::Disk { .. } => "disk",
            SpectralRegion::Circle { .. } => "circle",
            SpectralRegion::Annulus { .. } => "annulus",
            SpectralRegion::Crescent { .. } => "crescent",
            SpectralRegion::Point(_) => "point",
            SpectralRegion::Union(_) => "union",
            SpectralRegion::Cloud { .. } => "cloud",
        }
    }

    /// Exact membership predicate.
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            SpectralRegion::HalfPlane { c, side, closed } => match side {
                Side::Left => z.re < *c || (*closed && z.re == *c),
                Side::Right => z.re > *c || (*closed && z.re == *c),
            },
            SpectralRegion::Strip {
                a,
                b,
                left_closed,
                right_closed,
            } => {
                let left = z.re > *a || (*left_closed && z.re == *a);
                let right = z.re < *b || (*right_closed && z.re == *b);
                left && right
            }
            SpectralRegion::Disk {
                center,
                radius,
                closed,
            } => {
                let d = (z - center).norm();
                d < *radius || (*closed && d == *radius)
            }
            SpectralRegion::Circle { center, radius } => (z - center).norm() == *radius,
            SpectralRegion::Annulus { center, r_in, r_out } => {
                let d = (z - center).norm();
                *r_in <= d && d <= *r_out
            }
            SpectralRegion::Crescent {
                outer_center,
                outer_radius,
                outer_closed,
                inner_center,
                inner_radius,
                inner_closed,
            } => {
                let dout = (z - outer_center).norm();
                let din = (z - inner_center).norm();
                let removed = din < *inner_radius || (*inner_closed && din == *inner_radius);
                let kept = dout < *outer_radius || (*outer_closed && dout == *outer_radius);
                kept && !removed
            }
            SpectralRegion::Point(p) => z == *p,
            SpectralRegion::Union(parts) => parts.iter().any(|r| r.contains(z)),
            SpectralRegion::Cloud { points, resolution } => nearest_distance(points, z) <= *resolution,
        }
    }

    /// Membership allowing a band of width `tol` around the boundary.
    pub fn contains_within(&self, z: Complex64, tol: f64) -> bool {
        match self {
            SpectralRegion::HalfPlane { c, side, .. } => match side {
                Side::Left => z.re <= c + tol,
                Side::Right => z.re >= c - tol,
            },
            SpectralRegion::Strip { a, b, .. } => z.re >= a - tol && z.re <= b + tol,
            SpectralRegion::Disk { center, radius, .. } => (z - center).norm() <= radius + tol,
            SpectralRegion::Circle { center, radius } => ((z - center).norm() - radius).abs() <= tol,
            SpectralRegion::Annulus { center, r_in, r_out } => {
                let d = (z - center).norm();
                d >= r_in - tol && d <= r_out + tol
            }
            SpectralRegion::Crescent {
                outer_center,
                outer_radius,
                inner_center,
                inner_radius,
                ..
            } => {
                (z - outer_center).norm() <= outer_radius + tol
                    && (z - inner_center).norm() >= inner_radius - tol
            }
            SpectralRegion::Point(p) => (z - p).norm() <= tol,
            SpectralRegion::Union(parts) => parts.iter().any(|r| r.contains_within(z, tol)),
            SpectralRegion::Cloud { points, resolution } => {
                nearest_distance(points, z) <= resolution + tol
            }
        }
    }

    /// Distance from `z` to the boundary.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match self {
            SpectralRegion::HalfPlane { c, .. } => (z.re - c).abs(),
            SpectralRegion::Strip { a, b, .. } => (z.re - a).abs().min((z.re - b).abs()),
            SpectralRegion::Disk { center, radius, .. } | SpectralRegion::Circle { center, radius } => {
                ((z - center).norm() - radius).abs()
            }
            SpectralRegion::Annulus { center, r_in, r_out } => {
                let d = (z - center).norm();
                (d - r_in).abs().min((d - r_out).abs())
            }
            SpectralRegion::Crescent {
                outer_center,
                outer_radius,
                inner_center,
                inner_radius,
                ..
            } => ((z - outer_center).norm() - outer_radius)
                .abs()
                .min(((z - inner_center).norm() - inner_radius).abs()),
            SpectralRegion::Point(p) => (z - p).norm(),
            SpectralRegion::Union(parts) => parts
                .iter()
                .map(|r| r.boundary_distance(z))
                .fold(f64::INFINITY, f64::min),
            SpectralRegion::Cloud { points, .. } => nearest_distance(points, z),
        }
    }

    /// Image under `z ↦ −z`.
    pub fn negated(&self) -> Self {
        match self {
            SpectralRegion::HalfPlane { c, side, closed } => SpectralRegion::HalfPlane {
                c: -c,
                side: match side {
                    Side::Left => Side::Right,
                    Side::Right => Side::Left,
                },
                closed: *closed,
            },
            SpectralRegion::Strip {
                a,
                b,
                left_closed,
                right_closed,
            } => SpectralRegion::Strip {
                a: -b,
                b: -a,
                left_closed: *right_closed,
                right_closed: *left_closed,
            },
            SpectralRegion::Disk {
                center,
                radius,
                closed,
            } => SpectralRegion::Disk {
                center: -center,
                radius: *radius,
                closed: *closed,
            },
            SpectralRegion::Circle { center, radius } => SpectralRegion::Circle {
                center: -center,
                radius: *radius,
            },
            SpectralRegion::Annulus { center, r_in, r_out } => SpectralRegion::Annulus {
                center: -center,
                r_in: *r_in,
                r_out: *r_out,
            },
            SpectralRegion::Crescent {
                outer_center,
                outer_radius,
                outer_closed,
                inner_center,
                inner_radius,
                inner_closed,
            } => SpectralRegion::Crescent {
                outer_center: -outer_center,
                outer_radius: *outer_radius,
                outer_closed: *outer_closed,
                inner_center: -inner_center,
                inner_radius: *inner_radius,
                inner_closed: *inner_closed,
            },
            SpectralRegion::Point(p) => SpectralRegion::Point(-p),
            SpectralRegion::Union(parts) => SpectralRegion::Union(parts.iter().map(Self::negated).collect()),
            SpectralRegion::Cloud { points, resolution } => SpectralRegion::Cloud {
                points: points.iter().map(|p| -p).collect(),
                resolution: *resolution,
            },
        }
    }

    /// About `count` points on the boundary. Unbounded boundaries are sampled
    /// through `y = tan θ`.
    pub fn boundary_sample(&self, count: usize) -> Vec<Complex64> {
        let count = count.max(1);
        let line = |x: f64, n: usize| -> Vec<Complex64> {
            (0..n)
                .map(|j| {
                    let th = PI * ((j as f64 + 0.5) / n as f64 - 0.5);
                    Complex64::new(x, th.tan())
                })
                .collect()
        };
        let circle = |c: Complex64, r: f64, n: usize| -> Vec<Complex64> {
            (0..n)
                .map(|j| c + Complex64::from_polar(r, 2.0 * PI * j as f64 / n as f64))
                .collect()
        };
        match self {
            SpectralRegion::HalfPlane { c, .. } => line(*c, count),
            SpectralRegion::Strip { a, b, .. } => {
                let mut v = line(*a, count.div_ceil(2));
                v.extend(line(*b, count / 2));
                v
            }
            SpectralRegion::Disk { center, radius, .. } | SpectralRegion::Circle { center, radius } => {
                circle(*center, *radius, count)
            }
            SpectralRegion::Annulus { center, r_in, r_out } => {
                let mut v = circle(*center, *r_in, count.div_ceil(2));
                v.extend(circle(*center, *r_out, count / 2));
                v
            }
            SpectralRegion::Crescent {
                outer_center,
                outer_radius,
                inner_center,
                inner_radius,
                ..
            } => {
                let mut v = circle(*outer_center, *outer_radius, count.div_ceil(2));
                v.extend(circle(*inner_center, *inner_radius, count / 2));
                v
            }
            SpectralRegion::Point(p) => vec![*p],
            SpectralRegion::Union(parts) => {
                let each = count.div_ceil(parts.len().max(1));
                parts.iter().flat_map(|r| r.boundary_sample(each)).collect()
            }
            SpectralRegion::Cloud { points, .. } => points.clone(),
        }
    }

    /// Whether the region is bounded.
    pub fn is_bounded(&self) -> bool {
        match self {
            SpectralRegion::HalfPlane { .. } | SpectralRegion::Strip { .. } => false,
            SpectralRegion::Union(parts) => parts.iter().all(Self::is_bounded),
            _ => true,
        }
    }
}

fn nearest_distance(points: &[Complex64], z: Complex64) -> f64 {
    points
        .iter()
        .map(|p| (p - z).norm_sqr())
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}
