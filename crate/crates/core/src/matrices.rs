//! Finite compressions of operators on `H²` in the monomial basis.
//!
//! `entry[m][k]` is the coefficient of `z^m` in the image of `z^k`. Matrices are
//! immutable once built; the structure flag is checked against the entries on
//! construction, so a `Lower` matrix really has exact zeros above the diagonal.

use crate::analytic::{coeffs_from_samples, CirclePlan, CoeffVector};
use crate::error::{Error, Result};
use crate::semiflows::Semiflow;
use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Lower,
    Upper,
    Banded { lower: usize, upper: usize },
    General,
}

impl Structure {
    /// `(lower, upper)` bandwidths, `None` meaning unbounded.
    fn bandwidths(self) -> (Option<usize>, Option<usize>) {
        match self {
            Structure::Lower => (None, Some(0)),
            Structure::Upper => (Some(0), None),
            Structure::Banded { lower, upper } => (Some(lower), Some(upper)),
            Structure::General => (None, None),
        }
    }

    fn from_bandwidths(lower: Option<usize>, upper: Option<usize>) -> Self {
        match (lower, upper) {
            (Some(lower), Some(upper)) => Structure::Banded { lower, upper },
            (None, Some(0)) => Structure::Lower,
            (Some(0), None) => Structure::Upper,
            _ => Structure::General,
        }
    }

    pub fn is_lower(self) -> bool {
        self.bandwidths().1 == Some(0)
    }

    pub fn is_upper(self) -> bool {
        self.bandwidths().0 == Some(0)
    }

    /// Whether position `(m, k)` is flagged as an exact zero.
    pub fn forces_zero(self, m: usize, k: usize) -> bool {
        let (lo, up) = self.bandwidths();
        matches!(lo, Some(l) if m > k + l) || matches!(up, Some(u) if k > m + u)
    }

    fn transpose(self) -> Self {
        let (lo, up) = self.bandwidths();
        Self::from_bandwidths(up, lo)
    }

    fn product(self, other: Self) -> Self {
        let (l1, u1) = self.bandwidths();
        let (l2, u2) = other.bandwidths();
        let add = |a: Option<usize>, b: Option<usize>| Some(a? + b?);
        Self::from_bandwidths(add(l1, l2), add(u1, u2))
    }
}

/// Whether products and powers of compressions equal compressions of products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompressionExactness {
    ExactLower,
    ExactUpper,
    Approximate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    structure: Structure,
    exactness: CompressionExactness,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl OperatorMatrix {
    pub fn new(
        entries: DMatrix<Complex64>,
        structure: Structure,
        exactness: CompressionExactness,
    ) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "compression must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        match exactness {
            CompressionExactness::ExactLower if !structure.is_lower() => {
                return Err(Error::InvalidArgument("exact-lower needs lower structure".into()))
            }
            CompressionExactness::ExactUpper if !structure.is_upper() => {
                return Err(Error::InvalidArgument("exact-upper needs upper structure".into()))
            }
            _ => {}
        }
        let n = entries.nrows();
        for k in 0..n {
            for m in 0..n {
                let v = entries[(m, k)];
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite(k * n + m));
                }
                if v != zero() && structure.forces_zero(m, k) {
                    return Err(Error::StructureViolation {
                        flag: structure_name(structure),
                        row: m,
                        col: k,
                    });
                }
            }
        }
        Ok(Self {
            entries,
            structure,
            exactness,
        })
    }

    /// Dense matrix with no structure claims.
    pub fn general(entries: DMatrix<Complex64>) -> Result<Self> {
        Self::new(entries, Structure::General, CompressionExactness::Approximate)
    }

    pub fn identity(order: usize) -> Self {
        Self {
            entries: DMatrix::identity(order + 1, order + 1),
            structure: Structure::Banded { lower: 0, upper: 0 },
            exactness: CompressionExactness::ExactLower,
        }
    }

    pub fn from_fn(
        order: usize,
        structure: Structure,
        exactness: CompressionExactness,
        f: impl Fn(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let entries = DMatrix::from_fn(order + 1, order + 1, |m, k| {
            if structure.forces_zero(m, k) {
                zero()
            } else {
                f(m, k)
            }
        });
        Self::new(entries, structure, exactness)
    }

    /// Truncation order `N`; the matrix is `(N+1)×(N+1)`.
    pub fn order(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn entry(&self, m: usize, k: usize) -> Complex64 {
        self.entries[(m, k)]
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn exactness(&self) -> CompressionExactness {
        self.exactness
    }

    fn check_order(&self, other: usize) -> Result<()> {
        if self.order() != other {
            Err(Error::OrderMismatch {
                left: self.order(),
                right: other,
            })
        } else {
            Ok(())
        }
    }

    /// `A·x`, skipping flagged zeros.
    pub fn apply(&self, x: &CoeffVector) -> Result<CoeffVector> {
        self.check_order(x.order())?;
        Ok(CoeffVector::from_vec_unchecked(self.apply_slice(x.coeffs())))
    }

    pub(crate) fn apply_slice(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let (lo, up) = self.structure.bandwidths();
        let mut y = vec![zero(); n];
        for (k, &xk) in x.iter().enumerate() {
            if xk == zero() {
                continue;
            }
            let start = up.map_or(0, |u| k.saturating_sub(u));
            let end = lo.map_or(n, |l| (k + l + 1).min(n));
            let col = self.entries.column(k);
            let col = &col.as_slice()[start..end];
            for (yi, a) in y[start..end].iter_mut().zip(col) {
                *yi += a * xk;
            }
        }
        y
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_order(other.order())?;
        let exactness = match (self.exactness, other.exactness) {
            (a, b) if a == b => a,
            _ => CompressionExactness::Approximate,
        };
        let structure = self.structure.product(other.structure);
        let mut entries = &self.entries * &other.entries;
        clear_flagged(&mut entries, structure);
        Ok(Self {
            entries,
            structure,
            exactness: demote(exactness, structure),
        })
    }

    /// `A^k` by repeated squaring; `A^0` is the identity.
    pub fn power(&self, k: u32) -> Self {
        let mut result = Self::identity(self.order());
        result.exactness = self.exactness;
        if !self.structure.is_lower() && !self.structure.is_upper() {
            result.exactness = CompressionExactness::Approximate;
        }
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.product(&base).expect("same order");
            }
            e >>= 1;
            if e > 0 {
                base = base.product(&base).expect("same order");
            }
        }
        result
    }

    /// Conjugate transpose, the `H²` adjoint.
    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            structure: self.structure.transpose(),
            exactness: match self.exactness {
                CompressionExactness::ExactLower => CompressionExactness::ExactUpper,
                CompressionExactness::ExactUpper => CompressionExactness::ExactLower,
                CompressionExactness::Approximate => CompressionExactness::Approximate,
            },
        }
    }

    /// Leading `(M+1)×(M+1)` block.
    pub fn leading_block(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::InvalidArgument(format!(
                "block order {order} exceeds matrix order {}",
                self.order()
            )));
        }
        Ok(Self {
            entries: self.entries.view((0, 0), (order + 1, order + 1)).into_owned(),
            structure: self.structure,
            exactness: self.exactness,
        })
    }

    /// `A − zI`.
    pub fn shifted(&self, z: Complex64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[(i, i)] -= z;
        }
        Self {
            entries,
            structure: self.structure,
            exactness: self.exactness,
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            entries: &self.entries * c,
            structure: self.structure,
            exactness: self.exactness,
        }
    }

    /// `A + B`; exactness survives when both flags agree.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_order(other.order())?;
        let (l1, u1) = self.structure.bandwidths();
        let (l2, u2) = other.structure.bandwidths();
        let join = |a: Option<usize>, b: Option<usize>| Some(a?.max(b?));
        let structure = Structure::from_bandwidths(join(l1, l2), join(u1, u2));
        let exactness = if self.exactness == other.exactness {
            self.exactness
        } else {
            CompressionExactness::Approximate
        };
        Ok(Self {
            entries: &self.entries + &other.entries,
            structure,
            exactness: demote(exactness, structure),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_order(other.order())?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.entries[(i, i)]).collect()
    }
}

fn structure_name(s: Structure) -> &'static str {
    match s {
        Structure::Lower => "lower",
        Structure::Upper => "upper",
        Structure::Banded { .. } => "banded",
        Structure::General => "general",
    }
}

fn clear_flagged(entries: &mut DMatrix<Complex64>, structure: Structure) {
    if structure == Structure::General {
        return;
    }
    let n = entries.nrows();
    for k in 0..n {
        for m in 0..n {
            if structure.forces_zero(m, k) {
                entries[(m, k)] = zero();
            }
        }
    }
}

fn demote(exactness: CompressionExactness, structure: Structure) -> CompressionExactness {
    match exactness {
        CompressionExactness::ExactLower if !structure.is_lower() => CompressionExactness::Approximate,
        CompressionExactness::ExactUpper if !structure.is_upper() => CompressionExactness::Approximate,
        e => e,
    }
}

/// Compression of the Cesàro averaging operator, `entry[n][k] = 1/(n+1)` for `k ≤ n`.
pub fn cesaro_matrix(order: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(order, Structure::Lower, CompressionExactness::ExactLower, |n, _| {
        Complex64::new(1.0 / (n as f64 + 1.0), 0.0)
    })
    .expect("finite lower-triangular entries")
}

/// Strictly lower shift `z^k ↦ z^{k+1}` truncated at order `N`.
pub fn shift_matrix(order: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(
        order,
        Structure::Banded { lower: 1, upper: 0 },
        CompressionExactness::ExactLower,
        |m, k| if m == k + 1 { Complex64::new(1.0, 0.0) } else { zero() },
    )
    .expect("finite entries")
}

/// Diagonal matrix with the given entries.
pub fn diagonal_matrix(values: &[Complex64]) -> Result<OperatorMatrix> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty diagonal".into()));
    }
    OperatorMatrix::from_fn(
        values.len() - 1,
        Structure::Banded { lower: 0, upper: 0 },
        CompressionExactness::ExactLower,
        |m, k| if m == k { values[m] } else { zero() },
    )
}

/// Compression of `C_φ` for `φ(z) = az + b`: column `k` holds the coefficients of
/// `(az + b)^k`, built by the recurrence `col_k = (a z + b)·col_{k−1}`.
pub fn composition_matrix_affine(a: Complex64, b: Complex64, order: usize) -> Result<OperatorMatrix> {
    if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
        return Err(Error::InvalidArgument("affine symbol must be finite".into()));
    }
    if a.norm() + b.norm() > 1.0 + 1e-12 {
        return Err(Error::NotSelfMap(format!(
            "|a| + |b| = {} exceeds 1",
            a.norm() + b.norm()
        )));
    }
    let n = order + 1;
    let mut entries = DMatrix::from_element(n, n, zero());
    entries[(0, 0)] = Complex64::new(1.0, 0.0);
    for k in 1..n {
        for m in 0..=k {
            let from_shift = if m > 0 { a * entries[(m - 1, k - 1)] } else { zero() };
            let from_const = if m < k { b * entries[(m, k - 1)] } else { zero() };
            entries[(m, k)] = from_shift + from_const;
        }
    }
    OperatorMatrix::new(entries, Structure::Upper, CompressionExactness::ExactUpper)
}

/// Compression of `C_φ` for a general symbol by sampling `φ^k` on the plan's
/// circle. Returns the matrix with the largest per-column aliasing estimate.
pub fn composition_matrix_general(
    symbol: impl Fn(Complex64) -> Complex64,
    order: usize,
    plan: &CirclePlan,
) -> Result<(OperatorMatrix, f64)> {
    let points: Vec<Complex64> = plan.points().collect();
    let values: Vec<Complex64> = points.iter().map(|&z| symbol(z)).collect();
    for (z, w) in points.iter().zip(&values) {
        if !(w.norm() < 1.0) {
            return Err(Error::NotSelfMap(format!(
                "|φ({})| = {} is not below 1",
                crate::error::fmt_c(*z),
                w.norm()
            )));
        }
    }
    let n = order + 1;
    let mut entries = DMatrix::from_element(n, n, zero());
    let mut powers = vec![Complex64::new(1.0, 0.0); values.len()];
    let mut estimate = 0.0f64;
    for k in 0..n {
        let ex = coeffs_from_samples(&powers, plan, order)?;
        estimate = estimate.max(ex.error_estimate());
        for (m, c) in ex.coeffs.coeffs().iter().enumerate() {
            entries[(m, k)] = *c;
        }
        for (p, w) in powers.iter_mut().zip(&values) {
            *p *= w;
        }
    }
    Ok((OperatorMatrix::general(entries)?, estimate))
}

/// Compression of `Δf = G f'` for a generator of degree at most two.
pub fn generator_matrix(flow: &Semiflow, order: usize) -> Result<OperatorMatrix> {
    let [g0, g1, g2] = flow
        .generator_poly()
        .ok_or(Error::NonPolynomialGenerator(flow.name()))?;
    let structure = Structure::Banded {
        lower: usize::from(g2 != zero()),
        upper: usize::from(g0 != zero()),
    };
    let exactness = if g2 == zero() {
        CompressionExactness::ExactUpper
    } else {
        CompressionExactness::Approximate
    };
    OperatorMatrix::from_fn(order, structure, exactness, |m, k| {
        let kf = k as f64;
        if m + 1 == k {
            g0 * kf
        } else if m == k {
            g1 * kf
        } else if m == k + 1 {
            g2 * kf
        } else {
            zero()
        }
    })
}

/// Pivot threshold for the banded resolvent elimination.
pub const PIVOT_TOL: f64 = 1e-12;

/// Solves `(λI − Δ) g = f` at the compression level by tridiagonal elimination.
pub fn resolvent_solve(flow: &Semiflow, lambda: Complex64, f: &CoeffVector) -> Result<CoeffVector> {
    let [g0, g1, g2] = flow
        .generator_poly()
        .ok_or(Error::NonPolynomialGenerator(flow.name()))?;
    let n = f.order() + 1;
    // sub[k] = M[k+1][k], diag[k] = M[k][k], sup[k] = M[k][k+1]
    let diag: Vec<Complex64> = (0..n).map(|k| lambda - g1 * k as f64).collect();
    let sub: Vec<Complex64> = (0..n).map(|k| -g2 * k as f64).collect();
    let sup: Vec<Complex64> = (0..n).map(|k| -g0 * (k + 1) as f64).collect();

    let mut pivots = Vec::with_capacity(n);
    let mut rhs = f.coeffs().to_vec();
    for k in 0..n {
        let mut p = diag[k];
        if k > 0 {
            let factor = sub[k - 1] / pivots[k - 1];
            p -= factor * sup[k - 1];
            let prev = rhs[k - 1];
            rhs[k] -= factor * prev;
        }
        if !(p.norm() > PIVOT_TOL) {
            return Err(Error::SingularResolvent {
                index: k,
                pivot: p.norm(),
            });
        }
        pivots.push(p);
    }
    let mut g = vec![zero(); n];
    for k in (0..n).rev() {
        let mut v = rhs[k];
        if k + 1 < n {
            v -= sup[k] * g[k + 1];
        }
        g[k] = v / pivots[k];
    }
    CoeffVector::new(g)
}
