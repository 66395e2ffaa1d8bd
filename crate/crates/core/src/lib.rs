//! Finite-section laboratory for the Cesàro operator, semigroups of composition
//! operators on Hardy spaces, and the operators subordinated to them.
//!
//! Everything works in the monomial basis of `H²`: a function on the unit disc is
//! a [`CoeffVector`] of Taylor coefficients and an operator is an
//! [`OperatorMatrix`] holding its `(N+1)×(N+1)` compression. Statements about
//! `H^p` for `p ≠ 2` are probed through function evaluation on circles, never
//! through a matrix norm.
//!
//! Module map:
//!
//! * [`analytic`]: truncated power series, circle sampling, Hardy means and the
//!   `H^p` membership classifier.
//! * [`matrices`]: Cesàro, composition and generator compressions, resolvent
//!   solves and structure-aware matrix algebra.
//! * [`semiflows`]: the catalog of holomorphic semiflows with their Koenigs data.
//! * [`subordination`]: Borel measures, Laplace transforms and the
//!   subordinated operators `∫ T_t dν(t)`.
//! * [`spectral`]: closed-form spectral regions, pseudospectra, local spectral
//!   radius traces and the eigenfield witness.
//! * [`quadrature`]: Gauss rules used by the integrals above.

pub mod analytic;
mod error;
pub mod matrices;
pub mod quadrature;
pub mod semiflows;
pub mod spectral;
pub mod subordination;

pub use analytic::{CirclePlan, CoeffVector};
pub use error::{Error, Result};
pub use matrices::{CompressionExactness, OperatorMatrix, Structure};
pub use semiflows::{Classification, FlowKind, Semiflow};
pub use spectral::SpectralRegion;
pub use subordination::{BorelMeasure, Density, QuadraturePlan};

pub use num_complex::Complex64;
