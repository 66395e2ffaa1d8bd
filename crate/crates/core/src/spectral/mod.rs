//! Spectral regions from closed forms, their images under resolvent and
//! Laplace maps, and the finite-section observables that stand in for
//! spectra of non-normal operators: pseudospectral grids, local radius traces
//! and eigenvector fields.
//!
//! Eigenvalues of a compression are never read as spectral claims. The
//! Cesàro compression has eigenvalues `1/(n+1)` while its `H²` spectrum is the
//! closed disk of center 1 and radius 1.

mod calculators;
mod eigenfield;
mod local_radius;
mod pseudospectra;
mod region;

pub use calculators::{
    generator_point_spectrum_region, generator_spectrum_region, map_region_laplace, map_region_resolvent,
    semigroup_spectrum_region, spectral_radius_formula,
};
pub use eigenfield::{eigenfield_witness, witness_points, EigenfieldEntry, EigenfieldMode, EigenfieldReport, MuGrid};
pub use local_radius::{local_radius_trace, local_radius_trace_with, LocalRadiusTrace};
pub use pseudospectra::{
    pseudospectral_radius, pseudospectrum_grid, sigma_min, sigma_min_dense, GridBox, PseudospectrumGrid,
    ShiftedSolver, MAX_GRID, RADIAL_RESOLUTION,
};
pub use region::{Side, SpectralRegion};
