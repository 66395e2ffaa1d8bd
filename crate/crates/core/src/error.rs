use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {z} lies outside the closed unit disc")]
    OutsideDisc { z: String },

    #[error("too few samples: {samples} samples cannot resolve {coeffs} coefficients without aliasing")]
    Aliasing { samples: usize, coeffs: usize },

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("structure flag {flag} contradicts entry ({row}, {col})")]
    StructureViolation {
        flag: &'static str,
        row: usize,
        col: usize,
    },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("symbol is not a self-map of the disc: {0}")]
    NotSelfMap(String),

    #[error("generator of {0} is not a polynomial of degree at most two")]
    NonPolynomialGenerator(&'static str),

    #[error("singular resolvent: pivot {pivot:e} at index {index} is below tolerance")]
    SingularResolvent { index: usize, pivot: f64 },

    #[error("{flow} flows carry no Koenigs data")]
    NoKoenigsData { flow: &'static str },

    #[error("{0} is outside the scope of this calculator")]
    UnsupportedFlow(&'static str),

    #[error("Laplace parameter {z} is outside the convergence half-plane Re z > {bound}")]
    DivergentLaplace { z: String, bound: f64 },

    #[error("measure is not admissible: {0}")]
    Inadmissible(String),

    #[error("quadrature plan too small: tail bound {tail:e} exceeds tolerance {tol:e}; need t_max >= {required_t_max}")]
    PlanTooSmall {
        tail: f64,
        tol: f64,
        required_t_max: f64,
    },

    #[error("point {z} lies inside the region")]
    InsideRegion { z: String },

    #[error("{0}")]
    Domain(String),
}

pub(crate) fn fmt_c(z: num_complex::Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}
