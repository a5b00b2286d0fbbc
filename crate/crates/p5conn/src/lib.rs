//! Connection formulae for the fifth Painlevé transcendent on the imaginary axis.
//!
//! The library works with the degenerate Painlevé V equation (quadratic
//! nonlinearity scaled to delta-hat = -1/2) written as a first-order system in
//! the variables (y, z, log u) with complex time t restricted to rays through
//! the origin. It provides:
//!
//! * closed-form asymptotic charts near t = 0 (power, logarithmic, and
//!   degenerate regimes) and near t = infinity on the imaginary axis,
//! * exact maps between each chart and the monodromy data of the associated
//!   linear system, which together solve the connection problem in closed form,
//! * parameter transformations (Schlesinger shifts of the formal exponent at
//!   infinity, sign flips of t) acting on solutions and on monodromy data,
//! * the one-parameter family of solutions bounded on the whole imaginary
//!   axis, with Taylor, Bessel, and large-time descriptions,
//! * an adaptive Runge-Kutta integrator along rays used to verify the charts
//!   against each other numerically, and a small pipeline/CLI layer that
//!   packages standard verification cases.
//!
//! All multivalued powers of t are taken along the ray: the argument of t is
//! carried as explicit data ([`specfun::RayPoint`]) and never recomputed from
//! rectangular coordinates.

pub mod asympt_inf;
pub mod asympt_zero;
pub mod model;
pub mod monodromy;
pub mod special;
pub mod specfun;
pub mod transforms;

pub use num_complex::Complex64;

/// Errors shared across the crate. Variants name the mathematical obstruction
/// rather than the call site; the payload carries enough to diagnose which
/// parameter hit it.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("gamma pole at z = {at} (nonpositive integer within 1e-12)")]
    GammaPole { at: Complex64 },
    #[error("digamma pole at z = {at} (nonpositive integer within 1e-12)")]
    DigammaPole { at: Complex64 },
    #[error("{what} overflows double precision at argument {arg}")]
    Overflow { what: &'static str, arg: f64 },
    #[error("unsupported Bessel order {0}; only 0 and 1 are implemented")]
    BesselOrder(u8),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("singular denominator in {what}: {detail}")]
    SingularDenominator { what: &'static str, detail: String },
    #[error("resonant parameters in {what}: {detail}")]
    Resonance { what: &'static str, detail: String },
    #[error("state at a solution singularity ({kind:?}) at |t| = {modulus}")]
    AtSingularity {
        kind: crate::model::SingularKind,
        modulus: f64,
    },
    #[error("no admissible branch of the exponent fits the monodromy data")]
    NoBranchFits,
    #[error("parameter on a regime boundary: {0}")]
    BoundaryValue(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Convenience constructor for `Complex64` used throughout the crate.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
