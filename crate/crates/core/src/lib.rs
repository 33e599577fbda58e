//! Construction and binary-erasure-channel analysis of protograph-based
//! generalized LDPC (GLDPC) and spatially coupled GLDPC code ensembles.
//!
//! The crate covers three analysis pipelines on top of a shared protograph
//! layer:
//!
//! * iterative decoding thresholds: exact multi-edge density evolution,
//!   BP EXIT curves and the area-theorem bound on the MAP threshold
//!   ([`density_evolution`]),
//! * asymptotic distance properties: ensemble spectral shape, minimum
//!   distance growth rates and free distance bounds ([`spectral`]),
//! * finite-length behaviour: generalized peeling decoding of lifted
//!   Tanner graphs, the mean evolution of the residual degree
//!   distribution, and scaling-law fits and predictions ([`peeling`],
//!   [`evolution`], [`scaling`]).
//!
//! Floating-point kernels are generic over the [`Real`] scalar trait
//! (`f32` or `f64`); the aliases at the crate root fix `f64`, which is
//! what the CLI and the test suites use. Bit-level linear algebra over
//! GF(2) lives in [`gf2`] and is not scalar-generic.

pub mod density_evolution;
pub mod ensemble_file;
pub mod evolution;
pub mod gf2;
pub mod lifting;
pub mod peeling;
pub mod protograph;
pub mod scalar;
pub mod scaling;
pub mod spectral;

mod error;

pub use error::Error;
pub use scalar::Real;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Exact rational used for design rates.
pub type Rate = num_rational::Ratio<i64>;

/// Default scalar for CLI runs and the acceptance suites.
pub type Scalar = f64;

/// [`density_evolution::ExitCurve`] at the default scalar.
pub type ExitCurve64 = density_evolution::ExitCurve<f64>;
