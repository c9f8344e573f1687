//! Special functions, quadrature and restriction-constant machinery for the
//! unit sphere `S^{d-1}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`gamma`] – log-Gamma with Stirling control and sphere surface measure;
//! * [`bessel`] – `J_nu(r)` for real order by several independent methods,
//!   pointwise envelopes, the Krasikov phase decomposition and zeros;
//! * [`weighted`] – weighted norms `(int_0^inf |J_nu(r) r^alpha|^p dr)^(1/p)`
//!   and the matching sup-norm, with an explicit error budget;
//! * [`restriction`] – exact radial restriction constants and the closed-form
//!   constants (`ell_d`, HLS, `C_d`, interpolation bound);
//! * [`verifier`] – parameter sweeps, calibrated implied constants and JSON/CSV
//!   reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod error;
pub mod gamma;
pub mod quad;
pub mod restriction;
pub mod sum;
pub mod value;
pub mod verifier;
pub mod weighted;

pub use bessel::{bessel_j, BesselQuery, Envelope, EnvelopeKind, KrasikovParts};
pub use error::{Error, Result};
pub use gamma::{ln_gamma, sphere_measure, DimensionParams};
pub use restriction::{classify, radial_constant, ExponentPair, RadialConstantResult, Region};
pub use value::{Method, ValueWithError};
pub use weighted::{weighted_norm, weighted_sup, NormQuery, NormResult};
