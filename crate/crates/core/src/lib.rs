//! Downlink coverage probability and mean rate for cellular networks whose
//! base stations form a Poisson point process, together with a Monte-Carlo
//! simulator for PPP, square-grid and fixed deployments.
//!
//! * [`specfun`]: Gaussian tail, incomplete gamma, adaptive quadrature.
//! * [`fading`]: interference power distributions.
//! * [`analytic`]: coverage and rate integrals and their closed forms.
//! * [`sim`]: Monte-Carlo estimates over concrete deployments.

pub mod analytic;
pub mod curve;
pub mod error;
pub mod fading;
pub mod sim;
pub mod specfun;

#[cfg(test)]
mod testutil;

pub use analytic::NetworkParams;
pub use curve::{db_to_linear, linear_to_db, CoverageCurve, Method, RateResult};
pub use error::{Error, Result};
pub use fading::FadingModel;
