//! Special functions and quadrature used by every analytic formula.
//!
//! All functions here are pure and thread-safe.

mod gamma;
mod normal;
mod quad;

pub use gamma::{
    gamma, gamma_neg, ln_gamma, lower_incomplete_gamma, regularized_lower_gamma,
    upper_incomplete_gamma,
};
pub use normal::{gaussian_q, ln_gaussian_q, scaled_q};
pub use quad::{
    integrate, integrate_semi_infinite, integrate_semi_infinite_try, integrate_try, QuadSpec,
};
