use std::f64::consts::PI;

use super::NetworkParams;
use crate::error::{Error, Result};
use crate::specfun::{integrate_try, QuadSpec};

/// Laplace transform of the interference seen by a user whose serving
/// station is at distance `r`, all interferers lying outside that disc:
///
/// ```text
/// L(s) = exp(−2πλ ∫_r^∞ E[1 − e^{−s g v^{−α}}] v dv)
/// ```
///
/// With u = (r/v)^{α−2} the radial integral becomes
/// (r²/(α−2))·s r^{−α} ∫_0^1 D(s r^{−α} u^{α/(α−2)}) du, where
/// D(θ) = E[1 − e^{−θg}]/θ is bounded, so nothing blows up at u → 0.
pub fn laplace_interference(p: &NetworkParams, r: f64, s: f64) -> Result<f64> {
    p.validate()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("serving distance r > 0 violated (r = {r})")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("transform variable s >= 0 violated (s = {s})")));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let alpha = p.alpha;
    let power = alpha / (alpha - 2.0);
    let base = s * r.powf(-alpha);
    let spec = QuadSpec::default().with_rel_tol(1e-10);
    let inner = integrate_try(
        |u| p.fading.laplace_deficit_over_theta(base * u.powf(power), &spec),
        0.0,
        1.0,
        &spec,
    )?;
    let radial = r * r / (alpha - 2.0) * base * inner;
    Ok((-2.0 * PI * p.lambda * radial).exp())
}
