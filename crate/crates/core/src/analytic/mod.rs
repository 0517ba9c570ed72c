//! Analytic coverage probability and mean rate for a PPP downlink.
//!
//! The typical user sits at the origin and is served by its nearest base
//! station. With desired-link fading h ~ Exp(μ), coverage reduces to
//!
//! ```text
//! p_c(T) = πλ ∫_0^∞ exp(−πλ v c(T) − μTσ² v^{α/2}) dv
//! ```
//!
//! where the interference factor `c(T)` is β(T, α) for general interference
//! fading, 1 + ρ(T, α) for exponential interference and 1 + ρ(T, α)/δ with
//! random reuse over δ bands.

mod laplace;
mod rate;

pub use laplace::laplace_interference;
pub use rate::mean_rate;

use std::f64::consts::PI;

use crate::curve::{CoverageCurve, Method};
use crate::error::{Error, Result};
use crate::fading::{beta_expectation, FadingModel};
use crate::specfun::{gamma, integrate, scaled_q, QuadSpec};

/// System parameters shared by all analytic and simulated computations.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    /// Base-station density per km².
    pub lambda: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Desired-link fading rate: h ~ Exp(μ).
    pub mu: f64,
    /// Noise power; SNR = 1/(μσ²).
    pub sigma2: f64,
    /// Interference power distribution.
    pub fading: FadingModel,
}

impl NetworkParams {
    pub fn new(lambda: f64, alpha: f64, mu: f64, sigma2: f64, fading: FadingModel) -> Result<Self> {
        let p = NetworkParams {
            lambda,
            alpha,
            mu,
            sigma2,
            fading,
        };
        p.validate()?;
        Ok(p)
    }

    /// Exponential interference with the same rate as the desired link.
    pub fn rayleigh(lambda: f64, alpha: f64, mu: f64, sigma2: f64) -> Result<Self> {
        NetworkParams::new(lambda, alpha, mu, sigma2, FadingModel::exponential(mu)?)
    }

    /// Sets σ² from an SNR in dB; `+∞` gives σ² = 0.
    pub fn with_snr_db(mut self, snr_db: f64) -> Result<Self> {
        if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
            return Err(Error::invalid(format!("SNR must be a number of dB or +inf, got {snr_db}")));
        }
        self.sigma2 = if snr_db == f64::INFINITY {
            0.0
        } else {
            1.0 / (self.mu * crate::db_to_linear(snr_db))
        };
        self.validate()?;
        Ok(self)
    }

    pub fn with_fading(mut self, fading: FadingModel) -> Result<Self> {
        self.fading = fading;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    /// SNR at unit distance, 1/(μσ²); infinite without noise.
    pub fn snr(&self) -> f64 {
        1.0 / (self.mu * self.sigma2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda > 0 violated (lambda = {})", self.lambda)));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::Divergence { alpha: self.alpha });
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid(format!("mu > 0 violated (mu = {})", self.mu)));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::invalid(format!(
                "sigma2 >= 0 violated (sigma2 = {})",
                self.sigma2
            )));
        }
        self.fading.validate()
    }
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && !threshold.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid(format!("threshold T > 0 violated (T = {threshold})")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Divergence { alpha })
    }
}

fn rho_spec() -> QuadSpec {
    QuadSpec::default().with_rel_tol(1e-12)
}

/// ρ(T, α) = T^{2/α} ∫_{T^{−2/α}}^∞ du / (1 + u^{α/2}).
///
/// The tail ∫_a^∞ is rewritten with u = z^{−(α−2)/α}-type substitutions so
/// every piece is a smooth integral over a bounded interval:
/// for a ≥ 1 it equals (2/(α−2)) ∫_0^{a^{1−α/2}} dz/(1+z^{α/(α−2)}),
/// and for a < 1 the piece over [a, 1] is integrated directly.
pub fn rho(threshold: f64, alpha: f64) -> Result<f64> {
    check_threshold(threshold)?;
    check_alpha(alpha)?;
    if threshold == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let half = alpha / 2.0;
    let p = alpha / (alpha - 2.0);
    let tail_scale = 2.0 / (alpha - 2.0);
    let spec = rho_spec();
    let lower = threshold.powf(-2.0 / alpha);

    let tail = |upper: f64| integrate(|z| 1.0 / (1.0 + z.powf(p)), 0.0, upper, &spec);
    let j = if lower >= 1.0 {
        tail_scale * tail(lower.powf(1.0 - half))?
    } else {
        integrate(|u| 1.0 / (1.0 + u.powf(half)), lower, 1.0, &spec)? + tail_scale * tail(1.0)?
    };
    Ok(threshold.powf(2.0 / alpha) * j)
}

/// κ(T) = 1 + ρ(T, 4) = 1 + √T (π/2 − arctan(1/√T)).
pub fn kappa(threshold: f64) -> f64 {
    let s = threshold.sqrt();
    1.0 + s * (PI / 2.0 - (1.0 / s).atan())
}

/// ρ for exponential interference of arbitrary rate: g ~ Exp(ν) acts like
/// a threshold rescaled by μ/ν.
fn exponential_rho(p: &NetworkParams, threshold: f64) -> Result<f64> {
    match p.fading {
        FadingModel::Exponential { rate } => rho(threshold * p.mu / rate, p.alpha),
        _ => Err(Error::Contract(
            "this formula requires exponential interference fading".into(),
        )),
    }
}

/// πλ ∫_0^∞ exp(−πλ v c − μTσ² v^{α/2}) dv, truncated at πλv = 40/c where
/// the integrand has fallen below e^{−40}.
fn coverage_integral(p: &NetworkParams, threshold: f64, factor: f64) -> Result<f64> {
    if p.sigma2 == 0.0 {
        return Ok((1.0 / factor).clamp(0.0, 1.0));
    }
    let noise = p.mu * threshold * p.sigma2;
    let scale = PI * p.lambda;
    let half = p.alpha / 2.0;
    let upper = 40.0 / factor;
    let v = integrate(
        |w| (-w * factor - noise * (w / scale).powf(half)).exp(),
        0.0,
        upper,
        &QuadSpec::default(),
    )?;
    Ok(v.clamp(0.0, 1.0))
}

/// General-fading coverage P[SINR > T] through β(T, α).
pub fn coverage_general(p: &NetworkParams, threshold: f64) -> Result<f64> {
    p.validate()?;
    check_threshold(threshold)?;
    let beta = beta_expectation(&p.fading, threshold, p.alpha, p.mu)?;
    coverage_integral(p, threshold, beta)
}

/// Coverage with exponential interference, through 1 + ρ(T, α).
pub fn coverage_exponential(p: &NetworkParams, threshold: f64) -> Result<f64> {
    p.validate()?;
    check_threshold(threshold)?;
    let r = exponential_rho(p, threshold)?;
    coverage_integral(p, threshold, 1.0 + r)
}

/// Interference-limited coverage: 1/β, or 1/(1+ρ) for exponential fading.
pub fn coverage_no_noise(p: &NetworkParams, threshold: f64) -> Result<f64> {
    p.validate()?;
    check_threshold(threshold)?;
    Ok(1.0 / interference_factor(p, threshold)?)
}

/// The factor c(T) multiplying πλv in the coverage exponent: 1 + ρ for
/// exponential interference, β otherwise.
pub fn interference_factor(p: &NetworkParams, threshold: f64) -> Result<f64> {
    if p.fading.is_exponential() {
        Ok(1.0 + exponential_rho(p, threshold)?)
    } else {
        beta_expectation(&p.fading, threshold, p.alpha, p.mu)
    }
}

/// Coverage at α = 4 via the Gaussian tail.
///
/// Evaluated as √(π/b)·πλ·e^{x²/2}Q(x) with x = πλc/√(2b), b = μTσ², which
/// stays finite as σ² → 0 and tends to 1/c.
pub fn coverage_alpha4(p: &NetworkParams, threshold: f64) -> Result<f64> {
    p.validate()?;
    check_threshold(threshold)?;
    if p.alpha != 4.0 {
        return Err(Error::Contract(format!(
            "Gaussian-tail form requires alpha = 4, got {}",
            p.alpha
        )));
    }
    let factor = match p.fading {
        FadingModel::Exponential { rate } => kappa(threshold * p.mu / rate),
        _ => beta_expectation(&p.fading, threshold, 4.0, p.mu)?,
    };
    if p.sigma2 == 0.0 {
        return Ok(1.0 / factor);
    }
    let b = p.mu * threshold * p.sigma2;
    let a = PI * p.lambda * factor;
    let x = a / (2.0 * b).sqrt();
    Ok(((PI / b).sqrt() * PI * p.lambda * scaled_q(x)).clamp(0.0, 1.0))
}

/// Result of the first-order small-noise expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallNoiseApprox {
    /// Expansion clamped to [0, 1].
    pub value: f64,
    /// Unclamped expansion.
    pub raw: f64,
    /// False when the raw value left [0, 1], i.e. σ² is too large for the
    /// expansion to mean anything.
    pub within_validity: bool,
}

/// First-order expansion of coverage in σ²:
///
/// ```text
/// p_c ≈ 1/c − μTσ² (λπ)^{−α/2} Γ(1 + α/2) / c^{1+α/2}
/// ```
///
/// accurate to O(σ⁴).
pub fn coverage_small_noise(p: &NetworkParams, threshold: f64) -> Result<SmallNoiseApprox> {
    p.validate()?;
    check_threshold(threshold)?;
    let c = interference_factor(p, threshold)?;
    let half = p.alpha / 2.0;
    let correction = p.mu * threshold * p.sigma2 * (p.lambda * PI).powf(-half) * gamma(1.0 + half)
        / c.powf(1.0 + half);
    let raw = 1.0 / c - correction;
    let within_validity = (0.0..=1.0).contains(&raw);
    Ok(SmallNoiseApprox {
        value: raw.clamp(0.0, 1.0),
        raw,
        within_validity,
    })
}

fn check_delta(delta: u32) -> Result<()> {
    if delta >= 1 {
        Ok(())
    } else {
        Err(Error::invalid("reuse factor delta >= 1 violated"))
    }
}

/// Coverage when each base station picks one of δ bands at random; the
/// same-band interferers form a PPP of density λ/δ.
pub fn coverage_with_reuse(p: &NetworkParams, threshold: f64, delta: u32) -> Result<f64> {
    p.validate()?;
    check_threshold(threshold)?;
    check_delta(delta)?;
    let r = exponential_rho(p, threshold)?;
    coverage_integral(p, threshold, 1.0 + r / delta as f64)
}

/// Smallest δ with interference-limited reuse coverage ≥ 1 − ε:
/// ⌈ρ(T, α)(1 − ε)/ε⌉, at least 1.
pub fn min_reuse_factor(epsilon: f64, threshold: f64, alpha: f64) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("0 < epsilon < 1 violated (epsilon = {epsilon})")));
    }
    let r = rho(threshold, alpha)?;
    let delta = (r * (1.0 - epsilon) / epsilon).ceil();
    if delta > u32::MAX as f64 {
        return Err(Error::Overflow(format!("required reuse factor {delta} is too large")));
    }
    Ok((delta as u32).max(1))
}

/// Interference-limited coverage with reuse δ: 1/(1 + ρ/δ).
pub fn reuse_coverage_no_noise(threshold: f64, alpha: f64, delta: u32) -> Result<f64> {
    check_delta(delta)?;
    Ok(1.0 / (1.0 + rho(threshold, alpha)? / delta as f64))
}

/// Evaluates a coverage curve with the given method over linear
/// thresholds. `delta` is only used by [`Method::ReuseExponential`].
pub fn coverage_curve(
    p: &NetworkParams,
    thresholds: &[f64],
    method: Method,
    delta: u32,
) -> Result<CoverageCurve> {
    let eval = |t: f64| -> Result<f64> {
        match method {
            Method::Thm1General => coverage_general(p, t),
            Method::Thm2Exponential => coverage_exponential(p, t),
            Method::Alpha4Closed => coverage_alpha4(p, t),
            Method::NoNoiseClosed => {
                if delta == 1 {
                    coverage_no_noise(p, t)
                } else {
                    let r = exponential_rho(p, t)?;
                    Ok(1.0 / (1.0 + r / delta as f64))
                }
            }
            Method::SmallNoise => coverage_small_noise(p, t).map(|s| s.value),
            Method::ReuseExponential => coverage_with_reuse(p, t, delta),
            Method::Simulated => Err(Error::Contract(
                "simulated curves come from the sim module".into(),
            )),
        }
    };

    #[cfg(feature = "parallel")]
    let values: Result<Vec<f64>> = {
        use rayon::prelude::*;
        thresholds.par_iter().map(|&t| eval(t)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values: Result<Vec<f64>> = thresholds.iter().map(|&t| eval(t)).collect();

    Ok(CoverageCurve {
        thresholds: thresholds.to_vec(),
        values: values?,
        ci_halfwidths: None,
        method,
        reuse_delta: delta,
    })
}
