use super::{check_delta, coverage_integral, exponential_rho, NetworkParams};
use crate::curve::{Method, RateResult};
use crate::error::{Error, Result};
use crate::specfun::{integrate_semi_infinite_try, QuadSpec};

/// Mean achievable rate E[ln(1 + SINR/G)] per band, averaged over δ bands.
///
/// Uses E[ln(1+X)] = ∫_0^∞ P[X > e^t − 1] dt, so
/// τ = (1/δ) ∫_0^∞ p_c(G(e^t − 1), δ) dt, integrated over the whole
/// half-line. Requires exponential interference fading.
pub fn mean_rate(p: &NetworkParams, delta: u32, gap: f64) -> Result<RateResult> {
    p.validate()?;
    check_delta(delta)?;
    if !(gap >= 1.0 && gap.is_finite()) {
        return Err(Error::invalid(format!("SINR gap G >= 1 violated (G = {gap})")));
    }
    if !p.fading.is_exponential() {
        return Err(Error::Contract(
            "mean rate requires exponential interference fading".into(),
        ));
    }
    let d = delta as f64;
    let integrand = |t: f64| -> Result<f64> {
        let threshold = gap * t.exp_m1();
        if !threshold.is_finite() {
            return Ok(0.0);
        }
        if threshold == 0.0 {
            return Ok(1.0);
        }
        let r = exponential_rho(p, threshold)?;
        coverage_integral(p, threshold, 1.0 + r / d)
    };
    let spec = QuadSpec::default().with_rel_tol(1e-8);
    let total = integrate_semi_infinite_try(integrand, 0.0, &spec)?;
    Ok(RateResult {
        tau: total / d,
        reuse_delta: delta,
        gap,
        method: Method::ReuseExponential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::integrate;

    fn params(alpha: f64, sigma2: f64) -> NetworkParams {
        NetworkParams::rayleigh(1.0, alpha, 1.0, sigma2).unwrap()
    }

    /// Oracle for α = 4, σ² = 0: the integrand is the closed form
    /// 1/(1 + √T(π/2 − arctan(1/√T))/δ), integrated on a truncated range
    /// with the polynomially decaying tail bounded separately.
    fn alpha4_oracle(delta: f64) -> f64 {
        let spec = QuadSpec::new(1e-12, 0.0, 4000).unwrap();
        let f = |t: f64| {
            let th = t.exp_m1();
            1.0 / (1.0 + (super::super::kappa(th) - 1.0) / delta)
        };
        // beyond t = 80 the integrand is below 2δ/(π e^{40})
        integrate(f, 0.0, 80.0, &spec).unwrap() / delta
    }

    #[test]
    fn alpha4_rates_match_oracle() {
        for &(delta, frozen) in &[(1u32, 1.488_99), (2, 1.076_45), (3, 0.873_11), (4, 0.746_04)] {
            let got = mean_rate(&params(4.0, 0.0), delta, 1.0).unwrap().tau;
            let oracle = alpha4_oracle(delta as f64);
            assert!((got - oracle).abs() < 1e-6, "δ={delta}: {got} vs {oracle}");
            assert!((got - frozen).abs() < 1e-4, "δ={delta}: {got} vs {frozen}");
        }
    }

    #[test]
    fn rate_decreases_with_reuse_without_noise() {
        let p = params(2.5, 0.0);
        let r: Vec<f64> = (1..=4).map(|d| mean_rate(&p, d, 1.0).unwrap().tau).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
        assert!((r[0] - 0.5213).abs() < 1e-3);
    }

    #[test]
    fn noise_and_gap_reduce_rate() {
        let clean = mean_rate(&params(4.0, 0.0), 1, 1.0).unwrap().tau;
        let noisy = mean_rate(&params(4.0, 1.0), 1, 1.0).unwrap().tau;
        let gapped = mean_rate(&params(4.0, 0.0), 1, 2.0).unwrap().tau;
        assert!(noisy < clean && gapped < clean);
    }

    #[test]
    fn rate_rejects_bad_inputs() {
        assert!(mean_rate(&params(4.0, 0.0), 0, 1.0).is_err());
        assert!(mean_rate(&params(4.0, 0.0), 1, 0.5).is_err());
    }
}
