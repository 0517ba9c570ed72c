//! Browser bindings: analytic and simulated coverage curves, and generated
//! deployments with their band allocation.

use stochcell::analytic::{coverage_curve, NetworkParams};
use stochcell::fading::FadingModel;
use stochcell::sim::{
    assign_bands_greedy, assign_bands_planned, assign_bands_random, estimate_coverage,
    generate_perturbed_lattice, grid_deployment, trial_rng, Allocation, Scenario, SimConfig,
};
use stochcell::{db_to_linear, Method};
use wasm_bindgen::prelude::*;

fn params(alpha: f64, snr_db: f64, lognormal_db: f64) -> stochcell::Result<NetworkParams> {
    // snr_db >= 200 stands in for "no noise" from a slider
    let snr = if snr_db >= 200.0 { f64::INFINITY } else { snr_db };
    let fading = if lognormal_db > 0.0 {
        FadingModel::lognormal_mean_matched(lognormal_db, 1.0)?
    } else {
        FadingModel::exponential(1.0)?
    };
    NetworkParams::new(1.0, alpha, 1.0, 0.0, fading)?.with_snr_db(snr)
}

fn grid_db(start: f64, stop: f64, step: f64) -> stochcell::Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || (stop - start) / step > 1000.0 {
        return Err(stochcell::Error::InvalidParam(
            "threshold grid needs step > 0, start <= stop and at most 1000 points".into(),
        ));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

pub fn analytic_curve(
    alpha: f64,
    snr_db: f64,
    lognormal_db: f64,
    delta: u32,
    t_start: f64,
    t_stop: f64,
    t_step: f64,
) -> stochcell::Result<Vec<f64>> {
    let p = params(alpha, snr_db, lognormal_db)?;
    let ts: Vec<f64> = grid_db(t_start, t_stop, t_step)?.into_iter().map(db_to_linear).collect();
    let method = if delta > 1 {
        if p.sigma2 == 0.0 {
            Method::NoNoiseClosed
        } else {
            Method::ReuseExponential
        }
    } else if p.fading.is_exponential() {
        Method::Thm2Exponential
    } else {
        Method::Thm1General
    };
    Ok(coverage_curve(&p, &ts, method, delta)?.values)
}

fn layout(
    source: &str,
    tiers: u32,
    jitter: f64,
    seed: u64,
) -> stochcell::Result<stochcell::sim::Deployment> {
    match source {
        "grid" => grid_deployment(0.5, tiers),
        "lattice" => generate_perturbed_lattice(0.5, jitter, tiers, &mut trial_rng(seed, u64::MAX)),
        _ => Err(stochcell::Error::InvalidParam(format!(
            "layout must be grid or lattice, got `{source}`"
        ))),
    }
}

fn allocation(name: &str) -> stochcell::Result<Allocation> {
    match name {
        "random" => Ok(Allocation::Random),
        "greedy" => Ok(Allocation::Greedy),
        _ => Err(stochcell::Error::InvalidParam(format!(
            "allocation must be random or greedy, got `{name}`"
        ))),
    }
}

/// Values followed by 95% half-widths.
#[allow(clippy::too_many_arguments)]
pub fn simulated_curve(
    source: &str,
    alpha: f64,
    snr_db: f64,
    lognormal_db: f64,
    delta: u32,
    alloc: &str,
    tiers: u32,
    jitter: f64,
    trials: u32,
    seed: u64,
    t_start: f64,
    t_stop: f64,
    t_step: f64,
) -> stochcell::Result<Vec<f64>> {
    let p = params(alpha, snr_db, lognormal_db)?;
    let ts: Vec<f64> = grid_db(t_start, t_stop, t_step)?.into_iter().map(db_to_linear).collect();
    let scenario = match source {
        "ppp" => Scenario::Ppp,
        "grid" => Scenario::Grid {
            half_spacing: 0.5,
            tiers,
        },
        _ => Scenario::Fixed(layout(source, tiers, jitter, seed)?),
    };
    let cfg = SimConfig {
        trials: trials as u64,
        seed,
        reuse_delta: delta,
        allocation: if matches!(scenario, Scenario::Ppp) {
            Allocation::Random
        } else {
            allocation(alloc)?
        },
        ..SimConfig::default()
    };
    let run = estimate_coverage(&scenario, &p, &ts, &cfg)?;
    let mut out = run.curve.values;
    out.extend(run.estimates.iter().map(|e| e.ci_halfwidth));
    Ok(out)
}

/// Flattened `x, y, band` triples.
pub fn deployment_points(
    source: &str,
    tiers: u32,
    jitter: f64,
    delta: u32,
    alloc: &str,
    seed: u64,
) -> stochcell::Result<Vec<f64>> {
    let d = layout(source, tiers, jitter, seed)?;
    let d = match (source, allocation(alloc)?) {
        ("grid", _) => assign_bands_planned(d, delta)?,
        (_, Allocation::Greedy) => assign_bands_greedy(d, delta)?,
        _ => assign_bands_random(d, delta, &mut trial_rng(seed, u64::MAX - 1))?,
    };
    let bands = &d.bands().expect("bands assigned").per_site;
    Ok(d.sites()
        .iter()
        .zip(bands)
        .flat_map(|(s, &b)| [s.x, s.y, b as f64])
        .collect())
}

fn js(e: stochcell::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = analyticCoverage)]
pub fn analytic_coverage_js(
    alpha: f64,
    snr_db: f64,
    lognormal_db: f64,
    delta: u32,
    t_start: f64,
    t_stop: f64,
    t_step: f64,
) -> Result<Vec<f64>, JsError> {
    analytic_curve(alpha, snr_db, lognormal_db, delta, t_start, t_stop, t_step).map_err(js)
}

#[wasm_bindgen(js_name = simulatedCoverage)]
#[allow(clippy::too_many_arguments)]
pub fn simulated_coverage_js(
    source: &str,
    alpha: f64,
    snr_db: f64,
    lognormal_db: f64,
    delta: u32,
    alloc: &str,
    tiers: u32,
    jitter: f64,
    trials: u32,
    seed: u32,
    t_start: f64,
    t_stop: f64,
    t_step: f64,
) -> Result<Vec<f64>, JsError> {
    simulated_curve(
        source,
        alpha,
        snr_db,
        lognormal_db,
        delta,
        alloc,
        tiers,
        jitter,
        trials,
        seed as u64,
        t_start,
        t_stop,
        t_step,
    )
    .map_err(js)
}

#[wasm_bindgen(js_name = deploymentPoints)]
pub fn deployment_points_js(
    source: &str,
    tiers: u32,
    jitter: f64,
    delta: u32,
    alloc: &str,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    deployment_points(source, tiers, jitter, delta, alloc, seed as u64).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_curve_hits_known_constant() {
        let v = analytic_curve(4.0, 300.0, 0.0, 1, 0.0, 0.0, 1.0).unwrap();
        assert!((v[0] - 4.0 / (4.0 + std::f64::consts::PI)).abs() < 1e-9);
        assert!(analytic_curve(4.0, 300.0, 0.0, 1, 5.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn simulated_curve_carries_halfwidths() {
        let v = simulated_curve("grid", 4.0, 10.0, 0.0, 1, "random", 1, 0.0, 500, 3, -5.0, 5.0, 5.0)
            .unwrap();
        assert_eq!(v.len(), 6);
        assert!(v[..3].windows(2).all(|w| w[1] <= w[0]));
        assert!(v[3..].iter().all(|&c| c >= 0.0));
    }

    #[test]
    fn points_come_in_triples_with_bands() {
        let v = deployment_points("lattice", 2, 0.1, 4, "greedy", 9).unwrap();
        assert_eq!(v.len(), 25 * 3);
        assert!(v.chunks(3).all(|c| (1.0..=4.0).contains(&c[2])));
        assert!(deployment_points("hex", 2, 0.1, 4, "greedy", 9).is_err());
    }
}
