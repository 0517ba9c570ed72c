//! Monte-Carlo estimates of coverage and rate.
//!
//! Each trial measures the SINR of one user: at the origin of a fresh PPP
//! realization, uniformly inside the home cell of a square grid, or
//! uniformly inside the core of a fixed deployment. Trial `i` draws from
//! its own ChaCha stream keyed by `(seed, i)`, so results do not depend on
//! how trials are scheduled across threads.

mod bands;
mod deployment;

pub use bands::{assign_bands_greedy, assign_bands_planned, assign_bands_random, grid_pattern_band};
pub use deployment::{
    generate_perturbed_lattice, grid_deployment, sample_ppp_deployment, Bands, Deployment, Site,
    Source, Window,
};

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::analytic::NetworkParams;
use crate::curve::{CoverageCurve, Method};
use crate::error::{Error, Result};

/// Points expected inside an automatic PPP window, at least.
const MIN_WINDOW_POINTS: f64 = 500.0;
/// Points expected inside an automatic PPP window, at most.
const MAX_WINDOW_POINTS: f64 = 50_000.0;
/// Allowed standard deviation of the interference beyond the window,
/// relative to the mean received power at the typical serving distance.
const TAIL_STD_FRACTION: f64 = 1e-2;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowPolicy {
    Auto,
    /// Disc radius in km.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Allocation {
    /// Independent uniform band per site, redrawn every trial.
    Random,
    /// Max-min-distance planning, computed once per deployment.
    Greedy,
    /// Bands read from the deployment itself.
    Preassigned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub window: WindowPolicy,
    pub reuse_delta: u32,
    pub allocation: Allocation,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: 10_000,
            seed: 1,
            window: WindowPolicy::Auto,
            reuse_delta: 1,
            allocation: Allocation::Random,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::invalid("trials >= 1 violated"));
        }
        if self.reuse_delta < 1 {
            return Err(Error::invalid("reuse factor delta >= 1 violated"));
        }
        if let WindowPolicy::Fixed(r) = self.window {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid(format!("window radius > 0 violated (radius = {r})")));
            }
        }
        Ok(())
    }
}

/// Sample mean with a 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub value: f64,
    pub ci_halfwidth: f64,
    pub trials_used: u64,
}

/// What the simulated user is dropped into.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// Fresh PPP of density `params.lambda` per trial, user at the origin.
    Ppp,
    /// Square grid of pitch 2R with `tiers` rings of interferers; the user
    /// is uniform in the home cell [−R, R]².
    Grid { half_spacing: f64, tiers: u32 },
    /// A fixed site layout, imported or generated.
    Fixed(Deployment),
}

impl Scenario {
    /// Grid whose site density 1/(4R²) equals `lambda`.
    pub fn grid_for_density(lambda: f64, tiers: u32) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda > 0 violated (lambda = {lambda})")));
        }
        Ok(Scenario::Grid {
            half_spacing: 0.5 / lambda.sqrt(),
            tiers,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRun {
    pub curve: CoverageCurve,
    pub estimates: Vec<SimEstimate>,
    /// PPP realizations redrawn because the window held no site.
    pub empty_resamples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRun {
    pub estimate: SimEstimate,
    pub empty_resamples: u64,
}

/// Window radius for PPP trials: large enough for ~500 expected sites and
/// for the fluctuation of the interference beyond it,
/// √(πλE[g²]/(α−1))·W^{1−α}, to fall under 1% of the mean received power
/// (1/μ)(2√λ)^α at the typical serving distance; capped at 50 000 sites.
pub fn auto_window_radius(p: &NetworkParams) -> f64 {
    let lambda = p.lambda;
    let by_count = (MIN_WINDOW_POINTS / (PI * lambda)).sqrt();
    let typical_power = (2.0 * lambda.sqrt()).powf(p.alpha) / p.mu;
    let scale = (PI * lambda * p.fading.second_moment() / (p.alpha - 1.0)).sqrt();
    let by_tail = (scale / (TAIL_STD_FRACTION * typical_power)).powf(1.0 / (p.alpha - 1.0));
    let cap = (MAX_WINDOW_POINTS / (PI * lambda)).sqrt();
    by_count.max(by_tail).min(cap)
}

/// Fresh stream for trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn path_gain(d2: f64, half_alpha: f64) -> f64 {
    if half_alpha == 2.0 {
        1.0 / (d2 * d2)
    } else {
        d2.powf(-half_alpha)
    }
}

fn serving_power<R: Rng + ?Sized>(p: &NetworkParams, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    e / p.mu
}

enum BandMode {
    All,
    Fixed(Vec<u32>),
    Random(u32),
}

fn nearest(sites: &[Site], x: f64, y: f64) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, s) in sites.iter().enumerate() {
        let d2 = s.dist2(x, y);
        // strict comparison keeps the lower index on ties
        if d2 < best.1 {
            best = (i, d2);
        }
    }
    best
}

fn fixed_sinr<R: Rng + ?Sized>(
    sites: &[Site],
    bands: &BandMode,
    x: f64,
    y: f64,
    p: &NetworkParams,
    rng: &mut R,
) -> f64 {
    let half = p.alpha / 2.0;
    let (serving, d2) = nearest(sites, x, y);
    let signal = serving_power(p, rng) * path_gain(d2, half);
    let mut interference = 0.0;
    for (j, s) in sites.iter().enumerate() {
        if j == serving {
            continue;
        }
        let shares = match bands {
            BandMode::All => true,
            BandMode::Fixed(b) => b[j] == b[serving],
            BandMode::Random(delta) => rng.random_range(0..*delta) == 0,
        };
        if shares {
            interference += p.fading.sample(rng) * path_gain(s.dist2(x, y), half);
        }
    }
    signal / (p.sigma2 + interference)
}

/// SINR of a user at (x, y) served by the nearest site (lower index on
/// ties). If the deployment carries bands only same-band sites interfere.
pub fn sinr_at<R: Rng + ?Sized>(
    d: &Deployment,
    x: f64,
    y: f64,
    p: &NetworkParams,
    rng: &mut R,
) -> Result<f64> {
    p.validate()?;
    if d.is_empty() {
        return Err(Error::invalid("deployment must hold at least one site"));
    }
    let mode = match d.bands() {
        Some(b) => BandMode::Fixed(b.per_site.clone()),
        None => BandMode::All,
    };
    Ok(fixed_sinr(d.sites(), &mode, x, y, p, rng))
}

pub fn sinr_at_origin<R: Rng + ?Sized>(d: &Deployment, p: &NetworkParams, rng: &mut R) -> Result<f64> {
    sinr_at(d, 0.0, 0.0, p, rng)
}

/// Everything a trial needs, resolved once per run.
enum Prepared {
    Ppp {
        density: f64,
        window2: f64,
        delta: u32,
        tail_mean: f64,
    },
    Grid {
        half_spacing: f64,
        interferers: Vec<Site>,
    },
    Fixed {
        sites: Vec<Site>,
        bands: BandMode,
        core: [f64; 4],
    },
}

impl Prepared {
    fn new(scenario: &Scenario, p: &NetworkParams, cfg: &SimConfig) -> Result<Self> {
        let delta = cfg.reuse_delta;
        match scenario {
            Scenario::Ppp => {
                if cfg.allocation != Allocation::Random {
                    return Err(Error::invalid(
                        "PPP trials support only random allocation; greedy and preassigned bands need a fixed deployment",
                    ));
                }
                let w = match cfg.window {
                    WindowPolicy::Auto => auto_window_radius(p),
                    WindowPolicy::Fixed(r) => r,
                };
                // mean same-band interference from beyond the window
                let tail_mean = 2.0 * PI * (p.lambda / delta as f64) * p.fading.mean_power()
                    * w.powf(2.0 - p.alpha)
                    / (p.alpha - 2.0);
                Ok(Prepared::Ppp {
                    density: PI * p.lambda,
                    window2: w * w,
                    delta,
                    tail_mean,
                })
            }
            Scenario::Grid {
                half_spacing,
                tiers,
            } => {
                let d = assign_bands_planned(grid_deployment(*half_spacing, *tiers)?, delta)?;
                let b = &d.bands().expect("planned bands").per_site;
                let home = d
                    .sites()
                    .iter()
                    .position(|s| s.x == 0.0 && s.y == 0.0)
                    .expect("grid holds the origin");
                let interferers = d
                    .sites()
                    .iter()
                    .zip(b)
                    .enumerate()
                    .filter(|&(i, (_, &band))| i != home && band == b[home])
                    .map(|(_, (s, _))| *s)
                    .collect();
                Ok(Prepared::Grid {
                    half_spacing: *half_spacing,
                    interferers,
                })
            }
            Scenario::Fixed(d) => {
                if d.is_empty() {
                    return Err(Error::invalid("deployment must hold at least one site"));
                }
                let bands = match cfg.allocation {
                    _ if delta == 1 && cfg.allocation != Allocation::Preassigned => BandMode::All,
                    Allocation::Random => BandMode::Random(delta),
                    Allocation::Greedy => {
                        let planned = assign_bands_greedy(d.clone(), delta)?;
                        BandMode::Fixed(planned.bands().expect("greedy bands").per_site.clone())
                    }
                    Allocation::Preassigned => {
                        let b = d.bands().ok_or_else(|| {
                            Error::invalid("preassigned allocation needs a band column in the deployment")
                        })?;
                        if b.delta > delta {
                            return Err(Error::invalid(format!(
                                "deployment uses band {} but reuse factor is {delta}",
                                b.delta
                            )));
                        }
                        BandMode::Fixed(b.per_site.clone())
                    }
                };
                let core = match d.core_region() {
                    Window::Rect {
                        x_min,
                        x_max,
                        y_min,
                        y_max,
                    } => [x_min, x_max, y_min, y_max],
                    Window::Disc { radius } => [-radius, radius, -radius, radius],
                };
                Ok(Prepared::Fixed {
                    sites: d.sites().to_vec(),
                    bands,
                    core,
                })
            }
        }
    }

    /// One SINR sample and the number of empty windows redrawn for it.
    fn draw(&self, p: &NetworkParams, rng: &mut ChaCha8Rng) -> (f64, u32) {
        let half = p.alpha / 2.0;
        match self {
            Prepared::Ppp {
                density,
                window2,
                delta,
                tail_mean,
            } => {
                // distances from the origin in increasing order: πλr_k² are
                // the arrival times of a unit-rate Poisson process
                let mut resamples = 0;
                let mut arrival: f64 = loop {
                    let a: f64 = Exp1.sample(rng);
                    if a / density <= *window2 {
                        break a;
                    }
                    resamples += 1;
                };
                let signal = serving_power(p, rng) * path_gain(arrival / density, half);
                let mut interference = *tail_mean;
                loop {
                    let step: f64 = Exp1.sample(rng);
                    arrival += step;
                    let r2 = arrival / density;
                    if r2 > *window2 {
                        break;
                    }
                    if *delta > 1 && rng.random_range(0..*delta) != 0 {
                        continue;
                    }
                    interference += p.fading.sample(rng) * path_gain(r2, half);
                }
                (signal / (p.sigma2 + interference), resamples)
            }
            Prepared::Grid {
                half_spacing,
                interferers,
            } => {
                let x = half_spacing * (2.0 * rng.random::<f64>() - 1.0);
                let y = half_spacing * (2.0 * rng.random::<f64>() - 1.0);
                let signal = serving_power(p, rng) * path_gain(x * x + y * y, half);
                let interference: f64 = interferers
                    .iter()
                    .map(|s| p.fading.sample(rng) * path_gain(s.dist2(x, y), half))
                    .sum();
                (signal / (p.sigma2 + interference), 0)
            }
            Prepared::Fixed { sites, bands, core } => {
                let x = core[0] + (core[1] - core[0]) * rng.random::<f64>();
                let y = core[2] + (core[3] - core[2]) * rng.random::<f64>();
                (fixed_sinr(sites, bands, x, y, p, rng), 0)
            }
        }
    }
}

fn run_trials(prepared: &Prepared, p: &NetworkParams, cfg: &SimConfig) -> Vec<(f64, u32)> {
    let trial = |i: u64| prepared.draw(p, &mut trial_rng(cfg.seed, i));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..cfg.trials).into_par_iter().map(trial).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..cfg.trials).map(trial).collect()
    }
}

/// Pairwise summation in a fixed tree shape.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

fn proportion(hits: u64, n: u64) -> SimEstimate {
    let value = hits as f64 / n as f64;
    SimEstimate {
        value,
        ci_halfwidth: Z95 * (value * (1.0 - value) / n as f64).sqrt(),
        trials_used: n,
    }
}

fn mean_estimate(xs: &[f64]) -> SimEstimate {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = if xs.len() > 1 {
        pairwise_sum(&dev) / (n - 1.0)
    } else {
        0.0
    };
    SimEstimate {
        value: mean,
        ci_halfwidth: Z95 * (var / n).sqrt(),
        trials_used: xs.len() as u64,
    }
}

/// Empirical P[SINR > T] on a shared set of trials for every threshold.
pub fn estimate_coverage(
    scenario: &Scenario,
    p: &NetworkParams,
    thresholds: &[f64],
    cfg: &SimConfig,
) -> Result<CoverageRun> {
    p.validate()?;
    cfg.validate()?;
    if let Some(t) = thresholds.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::invalid(format!("threshold T >= 0 violated (T = {t})")));
    }
    let prepared = Prepared::new(scenario, p, cfg)?;
    let samples = run_trials(&prepared, p, cfg);
    let empty_resamples = samples.iter().map(|s| s.1 as u64).sum();
    let estimates: Vec<SimEstimate> = thresholds
        .iter()
        .map(|&t| proportion(samples.iter().filter(|s| s.0 > t).count() as u64, cfg.trials))
        .collect();
    let curve = CoverageCurve {
        thresholds: thresholds.to_vec(),
        values: estimates.iter().map(|e| e.value).collect(),
        ci_halfwidths: Some(estimates.iter().map(|e| e.ci_halfwidth).collect()),
        method: Method::Simulated,
        reuse_delta: cfg.reuse_delta,
    };
    Ok(CoverageRun {
        curve,
        estimates,
        empty_resamples,
    })
}

/// Sample mean of (1/δ)·ln(1 + SINR/G).
pub fn estimate_rate(scenario: &Scenario, p: &NetworkParams, cfg: &SimConfig, gap: f64) -> Result<RateRun> {
    p.validate()?;
    cfg.validate()?;
    if !(gap >= 1.0) {
        return Err(Error::invalid(format!("SINR gap G >= 1 violated (G = {gap})")));
    }
    let prepared = Prepared::new(scenario, p, cfg)?;
    let samples = run_trials(&prepared, p, cfg);
    let empty_resamples = samples.iter().map(|s| s.1 as u64).sum();
    let delta = cfg.reuse_delta as f64;
    let rates: Vec<f64> = samples.iter().map(|s| (s.0 / gap).ln_1p() / delta).collect();
    Ok(RateRun {
        estimate: mean_estimate(&rates),
        empty_resamples,
    })
}
