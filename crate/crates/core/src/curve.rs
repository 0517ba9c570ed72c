use std::fmt;

/// 10^{db/10}.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// How a coverage value (or rate) was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Quadrature over the general-fading interference functional β.
    Thm1General,
    /// Quadrature with exponential interference (ρ form).
    Thm2Exponential,
    /// Gaussian-tail closed form for path-loss exponent 4.
    Alpha4Closed,
    /// Interference-limited closed form 1/β or 1/(1+ρ/δ).
    NoNoiseClosed,
    /// First-order expansion in the noise power.
    SmallNoise,
    /// Random band allocation, exponential interference.
    ReuseExponential,
    /// Monte-Carlo estimate.
    Simulated,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Thm1General => "thm1_general",
            Method::Thm2Exponential => "thm2_exponential",
            Method::Alpha4Closed => "alpha4_closed",
            Method::NoNoiseClosed => "no_noise_closed",
            Method::SmallNoise => "small_noise",
            Method::ReuseExponential => "reuse_exponential",
            Method::Simulated => "simulated",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Coverage probability P[SINR > T] over a grid of linear thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
    /// 95% half-widths; present only for simulated curves.
    pub ci_halfwidths: Option<Vec<f64>>,
    pub method: Method,
    pub reuse_delta: u32,
}

impl CoverageCurve {
    pub fn thresholds_db(&self) -> Vec<f64> {
        self.thresholds.iter().map(|&t| linear_to_db(t)).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when values never increase along ascending thresholds
    /// (up to `slack`).
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        let mut idx: Vec<usize> = (0..self.thresholds.len()).collect();
        idx.sort_by(|&a, &b| self.thresholds[a].total_cmp(&self.thresholds[b]));
        idx.windows(2)
            .all(|w| self.values[w[1]] <= self.values[w[0]] + slack)
    }
}

/// Mean rate in nats/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub tau: f64,
    pub reuse_delta: u32,
    pub gap: f64,
    pub method: Method,
}
