//! Interference power distributions g.
//!
//! Every model describes a dimensionless multiplier of transmit power. The
//! desired link always sees exponential fading; these models apply to the
//! interferers only.

use std::f64::consts::{LN_10, PI};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::error::{Error, Result};
use crate::specfun::{
    integrate_semi_infinite_try, integrate_try, lower_incomplete_gamma, QuadSpec,
};

/// ln(10)/10: converts dB to natural-log units.
const DB: f64 = LN_10 / 10.0;

/// Width of the Gaussian window used for lognormal expectations, in
/// standard deviations. Mass outside is below 1e−15.
const LOGNORMAL_SPAN: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub enum FadingModel {
    /// g ~ Exp(rate), mean 1/rate.
    Exponential { rate: f64 },
    /// g = 10^{X/10} with X ~ N(mean_db, std_db²).
    LognormalDb { mean_db: f64, std_db: f64 },
    /// Piecewise-linear pdf over a nonnegative support.
    Tabulated(TabulatedPdf),
}

impl FadingModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        let m = FadingModel::Exponential { rate };
        m.validate()?;
        Ok(m)
    }

    /// Raw (ξ, κ) lognormal constructor; no mean normalization.
    pub fn lognormal_db(mean_db: f64, std_db: f64) -> Result<Self> {
        let m = FadingModel::LognormalDb { mean_db, std_db };
        m.validate()?;
        Ok(m)
    }

    /// Lognormal with spread `std_db` whose linear mean equals `target_mean`.
    pub fn lognormal_mean_matched(std_db: f64, target_mean: f64) -> Result<Self> {
        FadingModel::lognormal_db(0.0, std_db)?.normalize_to_mean(target_mean)
    }

    pub fn tabulated(power: Vec<f64>, pdf: Vec<f64>) -> Result<Self> {
        Ok(FadingModel::Tabulated(TabulatedPdf::new(power, pdf)?))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FadingModel::Exponential { rate } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(Error::invalid(format!(
                        "exponential fading rate must be > 0, got {rate}"
                    )));
                }
            }
            FadingModel::LognormalDb { mean_db, std_db } => {
                if !mean_db.is_finite() {
                    return Err(Error::invalid("lognormal mean (dB) must be finite"));
                }
                if !(*std_db >= 0.0 && std_db.is_finite()) {
                    return Err(Error::invalid(format!(
                        "lognormal spread must be >= 0 dB, got {std_db}"
                    )));
                }
            }
            FadingModel::Tabulated(t) => t.validate()?,
        }
        Ok(())
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self, FadingModel::Exponential { .. })
    }

    /// E[g].
    pub fn mean_power(&self) -> f64 {
        match self {
            FadingModel::Exponential { rate } => 1.0 / rate,
            FadingModel::LognormalDb { mean_db, std_db } => {
                (DB * mean_db + 0.5 * (DB * std_db).powi(2)).exp()
            }
            FadingModel::Tabulated(t) => t.first_moment(),
        }
    }

    /// E[g²].
    pub fn second_moment(&self) -> f64 {
        match self {
            FadingModel::Exponential { rate } => 2.0 / (rate * rate),
            FadingModel::LognormalDb { mean_db, std_db } => {
                (2.0 * DB * mean_db + 2.0 * (DB * std_db).powi(2)).exp()
            }
            FadingModel::Tabulated(t) => t.second_moment(),
        }
    }

    /// Same kind of model rescaled so that E[g] = `target_mean`.
    ///
    /// Lognormal models move only their dB mean.
    pub fn normalize_to_mean(&self, target_mean: f64) -> Result<Self> {
        if !(target_mean > 0.0 && target_mean.is_finite()) {
            return Err(Error::invalid(format!(
                "target mean must be > 0, got {target_mean}"
            )));
        }
        match self {
            FadingModel::Exponential { .. } => FadingModel::exponential(1.0 / target_mean),
            FadingModel::LognormalDb { std_db, .. } => {
                let mean_db = (target_mean.ln() - 0.5 * (DB * std_db).powi(2)) / DB;
                FadingModel::lognormal_db(mean_db, *std_db)
            }
            FadingModel::Tabulated(t) => {
                let mean = t.first_moment();
                if !(mean > 0.0) {
                    return Err(Error::invalid(
                        "cannot normalize a tabulated model with zero mean",
                    ));
                }
                let scale = target_mean / mean;
                let power = t.power.iter().map(|p| p * scale).collect();
                let pdf = t.pdf.iter().map(|f| f / scale).collect();
                FadingModel::tabulated(power, pdf)
            }
        }
    }

    /// One draw of g.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingModel::Exponential { rate } => {
                Exp::new(*rate).expect("validated rate").sample(rng)
            }
            FadingModel::LognormalDb { mean_db, std_db } => {
                if *std_db == 0.0 {
                    return (DB * mean_db).exp();
                }
                let z: f64 = StandardNormal.sample(rng);
                (DB * (mean_db + std_db * z)).exp()
            }
            FadingModel::Tabulated(t) => t.sample(rng.random::<f64>()),
        }
    }

    /// E[f(g)] by adaptive quadrature against the model's density.
    pub fn expect<F>(&self, mut f: F, spec: &QuadSpec) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        match self {
            FadingModel::Exponential { rate } => {
                integrate_semi_infinite_try(|w| Ok((-w).exp() * f(w / rate)?), 0.0, spec)
            }
            FadingModel::LognormalDb { mean_db, std_db } => {
                if *std_db == 0.0 {
                    return f((DB * mean_db).exp());
                }
                let norm = 1.0 / (2.0 * PI).sqrt();
                integrate_try(
                    |z| {
                        let g = (DB * (mean_db + std_db * z)).exp();
                        Ok(norm * (-0.5 * z * z).exp() * f(g)?)
                    },
                    -LOGNORMAL_SPAN,
                    LOGNORMAL_SPAN,
                    spec,
                )
            }
            FadingModel::Tabulated(t) => {
                let mut total = 0.0;
                for i in 0..t.power.len() - 1 {
                    let (x0, x1) = (t.power[i], t.power[i + 1]);
                    let (f0, f1) = (t.pdf[i], t.pdf[i + 1]);
                    if f0 == 0.0 && f1 == 0.0 {
                        continue;
                    }
                    let h = x1 - x0;
                    total += integrate_try(
                        |g| Ok((f0 + (f1 - f0) * (g - x0) / h) * f(g)?),
                        x0,
                        x1,
                        spec,
                    )?;
                }
                Ok(total / t.mass)
            }
        }
    }

    /// E[(1 − e^{−θg})]/θ, with the θ → 0 limit E[g].
    ///
    /// This is the per-interferer factor of the PGFL exponent.
    pub fn laplace_deficit_over_theta(&self, theta: f64, spec: &QuadSpec) -> Result<f64> {
        if let FadingModel::Exponential { rate } = self {
            return Ok(1.0 / (rate + theta));
        }
        self.expect(
            |g| {
                let x = theta * g;
                Ok(if x < 1e-300 { g } else { -(-x).exp_m1() / theta })
            },
            spec,
        )
    }
}

/// The quantity inside the β expectation, written for x = μTg:
/// (2/α)·x^{2/α}·(Γ(−2/α, x) − Γ(−2/α)).
///
/// With a = −2/α, Γ(a, x) − Γ(a) = −(γ(a+1, x) + x^a e^{−x})/a, so the value
/// equals e^{−x} + x^{2/α}·γ(1 − 2/α, x). That form has no cancellation and
/// tends to 1 as x → 0.
pub fn beta_kernel(x: f64, alpha: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    let delta = 2.0 / alpha;
    Ok((-x).exp() + x.powf(delta) * lower_incomplete_gamma(1.0 - delta, x)?)
}

/// β(T, α) = (2(μT)^{2/α}/α)·E[g^{2/α}(Γ(−2/α, μTg) − Γ(−2/α))].
///
/// `mu` is the desired-link fading rate; the expectation is over the
/// interference model `m`.
pub fn beta_expectation(m: &FadingModel, threshold: f64, alpha: f64, mu: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::Divergence { alpha });
    }
    if !(threshold > 0.0) || !(mu > 0.0) {
        return Err(Error::invalid(format!(
            "beta needs T > 0 and mu > 0, got T = {threshold}, mu = {mu}"
        )));
    }
    m.validate()?;
    let c = mu * threshold;
    let spec = QuadSpec::default().with_rel_tol(1e-10);
    m.expect(|g| beta_kernel(c * g, alpha), &spec)
}

/// Piecewise-linear density on `power[0] ..= power[n-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPdf {
    power: Vec<f64>,
    pdf: Vec<f64>,
    /// cumulative (unnormalized) mass at each knot
    cumulative: Vec<f64>,
    mass: f64,
}

impl TabulatedPdf {
    pub fn new(power: Vec<f64>, pdf: Vec<f64>) -> Result<Self> {
        if power.len() != pdf.len() {
            return Err(Error::invalid("tabulated power and pdf columns differ in length"));
        }
        if power.len() < 2 {
            return Err(Error::invalid("tabulated pdf needs at least two points"));
        }
        let mut cumulative = Vec::with_capacity(power.len());
        cumulative.push(0.0);
        for i in 1..power.len() {
            let seg = 0.5 * (power[i] - power[i - 1]) * (pdf[i] + pdf[i - 1]);
            cumulative.push(cumulative[i - 1] + seg);
        }
        let mass = *cumulative.last().unwrap();
        let t = TabulatedPdf {
            power,
            pdf,
            cumulative,
            mass,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        if self.power.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::invalid("tabulated support must be finite and nonnegative"));
        }
        if self.power.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("tabulated power column must be strictly increasing"));
        }
        if self.pdf.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
            return Err(Error::invalid("tabulated pdf values must be finite and >= 0"));
        }
        if (self.mass - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!(
                "tabulated pdf integrates to {}, expected 1 ± 1e-6",
                self.mass
            )));
        }
        Ok(())
    }

    /// Parses two-column `power,pdf` CSV. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut power = Vec::new();
        let mut pdf = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected 2 columns (power,pdf), found {}", fields.len()),
                });
            }
            let parse = |s: &str, what: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("cannot parse {what} value '{s}'"),
                })
            };
            let p = parse(fields[0], "power")?;
            let f = parse(fields[1], "pdf")?;
            if let Some(&last) = power.last() {
                if !(p > last) {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: "power column must be strictly increasing".into(),
                    });
                }
            }
            power.push(p);
            pdf.push(f);
        }
        TabulatedPdf::new(power, pdf)
    }

    pub fn from_path(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        let text = std::fs::read_to_string(path)?;
        Ok(TabulatedPdf::parse_csv(&text))
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn pdf(&self) -> &[f64] {
        &self.pdf
    }

    fn first_moment(&self) -> f64 {
        let mut m = 0.0;
        for i in 0..self.power.len() - 1 {
            let (x0, x1) = (self.power[i], self.power[i + 1]);
            let (f0, f1) = (self.pdf[i], self.pdf[i + 1]);
            m += (x1 - x0) / 6.0 * (f0 * (2.0 * x0 + x1) + f1 * (x0 + 2.0 * x1));
        }
        m / self.mass
    }

    fn second_moment(&self) -> f64 {
        let mut m = 0.0;
        for i in 0..self.power.len() - 1 {
            let (x0, x1) = (self.power[i], self.power[i + 1]);
            let (f0, f1) = (self.pdf[i], self.pdf[i + 1]);
            m += (x1 - x0) / 12.0
                * (f0 * (3.0 * x0 * x0 + 2.0 * x0 * x1 + x1 * x1)
                    + f1 * (x0 * x0 + 2.0 * x0 * x1 + 3.0 * x1 * x1));
        }
        m / self.mass
    }

    /// Inverse-CDF draw from a uniform `u` in [0, 1).
    fn sample(&self, u: f64) -> f64 {
        let target = u * self.mass;
        let k = match self
            .cumulative
            .binary_search_by(|c| c.total_cmp(&target))
        {
            Ok(k) => k.min(self.power.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.power.len() - 2),
        };
        let (x0, x1) = (self.power[k], self.power[k + 1]);
        let (f0, f1) = (self.pdf[k], self.pdf[k + 1]);
        let h = x1 - x0;
        let c = target - self.cumulative[k];
        // root of (f1−f0)/(2h)·s² + f0·s = c, written to stay stable when f1 ≈ f0
        let disc = (f0 * f0 + 2.0 * (f1 - f0) * c / h).max(0.0);
        let denom = f0 + disc.sqrt();
        let s = if denom > 0.0 { 2.0 * c / denom } else { 0.0 };
        (x0 + s.clamp(0.0, h)).min(x1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gamma, upper_incomplete_gamma};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mean_power_values() {
        assert_eq!(FadingModel::exponential(1.0).unwrap().mean_power(), 1.0);
        assert_eq!(FadingModel::lognormal_db(0.0, 0.0).unwrap().mean_power(), 1.0);
        let ln6 = FadingModel::lognormal_db(0.0, 6.0).unwrap().mean_power();
        let oracle = ((6.0 * LN_10 / 10.0).powi(2) / 2.0).exp();
        assert!((ln6 - oracle).abs() < 1e-14);
        assert!((ln6 - 2.596_96).abs() < 1e-5);
    }

    #[test]
    fn lognormal_mean_by_sampling() {
        let m = FadingModel::lognormal_db(0.0, 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 400_000;
        let draws: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - m.mean_power()).abs() < 3.0 * se, "{mean} vs {}", m.mean_power());
    }

    #[test]
    fn normalize_examples() {
        let e = FadingModel::exponential(2.0).unwrap().normalize_to_mean(1.0).unwrap();
        assert_eq!(e, FadingModel::Exponential { rate: 1.0 });

        let l = FadingModel::lognormal_db(0.0, 6.0).unwrap().normalize_to_mean(1.0).unwrap();
        let expected_xi = -10.0 * std::f64::consts::E.log10() * (6.0 * LN_10 / 10.0).powi(2) / 2.0;
        match l {
            FadingModel::LognormalDb { mean_db, std_db } => {
                assert!((mean_db - expected_xi).abs() < 1e-12);
                assert_eq!(std_db, 6.0);
            }
            _ => unreachable!(),
        }
        assert!((l.mean_power() - 1.0).abs() < 1e-12);

        let p = FadingModel::lognormal_db(3.0, 0.0).unwrap().normalize_to_mean(1.0).unwrap();
        match p {
            FadingModel::LognormalDb { mean_db, std_db } => {
                assert!(mean_db.abs() < 1e-12);
                assert_eq!(std_db, 0.0);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        let models = [
            FadingModel::exponential(3.0).unwrap(),
            FadingModel::lognormal_db(2.0, 4.5).unwrap(),
            triangle(),
        ];
        for m in models {
            let once = m.normalize_to_mean(0.7).unwrap();
            let twice = once.normalize_to_mean(0.7).unwrap();
            assert!((once.mean_power() - 0.7).abs() < 1e-9);
            assert!((once.mean_power() - twice.mean_power()).abs() < 1e-12);
            match (&once, &twice) {
                (
                    FadingModel::LognormalDb { mean_db: a, .. },
                    FadingModel::LognormalDb { mean_db: b, .. },
                ) => assert!((a - b).abs() < 1e-12),
                (FadingModel::Exponential { rate: a }, FadingModel::Exponential { rate: b }) => {
                    assert!((a - b).abs() < 1e-12)
                }
                (FadingModel::Tabulated(a), FadingModel::Tabulated(b)) => {
                    for (x, y) in a.power().iter().zip(b.power()) {
                        assert!((x - y).abs() < 1e-12);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // density 2g on [0, 1]: mean 2/3, second moment 1/2
    fn triangle() -> FadingModel {
        FadingModel::tabulated(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap()
    }

    #[test]
    fn tabulated_moments_and_sampling() {
        let t = triangle();
        assert!((t.mean_power() - 2.0 / 3.0).abs() < 1e-14);
        assert!((t.second_moment() - 0.5).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mean = (0..n).map(|_| t.sample(&mut rng)).sum::<f64>() / n as f64;
        let se = ((0.5 - 4.0 / 9.0) / n as f64).sqrt();
        assert!((mean - 2.0 / 3.0).abs() < 3.0 * se);
    }

    #[test]
    fn tabulated_rejects_bad_tables() {
        assert!(FadingModel::tabulated(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(FadingModel::tabulated(vec![1.0, 0.0], vec![2.0, 0.0]).is_err());
        assert!(FadingModel::tabulated(vec![-1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(FadingModel::tabulated(vec![0.0, 1.0], vec![-1.0, 3.0]).is_err());
    }

    #[test]
    fn tabulated_csv() {
        let t = TabulatedPdf::parse_csv("# power,pdf\n0,0\n0.5,2\n1.0,0\n").unwrap();
        assert_eq!(t.power(), &[0.0, 0.5, 1.0]);
        let err = TabulatedPdf::parse_csv("0,0\n0.5,x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = TabulatedPdf::parse_csv("0,1\n0,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = TabulatedPdf::parse_csv("0,1,3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn exponential_sampling_mean() {
        let m = FadingModel::exponential(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 1_000_000;
        let mean = (0..n).map(|_| m.sample(&mut rng)).sum::<f64>() / n as f64;
        let se = 0.5 / (n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn sampling_is_reproducible() {
        let m = FadingModel::exponential(1.0).unwrap();
        let a = m.sample(&mut ChaCha8Rng::seed_from_u64(5));
        let b = m.sample(&mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a.to_bits(), b.to_bits());
        let d = FadingModel::lognormal_db(0.0, 0.0).unwrap();
        assert_eq!(d.sample(&mut ChaCha8Rng::seed_from_u64(1)), 1.0);
    }

    #[test]
    fn kernel_matches_incomplete_gamma_form() {
        for &alpha in &[2.5, 3.0, 4.0, 6.0] {
            let a = -2.0 / alpha;
            for &x in &[1e-4f64, 0.05, 0.7, 1.0, 3.0, 25.0] {
                let direct = (2.0 / alpha)
                    * x.powf(2.0 / alpha)
                    * (upper_incomplete_gamma(a, x).unwrap() - gamma(a));
                let stable = beta_kernel(x, alpha).unwrap();
                assert!((direct - stable).abs() < 1e-10 * stable, "α={alpha} x={x}");
            }
        }
    }

    #[test]
    fn exponential_beta_collapses_to_one_plus_rho() {
        let m = FadingModel::exponential(1.0).unwrap();
        for &alpha in &[2.5, 3.0, 4.0, 5.0] {
            for &t in &[0.1, 0.5, 1.0, 3.0, 10.0, 100.0] {
                let b = beta_expectation(&m, t, alpha, 1.0).unwrap();
                let r = 1.0 + crate::testutil::rho_series_oracle(t, alpha);
                assert!((b - r).abs() < 1e-6, "α={alpha} T={t}: {b} vs {r}");
            }
        }
    }

    #[test]
    fn beta_alpha4_unit_threshold() {
        let m = FadingModel::exponential(1.0).unwrap();
        let b = beta_expectation(&m, 1.0, 4.0, 1.0).unwrap();
        assert!((b - (1.0 + PI / 4.0)).abs() < 1e-9);
        assert!((b - 1.785_398).abs() < 1e-6);
    }

    #[test]
    fn beta_tends_to_one() {
        let m = FadingModel::exponential(1.0).unwrap();
        let b = beta_expectation(&m, 1e-8, 4.0, 1.0).unwrap();
        assert!((b - 1.0).abs() < 1e-3);
    }

    #[test]
    fn beta_rejects_small_alpha() {
        let m = FadingModel::exponential(1.0).unwrap();
        assert!(matches!(
            beta_expectation(&m, 1.0, 2.0, 1.0),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn beta_is_monotone_in_threshold() {
        let models = [
            FadingModel::exponential(1.0).unwrap(),
            FadingModel::lognormal_mean_matched(6.0, 1.0).unwrap(),
            triangle(),
        ];
        for m in &models {
            let mut prev = 0.0;
            for k in -20..=30 {
                let t = 10f64.powf(k as f64 / 10.0);
                let b = beta_expectation(m, t, 3.0, 1.0).unwrap();
                assert!(b >= prev);
                prev = b;
            }
        }
    }

    #[test]
    fn deficit_matches_closed_form() {
        let spec = QuadSpec::default();
        let e = FadingModel::exponential(2.0).unwrap();
        // lognormal with κ = 0 is a point mass at 1
        let p = FadingModel::lognormal_db(0.0, 0.0).unwrap();
        for &theta in &[0.0, 1e-6, 0.3, 4.0] {
            assert!((e.laplace_deficit_over_theta(theta, &spec).unwrap() - 1.0 / (2.0 + theta)).abs() < 1e-15);
            let direct = if theta == 0.0 { 1.0 } else { -(-theta).exp_m1() / theta };
            assert!((p.laplace_deficit_over_theta(theta, &spec).unwrap() - direct).abs() < 1e-12);
        }
    }
}
