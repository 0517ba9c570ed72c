//! Resolution of flags, config file and defaults into a typed run spec.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stochcell::analytic::NetworkParams;
use stochcell::fading::{FadingModel, TabulatedPdf};
use stochcell::sim::{Allocation, Deployment, Scenario, SimConfig, WindowPolicy};
use stochcell::{db_to_linear, Method};

use crate::cli::{CommandKind, Flags};
use crate::error::CliError;

/// A setting that may be written as a number or a string in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(f64),
    Text(String),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Num(v) => write!(f, "{v}"),
            Scalar::Text(s) => f.write_str(s),
        }
    }
}

/// Every setting, each optional so that layers can be merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub snr: Option<Scalar>,
    pub fading: Option<String>,
    pub t_db: Option<Scalar>,
    pub delta: Option<Scalar>,
    pub gap_db: Option<f64>,
    pub trials: Option<Scalar>,
    pub seed: Option<u64>,
    pub allocation: Option<String>,
    pub deployment: Option<PathBuf>,
    pub source: Option<String>,
    pub window: Option<Scalar>,
    pub method: Option<String>,
    pub epsilon: Option<f64>,
    pub threads: Option<usize>,
}

impl Settings {
    pub fn defaults(kind: CommandKind) -> Self {
        let text = |s: &str| Some(Scalar::Text(s.to_string()));
        Settings {
            lambda: Some(1.0),
            alpha: Some(4.0),
            mu: Some(1.0),
            snr: text("inf"),
            fading: Some("exp".into()),
            t_db: match kind {
                CommandKind::MinDelta => text("0"),
                _ => text("-10:20:1"),
            },
            delta: match kind {
                CommandKind::Reuse => text("2"),
                CommandKind::Rate => text("1,2,3,4"),
                _ => text("1"),
            },
            gap_db: Some(0.0),
            trials: match kind {
                CommandKind::Compare => text("10000"),
                _ => text("0"),
            },
            seed: Some(1),
            allocation: Some("random".into()),
            deployment: None,
            source: Some("ppp".into()),
            window: text("auto"),
            method: Some("auto".into()),
            epsilon: Some(0.1),
            threads: None,
        }
    }

    pub fn from_flags(f: &Flags) -> Self {
        let text = |s: &Option<String>| s.as_ref().map(|v| Scalar::Text(v.clone()));
        Settings {
            lambda: f.lambda,
            alpha: f.alpha,
            mu: f.mu,
            snr: text(&f.snr),
            fading: f.fading.clone(),
            t_db: text(&f.t_db),
            delta: text(&f.delta),
            gap_db: f.gap_db,
            trials: text(&f.trials),
            seed: f.seed,
            allocation: f.allocation.clone(),
            deployment: f.deployment.clone(),
            source: f.source.clone(),
            window: text(&f.window),
            method: f.method.clone(),
            epsilon: f.epsilon,
            threads: f.threads,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("config file: {e}")))
    }

    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        Settings {
            lambda: self.lambda.or(lower.lambda),
            alpha: self.alpha.or(lower.alpha),
            mu: self.mu.or(lower.mu),
            snr: self.snr.or(lower.snr),
            fading: self.fading.or(lower.fading),
            t_db: self.t_db.or(lower.t_db),
            delta: self.delta.or(lower.delta),
            gap_db: self.gap_db.or(lower.gap_db),
            trials: self.trials.or(lower.trials),
            seed: self.seed.or(lower.seed),
            allocation: self.allocation.or(lower.allocation),
            deployment: self.deployment.or(lower.deployment),
            source: self.source.or(lower.source),
            window: self.window.or(lower.window),
            method: self.method.or(lower.method),
            epsilon: self.epsilon.or(lower.epsilon),
            threads: self.threads.or(lower.threads),
        }
    }
}

/// Which analytic formula(s) to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Auto,
    All,
    One(Method),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceChoice {
    Ppp,
    Grid { tiers: u32 },
    Lattice { tiers: u32, jitter: f64 },
}

/// Typed, validated inputs for one run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub params: NetworkParams,
    /// Threshold grid in dB.
    pub t_db: Vec<f64>,
    pub deltas: Vec<u32>,
    /// Linear SINR gap.
    pub gap: f64,
    pub sim: SimConfig,
    pub source: SourceChoice,
    pub deployment: Option<PathBuf>,
    pub method: MethodChoice,
    pub epsilon: f64,
    pub threads: Option<usize>,
}

impl RunSpec {
    pub fn delta(&self) -> u32 {
        self.deltas[0]
    }

    /// The threshold grid in linear units.
    pub fn thresholds(&self) -> Vec<f64> {
        self.t_db.iter().map(|&t| db_to_linear(t)).collect()
    }

    /// Scenario for simulation, loading or generating the layout.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        if let Some(path) = &self.deployment {
            let d = Deployment::from_path(path)
                .map_err(|e| CliError::io(path, e))?
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            return Ok(Scenario::Fixed(d));
        }
        let half = 0.5 / self.params.lambda.sqrt();
        Ok(match self.source {
            SourceChoice::Ppp => Scenario::Ppp,
            SourceChoice::Grid { tiers } => Scenario::Grid {
                half_spacing: half,
                tiers,
            },
            SourceChoice::Lattice { tiers, jitter } => {
                // the layout gets its own stream, disjoint from trial streams
                let mut rng = stochcell::sim::trial_rng(self.sim.seed, u64::MAX);
                Scenario::Fixed(stochcell::sim::generate_perturbed_lattice(
                    half, jitter, tiers, &mut rng,
                )?)
            }
        })
    }
}

fn required<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Invalid(format!("missing setting `{name}`")))
}

fn parse_f64(s: &str, name: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Invalid(format!("{name}: `{s}` is not a number")))
}

/// `START:STOP:STEP` (inclusive, step > 0) or a single value.
pub fn parse_t_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse_f64(single, "t-db")?]),
        [a, b, c] => {
            let (start, stop, step) = (
                parse_f64(a, "t-db")?,
                parse_f64(b, "t-db")?,
                parse_f64(c, "t-db")?,
            );
            if !(step > 0.0 && step.is_finite()) {
                return Err(CliError::Invalid("t-db grid: step > 0 violated".into()));
            }
            if !(start.is_finite() && stop.is_finite()) || stop < start {
                return Err(CliError::Invalid(
                    "t-db grid: finite START <= STOP required (grid must be nonempty)".into(),
                ));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // round away accumulated binary noise such as 0.30000000000000004
            Ok((0..n)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(CliError::Invalid(format!(
            "t-db: expected START:STOP:STEP or a single value, got `{s}`"
        ))),
    }
}

fn parse_deltas(s: &str) -> Result<Vec<u32>, CliError> {
    let deltas: Result<Vec<u32>, CliError> = s
        .split(',')
        .map(|p| match p.trim().parse::<f64>() {
            Ok(v) if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(v as u32),
            _ => Err(CliError::Invalid(format!(
                "reuse factor delta >= 1 (integer) violated: `{p}`"
            ))),
        })
        .collect();
    let deltas = deltas?;
    if deltas.is_empty() {
        return Err(CliError::Invalid("delta list is empty".into()));
    }
    Ok(deltas)
}

fn parse_trials(s: &str) -> Result<u64, CliError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= 1e15 => Ok(v as u64),
        _ => Err(CliError::Invalid(format!(
            "trials must be a non-negative integer such as 1e5, got `{s}`"
        ))),
    }
}

fn parse_snr_db(s: &str) -> Result<f64, CliError> {
    let t = s.trim().to_ascii_lowercase();
    if t == "inf" || t == "+inf" || t == "infinity" {
        Ok(f64::INFINITY)
    } else {
        let v = parse_f64(&t, "snr")?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Invalid("snr must be finite dB or `inf`".into()))
        }
    }
}

pub fn parse_fading(s: &str, mu: f64, base: Option<&Path>) -> Result<FadingModel, CliError> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "exp" | "exponential" if rest.is_empty() => Ok(FadingModel::exponential(mu)?),
        "lognormal" => {
            let (xi, kappa) = rest.split_once(',').ok_or_else(|| {
                CliError::Invalid("fading: expected lognormal:XI,KAPPA or lognormal:auto,KAPPA".into())
            })?;
            let kappa = parse_f64(kappa, "lognormal kappa")?;
            if xi.trim() == "auto" {
                Ok(FadingModel::lognormal_mean_matched(kappa, 1.0 / mu)?)
            } else {
                Ok(FadingModel::lognormal_db(parse_f64(xi, "lognormal xi")?, kappa)?)
            }
        }
        "table" if !rest.is_empty() => {
            let path = match base {
                Some(dir) if Path::new(rest).is_relative() => dir.join(rest),
                _ => PathBuf::from(rest),
            };
            let table = TabulatedPdf::from_path(&path)
                .map_err(|e| CliError::io(&path, e))?
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            Ok(FadingModel::Tabulated(table))
        }
        _ => Err(CliError::Invalid(format!(
            "fading: unknown model `{s}` (exp | lognormal:XI,KAPPA | lognormal:auto,KAPPA | table:PATH)"
        ))),
    }
}

fn parse_allocation(s: &str) -> Result<Allocation, CliError> {
    match s {
        "random" => Ok(Allocation::Random),
        "greedy" => Ok(Allocation::Greedy),
        "preassigned" => Ok(Allocation::Preassigned),
        _ => Err(CliError::Invalid(format!(
            "allocation must be random, greedy or preassigned, got `{s}`"
        ))),
    }
}

fn parse_source(s: &str) -> Result<SourceChoice, CliError> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let tiers = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| CliError::Invalid(format!("source: tier count `{t}` is not a non-negative integer")))
    };
    match kind {
        "ppp" if rest.is_empty() => Ok(SourceChoice::Ppp),
        "grid" => Ok(SourceChoice::Grid {
            tiers: if rest.is_empty() { 1 } else { tiers(rest)? },
        }),
        "lattice" => {
            let (t, j) = rest.split_once(',').ok_or_else(|| {
                CliError::Invalid("source: expected lattice:TIERS,JITTER".into())
            })?;
            Ok(SourceChoice::Lattice {
                tiers: tiers(t)?,
                jitter: parse_f64(j, "lattice jitter")?,
            })
        }
        _ => Err(CliError::Invalid(format!(
            "source must be ppp, grid:TIERS or lattice:TIERS,JITTER, got `{s}`"
        ))),
    }
}

fn parse_window(s: &str) -> Result<WindowPolicy, CliError> {
    if s.trim() == "auto" {
        Ok(WindowPolicy::Auto)
    } else {
        Ok(WindowPolicy::Fixed(parse_f64(s, "window")?))
    }
}

fn parse_method(s: &str) -> Result<MethodChoice, CliError> {
    let all = [
        Method::Thm1General,
        Method::Thm2Exponential,
        Method::Alpha4Closed,
        Method::NoNoiseClosed,
        Method::SmallNoise,
        Method::ReuseExponential,
    ];
    match s {
        "auto" => Ok(MethodChoice::Auto),
        "all" => Ok(MethodChoice::All),
        _ => all
            .into_iter()
            .find(|m| m.tag() == s)
            .map(MethodChoice::One)
            .ok_or_else(|| CliError::Invalid(format!("unknown method `{s}`"))),
    }
}

/// Turns merged settings into a run spec. `config_dir` anchors relative
/// table paths written in a config file.
pub fn resolve(s: &Settings, config_dir: Option<&Path>) -> Result<RunSpec, CliError> {
    let lambda = required(s.lambda, "lambda")?;
    let alpha = required(s.alpha, "alpha")?;
    let mu = required(s.mu, "mu")?;
    let snr_db = parse_snr_db(&required(s.snr.clone(), "snr")?.to_string())?;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(CliError::Invalid(format!("mu > 0 violated (mu = {mu})")));
    }
    let fading = parse_fading(&required(s.fading.clone(), "fading")?, mu, config_dir)?;
    let params = NetworkParams::new(lambda, alpha, mu, 0.0, fading)?.with_snr_db(snr_db)?;

    let gap_db = required(s.gap_db, "gap_db")?;
    if !(gap_db >= 0.0 && gap_db.is_finite()) {
        return Err(CliError::Invalid(format!("gap G >= 0 dB violated (gap = {gap_db} dB)")));
    }
    let epsilon = required(s.epsilon, "epsilon")?;
    let sim = SimConfig {
        trials: parse_trials(&required(s.trials.clone(), "trials")?.to_string())?,
        seed: required(s.seed, "seed")?,
        window: parse_window(&required(s.window.clone(), "window")?.to_string())?,
        reuse_delta: 1,
        allocation: parse_allocation(&required(s.allocation.clone(), "allocation")?)?,
    };
    let deltas = parse_deltas(&required(s.delta.clone(), "delta")?.to_string())?;
    let sim = SimConfig {
        reuse_delta: deltas[0],
        ..sim
    };
    if let Some(0) = s.threads {
        return Err(CliError::Invalid("threads >= 1 violated".into()));
    }
    Ok(RunSpec {
        params,
        t_db: parse_t_grid(&required(s.t_db.clone(), "t_db")?.to_string())?,
        deltas,
        gap: db_to_linear(gap_db),
        sim,
        source: parse_source(&required(s.source.clone(), "source")?)?,
        deployment: s.deployment.clone(),
        method: parse_method(&required(s.method.clone(), "method")?)?,
        epsilon,
        threads: s.threads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_t_grid("-10:20:1").unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[10], 0.0);
        assert_eq!(parse_t_grid("0:1:0.1").unwrap()[3], 0.3);
        assert_eq!(parse_t_grid("3").unwrap(), vec![3.0]);
        assert!(parse_t_grid("0:10:0").is_err());
        assert!(parse_t_grid("10:0:1").is_err());
        assert!(parse_t_grid("a:b").is_err());
    }

    #[test]
    fn scalar_parsing() {
        assert_eq!(parse_trials("1e5").unwrap(), 100_000);
        assert!(parse_trials("1.5").is_err());
        assert_eq!(parse_deltas("1,2, 4").unwrap(), vec![1, 2, 4]);
        assert!(parse_deltas("0").is_err());
        assert_eq!(parse_snr_db("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_snr_db("-3").unwrap(), -3.0);
        assert_eq!(parse_source("grid:2").unwrap(), SourceChoice::Grid { tiers: 2 });
        assert_eq!(
            parse_source("lattice:5,0.1").unwrap(),
            SourceChoice::Lattice { tiers: 5, jitter: 0.1 }
        );
        assert_eq!(parse_method("small_noise").unwrap(), MethodChoice::One(Method::SmallNoise));
        assert!(parse_method("simulated").is_err());
    }

    #[test]
    fn fading_parsing() {
        assert!(parse_fading("exp", 1.0, None).unwrap().is_exponential());
        let ln = parse_fading("lognormal:auto,6", 1.0, None).unwrap();
        assert!((ln.mean_power() - 1.0).abs() < 1e-12);
        let raw = parse_fading("lognormal:0,6", 1.0, None).unwrap();
        assert!(raw.mean_power() > 2.5);
        assert!(parse_fading("rayleigh", 1.0, None).is_err());
        assert!(matches!(
            parse_fading("table:/no/such/file.csv", 1.0, None),
            Err(CliError::Io { .. })
        ));
    }

    #[test]
    fn flags_override_config_override_defaults() {
        let file = Settings::from_json(r#"{"alpha": 3, "lambda": 2, "snr": 10}"#).unwrap();
        let flags = Settings {
            alpha: Some(3.5),
            ..Settings::default()
        };
        let merged = flags.over(file.over(Settings::defaults(CommandKind::Coverage)));
        assert_eq!(merged.alpha, Some(3.5));
        assert_eq!(merged.lambda, Some(2.0));
        assert_eq!(merged.mu, Some(1.0));
        let spec = resolve(&merged, None).unwrap();
        assert!((spec.params.sigma2 - 0.1).abs() < 1e-15);
        assert!(Settings::from_json(r#"{"alpah": 3}"#).is_err());
    }

    #[test]
    fn invalid_params_name_the_invariant() {
        let mut s = Settings::defaults(CommandKind::Coverage);
        s.alpha = Some(2.0);
        let e = resolve(&s, None).unwrap_err().to_string();
        assert!(e.contains("alpha"), "{e}");
        let mut s = Settings::defaults(CommandKind::Coverage);
        s.lambda = Some(-1.0);
        let e = resolve(&s, None).unwrap_err().to_string();
        assert!(e.contains("lambda > 0"), "{e}");
    }
}
