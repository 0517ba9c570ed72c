//! Executes a resolved run and renders its CSV (or scalar) output.

use std::fmt::Write as _;

use stochcell::analytic::{self, coverage_curve, NetworkParams};
use stochcell::sim::{
    assign_bands_greedy, assign_bands_planned, assign_bands_random, auto_window_radius,
    estimate_coverage, estimate_rate, grid_deployment, sample_ppp_deployment, trial_rng, Allocation,
    Deployment, Scenario, SimConfig, WindowPolicy,
};
use stochcell::Method;

use crate::cli::CommandKind;
use crate::error::CliError;
use crate::settings::{MethodChoice, RunSpec};

pub const COVERAGE_HEADER: &str = "T_dB,method,value,ci_halfwidth";
pub const RATE_HEADER: &str = "delta,method,value,ci_halfwidth";

struct Row {
    key: String,
    method: Method,
    value: f64,
    ci: Option<f64>,
}

fn render(header: &str, rows: &[Row]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for r in rows {
        let ci = r.ci.map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", r.key, r.method, r.value, ci);
    }
    out
}

/// Analytic formulas to report for a coverage sweep.
pub fn analytic_methods(p: &NetworkParams, delta: u32, choice: MethodChoice) -> Vec<Method> {
    let exp = p.fading.is_exponential();
    let quiet = p.sigma2 == 0.0;
    match choice {
        MethodChoice::One(m) => vec![m],
        MethodChoice::Auto => {
            let m = if quiet {
                Method::NoNoiseClosed
            } else if delta > 1 {
                Method::ReuseExponential
            } else if p.alpha == 4.0 {
                Method::Alpha4Closed
            } else if exp {
                Method::Thm2Exponential
            } else {
                Method::Thm1General
            };
            vec![m]
        }
        MethodChoice::All if delta > 1 => {
            let mut v = vec![Method::ReuseExponential];
            if quiet {
                v.push(Method::NoNoiseClosed);
            }
            v
        }
        MethodChoice::All => {
            let mut v = vec![Method::Thm1General];
            if exp {
                v.push(Method::Thm2Exponential);
            }
            if p.alpha == 4.0 {
                v.push(Method::Alpha4Closed);
            }
            if quiet {
                v.push(Method::NoNoiseClosed);
            }
            v.push(Method::SmallNoise);
            v
        }
    }
}

fn coverage_rows(spec: &RunSpec, simulate: bool) -> Result<Vec<Row>, CliError> {
    let thresholds = spec.thresholds();
    let delta = spec.delta();
    let mut rows = Vec::new();
    for method in analytic_methods(&spec.params, delta, spec.method) {
        let curve = coverage_curve(&spec.params, &thresholds, method, delta)?;
        rows.extend(spec.t_db.iter().zip(&curve.values).map(|(t, v)| Row {
            key: t.to_string(),
            method,
            value: *v,
            ci: None,
        }));
    }
    if simulate {
        let run = estimate_coverage(&spec.scenario()?, &spec.params, &thresholds, &spec.sim)?;
        if run.empty_resamples > 0 {
            eprintln!("note: {} empty PPP windows were redrawn", run.empty_resamples);
        }
        rows.extend(spec.t_db.iter().zip(&run.estimates).map(|(t, e)| Row {
            key: t.to_string(),
            method: Method::Simulated,
            value: e.value,
            ci: Some(e.ci_halfwidth),
        }));
    }
    Ok(rows)
}

fn rate_rows(spec: &RunSpec) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    if spec.params.fading.is_exponential() {
        for &delta in &spec.deltas {
            let r = analytic::mean_rate(&spec.params, delta, spec.gap)?;
            rows.push(Row {
                key: delta.to_string(),
                method: r.method,
                value: r.tau,
                ci: None,
            });
        }
    } else if spec.sim.trials == 0 {
        return Err(CliError::Invalid(
            "analytic rate needs exponential interference fading; pass --trials to simulate".into(),
        ));
    }
    if spec.sim.trials > 0 {
        let scenario = spec.scenario()?;
        for &delta in &spec.deltas {
            let cfg = SimConfig {
                reuse_delta: delta,
                ..spec.sim.clone()
            };
            let r = estimate_rate(&scenario, &spec.params, &cfg, spec.gap)?;
            rows.push(Row {
                key: delta.to_string(),
                method: Method::Simulated,
                value: r.estimate.value,
                ci: Some(r.estimate.ci_halfwidth),
            });
        }
    }
    Ok(rows)
}

fn min_delta(spec: &RunSpec) -> Result<String, CliError> {
    let [t_db] = spec.t_db.as_slice() else {
        return Err(CliError::Invalid("min-delta takes a single --t-db value".into()));
    };
    let threshold = stochcell::db_to_linear(*t_db);
    let delta = analytic::min_reuse_factor(spec.epsilon, threshold, spec.params.alpha)?;
    Ok(format!("{delta}\n"))
}

fn sites(spec: &RunSpec) -> Result<String, CliError> {
    let delta = spec.delta();
    // stream distinct from both trial streams and the lattice layout stream
    let mut rng = trial_rng(spec.sim.seed, u64::MAX - 1);
    let (d, planned): (Deployment, bool) = match spec.scenario()? {
        Scenario::Ppp => {
            let radius = match spec.sim.window {
                WindowPolicy::Auto => auto_window_radius(&spec.params),
                WindowPolicy::Fixed(r) => r,
            };
            (sample_ppp_deployment(spec.params.lambda, radius, &mut rng)?.0, false)
        }
        Scenario::Grid {
            half_spacing,
            tiers,
        } => (grid_deployment(half_spacing, tiers)?, true),
        Scenario::Fixed(d) => (d, false),
    };
    let d = match (delta, spec.sim.allocation) {
        (_, Allocation::Preassigned) => d,
        (1, _) => d.without_bands(),
        _ if planned => assign_bands_planned(d, delta)?,
        (_, Allocation::Greedy) => assign_bands_greedy(d, delta)?,
        (_, Allocation::Random) => assign_bands_random(d, delta, &mut rng)?,
    };
    Ok(d.to_csv())
}

/// Runs one command and returns what should be written out.
pub fn execute(kind: CommandKind, spec: &RunSpec) -> Result<String, CliError> {
    match kind {
        CommandKind::Coverage | CommandKind::Reuse => {
            if spec.deltas.len() != 1 {
                return Err(CliError::Invalid("coverage takes a single --delta".into()));
            }
            Ok(render(COVERAGE_HEADER, &coverage_rows(spec, spec.sim.trials > 0)?))
        }
        CommandKind::Compare => {
            if spec.sim.trials == 0 {
                return Err(CliError::Invalid("compare needs trials >= 1".into()));
            }
            if spec.deltas.len() != 1 {
                return Err(CliError::Invalid("compare takes a single --delta".into()));
            }
            Ok(render(COVERAGE_HEADER, &coverage_rows(spec, true)?))
        }
        CommandKind::Rate => Ok(render(RATE_HEADER, &rate_rows(spec)?)),
        CommandKind::MinDelta => min_delta(spec),
        CommandKind::Sites => sites(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::{resolve, Settings};

    fn spec(kind: CommandKind, edit: impl FnOnce(&mut Settings)) -> RunSpec {
        let mut s = Settings::defaults(kind);
        edit(&mut s);
        resolve(&s, None).unwrap()
    }

    #[test]
    fn auto_method_selection() {
        let p = NetworkParams::rayleigh(1.0, 4.0, 1.0, 0.0).unwrap();
        assert_eq!(analytic_methods(&p, 1, MethodChoice::Auto), vec![Method::NoNoiseClosed]);
        let noisy = p.clone().with_snr_db(10.0).unwrap();
        assert_eq!(analytic_methods(&noisy, 1, MethodChoice::Auto), vec![Method::Alpha4Closed]);
        assert_eq!(
            analytic_methods(&noisy, 2, MethodChoice::Auto),
            vec![Method::ReuseExponential]
        );
        assert_eq!(analytic_methods(&noisy, 1, MethodChoice::All).len(), 4);
    }

    #[test]
    fn coverage_csv_shape() {
        let out = execute(CommandKind::Coverage, &spec(CommandKind::Coverage, |_| {})).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], COVERAGE_HEADER);
        assert_eq!(lines.len(), 32);
        assert!(lines[11].starts_with("0,no_noise_closed,0.5600991"), "{}", lines[11]);
        assert!(lines[11].ends_with(','));
    }

    #[test]
    fn min_delta_prints_integer() {
        let out = execute(CommandKind::MinDelta, &spec(CommandKind::MinDelta, |_| {})).unwrap();
        assert_eq!(out, "8\n");
    }

    #[test]
    fn sites_grid_with_bands() {
        let out = execute(
            CommandKind::Sites,
            &spec(CommandKind::Sites, |s| {
                s.source = Some("grid:2".into());
                s.delta = Some(crate::settings::Scalar::Num(4.0));
            }),
        )
        .unwrap();
        let d = Deployment::parse_csv(&out).unwrap();
        assert_eq!(d.len(), 25);
        assert_eq!(d.bands().unwrap().delta, 4);
    }

    #[test]
    fn rate_rows_for_each_delta() {
        let out = execute(CommandKind::Rate, &spec(CommandKind::Rate, |_| {})).unwrap();
        assert_eq!(out.lines().count(), 5);
        assert!(out.lines().nth(1).unwrap().starts_with("1,reuse_exponential,1.48"));
    }
}
