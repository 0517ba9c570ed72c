use stochcell::analytic::{coverage_curve, mean_rate, min_reuse_factor, NetworkParams};
use stochcell::sim::{estimate_coverage, Scenario, SimConfig};
use stochcell::{db_to_linear, Method};

#[test]
fn closed_forms_agree_through_the_public_surface() {
    let p = NetworkParams::rayleigh(0.3, 4.0, 1.0, 0.0)
        .unwrap()
        .with_snr_db(5.0)
        .unwrap();
    let ts: Vec<f64> = [-5.0, 0.0, 5.0, 10.0].map(db_to_linear).to_vec();
    let a = coverage_curve(&p, &ts, Method::Alpha4Closed, 1).unwrap();
    let b = coverage_curve(&p, &ts, Method::Thm2Exponential, 1).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn simulation_brackets_the_analytic_value() {
    let p = NetworkParams::rayleigh(1.0, 3.5, 1.0, 0.0).unwrap();
    let ts = [1.0];
    let exact = coverage_curve(&p, &ts, Method::NoNoiseClosed, 1).unwrap().values[0];
    let cfg = SimConfig {
        trials: 20_000,
        seed: 11,
        ..SimConfig::default()
    };
    let run = estimate_coverage(&Scenario::Ppp, &p, &ts, &cfg).unwrap();
    let e = &run.estimates[0];
    assert!((e.value - exact).abs() < 4.0 * e.ci_halfwidth, "{} vs {exact}", e.value);
}

#[test]
fn reuse_trades_coverage_for_rate() {
    let p = NetworkParams::rayleigh(1.0, 4.0, 1.0, 0.0).unwrap();
    let r1 = mean_rate(&p, 1, 1.0).unwrap().tau;
    let r4 = mean_rate(&p, 4, 1.0).unwrap().tau;
    assert!(r1 > r4);
    assert_eq!(min_reuse_factor(0.1, 1.0, 4.0).unwrap(), 8);
}
