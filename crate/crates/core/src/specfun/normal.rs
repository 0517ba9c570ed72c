//! Standard Gaussian tail probability and its scaled forms.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Q(x) = P[N(0,1) > x].
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Mills ratio Q(x)/φ(x) for x > 0, via its continued fraction
/// `1/(x + 1/(x + 2/(x + 3/(x + …))))` evaluated with modified Lentz.
fn mills_ratio_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// e^{x²/2}·Q(x), finite for arbitrarily large positive x.
///
/// Past x = 8 the direct product would lose everything to underflow in
/// Q(x), so the Mills-ratio continued fraction takes over.
pub fn scaled_q(x: f64) -> f64 {
    if x > 8.0 {
        mills_ratio_cf(x) / (2.0 * PI).sqrt()
    } else {
        (0.5 * x * x).exp() * gaussian_q(x)
    }
}

/// ln Q(x), accurate far into the upper tail.
pub fn ln_gaussian_q(x: f64) -> f64 {
    if x > 8.0 {
        scaled_q(x).ln() - 0.5 * x * x
    } else {
        gaussian_q(x).ln()
    }
}
