//! Adaptive Gauss–Kronrod quadrature on finite and semi-infinite ranges.

use crate::error::{Error, Result};

/// Tolerances for adaptive quadrature.
///
/// The integrator stops once the summed error estimate is at most
/// `max(rel_tol * |result|, abs_tol)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("QuadSpec.rel_tol must be > 0"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::invalid("QuadSpec.abs_tol must be >= 0"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("QuadSpec.max_subdivisions must be >= 1"));
        }
        Ok(())
    }

    /// Same limits with a different relative tolerance.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

// 15-point Kronrod abscissae; odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    result: f64,
    error: f64,
    resabs: f64,
}

fn checked(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("integrand is not finite at x = {x}")))
    }
}

fn kronrod15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(center, f(center)?)?;

    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let x1 = center - dx;
        let x2 = center + dx;
        let f1 = checked(x1, f(x1)?)?;
        let f2 = checked(x2, f(x2)?)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let result = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }

    Ok(Segment {
        a,
        b,
        result,
        error,
        resabs,
    })
}

/// Adaptive integration of a fallible integrand over `[a, b]`.
pub fn integrate_try<F>(mut f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "finite quadrature needs finite limits, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }

    let mut segments = vec![kronrod15(&mut f, a, b)?];
    loop {
        let total: f64 = segments.iter().map(|s| s.result).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        let resabs: f64 = segments.iter().map(|s| s.resabs).sum();
        let target = (spec.rel_tol * total.abs()).max(spec.abs_tol);
        if err <= target || err <= 50.0 * f64::EPSILON * resabs {
            return Ok(total);
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total,
                error_bound: err,
            });
        }

        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval can no longer be split in floating point
            return Err(Error::Quadrature {
                estimate: total,
                error_bound: err,
            });
        }
        segments.push(kronrod15(&mut f, seg.a, mid)?);
        segments.push(kronrod15(&mut f, mid, seg.b)?);
    }
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_try(|x| Ok(f(x)), a, b, spec)
}

/// Integral of a fallible integrand over `[lower, ∞)`.
///
/// Maps the range onto `[0, 1)` with `x = lower + t / (1 - t)`.
pub fn integrate_semi_infinite_try<F>(mut f: F, lower: f64, spec: &QuadSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !lower.is_finite() {
        return Err(Error::Domain(format!("lower limit must be finite, got {lower}")));
    }
    integrate_try(
        |t| {
            let one_minus = 1.0 - t;
            let x = lower + t / one_minus;
            if !x.is_finite() {
                return Ok(0.0);
            }
            let fx = f(x)?;
            if fx == 0.0 {
                Ok(0.0)
            } else {
                Ok(fx / (one_minus * one_minus))
            }
        },
        0.0,
        1.0,
        spec,
    )
}

/// Integral of `f` over `[lower, ∞)`.
pub fn integrate_semi_infinite<F>(mut f: F, lower: f64, spec: &QuadSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_semi_infinite_try(|x| Ok(f(x)), lower, spec)
}
