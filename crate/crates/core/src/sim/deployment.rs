use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub x: f64,
    pub y: f64,
}

impl Site {
    pub fn new(x: f64, y: f64) -> Self {
        Site { x, y }
    }

    pub fn dist2(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (self.x - x, self.y - y);
        dx * dx + dy * dy
    }
}

/// Region holding the sites of a deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// Disc of the given radius centred on the origin.
    Disc { radius: f64 },
    Rect {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
}

impl Window {
    pub fn contains(&self, s: &Site) -> bool {
        match *self {
            // small slack for points generated exactly on the boundary
            Window::Disc { radius } => s.x.hypot(s.y) <= radius * (1.0 + 1e-12),
            Window::Rect {
                x_min,
                x_max,
                y_min,
                y_max,
            } => s.x >= x_min && s.x <= x_max && s.y >= y_min && s.y <= y_max,
        }
    }

    /// Smallest rectangle holding all sites.
    pub fn bounding(sites: &[Site]) -> Window {
        let mut w = Window::Rect {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        if let Window::Rect {
            x_min,
            x_max,
            y_min,
            y_max,
        } = &mut w
        {
            for s in sites {
                *x_min = x_min.min(s.x);
                *x_max = x_max.max(s.x);
                *y_min = y_min.min(s.y);
                *y_max = y_max.max(s.y);
            }
        }
        w
    }
}

/// Where a deployment came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Ppp { lambda: f64 },
    Grid { half_spacing: f64, tiers: u32 },
    Imported,
    PerturbedLattice {
        half_spacing: f64,
        jitter: f64,
        tiers: u32,
    },
}

/// Per-site band indices in `1..=delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bands {
    pub per_site: Vec<u32>,
    pub delta: u32,
}

/// A concrete set of base-station sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    sites: Vec<Site>,
    window: Window,
    source: Source,
    bands: Option<Bands>,
}

impl Deployment {
    pub fn new(sites: Vec<Site>, window: Window, source: Source) -> Result<Self> {
        if let Some((i, s)) = sites.iter().enumerate().find(|(_, s)| !window.contains(s)) {
            return Err(Error::invalid(format!(
                "site {i} at ({}, {}) lies outside the deployment window",
                s.x, s.y
            )));
        }
        if sites.iter().any(|s| !(s.x.is_finite() && s.y.is_finite())) {
            return Err(Error::invalid("site coordinates must be finite"));
        }
        Ok(Deployment {
            sites,
            window,
            source,
            bands: None,
        })
    }

    pub fn with_bands(mut self, per_site: Vec<u32>, delta: u32) -> Result<Self> {
        if delta < 1 {
            return Err(Error::invalid("reuse factor delta >= 1 violated"));
        }
        if per_site.len() != self.sites.len() {
            return Err(Error::invalid(format!(
                "{} bands given for {} sites",
                per_site.len(),
                self.sites.len()
            )));
        }
        if let Some(b) = per_site.iter().find(|&&b| b < 1 || b > delta) {
            return Err(Error::invalid(format!("band {b} outside 1..={delta}")));
        }
        self.bands = Some(Bands { per_site, delta });
        Ok(self)
    }

    pub fn without_bands(mut self) -> Self {
        self.bands = None;
        self
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn bands(&self) -> Option<&Bands> {
        self.bands.as_ref()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Central half of the bounding box, where users are dropped for fixed
    /// deployments so that they see interferers on all sides.
    pub fn core_region(&self) -> Window {
        match Window::bounding(&self.sites) {
            Window::Rect {
                x_min,
                x_max,
                y_min,
                y_max,
            } => {
                let (cx, cy) = (0.5 * (x_min + x_max), 0.5 * (y_min + y_max));
                let (hx, hy) = (0.25 * (x_max - x_min), 0.25 * (y_max - y_min));
                Window::Rect {
                    x_min: cx - hx,
                    x_max: cx + hx,
                    y_min: cy - hy,
                    y_max: cy + hy,
                }
            }
            w => w,
        }
    }

    /// Parses `x,y[,band]` lines; `#` lines and blank lines are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut sites = Vec::new();
        let mut bands: Vec<u32> = Vec::new();
        let mut with_band: Option<bool> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 && fields.len() != 3 {
                return Err(parse_err(format!(
                    "expected `x,y` or `x,y,band`, found {} fields",
                    fields.len()
                )));
            }
            let coord = |s: &str| -> Result<f64> {
                match s.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(parse_err(format!("`{s}` is not a finite number"))),
                }
            };
            sites.push(Site::new(coord(fields[0])?, coord(fields[1])?));
            let has_band = fields.len() == 3;
            match with_band {
                None => with_band = Some(has_band),
                Some(prev) if prev != has_band => {
                    return Err(parse_err(
                        "band column must be present on every line or on none".into(),
                    ))
                }
                _ => {}
            }
            if has_band {
                match fields[2].parse::<u32>() {
                    Ok(b) if b >= 1 => bands.push(b),
                    _ => {
                        return Err(parse_err(format!(
                            "band `{}` is not a positive integer",
                            fields[2]
                        )))
                    }
                }
            }
        }
        if sites.is_empty() {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: "no sites found".into(),
            });
        }
        let window = Window::bounding(&sites);
        let d = Deployment::new(sites, window, Source::Imported)?;
        if with_band == Some(true) {
            let delta = *bands.iter().max().expect("non-empty");
            d.with_bands(bands, delta)
        } else {
            Ok(d)
        }
    }

    /// Reads a deployment file. The outer error is I/O, the inner one
    /// content.
    pub fn from_path(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Deployment::parse_csv(&text))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.bands {
            Some(b) => {
                out.push_str("# x,y,band\n");
                for (s, band) in self.sites.iter().zip(&b.per_site) {
                    let _ = writeln!(out, "{},{},{}", s.x, s.y, band);
                }
            }
            None => {
                out.push_str("# x,y\n");
                for s in &self.sites {
                    let _ = writeln!(out, "{},{}", s.x, s.y);
                }
            }
        }
        out
    }
}

/// One PPP realization of density `lambda` on a disc; empty draws are
/// redrawn. Returns the deployment and the number of redraws.
pub fn sample_ppp_deployment<R: Rng + ?Sized>(
    lambda: f64,
    window_radius: f64,
    rng: &mut R,
) -> Result<(Deployment, u32)> {
    if !(window_radius > 0.0 && window_radius.is_finite()) {
        return Err(Error::invalid(format!(
            "window radius > 0 violated (radius = {window_radius})"
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda > 0 violated (lambda = {lambda})")));
    }
    let mean = lambda * PI * window_radius * window_radius;
    let poisson = Poisson::new(mean).map_err(|e| Error::invalid(e.to_string()))?;
    let mut resamples = 0;
    let n = loop {
        let n = poisson.sample(rng) as usize;
        if n > 0 {
            break n;
        }
        resamples += 1;
    };
    let sites = (0..n)
        .map(|_| {
            let r = window_radius * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            Site::new(r * phi.cos(), r * phi.sin())
        })
        .collect();
    let d = Deployment::new(
        sites,
        Window::Disc {
            radius: window_radius,
        },
        Source::Ppp { lambda },
    )?;
    Ok((d, resamples))
}

fn lattice_indices(tiers: u32) -> impl Iterator<Item = (i64, i64)> {
    let k = tiers as i64;
    (-k..=k).flat_map(move |i| (-k..=k).map(move |j| (i, j)))
}

fn check_half_spacing(half_spacing: f64) -> Result<()> {
    if half_spacing > 0.0 && half_spacing.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "half spacing R > 0 violated (R = {half_spacing})"
        )))
    }
}

/// Square grid of pitch 2R with `tiers` rings around the home site at the
/// origin: (2·tiers + 1)² sites.
pub fn grid_deployment(half_spacing: f64, tiers: u32) -> Result<Deployment> {
    check_half_spacing(half_spacing)?;
    let pitch = 2.0 * half_spacing;
    let sites: Vec<Site> = lattice_indices(tiers)
        .map(|(i, j)| Site::new(pitch * i as f64, pitch * j as f64))
        .collect();
    let extent = pitch * tiers as f64 + half_spacing;
    Deployment::new(
        sites,
        Window::Rect {
            x_min: -extent,
            x_max: extent,
            y_min: -extent,
            y_max: extent,
        },
        Source::Grid {
            half_spacing,
            tiers,
        },
    )
}

/// Square lattice of pitch 2R with i.i.d. N(0, jitter²) displacement of
/// each coordinate.
pub fn generate_perturbed_lattice<R: Rng + ?Sized>(
    half_spacing: f64,
    jitter: f64,
    tiers: u32,
    rng: &mut R,
) -> Result<Deployment> {
    check_half_spacing(half_spacing)?;
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::invalid(format!("jitter >= 0 violated (jitter = {jitter})")));
    }
    let pitch = 2.0 * half_spacing;
    let normal = Normal::new(0.0, jitter).map_err(|e| Error::invalid(e.to_string()))?;
    let sites: Vec<Site> = lattice_indices(tiers)
        .map(|(i, j)| {
            let (dx, dy) = if jitter > 0.0 {
                (normal.sample(rng), normal.sample(rng))
            } else {
                (0.0, 0.0)
            };
            Site::new(pitch * i as f64 + dx, pitch * j as f64 + dy)
        })
        .collect();
    let window = Window::bounding(&sites);
    Deployment::new(
        sites,
        window,
        Source::PerturbedLattice {
            half_spacing,
            jitter,
            tiers,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ppp_count_is_poisson() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let radius = (500.0 / PI).sqrt();
        let n = 10_000;
        let total: usize = (0..n)
            .map(|_| sample_ppp_deployment(1.0, radius, &mut rng).unwrap().0.len())
            .sum();
        let mean = total as f64 / n as f64;
        // standard error of the mean is √(500/10⁴)
        assert!((mean - 500.0).abs() < 3.0 * (500.0f64 / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn sparse_ppp_is_never_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut redraws = 0;
        for _ in 0..100 {
            let (d, r) = sample_ppp_deployment(1e-3, 1.0, &mut rng).unwrap();
            assert!(!d.is_empty());
            redraws += r;
        }
        assert!(redraws > 0);
    }

    #[test]
    fn nearest_distance_ccdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (lambda, r0, n) = (2.0, 0.4, 20_000);
        let hits = (0..n)
            .filter(|_| {
                let (d, _) = sample_ppp_deployment(lambda, 4.0, &mut rng).unwrap();
                d.sites().iter().all(|s| s.dist2(0.0, 0.0) > r0 * r0)
            })
            .count();
        let p = hits as f64 / n as f64;
        let expected = (-lambda * PI * r0 * r0).exp();
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((p - expected).abs() < 4.0 * se, "{p} vs {expected}");
    }

    #[test]
    fn grid_site_counts() {
        assert_eq!(grid_deployment(0.5, 1).unwrap().len(), 9);
        assert_eq!(grid_deployment(0.5, 2).unwrap().len(), 25);
        assert!(grid_deployment(0.0, 1).is_err());
    }

    #[test]
    fn lattice_without_jitter_is_the_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let lat = generate_perturbed_lattice(0.5, 0.0, 2, &mut rng).unwrap();
        assert_eq!(lat.sites(), grid_deployment(0.5, 2).unwrap().sites());
        assert_eq!(lat.len(), 25);
        let jittered = generate_perturbed_lattice(0.5, 0.3, 2, &mut rng).unwrap();
        assert!(jittered.sites().iter().all(|s| jittered.window().contains(s)));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let d = Deployment::parse_csv("# x,y,band\n0,0,1\n1.5,-2,2\n\n3,4,1\n").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.bands().unwrap().delta, 2);
        let again = Deployment::parse_csv(&d.to_csv()).unwrap();
        assert_eq!(again, d);

        let err = Deployment::parse_csv("0,0\n1,x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = Deployment::parse_csv("0,0,1\n1,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = Deployment::parse_csv("0,0,0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(Deployment::parse_csv("# only a header\n").is_err());
    }

    #[test]
    fn core_region_is_central_half() {
        let d = grid_deployment(0.5, 2).unwrap();
        assert_eq!(
            d.core_region(),
            Window::Rect {
                x_min: -1.0,
                x_max: 1.0,
                y_min: -1.0,
                y_max: 1.0
            }
        );
    }
}
