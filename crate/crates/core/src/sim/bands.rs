use rand::Rng;

use super::deployment::{Deployment, Source};
use crate::error::{Error, Result};

fn check_delta(delta: u32) -> Result<()> {
    if delta >= 1 {
        Ok(())
    } else {
        Err(Error::invalid("reuse factor delta >= 1 violated"))
    }
}

/// Independent uniform band per site.
pub fn assign_bands_random<R: Rng + ?Sized>(
    d: Deployment,
    delta: u32,
    rng: &mut R,
) -> Result<Deployment> {
    check_delta(delta)?;
    let bands = (0..d.len()).map(|_| rng.random_range(1..=delta)).collect();
    d.with_bands(bands, delta)
}

/// Greedy max-min-distance allocation.
///
/// Sites are visited in ascending (x, y, index) order; each takes the band
/// whose nearest already-assigned member is farthest away, an unused band
/// counting as infinitely far. Ties go to the lowest band.
pub fn assign_bands_greedy(d: Deployment, delta: u32) -> Result<Deployment> {
    check_delta(delta)?;
    let sites = d.sites();
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&a, &b| {
        sites[a]
            .x
            .total_cmp(&sites[b].x)
            .then(sites[a].y.total_cmp(&sites[b].y))
            .then(a.cmp(&b))
    });

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); delta as usize];
    let mut bands = vec![0u32; sites.len()];
    for &i in &order {
        let s = sites[i];
        let mut best = (0usize, f64::NEG_INFINITY);
        for (band, list) in members.iter().enumerate() {
            let nearest = list
                .iter()
                .map(|&j| sites[j].dist2(s.x, s.y))
                .fold(f64::INFINITY, f64::min);
            if nearest > best.1 {
                best = (band, nearest);
            }
        }
        members[best.0].push(i);
        bands[i] = best.0 as u32 + 1;
    }
    d.with_bands(bands, delta)
}

/// Planned band of lattice cell (i, j). δ = 2 is a checkerboard (same-band
/// spacing 2√2·R), δ = 4 tiles 2×2 blocks (spacing 4R). Other δ have no
/// fixed pattern.
pub fn grid_pattern_band(i: i64, j: i64, delta: u32) -> Option<u32> {
    match delta {
        1 => Some(1),
        2 => Some((i + j).rem_euclid(2) as u32 + 1),
        4 => Some((i.rem_euclid(2) + 2 * j.rem_euclid(2)) as u32 + 1),
        _ => None,
    }
}

/// Planned allocation for a grid deployment: the fixed pattern for
/// δ ∈ {1, 2, 4}, greedy otherwise.
pub fn assign_bands_planned(d: Deployment, delta: u32) -> Result<Deployment> {
    check_delta(delta)?;
    let Source::Grid { half_spacing, .. } = *d.source() else {
        return assign_bands_greedy(d, delta);
    };
    if grid_pattern_band(0, 0, delta).is_none() {
        return assign_bands_greedy(d, delta);
    }
    let pitch = 2.0 * half_spacing;
    let bands = d
        .sites()
        .iter()
        .map(|s| {
            let (i, j) = ((s.x / pitch).round() as i64, (s.y / pitch).round() as i64);
            grid_pattern_band(i, j, delta).expect("pattern exists")
        })
        .collect();
    d.with_bands(bands, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::deployment::{grid_deployment, sample_ppp_deployment, Site, Window};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit_square() -> Deployment {
        let sites = vec![
            Site::new(0.0, 0.0),
            Site::new(1.0, 0.0),
            Site::new(0.0, 1.0),
            Site::new(1.0, 1.0),
        ];
        let w = Window::bounding(&sites);
        Deployment::new(sites, w, Source::Imported).unwrap()
    }

    #[test]
    fn random_single_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = assign_bands_random(unit_square(), 1, &mut rng).unwrap();
        assert!(d.bands().unwrap().per_site.iter().all(|&b| b == 1));
    }

    #[test]
    fn random_bands_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (d, _) = sample_ppp_deployment(1.0, (10_000.0 / PI).sqrt(), &mut rng).unwrap();
        let n = d.len() as f64;
        let d = assign_bands_random(d, 4, &mut rng).unwrap();
        let sigma = (n * 0.25 * 0.75).sqrt();
        for band in 1..=4 {
            let c = d.bands().unwrap().per_site.iter().filter(|&&b| b == band).count() as f64;
            assert!((c - 0.25 * n).abs() < 3.0 * sigma, "band {band}: {c} of {n}");
        }
    }

    #[test]
    fn thinned_nearest_distance() {
        // same-band subset of a PPP is a PPP of density λ/δ
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (lambda, delta, r0, n) = (1.0, 3, 0.5, 10_000);
        let hits = (0..n)
            .filter(|_| {
                let (d, _) = sample_ppp_deployment(lambda, 4.0, &mut rng).unwrap();
                let d = assign_bands_random(d, delta, &mut rng).unwrap();
                let bands = &d.bands().unwrap().per_site;
                d.sites()
                    .iter()
                    .zip(bands)
                    .filter(|(_, &b)| b == 1)
                    .all(|(s, _)| s.dist2(0.0, 0.0) > r0 * r0)
            })
            .count();
        let p = hits as f64 / n as f64;
        let expected = (-(lambda / delta as f64) * PI * r0 * r0).exp();
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((p - expected).abs() < 4.0 * se, "{p} vs {expected}");
    }

    #[test]
    fn greedy_distinct_when_bands_suffice() {
        let d = assign_bands_greedy(unit_square(), 4).unwrap();
        let mut b = d.bands().unwrap().per_site.clone();
        b.sort();
        assert_eq!(b, vec![1, 2, 3, 4]);
    }

    #[test]
    fn greedy_square_pairs_diagonals() {
        let d = assign_bands_greedy(unit_square(), 2).unwrap();
        let b = &d.bands().unwrap().per_site;
        assert_eq!(b[0], b[3]);
        assert_eq!(b[1], b[2]);
        assert_ne!(b[0], b[1]);
    }

    #[test]
    fn planned_grid_spacing() {
        for &(delta, spacing2) in &[(2u32, 8.0), (4, 16.0)] {
            // R = 1: pitch 2
            let d = assign_bands_planned(grid_deployment(1.0, 2).unwrap(), delta).unwrap();
            let b = &d.bands().unwrap().per_site;
            let s = d.sites();
            let mut min2 = f64::INFINITY;
            for i in 0..s.len() {
                for j in 0..i {
                    if b[i] == b[j] {
                        min2 = min2.min(s[i].dist2(s[j].x, s[j].y));
                    }
                }
            }
            assert!((min2 - spacing2).abs() < 1e-12, "δ={delta}: {min2}");
        }
    }

    #[test]
    fn delta_zero_rejected() {
        assert!(assign_bands_greedy(unit_square(), 0).is_err());
    }
}
