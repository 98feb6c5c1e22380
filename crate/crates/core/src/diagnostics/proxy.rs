//! Finite-sample shadows of relative compactness: greedy ε-covers and tail
//! energies of sampled image sets. They can only be consistent or inconsistent
//! with compactness, never prove it.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::sampling::{ball_point, seeded, stratified_point, unit_direction};
use crate::symbols::SymbolMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxyMode {
    /// Image of the closed ball `|z| <= delta`.
    Domain,
    /// Points with `|phi(z)| <= delta`: their images, and the vectors `(1 - |z|^2) Rphi(z)`.
    Range,
    /// Image of the whole ball.
    WholeBall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProxyConfig {
    pub samples: usize,
    /// Cover radii as multiples of `delta`.
    pub eps_factors: Vec<f64>,
    /// The factor at which saturation is judged.
    pub decision_factor: f64,
    /// Largest rate of new cover centers per sample over the second half of
    /// the sample still counted as saturated.
    pub growth_tol: f64,
    pub tail_tol: f64,
    pub min_points: usize,
    pub seed: u64,
}

impl Default for ProxyConfig {
    fn default() -> Self {
        Self {
            samples: 1200,
            eps_factors: vec![0.5, 0.3, 0.1],
            decision_factor: 0.3,
            growth_tol: 0.05,
            tail_tol: 1e-2,
            min_points: 100,
            seed: 0xc0c0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringCount {
    pub eps: f64,
    pub half: usize,
    pub full: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetProxy {
    pub label: String,
    pub points: usize,
    pub coverings: Vec<CoveringCount>,
    /// First coordinate (0-based) of the tail.
    pub tail_index: usize,
    /// `max sum_{k >= tail_index} |v_k|^2` over the sample.
    pub tail_energy: f64,
    /// Same, measured about the sample centroid.
    pub tail_spread: f64,
    pub saturated: bool,
    pub tail_small: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessProxy {
    pub mode: ProxyMode,
    pub delta: f64,
    pub sets: Vec<SetProxy>,
    pub consistent: bool,
    pub warning: Option<String>,
}

/// Size of a greedy ε-cover of `points`, after the first half and after all of them.
pub fn greedy_cover(points: &[Point], eps: f64) -> (usize, usize) {
    let mut centers: Vec<&Point> = Vec::new();
    let half = points.len() / 2;
    let mut at_half = 0;
    for (i, p) in points.iter().enumerate() {
        if i == half {
            at_half = centers.len();
        }
        if !centers.iter().any(|c| c.distance(p) <= eps) {
            centers.push(p);
        }
    }
    if points.len() == half {
        at_half = centers.len();
    }
    (at_half, centers.len())
}

pub fn tail_energy(points: &[Point], from: usize) -> f64 {
    points
        .iter()
        .map(|p| p.coords().iter().skip(from).map(|c| c.norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `max_p sum_{k >= from} |p_k - m_k|^2` with `m` the centroid of `points`.
pub fn tail_spread(points: &[Point], from: usize) -> f64 {
    let Some(first) = points.first() else { return 0.0 };
    let n = first.dim();
    let mut m = vec![num_complex::Complex64::new(0.0, 0.0); n.saturating_sub(from)];
    for p in points {
        for (mk, c) in m.iter_mut().zip(p.coords().iter().skip(from)) {
            *mk += c;
        }
    }
    let inv = 1.0 / points.len() as f64;
    points
        .iter()
        .map(|p| p.coords().iter().skip(from).zip(&m).map(|(c, mk)| (c - mk * inv).norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn set_proxy(label: &str, points: &[Point], delta: f64, cfg: &ProxyConfig) -> SetProxy {
    let n = points.first().map_or(0, Point::dim);
    let coverings: Vec<CoveringCount> = cfg
        .eps_factors
        .par_iter()
        .map(|&f| {
            let eps = f * delta;
            let (half, full) = greedy_cover(points, eps);
            CoveringCount { eps, half, full }
        })
        .collect();
    let decision_eps = cfg.decision_factor * delta;
    let saturated = coverings
        .iter()
        .filter(|c| (c.eps - decision_eps).abs() <= 1e-12 * delta.max(1.0))
        .all(|c| (c.full - c.half) as f64 <= cfg.growth_tol * (points.len() - points.len() / 2) as f64);
    let tail_index = n.div_ceil(2);
    let tail = tail_energy(points, tail_index);
    let spread = tail_spread(points, tail_index);
    SetProxy {
        label: label.to_string(),
        points: points.len(),
        coverings,
        tail_index,
        tail_energy: tail,
        tail_spread: spread,
        saturated,
        tail_small: tail.min(spread) <= cfg.tail_tol,
    }
}

fn sample_domain(phi: &SymbolMap, radius: f64, cfg: &ProxyConfig) -> Vec<Point> {
    let n = phi.dim();
    let mut rng = seeded(cfg.seed);
    let mut zs: Vec<Point> = Vec::with_capacity(cfg.samples);
    for s in phi.seed_directions() {
        if let Some(u) = s.normalized() {
            zs.push(u.scale_real(radius));
            zs.push(u.scale_real(0.5 * radius));
        }
    }
    while zs.len() < cfg.samples {
        if rng.random_bool(0.5) {
            zs.push(ball_point(&mut rng, n, radius));
        } else {
            let t: f64 = rng.random();
            zs.push(unit_direction(&mut rng, n).scale_real(radius * t));
        }
    }
    // interleave so the first half is representative
    shuffle(&mut zs, cfg.seed);
    zs
}

fn sample_whole(phi: &SymbolMap, cfg: &ProxyConfig) -> Vec<Point> {
    let n = phi.dim();
    let mut rng = seeded(cfg.seed ^ 0x77);
    let mut zs: Vec<Point> = Vec::with_capacity(cfg.samples);
    for s in phi.seed_directions() {
        if let Some(u) = s.normalized() {
            for j in [1, 2, 4, 8, 16, 24] {
                zs.push(u.scale_real(1.0 - 0.5f64.powi(j)));
            }
        }
    }
    while zs.len() < cfg.samples {
        zs.push(stratified_point(&mut rng, n, 24));
    }
    shuffle(&mut zs, cfg.seed);
    zs
}

fn shuffle(v: &mut [Point], seed: u64) {
    use rand::seq::SliceRandom;
    v.shuffle(&mut seeded(seed ^ 0x5f));
}

/// Covering and tail proxies for the image sets selected by `mode`.
pub fn compactness_proxy(phi: &SymbolMap, mode: ProxyMode, delta: f64, cfg: &ProxyConfig) -> Result<CompactnessProxy> {
    if mode != ProxyMode::WholeBall && !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter { name: "delta", value: delta, range: "(0, 1)" });
    }
    let delta = if mode == ProxyMode::WholeBall { 1.0 } else { delta };
    let zs = match mode {
        ProxyMode::Domain => sample_domain(phi, delta, cfg),
        ProxyMode::Range | ProxyMode::WholeBall => sample_whole(phi, cfg),
    };
    let evaluated: Vec<(Point, Point)> = zs
        .par_iter()
        .map(|z| {
            let w = phi.eval(z)?;
            let r = if mode == ProxyMode::Range { phi.radial(z)?.scale_real(z.defect()) } else { Point::zeros(0) };
            Ok((w, r))
        })
        .collect::<Result<_>>()?;
    let kept: Vec<&(Point, Point)> = match mode {
        ProxyMode::Range => evaluated.iter().filter(|(w, _)| w.norm() <= delta).collect(),
        _ => evaluated.iter().collect(),
    };
    let images: Vec<Point> = kept.iter().map(|(w, _)| w.clone()).collect();
    let mut sets = vec![set_proxy("phi", &images, delta, cfg)];
    if mode == ProxyMode::Range {
        let radials: Vec<Point> = kept.iter().map(|(_, r)| r.clone()).collect();
        sets.push(set_proxy("radial", &radials, delta, cfg));
    }
    let warning = (kept.len() < cfg.min_points).then(|| {
        format!("only {} of {} samples landed in the selected set", kept.len(), zs.len())
    });
    let consistent = sets.iter().all(|s| s.saturated && s.tail_small);
    Ok(CompactnessProxy { mode, delta, sets, consistent, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{build_symbol, SymbolSpec};

    #[test]
    fn greedy_cover_counts() {
        let pts: Vec<Point> = (0..10).map(|i| Point::from_real(&[0.09 * i as f64]).unwrap()).collect();
        assert_eq!(greedy_cover(&pts, 0.2), (2, 4));
        assert_eq!(greedy_cover(&pts, 1.0), (1, 1));
        assert_eq!(greedy_cover(&[], 1.0), (0, 0));
    }

    #[test]
    fn identity_is_flagged() {
        let id = build_symbol(&SymbolSpec::Identity, 16).unwrap();
        let p = compactness_proxy(&id, ProxyMode::Domain, 0.5, &ProxyConfig::default()).unwrap();
        assert!(!p.consistent);
        let c = p.sets[0].coverings.iter().find(|c| (c.eps - 0.15).abs() < 1e-12).unwrap();
        assert!(c.full as f64 > 1.5 * c.half as f64);
    }

    #[test]
    fn product_family_saturates() {
        let p = build_symbol(&SymbolSpec::ProductCom1, 16).unwrap();
        let whole = compactness_proxy(&p, ProxyMode::WholeBall, 1.0, &ProxyConfig::default()).unwrap();
        assert!(whole.consistent, "{whole:?}");
        let r = compactness_proxy(&p, ProxyMode::Range, 0.5, &ProxyConfig::default()).unwrap();
        assert!(r.consistent, "{r:?}");
    }

    #[test]
    fn rejects_bad_delta() {
        let id = build_symbol(&SymbolSpec::Identity, 2).unwrap();
        assert!(compactness_proxy(&id, ProxyMode::Domain, 1.0, &ProxyConfig::default()).is_err());
    }
}
