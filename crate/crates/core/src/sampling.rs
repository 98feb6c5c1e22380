//! Seeded sampling of points and directions in the ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::point::{Point, C64};

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed unit vector in `C^n` (normalized complex Gaussian).
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Point {
    loop {
        let coords: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Some(u) = Point::from_vec_unchecked(coords).normalized() {
            return u;
        }
    }
}

/// Unit vector supported on at most `k` random coordinates.
pub fn sparse_direction<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Point {
    let mut coords = vec![C64::new(0.0, 0.0); n];
    for _ in 0..k.max(1) {
        let i = rng.random_range(0..n);
        coords[i] = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    Point::from_vec_unchecked(coords)
        .normalized()
        .unwrap_or_else(|| Point::basis(n, 0))
}

/// Uniform point of the ball of radius `r_max` (volume measure).
pub fn ball_point<R: Rng + ?Sized>(rng: &mut R, n: usize, r_max: f64) -> Point {
    let u: f64 = rng.random();
    let r = r_max * u.powf(1.0 / (2.0 * n as f64));
    unit_direction(rng, n).scale_real(r)
}

/// Point whose radius is drawn from a mixture that puts substantial mass near
/// the boundary: half uniform in `[0, r_max)`, half with defect `1 - r` log-uniform
/// down to `2^-max_depth`.
pub fn stratified_point<R: Rng + ?Sized>(rng: &mut R, n: usize, max_depth: u32) -> Point {
    let dir = if rng.random_bool(0.25) {
        sparse_direction(rng, n, 2)
    } else {
        unit_direction(rng, n)
    };
    dir.scale_real(stratified_radius(rng, max_depth))
}

pub fn stratified_radius<R: Rng + ?Sized>(rng: &mut R, max_depth: u32) -> f64 {
    if rng.random_bool(0.5) {
        rng.random::<f64>() * 0.99
    } else {
        let t: f64 = rng.random::<f64>() * max_depth as f64;
        1.0 - (-t * std::f64::consts::LN_2).exp()
    }
}

/// The radius schedule `1 - 2^-j`, `j = 0..=depth`.
pub fn radius_schedule(depth: u32) -> Vec<f64> {
    (0..=depth).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect()
}

/// Bin edges `[1 - 2^-j, 1 - 2^-(j+1))` for `j = 0..bins`.
pub fn boundary_bins(bins: u32) -> Vec<(f64, f64)> {
    (0..bins)
        .map(|j| (1.0 - 0.5f64.powi(j as i32), 1.0 - 0.5f64.powi(j as i32 + 1)))
        .collect()
}

/// Index of the boundary bin containing `r`, if any.
pub fn bin_index(r: f64, bins: u32) -> Option<usize> {
    if !(0.0..1.0).contains(&r) {
        return None;
    }
    let j = (-(1.0 - r).log2()).floor();
    (j >= 0.0 && j < bins as f64).then_some(j as usize)
}

/// Random radius inside bin `j`, log-uniform in the defect `1 - r`.
pub fn radius_in_bin<R: Rng + ?Sized>(rng: &mut R, j: usize) -> f64 {
    let t = j as f64 + rng.random::<f64>();
    (1.0 - (-t * std::f64::consts::LN_2).exp()).min(1.0 - 0.5f64.powi(j as i32 + 1) * (1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        let mut rng = seeded(7);
        for n in [1, 4, 16] {
            for _ in 0..20 {
                assert!((unit_direction(&mut rng, n).norm() - 1.0).abs() < 1e-14);
                assert!((sparse_direction(&mut rng, n, 2).norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bins_partition_radii() {
        assert_eq!(bin_index(0.0, 5), Some(0));
        assert_eq!(bin_index(0.49, 5), Some(0));
        assert_eq!(bin_index(0.5, 5), Some(1));
        assert_eq!(bin_index(0.76, 5), Some(2));
        assert_eq!(bin_index(0.99, 5), None);
        let mut rng = seeded(1);
        for j in 0..20 {
            let r = radius_in_bin(&mut rng, j);
            assert_eq!(bin_index(r, 40), Some(j), "r = {r}");
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = unit_direction(&mut seeded(3), 5);
        let b = unit_direction(&mut seeded(3), 5);
        assert_eq!(a, b);
    }
}
