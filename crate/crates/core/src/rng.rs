//! Deterministic stream splitting for reproducible simulation.
//!
//! Every random draw comes from a ChaCha8 stream whose seed is derived
//! from a root seed plus a short counter path (domain tag, chip index,
//! measurement index, ...). Splitting is stateless, so any substream
//! can be rebuilt in isolation and chips or measurements can run in any
//! order with identical results.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Domain tags keep unrelated substreams apart even for equal indices.
pub const DOMAIN_POPULATION: u64 = 0x504f_5055;
pub const DOMAIN_MEASUREMENT: u64 = 0x4d45_4153;

/// SplitMix64 mixing step (Vigna). Used only to fold counter paths into
/// substream seeds, never as the draw stream itself.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the substream identified by `root` and `path`.
pub fn substream_seed(root: u64, path: &[u64]) -> u64 {
    let mut s = splitmix64(root);
    for &c in path {
        s = splitmix64(s ^ c);
    }
    s
}

/// Substream identified by `root` and `path`.
pub fn substream(root: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(root, path))
}

/// One draw from Normal(mean, sigma). `sigma` must be non-negative and
/// finite (validated upstream); `sigma == 0` returns `mean` exactly.
pub fn draw_normal<R: Rng>(rng: &mut R, mean: f64, sigma: f64) -> f64 {
    Normal::new(mean, sigma)
        .expect("sigma validated non-negative")
        .sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngExt;

    #[test]
    fn substreams_are_reproducible() {
        let mut a = substream(42, &[DOMAIN_POPULATION, 3]);
        let mut b = substream(42, &[DOMAIN_POPULATION, 3]);
        let xs: Vec<u64> = (0..8).map(|_| a.random()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.random()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn paths_separate_streams() {
        let mut a = substream(42, &[DOMAIN_POPULATION, 3]);
        let mut b = substream(42, &[DOMAIN_POPULATION, 4]);
        let mut c = substream(42, &[DOMAIN_MEASUREMENT, 3]);
        let x: u64 = a.random();
        assert_ne!(x, b.random());
        assert_ne!(x, c.random());
    }

    #[test]
    fn zero_sigma_is_exact() {
        let mut rng = substream(7, &[1]);
        for _ in 0..16 {
            assert_eq!(draw_normal(&mut rng, 2.5, 0.0), 2.5);
        }
    }

    #[test]
    fn normal_spread_tracks_sigma() {
        let mut rng = substream(11, &[2]);
        let n = 100_000;
        let sigma = 0.01;
        let draws: Vec<f64> = (0..n).map(|_| draw_normal(&mut rng, 0.0, sigma)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        assert!((sd - sigma).abs() < 0.05 * sigma, "sample sd {sd}");
    }
}
