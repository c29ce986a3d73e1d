//! Deterministic, seed-split random sampling.
//!
//! Work is cut into fixed-size shards; shard `i` draws from a ChaCha stream
//! selected by `(seed, i)`, so results do not depend on how rayon schedules
//! the shards.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::scalar::Real;

pub type SampleRng = ChaCha8Rng;

pub const SHARD_SIZE: usize = 2048;

pub fn shard_rng(seed: u64, shard: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Runs `work(rng, count)` over `total` samples split into shards and returns
/// the per-shard results in shard order.
pub fn sharded<A, F>(total: usize, seed: u64, work: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut SampleRng, usize) -> A + Sync,
{
    let shards = total.div_ceil(SHARD_SIZE);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let count = SHARD_SIZE.min(total - s * SHARD_SIZE);
            let mut rng = shard_rng(seed, s as u64);
            work(&mut rng, count)
        })
        .collect()
}

pub fn uniform<T: Real>(rng: &mut SampleRng, lo: T, hi: T) -> T {
    let u: f64 = rng.gen();
    lo + (hi - lo) * T::lit(u)
}

/// Standard normal deviate (Box–Muller).
pub fn normal<T: Real>(rng: &mut SampleRng) -> T {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    T::lit((-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos())
}

pub fn unit_direction<T: Real>(rng: &mut SampleRng, dim: usize) -> Vec<T> {
    loop {
        let v: Vec<T> = (0..dim).map(|_| normal(rng)).collect();
        let n = crate::linalg::norm(&v);
        if n > T::lit(1e-12) {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point in the Euclidean ball of the given radius.
pub fn in_ball<T: Real>(rng: &mut SampleRng, dim: usize, radius: T) -> Vec<T> {
    let dir = unit_direction::<T>(rng, dim);
    let u: f64 = rng.gen();
    let r = radius * T::lit(u.powf(1.0 / dim as f64));
    dir.into_iter().map(|x| x * r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharding_is_deterministic_and_covers_total() {
        let a = sharded(5000, 7, |rng, n| (0..n).map(|_| uniform::<f64>(rng, 0.0, 1.0)).sum::<f64>());
        let b = sharded(5000, 7, |rng, n| (0..n).map(|_| uniform::<f64>(rng, 0.0, 1.0)).sum::<f64>());
        assert_eq!(a, b);
        let counts = sharded(5000, 7, |_, n| n);
        assert_eq!(counts.iter().sum::<usize>(), 5000);
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = shard_rng(1, 0);
        for _ in 0..1000 {
            let p = in_ball::<f64>(&mut rng, 3, 2.0);
            assert!(crate::linalg::norm(&p) <= 2.0);
        }
    }
}
