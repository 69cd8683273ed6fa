//! Seeded, sharded Monte Carlo means. Shard `k` draws from the ChaCha8
//! stream `k` of the root seed, so results do not depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per shard.
pub const SHARD_SIZE: usize = 4096;

pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Root seed for case `case` of a battery run under root seed `seed`:
/// one SplitMix64 step of `seed + case · γ`, `γ` the 64-bit golden ratio.
pub fn case_seed(seed: u64, case: u64) -> u64 {
    let mut z = seed.wrapping_add(case.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sample mean with its standard error `sqrt(s²/n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloStats {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Mean of `f` over `samples` draws; shards run in parallel and are reduced
/// in shard order.
pub fn monte_carlo_mean<E, F>(samples: usize, seed: u64, f: F) -> Result<MonteCarloStats, E>
where
    E: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<f64, E> + Sync,
{
    let shards = samples.div_ceil(SHARD_SIZE);
    let partial: Vec<Result<(f64, f64), E>> = (0..shards)
        .into_par_iter()
        .map(|k| {
            let n = SHARD_SIZE.min(samples - k * SHARD_SIZE);
            let mut rng = shard_rng(seed, k as u64);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let x = f(&mut rng)?;
                s += x;
                s2 += x * x;
            }
            Ok((s, s2))
        })
        .collect();
    let (mut s, mut s2) = (0.0, 0.0);
    for p in partial {
        let (a, b) = p?;
        s += a;
        s2 += b;
    }
    if samples == 0 {
        return Ok(MonteCarloStats {
            mean: f64::NAN,
            std_error: f64::INFINITY,
            samples: 0,
        });
    }
    let n = samples as f64;
    let mean = s / n;
    let var = if samples > 1 {
        ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloStats {
        mean,
        std_error: (var / n).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::convert::Infallible;

    #[test]
    fn same_seed_same_result_across_pools() {
        let run =
            || monte_carlo_mean::<Infallible, _>(20_000, 42, |r| Ok(r.random::<f64>())).unwrap();
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(run);
        assert_eq!(a, b);
        assert!((a.mean - 0.5).abs() < 4.0 * a.std_error);
        // uniform variance 1/12
        assert!((a.std_error - (1.0f64 / 12.0 / 20_000.0).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn shards_use_distinct_streams() {
        let x: u64 = shard_rng(1, 0).random();
        let y: u64 = shard_rng(1, 1).random();
        assert_ne!(x, y);
    }

    #[test]
    fn case_seeds_differ() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|k| case_seed(7, k)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(case_seed(7, 0), case_seed(8, 0));
    }

    #[test]
    fn errors_propagate() {
        let r = monte_carlo_mean(10, 0, |_| Err::<f64, _>("boom"));
        assert_eq!(r, Err("boom"));
    }
}
