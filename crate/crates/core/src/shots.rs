//! Seeded, worker-count-independent shot sampling.
//!
//! Shots are cut into fixed-size blocks. Block `b` of sampling domain `d`
//! draws from its own ChaCha8 stream keyed by `(seed, d)` with stream id `b`,
//! so the random numbers a shot sees depend only on its position, never on
//! which worker ran it. Per-block partial results are combined in block
//! order, which makes floating-point reductions reproducible as well.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Shots per substream block.
pub const BLOCK_SHOTS: u64 = 1 << 14;

const DOMAIN_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ShotContext {
    pub seed: u64,
    pub workers: usize,
}

impl ShotContext {
    pub fn new(seed: u64, workers: usize) -> Self {
        ShotContext {
            seed,
            workers: workers.max(1),
        }
    }

    /// Independent stream for `(domain, block)`.
    pub fn substream(&self, domain: u64, block: u64) -> ChaCha8Rng {
        substream(self.seed, domain, block)
    }

    /// Runs `shots` shots of `domain` in blocks and returns per-block results
    /// in block order. `f` receives the block's rng and its shot count.
    pub fn run_blocks<T, F>(&self, domain: u64, shots: u64, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, u64) -> T + Sync + Send,
    {
        let blocks = shots.div_ceil(BLOCK_SHOTS);
        let job = |b: u64| {
            let n = (shots - b * BLOCK_SHOTS).min(BLOCK_SHOTS);
            let mut rng = self.substream(domain, b);
            f(&mut rng, n)
        };
        if self.workers <= 1 || blocks <= 1 {
            return Ok((0..blocks).map(job).collect());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Workers(e.to_string()))?;
        Ok(pool.install(|| (0..blocks).into_par_iter().map(job).collect()))
    }

    /// Convenience for estimators whose block result is a vector of counts.
    pub fn count<const K: usize, F>(&self, domain: u64, shots: u64, f: F) -> Result<[u64; K]>
    where
        F: Fn(&mut ChaCha8Rng, u64) -> [u64; K] + Sync + Send,
    {
        let parts = self.run_blocks(domain, shots, f)?;
        let mut total = [0u64; K];
        for part in parts {
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        Ok(total)
    }
}

pub fn substream(seed: u64, domain: u64, block: u64) -> ChaCha8Rng {
    let key = seed ^ domain.wrapping_add(1).wrapping_mul(DOMAIN_MIX);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(block);
    rng
}

/// Draws an index from a discrete distribution given its cumulative sums.
pub fn sample_cdf(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().expect("empty distribution");
    let target = u * total;
    cdf.iter()
        .position(|&c| target < c)
        .unwrap_or(cdf.len() - 1)
}

pub fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}
