//! Seeded sampling helpers and a sharded Monte Carlo mean estimator.
//!
//! A run of `samples` draws is split into [`SHARDS`] fixed shards. Shard `s`
//! uses a ChaCha8 generator seeded from the master seed on stream `s`, so the
//! result depends only on `(seed, samples)` and never on the thread count.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::corelin::StateVec;

pub const SHARDS: usize = 32;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for shard `stream` of the master `seed`.
pub fn shard_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Haar-random pure state: i.i.d. standard complex Gaussian amplitudes,
/// normalized.
pub fn haar_state(rng: &mut Rng, dim: usize) -> StateVec {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        if let Some(v) = StateVec::new(amps).normalized() {
            return v;
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Self { n, mean, m2 }
    }
}

/// Estimates `E[f(rng)]` from `samples` draws.
pub fn estimate<F>(samples: usize, seed: u64, f: F) -> McEstimate
where
    F: Fn(&mut Rng) -> f64 + Sync,
{
    let per_shard = |s: usize| samples / SHARDS + usize::from(s < samples % SHARDS);
    let shards: Vec<Moments> = (0..SHARDS)
        .into_par_iter()
        .map(|s| {
            let mut rng = shard_rng(seed, s as u64);
            let mut m = Moments::default();
            for _ in 0..per_shard(s) {
                m.push(f(&mut rng));
            }
            m
        })
        .collect();
    // fixed pairwise reduction order
    let mut level = shards;
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|p| if p.len() == 2 { p[0].merge(p[1]) } else { p[0] })
            .collect();
    }
    let m = level[0];
    let var = if m.n > 1 { m.m2 / (m.n - 1) as f64 } else { 0.0 };
    McEstimate {
        mean: m.mean,
        stderr: (var / m.n.max(1) as f64).sqrt(),
        samples: m.n,
    }
}
