//! Random block samplers.
//!
//! Both schemes include every block with marginal probability `tau / N`. The
//! generator is ChaCha8 seeded from a `u64`, which gives the same draw
//! sequence on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingScheme {
    /// Uniform over all `tau`-subsets.
    #[default]
    TauNice,
    /// Cycle through a random partition of the blocks into `N / tau` cells,
    /// reshuffled every epoch. Requires `tau | N`.
    PartitionShuffle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub scheme: SamplingScheme,
    pub tau: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn tau_nice(tau: usize, seed: u64) -> Self {
        Self {
            scheme: SamplingScheme::TauNice,
            tau,
            seed,
        }
    }

    pub fn validate(&self, num_blocks: usize) -> Result<()> {
        if self.tau == 0 || self.tau > num_blocks {
            return Err(Error::input(format!(
                "tau must lie in [1, {num_blocks}], got {}",
                self.tau
            )));
        }
        if self.scheme == SamplingScheme::PartitionShuffle && !num_blocks.is_multiple_of(self.tau) {
            return Err(Error::input(format!(
                "partition shuffle needs tau ({}) to divide N ({num_blocks})",
                self.tau
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Sampler {
    config: SamplerConfig,
    perm: Vec<usize>,
    rng: ChaCha8Rng,
    /// Next cell of the current epoch (partition shuffle only).
    cell: usize,
}

impl Sampler {
    pub fn new(config: SamplerConfig, num_blocks: usize) -> Result<Self> {
        config.validate(num_blocks)?;
        Ok(Self {
            config,
            perm: (0..num_blocks).collect(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            cell: num_blocks / config.tau,
        })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn tau(&self) -> usize {
        self.config.tau
    }

    pub fn num_blocks(&self) -> usize {
        self.perm.len()
    }

    /// Draw the next sorted index set into `out`.
    pub fn draw_into(&mut self, out: &mut Vec<usize>) {
        let n = self.perm.len();
        let tau = self.config.tau;
        out.clear();
        if tau == n {
            out.extend(0..n);
            return;
        }
        match self.config.scheme {
            SamplingScheme::TauNice => {
                // partial Fisher-Yates on the persistent permutation
                for k in 0..tau {
                    let j = self.rng.random_range(k..n);
                    self.perm.swap(k, j);
                }
                out.extend_from_slice(&self.perm[..tau]);
            }
            SamplingScheme::PartitionShuffle => {
                if self.cell * tau >= n {
                    self.perm.shuffle(&mut self.rng);
                    self.cell = 0;
                }
                out.extend_from_slice(&self.perm[self.cell * tau..(self.cell + 1) * tau]);
                self.cell += 1;
            }
        }
        out.sort_unstable();
    }

    pub fn draw(&mut self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.config.tau);
        self.draw_into(&mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn full_sampling_is_everything() {
        let mut s = Sampler::new(SamplerConfig::tau_nice(5, 1), 5).unwrap();
        for _ in 0..10 {
            assert_eq!(s.draw(), vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn draws_are_sorted_unique() {
        let mut s = Sampler::new(SamplerConfig::tau_nice(7, 9), 20).unwrap();
        for _ in 0..100 {
            let d = s.draw();
            assert_eq!(d.len(), 7);
            assert!(d.windows(2).all(|w| w[0] < w[1]));
            assert!(d.iter().all(|&i| i < 20));
        }
    }

    #[test]
    fn pairs_are_uniform() {
        let mut s = Sampler::new(SamplerConfig::tau_nice(2, 42), 4).unwrap();
        let draws = 100_000;
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..draws {
            *counts.entry(s.draw()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let p = 1.0 / 6.0;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts.values() {
            assert!((*c as f64 - draws as f64 * p).abs() <= 3.0 * sd);
        }
    }

    #[test]
    fn partition_shuffle_covers_each_epoch() {
        let mut s = Sampler::new(
            SamplerConfig {
                scheme: SamplingScheme::PartitionShuffle,
                tau: 3,
                seed: 5,
            },
            9,
        )
        .unwrap();
        for _ in 0..20 {
            let mut seen: Vec<usize> = (0..3).flat_map(|_| s.draw()).collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..9).collect::<Vec<_>>());
        }
    }

    #[test]
    fn config_validation() {
        assert!(Sampler::new(SamplerConfig::tau_nice(0, 1), 4).is_err());
        assert!(Sampler::new(SamplerConfig::tau_nice(5, 1), 4).is_err());
        let bad = SamplerConfig {
            scheme: SamplingScheme::PartitionShuffle,
            tau: 3,
            seed: 0,
        };
        assert!(Sampler::new(bad, 4).is_err());
    }

    #[test]
    fn same_seed_same_sequence() {
        let mut a = Sampler::new(SamplerConfig::tau_nice(3, 77), 10).unwrap();
        let mut b = Sampler::new(SamplerConfig::tau_nice(3, 77), 10).unwrap();
        for _ in 0..1000 {
            assert_eq!(a.draw(), b.draw());
        }
    }
}
