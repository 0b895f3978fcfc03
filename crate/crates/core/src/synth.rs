//! Seeded random chains.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
//! Draws happen in this order:
//!
//! 1. for each task `1..=n`: `w_big` uniform integer in `weight_range`, then
//!    a slowdown uniform real in `slowdown_range`; `w_little = ceil(w_big * slowdown)`;
//! 2. `round(n * stateless_ratio)` replicable positions, sampled without
//!    replacement with `rand::seq::index::sample`.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::model::{Task, TaskChain};
use crate::weight::Rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n_tasks: usize,
    pub stateless_ratio: f64,
    #[serde(default = "default_weights")]
    pub weight_range: (u32, u32),
    #[serde(default = "default_slowdown")]
    pub slowdown_range: (f64, f64),
    pub seed: u64,
}

fn default_weights() -> (u32, u32) {
    (1, 100)
}

fn default_slowdown() -> (f64, f64) {
    (1.0, 5.0)
}

impl GenSpec {
    pub fn new(n_tasks: usize, stateless_ratio: f64, seed: u64) -> GenSpec {
        GenSpec {
            n_tasks,
            stateless_ratio,
            weight_range: default_weights(),
            slowdown_range: default_slowdown(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (wl, wh) = self.weight_range;
        let (sl, sh) = self.slowdown_range;
        if self.n_tasks == 0 {
            return input("a chain needs at least one task");
        }
        if !(0.0..=1.0).contains(&self.stateless_ratio) {
            return input(format!("stateless ratio {} is outside [0, 1]", self.stateless_ratio));
        }
        if wl == 0 || wl > wh {
            return input(format!("bad weight range [{wl}, {wh}]"));
        }
        if !(sl.is_finite() && sh.is_finite() && 1.0 <= sl && sl <= sh) {
            return input(format!("bad slowdown range [{sl}, {sh}]"));
        }
        Ok(())
    }

    pub fn replicable_count(&self) -> usize {
        (self.n_tasks as f64 * self.stateless_ratio).round() as usize
    }
}

pub fn generate(spec: &GenSpec) -> Result<TaskChain> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weights = Uniform::new_inclusive(spec.weight_range.0, spec.weight_range.1);
    let (sl, sh) = spec.slowdown_range;
    let mut tasks: Vec<Task> = (1..=spec.n_tasks)
        .map(|id| {
            let wb = weights.sample(&mut rng);
            let slowdown = if sl == sh {
                sl
            } else {
                Uniform::new(sl, sh).sample(&mut rng)
            };
            let wl = (f64::from(wb) * slowdown).ceil();
            Task {
                id,
                weight_big: Rational::from_integer(i128::from(wb)),
                weight_little: Rational::from_integer(wl as i128),
                replicable: false,
            }
        })
        .collect();
    for i in rand::seq::index::sample(&mut rng, spec.n_tasks, spec.replicable_count()) {
        tasks[i].replicable = true;
    }
    let name = format!("synth-n{}-sr{}-s{}", spec.n_tasks, spec.stateless_ratio, spec.seed);
    TaskChain::new(name, tasks)
}

/// Seeds of a corpus, one generated chain per entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub generator: String,
    pub specs: Vec<GenSpec>,
}

impl CorpusManifest {
    /// `count` chains of `n_tasks` tasks at one ratio, seeds `base_seed..`.
    pub fn uniform(count: usize, n_tasks: usize, stateless_ratio: f64, base_seed: u64) -> CorpusManifest {
        CorpusManifest {
            generator: "chacha8".into(),
            specs: (0..count as u64)
                .map(|i| GenSpec::new(n_tasks, stateless_ratio, base_seed + i))
                .collect(),
        }
    }

    pub fn generate(&self) -> Result<Vec<TaskChain>> {
        self.specs.iter().map(generate).collect()
    }
}
