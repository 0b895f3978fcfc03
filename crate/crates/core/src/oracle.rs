//! Exhaustive search over every interval tiling, core type and core count.
//! Only meant for small instances; it is the reference the DP is checked
//! against.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CoreType, CoreUsage, Platform, Solution, SolutionDoc, Stage, TaskChain};
use crate::weight::{rational_to_f64, Rational, Weight};

/// Direction in which stages are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Order {
    /// First stage first.
    #[default]
    Forward,
    /// Last stage first.
    Reverse,
}

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub max_tasks: usize,
    pub max_cores: usize,
    /// Witnesses kept in the result; all optimal assignments still count
    /// towards the usage minima.
    pub max_witnesses: usize,
    pub order: Order,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_tasks: 12,
            max_cores: 6,
            max_witnesses: 16,
            order: Order::Forward,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub min_period: Rational,
    pub witnesses: Vec<Solution>,
    /// Number of optimal stage assignments found.
    pub witness_count: u64,
    pub min_big_used: usize,
    pub min_total_used: usize,
}

#[derive(Serialize)]
struct OracleDoc {
    min_period: f64,
    min_period_exact: String,
    witness_count: u64,
    min_big_used: usize,
    min_total_used: usize,
    witnesses: Vec<SolutionDoc>,
}

impl Serialize for OracleResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OracleDoc {
            min_period: rational_to_f64(&self.min_period),
            min_period_exact: self.min_period.to_string(),
            witness_count: self.witness_count,
            min_big_used: self.min_big_used,
            min_total_used: self.min_total_used,
            witnesses: self.witnesses.iter().cloned().map(SolutionDoc::from).collect(),
        }
        .serialize(s)
    }
}

/// Best-so-far state of one search branch.
#[derive(Clone, Debug)]
struct Best {
    period: Weight,
    witnesses: Vec<Vec<Stage>>,
    count: u64,
    min_big: usize,
    min_total: usize,
    cap: usize,
}

impl Best {
    fn new(cap: usize) -> Best {
        Best {
            period: Weight::INFINITY,
            witnesses: Vec::new(),
            count: 0,
            min_big: usize::MAX,
            min_total: usize::MAX,
            cap,
        }
    }

    fn offer(&mut self, period: Weight, stages: &[Stage]) {
        if period > self.period {
            return;
        }
        if period < self.period {
            *self = Best::new(self.cap);
            self.period = period;
        }
        let used = CoreUsage::of(stages);
        self.count += 1;
        self.min_big = self.min_big.min(used.big);
        self.min_total = self.min_total.min(used.total());
        if self.witnesses.len() < self.cap {
            let mut w = stages.to_vec();
            w.sort_by_key(|s| s.first);
            self.witnesses.push(w);
        }
    }

    fn merge(mut self, other: Best) -> Best {
        if other.period < self.period {
            return other;
        }
        if other.period == self.period && !other.period.is_infinite() {
            self.count += other.count;
            self.min_big = self.min_big.min(other.min_big);
            self.min_total = self.min_total.min(other.min_total);
            let room = self.cap - self.witnesses.len().min(self.cap);
            self.witnesses.extend(other.witnesses.into_iter().take(room));
        }
        self
    }
}

struct Search<'a> {
    chain: &'a TaskChain,
    order: Order,
}

impl Search<'_> {
    /// Candidate stages adjacent to the unassigned region `[lo, hi]`.
    fn options(&self, lo: usize, hi: usize, big: usize, little: usize) -> Vec<Stage> {
        let mut out = Vec::new();
        for k in lo..=hi {
            let (first, last) = match self.order {
                Order::Forward => (lo, k),
                Order::Reverse => (hi + lo - k, hi),
            };
            let rep = self.chain.is_rep(first, last);
            for core_type in CoreType::ALL {
                let budget = match core_type {
                    CoreType::Big => big,
                    CoreType::Little => little,
                };
                let max_u = if rep { budget } else { budget.min(1) };
                for u in 1..=max_u {
                    out.push(Stage::new(first, last, u, core_type));
                }
            }
        }
        out
    }

    fn step(&self, stage: Stage, lo: usize, hi: usize) -> (usize, usize) {
        match self.order {
            Order::Forward => (stage.last + 1, hi),
            Order::Reverse => (lo, stage.first - 1),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        lo: usize,
        hi: usize,
        big: usize,
        little: usize,
        partial: Weight,
        stack: &mut Vec<Stage>,
        best: &mut Best,
    ) {
        if lo > hi {
            best.offer(partial, stack);
            return;
        }
        for stage in self.options(lo, hi, big, little) {
            let w = partial.max(stage.weight(self.chain));
            // Strict, so every optimal assignment is still reached.
            if w > best.period {
                continue;
            }
            let (b, l) = match stage.core_type {
                CoreType::Big => (big - stage.cores, little),
                CoreType::Little => (big, little - stage.cores),
            };
            let (nlo, nhi) = self.step(stage, lo, hi);
            stack.push(stage);
            self.dfs(nlo, nhi, b, l, w, stack, best);
            stack.pop();
        }
    }
}

pub fn brute_force(chain: &TaskChain, platform: &Platform) -> Result<OracleResult> {
    brute_force_with(chain, platform, &OracleConfig::default())
}

pub fn brute_force_with(chain: &TaskChain, platform: &Platform, config: &OracleConfig) -> Result<OracleResult> {
    if chain.len() > config.max_tasks || platform.total() > config.max_cores {
        return Err(Error::TooLarge(format!(
            "{} tasks on {} cores; limits are {} tasks and {} cores",
            chain.len(),
            platform.total(),
            config.max_tasks,
            config.max_cores
        )));
    }
    let search = Search {
        chain,
        order: config.order,
    };
    let n = chain.len();
    let first = search.options(1, n, platform.big, platform.little);
    // Branches are independent; each keeps its own bound, and the merge
    // keeps the exact minimum with its usage statistics.
    let best = first
        .into_par_iter()
        .map(|stage| {
            let mut best = Best::new(config.max_witnesses);
            let (b, l) = match stage.core_type {
                CoreType::Big => (platform.big - stage.cores, platform.little),
                CoreType::Little => (platform.big, platform.little - stage.cores),
            };
            let (lo, hi) = search.step(stage, 1, n);
            let mut stack = vec![stage];
            search.dfs(lo, hi, b, l, stage.weight(chain), &mut stack, &mut best);
            best
        })
        .reduce(|| Best::new(config.max_witnesses), Best::merge);

    let min_period = best
        .period
        .to_rational()
        .ok_or_else(|| Error::Infeasible("no core available".into()))?;
    let witnesses = best
        .witnesses
        .into_iter()
        .map(|stages| Solution::new(chain, stages))
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleResult {
        min_period,
        witnesses,
        witness_count: best.count,
        min_big_used: best.min_big,
        min_total_used: best.min_total,
    })
}
