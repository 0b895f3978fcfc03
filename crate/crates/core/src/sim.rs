//! Steady-state pipeline simulation with exact times.
//!
//! Replica `k` of an `r`-replica stage handles streams `s ≡ k (mod r)` in
//! order. Link `i` (stage `i` to stage `i + 1`) has `B_i` one-stream slots;
//! stream `s` uses slot `s mod B_i`. A replica starts a stream once the
//! stream's input is in its slot, its previous stream is done, and its output
//! slot has been released, which happens when the consumer of the slot's
//! previous stream (`s - B_i`) starts. Every replica therefore follows a fixed
//! stream sequence, so the event times satisfy
//!
//! ```text
//! start[i][s] = max(done[i-1][s], done[i][s-r_i], start[i+1][s-B_i])
//! done[i][s]  = start[i][s] + d_i
//! ```
//!
//! and are computed stream by stream, stage by stage.

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::model::{is_resource_valid, Platform, Solution, Stage, TaskChain};
use crate::weight::{rational_to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub streams: usize,
    pub warmup_streams: usize,
    /// One entry per link; `None` uses [`buffer_plan`].
    pub buffers_per_link: Option<Vec<usize>>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            streams: 500,
            warmup_streams: 100,
            buffers_per_link: None,
        }
    }
}

/// Buffer usage of one link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    pub buffers: usize,
    pub producers: usize,
    pub consumers: usize,
    /// Largest number of producer replicas writing to one slot.
    pub writers_per_slot: usize,
    /// Largest number of consumer replicas reading from one slot.
    pub readers_per_slot: usize,
}

impl LinkReport {
    /// True when replicas of the same stage compete for a slot.
    pub fn contended(&self) -> bool {
        self.writers_per_slot > 1 || self.readers_per_slot > 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub measured_period: Rational,
    pub completion_order: Vec<usize>,
    pub per_stage_busy: Vec<f64>,
    pub makespan: Rational,
    pub links: Vec<LinkReport>,
}

#[derive(Serialize)]
struct SimReportDoc<'a> {
    measured_period: f64,
    measured_period_exact: String,
    makespan: f64,
    completion_order_is_identity: bool,
    completion_order: &'a [usize],
    per_stage_busy: &'a [f64],
    links: &'a [LinkReport],
}

impl Serialize for SimReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SimReportDoc {
            measured_period: rational_to_f64(&self.measured_period),
            measured_period_exact: self.measured_period.to_string(),
            makespan: rational_to_f64(&self.makespan),
            completion_order_is_identity: self.order_preserved(),
            completion_order: &self.completion_order,
            per_stage_busy: &self.per_stage_busy,
            links: &self.links,
        }
        .serialize(s)
    }
}

impl SimReport {
    pub fn order_preserved(&self) -> bool {
        self.completion_order.iter().enumerate().all(|(i, &s)| i == s)
    }
}

/// `lcm(r_i, r_{i+1})` slots for each pair of consecutive stages.
pub fn buffer_plan(stages: &[Stage]) -> Vec<usize> {
    stages.windows(2).map(|w| w[0].cores.lcm(&w[1].cores)).collect()
}

pub fn simulate(chain: &TaskChain, solution: &Solution, platform: &Platform, config: &SimConfig) -> Result<SimReport> {
    if !is_resource_valid(solution.stages(), platform) {
        return input(format!("solution {solution} does not fit platform {platform}"));
    }
    simulate_stages(chain, solution.stages(), config)
}

/// Runs the simulation without a platform check.
pub fn simulate_stages(chain: &TaskChain, stages: &[Stage], config: &SimConfig) -> Result<SimReport> {
    let n = config.streams;
    if n == 0 || config.warmup_streams >= n {
        return input(format!(
            "need streams > warmup_streams, got {} and {}",
            n, config.warmup_streams
        ));
    }
    if stages.is_empty() || stages.iter().any(|s| s.cores == 0) {
        return input("every stage needs at least one replica");
    }
    let buffers = match &config.buffers_per_link {
        Some(b) if b.len() != stages.len() - 1 => {
            return input(format!(
                "expected {} link buffer counts, got {}",
                stages.len() - 1,
                b.len()
            ));
        }
        Some(b) => b.clone(),
        None => buffer_plan(stages),
    };
    if let Some(link) = buffers.iter().position(|&b| b == 0) {
        return Err(Error::Deadlock {
            link,
            from: link + 1,
            to: link + 2,
            stream: 0,
        });
    }

    let m = stages.len();
    let dur: Vec<Rational> = stages
        .iter()
        .map(|s| chain.interval_sum(s.first, s.last, s.core_type))
        .collect();
    let mut start = vec![vec![Rational::zero(); n]; m];
    let mut done = vec![vec![Rational::zero(); n]; m];

    for s in 0..n {
        for i in 0..m {
            let mut t = Rational::zero();
            if i > 0 {
                t = t.max(done[i - 1][s]);
            }
            let r = stages[i].cores;
            if s >= r {
                t = t.max(done[i][s - r]);
            }
            if i + 1 < m && s >= buffers[i] {
                // Stream s - B_i has been consumed by the time stage i + 1
                // started it, so that is an earlier stream of the outer loop.
                t = t.max(start[i + 1][s - buffers[i]]);
            }
            start[i][s] = t;
            done[i][s] = t + dur[i];
        }
    }

    let sink = &done[m - 1];
    let mut completion_order: Vec<usize> = (0..n).collect();
    // Same-time completions leave in stream order.
    completion_order.sort_by(|&a, &b| sink[a].cmp(&sink[b]).then(a.cmp(&b)));

    let w = config.warmup_streams;
    let t_last = sink[n - 1];
    let t_warm = if w == 0 { Rational::zero() } else { sink[w - 1] };
    let measured_period = (t_last - t_warm) / Rational::from_integer((n - w) as i128);
    let makespan = sink.iter().copied().max().unwrap_or_else(Rational::zero);

    let per_stage_busy = stages
        .iter()
        .zip(&dur)
        .map(|(st, d)| {
            if makespan.is_zero() {
                0.0
            } else {
                rational_to_f64(
                    &(*d * Rational::from_integer(n as i128) / (makespan * Rational::from_integer(st.cores as i128))),
                )
            }
        })
        .collect();

    let links = stages
        .windows(2)
        .zip(&buffers)
        .map(|(w, &b)| {
            let (p, c) = (w[0].cores, w[1].cores);
            LinkReport {
                buffers: b,
                producers: p,
                consumers: c,
                writers_per_slot: replicas_per_slot(p, b, n),
                readers_per_slot: replicas_per_slot(c, b, n),
            }
        })
        .collect();

    Ok(SimReport {
        measured_period,
        completion_order,
        per_stage_busy,
        makespan,
        links,
    })
}

/// Largest number of distinct replicas (of `r`) that touch one of `b` slots
/// over the first `streams` streams.
fn replicas_per_slot(r: usize, b: usize, streams: usize) -> usize {
    (0..b)
        .map(|slot| {
            let mut seen = vec![false; r];
            (slot..streams).step_by(b).for_each(|s| seen[s % r] = true);
            seen.iter().filter(|&&x| x).count()
        })
        .max()
        .unwrap_or(0)
}

/// Smallest slot count for an `m` to `n` link with no slot shared by two
/// replicas of the same stage, found by simulating a two-stage pipeline with
/// 1, 2, ... slots.
pub fn smallest_contention_free_buffers(m: usize, n: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return input("replica counts must be positive");
    }
    let chain = TaskChain::from_integers("link", &[1, 1], &[1, 1], &[true, true])?;
    let stages = [
        Stage::new(1, 1, m, crate::CoreType::Big),
        Stage::new(2, 2, n, crate::CoreType::Big),
    ];
    let streams = 4 * m * n;
    for b in 1..=m * n {
        let config = SimConfig {
            streams,
            warmup_streams: 0,
            buffers_per_link: Some(vec![b]),
        };
        let report = simulate_stages(&chain, &stages, &config)?;
        if !report.links[0].contended() {
            return Ok(b);
        }
    }
    Ok(m * n)
}
