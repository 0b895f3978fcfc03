//! The binary search over target periods and the greedy stage builder shared
//! by FERTAC, 2CATAC and the homogeneous OTAC baselines.

use num_traits::Zero;

use crate::error::Result;
use crate::model::{is_valid, CoreType, Platform, Solution, Stage, TaskChain};
use crate::weight::{Rational, Weight};

/// Bounds and stopping threshold of the period search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub p_min: Rational,
    pub p_max: Rational,
    pub epsilon: Rational,
}

impl SearchBounds {
    /// Bounds for a two-type platform. The lower bound assumes big cores are
    /// the faster type: all big work spread over every core, or the heaviest
    /// sequential task on a big core.
    pub fn heterogeneous(chain: &TaskChain, platform: &Platform) -> SearchBounds {
        let cores = Rational::from_integer(platform.total() as i128);
        let spread = chain.total(CoreType::Big) / cores;
        let p_min = spread.max(max_sequential(chain, CoreType::Big));
        let p_max = p_min + max_weight(chain, CoreType::Little);
        SearchBounds {
            p_min,
            p_max,
            epsilon: cores.recip(),
        }
    }

    /// Bounds when only `cores` cores of `core_type` are used.
    pub fn homogeneous(chain: &TaskChain, core_type: CoreType, cores: usize) -> SearchBounds {
        let c = Rational::from_integer(cores as i128);
        let spread = chain.total(core_type) / c;
        let p_min = spread.max(max_sequential(chain, core_type));
        let p_max = p_min + max_weight(chain, core_type);
        SearchBounds {
            p_min,
            p_max,
            epsilon: c.recip(),
        }
    }

    /// Upper bound on loop iterations when every probe fails.
    pub fn max_iterations(&self) -> u32 {
        let mut gap = self.p_max - self.p_min;
        let mut k = 0;
        while gap >= self.epsilon {
            gap /= Rational::from_integer(2);
            k += 1;
        }
        k
    }
}

fn max_sequential(chain: &TaskChain, core_type: CoreType) -> Rational {
    chain
        .tasks()
        .iter()
        .filter(|t| !t.replicable)
        .map(|t| *t.weight(core_type))
        .max()
        .unwrap_or_else(Rational::zero)
}

fn max_weight(chain: &TaskChain, core_type: CoreType) -> Rational {
    chain
        .tasks()
        .iter()
        .map(|t| *t.weight(core_type))
        .max()
        .unwrap_or_else(Rational::zero)
}

/// What the binary search saw, for diagnostics and tests.
#[derive(Clone, Debug, Default)]
pub struct SearchTrace {
    pub iterations: u32,
    /// Targets whose candidate was valid, in probe order.
    pub accepted: Vec<Rational>,
    pub rejected: Vec<Rational>,
}

/// Runs the period binary search with `compute` as the per-target solver.
///
/// `compute` receives the target period and returns a candidate stage list
/// (or `None`); the candidate is kept when it is valid for the full platform
/// budget, and the upper bound drops to its actual period.
pub fn schedule<F>(chain: &TaskChain, platform: &Platform, bounds: SearchBounds, compute: F) -> Result<Option<Solution>>
where
    F: FnMut(&Rational) -> Result<Option<Vec<Stage>>>,
{
    schedule_traced(chain, platform, bounds, compute).map(|(s, _)| s)
}

pub fn schedule_traced<F>(
    chain: &TaskChain,
    platform: &Platform,
    bounds: SearchBounds,
    mut compute: F,
) -> Result<(Option<Solution>, SearchTrace)>
where
    F: FnMut(&Rational) -> Result<Option<Vec<Stage>>>,
{
    let SearchBounds {
        mut p_min,
        mut p_max,
        epsilon,
    } = bounds;
    let two = Rational::from_integer(2);
    let mut best: Option<Vec<Stage>> = None;
    let mut trace = SearchTrace::default();

    while p_max - p_min >= epsilon {
        let p_mid = (p_max + p_min) / two;
        trace.iterations += 1;
        let candidate = compute(&p_mid)?;
        match candidate {
            Some(stages) if is_valid(chain, &stages, platform.big, platform.little, &p_mid) => {
                p_max = crate::model::max_weight(chain, &stages)
                    .to_rational()
                    .expect("valid stages have finite weight");
                trace.accepted.push(p_mid);
                best = Some(stages);
            }
            _ => {
                trace.rejected.push(p_mid);
                p_min = p_mid;
            }
        }
    }

    let solution = best.map(|stages| Solution::new(chain, stages)).transpose()?;
    Ok((solution, trace))
}

/// Where a greedily built stage ends and how many cores it takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageResult {
    pub last: usize,
    /// Zero only when zero cores were offered for a stage that needs more
    /// than one; such a stage always fails validation.
    pub cores_used: usize,
}

/// Largest `e >= start` whose stage `[start, e]` on `cores` cores of
/// `core_type` weighs at most `target`; `start` when even the single task is
/// too heavy.
pub fn max_packing(chain: &TaskChain, start: usize, cores: usize, core_type: CoreType, target: &Rational) -> usize {
    let target = Weight::from(target);
    // Stage weight is non-decreasing in `e` (adding a sequential task only
    // drops the divisor), so the feasible ends form a prefix of start..=n.
    let (mut lo, mut hi) = (start, chain.len());
    if chain.weight_of(start, lo, cores, core_type) > target {
        return start;
    }
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if chain.weight_of(start, mid, cores, core_type) <= target {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// `ceil(w([start, end], 1, core_type) / target)`.
pub fn required_cores(chain: &TaskChain, start: usize, end: usize, core_type: CoreType, target: &Rational) -> usize {
    debug_assert!(!target.is_zero());
    // ticks / scale / (pn / pd) = ticks * pd / (scale * pn)
    let num = chain.ticks(start, end, core_type) * target.denom();
    let den = chain.scale() * target.numer();
    num_integer::Integer::div_ceil(&num, &den) as usize
}

pub fn is_rep(chain: &TaskChain, start: usize, end: usize) -> bool {
    chain.is_rep(start, end)
}

pub fn final_rep_task(chain: &TaskChain, start: usize, end: usize) -> usize {
    chain.final_rep_task(start, end)
}

/// Builds one stage starting at `start` with at most `cores_available` cores
/// of `core_type`: pack on one core, extend over the following replicable run,
/// shrink onto the cores it needs if that run needs too many, and otherwise
/// give one core back when the stage still meets the target on one core fewer
/// and the tail it drops fits on a single core together with the next task.
pub fn compute_stage(
    chain: &TaskChain,
    start: usize,
    cores_available: usize,
    core_type: CoreType,
    target: &Rational,
) -> StageResult {
    let n = chain.len();
    let mut e = max_packing(chain, start, 1, core_type, target);
    let mut u = required_cores(chain, start, e, core_type, target);

    if e != n && chain.is_rep(start, e) {
        e = chain.final_rep_task(start, e);
        u = required_cores(chain, start, e, core_type, target);
        if u > cores_available {
            e = max_packing(chain, start, cores_available, core_type, target);
            // The shrunk stage may fit on fewer cores than were offered.
            u = required_cores(chain, start, e, core_type, target).min(cores_available);
        } else if e != n && u > 1 {
            let f = max_packing(chain, start, u - 1, core_type, target);
            // A forced-minimum repack (the first task alone already exceeds
            // the target on u - 1 cores) is not a valid shorter stage.
            let tail_fits = chain.weight_of(start, f, u - 1, core_type) <= Weight::from(target)
                && (f + 1 > e + 1 || required_cores(chain, f + 1, e + 1, core_type, target) == 1);
            if tail_fits {
                e = f;
                u -= 1;
            }
        }
    }

    StageResult { last: e, cores_used: u }
}

impl StageResult {
    pub fn stage(&self, start: usize, core_type: CoreType) -> Stage {
        Stage::new(start, self.last, self.cores_used, core_type)
    }

    /// Single-stage validity against the remaining budgets.
    pub fn is_valid(
        &self,
        chain: &TaskChain,
        start: usize,
        core_type: CoreType,
        big: usize,
        little: usize,
        target: &Rational,
    ) -> bool {
        is_valid(chain, &[self.stage(start, core_type)], big, little, target)
    }
}
