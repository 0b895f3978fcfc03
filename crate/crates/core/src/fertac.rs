//! FERTAC: build every stage on little cores and fall back to big cores
//! only when the little-core stage cannot meet the target period.

use crate::error::Result;
use crate::model::{CoreType, Platform, Solution, Stage, TaskChain};
use crate::sched::{compute_stage, schedule, SearchBounds};
use crate::weight::Rational;

/// Greedy stage list for one target period, starting at task `start` with
/// the given remaining budgets. `None` when some stage fits neither type.
pub fn fertac_compute_solution(
    chain: &TaskChain,
    start: usize,
    big_left: usize,
    little_left: usize,
    target: &Rational,
) -> Option<Vec<Stage>> {
    let (mut start, mut big, mut little) = (start, big_left, little_left);
    let mut stages = Vec::new();
    // The recursion in the textbook form is a tail call; a loop keeps long
    // chains off the call stack.
    while start <= chain.len() {
        let mut core_type = CoreType::Little;
        let mut r = compute_stage(chain, start, little, core_type, target);
        if !r.is_valid(chain, start, core_type, big, little, target) {
            core_type = CoreType::Big;
            r = compute_stage(chain, start, big, core_type, target);
            if !r.is_valid(chain, start, core_type, big, little, target) {
                return None;
            }
        }
        match core_type {
            CoreType::Big => big -= r.cores_used,
            CoreType::Little => little -= r.cores_used,
        }
        stages.push(r.stage(start, core_type));
        start = r.last + 1;
    }
    Some(stages)
}

pub fn fertac_schedule(chain: &TaskChain, platform: &Platform) -> Result<Option<Solution>> {
    let bounds = SearchBounds::heterogeneous(chain, platform);
    schedule(chain, platform, bounds, |target| {
        Ok(fertac_compute_solution(chain, 1, platform.big, platform.little, target))
    })
}
