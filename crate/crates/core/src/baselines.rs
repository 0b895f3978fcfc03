//! Single-type OTAC schedules and the thread-per-task layouts an OS
//! scheduler would be handed.

use crate::error::{input, Result};
use crate::model::{CoreType, Platform, Solution, Stage, TaskChain};
use crate::sched::{compute_stage, schedule, SearchBounds};
use crate::weight::Rational;

/// Greedy stage list on `cores` cores of one type.
pub fn otac_compute_solution(
    chain: &TaskChain,
    core_type: CoreType,
    cores: usize,
    target: &Rational,
) -> Option<Vec<Stage>> {
    let (mut start, mut left) = (1, cores);
    let mut stages = Vec::new();
    while start <= chain.len() {
        let r = compute_stage(chain, start, left, core_type, target);
        let (b, l) = match core_type {
            CoreType::Big => (left, 0),
            CoreType::Little => (0, left),
        };
        if !r.is_valid(chain, start, core_type, b, l, target) {
            return None;
        }
        left -= r.cores_used;
        stages.push(r.stage(start, core_type));
        start = r.last + 1;
    }
    Some(stages)
}

/// OTAC using only the `core_type` cores of `platform`.
pub fn otac_schedule(chain: &TaskChain, platform: &Platform, core_type: CoreType) -> Result<Option<Solution>> {
    let cores = platform.cores(core_type);
    if cores == 0 {
        return input(format!("platform {platform} has no {core_type} cores"));
    }
    let bounds = SearchBounds::homogeneous(chain, core_type, cores);
    schedule(chain, platform, bounds, |target| {
        Ok(otac_compute_solution(chain, core_type, cores, target))
    })
}

/// One stage per task, replicable tasks on `factor` cores. The list ignores
/// platform budgets, and stages are tagged big since the OS decides
/// placement.
pub fn os_style_decomposition(chain: &TaskChain, factor: usize) -> Vec<Stage> {
    chain
        .tasks()
        .iter()
        .map(|t| {
            let cores = if t.replicable { factor } else { 1 };
            Stage::new(t.id, t.id, cores, CoreType::Big)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CoreUsage;

    #[test]
    fn all_replicable_chain_is_one_stage_on_every_core() {
        let chain = TaskChain::from_integers("r", &[3, 5, 4], &[6, 9, 8], &[true; 3]).unwrap();
        let sol = otac_schedule(&chain, &Platform::new(2, 4).unwrap(), CoreType::Little)
            .unwrap()
            .unwrap();
        assert_eq!(sol.stages(), &[Stage::new(1, 3, 4, CoreType::Little)]);
        assert_eq!(sol.usage(), CoreUsage::new(0, 4));
    }

    #[test]
    fn otac_needs_cores_of_its_type() {
        let chain = TaskChain::from_integers("r", &[3], &[6], &[true]).unwrap();
        assert!(otac_schedule(&chain, &Platform::new(0, 2).unwrap(), CoreType::Big).is_err());
    }

    #[test]
    fn os_thread_counts() {
        let chain = TaskChain::from_integers("c", &[1; 4], &[2; 4], &[true, false, true, true]).unwrap();
        let stages = os_style_decomposition(&chain, 3);
        assert_eq!(stages.len(), 4);
        assert_eq!(CoreUsage::of(&stages).total(), 10);
        for f in 1..=3 {
            let total = CoreUsage::of(&os_style_decomposition(&chain, f)).total();
            assert_eq!(total, 4 + (f - 1) * 3);
        }
    }
}
