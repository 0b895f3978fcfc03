//! 2CATAC: at every stage boundary try both core types, recurse on each, and
//! keep the combined solution that trades big cores for little ones best.

use crate::error::{Error, Result};
use crate::model::{CoreType, CoreUsage, Platform, Solution, Stage, TaskChain};
use crate::sched::{compute_stage, schedule, SearchBounds};
use crate::weight::Rational;

pub const DEFAULT_MAX_EXPANSIONS: u64 = 1 << 22;

/// A partial solution with its core usage accumulated while it was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub stages: Vec<Stage>,
    pub usage: CoreUsage,
}

impl Candidate {
    fn single(stage: Stage) -> Candidate {
        Candidate {
            usage: CoreUsage::default().with(stage.core_type, stage.cores),
            stages: vec![stage],
        }
    }

    fn prepend(mut self, stage: Stage) -> Candidate {
        self.usage = self.usage.with(stage.core_type, stage.cores);
        self.stages.insert(0, stage);
        self
    }
}

/// Counts recursive expansions across one scheduling run.
#[derive(Clone, Debug)]
pub struct ExpansionBudget {
    limit: u64,
    used: u64,
}

impl ExpansionBudget {
    pub fn new(limit: u64) -> ExpansionBudget {
        ExpansionBudget { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded { expansions: self.used });
        }
        Ok(())
    }
}

impl Default for ExpansionBudget {
    fn default() -> Self {
        ExpansionBudget::new(DEFAULT_MAX_EXPANSIONS)
    }
}

/// Both-branch recursion for one target period. Sub-solutions are checked
/// against the budgets left after the current stage.
pub fn twocatac_compute_solution(
    chain: &TaskChain,
    start: usize,
    big_left: usize,
    little_left: usize,
    target: &Rational,
    budget: &mut ExpansionBudget,
) -> Result<Option<Candidate>> {
    budget.spend()?;
    let mut options: [Option<Candidate>; 2] = [None, None];

    for (slot, core_type) in CoreType::ALL.into_iter().enumerate() {
        let available = match core_type {
            CoreType::Big => big_left,
            CoreType::Little => little_left,
        };
        let r = compute_stage(chain, start, available, core_type, target);
        if !r.is_valid(chain, start, core_type, big_left, little_left, target) {
            continue;
        }
        let stage = r.stage(start, core_type);
        if r.last == chain.len() {
            options[slot] = Some(Candidate::single(stage));
            continue;
        }
        let (b, l) = match core_type {
            CoreType::Big => (big_left - r.cores_used, little_left),
            CoreType::Little => (big_left, little_left - r.cores_used),
        };
        // Every returned sub-solution already satisfies the target and its
        // budgets, so the combined one does too.
        if let Some(rest) = twocatac_compute_solution(chain, r.last + 1, b, l, target, budget)? {
            options[slot] = Some(rest.prepend(stage));
        }
    }

    let [with_big, with_little] = options;
    Ok(choose_best_solution(with_big, with_little))
}

/// Picks between the big-first and little-first candidates. Both are
/// assumed valid for the same budgets and target.
pub fn choose_best_solution(with_big: Option<Candidate>, with_little: Option<Candidate>) -> Option<Candidate> {
    match (with_big, with_little) {
        (Some(b), Some(l)) => Some(if prefer_big_branch(b.usage, l.usage) { b } else { l }),
        (b, l) => b.or(l),
    }
}

/// True when the big-first branch wins the usage comparison: it uses more
/// little and fewer big cores, or (with no clear trade) fewer cores overall.
/// Ties go to the little-first branch.
pub fn prefer_big_branch(big: CoreUsage, little: CoreUsage) -> bool {
    if big.little > little.little && big.big < little.big {
        true
    } else if big.little < little.little && big.big > little.big {
        false
    } else {
        big.total() < little.total()
    }
}

pub fn twocatac_schedule(chain: &TaskChain, platform: &Platform) -> Result<Option<Solution>> {
    twocatac_schedule_with_budget(chain, platform, DEFAULT_MAX_EXPANSIONS)
}

pub fn twocatac_schedule_with_budget(
    chain: &TaskChain,
    platform: &Platform,
    max_expansions: u64,
) -> Result<Option<Solution>> {
    let bounds = SearchBounds::heterogeneous(chain, platform);
    let mut budget = ExpansionBudget::new(max_expansions);
    schedule(chain, platform, bounds, |target| {
        Ok(twocatac_compute_solution(chain, 1, platform.big, platform.little, target, &mut budget)?.map(|c| c.stages))
    })
}
