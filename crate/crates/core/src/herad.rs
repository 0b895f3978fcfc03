//! HeRAD: dynamic program over (task prefix, big budget, little budget) that
//! reaches the minimum period, breaking ties towards little cores.

use crate::error::{Error, Result};
use crate::model::{CoreType, CoreUsage, Platform, Solution, Stage, TaskChain};
use crate::weight::Weight;

/// One DP entry: the best partial solution for a task prefix and budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub p_best: Weight,
    /// Budget coordinates of the predecessor cell (row `start - 1`).
    pub prev: (usize, usize),
    /// Cores used by the whole partial solution.
    pub acc: CoreUsage,
    pub core_type: CoreType,
    /// First task of the last stage.
    pub start: usize,
}

impl Cell {
    const UNREACHABLE: Cell = Cell {
        p_best: Weight::INFINITY,
        prev: (0, 0),
        acc: CoreUsage { big: 0, little: 0 },
        core_type: CoreType::Little,
        start: 1,
    };

    pub fn is_reachable(&self) -> bool {
        !self.p_best.is_infinite()
    }
}

/// Keeps `current` unless `candidate` has a lower period, or ties while
/// trading big cores for little ones, or ties using no more of either type.
pub fn compare_cells(current: Cell, candidate: Cell) -> Cell {
    let (c, n) = (current.acc, candidate.acc);
    let adopt = current.p_best > candidate.p_best
        || current.p_best == candidate.p_best
            && ((c.little < n.little && c.big > n.big) || (c.little >= n.little && c.big >= n.big));
    if adopt {
        candidate
    } else {
        current
    }
}

/// The filled table, indexed `[task 1..=n][big 0..=b][little 0..=l]`.
#[derive(Clone, Debug)]
pub struct SolutionMatrix {
    n: usize,
    big: usize,
    little: usize,
    cells: Vec<Cell>,
}

impl SolutionMatrix {
    fn empty(n: usize, big: usize, little: usize) -> SolutionMatrix {
        SolutionMatrix {
            n,
            big,
            little,
            cells: vec![Cell::UNREACHABLE; n * (big + 1) * (little + 1)],
        }
    }

    /// Runs the full fill for `chain` with budgets `big` and `little`.
    pub fn build(chain: &TaskChain, big: usize, little: usize) -> SolutionMatrix {
        let mut m = SolutionMatrix::empty(chain.len(), big, little);
        for j in 1..=chain.len() {
            single_stage_solution(j, &mut m, chain);
            if j == 1 {
                // A one-task prefix has no split point to add.
                continue;
            }
            for ub in 0..=big {
                for ul in 0..=little {
                    if ub != 0 || ul != 0 {
                        recompute_cell(j, &mut m, chain, ub, ul);
                    }
                }
            }
        }
        m
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n, self.big + 1, self.little + 1)
    }

    #[inline]
    fn index(&self, j: usize, b: usize, l: usize) -> usize {
        debug_assert!(1 <= j && j <= self.n && b <= self.big && l <= self.little);
        ((j - 1) * (self.big + 1) + b) * (self.little + 1) + l
    }

    #[inline]
    pub fn cell(&self, j: usize, b: usize, l: usize) -> &Cell {
        &self.cells[self.index(j, b, l)]
    }

    #[inline]
    fn cell_mut(&mut self, j: usize, b: usize, l: usize) -> &mut Cell {
        let i = self.index(j, b, l);
        &mut self.cells[i]
    }

    /// Period and usage of the prefix ending at `j`; row 0 is the empty prefix.
    #[inline]
    fn prefix(&self, j: usize, b: usize, l: usize) -> (Weight, CoreUsage) {
        if j == 0 {
            (Weight::ZERO, CoreUsage::default())
        } else {
            let c = self.cell(j, b, l);
            (c.p_best, c.acc)
        }
    }
}

/// Fills row `t` with the best single-stage mapping of tasks `1..=t`.
pub fn single_stage_solution(t: usize, m: &mut SolutionMatrix, chain: &TaskChain) {
    let rep = chain.is_rep(1, t);
    let used = |r: usize| if rep { r } else { 1 };
    for rl in 1..=m.little {
        *m.cell_mut(t, 0, rl) = Cell {
            p_best: chain.weight_of(1, t, rl, CoreType::Little),
            prev: (0, 0),
            acc: CoreUsage::new(0, used(rl)),
            core_type: CoreType::Little,
            start: 1,
        };
    }
    for rb in 1..=m.big {
        let wb = chain.weight_of(1, t, rb, CoreType::Big);
        for rl in 0..=m.little {
            let little_only = *m.cell(t, 0, rl);
            *m.cell_mut(t, rb, rl) = if wb < little_only.p_best {
                Cell {
                    p_best: wb,
                    prev: (0, 0),
                    acc: CoreUsage::new(used(rb), 0),
                    core_type: CoreType::Big,
                    start: 1,
                }
            } else {
                little_only
            };
        }
    }
}

/// Improves cell `(j, b, l)` with its one-fewer-core neighbours and with
/// every split of the prefix into an earlier part and a last stage `[i, j]`.
pub fn recompute_cell(j: usize, m: &mut SolutionMatrix, chain: &TaskChain, b: usize, l: usize) {
    let mut c = *m.cell(j, b, l);
    if l > 0 {
        c = compare_cells(c, *m.cell(j, b, l - 1));
    }
    if b > 0 {
        c = compare_cells(c, *m.cell(j, b - 1, l));
    }
    for i in (1..=j).rev() {
        let rep = chain.is_rep(i, j);
        // A sequential stage gains nothing from a second core.
        let (max_b, max_l) = if rep { (b, l) } else { (b.min(1), l.min(1)) };
        for u in 1..=max_b {
            let (p_prev, acc) = m.prefix(i - 1, b - u, l);
            if p_prev.is_infinite() {
                continue;
            }
            let w = chain.weight_of(i, j, u, CoreType::Big);
            c = compare_cells(
                c,
                Cell {
                    p_best: p_prev.max(w),
                    prev: (b - u, l),
                    acc: acc.with(CoreType::Big, if rep { u } else { 1 }),
                    core_type: CoreType::Big,
                    start: i,
                },
            );
        }
        for u in 1..=max_l {
            let (p_prev, acc) = m.prefix(i - 1, b, l - u);
            if p_prev.is_infinite() {
                continue;
            }
            let w = chain.weight_of(i, j, u, CoreType::Little);
            c = compare_cells(
                c,
                Cell {
                    p_best: p_prev.max(w),
                    prev: (b, l - u),
                    acc: acc.with(CoreType::Little, if rep { u } else { 1 }),
                    core_type: CoreType::Little,
                    start: i,
                },
            );
        }
    }
    *m.cell_mut(j, b, l) = c;
}

/// Walks back from `(n, b, l)` and rebuilds the stage list; each stage's
/// core count is the difference between its cell's and its predecessor's
/// accumulated usage.
pub fn extract_solution(m: &SolutionMatrix, chain: &TaskChain) -> Result<Vec<Stage>> {
    let last = m.cell(m.n, m.big, m.little);
    if !last.is_reachable() {
        return Err(Error::Infeasible("no core available".into()));
    }
    let (mut e, mut rb, mut rl) = (chain.len(), m.big, m.little);
    let mut stages = Vec::new();
    while e >= 1 {
        let cell = *m.cell(e, rb, rl);
        let s = cell.start;
        let (pb, pl) = cell.prev;
        let (_, before) = m.prefix(s - 1, pb, pl);
        let cores = cell.acc.get(cell.core_type) - before.get(cell.core_type);
        stages.push(Stage::new(s, e, cores, cell.core_type));
        e = s - 1;
        rb = pb;
        rl = pl;
    }
    stages.reverse();
    Ok(stages)
}

/// Fuses neighbouring fully replicable stages of the same core type.
pub fn merge_replicable_stages(chain: &TaskChain, stages: Vec<Stage>) -> Vec<Stage> {
    let mut out: Vec<Stage> = Vec::with_capacity(stages.len());
    for s in stages {
        if let Some(prev) = out.last_mut() {
            if prev.core_type == s.core_type && chain.is_rep(prev.first, prev.last) && chain.is_rep(s.first, s.last) {
                prev.last = s.last;
                prev.cores += s.cores;
                continue;
            }
        }
        out.push(s);
    }
    out
}

pub fn herad_schedule(chain: &TaskChain, platform: &Platform) -> Result<Solution> {
    let m = SolutionMatrix::build(chain, platform.big, platform.little);
    let stages = extract_solution(&m, chain)?;
    Solution::new(chain, merge_replicable_stages(chain, stages))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::Rational;

    fn c1() -> TaskChain {
        TaskChain::from_integers("C1", &[4, 2, 6, 2], &[8, 4, 12, 4], &[true, false, true, true]).unwrap()
    }

    fn cell(p: i128, big: usize, little: usize) -> Cell {
        Cell {
            p_best: Weight::new(p, 1),
            acc: CoreUsage::new(big, little),
            ..Cell::UNREACHABLE
        }
    }

    #[test]
    fn compare_cells_rules() {
        assert_eq!(compare_cells(cell(5, 1, 1), cell(4, 3, 3)), cell(4, 3, 3));
        assert_eq!(compare_cells(cell(5, 2, 1), cell(5, 1, 2)), cell(5, 1, 2));
        let newer = Cell {
            start: 2,
            ..cell(5, 1, 1)
        };
        assert_eq!(compare_cells(cell(5, 1, 1), newer), newer);
        assert_eq!(compare_cells(cell(5, 1, 2), cell(5, 2, 1)), cell(5, 1, 2));
        assert_eq!(compare_cells(cell(4, 1, 1), cell(5, 0, 0)), cell(4, 1, 1));
    }

    #[test]
    fn single_stage_rows() {
        let chain = c1();
        let mut m = SolutionMatrix::empty(4, 1, 2);
        single_stage_solution(1, &mut m, &chain);
        let c = m.cell(1, 0, 2);
        assert_eq!(c.p_best, Weight::new(4, 1));
        assert_eq!(c.acc, CoreUsage::new(0, 2));

        // Prefix [1,2] is sequential: big 6 beats little 12, one core counted.
        single_stage_solution(2, &mut m, &chain);
        for rl in 0..=2 {
            let c = m.cell(2, 1, rl);
            assert_eq!(c.p_best, Weight::new(6, 1));
            assert_eq!(c.acc, CoreUsage::new(1, 0));
            assert_eq!(c.core_type, CoreType::Big);
        }
        assert_eq!(m.cell(2, 0, 2).acc, CoreUsage::new(0, 1));
        assert!(!m.cell(2, 0, 0).is_reachable());
    }

    #[test]
    fn c1_optimum_is_eight() {
        let chain = c1();
        let m = SolutionMatrix::build(&chain, 1, 2);
        assert_eq!(m.dims(), (4, 2, 3));
        assert_eq!(m.cell(4, 1, 2).p_best, Weight::new(8, 1));
        let sol = herad_schedule(&chain, &Platform::new(1, 2).unwrap()).unwrap();
        assert_eq!(sol.period(), &Rational::from_integer(8));
    }

    #[test]
    fn matrix_is_monotone_in_both_budgets() {
        let chain = TaskChain::from_integers(
            "m",
            &[7, 3, 9, 2, 5, 8],
            &[20, 4, 30, 3, 9, 17],
            &[true, false, true, true, false, true],
        )
        .unwrap();
        let m = SolutionMatrix::build(&chain, 3, 3);
        for j in 1..=6 {
            for b in 0..=3 {
                for l in 0..=3 {
                    let p = m.cell(j, b, l).p_best;
                    if b > 0 {
                        assert!(p <= m.cell(j, b - 1, l).p_best);
                    }
                    if l > 0 {
                        assert!(p <= m.cell(j, b, l - 1).p_best);
                    }
                }
            }
        }
    }

    #[test]
    fn extraction_matches_cell_period_and_usage() {
        let chain = TaskChain::from_integers(
            "x",
            &[7, 3, 9, 2, 5, 8, 4],
            &[20, 4, 30, 3, 9, 17, 5],
            &[true, true, true, false, true, true, true],
        )
        .unwrap();
        for (b, l) in [(0, 1), (1, 0), (2, 3), (3, 1), (4, 4)] {
            let m = SolutionMatrix::build(&chain, b, l);
            let stages = extract_solution(&m, &chain).unwrap();
            let last = m.cell(7, b, l);
            let sol = Solution::new(&chain, stages).unwrap();
            assert_eq!(Weight::from(sol.period()), last.p_best);
            assert_eq!(sol.usage(), last.acc);
        }
    }

    #[test]
    fn merge_fuses_only_replicable_same_type_neighbours() {
        let chain = c1();
        let merged = merge_replicable_stages(
            &chain,
            vec![
                Stage::new(3, 3, 1, CoreType::Little),
                Stage::new(4, 4, 1, CoreType::Little),
            ],
        );
        assert_eq!(merged, vec![Stage::new(3, 4, 2, CoreType::Little)]);
        assert_eq!(chain.weight_of(3, 4, 2, CoreType::Little), Weight::new(8, 1));

        let mixed = vec![
            Stage::new(3, 3, 1, CoreType::Big),
            Stage::new(4, 4, 1, CoreType::Little),
        ];
        assert_eq!(merge_replicable_stages(&chain, mixed.clone()), mixed);
        let seq = vec![
            Stage::new(1, 1, 1, CoreType::Little),
            Stage::new(2, 2, 1, CoreType::Little),
            Stage::new(3, 4, 1, CoreType::Little),
        ];
        assert_eq!(merge_replicable_stages(&chain, seq.clone()), seq);
    }

    #[test]
    fn single_task_chain_gives_one_stage() {
        let chain = TaskChain::from_integers("one", &[6], &[9], &[true]).unwrap();
        let sol = herad_schedule(&chain, &Platform::new(1, 3).unwrap()).unwrap();
        assert_eq!(sol.stages(), &[Stage::new(1, 1, 3, CoreType::Little)]);
        assert_eq!(sol.period(), &Rational::from_integer(3));
    }
}
