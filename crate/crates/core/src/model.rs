//! Task chains, platforms, stages and solutions, with the stage-weight,
//! period and resource-validity rules every strategy shares.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::weight::{rational_from_f64, rational_to_f64, Rational, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoreType {
    #[serde(rename = "B")]
    Big,
    #[serde(rename = "L")]
    Little,
}

impl CoreType {
    pub const ALL: [CoreType; 2] = [CoreType::Big, CoreType::Little];

    pub fn symbol(self) -> &'static str {
        match self {
            CoreType::Big => "B",
            CoreType::Little => "L",
        }
    }
}

impl fmt::Display for CoreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoreType::Big => "big",
            CoreType::Little => "little",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    /// 1-based position in the chain.
    pub id: usize,
    pub weight_big: Rational,
    pub weight_little: Rational,
    pub replicable: bool,
}

impl Task {
    pub fn weight(&self, core_type: CoreType) -> &Rational {
        match core_type {
            CoreType::Big => &self.weight_big,
            CoreType::Little => &self.weight_little,
        }
    }
}

/// A linear chain of tasks plus the O(n) indexes the schedulers query:
/// per-type prefix sums in integer ticks and the next sequential task.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ChainDoc", into = "ChainDoc")]
pub struct TaskChain {
    name: String,
    tasks: Vec<Task>,
    /// Common denominator of every weight; one tick is `1 / scale` time units.
    scale: i128,
    prefix_big: Vec<i128>,
    prefix_little: Vec<i128>,
    /// `next_seq[i]` is the smallest sequential task id `>= i`, or `n + 1`.
    next_seq: Vec<usize>,
}

impl PartialEq for TaskChain {
    fn eq(&self, other: &TaskChain) -> bool {
        self.name == other.name && self.tasks == other.tasks
    }
}

impl TaskChain {
    pub fn new(name: impl Into<String>, tasks: Vec<Task>) -> Result<TaskChain> {
        if tasks.is_empty() {
            return input("task chain must contain at least one task");
        }
        for (pos, task) in tasks.iter().enumerate() {
            if task.id != pos + 1 {
                return input(format!(
                    "task at position {} has id {}; ids must be 1..n without gaps",
                    pos + 1,
                    task.id
                ));
            }
            if !task.weight_big.is_positive() || !task.weight_little.is_positive() {
                return input(format!("task {} must have strictly positive weights", task.id));
            }
        }

        let mut scale: i128 = 1;
        for t in &tasks {
            scale = scale.lcm(t.weight_big.denom()).lcm(t.weight_little.denom());
        }
        let ticks = |w: &Rational| (w * Rational::from_integer(scale)).to_integer();

        let n = tasks.len();
        let mut prefix_big = Vec::with_capacity(n + 1);
        let mut prefix_little = Vec::with_capacity(n + 1);
        prefix_big.push(0);
        prefix_little.push(0);
        for t in &tasks {
            prefix_big.push(prefix_big.last().unwrap() + ticks(&t.weight_big));
            prefix_little.push(prefix_little.last().unwrap() + ticks(&t.weight_little));
        }

        let mut next_seq = vec![n + 1; n + 2];
        for i in (1..=n).rev() {
            next_seq[i] = if tasks[i - 1].replicable { next_seq[i + 1] } else { i };
        }

        Ok(TaskChain {
            name: name.into(),
            tasks,
            scale,
            prefix_big,
            prefix_little,
            next_seq,
        })
    }

    /// Builds a chain from integer weights; handy for tests and generators.
    pub fn from_integers(
        name: impl Into<String>,
        big: &[i64],
        little: &[i64],
        replicable: &[bool],
    ) -> Result<TaskChain> {
        if big.len() != little.len() || big.len() != replicable.len() {
            return input("weight and flag vectors must have equal length");
        }
        let tasks = big
            .iter()
            .zip(little)
            .zip(replicable)
            .enumerate()
            .map(|(i, ((&b, &l), &rep))| Task {
                id: i + 1,
                weight_big: Rational::from_integer(b.into()),
                weight_little: Rational::from_integer(l.into()),
                replicable: rep,
            })
            .collect();
        TaskChain::new(name, tasks)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn task(&self, id: usize) -> &Task {
        &self.tasks[id - 1]
    }

    pub fn replicable_count(&self) -> usize {
        self.tasks.iter().filter(|t| t.replicable).count()
    }

    pub(crate) fn scale(&self) -> i128 {
        self.scale
    }

    /// Sum of `core_type` weights over `[first, last]`, in ticks.
    #[inline]
    pub(crate) fn ticks(&self, first: usize, last: usize, core_type: CoreType) -> i128 {
        let prefix = match core_type {
            CoreType::Big => &self.prefix_big,
            CoreType::Little => &self.prefix_little,
        };
        prefix[last] - prefix[first - 1]
    }

    /// Exact sum of `core_type` weights over `[first, last]`.
    pub fn interval_sum(&self, first: usize, last: usize, core_type: CoreType) -> Rational {
        Rational::new(self.ticks(first, last, core_type), self.scale)
    }

    pub fn total(&self, core_type: CoreType) -> Rational {
        self.interval_sum(1, self.len(), core_type)
    }

    /// True iff `[first, last]` holds no sequential task.
    #[inline]
    pub fn is_rep(&self, first: usize, last: usize) -> bool {
        self.next_seq[first] > last
    }

    /// Largest `i >= last` such that `[first, i]` is fully replicable;
    /// `last` itself when `[first, last]` already contains a sequential task.
    #[inline]
    pub fn final_rep_task(&self, first: usize, last: usize) -> usize {
        if self.is_rep(first, last) {
            self.next_seq[first] - 1
        } else {
            last
        }
    }

    fn check_interval(&self, first: usize, last: usize) -> Result<()> {
        if first < 1 || first > last || last > self.len() {
            return input(format!("interval [{first}, {last}] is outside 1..={}", self.len()));
        }
        Ok(())
    }

    /// Stage weight without bounds checks; callers guarantee `1 <= first <= last <= n`.
    #[inline]
    pub(crate) fn weight_of(&self, first: usize, last: usize, cores: usize, core_type: CoreType) -> Weight {
        if cores == 0 {
            return Weight::INFINITY;
        }
        let ticks = self.ticks(first, last, core_type);
        if self.is_rep(first, last) {
            Weight::new(ticks, self.scale * cores as i128)
        } else {
            Weight::new(ticks, self.scale)
        }
    }
}

/// Weight of the stage `[first, last]` run on `cores` cores of `core_type`:
/// the plain sum if the interval holds a sequential task, the sum divided by
/// `cores` otherwise, and `+inf` for zero cores.
pub fn stage_weight(chain: &TaskChain, first: usize, last: usize, cores: usize, core_type: CoreType) -> Result<Weight> {
    chain.check_interval(first, last)?;
    Ok(chain.weight_of(first, last, cores, core_type))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stage {
    pub first: usize,
    pub last: usize,
    #[serde(rename = "r")]
    pub cores: usize,
    #[serde(rename = "v")]
    pub core_type: CoreType,
}

impl Stage {
    pub fn new(first: usize, last: usize, cores: usize, core_type: CoreType) -> Stage {
        Stage {
            first,
            last,
            cores,
            core_type,
        }
    }

    pub fn len(&self) -> usize {
        self.last + 1 - self.first
    }

    pub fn is_empty(&self) -> bool {
        self.last < self.first
    }

    pub fn weight(&self, chain: &TaskChain) -> Weight {
        chain.weight_of(self.first, self.last, self.cores, self.core_type)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "([{},{}],{}{})",
            self.first,
            self.last,
            self.cores,
            self.core_type.symbol()
        )
    }
}

/// Cores consumed by a stage list, per type.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoreUsage {
    pub big: usize,
    pub little: usize,
}

impl CoreUsage {
    pub fn new(big: usize, little: usize) -> CoreUsage {
        CoreUsage { big, little }
    }

    pub fn of(stages: &[Stage]) -> CoreUsage {
        stages
            .iter()
            .fold(CoreUsage::default(), |acc, s| acc.with(s.core_type, s.cores))
    }

    pub fn with(self, core_type: CoreType, cores: usize) -> CoreUsage {
        match core_type {
            CoreType::Big => CoreUsage::new(self.big + cores, self.little),
            CoreType::Little => CoreUsage::new(self.big, self.little + cores),
        }
    }

    pub fn get(&self, core_type: CoreType) -> usize {
        match core_type {
            CoreType::Big => self.big,
            CoreType::Little => self.little,
        }
    }

    pub fn total(&self) -> usize {
        self.big + self.little
    }
}

fn check_tiling(chain: &TaskChain, stages: &[Stage]) -> Result<()> {
    let mut next = 1;
    for (i, s) in stages.iter().enumerate() {
        if s.first != next || s.last < s.first || s.last > chain.len() {
            return Err(Error::Structure(format!(
                "stage {} {} does not continue the tiling at task {next}",
                i + 1,
                s
            )));
        }
        next = s.last + 1;
    }
    if next != chain.len() + 1 {
        return Err(Error::Structure(format!(
            "stages cover tasks 1..{} but the chain has {} tasks",
            next - 1,
            chain.len()
        )));
    }
    Ok(())
}

/// Largest stage weight; `+inf` if any stage has zero cores. The stage list
/// must tile the chain.
pub fn period_weight(chain: &TaskChain, stages: &[Stage]) -> Result<Weight> {
    check_tiling(chain, stages)?;
    Ok(max_weight(chain, stages))
}

pub(crate) fn max_weight(chain: &TaskChain, stages: &[Stage]) -> Weight {
    stages.iter().map(|s| s.weight(chain)).max().unwrap_or(Weight::ZERO)
}

/// Period of a tiling stage list with every stage on at least one core.
pub fn period(chain: &TaskChain, stages: &[Stage]) -> Result<Rational> {
    period_weight(chain, stages)?
        .to_rational()
        .ok_or_else(|| Error::Structure("a stage has zero cores".into()))
}

/// Per-type core sums fit within the platform's counts.
pub fn is_resource_valid(stages: &[Stage], platform: &Platform) -> bool {
    let used = CoreUsage::of(stages);
    used.big <= platform.big && used.little <= platform.little
}

/// Validity test shared by the greedy strategies: non-empty, period within
/// `target`, and within `big`/`little` budgets.
pub fn is_valid(chain: &TaskChain, stages: &[Stage], big: usize, little: usize, target: &Rational) -> bool {
    if stages.is_empty() {
        return false;
    }
    let used = CoreUsage::of(stages);
    used.big <= big && used.little <= little && max_weight(chain, stages) <= Weight::from(target)
}

/// A stage list that tiles its chain, with the period cached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "SolutionDoc")]
pub struct Solution {
    stages: Vec<Stage>,
    period: Rational,
}

impl Solution {
    pub fn new(chain: &TaskChain, stages: Vec<Stage>) -> Result<Solution> {
        if let Some(s) = stages.iter().find(|s| s.cores == 0) {
            return Err(Error::Structure(format!("stage {s} has zero cores")));
        }
        let period = period(chain, &stages)?;
        Ok(Solution { stages, period })
    }

    /// Rebuilds a solution from its JSON form, recomputing the period from
    /// the chain. The stored period must agree to within its printed precision.
    pub fn from_doc(chain: &TaskChain, doc: SolutionDoc) -> Result<Solution> {
        let solution = Solution::new(chain, doc.stages)?;
        let stored = doc.period;
        let exact = solution.period_f64();
        if (stored - exact).abs() > 1e-6 * exact.abs().max(1.0) {
            return input(format!(
                "stored period {stored} does not match recomputed period {exact}"
            ));
        }
        Ok(solution)
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn into_stages(self) -> Vec<Stage> {
        self.stages
    }

    pub fn period(&self) -> &Rational {
        &self.period
    }

    pub fn period_f64(&self) -> f64 {
        rational_to_f64(&self.period)
    }

    pub fn usage(&self) -> CoreUsage {
        CoreUsage::of(&self.stages)
    }

    /// Number of threads a runtime spawns for this decomposition.
    pub fn thread_count(&self) -> usize {
        self.usage().total()
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.stages.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{}{})", s.len(), s.cores, s.core_type.symbol())?;
        }
        write!(f, " P={}", rational_to_f64(&self.period))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub period: f64,
    pub stages: Vec<Stage>,
}

impl From<Solution> for SolutionDoc {
    fn from(s: Solution) -> SolutionDoc {
        SolutionDoc {
            period: s.period_f64(),
            stages: s.stages,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainDoc {
    pub name: String,
    pub tasks: Vec<TaskDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskDoc {
    pub id: usize,
    pub wb: f64,
    pub wl: f64,
    pub rep: bool,
}

impl TryFrom<ChainDoc> for TaskChain {
    type Error = Error;

    fn try_from(doc: ChainDoc) -> Result<TaskChain> {
        let tasks = doc
            .tasks
            .into_iter()
            .map(|t| {
                Ok(Task {
                    id: t.id,
                    weight_big: rational_from_f64(t.wb)?,
                    weight_little: rational_from_f64(t.wl)?,
                    replicable: t.rep,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TaskChain::new(doc.name, tasks)
    }
}

impl From<TaskChain> for ChainDoc {
    fn from(chain: TaskChain) -> ChainDoc {
        ChainDoc {
            name: chain.name,
            tasks: chain
                .tasks
                .iter()
                .map(|t| TaskDoc {
                    id: t.id,
                    wb: rational_to_f64(&t.weight_big),
                    wl: rational_to_f64(&t.weight_little),
                    rep: t.replicable,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    #[serde(rename = "type")]
    pub core_type: CoreType,
    pub cores: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub package: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub clusters: Vec<Cluster>,
}

impl Topology {
    pub fn cores_of(&self, core_type: CoreType) -> usize {
        self.clusters
            .iter()
            .filter(|c| c.core_type == core_type)
            .map(|c| c.cores.len())
            .sum()
    }
}

/// `big` + `little` cores, optionally with the cluster layout used for pinning.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlatformDoc", into = "PlatformDoc")]
pub struct Platform {
    pub big: usize,
    pub little: usize,
    pub topology: Option<Topology>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlatformDoc {
    pub big: usize,
    pub little: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<Topology>,
}

impl Platform {
    pub fn new(big: usize, little: usize) -> Result<Platform> {
        Platform::with_topology(big, little, None)
    }

    pub fn with_topology(big: usize, little: usize, topology: Option<Topology>) -> Result<Platform> {
        if big + little == 0 {
            return input("platform needs at least one core");
        }
        if let Some(topo) = &topology {
            for core_type in CoreType::ALL {
                let expected = match core_type {
                    CoreType::Big => big,
                    CoreType::Little => little,
                };
                let found = topo.cores_of(core_type);
                if found != expected {
                    return input(format!(
                        "topology lists {found} {core_type} cores but the platform declares {expected}"
                    ));
                }
            }
            let mut seen = BTreeSet::new();
            for id in topo.clusters.iter().flat_map(|c| &c.cores) {
                if !seen.insert(*id) {
                    return input(format!("core id {id} appears twice in the topology"));
                }
            }
        }
        Ok(Platform { big, little, topology })
    }

    /// Builds a platform from its topology alone.
    pub fn from_topology(topology: Topology) -> Result<Platform> {
        let big = topology.cores_of(CoreType::Big);
        let little = topology.cores_of(CoreType::Little);
        Platform::with_topology(big, little, Some(topology))
    }

    pub fn cores(&self, core_type: CoreType) -> usize {
        match core_type {
            CoreType::Big => self.big,
            CoreType::Little => self.little,
        }
    }

    pub fn total(&self) -> usize {
        self.big + self.little
    }

    /// Parses the `B,L` shorthand (e.g. `4,4`).
    pub fn parse_counts(s: &str) -> Result<Platform> {
        let (b, l) = s
            .split_once(',')
            .ok_or_else(|| Error::Input(format!("expected `BIG,LITTLE`, got {s:?}")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::Input(format!("bad core count {x:?}")))
        };
        Platform::new(parse(b)?, parse(l)?)
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}B,{}L)", self.big, self.little)
    }
}

impl TryFrom<PlatformDoc> for Platform {
    type Error = Error;

    fn try_from(doc: PlatformDoc) -> Result<Platform> {
        Platform::with_topology(doc.big, doc.little, doc.topology)
    }
}

impl From<Platform> for PlatformDoc {
    fn from(p: Platform) -> PlatformDoc {
        PlatformDoc {
            big: p.big,
            little: p.little,
            topology: p.topology,
        }
    }
}
