//! Thread-to-core placement for a solution on a clustered topology.
//!
//! Threads are numbered from 1 in stage order, replicas of a stage being
//! consecutive.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::model::{Cluster, CoreType, CoreUsage, Platform, Solution, Stage, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Loose,
    Guided,
    Packed,
    Distant,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Loose, Policy::Guided, Policy::Packed, Policy::Distant];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Loose => "loose",
            Policy::Guided => "guided",
            Policy::Packed => "packed",
            Policy::Distant => "distant",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Policy> {
        match Policy::ALL.into_iter().find(|p| p.name() == s) {
            Some(p) => Ok(p),
            None => input(format!("unknown pinning policy {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "cores", rename_all = "snake_case")]
pub enum Placement {
    AnyCore,
    CoreSet(Vec<u32>),
    Core(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreadPin {
    pub thread: usize,
    /// 1-based stage index.
    pub stage: usize,
    /// 0-based replica index within the stage.
    pub replica: usize,
    pub core_type: CoreType,
    pub placement: Placement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinMap {
    pub policy: Policy,
    pub threads: Vec<ThreadPin>,
}

impl PinMap {
    /// Single-core placement of thread `thread` (1-based), if any.
    pub fn core_of(&self, thread: usize) -> Option<u32> {
        match self.threads.get(thread.checked_sub(1)?)?.placement {
            Placement::Core(c) => Some(c),
            _ => None,
        }
    }
}

pub fn pin(solution: &Solution, platform: &Platform, policy: Policy) -> Result<PinMap> {
    pin_stages(solution.stages(), platform, policy)
}

pub fn pin_stages(stages: &[Stage], platform: &Platform, policy: Policy) -> Result<PinMap> {
    let used = CoreUsage::of(stages);
    for core_type in CoreType::ALL {
        let (needed, available) = (used.get(core_type), platform.cores(core_type));
        if needed > available {
            return Err(Error::Capacity {
                core_type,
                needed,
                available,
            });
        }
    }
    let slots: Vec<(usize, usize, CoreType)> = stages
        .iter()
        .enumerate()
        .flat_map(|(i, s)| (0..s.cores).map(move |k| (i + 1, k, s.core_type)))
        .collect();

    let placements: Vec<Placement> = match policy {
        Policy::Loose => vec![Placement::AnyCore; slots.len()],
        Policy::Guided => {
            let topo = topology(platform, policy)?;
            slots
                .iter()
                .map(|&(_, _, v)| Placement::CoreSet(sorted_cores(topo, v)))
                .collect()
        }
        Policy::Packed => {
            let topo = topology(platform, policy)?;
            let mut free: BTreeMap<CoreType, std::vec::IntoIter<u32>> = CoreType::ALL
                .into_iter()
                .map(|v| (v, sorted_cores(topo, v).into_iter()))
                .collect();
            slots
                .iter()
                .map(|&(_, _, v)| Placement::Core(free.get_mut(&v).and_then(Iterator::next).expect("capacity checked")))
                .collect()
        }
        Policy::Distant => {
            let topo = topology(platform, policy)?;
            let mut rr: BTreeMap<CoreType, RoundRobin> = CoreType::ALL
                .into_iter()
                .map(|v| (v, RoundRobin::new(topo, v)))
                .collect();
            slots
                .iter()
                .map(|&(_, _, v)| Placement::Core(rr.get_mut(&v).expect("both types").next_core()))
                .collect()
        }
    };

    let threads = slots
        .into_iter()
        .zip(placements)
        .enumerate()
        .map(|(t, ((stage, replica, core_type), placement))| ThreadPin {
            thread: t + 1,
            stage,
            replica,
            core_type,
            placement,
        })
        .collect();
    Ok(PinMap { policy, threads })
}

fn topology(platform: &Platform, policy: Policy) -> Result<&Topology> {
    platform
        .topology
        .as_ref()
        .ok_or_else(|| Error::Input(format!("the {policy} policy needs a platform topology")))
}

fn sorted_cores(topo: &Topology, core_type: CoreType) -> Vec<u32> {
    let mut cores: Vec<u32> = topo
        .clusters
        .iter()
        .filter(|c| c.core_type == core_type)
        .flat_map(|c| c.cores.iter().copied())
        .collect();
    cores.sort_unstable();
    cores
}

/// Cycles over one type's clusters, alternating packages first, and hands
/// out the lowest free core of each visited cluster.
struct RoundRobin {
    clusters: Vec<Vec<u32>>,
    next: usize,
}

impl RoundRobin {
    fn new(topo: &Topology, core_type: CoreType) -> RoundRobin {
        let mut by_package: BTreeMap<u32, Vec<&Cluster>> = BTreeMap::new();
        for c in topo.clusters.iter().filter(|c| c.core_type == core_type) {
            by_package.entry(c.package.unwrap_or(0)).or_default().push(c);
        }
        let rounds = by_package.values().map(Vec::len).max().unwrap_or(0);
        let mut clusters = Vec::new();
        for k in 0..rounds {
            for list in by_package.values() {
                if let Some(c) = list.get(k) {
                    let mut cores = c.cores.clone();
                    // Popped from the back, so keep the lowest id last.
                    cores.sort_unstable_by(|a, b| b.cmp(a));
                    clusters.push(cores);
                }
            }
        }
        RoundRobin { clusters, next: 0 }
    }

    fn next_core(&mut self) -> u32 {
        let k = self.clusters.len();
        for step in 0..k {
            let i = (self.next + step) % k;
            if let Some(core) = self.clusters[i].pop() {
                self.next = (i + 1) % k;
                return core;
            }
        }
        unreachable!("capacity checked before placement")
    }
}
