//! Period-minimal pipelined and replicated scheduling of task chains on
//! big.LITTLE multicores.
//!
//! Strategies: [`fertac`], [`twocatac`], the optimal [`herad`] DP and the
//! single-type [`baselines`]. [`oracle`] is an exhaustive reference for small
//! instances, [`sim`] replays a solution as a buffered pipeline and
//! [`pinning`] maps its threads to cores.

pub mod baselines;
pub mod error;
pub mod fertac;
pub mod fixtures;
pub mod harness;
pub mod herad;
pub mod model;
pub mod oracle;
pub mod pinning;
pub mod sched;
pub mod sim;
pub mod strategy;
pub mod synth;
pub mod twocatac;
pub mod weight;

pub use error::{Error, Result};
pub use model::{
    is_resource_valid, is_valid, period, stage_weight, ChainDoc, Cluster, CoreType, CoreUsage, Platform, PlatformDoc,
    Solution, SolutionDoc, Stage, Task, TaskChain, TaskDoc, Topology,
};
pub use strategy::Strategy;
pub use weight::{Rational, Weight};
