//! Strategy names shared by the CLI and the experiment driver.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::baselines::{os_style_decomposition, otac_schedule};
use crate::error::{input, Error, Result};
use crate::fertac::fertac_schedule;
use crate::herad::herad_schedule;
use crate::model::{CoreType, Platform, Solution, TaskChain};
use crate::twocatac::{twocatac_schedule_with_budget, DEFAULT_MAX_EXPANSIONS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Fertac,
    TwoCatac,
    Herad,
    OtacBig,
    OtacLittle,
    /// One stage per task, replicable tasks on this many cores.
    Os(usize),
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::Fertac,
        Strategy::TwoCatac,
        Strategy::Herad,
        Strategy::OtacBig,
        Strategy::OtacLittle,
        Strategy::Os(1),
        Strategy::Os(2),
        Strategy::Os(3),
    ];

    /// The strategies compared in the slowdown study.
    pub const STUDY: [Strategy; 5] = [
        Strategy::OtacLittle,
        Strategy::OtacBig,
        Strategy::Fertac,
        Strategy::TwoCatac,
        Strategy::Herad,
    ];

    pub fn name(self) -> String {
        match self {
            Strategy::Fertac => "fertac".into(),
            Strategy::TwoCatac => "twocatac".into(),
            Strategy::Herad => "herad".into(),
            Strategy::OtacBig => "otac-b".into(),
            Strategy::OtacLittle => "otac-l".into(),
            Strategy::Os(f) => format!("os-r{f}"),
        }
    }

    /// Runs the strategy. Heuristics that find nothing report
    /// [`Error::Infeasible`]; OS layouts ignore the platform budget.
    pub fn run(self, chain: &TaskChain, platform: &Platform, max_expansions: u64) -> Result<Solution> {
        let found = match self {
            Strategy::Fertac => fertac_schedule(chain, platform)?,
            Strategy::TwoCatac => twocatac_schedule_with_budget(chain, platform, max_expansions)?,
            Strategy::Herad => Some(herad_schedule(chain, platform)?),
            Strategy::OtacBig => otac_schedule(chain, platform, CoreType::Big)?,
            Strategy::OtacLittle => otac_schedule(chain, platform, CoreType::Little)?,
            Strategy::Os(f) => Some(Solution::new(chain, os_style_decomposition(chain, f))?),
        };
        found.ok_or_else(|| Error::Infeasible(format!("{self} found no solution on {platform}")))
    }

    pub fn run_default(self, chain: &TaskChain, platform: &Platform) -> Result<Solution> {
        self.run(chain, platform, DEFAULT_MAX_EXPANSIONS)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "fertac" => Ok(Strategy::Fertac),
            "twocatac" | "2catac" => Ok(Strategy::TwoCatac),
            "herad" => Ok(Strategy::Herad),
            "otac-b" => Ok(Strategy::OtacBig),
            "otac-l" => Ok(Strategy::OtacLittle),
            "os-r1" => Ok(Strategy::Os(1)),
            "os-r2" => Ok(Strategy::Os(2)),
            "os-r3" => Ok(Strategy::Os(3)),
            _ => input(format!("unknown strategy {s:?}")),
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Strategy, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
