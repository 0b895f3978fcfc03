//! Bundled DVB-S2 receiver latency profiles (µs per task) for four platforms.

use crate::error::{input, Result};
use crate::model::{Platform, TaskChain};

/// Bits in one DVB-S2 frame.
pub const FRAME_BITS: u64 = 14232;

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    /// Frames processed by one execution of the chain.
    pub frames_per_stream: u64,
    /// Big and little cores on the board.
    pub cores: (usize, usize),
    json: &'static str,
}

impl Fixture {
    pub fn chain(&self) -> TaskChain {
        serde_json::from_str(self.json).expect("bundled fixture parses")
    }

    pub fn bits_per_stream(&self) -> u64 {
        self.frames_per_stream * FRAME_BITS
    }

    pub fn platform(&self) -> Platform {
        Platform::new(self.cores.0, self.cores.1).expect("bundled platforms have cores")
    }

    pub fn json(&self) -> &'static str {
        self.json
    }
}

pub const FIXTURES: [Fixture; 4] = [
    Fixture {
        name: "orangepi5plus",
        cores: (4, 4),
        description: "Orange Pi 5+, Rockchip RK3588",
        frames_per_stream: 4,
        json: include_str!("../fixtures/orangepi5plus.json"),
    },
    Fixture {
        name: "macstudio",
        cores: (16, 4),
        description: "Mac Studio, Apple M1 Ultra",
        frames_per_stream: 4,
        json: include_str!("../fixtures/macstudio.json"),
    },
    Fixture {
        name: "ai370",
        cores: (4, 8),
        description: "Minisforum AI370, AMD Ryzen AI 9 HX 370",
        frames_per_stream: 16,
        json: include_str!("../fixtures/ai370.json"),
    },
    Fixture {
        name: "x7ti",
        cores: (6, 8),
        description: "Minisforum X7 Ti, Intel Core Ultra 9 185H",
        frames_per_stream: 8,
        json: include_str!("../fixtures/x7ti.json"),
    },
];

pub fn fixture(name: &str) -> Result<&'static Fixture> {
    match FIXTURES.iter().find(|f| f.name == name) {
        Some(f) => Ok(f),
        None => input(format!("unknown fixture {name:?}")),
    }
}
