#![allow(dead_code)]

pub mod oracle;

use picalc::generate::{GenConfig, Generator};
use picalc::nominal::Permutation;
use picalc::Agent;

pub fn agent(seed: u64, size: usize) -> Agent {
    Generator::new(seed).agent(size)
}

pub fn finite_agent(seed: u64, size: usize) -> Agent {
    let cfg = GenConfig {
        replication: false,
        ..GenConfig::default()
    };
    Generator::with_config(seed, cfg).agent(size)
}

pub fn permutation(seed: u64) -> Permutation {
    Generator::new(seed ^ 0x5eed).permutation()
}
