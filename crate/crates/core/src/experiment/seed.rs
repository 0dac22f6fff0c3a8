// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use crate::rng::{derive_seed, stream_from_seed, Stream};

/// What a derived seed is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Graph,
    Adopters,
    Coins,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Graph => 0x67_7261_7068,
            Purpose::Adopters => 0x61_646f_7074,
            Purpose::Coins => 0x63_6f69_6e73,
        }
    }
}

/// Derives every per-trial seed from one master seed.
///
/// Seeds are keyed by parameter values, not by position in a sweep:
///
/// * graph: `(n, p_link, trial)`
/// * adopters and coins: `(n, p_link, k, trial)`
///
/// So all cells sharing `(n, p_link)` see the same graph in trial `t`, and
/// cells differing only in `p_diff` also share adopters and coins. A cell
/// run on its own reproduces the numbers it gets inside a full sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedPlan {
    master_seed: u64,
}

impl SeedPlan {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Seed for `purpose` under an arbitrary integer key.
    pub fn derive(&self, purpose: Purpose, key: &[u64]) -> u64 {
        let mut words = Vec::with_capacity(key.len() + 1);
        words.push(purpose.tag());
        words.extend_from_slice(key);
        derive_seed(self.master_seed, &words)
    }

    pub fn graph_seed(&self, n: usize, p_link: f64, trial: usize) -> u64 {
        self.derive(Purpose::Graph, &[n as u64, p_link.to_bits(), trial as u64])
    }

    pub fn adopter_stream(&self, n: usize, p_link: f64, k: usize, trial: usize) -> Stream {
        stream_from_seed(self.derive(
            Purpose::Adopters,
            &[n as u64, p_link.to_bits(), k as u64, trial as u64],
        ))
    }

    pub fn coin_seed(&self, n: usize, p_link: f64, k: usize, trial: usize) -> u64 {
        self.derive(
            Purpose::Coins,
            &[n as u64, p_link.to_bits(), k as u64, trial as u64],
        )
    }
}
