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

//! Round-based probabilistic diffusion.
//!
//! The early adopters start out both covered and as candidates. In every
//! round each candidate `u` tries every neighbour `v`; the attempt succeeds
//! when the directed coin `draw(u, v)` is `<= p_diff`. Nodes covered for the
//! first time in a round form the candidate set of the next round. A run
//! stops as soon as every node is covered (success) or when the candidate
//! set empties with nodes still uncovered (failure).
//!
//! Coins are looked up lazily from a [`CoinSource`]. Because a node is a
//! candidate in at most one round, each directed coin is read at most once
//! per run, so a lazy source is equivalent to labelling every directed edge
//! with a random number up front.

use std::collections::HashMap;

use crate::error::{check_probability, Error, Result};
use crate::randgraph::Graph;
use crate::rng::{mix64, unit_f64};

/// Source of directed transmission coins.
///
/// `draw(u, v)` must return a value in `[0, 1)` that depends only on the
/// source and the ordered pair; `draw(u, v)` and `draw(v, u)` are distinct
/// coins.
pub trait CoinSource {
    fn draw(&self, u: usize, v: usize) -> f64;
}

/// Counter-based coins: each draw hashes `(trial_seed, u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashCoins {
    trial_seed: u64,
}

impl HashCoins {
    pub fn new(trial_seed: u64) -> Self {
        Self { trial_seed }
    }

    pub fn trial_seed(&self) -> u64 {
        self.trial_seed
    }
}

impl CoinSource for HashCoins {
    #[inline]
    fn draw(&self, u: usize, v: usize) -> f64 {
        let pair = ((u as u64) << 32) ^ (v as u64);
        unit_f64(mix64(
            mix64(self.trial_seed ^ 0xD1B5_4A32_D192_ED03).wrapping_add(mix64(pair)),
        ))
    }
}

/// Coins fixed per directed pair, for hand-built scenarios.
///
/// Pairs not listed return `default`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedCoins {
    values: HashMap<(usize, usize), f64>,
    default: f64,
}

impl ScriptedCoins {
    /// Value that passes for every `p_diff >= 0`.
    pub const PASS: f64 = 0.0;
    /// Largest value below one; fails for every `p_diff < 1`.
    pub const FAIL: f64 = 1.0 - f64::EPSILON / 2.0;

    pub fn new(default: f64) -> Self {
        Self {
            values: HashMap::new(),
            default,
        }
    }

    /// Every unlisted coin fails.
    pub fn failing() -> Self {
        Self::new(Self::FAIL)
    }

    pub fn set(&mut self, u: usize, v: usize, value: f64) -> &mut Self {
        self.values.insert((u, v), value);
        self
    }

    pub fn pass(&mut self, u: usize, v: usize) -> &mut Self {
        self.set(u, v, Self::PASS)
    }
}

impl CoinSource for ScriptedCoins {
    fn draw(&self, u: usize, v: usize) -> f64 {
        self.values.get(&(u, v)).copied().unwrap_or(self.default)
    }
}

impl<C: CoinSource + ?Sized> CoinSource for &C {
    fn draw(&self, u: usize, v: usize) -> f64 {
        (**self).draw(u, v)
    }
}

/// Transmission probability and seed set of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionParams {
    p_diff: f64,
    early_adopters: Vec<usize>,
}

impl DiffusionParams {
    /// Validates `p_diff` and that the adopter set is non-empty and free of
    /// duplicates. Range checks against a graph happen in
    /// [`DiffusionState::new`].
    pub fn new(p_diff: f64, early_adopters: impl Into<Vec<usize>>) -> Result<Self> {
        check_probability("p_diff", p_diff)?;
        let mut early_adopters = early_adopters.into();
        if early_adopters.is_empty() {
            return Err(Error::config("early adopter set must not be empty"));
        }
        early_adopters.sort_unstable();
        if early_adopters.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("early adopter set contains duplicates"));
        }
        Ok(Self {
            p_diff,
            early_adopters,
        })
    }

    pub fn p_diff(&self) -> f64 {
        self.p_diff
    }

    /// Sorted adopter ids.
    pub fn early_adopters(&self) -> &[usize] {
        &self.early_adopters
    }

    pub fn with_p_diff(&self, p_diff: f64) -> Result<Self> {
        check_probability("p_diff", p_diff)?;
        Ok(Self {
            p_diff,
            early_adopters: self.early_adopters.clone(),
        })
    }
}

/// Covered and candidate sets between rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffusionState {
    covered: Vec<bool>,
    covered_count: usize,
    candidates: Vec<usize>,
    round: usize,
}

impl DiffusionState {
    /// Round-zero state: covered and candidates both equal the adopters.
    pub fn new(g: &Graph, params: &DiffusionParams) -> Result<Self> {
        let n = g.node_count();
        let mut covered = vec![false; n];
        for &a in params.early_adopters() {
            if a >= n {
                return Err(Error::config(format!(
                    "early adopter {a} out of range for {n} nodes"
                )));
            }
            covered[a] = true;
        }
        Ok(Self {
            covered,
            covered_count: params.early_adopters().len(),
            candidates: params.early_adopters().to_vec(),
            round: 0,
        })
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Sorted candidate ids for the next round.
    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn is_covered(&self, v: usize) -> bool {
        self.covered[v]
    }

    pub fn covered_count(&self) -> usize {
        self.covered_count
    }

    pub fn covered_nodes(&self) -> Vec<usize> {
        set_members(&self.covered)
    }

    pub fn all_covered(&self) -> bool {
        self.covered_count == self.covered.len()
    }

    /// Runs one round and returns how many nodes it covered.
    ///
    /// Candidates are processed in ascending id order. A node covered during
    /// this round joins the next round's candidates, never this one's, so
    /// the result does not depend on that order.
    pub fn step<C: CoinSource + ?Sized>(
        &mut self,
        g: &Graph,
        p_diff: f64,
        coins: &C,
    ) -> Result<usize> {
        if self.candidates.is_empty() {
            return Err(Error::Usage(
                "cannot run a diffusion round without candidates".into(),
            ));
        }
        let mut fresh = Vec::new();
        for &u in &self.candidates {
            for &v in g.neighbors(u) {
                // Covered targets still consume their coin.
                if coins.draw(u, v) <= p_diff && !self.covered[v] {
                    self.covered[v] = true;
                    fresh.push(v);
                }
            }
        }
        fresh.sort_unstable();
        self.covered_count += fresh.len();
        self.candidates = fresh;
        self.round += 1;
        Ok(self.candidates.len())
    }
}

/// Result of one diffusion run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffusionOutcome {
    pub success: bool,
    /// Executed rounds; on success, the round in which the last node was
    /// covered.
    pub rounds: usize,
    pub newly_covered_per_round: Vec<usize>,
    pub final_covered_count: usize,
    covered: Vec<bool>,
}

impl DiffusionOutcome {
    pub fn is_covered(&self, v: usize) -> bool {
        self.covered[v]
    }

    pub fn covered_nodes(&self) -> Vec<usize> {
        set_members(&self.covered)
    }

    pub fn uncovered_nodes(&self) -> Vec<usize> {
        (0..self.covered.len())
            .filter(|&v| !self.covered[v])
            .collect()
    }
}

/// Runs diffusion to completion.
///
/// The graph is assumed connected; failure is still reported correctly if
/// it is not. Adopters covering the whole graph give success in zero
/// rounds.
pub fn run<C: CoinSource + ?Sized>(
    g: &Graph,
    params: &DiffusionParams,
    coins: &C,
) -> Result<DiffusionOutcome> {
    run_with_probability(g, params, params.p_diff(), coins)
}

/// [`run`] with `p_diff` overridden, so one coin source can be replayed at
/// several transmission probabilities.
pub fn run_with_probability<C: CoinSource + ?Sized>(
    g: &Graph,
    params: &DiffusionParams,
    p_diff: f64,
    coins: &C,
) -> Result<DiffusionOutcome> {
    check_probability("p_diff", p_diff)?;
    let mut state = DiffusionState::new(g, params)?;
    let mut per_round = Vec::new();
    while !state.all_covered() && !state.candidates().is_empty() {
        per_round.push(state.step(g, p_diff, coins)?);
    }
    Ok(DiffusionOutcome {
        success: state.all_covered(),
        rounds: state.round(),
        newly_covered_per_round: per_round,
        final_covered_count: state.covered_count(),
        covered: state.covered,
    })
}

fn set_members(flags: &[bool]) -> Vec<usize> {
    flags
        .iter()
        .enumerate()
        .filter_map(|(v, &c)| c.then_some(v))
        .collect()
}
