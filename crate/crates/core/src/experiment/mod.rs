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

//! Parameter sweeps over `(n, p_link, p_diff, k)` cells.
//!
//! Each trial of a cell draws a fresh connected Erdős–Rényi graph, a uniform
//! adopter set of size `k`, and a coin source, then runs one diffusion. A
//! cell reports the fraction of successful trials and the mean round count
//! over the successful ones, both with 95% intervals.

mod seed;
pub mod stats;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use seed::{Purpose, SeedPlan};
pub use stats::{mean_ci, proportion_ci, MeanCi};

use crate::diffusion::{self, DiffusionParams, HashCoins};
use crate::error::{check_probability, Error, Result};
use crate::randgraph::{degree_stats, generate_connected_er, Graph, DEFAULT_MAX_ATTEMPTS};

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_MASTER_SEED: u64 = 42;
pub const CONFIDENCE: f64 = 0.95;

/// One grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub n: usize,
    pub p_link: f64,
    pub p_diff: f64,
    pub k_adopters: usize,
    pub trials: usize,
}

impl CellParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        check_probability("p_link", self.p_link)?;
        check_probability("p_diff", self.p_diff)?;
        if self.k_adopters == 0 || self.k_adopters > self.n {
            return Err(Error::config(format!(
                "adopter count {} outside 1..={}",
                self.k_adopters, self.n
            )));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!(
            "n={} p_link={} p_diff={} k={}",
            self.n, self.p_link, self.p_diff, self.k_adopters
        )
    }
}

/// Aggregated metrics of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub params: CellParams,
    pub successes: usize,
    pub p_success: f64,
    pub p_success_ci: (f64, f64),
    /// Absent when no trial succeeded.
    pub mean_rounds: Option<f64>,
    pub rounds_ci: Option<(f64, f64)>,
    pub mean_degree: f64,
    pub stddev_degree: f64,
    pub mean_regen_attempts: f64,
}

impl CellResult {
    pub fn p_success_halfwidth(&self) -> f64 {
        (self.p_success_ci.1 - self.p_success_ci.0) / 2.0
    }

    pub fn rounds_halfwidth(&self) -> Option<f64> {
        self.rounds_ci.map(|(lo, hi)| (hi - lo) / 2.0)
    }
}

/// The whole sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub p_link_values: Vec<f64>,
    pub p_diff_values: Vec<f64>,
    pub adopter_counts: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub max_regen_attempts: u32,
}

impl Default for ExperimentConfig {
    /// 2 x 5 x 20 x 3 grid, 200 trials per cell.
    fn default() -> Self {
        Self {
            n_values: vec![100, 200],
            p_link_values: vec![0.05, 0.10, 0.15, 0.20, 0.30],
            p_diff_values: inclusive_range(0.05, 1.0, 0.05),
            adopter_counts: vec![1, 10, 20],
            trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_MASTER_SEED,
            max_regen_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("n", self.n_values.is_empty()),
            ("p_link", self.p_link_values.is_empty()),
            ("p_diff", self.p_diff_values.is_empty()),
            ("adopters", self.adopter_counts.is_empty()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, empty)| *empty) {
            return Err(Error::config(format!("{name} grid is empty")));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.max_regen_attempts == 0 {
            return Err(Error::config("max_regen_attempts must be at least 1"));
        }
        for &p in &self.p_link_values {
            check_probability("p_link", p)?;
        }
        for &p in &self.p_diff_values {
            check_probability("p_diff", p)?;
        }
        for &n in &self.n_values {
            if n < 2 {
                return Err(Error::config(format!("n must be at least 2, got {n}")));
            }
            for &k in &self.adopter_counts {
                if k == 0 || k > n {
                    return Err(Error::config(format!(
                        "adopters = {k} outside 1..={n} for n = {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Cells in sweep order: n, then p_link, then p_diff, then k.
    pub fn cells(&self) -> Vec<CellParams> {
        let mut out = Vec::new();
        for &n in &self.n_values {
            for &p_link in &self.p_link_values {
                out.extend(self.cells_for(n, p_link));
            }
        }
        out
    }

    fn cells_for(&self, n: usize, p_link: f64) -> impl Iterator<Item = CellParams> + '_ {
        self.p_diff_values.iter().flat_map(move |&p_diff| {
            self.adopter_counts
                .iter()
                .map(move |&k_adopters| CellParams {
                    n,
                    p_link,
                    p_diff,
                    k_adopters,
                    trials: self.trials,
                })
        })
    }

    pub fn seed_plan(&self) -> SeedPlan {
        SeedPlan::new(self.master_seed)
    }
}

/// `start, start + step, ...` up to and including `stop`.
///
/// Values are rounded to 1e-9 so that e.g. `0.05:1.0:0.05` ends on exactly
/// `1.0`.
pub fn inclusive_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if step.is_nan() || step <= 0.0 || stop < start {
        return Vec::new();
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

/// `k` distinct node ids drawn uniformly without replacement, sorted.
pub fn select_early_adopters<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    stream: &mut R,
) -> Result<Vec<usize>> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::config(format!("adopter count {k} outside 1..={n}")));
    }
    let mut picked = index::sample(stream, n, k).into_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// A connected graph drawn for one trial, with its summary numbers.
#[derive(Debug, Clone)]
pub struct TrialGraph {
    pub graph: Graph,
    pub attempts: u32,
    pub mean_degree: f64,
    pub stddev_degree: f64,
}

/// The graphs used by trials `0..trials` of every cell with this
/// `(n, p_link)`.
pub fn trial_graphs(
    n: usize,
    p_link: f64,
    trials: usize,
    plan: &SeedPlan,
    max_regen_attempts: u32,
) -> Result<Vec<TrialGraph>> {
    let drawn: Vec<Result<TrialGraph>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (graph, attempts) = generate_connected_er(
                n,
                p_link,
                plan.graph_seed(n, p_link, t),
                max_regen_attempts,
            )?;
            let stats = degree_stats(&graph);
            Ok(TrialGraph {
                graph,
                attempts,
                mean_degree: stats.mean_degree,
                stddev_degree: stats.stddev_degree,
            })
        })
        .collect();
    // First failure in trial order, independent of scheduling.
    drawn.into_iter().collect()
}

/// Outcome of one trial, as needed for aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: bool,
    pub rounds: usize,
}

/// Runs trial `trial` of `cell` on a pre-drawn graph.
pub fn run_trial(
    cell: &CellParams,
    trial: usize,
    graph: &Graph,
    plan: &SeedPlan,
) -> Result<TrialOutcome> {
    let mut stream = plan.adopter_stream(cell.n, cell.p_link, cell.k_adopters, trial);
    let adopters = select_early_adopters(graph, cell.k_adopters, &mut stream)?;
    let params = DiffusionParams::new(cell.p_diff, adopters)?;
    let coins = HashCoins::new(plan.coin_seed(cell.n, cell.p_link, cell.k_adopters, trial));
    let out = diffusion::run(graph, &params, &coins)?;
    Ok(TrialOutcome {
        success: out.success,
        rounds: out.rounds,
    })
}

/// Aggregates a cell over graphs already drawn for its `(n, p_link)`.
pub fn evaluate_cell(
    cell: &CellParams,
    graphs: &[TrialGraph],
    plan: &SeedPlan,
) -> Result<CellResult> {
    cell.validate()?;
    if graphs.len() < cell.trials {
        return Err(Error::Usage(format!(
            "{} graphs supplied for {} trials",
            graphs.len(),
            cell.trials
        )));
    }
    let outcomes: Vec<Result<TrialOutcome>> = graphs[..cell.trials]
        .par_iter()
        .enumerate()
        .map(|(t, tg)| run_trial(cell, t, &tg.graph, plan))
        .collect();

    let mut successes = 0usize;
    let mut rounds = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        if outcome.success {
            successes += 1;
            rounds.push(outcome.rounds as f64);
        }
    }
    let used = &graphs[..cell.trials];
    let trials = cell.trials as f64;
    let rounds_ci = mean_ci(&rounds, CONFIDENCE);
    Ok(CellResult {
        params: *cell,
        successes,
        p_success: successes as f64 / trials,
        p_success_ci: proportion_ci(successes as u64, cell.trials as u64, CONFIDENCE),
        mean_rounds: rounds_ci.map(|ci| ci.mean),
        rounds_ci: rounds_ci.map(|ci| (ci.lo, ci.hi)),
        mean_degree: used.iter().map(|g| g.mean_degree).sum::<f64>() / trials,
        stddev_degree: used.iter().map(|g| g.stddev_degree).sum::<f64>() / trials,
        mean_regen_attempts: used.iter().map(|g| f64::from(g.attempts)).sum::<f64>() / trials,
    })
}

/// Runs a single cell from scratch.
pub fn run_cell(cell: &CellParams, plan: &SeedPlan, max_regen_attempts: u32) -> Result<CellResult> {
    cell.validate()?;
    let graphs = trial_graphs(cell.n, cell.p_link, cell.trials, plan, max_regen_attempts)?;
    evaluate_cell(cell, &graphs, plan)
}

/// Runs every cell of `config` in sweep order.
///
/// Graphs are drawn once per `(n, p_link)` and shared by all `p_diff` and
/// `k` cells; results do not depend on the rayon pool size.
pub fn sweep(config: &ExperimentConfig) -> Result<Vec<CellResult>> {
    config.validate()?;
    let plan = config.seed_plan();
    let mut results = Vec::with_capacity(config.cells().len());
    for &n in &config.n_values {
        for &p_link in &config.p_link_values {
            let graphs = trial_graphs(n, p_link, config.trials, &plan, config.max_regen_attempts)
                .map_err(|e| Error::Cell {
                cell: format!("n={n} p_link={p_link}"),
                source: Box::new(e),
            })?;
            let cells: Vec<CellParams> = config.cells_for(n, p_link).collect();
            let group: Vec<Result<CellResult>> = cells
                .par_iter()
                .map(|cell| {
                    evaluate_cell(cell, &graphs, &plan).map_err(|e| Error::Cell {
                        cell: cell.label(),
                        source: Box::new(e),
                    })
                })
                .collect();
            for r in group {
                results.push(r?);
            }
        }
    }
    Ok(results)
}
