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

use std::collections::HashSet;

use probdiff::diffusion::{
    run, run_with_probability, CoinSource, DiffusionParams, DiffusionState, HashCoins,
};
use probdiff::experiment::{
    evaluate_cell, run_cell, trial_graphs, CellParams, ExperimentConfig, SeedPlan,
};
use probdiff::randgraph::{degree_stats, generate_connected_er, generate_er, is_connected, Graph};
use probdiff::rng::stream_from_seed;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use rand::Rng;

fn check_graph_invariants(g: &Graph) {
    let mut degree_sum = 0;
    for u in 0..g.node_count() {
        let list = g.neighbors(u);
        degree_sum += list.len();
        assert!(!list.contains(&u), "self-loop at {u}");
        assert!(
            list.windows(2).all(|w| w[0] < w[1]),
            "unsorted or duplicate at {u}"
        );
        for &v in list {
            assert!(
                g.neighbors(v).binary_search(&u).is_ok(),
                "asymmetric {u}-{v}"
            );
        }
    }
    assert_eq!(degree_sum, 2 * g.edge_count());
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let root = self.find(self.0[x]);
            self.0[x] = root;
        }
        self.0[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=12, 0.0f64..=1.0, any::<u64>())
        .prop_map(|(n, p, seed)| generate_er(n, p, &mut stream_from_seed(seed)).unwrap())
}

fn connected_graph() -> impl Strategy<Value = Graph> {
    (2usize..=25, 0.15f64..=0.7, any::<u64>())
        .prop_map(|(n, p, seed)| generate_connected_er(n, p, seed, 100_000).unwrap().0)
}

fn adopters_for(n: usize, picks: &[usize]) -> Vec<usize> {
    let mut set: Vec<usize> = picks
        .iter()
        .map(|p| p % n)
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    set.sort_unstable();
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_graphs_are_simple(n in 2usize..60, p in 0.0f64..=1.0, seed: u64) {
        let g = generate_er(n, p, &mut stream_from_seed(seed)).unwrap();
        check_graph_invariants(&g);
        let stats = degree_stats(&g);
        prop_assert_eq!(stats.histogram.values().sum::<usize>(), n);
        prop_assert!((stats.mean_degree - 2.0 * g.edge_count() as f64 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn generation_is_deterministic(n in 2usize..60, p in 0.0f64..=1.0, seed: u64) {
        let a = generate_er(n, p, &mut stream_from_seed(seed)).unwrap();
        let b = generate_er(n, p, &mut stream_from_seed(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn edge_sets_nest_in_p_link(n in 2usize..40, p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, seed: u64) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let small = generate_er(n, lo, &mut stream_from_seed(seed)).unwrap();
        let large = generate_er(n, hi, &mut stream_from_seed(seed)).unwrap();
        let edges: HashSet<_> = large.edges().collect();
        prop_assert!(small.edges().all(|e| edges.contains(&e)));
    }

    #[test]
    fn diffusion_outcome_invariants(g in connected_graph(), picks in prop::collection::vec(any::<usize>(), 1..4), p in 0.0f64..=1.0, seed: u64) {
        let n = g.node_count();
        let adopters = adopters_for(n, &picks);
        let params = DiffusionParams::new(p, adopters.clone()).unwrap();
        let out = run(&g, &params, &HashCoins::new(seed)).unwrap();
        prop_assert_eq!(out.success, out.final_covered_count == n);
        prop_assert_eq!(out.newly_covered_per_round.len(), out.rounds);
        prop_assert_eq!(adopters.len() + out.newly_covered_per_round.iter().sum::<usize>(), out.final_covered_count);
        prop_assert!(out.rounds <= n);
        prop_assert_eq!(&out, &run(&g, &params, &HashCoins::new(seed)).unwrap());
    }

    #[test]
    fn rounds_follow_the_candidate_rule(g in connected_graph(), picks in prop::collection::vec(any::<usize>(), 1..4), p in 0.0f64..=1.0, seed: u64) {
        let adopters = adopters_for(g.node_count(), &picks);
        let params = DiffusionParams::new(p, adopters).unwrap();
        let coins = HashCoins::new(seed);
        let mut state = DiffusionState::new(&g, &params).unwrap();
        while !state.all_covered() && !state.candidates().is_empty() {
            let before = state.clone();
            state.step(&g, p, &coins).unwrap();
            // Reference: uncovered nodes hit by some round-start candidate.
            let mut expected: Vec<usize> = (0..g.node_count())
                .filter(|&v| !before.is_covered(v))
                .filter(|&v| {
                    before.candidates().iter().any(|&u| {
                        g.neighbors(u).contains(&v) && coins.draw(u, v) <= p
                    })
                })
                .collect();
            expected.sort_unstable();
            prop_assert_eq!(state.candidates(), expected.as_slice());
            prop_assert!(before.covered_nodes().iter().all(|&v| state.is_covered(v)));
            prop_assert!(state.candidates().iter().all(|&v| state.is_covered(v)));
            prop_assert_eq!(state.round(), before.round() + 1);
        }
    }

    #[test]
    fn coverage_is_monotone_in_p_diff(g in connected_graph(), picks in prop::collection::vec(any::<usize>(), 1..4), p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, seed: u64) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let params = DiffusionParams::new(lo, adopters_for(g.node_count(), &picks)).unwrap();
        let coins = HashCoins::new(seed);
        let a = run_with_probability(&g, &params, lo, &coins).unwrap();
        let b = run_with_probability(&g, &params, hi, &coins).unwrap();
        prop_assert!(a.covered_nodes().iter().all(|&v| b.is_covered(v)));
        prop_assert!(!a.success || b.success);
    }
}

#[test]
fn connectivity_agrees_with_union_find() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..1000 {
        let g = small_graph().new_tree(&mut runner).unwrap().current();
        let mut uf = UnionFind((0..g.node_count()).collect());
        for (u, v) in g.edges() {
            uf.union(u, v);
        }
        let root = uf.find(0);
        let oracle = (0..g.node_count()).all(|v| uf.find(v) == root);
        assert_eq!(is_connected(&g), oracle);
    }
}

#[test]
fn edge_count_mean_within_three_standard_errors() {
    let (n, p) = (60usize, 0.2);
    let pairs = (n * (n - 1) / 2) as f64;
    let seeds = 400;
    let mean = (0..seeds)
        .map(|s| {
            generate_er(n, p, &mut stream_from_seed(s))
                .unwrap()
                .edge_count() as f64
        })
        .sum::<f64>()
        / seeds as f64;
    let se = (pairs * p * (1.0 - p) / seeds as f64).sqrt();
    assert!(
        (mean - pairs * p).abs() <= 3.0 * se,
        "mean {mean} vs {}",
        pairs * p
    );
}

#[test]
fn exact_enumeration_on_triangle_cell() {
    // n = 3, p_link = 1 is always the triangle; with one adopter and
    // p_diff = 1/2, 32 of the 64 directed coin patterns reach both other
    // nodes: both direct arcs (16), or one direct arc plus the relay (2 x 8).
    let g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
    let arcs: Vec<(usize, usize)> = g.edges().flat_map(|(u, v)| [(u, v), (v, u)]).collect();
    let mut good = 0;
    for mask in 0u32..64 {
        let open = |u: usize, v: usize| {
            let i = arcs.iter().position(|&a| a == (u, v)).unwrap();
            mask >> i & 1 == 1
        };
        // Node 0 seeds; 1 and 2 must both be reached.
        let r1 = open(0, 1) || (open(0, 2) && open(2, 1));
        let r2 = open(0, 2) || (open(0, 1) && open(1, 2));
        if r1 && r2 {
            good += 1;
        }
    }
    let exact = f64::from(good) / 64.0;
    assert_eq!(exact, 0.5);

    let cell = CellParams {
        n: 3,
        p_link: 1.0,
        p_diff: 0.5,
        k_adopters: 1,
        trials: 10_000,
    };
    let r = run_cell(&cell, &SeedPlan::new(42), 10).unwrap();
    let se = (exact * (1.0 - exact) / 10_000.0).sqrt();
    assert!(
        (r.p_success - exact).abs() <= 3.0 * se,
        "{} vs {exact}",
        r.p_success
    );
}

#[test]
fn successes_never_drop_when_p_diff_rises() {
    let plan = SeedPlan::new(5);
    let graphs = trial_graphs(60, 0.1, 100, &plan, 1000).unwrap();
    let mut previous = 0;
    for step in 0..=10 {
        let cell = CellParams {
            n: 60,
            p_link: 0.1,
            p_diff: step as f64 / 10.0,
            k_adopters: 3,
            trials: 100,
        };
        let r = evaluate_cell(&cell, &graphs, &plan).unwrap();
        assert!(
            r.successes >= previous,
            "p_diff {}: {} < {previous}",
            cell.p_diff,
            r.successes
        );
        previous = r.successes;
    }
    assert_eq!(previous, 100);
}

#[test]
fn small_sweep_result_invariants() {
    let config = ExperimentConfig {
        n_values: vec![40],
        p_link_values: vec![0.1, 0.2],
        p_diff_values: vec![0.1, 0.4, 1.0],
        adopter_counts: vec![1, 5],
        trials: 60,
        master_seed: 9,
        max_regen_attempts: 1000,
    };
    let results = probdiff::experiment::sweep(&config).unwrap();
    assert_eq!(results.len(), 12);
    assert_eq!(
        results.iter().map(|r| r.params).collect::<Vec<_>>(),
        config.cells()
    );
    for r in &results {
        let (lo, hi) = r.p_success_ci;
        assert!(0.0 <= lo && lo <= r.p_success && r.p_success <= hi && hi <= 1.0);
        assert_eq!(r.p_success, r.successes as f64 / r.params.trials as f64);
        assert_eq!(r.mean_rounds.is_some(), r.successes > 0);
        assert!(r.mean_regen_attempts >= 1.0);
        if r.params.p_diff == 1.0 {
            assert_eq!(r.p_success, 1.0);
        }
    }
}

#[test]
fn hash_coins_look_uniform() {
    // Ten equal bins over 200k draws from many trial seeds.
    let mut rng = stream_from_seed(3);
    let mut bins = [0u32; 10];
    for _ in 0..20_000 {
        let coins = HashCoins::new(rng.random());
        for v in 0..10 {
            bins[(coins.draw(0, v) * 10.0) as usize] += 1;
        }
    }
    let expected = 20_000.0;
    let chi2: f64 = bins
        .iter()
        .map(|&b| (f64::from(b) - expected).powi(2) / expected)
        .sum();
    // 99.9th percentile of chi-square with 9 degrees of freedom.
    assert!(chi2 < 27.88, "chi2 = {chi2}");
}
