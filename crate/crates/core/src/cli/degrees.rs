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

//! Pooled degree distributions over sampled graphs.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::output::{format_real, round_sig, write_json, Format};
use crate::error::{Error, Result};
use crate::experiment::SeedPlan;
use crate::randgraph::{attempt_stream, degree_stats, generate_connected_er, generate_er};

/// Degree summary of `samples` graphs drawn with one `(n, p_link)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub n: usize,
    pub p_link: f64,
    pub samples: usize,
    pub connected_only: bool,
    /// Pooled histogram: degree -> node count over all samples.
    pub histogram: BTreeMap<usize, usize>,
    /// Mean degree over all sampled nodes.
    pub mean_degree: f64,
    /// Standard error of `mean_degree`, from the spread of per-graph means.
    pub mean_degree_se: f64,
    /// Per-graph population standard deviation, averaged over samples.
    pub stddev_degree: f64,
}

/// Samples graphs and pools their degree sequences.
///
/// Sample `i` uses the graph seed of trial `i` in a sweep with the same
/// master seed. With `connected_only` the sample is the graph a sweep trial
/// would use; otherwise it is the first, unfiltered draw from that seed.
pub fn degree_report(
    n: usize,
    p_link: f64,
    samples: usize,
    seed: u64,
    connected_only: bool,
    max_attempts: u32,
) -> Result<DegreeReport> {
    if samples == 0 {
        return Err(Error::config("samples must be at least 1"));
    }
    let plan = SeedPlan::new(seed);
    let per_graph: Vec<Result<_>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let graph_seed = plan.graph_seed(n, p_link, i);
            let g = if connected_only {
                generate_connected_er(n, p_link, graph_seed, max_attempts)?.0
            } else {
                generate_er(n, p_link, &mut attempt_stream(graph_seed, 0))?
            };
            Ok(degree_stats(&g))
        })
        .collect();

    let mut histogram = BTreeMap::new();
    let mut means = Vec::with_capacity(samples);
    let mut stddev_sum = 0.0;
    for stats in per_graph {
        let stats = stats?;
        for (&d, &c) in &stats.histogram {
            *histogram.entry(d).or_insert(0) += c;
        }
        means.push(stats.mean_degree);
        stddev_sum += stats.stddev_degree;
    }
    let count = samples as f64;
    let mean_degree = means.iter().sum::<f64>() / count;
    let mean_degree_se = if samples > 1 {
        let var = means.iter().map(|m| (m - mean_degree).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(DegreeReport {
        n,
        p_link,
        samples,
        connected_only,
        histogram,
        mean_degree,
        mean_degree_se,
        stddev_degree: stddev_sum / count,
    })
}

const DEGREE_COLUMNS: [&str; 8] = [
    "n",
    "p_link",
    "samples",
    "degree",
    "count",
    "mean_degree",
    "mean_degree_se",
    "stddev_degree",
];

#[derive(Serialize)]
struct DegreeJson {
    n: usize,
    p_link: f64,
    samples: usize,
    connected_only: bool,
    mean_degree: f64,
    mean_degree_se: f64,
    stddev_degree: f64,
    histogram: Vec<(usize, usize)>,
}

/// One CSV row per `(report, degree)`; the summary columns repeat.
pub fn write_degree_reports<W: Write>(
    reports: &[DegreeReport],
    format: Format,
    out: W,
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(DEGREE_COLUMNS)?;
            for r in reports {
                for (&degree, &count) in &r.histogram {
                    w.write_record([
                        r.n.to_string(),
                        format_real(r.p_link),
                        r.samples.to_string(),
                        degree.to_string(),
                        count.to_string(),
                        format_real(r.mean_degree),
                        format_real(r.mean_degree_se),
                        format_real(r.stddev_degree),
                    ])?;
                }
            }
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let rows: Vec<DegreeJson> = reports
                .iter()
                .map(|r| DegreeJson {
                    n: r.n,
                    p_link: round_sig(r.p_link),
                    samples: r.samples,
                    connected_only: r.connected_only,
                    mean_degree: round_sig(r.mean_degree),
                    mean_degree_se: round_sig(r.mean_degree_se),
                    stddev_degree: round_sig(r.stddev_degree),
                    histogram: r.histogram.iter().map(|(&d, &c)| (d, c)).collect(),
                })
                .collect();
            write_json(&rows, out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_has_single_row() {
        let r = degree_report(6, 1.0, 1, 0, false, 10).unwrap();
        assert_eq!(r.histogram, BTreeMap::from([(5, 6)]));
        assert_eq!(r.mean_degree, 5.0);
        assert_eq!(r.stddev_degree, 0.0);
        let mut buf = Vec::new();
        write_degree_reports(&[r], Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1).unwrap(), "6,1,1,5,6,5,0,0");
    }

    #[test]
    fn mean_degree_near_expectation() {
        let r = degree_report(100, 0.10, 200, 42, false, 10).unwrap();
        assert!((r.mean_degree - 9.9).abs() <= 0.5, "{}", r.mean_degree);
        assert_eq!(r.histogram.values().sum::<usize>(), 100 * 200);
    }

    #[test]
    fn stddev_grows_like_binomial_with_n() {
        let small = degree_report(100, 0.10, 200, 42, false, 10).unwrap();
        let large = degree_report(200, 0.10, 200, 42, false, 10).unwrap();
        let ratio = large.stddev_degree / small.stddev_degree;
        let expected = (199.0_f64 / 99.0).sqrt();
        assert!(
            (ratio - expected).abs() <= 0.10 * expected,
            "{ratio} vs {expected}"
        );
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(degree_report(10, 0.5, 0, 0, false, 10).is_err());
    }

    #[test]
    fn connected_samples_match_sweep_graphs() {
        let r = degree_report(30, 0.2, 5, 9, true, 100).unwrap();
        let graphs = crate::experiment::trial_graphs(30, 0.2, 5, &SeedPlan::new(9), 100).unwrap();
        let mean = graphs.iter().map(|g| g.mean_degree).sum::<f64>() / 5.0;
        assert!((r.mean_degree - mean).abs() < 1e-12);
    }
}
