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

//! Confidence intervals for the two per-cell metrics.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959964;

fn normal_quantile(confidence: f64) -> f64 {
    if confidence == 0.95 {
        Z_95
    } else {
        Normal::standard().inverse_cdf(0.5 + confidence / 2.0)
    }
}

/// Wilson score interval for `successes` out of `trials`.
///
/// The bounds are pinned to exactly 0 and 1 at the extremes, where the
/// closed form can land one ulp inside.
pub fn proportion_ci(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(
        trials >= 1 && successes <= trials,
        "need 0 <= successes <= trials, trials >= 1"
    );
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = normal_quantile(confidence);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    (lo, hi)
}

/// Sample mean with a Student-t interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
    /// Set when there is a single sample and no spread estimate exists.
    pub degenerate: bool,
}

impl MeanCi {
    pub fn halfwidth(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }
}

/// Mean and t-interval with `len - 1` degrees of freedom.
///
/// Returns `None` for an empty sample.
pub fn mean_ci(samples: &[f64], confidence: f64) -> Option<MeanCi> {
    let count = samples.len();
    if count == 0 {
        return None;
    }
    let mean = samples.iter().sum::<f64>() / count as f64;
    if count == 1 {
        return Some(MeanCi {
            mean,
            lo: mean,
            hi: mean,
            degenerate: true,
        });
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    let half = if var == 0.0 {
        0.0
    } else {
        let t = StudentsT::new(0.0, 1.0, (count - 1) as f64)
            .expect("degrees of freedom are positive")
            .inverse_cdf(0.5 + confidence / 2.0);
        t * (var / count as f64).sqrt()
    };
    Some(MeanCi {
        mean,
        lo: mean - half,
        hi: mean + half,
        degenerate: false,
    })
}
