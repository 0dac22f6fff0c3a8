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

//! Monte Carlo simulation of round-based probabilistic information
//! diffusion on Erdős–Rényi random graphs.
//!
//! * [`randgraph`]: G(n, p) sampling, BFS connectivity, degree statistics.
//! * [`diffusion`]: the round-based spreading process with directed coins.
//! * [`experiment`]: seeded parameter sweeps and confidence intervals.
//! * [`cli`]: configuration, CSV/JSON output and the `probdiff` binary.

pub mod cli;
pub mod diffusion;
pub mod error;
pub mod experiment;
pub mod randgraph;
pub mod rng;

pub use error::{Error, Result};
