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

//! Grid options from flags and `key=value` files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;

use crate::error::{Error, Result};
use crate::experiment::{inclusive_range, ExperimentConfig};

/// Keys accepted in a config file. They mirror the long flag names.
pub const FILE_KEYS: [&str; 10] = [
    "n",
    "p-link",
    "p-diff",
    "adopters",
    "trials",
    "seed",
    "max-regen-attempts",
    "format",
    "out",
    "threads",
];

/// Sweep grid flags. Every list flag takes comma lists and may repeat.
#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    /// Node counts.
    #[arg(long = "n", value_name = "N[,N...]")]
    pub n: Vec<String>,
    /// Link probabilities.
    #[arg(long = "p-link", value_name = "P[,P...]")]
    pub p_link: Vec<String>,
    /// Transmission probabilities, as a list or `start:stop:step`.
    #[arg(long = "p-diff", value_name = "P[,P...]|START:STOP:STEP")]
    pub p_diff: Vec<String>,
    /// Early adopter counts.
    #[arg(long = "adopters", value_name = "K[,K...]")]
    pub adopters: Vec<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long = "max-regen-attempts")]
    pub max_regen_attempts: Option<String>,
    /// Flat `key=value` file; flags take precedence.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

/// Parsed `key=value` file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Blank lines and `#` comments are skipped. Keys may be written with
    /// `-` or `_`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Usage(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim().replace('_', "-");
            if !FILE_KEYS.contains(&key.as_str()) {
                return Err(Error::Usage(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

fn pick<'a>(flag: &'a [String], file: &'a ConfigFile, key: &str) -> Option<String> {
    if flag.is_empty() {
        file.get(key).map(str::to_string)
    } else {
        Some(flag.join(","))
    }
}

fn pick_one(flag: &Option<String>, file: &ConfigFile, key: &str) -> Option<String> {
    flag.clone().or_else(|| file.get(key).map(str::to_string))
}

fn parse_scalar<T: FromStr>(field: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::Usage(format!("--{field}: cannot parse `{}`", text.trim())))
}

fn parse_list<T: FromStr>(field: &str, text: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::Usage(format!("--{field}: empty list")));
    }
    items.into_iter().map(|s| parse_scalar(field, s)).collect()
}

/// Comma list of probabilities, or ranges `start:stop:step` (inclusive).
pub fn parse_probabilities(field: &str, text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => out.push(parse_scalar(field, single)?),
            [start, stop, step] => {
                let (start, stop, step): (f64, f64, f64) = (
                    parse_scalar(field, start)?,
                    parse_scalar(field, stop)?,
                    parse_scalar(field, step)?,
                );
                let values = inclusive_range(start, stop, step);
                if values.is_empty() {
                    return Err(Error::Usage(format!("--{field}: empty range `{item}`")));
                }
                out.extend(values);
            }
            _ => return Err(Error::Usage(format!("--{field}: malformed range `{item}`"))),
        }
    }
    if out.is_empty() {
        return Err(Error::Usage(format!("--{field}: empty list")));
    }
    for &p in &out {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Usage(format!("--{field}: {p} is not a probability")));
        }
    }
    Ok(out)
}

impl GridArgs {
    pub fn file(&self) -> Result<ConfigFile> {
        match &self.config {
            Some(path) => ConfigFile::load(path),
            None => Ok(ConfigFile::default()),
        }
    }

    /// Resolves flags over file values over defaults, then validates.
    pub fn resolve(&self, file: &ConfigFile) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::default();
        if let Some(v) = pick(&self.n, file, "n") {
            config.n_values = parse_list("n", &v)?;
        }
        if let Some(v) = pick(&self.p_link, file, "p-link") {
            config.p_link_values = parse_probabilities("p-link", &v)?;
        }
        if let Some(v) = pick(&self.p_diff, file, "p-diff") {
            config.p_diff_values = parse_probabilities("p-diff", &v)?;
        }
        if let Some(v) = pick(&self.adopters, file, "adopters") {
            config.adopter_counts = parse_list("adopters", &v)?;
        }
        if let Some(v) = pick_one(&self.trials, file, "trials") {
            config.trials = parse_scalar("trials", &v)?;
        }
        if let Some(v) = pick_one(&self.seed, file, "seed") {
            config.master_seed = parse_scalar("seed", &v)?;
        }
        if let Some(v) = pick_one(&self.max_regen_attempts, file, "max-regen-attempts") {
            config.max_regen_attempts = parse_scalar("max-regen-attempts", &v)?;
        }
        config.validate().map_err(|e| match e {
            Error::Config(msg) => Error::Usage(msg),
            other => other,
        })?;
        Ok(config)
    }
}
