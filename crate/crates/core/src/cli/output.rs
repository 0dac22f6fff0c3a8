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

//! CSV and JSON tables of sweep results.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::CellResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Column order of the sweep table.
pub const COLUMNS: [&str; 15] = [
    "n",
    "p_link",
    "p_diff",
    "k_adopters",
    "trials",
    "successes",
    "p_success",
    "p_success_lo",
    "p_success_hi",
    "mean_rounds",
    "rounds_lo",
    "rounds_hi",
    "mean_degree",
    "stddev_degree",
    "mean_regen_attempts",
];

/// One flattened [`CellResult`], reals already rounded to six significant
/// digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub n: usize,
    pub p_link: f64,
    pub p_diff: f64,
    pub k_adopters: usize,
    pub trials: usize,
    pub successes: usize,
    pub p_success: f64,
    pub p_success_lo: f64,
    pub p_success_hi: f64,
    pub mean_rounds: Option<f64>,
    pub rounds_lo: Option<f64>,
    pub rounds_hi: Option<f64>,
    pub mean_degree: f64,
    pub stddev_degree: f64,
    pub mean_regen_attempts: f64,
}

impl From<&CellResult> for OutputRecord {
    fn from(r: &CellResult) -> Self {
        Self {
            n: r.params.n,
            p_link: round_sig(r.params.p_link),
            p_diff: round_sig(r.params.p_diff),
            k_adopters: r.params.k_adopters,
            trials: r.params.trials,
            successes: r.successes,
            p_success: round_sig(r.p_success),
            p_success_lo: round_sig(r.p_success_ci.0),
            p_success_hi: round_sig(r.p_success_ci.1),
            mean_rounds: r.mean_rounds.map(round_sig),
            rounds_lo: r.rounds_ci.map(|c| round_sig(c.0)),
            rounds_hi: r.rounds_ci.map(|c| round_sig(c.1)),
            mean_degree: round_sig(r.mean_degree),
            stddev_degree: round_sig(r.stddev_degree),
            mean_regen_attempts: round_sig(r.mean_regen_attempts),
        }
    }
}

impl OutputRecord {
    fn csv_fields(&self) -> [String; 15] {
        let opt = |x: Option<f64>| x.map(format_real).unwrap_or_default();
        [
            self.n.to_string(),
            format_real(self.p_link),
            format_real(self.p_diff),
            self.k_adopters.to_string(),
            self.trials.to_string(),
            self.successes.to_string(),
            format_real(self.p_success),
            format_real(self.p_success_lo),
            format_real(self.p_success_hi),
            opt(self.mean_rounds),
            opt(self.rounds_lo),
            opt(self.rounds_hi),
            format_real(self.mean_degree),
            format_real(self.stddev_degree),
            format_real(self.mean_regen_attempts),
        ]
    }
}

/// Six significant digits, `%g` style: plain notation for exponents in
/// `-4..6`, scientific otherwise, trailing zeros dropped.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to the value its six-digit rendering denotes.
pub fn round_sig(x: f64) -> f64 {
    format_real(x).parse().unwrap_or(x)
}

pub fn write_csv<W: Write>(records: &[OutputRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(records: &[T], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out)?;
    Ok(())
}

/// Renders sweep results into `out`.
pub fn write_results<W: Write>(results: &[CellResult], format: Format, out: W) -> Result<()> {
    if results.is_empty() {
        return Err(Error::Usage("no results to write".into()));
    }
    let records: Vec<OutputRecord> = results.iter().map(OutputRecord::from).collect();
    match format {
        Format::Csv => write_csv(&records, out),
        Format::Json => write_json(&records, out),
    }
}

/// Writes sweep results to `destination`, or standard output when `None`.
pub fn emit(results: &[CellResult], format: Format, destination: Option<&Path>) -> Result<()> {
    with_destination(destination, |w| write_results(results, format, w))
}

pub(crate) fn with_destination<F>(destination: Option<&Path>, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match destination {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::CellParams;

    fn result(successes: usize) -> CellResult {
        CellResult {
            params: CellParams {
                n: 100,
                p_link: 0.1,
                p_diff: 0.35,
                k_adopters: 10,
                trials: 200,
            },
            successes,
            p_success: successes as f64 / 200.0,
            p_success_ci: crate::experiment::proportion_ci(successes as u64, 200, 0.95),
            mean_rounds: (successes > 0).then_some(7.123456789),
            rounds_ci: (successes > 0).then_some((6.9, 7.3)),
            mean_degree: 9.9,
            stddev_degree: 2.9543,
            mean_regen_attempts: 1.0,
        }
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(0.05), "0.05");
        assert_eq!(format_real(7.123456789), "7.12346");
        assert_eq!(format_real(0.6856590163), "0.685659");
        assert_eq!(format_real(9.9999996), "10");
        assert_eq!(format_real(123456789.0), "1.23457e8");
        assert_eq!(format_real(0.0000123456789), "1.23457e-5");
        assert_eq!(format_real(0.000123456789), "0.000123457");
        assert_eq!(format_real(-2.5), "-2.5");
    }

    #[test]
    fn one_cell_gives_header_and_row() {
        let mut buf = Vec::new();
        write_results(&[result(150)], Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], COLUMNS.join(","));
        assert!(
            lines[1].starts_with("100,0.1,0.35,10,200,150,0.75,0.685659,0.804918,7.12346,6.9,7.3,")
        );
    }

    #[test]
    fn absent_rounds_are_empty_or_null() {
        let mut buf = Vec::new();
        write_results(&[result(0)], Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row: Vec<_> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), COLUMNS.len());
        assert_eq!(&row[9..12], &["", "", ""]);

        let mut buf = Vec::new();
        write_results(&[result(0)], Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(v[0]["mean_rounds"].is_null());
        assert_eq!(v[0]["successes"], 0);
    }

    #[test]
    fn json_round_trips() {
        let results = [result(150), result(0)];
        let mut buf = Vec::new();
        write_results(&results, Format::Json, &mut buf).unwrap();
        let back: Vec<OutputRecord> = serde_json::from_slice(&buf).unwrap();
        let expected: Vec<OutputRecord> = results.iter().map(OutputRecord::from).collect();
        assert_eq!(back, expected);
        assert!((back[0].mean_rounds.unwrap() - 7.123456789).abs() < 1e-5);
    }

    #[test]
    fn empty_results_are_rejected() {
        assert!(write_results(&[], Format::Csv, Vec::new()).is_err());
    }

    #[test]
    fn unwritable_destination_is_io_error() {
        let err = emit(
            &[result(1)],
            Format::Csv,
            Some(Path::new("/nonexistent/dir/out.csv")),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
