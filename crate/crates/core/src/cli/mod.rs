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

//! Command-line front end: `sweep`, `degrees` and `single`.

pub mod config;
pub mod degrees;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{ConfigFile, GridArgs};
pub use degrees::{degree_report, write_degree_reports, DegreeReport};
pub use output::{emit, format_real, write_results, Format, OutputRecord, COLUMNS};

use crate::diffusion::{DiffusionParams, DiffusionState, HashCoins};
use crate::error::{Error, Result};
use crate::experiment::{
    self, select_early_adopters, ExperimentConfig, SeedPlan, DEFAULT_MASTER_SEED, DEFAULT_TRIALS,
};
use crate::randgraph::{generate_connected_er, DEFAULT_MAX_ATTEMPTS};

#[derive(Debug, Parser)]
#[command(
    name = "probdiff",
    version,
    about = "Probabilistic diffusion on Erdős–Rényi graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the parameter sweep; defaults reproduce the full 600-cell grid.
    Sweep(SweepArgs),
    /// Pooled degree distributions of sampled graphs.
    Degrees(DegreesArgs),
    /// One diffusion run with a per-round trace.
    Single(SingleArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct DegreesArgs {
    #[arg(long = "n", value_delimiter = ',', default_values_t = [100, 200])]
    pub n: Vec<usize>,
    #[arg(long = "p-link", value_delimiter = ',', default_values_t = [0.05, 0.10, 0.15, 0.20, 0.30])]
    pub p_link: Vec<f64>,
    /// Graphs sampled per (n, p_link).
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    pub seed: u64,
    /// Keep only connected samples, as the sweep does.
    #[arg(long)]
    pub connected: bool,
    #[arg(long = "max-regen-attempts", default_value_t = DEFAULT_MAX_ATTEMPTS)]
    pub max_regen_attempts: u32,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, clap::Args)]
pub struct SingleArgs {
    #[arg(long = "n", default_value_t = 100)]
    pub n: usize,
    #[arg(long = "p-link", default_value_t = 0.10)]
    pub p_link: f64,
    #[arg(long = "p-diff", default_value_t = 0.5)]
    pub p_diff: f64,
    #[arg(long = "adopters", default_value_t = 1)]
    pub adopters: usize,
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    pub seed: u64,
    /// Which sweep trial to replay.
    #[arg(long, default_value_t = 0)]
    pub trial: usize,
    #[arg(long = "max-regen-attempts", default_value_t = DEFAULT_MAX_ATTEMPTS)]
    pub max_regen_attempts: u32,
}

/// Parses a `sweep` argument vector (without the program and subcommand
/// names) into a validated config.
pub fn parse_config<I, T>(args: I) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    #[derive(Parser)]
    struct Only {
        #[command(flatten)]
        grid: GridArgs,
    }
    let argv = std::iter::once(OsString::from("sweep")).chain(args.into_iter().map(Into::into));
    let only = Only::try_parse_from(argv).map_err(|e| Error::Usage(e.to_string()))?;
    only.grid.resolve(&only.grid.file()?)
}

fn with_threads<T: Send>(threads: usize, body: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("--threads: {e}")))?;
    Ok(pool.install(body))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => run_sweep(&args),
        Command::Degrees(args) => run_degrees(&args),
        Command::Single(args) => run_single(&args, &mut std::io::stdout().lock()),
    }
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let file = args.grid.file()?;
    let config = args.grid.resolve(&file)?;
    let format = match (args.output.format, file.get("format")) {
        (Some(f), _) => f,
        (None, Some(text)) => Format::from_str(text, true)
            .map_err(|_| Error::Usage(format!("--format: unknown format `{text}`")))?,
        (None, None) => Format::Csv,
    };
    let out = args
        .output
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from));
    let threads = match (args.threads, file.get("threads")) {
        (Some(t), _) => t,
        (None, Some(text)) => text
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("--threads: cannot parse `{text}`")))?,
        (None, None) => 0,
    };
    let results = with_threads(threads, || experiment::sweep(&config))??;
    emit(&results, format, out.as_deref())
}

fn run_degrees(args: &DegreesArgs) -> Result<()> {
    if args.samples == 0 {
        return Err(Error::Usage("--samples must be at least 1".into()));
    }
    let reports = with_threads(args.threads, || {
        let mut reports = Vec::new();
        for &n in &args.n {
            for &p_link in &args.p_link {
                reports.push(degree_report(
                    n,
                    p_link,
                    args.samples,
                    args.seed,
                    args.connected,
                    args.max_regen_attempts,
                )?);
            }
        }
        Ok::<_, Error>(reports)
    })??;
    let format = args.output.format.unwrap_or_default();
    output::with_destination(args.output.out.as_deref(), |w| {
        write_degree_reports(&reports, format, w)
    })
}

/// Replays trial `args.trial` of the matching sweep cell and writes a
/// per-round trace.
pub fn run_single<W: Write + ?Sized>(args: &SingleArgs, out: &mut W) -> Result<()> {
    let cell = experiment::CellParams {
        n: args.n,
        p_link: args.p_link,
        p_diff: args.p_diff,
        k_adopters: args.adopters,
        trials: args.trial + 1,
    };
    cell.validate().map_err(|e| match e {
        Error::Config(msg) => Error::Usage(msg),
        other => other,
    })?;
    let plan = SeedPlan::new(args.seed);
    let (graph, attempts) = generate_connected_er(
        args.n,
        args.p_link,
        plan.graph_seed(args.n, args.p_link, args.trial),
        args.max_regen_attempts,
    )?;
    let mut stream = plan.adopter_stream(args.n, args.p_link, args.adopters, args.trial);
    let adopters = select_early_adopters(&graph, args.adopters, &mut stream)?;
    let params = DiffusionParams::new(args.p_diff, adopters)?;
    let coins = HashCoins::new(plan.coin_seed(args.n, args.p_link, args.adopters, args.trial));

    writeln!(
        out,
        "graph: n={} edges={} attempts={}",
        graph.node_count(),
        graph.edge_count(),
        attempts
    )?;
    writeln!(out, "adopters: {:?}", params.early_adopters())?;
    let mut state = DiffusionState::new(&graph, &params)?;
    while !state.all_covered() && !state.candidates().is_empty() {
        let candidates = state.candidates().to_vec();
        state.step(&graph, params.p_diff(), &coins)?;
        writeln!(
            out,
            "round {}: candidates={:?} newly_covered={:?} covered={}/{}",
            state.round(),
            candidates,
            state.candidates(),
            state.covered_count(),
            graph.node_count()
        )?;
    }
    let verdict = if state.all_covered() {
        "success"
    } else {
        "failure"
    };
    writeln!(
        out,
        "result: {verdict} rounds={} covered={}/{}",
        state.round(),
        state.covered_count(),
        graph.node_count()
    )?;
    Ok(())
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
