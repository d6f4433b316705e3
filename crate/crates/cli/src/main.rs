//! `noisy-ot`: bound curves, rate sweeps, secure-region boundaries and
//! Monte-Carlo simulation for oblivious transfer from noisy storage.

mod commands;
mod noise;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noisy_ot::entropy::BoundKind;

use crate::noise::NoiseArgs;

#[derive(Debug, Parser)]
#[command(
    name = "noisy-ot",
    version,
    about = "Oblivious transfer in the noisy-storage model"
)]
struct Cli {
    /// Output file for the CSV result; standard output when omitted or `-`.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Master seed for every random stream.
    #[arg(long, env = "NOISY_OT_SEED", default_value_t = 0, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Min-entropy rate bounds as functions of the depolarising parameter r.
    Bounds(BoundsArgs),
    /// Bit rate of the protocol as a function of the trusted noise.
    Rates(RatesArgs),
    /// Zero-rate boundaries of the secure region.
    Boundary(BoundaryArgs),
    /// Honest protocol sessions.
    Simulate(SimulateArgs),
    /// Cheating-receiver experiments.
    Attack(AttackArgs),
    /// Largest tolerable trusted noise.
    Threshold,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct GridArgs {
    /// Spacing of the uniform grid on [0, 1].
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Bounds to tabulate, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_kind,
          default_value = "bounded_storage,strong_converse,collision")]
    pub kinds: Vec<BoundKind>,
    /// Storage fraction for bounds that depend on it.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Burst lengths for the correlated bounds, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub m: Vec<u32>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// Trusted noise r1 on x, cheater noise r_dis on y.
    #[value(name = "1")]
    One,
    /// Trusted noise r2 on x, memory noise r_mem on y.
    #[value(name = "2")]
    Two,
    /// Storage fraction on x, trusted noise r2 on y (scenario 2, fixed r_mem).
    Storage,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// `1` sweeps r1 at fixed r_dis, `2` sweeps r2 at fixed r_mem.
    #[arg(long, default_value = "1")]
    pub scenario: Scenario,
    #[arg(long, value_delimiter = ',', value_parser = parse_kind, default_value = "rational")]
    pub bounds: Vec<BoundKind>,
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Cheater's total noise (scenario 1).
    #[arg(long, default_value_t = 0.0)]
    pub r_dis: f64,
    /// Memory noise (scenario 2).
    #[arg(long, default_value_t = 1.0)]
    pub r_mem: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long, default_value = "1")]
    pub scenario: Scenario,
    #[arg(long, value_delimiter = ',', value_parser = parse_kind,
          default_value = "rational,strong_converse,collision")]
    pub bounds: Vec<BoundKind>,
    /// Storage fraction (scenarios 1 and 2).
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Memory noise (storage sweep).
    #[arg(long, default_value_t = 1.0)]
    pub r_mem: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Syndrome decoding with the chosen code.
    Code,
    /// Decoding succeeds iff each block's error weight is within the code's radius;
    /// leakage charged at the asymptotic rate.
    Oracle,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Symbols sent per session.
    #[arg(long, default_value_t = 10_000)]
    pub n_prime: usize,
    #[arg(long, default_value_t = 1)]
    pub sessions: u64,
    #[arg(long, value_enum, default_value = "code")]
    pub backend: Backend,
    /// hamming74, repetition3, hamming84 or bch157.
    #[arg(long, default_value = "hamming74")]
    pub code: String,
    /// Fixed output length; computed from `--ell-bound` when omitted.
    #[arg(long)]
    pub ell: Option<u64>,
    #[arg(long, value_parser = parse_kind, default_value = "rational")]
    pub ell_bound: BoundKind,
    #[arg(long, default_value_t = 1e-6)]
    pub eps_h: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps_s: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps_prime: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps_test: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps_ec: f64,
    /// Writes the transcripts and summary as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    MeasureImmediately,
    StoreAll,
    StoreFraction,
    Erasure,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long, value_enum, default_value = "store-all")]
    pub strategy: Strategy,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Memory parameters to sweep, comma separated; a uniform grid when omitted.
    #[arg(long, value_delimiter = ',')]
    pub memory_r: Vec<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    /// Stored fraction for `store-fraction`.
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
    /// Jointly erased block length for `erasure`.
    #[arg(long, default_value_t = 1)]
    pub burst: u32,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Symbols per trial (an upper bound when `--target-bits` is set).
    #[arg(long, default_value_t = 1000)]
    pub n_prime: usize,
    /// Stop each trial after this many complementary bits and guess exactly those.
    #[arg(long)]
    pub target_bits: Option<usize>,
    /// Confidence level of the Clopper-Pearson intervals.
    #[arg(long, default_value_t = 0.999)]
    pub confidence: f64,
    /// Writes the raw statistics as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Name of a value as accepted on the command line.
pub trait FlagName: ValueEnum {
    fn name(&self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}

impl<T: ValueEnum> FlagName for T {}

fn parse_kind(s: &str) -> Result<BoundKind, String> {
    s.trim().parse().map_err(|e: noisy_ot::Error| e.to_string())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let ctx = commands::Context {
        command: output::command_line(&args),
        seed: cli.seed,
    };
    let result = match &cli.command {
        Command::Bounds(a) => commands::bounds(&ctx, a),
        Command::Rates(a) => commands::rates(&ctx, a),
        Command::Boundary(a) => commands::boundary(&ctx, a),
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Attack(a) => commands::attack(&ctx, a),
        Command::Threshold => commands::threshold(&ctx),
    };
    match result {
        Ok(out) => {
            if let Err(e) = output::emit(cli.output.as_deref(), &out.csv) {
                eprintln!("error: writing output: {e}");
                return ExitCode::FAILURE;
            }
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
