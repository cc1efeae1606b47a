//! `digitfn`: evaluate, verify and analyze quasiadditive and quasimultiplicative digital functions.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

#[derive(Debug, Parser)]
#[command(name = "digitfn", version, about = "Quasiadditive and quasimultiplicative digital functions")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Upper bound on worker threads; 1 is the reference behavior.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..=256))]
    jobs: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a builtin function directly and by block splitting.
    Eval(EvalArgs),
    /// Split an expansion into blocks separated by runs of at least r zeros.
    Split(SplitArgs),
    /// Brute-force check of the defining identity on a window.
    CheckQuasi(CheckQuasiArgs),
    /// Decide quasimultiplicativity or quasiadditivity of a linear representation file.
    CheckRegular(CheckRegularArgs),
    /// Check the sufficient conditions for a transducer file.
    CheckTransducer(CheckTransducerArgs),
    /// Mean and variance constants of the central limit theorem.
    Constants(ConstantsArgs),
    /// Exhaustive distribution of f(N) for N uniform below q^k.
    Experiment(ExperimentArgs),
    /// Compare the generating function closed form with direct power sums.
    GfCheck(GfCheckArgs),
    /// Count (and optionally list) members of the B-set.
    Bset(BsetArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long = "fn")]
    function: String,
    /// Arguments; repeat or separate with commas.
    #[arg(long, required = true, value_delimiter = ',')]
    n: Vec<u64>,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long)]
    r: u32,
}

#[derive(Debug, Args)]
struct CheckQuasiArgs {
    #[arg(long = "fn")]
    function: String,
    /// Base; must match the function.
    #[arg(long)]
    q: Option<u32>,
    /// Parameter; defaults to the function's own.
    #[arg(long)]
    r: Option<u32>,
    /// Identity to check: `add` or `mult`; defaults to the function's own.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, default_value_t = 64)]
    amax: u64,
    #[arg(long, default_value_t = 8)]
    kmax: u32,
}

#[derive(Debug, Args)]
struct CheckRegularArgs {
    #[arg(long)]
    rep: PathBuf,
    #[arg(long, conflicts_with = "add", required_unless_present = "add")]
    mult: bool,
    #[arg(long)]
    add: bool,
    /// Parameter; searched for when omitted.
    #[arg(long)]
    r: Option<u32>,
}

#[derive(Debug, Args)]
struct CheckTransducerArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    r: u32,
    #[arg(long, default_value_t = 64)]
    amax: u64,
    #[arg(long, default_value_t = 8)]
    kmax: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    #[arg(long = "fn")]
    function: String,
    /// Exact rational constants from the transfer system.
    #[arg(long, conflicts_with = "truncate")]
    exact: bool,
    /// Enumerate the B-set up to this length.
    #[arg(long, value_name = "L")]
    truncate: Option<usize>,
    /// Extrapolate the contribution of longer members.
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    tail: Toggle,
    /// Number of sequence terms for run length transforms.
    #[arg(long, default_value_t = 200)]
    terms: u32,
    /// Also estimate the constants from the dominant singularity.
    #[arg(long)]
    singularity: bool,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long = "fn")]
    function: String,
    /// Exponents; repeat or separate with commas.
    #[arg(long, required = true, value_delimiter = ',')]
    k: Vec<u32>,
    /// CSV with columns k, mean, variance, ks_distance.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of the standardized histogram.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GfCheckArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long, default_value_t = 12)]
    kmax: usize,
    /// Exponents t; separate with commas.
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 2], allow_negative_numbers = true)]
    t: Vec<i32>,
}

#[derive(Debug, Args)]
struct BsetArgs {
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    max_len: usize,
    /// List the members as well (at most 65536).
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs as usize;
    let outcome = match cli.command {
        Command::Eval(a) => commands::eval(&a.function, &a.n),
        Command::Split(a) => commands::split(a.n, a.q, a.r),
        Command::CheckQuasi(a) => commands::check_quasi(&a.function, a.q, a.r, a.mode.as_deref(), a.amax, a.kmax),
        Command::CheckRegular(a) => commands::check_regular(&a.rep, a.mult, a.r),
        Command::CheckTransducer(a) => commands::check_transducer(&a.file, a.r, a.amax, a.kmax),
        Command::Constants(a) => commands::constants(&commands::ConstantsRequest {
            function: &a.function,
            exact: a.exact,
            truncate: a.truncate,
            tail: a.tail == Toggle::On,
            terms: a.terms,
            singularity: a.singularity,
            jobs,
        }),
        Command::Experiment(a) => {
            commands::experiment(&a.function, &a.k, a.out.as_deref(), a.histogram.as_deref(), jobs)
        }
        Command::GfCheck(a) => commands::gf_check(&a.function, a.kmax, &a.t),
        Command::Bset(a) => commands::bset(a.q, a.r, a.max_len, a.list),
    };
    match outcome {
        Ok(o) => {
            print!("{}", report::render(&o.report, cli.format));
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
