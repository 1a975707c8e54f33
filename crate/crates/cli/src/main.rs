//! `bilist`: command-line front end for bilist-core.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bilist", version, about = "Asymmetric list colouring of bipartite graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Wall-clock limit in seconds for exhaustive searches.
    #[arg(long, global = true)]
    pub timeout: Option<f64>,
    /// Node limit for exhaustive searches.
    #[arg(long, global = true)]
    pub max_nodes: Option<u64>,
    /// Row limit for sweeps.
    #[arg(long, global = true, default_value_t = bilist_core::bounds::DEFAULT_ROW_CAP)]
    pub max_rows: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Seed for randomized subcommands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Csv,
    Structured,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether an instance has a proper list colouring.
    Decide { file: PathBuf },
    /// Check that a certificate's instance has no proper colouring.
    Verify { file: PathBuf },
    /// Decide (k_a, k_b)-choosability of a complete bipartite graph.
    Choosable {
        #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
        complete: Vec<usize>,
        #[arg(long)]
        ka: usize,
        #[arg(long)]
        kb: usize,
        /// Largest palette searched (default b * k_b, which is exhaustive).
        #[arg(long)]
        palette_cap: Option<usize>,
        /// Where to write a non-choosability certificate.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least a with K_{a,b} not (k_a, k_b)-choosable.
    Threshold {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        ka: usize,
        #[arg(long)]
        kb: usize,
        #[arg(long)]
        palette_cap: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest k2-uniform family on [l] without Property A for k1.
    Mbar {
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long)]
        l: usize,
        /// Only print the closed-form bracket.
        #[arg(long)]
        bounds_only: bool,
    },
    /// Evaluate sufficient conditions over a grid of parameter points.
    Bounds(BoundsArgs),
    /// Emit a construction as a certificate.
    Construct(ConstructArgs),
    /// Run a resampling algorithm on an instance.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, value_enum, default_value_t = Mode::Degree)]
    pub mode: Mode,
    /// Values of Δ_A (degree mode) or a (complete mode): `4`, `2,4,8` or `1..5`.
    #[arg(long)]
    pub xa: String,
    #[arg(long)]
    pub xb: String,
    #[arg(long)]
    pub ka: String,
    #[arg(long)]
    pub kb: String,
    /// Comma-separated condition ids (default: all).
    #[arg(long)]
    pub conditions: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Fixed p for cu1/cu2 (default: optimised).
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Degree,
    Complete,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(subcommand)]
    pub kind: ConstructKind,
    /// Write the certificate here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write the certificate into the fixtures directory under this name.
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    /// Cap on the vertices of either part.
    #[arg(long, global = true, default_value_t = bilist_core::constructions::DEFAULT_SIZE_CAP)]
    pub size_cap: usize,
}

#[derive(Subcommand, Debug)]
pub enum ConstructKind {
    /// K_{δ^k, k} with disjoint B-lists.
    Classic {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: usize,
    },
    /// Complete graph from two set families in `l k m` text form.
    Steiner {
        #[arg(long)]
        fam_a: PathBuf,
        #[arg(long)]
        fam_b: PathBuf,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
    },
    /// K_{35,7} from the Fano plane.
    Fano35,
    /// K_{28,7} from the Fano plane.
    Fano28,
    /// Extremal instance for k_a = b - 1.
    Boundary {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        delta: usize,
    },
    /// Recursive gadget with small maximum B-degree.
    Gadget {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: usize,
    },
    /// Segment witness, either for a target degree or at explicit scale.
    Witness {
        #[arg(long)]
        k: usize,
        /// Target maximum degree.
        #[arg(long, conflicts_with_all = ["m", "segments"])]
        degree: Option<f64>,
        #[arg(long, requires = "segments")]
        m: Option<usize>,
        #[arg(long, requires = "m")]
        segments: Option<usize>,
    },
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(value_enum)]
    pub kind: SampleKind,
    /// Instance in certificate format (the claim field is ignored).
    #[arg(long, conflicts_with = "random")]
    pub instance: Option<PathBuf>,
    /// Random instance: a b deg_a deg_b k_a k_b palette.
    #[arg(long, num_args = 7, value_names = ["A", "B", "DEG_A", "DEG_B", "KA", "KB", "PALETTE"])]
    pub random: Option<Vec<usize>>,
    /// Resample budget.
    #[arg(long, default_value_t = bilist_core::probabilistic::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Probability of a colour going to B (split).
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = SplitArg::Eq1)]
    pub split_mode: SplitArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    Transversal,
    Coupon,
    Split,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitArg {
    Eq1,
    Eq2,
}

/// Exit statuses shared by every subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Affirmative = 0,
    Negative = 1,
    Usage = 2,
    Capped = 3,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Status::Usage as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    eprintln!("bilist {}", env!("CARGO_PKG_VERSION"));
    eprintln!("invocation: {}", argv.join(" "));
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: cannot configure {jobs} workers: {e}");
            return ExitCode::from(Status::Usage as u8);
        }
    }
    let status = match commands::run(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}", e.message);
            if let Some(hint) = e.hint {
                eprintln!("hint: {hint}");
            }
            e.status
        }
    };
    ExitCode::from(status as u8)
}
