mod commands;
mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::RunReport;

#[derive(Parser, Debug)]
#[command(name = "specforge", version, about = "Build and verify complementary measure pairs, their spectra and tilings")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Tolerance for numeric checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Integer window W for zero-set and tiling checks.
    #[arg(long, global = true, default_value_t = 64)]
    pub window: u64,
    /// Number of side factors used when truncating infinite products.
    #[arg(long, global = true, default_value_t = 24)]
    pub trunc: usize,
    /// Number of points on the ξ grid in (−1/2, 1/2).
    #[arg(long, global = true, default_value_t = 101)]
    pub grid: usize,
    /// Worker threads for grid evaluations (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print only the JSON report.
    #[arg(long, global = true)]
    pub json_only: bool,
    /// Upper limit on the ladder product N₁⋯N_L.
    #[arg(long, global = true, env = "SPECFORGE_MAX_N", default_value_t = 1_048_576, hide_env_values = true)]
    pub max_n: u64,
}

/// A complementary pair given by a ladder.
#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Comma-separated ladder entries; `N*k` repeats N k times.
    #[arg(long, allow_hyphen_values = true)]
    pub ladder: String,
    /// Decomposition type, I or II.
    #[arg(long = "type", default_value = "II")]
    pub kind: String,
    /// Side carrying the Lebesgue tail (Type I).
    #[arg(long)]
    pub tail: Option<String>,
    /// Truncation level of both sides (Type II).
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build both factors of a pair with their spectra.
    Decompose(SpecArgs),
    /// Run every exact and numeric check on a pair.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// JSON spectrum to check instead of the constructed one.
        #[arg(long)]
        spectrum_file: Option<PathBuf>,
        /// Side the spectrum file belongs to.
        #[arg(long, default_value = "odd")]
        spectrum_side: String,
    },
    /// Factor integer sets with A ⊕ B = {0, …, n−1}.
    FactorSets {
        #[arg(long = "A", allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long = "B", allow_hyphen_values = true)]
        b: Option<String>,
        /// JSON file {"A": [...], "B": [...], "n": n}.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Factor two measures whose convolution is uniform on a grid.
    FactorMeasures {
        /// JSON file {"p": measure, "q": measure}.
        #[arg(long)]
        input: PathBuf,
    },
    /// Tabulate Q_k(ξ) on the ξ grid.
    Qplot {
        #[command(flatten)]
        spec: SpecArgs,
        /// Side whose factor is evaluated.
        #[arg(long, default_value = "odd")]
        side: String,
        /// Largest spectrum level k.
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        /// Write the CSV (columns xi,k,q,bound) here instead of embedding the rows in the report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the truncated transform of the factor as CSV (columns xi,re,im,abs,bound).
        #[arg(long)]
        ft_out: Option<PathBuf>,
    },
    /// Recover translates a_k with Q = ⊔(Ω + a_k) on a grid.
    TileExtract {
        /// Ω as a bitstring, a JSON mask, or a file holding a JSON mask.
        #[arg(long)]
        omega: String,
        /// Q in the same formats.
        #[arg(long)]
        q: String,
        /// Resolution for bitstring masks.
        #[arg(long, default_value_t = 1)]
        m: u64,
    },
    /// List every complementary set pair for n.
    EnumeratePairs {
        #[arg(long)]
        n: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let threads = g.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let report = pool.install(|| run(cli.command, &g));
    let mut stdout = std::io::stdout().lock();
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let _ = writeln!(stdout, "{json}");
    if !g.json_only {
        eprint!("{}", report.summary());
    }
    ExitCode::from(report.exit_code as u8)
}

fn run(command: Command, g: &Global) -> RunReport {
    let name = match &command {
        Command::Decompose(_) => "decompose",
        Command::Verify { .. } => "verify",
        Command::FactorSets { .. } => "factor-sets",
        Command::FactorMeasures { .. } => "factor-measures",
        Command::Qplot { .. } => "qplot",
        Command::TileExtract { .. } => "tile-extract",
        Command::EnumeratePairs { .. } => "enumerate-pairs",
    };
    let mut report = RunReport::new(name);
    let outcome = match command {
        Command::Decompose(spec) => commands::decompose(&mut report, g, &spec),
        Command::Verify { spec, spectrum_file, spectrum_side } => {
            commands::verify(&mut report, g, &spec, spectrum_file.as_deref(), &spectrum_side)
        }
        Command::FactorSets { a, b, input } => commands::factor_sets(&mut report, g, a, b, input.as_deref()),
        Command::FactorMeasures { input } => commands::factor_measures(&mut report, g, &input),
        Command::Qplot { spec, side, kmax, out, ft_out } => {
            commands::qplot(&mut report, g, &spec, &side, kmax, out.as_deref(), ft_out.as_deref())
        }
        Command::TileExtract { omega, q, m } => commands::tile_extract(&mut report, &omega, &q, m),
        Command::EnumeratePairs { n } => commands::enumerate_pairs(&mut report, n),
    };
    if let Err(e) = outcome {
        report.input_error(format!("{e:#}"));
    }
    report.finish();
    report
}
