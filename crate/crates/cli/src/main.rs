use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gsr_cli::output::{write_csv, write_json, write_plots};
use gsr_cli::{run_spec, CliError, ExperimentSpec, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};
use gsr_core::floquet::floquet_data;
use gsr_core::suite::{self, SuiteOutcome, DEFAULT_SEED};
use gsr_core::PeriodicCoefficients;

#[derive(Parser)]
#[command(name = "gsr", version, about = "Ground-state representation and eigenvalue comparison experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios of an experiment file and write a report.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also write two-column plot data files.
        #[arg(long)]
        plots: bool,
        /// Overrides the seed in the experiment file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one of the built-in randomised verification suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Print the band structure of periodic Jacobi parameters.
    Bands {
        #[arg(long)]
        period: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Gsr,
    Thm41,
    Thm43,
    Lt,
    Szego,
    Commutator,
    WConjugation,
    Eigen,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            spec,
            out,
            format,
            plots,
            seed,
        } => match run(&spec, &out, format, plots, seed) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Verify {
            suite,
            trials,
            seed,
        } => verify(suite, trials, seed),
        Command::Bands { period, a, b } => bands(period, a, b),
    };
    ExitCode::from(code as u8)
}

fn run(
    spec: &std::path::Path,
    out: &std::path::Path,
    format: Format,
    plots: bool,
    seed: Option<u64>,
) -> Result<i32, CliError> {
    let mut spec = ExperimentSpec::load(spec)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let report = run_spec(&spec)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    match format {
        Format::Json => write_json(&report, out)?,
        Format::Csv => write_csv(&report, out)?,
    }
    if plots {
        write_plots(&report, out)?;
    }
    for v in &report.verdicts {
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("[{status}] scenario {} ({}): {}", v.scenario, v.kind, v.detail);
    }
    Ok(if report.all_pass() { EXIT_PASS } else { EXIT_FAIL })
}

fn verify(which: Suite, trials: Option<usize>, seed: u64) -> i32 {
    let n = |default: usize| trials.unwrap_or(default);
    let outcome: SuiteOutcome = match which {
        Suite::Gsr => suite::gsr_suite(n(200), seed),
        Suite::Thm41 => suite::theorem41_suite(n(100), seed, 5),
        Suite::Thm43 => suite::theorem43_suite(n(50), seed, 5),
        Suite::Lt => suite::lt_suite(),
        Suite::Szego => suite::szego_suite(n(20), seed),
        Suite::Commutator => suite::commutator_suite(n(50), seed),
        Suite::WConjugation => suite::w_conjugation_suite(n(50), seed),
        Suite::Eigen => suite::eigen_suite(n(50), seed),
    };
    let status = if outcome.passed() { "PASS" } else { "FAIL" };
    println!(
        "[{status}] {}: {} trials, {} failures, worst {:e} (limit {:e})",
        outcome.suite, outcome.trials, outcome.failures, outcome.worst, outcome.threshold
    );
    for note in &outcome.notes {
        println!("  {note}");
    }
    if outcome.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn bands(period: usize, a: Vec<f64>, b: Vec<f64>) -> i32 {
    if a.len() != period || b.len() != period {
        eprintln!(
            "error: --a and --b need {period} entries each, got {} and {}",
            a.len(),
            b.len()
        );
        return EXIT_ERROR;
    }
    let data = PeriodicCoefficients::new(a, b).and_then(|p| floquet_data(&p));
    match data {
        Ok(data) => {
            for band in &data.bands {
                println!("{} {}", fixed(band.lo), fixed(band.hi));
            }
            let (lo, hi) = data.hull();
            println!("# hull {} {}", fixed(lo), fixed(hi));
            EXIT_PASS
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// Twelve decimals, without a sign on values that round to zero.
fn fixed(x: f64) -> String {
    let s = format!("{x:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|c| c == b'0' || c == b'.') => rest.to_string(),
        _ => s,
    }
}
