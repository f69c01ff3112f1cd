use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use bifib::{CaseSource, CliError, RunConfig};
use bifib_core::analysis::{AnalysisConfig, Tolerances};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

#[derive(Parser)]
#[command(name = "bifib", version, about = "Lefschetz bifibration analysis of affine cubic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in cases.
    List {
        /// Only cases whose id contains this string.
        #[arg(default_value = "")]
        filter: String,
    },
    /// Run the full pipeline on a built-in case or a problem file.
    Analyze(AnalyzeArgs),
    /// Render a report as SVG.
    Plot {
        #[arg(long)]
        report: PathBuf,
        /// Output file (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integer lattice computations.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Search a basis of matching paths and print it in catalog format.
    Basis {
        #[arg(long)]
        case: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Smith normal form, cokernel and discriminant group of a matrix.
    Snf {
        /// JSON array of integer rows (`-` for stdin).
        #[arg(long = "in")]
        input: PathBuf,
        /// Discriminant of the overlattice, for the index chain.
        #[arg(long, requires = "coker_order")]
        disc_lambda: Option<String>,
        /// Expected order of the cokernel, for the index chain.
        #[arg(long, requires = "disc_lambda")]
        coker_order: Option<String>,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, conflicts_with = "problem", required_unless_present = "problem")]
    case: Option<String>,
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long)]
    tol_root: Option<f64>,
    #[arg(long)]
    tol_cluster: Option<f64>,
    #[arg(long)]
    tol_merge: Option<f64>,
    #[arg(long)]
    tol_snap: Option<f64>,
    #[arg(long)]
    max_step: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write `<case>.json` and `<case>.svg` here instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Do not search for a basis when the case has none.
    #[arg(long)]
    no_search: bool,
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(e.to_string()))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn big(s: &str) -> Result<BigInt, CliError> {
    BigInt::from_str(s.trim()).map_err(|_| CliError::Input(format!("not an integer: {s:?}")))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::List { filter } => {
            print!("{}", bifib::cmd_list(&filter));
            Ok(bifib::EXIT_OK)
        }
        Command::Analyze(a) => {
            let d = Tolerances::default();
            let tolerances = Tolerances {
                root: a.tol_root.unwrap_or(d.root),
                cluster: a.tol_cluster.unwrap_or(d.cluster),
                merge: a.tol_merge.unwrap_or(d.merge),
                max_step: a.max_step.unwrap_or(d.max_step),
                snap: a.tol_snap.unwrap_or(d.snap),
            };
            let source = match (a.case, a.problem) {
                (Some(c), _) => CaseSource::Case(c),
                (None, Some(p)) => CaseSource::Problem(p),
                (None, None) => return Err(CliError::Input("one of --case or --problem is required".into())),
            };
            let analysis = AnalysisConfig { tolerances, seed: a.seed, threads: bifib::threads_from_env()?, search_basis: !a.no_search, ..AnalysisConfig::default() };
            let cfg = RunConfig { source, analysis, out: a.out.clone() };
            let res = bifib::cmd_analyze(&cfg)?;
            if a.out.is_none() {
                print!("{}", res.json);
            }
            for w in &res.report.warnings {
                eprintln!("warning: {w}");
            }
            for f in &res.report.failures {
                eprintln!("failed: {f}");
            }
            Ok(res.report.exit_code())
        }
        Command::Plot { report, out } => {
            let svg = bifib::cmd_plot(&read_input(&report)?)?;
            write_output(&out, &svg)?;
            Ok(bifib::EXIT_OK)
        }
        Command::Lattice { command: LatticeCommand::Snf { input, disc_lambda, coker_order } } => {
            let chain = match (disc_lambda, coker_order) {
                (Some(d), Some(c)) => Some((big(&d)?, big(&c)?)),
                _ => None,
            };
            let rep = bifib::cmd_lattice(&read_input(&input)?, chain)?;
            print!("{}", bifib::json::to_string(&rep));
            for e in &rep.errors {
                eprintln!("failed: {e}");
            }
            Ok(if rep.errors.is_empty() { bifib::EXIT_OK } else { bifib::EXIT_VERIFICATION })
        }
        Command::Basis { case, seed } => {
            let cfg = AnalysisConfig { seed, threads: bifib::threads_from_env()?, ..AnalysisConfig::default() };
            print!("{}", bifib::cmd_basis(&case, &cfg)?);
            Ok(bifib::EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { bifib::EXIT_INPUT } else { bifib::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
