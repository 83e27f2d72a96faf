use std::io::{self, Write};
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tailbound::Event;

mod commands;
mod render;

use commands::{Failure, Output};

#[derive(Parser)]
#[command(version, about = "Lower bounds for P(X >= 0) from moment ratios, with extremal witnesses and an LP oracle")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,

    /// Seed for Monte Carlo sampling
    #[arg(long, env = "TAILBOUND_SEED", default_value_t = 0, global = true)]
    seed: u64,

    /// Worker threads for enumeration and sampling (default: all cores)
    #[arg(long, global = true)]
    workers: Option<NonZeroUsize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every applicable lower bound for the given moment ratios
    Bound {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Also report the secondary estimates (explicit first-p form, psi route at p = 2)
        #[arg(long)]
        all: bool,
    },
    /// Construct the distribution attaining the bound and verify it
    Extremal {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Offset of the middle atom in the large-kurtosis family
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Minimize the event probability over distributions meeting the moment constraints
    Oracle {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Support grid size for the LP method
        #[arg(long, default_value_t = tailbound::oracle::DEFAULT_GRID_POINTS)]
        grid_points: usize,
        /// Event to minimize: ge, gt, le or lt
        #[arg(long, default_value = "ge", value_parser = parse_event)]
        event: Event,
        #[arg(long, value_enum, default_value_t = OracleMethod::Lp)]
        method: OracleMethod,
        /// Atom count for the parametric method
        #[arg(long, default_value_t = 3)]
        atoms: usize,
        /// Treat the highest-order moment as an upper bound instead of an equality
        #[arg(long)]
        one_sided_cap: bool,
        /// Certification tolerance
        #[arg(long, default_value_t = 2e-3)]
        tol: f64,
    },
    /// Sign probabilities and moment ratios of a second-order chaos
    Chaos {
        #[command(flatten)]
        input: ChaosInputArgs,
        #[arg(long, value_enum, default_value_t = ChaosMode::Enum)]
        mode: ChaosMode,
        /// Monte Carlo sample count
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Distribution of the underlying variables for Monte Carlo
        #[arg(long, value_enum, default_value_t = ChaosModel::Rademacher)]
        model: ChaosModel,
    },
    /// Tabulate classical and improved bounds over a range as CSV
    Curve {
        #[arg(long, value_enum)]
        family: Family,
        /// Exponent for the first-p and pth families
        #[arg(long)]
        p: Option<f64>,
        /// Range of the moment ratio, as LO:HI
        #[arg(long, value_parser = parse_range)]
        range: (f64, f64),
        /// Number of intervals; K + 1 rows are written
        #[arg(long)]
        steps: usize,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct ProfileArgs {
    /// Moment exponent p
    #[arg(long)]
    p: Option<f64>,
    /// Ratio E|X| / (E|X|^p)^(1/p), with --p
    #[arg(long)]
    c1p: Option<f64>,
    /// Kurtosis ratio E X^4 / (E X^2)^2
    #[arg(long = "c42-fourth")]
    c42_fourth: Option<f64>,
    /// Ratio (E|X|^p)^(1/p) / (E X^2)^(1/2), with --p > 2
    #[arg(long)]
    cp2: Option<f64>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ChaosInputArgs {
    /// Coefficient matrix as CSV or JSON {"n", "upper"}
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Vector system as JSON {"vectors": [[...], ...]}
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// Use the n x n all-ones matrix
    #[arg(long)]
    all_ones: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleMethod {
    Lp,
    Parametric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChaosMode {
    Enum,
    Mc,
    Spectral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChaosModel {
    Rademacher,
    Gaussian,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    FirstP,
    Fourth,
    Pth,
}

fn parse_event(s: &str) -> Result<Event, String> {
    s.parse()
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower end `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper end `{hi}`"))?;
    Ok((lo, hi))
}

fn run(cli: &Cli) -> Result<commands::Outcome, Failure> {
    match &cli.command {
        Command::Bound { profile, all } => commands::bound(profile, *all),
        Command::Extremal { profile, epsilon } => commands::extremal(profile, *epsilon),
        Command::Oracle { profile, grid_points, event, method, atoms, one_sided_cap, tol } => {
            commands::oracle(&commands::OracleArgs {
                profile: *profile,
                grid_points: *grid_points,
                event: *event,
                method: *method,
                atoms: *atoms,
                one_sided_cap: *one_sided_cap,
                tol: *tol,
            })
        }
        Command::Chaos { input, mode, samples, model } => {
            commands::chaos(input, *mode, *samples, *model, cli.seed)
        }
        Command::Curve { family, p, range, steps, out } => {
            commands::curve(*family, *p, *range, *steps, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.get()).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::Usage(format!("cannot start {n} workers: {e}"))),
        },
        None => run(&cli),
    };
    match result {
        Ok(outcome) => {
            let text = match (&outcome.output, cli.format) {
                (Output::Report(report), Format::Json) => render::json(report) + "\n",
                (Output::Report(report), Format::Human) => render::human(report),
                (Output::Text(text), _) => text.clone(),
            };
            let mut stdout = io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                Ok(()) => ExitCode::from(outcome.exit),
                // A closed pipe (e.g. `| head`) is not an error.
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::from(outcome.exit),
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
