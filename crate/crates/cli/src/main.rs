use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ruin_cli::document::{load_gambler, load_polygon};
use ruin_cli::record::ResultRecord;
use ruin_cli::simulate::{conjecture_to_json, report_to_json, run_gambler_parallel, run_polygon_parallel};
use ruin_cli::verify::{run_all, VerifyOptions};
use ruin_core::gambler::{self, ConditionalPath};
use ruin_core::montecarlo::conjecture_probe;
use ruin_core::oracle::{self, Condition};
use ruin_core::polygon;
use ruin_core::{Error, Scalar};

/// Exact quantities, seeded simulation and self-verification for absorbing
/// birth-death games and walks on a polygon.
#[derive(Parser)]
#[command(name = "ruin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Absorbing-game quantities computed from a chain file
    Gambler {
        #[command(subcommand)]
        quantity: GamblerQuantity,
    },
    /// Cover statistics of the walk on a polygon
    Polygon {
        #[command(subcommand)]
        quantity: PolygonQuantity,
    },
    /// Seeded Monte-Carlo estimation (JSON lines on stdout)
    Simulate {
        #[command(subcommand)]
        target: SimulateTarget,
    },
    /// Run the exact verification suites; exit 0 only if all pass
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum GamblerQuantity {
    /// Probability of reaching k before j from i
    Rho(GamblerArgs),
    /// Expected game duration
    Et(GamblerArgs),
    /// Expected duration conditioned on winning (absorption at k)
    Ew(GamblerArgs),
    /// Expected duration conditioned on losing (absorption at j)
    Eb(GamblerArgs),
}

#[derive(Args)]
struct GamblerArgs {
    /// Chain document (JSON)
    #[arg(long)]
    chain: PathBuf,
    /// Losing barrier
    #[arg(long)]
    j: usize,
    /// Starting state
    #[arg(long)]
    i: usize,
    /// Winning barrier
    #[arg(long)]
    k: usize,
    /// Computation route. `closed` and `recurrence` select the two explicit
    /// paths for the conditional times (and coincide for rho/et);
    /// `oracle` solves the first-step linear system instead.
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum PolygonQuantity {
    /// Probability that every vertex is seen before returning to i
    Ai(PolygonArgs),
    /// Probability that j is the last vertex visited (all j without --j)
    Lij(PolygonPairArgs),
    /// Expected cover time given that j is visited last (all j without --j)
    Evij(PolygonPairArgs),
    /// Expected cover time from i
    Ev(PolygonArgs),
    /// Expected extra steps to return to i after covering
    Er(PolygonArgs),
}

#[derive(Args)]
struct PolygonArgs {
    #[arg(long)]
    chain: PathBuf,
    /// Starting vertex
    #[arg(long)]
    i: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct PolygonPairArgs {
    #[arg(long)]
    chain: PathBuf,
    /// Starting vertex
    #[arg(long)]
    i: usize,
    /// Last vertex (must differ from i); omit for one record per vertex
    #[arg(long)]
    j: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum SimulateTarget {
    /// Estimate rho, ET, EW and EB for one game
    Gambler {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Worker threads; the output is identical for any value
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Estimate the cover statistics from one starting vertex
    Polygon {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Compare winning-time samples under (p,q) and the swapped rates
    Conjecture {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Accepted for interface symmetry; the probe is cheap and serial
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest random pot size
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    /// Largest random polygon size
    #[arg(long, default_value_t = 5)]
    max_m: usize,
    /// Number of random chains per randomized suite
    #[arg(long, default_value_t = 200)]
    random_chains: usize,
    #[arg(long, default_value_t = 12345)]
    seed: u64,
    /// Also run the Monte-Carlo agreement suite (about a second of work)
    #[arg(long, default_value_t = false)]
    with_montecarlo: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Recurrence,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gambler { quantity } => {
            let (name, args) = match &quantity {
                GamblerQuantity::Rho(a) => ("rho", a),
                GamblerQuantity::Et(a) => ("et", a),
                GamblerQuantity::Ew(a) => ("ew", a),
                GamblerQuantity::Eb(a) => ("eb", a),
            };
            let chain = load_gambler(&args.chain)?;
            let exact = gambler_value(name, &chain, args)?;
            let record = ResultRecord::new(
                name,
                &[
                    ("j", args.j.to_string()),
                    ("i", args.i.to_string()),
                    ("k", args.k.to_string()),
                ],
                exact,
            );
            emit(&[record], args.format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Polygon { quantity } => {
            let records = polygon_records(&quantity)?;
            let format = match &quantity {
                PolygonQuantity::Ai(a) | PolygonQuantity::Ev(a) | PolygonQuantity::Er(a) => a.format,
                PolygonQuantity::Lij(a) | PolygonQuantity::Evij(a) => a.format,
            };
            emit(&records, format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { target } => {
            simulate(target)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let opts = VerifyOptions {
                max_n: args.max_n.max(2),
                max_m: args.max_m.max(2),
                random_chains: args.random_chains,
                seed: args.seed,
                with_montecarlo: args.with_montecarlo,
            };
            let outcomes = run_all(&opts);
            let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(10);
            println!("{:<width$}  {:>7}  result", "suite", "checks");
            let mut first_failure = None;
            for outcome in &outcomes {
                let result = if outcome.failure.is_none() { "pass" } else { "FAIL" };
                println!("{:<width$}  {:>7}  {result}", outcome.name, outcome.checks);
                if first_failure.is_none() {
                    if let Some(msg) = &outcome.failure {
                        first_failure = Some(format!("{}: {msg}", outcome.name));
                    }
                }
            }
            if let Some(msg) = first_failure {
                eprintln!("counterexample: {msg}");
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}

fn gambler_value(name: &str, chain: &ruin_core::GamblerChain, args: &GamblerArgs) -> anyhow::Result<Scalar> {
    let (j, i, k) = (args.j, args.i, args.k);
    let value = match (name, args.method) {
        ("rho", Method::Closed | Method::Recurrence) => gambler::rho(chain, j, i, k)?,
        ("rho", Method::Oracle) => pick(oracle::solve_hitting_prob(chain, j, k)?, j, i, k)?,
        ("et", Method::Closed | Method::Recurrence) => gambler::expected_duration(chain, j, i, k)?,
        ("et", Method::Oracle) => pick(oracle::solve_expected_time(chain, j, k)?, j, i, k)?,
        ("ew", Method::Closed) => gambler::ew_with(chain, j, i, k, ConditionalPath::Closed)?,
        ("ew", Method::Recurrence) => gambler::ew_with(chain, j, i, k, ConditionalPath::Recurrence)?,
        ("ew", Method::Oracle) => pick_conditional(
            oracle::solve_conditional_time(chain, j, k, Condition::Win)?,
            j,
            i,
            k,
            "winning time does not exist from the losing barrier",
        )?,
        ("eb", Method::Closed) => gambler::eb_with(chain, j, i, k, ConditionalPath::Closed)?,
        ("eb", Method::Recurrence) => gambler::eb_with(chain, j, i, k, ConditionalPath::Recurrence)?,
        ("eb", Method::Oracle) => pick_conditional(
            oracle::solve_conditional_time(chain, j, k, Condition::Lose)?,
            j,
            i,
            k,
            "losing time does not exist from the winning barrier",
        )?,
        _ => unreachable!(),
    };
    Ok(value)
}

fn pick(values: Vec<Scalar>, j: usize, i: usize, k: usize) -> Result<Scalar, Error> {
    if i < j || i > k {
        return Err(Error::BadIndices(format!("need j <= i <= k; got ({j}, {i}, {k})")));
    }
    Ok(values[i - j].clone())
}

fn pick_conditional(
    values: Vec<Option<Scalar>>,
    j: usize,
    i: usize,
    k: usize,
    missing: &str,
) -> Result<Scalar, Error> {
    if i < j || i > k {
        return Err(Error::BadIndices(format!("need j <= i <= k; got ({j}, {i}, {k})")));
    }
    values[i - j]
        .clone()
        .ok_or_else(|| Error::UndefinedConditional(missing.into()))
}

fn polygon_records(quantity: &PolygonQuantity) -> anyhow::Result<Vec<ResultRecord>> {
    match quantity {
        PolygonQuantity::Ai(args) => {
            let poly = load_polygon(&args.chain)?;
            let exact = polygon::prob_all_before_return(&poly, args.i)?;
            Ok(vec![ResultRecord::new("ai", &[("i", args.i.to_string())], exact)])
        }
        PolygonQuantity::Ev(args) => {
            let poly = load_polygon(&args.chain)?;
            let exact = polygon::ev_cover(&poly, args.i)?;
            Ok(vec![ResultRecord::new("ev", &[("i", args.i.to_string())], exact)])
        }
        PolygonQuantity::Er(args) => {
            let poly = load_polygon(&args.chain)?;
            let exact = polygon::er_return(&poly, args.i)?;
            Ok(vec![ResultRecord::new("er", &[("i", args.i.to_string())], exact)])
        }
        PolygonQuantity::Lij(args) => {
            pairwise_records("lij", args, polygon::prob_last_vertex)
        }
        PolygonQuantity::Evij(args) => {
            pairwise_records("evij", args, polygon::ev_last)
        }
    }
}

fn pairwise_records(
    name: &str,
    args: &PolygonPairArgs,
    compute: impl Fn(&ruin_core::PolygonChain, usize, usize) -> Result<Scalar, Error>,
) -> anyhow::Result<Vec<ResultRecord>> {
    let poly = load_polygon(&args.chain)?;
    let vertices = poly.vertices();
    let i = args.i;
    let targets: Vec<usize> = match args.j {
        Some(j) => vec![j],
        None => (1..vertices).map(|d| (i + d) % vertices).collect(),
    };
    let mut out = Vec::new();
    for j in targets {
        let exact = compute(&poly, i, j)?;
        out.push(ResultRecord::new(
            name,
            &[("i", i.to_string()), ("j", j.to_string())],
            exact,
        ));
    }
    Ok(out)
}

fn emit(records: &[ResultRecord], format: Format) {
    match format {
        Format::Json => {
            for record in records {
                println!("{}", record.to_json());
            }
        }
        Format::Csv => {
            println!("{}", ResultRecord::csv_header());
            for record in records {
                println!("{}", record.to_csv_row());
            }
        }
    }
}

fn simulate(target: SimulateTarget) -> anyhow::Result<()> {
    match target {
        SimulateTarget::Gambler { chain, j, i, k, trials, seed, workers } => {
            let chain = load_gambler(&chain)?;
            let reports = run_gambler_parallel(&chain, j, i, k, trials, seed, workers.max(1))?;
            for report in &reports {
                println!("{}", report_to_json(report));
            }
        }
        SimulateTarget::Polygon { chain, i, trials, seed, workers } => {
            let poly = load_polygon(&chain)?;
            let reports = run_polygon_parallel(&poly, i, trials, seed, workers.max(1))?;
            for report in &reports {
                println!("{}", report_to_json(report));
            }
        }
        SimulateTarget::Conjecture { chain, i, trials, seed, workers: _ } => {
            let chain = load_gambler(&chain)?;
            let report = conjecture_probe(&chain, i, trials, seed)?;
            println!("{}", conjecture_to_json(&report));
        }
    }
    Ok(())
}
