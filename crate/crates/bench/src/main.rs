use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bench::output::export_scenarios;
use bench::scenarios::SUPPORTED_DIMS;
use bench::{build_scenario, run_and_emit, BenchError, BenchmarkSpec, BudgetSpec, PlannerKind, QueryMode, ScenarioName};

#[derive(Parser)]
#[command(name = "bench", version, about = "Multiquery planning benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a planner × run matrix over one shared query sequence.
    Run(RunArgs),
    /// Scenario definitions.
    Scenarios {
        #[command(subcommand)]
        command: ScenarioCommand,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Write every scenario definition as JSON into DIR.
    Export { dir: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// wall_gap or repeating_rectangles.
    #[arg(long)]
    scenario: ScenarioName,
    /// 2, 4 or 8.
    #[arg(long)]
    dim: usize,
    /// subregion or global.
    #[arg(long, default_value = "subregion")]
    mode: QueryMode,
    #[arg(long, default_value_t = 20)]
    queries: usize,
    #[arg(long, default_value_t = 25)]
    runs: usize,
    /// Seconds per query (defaults to 0.5 in 2D and 2 otherwise).
    #[arg(long)]
    budget: Option<f64>,
    /// Comma-separated: eirm, eit, lazyprmstar, rrtconnect.
    #[arg(long, value_delimiter = ',', default_value = "eirm,lazyprmstar,rrtconnect")]
    planners: Vec<PlannerKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Stop every query at its first solution.
    #[arg(long)]
    initial_only: bool,
    /// Deterministic budget of N main-loop iterations per query.
    #[arg(long, value_name = "N", conflicts_with = "budget")]
    iterations: Option<u64>,
}

fn run(args: RunArgs) -> Result<(), BenchError> {
    if !SUPPORTED_DIMS.contains(&args.dim) {
        return Err(BenchError::Usage(format!("dimension {} is not supported", args.dim)));
    }
    let budget = match (args.iterations, args.budget) {
        (Some(n), _) => BudgetSpec::Iterations(n),
        (None, Some(s)) => BudgetSpec::Seconds(s),
        (None, None) => BudgetSpec::default_for_dimension(args.dim),
    };
    let spec = BenchmarkSpec {
        scenario: args.scenario,
        dim: args.dim,
        mode: args.mode,
        n_queries: args.queries,
        n_runs: args.runs,
        budget,
        planners: args.planners,
        master_seed: args.seed,
        initial_only: args.initial_only,
    };
    let (table, summary) = run_and_emit(&spec, &args.out)?;
    for p in &summary.planners {
        println!(
            "{:<12} cumulative median t_init {:>10}  c_init {:>10}  c_final {:>10}  failed rows {}",
            p.planner,
            bench::format_metric(p.cumulative.t_init.0),
            bench::format_metric(p.cumulative.c_init.0),
            bench::format_metric(p.cumulative.c_final.0),
            p.failed_rows
        );
    }
    println!("{} rows written to {}", table.rows.len(), args.out.display());
    Ok(())
}

fn export(dir: PathBuf) -> Result<(), BenchError> {
    let mut all = Vec::new();
    for name in ScenarioName::ALL {
        for dim in SUPPORTED_DIMS {
            all.push(build_scenario(name, dim)?);
        }
    }
    for name in export_scenarios(&dir, &all)? {
        println!("{}", dir.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Scenarios {
            command: ScenarioCommand::Export { dir },
        } => export(dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
