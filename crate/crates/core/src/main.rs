//! Command-line front end: surrogate training, scenario solves, report
//! regeneration, scenario comparison, and MPS export.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sccuc::analysis::{cost_breakdown, inadequate_buses, scc_profile, SccSource};
use sccuc::grid::load_grid;
use sccuc::mps::write_mps_file;
use sccuc::scenario::{
    compare_scenarios, load_bundle, load_config, load_series, obtain_surrogate, run_scenario,
    SurrogateConfig,
};
use sccuc::surrogate::load_surrogate;
use sccuc::uc::{add_scc_constraints, build_uc_milp};

#[derive(Parser)]
#[command(
    name = "sccuc",
    about = "Unit commitment with demand response and short-circuit-current adequacy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the per-bus linear SCC surrogate against the fault oracle.
    TrainScc {
        /// Grid description (TOML).
        #[arg(long)]
        grid: PathBuf,
        /// Where to write the fitted surrogate (JSON).
        #[arg(long)]
        out: PathBuf,
        /// Sampling strategy: "random" or "exhaustive".
        #[arg(long, default_value = "random")]
        strategy: String,
        /// Sample count for random sampling.
        #[arg(long, default_value_t = 1500)]
        count: usize,
        /// RNG seed for random sampling.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Comma-separated availability levels.
        #[arg(long, value_delimiter = ',')]
        alpha_grid: Option<Vec<f64>>,
        /// Accept a minimum-norm fit when the design is rank deficient.
        #[arg(long)]
        allow_min_norm: bool,
        /// Shift each bus down by its worst training overestimate.
        #[arg(long)]
        conservative: bool,
        /// Optional actual-vs-approx scatter table (CSV).
        #[arg(long)]
        scatter: Option<PathBuf>,
    },
    /// Run one scenario end to end: train/load surrogate, build, solve,
    /// analyze, write the artifact bundle.
    Solve {
        /// Scenario config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Override the relative MIP gap.
        #[arg(long)]
        gap: Option<f64>,
        /// Override the time limit, seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Override the surrogate sampling seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Regenerate the reports of a finished scenario from its solution file.
    Report {
        /// Scenario config (TOML); reads the bundle from its output dir.
        #[arg(long)]
        config: PathBuf,
    },
    /// Print a side-by-side table of two or more scenario bundles.
    Compare {
        /// bundle.json files or scenario output directories.
        #[arg(required = true, num_args = 2..)]
        bundles: Vec<PathBuf>,
        /// Also write the table here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the scenario MILP in free-format MPS.
    ExportMps {
        /// Scenario config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::TrainScc {
            grid,
            out,
            strategy,
            count,
            seed,
            alpha_grid,
            allow_min_norm,
            conservative,
            scatter,
        } => {
            let model = load_grid(&grid)?;
            let config = SurrogateConfig {
                mode: "train".into(),
                path: Some(out.clone()),
                strategy,
                count,
                seed,
                alpha_grid,
                allow_min_norm,
                conservative,
            };
            let s = obtain_surrogate(&config, &model, None)?;
            if let Some(path) = scatter {
                use sccuc::surrogate::{generate_samples, validation_report, SampleStrategy};
                let grid_levels = config
                    .alpha_grid
                    .clone()
                    .unwrap_or_else(|| sccuc::surrogate::DEFAULT_ALPHA_GRID.to_vec());
                let samples = generate_samples(
                    &model,
                    &SampleStrategy::Random { count, seed },
                    &grid_levels,
                )?;
                let report = validation_report(&s, &samples)?;
                std::fs::write(&path, report.scatter)?;
            }
            let worst = s
                .diagnostics
                .iter()
                .map(|d| d.max_abs_error)
                .fold(0.0f64, f64::max);
            println!(
                "trained surrogate for {} buses, max abs training error {worst:.4} p.u., wrote {}",
                s.num_buses(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            config,
            gap,
            time_limit,
            seed,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(g) = gap {
                cfg.solve.rel_gap = Some(g);
            }
            if let Some(t) = time_limit {
                cfg.solve.time_limit = Some(t);
            }
            if let Some(s) = seed {
                cfg.surrogate.seed = s;
            }
            let outcome = run_scenario(&cfg)?;
            print!(
                "{}",
                std::fs::read_to_string(cfg.output_dir.join("summary.txt"))?
            );
            match outcome.bundle.status.as_str() {
                "optimal" | "gap-limit" => Ok(ExitCode::SUCCESS),
                _ => Ok(ExitCode::from(2)),
            }
        }
        Command::Report { config } => {
            let cfg = load_config(&config)?;
            let grid = load_grid(&cfg.grid)?;
            let inputs = load_series(&cfg.series)?;
            let solution: sccuc::uc::UcSolution = serde_json::from_str(
                &std::fs::read_to_string(cfg.output_dir.join("solution.json"))?,
            )?;
            let surrogate = load_surrogate(&cfg.output_dir.join("surrogate.json"))?;
            let profile = scc_profile(&solution, &grid, &inputs, SccSource::Surrogate(&surrogate))?;
            let threshold = cfg.threshold.unwrap_or(grid.scc_threshold);
            let costs = cost_breakdown(&solution, &grid, &inputs, cfg.dr.as_ref(), cfg.label)?;
            std::fs::write(cfg.output_dir.join("scc_profile.csv"), profile.to_csv())?;
            std::fs::write(
                cfg.output_dir.join("costs.csv"),
                format!(
                    "{}\n{}\n",
                    sccuc::analysis::CostReport::csv_header(),
                    costs.to_csv_row()
                ),
            )?;
            let low = inadequate_buses(&profile, threshold);
            println!(
                "operation {:.2}, payment {:.2}, total {:.2}",
                costs.operation_cost, costs.consumer_payment, costs.total_cost
            );
            if low.is_empty() {
                println!("inadequate buses: none");
            } else {
                println!(
                    "inadequate buses: {}",
                    low.iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { bundles, out } => {
            let loaded: Result<Vec<_>, _> = bundles
                .iter()
                .map(|p| {
                    let path = if p.is_dir() { p.join("bundle.json") } else { p.clone() };
                    load_bundle(&path)
                })
                .collect();
            let table = compare_scenarios(&loaded?)?;
            print!("{table}");
            if let Some(path) = out {
                std::fs::write(path, table)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportMps { config, out } => {
            let cfg = load_config(&config)?;
            let grid = load_grid(&cfg.grid)?;
            let inputs = load_series(&cfg.series)?;
            let mut problem = build_uc_milp(&grid, &inputs, cfg.dr.as_ref(), cfg.dr_enabled)?;
            if cfg.scc_enabled {
                let surrogate = obtain_surrogate(&cfg.surrogate, &grid, None)?;
                let threshold = cfg.threshold.unwrap_or(grid.scc_threshold);
                add_scc_constraints(
                    &mut problem,
                    &grid,
                    &surrogate,
                    &inputs,
                    threshold,
                    cfg.relax_eta,
                )?;
            }
            write_mps_file(&problem, &out)?;
            println!(
                "wrote {} ({} columns, {} rows)",
                out.display(),
                problem.num_cols(),
                problem.num_rows()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
