//! End-to-end scenario runner: load config, train or load the surrogate,
//! assemble the MILP, solve, analyze, and write the artifact bundle.
//!
//! Every output under the scenario directory is derived solely from the
//! config and fixtures — no timestamps or machine identity — so reruns with
//! the deterministic solve flag are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    cost_breakdown, inadequate_buses, scc_profile, AnalysisError, CostReport, SccProfile,
    SccSource,
};
use crate::dr::{DrError, DrSpec};
use crate::grid::{load_grid, GridError, GridModel};
use crate::solver::{solve_milp, SolveError, SolveOptions, SolveResult, SolveStatus};
use crate::surrogate::{
    fit_surrogate, generate_samples, load_surrogate, save_surrogate, validation_report,
    SampleStrategy, SccSurrogate, SurrogateError, DEFAULT_ALPHA_GRID,
};
use crate::uc::{add_scc_constraints, build_uc_milp, extract_solution, TimeSeriesInputs, UcError, UcSolution};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Config(String),
    #[error("series parse error: {0}")]
    Series(String),
    #[error("scenario is infeasible")]
    Infeasible,
    #[error("solver hit its limits before finding a feasible point")]
    LimitWithoutIncumbent,
    #[error("problem is unbounded (modeling error)")]
    Unbounded,
    #[error("comparison needs at least two scenarios")]
    TooFewBundles,
    #[error("scenarios use different grids: {0} vs {1}")]
    GridMismatch(String, String),
    #[error("grid stage: {0}")]
    Grid(#[from] GridError),
    #[error("surrogate stage: {0}")]
    Surrogate(#[from] SurrogateError),
    #[error("model stage: {0}")]
    Uc(#[from] UcError),
    #[error("DR stage: {0}")]
    Dr(#[from] DrError),
    #[error("solve stage: {0}")]
    Solve(#[from] SolveError),
    #[error("analysis stage: {0}")]
    Analysis(#[from] AnalysisError),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateConfig {
    /// "train" or "load".
    pub mode: String,
    /// Load path in load mode; optional save path in train mode.
    pub path: Option<PathBuf>,
    /// "exhaustive" or "random" (train mode).
    #[serde(default = "default_strategy")]
    pub strategy: String,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub allow_min_norm: bool,
    #[serde(default)]
    pub conservative: bool,
}

fn default_strategy() -> String {
    "random".into()
}
fn default_count() -> usize {
    1500
}
fn default_seed() -> u64 {
    7
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSettings {
    pub rel_gap: Option<f64>,
    pub feas_tol: Option<f64>,
    pub int_tol: Option<f64>,
    pub node_limit: Option<usize>,
    pub time_limit: Option<f64>,
}

impl SolveSettings {
    pub fn to_options(&self) -> SolveOptions {
        let mut o = SolveOptions::default();
        if let Some(v) = self.rel_gap {
            o.rel_gap = v;
        }
        if let Some(v) = self.feas_tol {
            o.feas_tol = v;
        }
        if let Some(v) = self.int_tol {
            o.int_tol = v;
        }
        if let Some(v) = self.node_limit {
            o.node_limit = v;
        }
        o.time_limit = self.time_limit;
        o
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub label: String,
    pub grid: PathBuf,
    pub series: PathBuf,
    pub dr_enabled: bool,
    pub scc_enabled: bool,
    pub output_dir: PathBuf,
    pub dr: Option<DrSpec>,
    pub surrogate: SurrogateConfig,
    #[serde(default)]
    pub solve: SolveSettings,
    /// SCC threshold; defaults to the grid's.
    pub threshold: Option<f64>,
    /// Keep pair activations continuous (exact for binary commitments).
    #[serde(default = "default_relax_eta")]
    pub relax_eta: bool,
}

fn default_relax_eta() -> bool {
    true
}

/// Read a scenario config; relative paths are resolved against the config
/// file's directory.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut config: ScenarioConfig =
        toml::from_str(&text).map_err(|e| ScenarioError::Config(e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &PathBuf| {
        if p.is_relative() {
            base.join(p)
        } else {
            p.clone()
        }
    };
    config.grid = resolve(&config.grid);
    config.series = resolve(&config.series);
    config.output_dir = resolve(&config.output_dir);
    if let Some(p) = &config.surrogate.path {
        config.surrogate.path = Some(resolve(p));
    }
    Ok(config)
}

pub fn load_series(path: &Path) -> Result<TimeSeriesInputs, ScenarioError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    toml::from_str(&text).map_err(|e| ScenarioError::Series(e.to_string()))
}

/// Train a surrogate per the config, or load a persisted one.
pub fn obtain_surrogate(
    config: &SurrogateConfig,
    grid: &GridModel,
    output_dir: Option<&Path>,
) -> Result<SccSurrogate, ScenarioError> {
    if config.mode == "load" {
        let path = config
            .path
            .as_ref()
            .ok_or_else(|| ScenarioError::Config("surrogate.mode = \"load\" needs a path".into()))?;
        let s = load_surrogate(path)?;
        if !s.matches_grid(grid) {
            return Err(ScenarioError::Uc(UcError::SurrogateMismatch));
        }
        return Ok(s);
    }
    if config.mode != "train" {
        return Err(ScenarioError::Config(format!(
            "surrogate.mode must be \"train\" or \"load\", got {}",
            config.mode
        )));
    }
    let alpha_grid = config
        .alpha_grid
        .clone()
        .unwrap_or_else(|| DEFAULT_ALPHA_GRID.to_vec());
    let strategy = match config.strategy.as_str() {
        "exhaustive" => SampleStrategy::Exhaustive,
        "random" => SampleStrategy::Random {
            count: config.count,
            seed: config.seed,
        },
        other => {
            return Err(ScenarioError::Config(format!(
                "surrogate.strategy must be \"exhaustive\" or \"random\", got {other}"
            )))
        }
    };
    let samples = generate_samples(grid, &strategy, &alpha_grid)?;
    let mut s = fit_surrogate(grid, &samples, config.allow_min_norm)?;
    s.shift_enabled = config.conservative;
    if let Some(dir) = output_dir {
        save_surrogate(&s, &dir.join("surrogate.json"))?;
        let report = validation_report(&s, &samples)?;
        fs::write(dir.join("scatter.csv"), &report.scatter).map_err(io_err(dir))?;
    }
    if let Some(path) = &config.path {
        save_surrogate(&s, path)?;
    }
    Ok(s)
}

/// Summary facts of one scenario run, persisted for comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioBundle {
    pub label: String,
    pub grid_file: String,
    pub dr_enabled: bool,
    pub scc_enabled: bool,
    pub status: String,
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub node_count: usize,
    pub operation_cost: f64,
    pub consumer_payment: f64,
    pub total_cost: f64,
    pub baseline_demand_avg: f64,
    pub post_dr_demand_avg: f64,
    pub curtailment_total: f64,
    pub shift_in_total: f64,
    pub shift_out_total: f64,
    pub inadequate_buses: Vec<usize>,
}

/// Everything a run produces in memory; the bundle subset is also written
/// to disk.
pub struct ScenarioOutcome {
    pub bundle: ScenarioBundle,
    pub solution: UcSolution,
    pub profile: SccProfile,
    pub costs: CostReport,
    pub solve: SolveResult,
}

fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::GapLimit => "gap-limit",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
        SolveStatus::Limit => "limit",
    }
}

/// Run one scenario end to end and write its artifact bundle.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome, ScenarioError> {
    let grid = load_grid(&config.grid)?;
    let inputs = load_series(&config.series)?;
    inputs.validate(&grid)?;
    if let Some(spec) = &config.dr {
        spec.validate()?;
    }
    fs::create_dir_all(&config.output_dir).map_err(io_err(&config.output_dir))?;

    let surrogate = obtain_surrogate(&config.surrogate, &grid, Some(&config.output_dir))?;

    let mut problem = build_uc_milp(&grid, &inputs, config.dr.as_ref(), config.dr_enabled)?;
    let threshold = config.threshold.unwrap_or(grid.scc_threshold);
    if config.scc_enabled {
        add_scc_constraints(
            &mut problem,
            &grid,
            &surrogate,
            &inputs,
            threshold,
            config.relax_eta,
        )?;
    }

    let opts = config.solve.to_options();
    let result = solve_milp(&problem, &opts)?;
    fs::write(config.output_dir.join("solve.log"), result.render_log())
        .map_err(io_err(&config.output_dir))?;
    match result.status {
        SolveStatus::Infeasible => return Err(ScenarioError::Infeasible),
        SolveStatus::Unbounded => return Err(ScenarioError::Unbounded),
        SolveStatus::Limit if result.x.is_empty() => {
            return Err(ScenarioError::LimitWithoutIncumbent)
        }
        _ => {}
    }

    let solution = extract_solution(
        &grid,
        &inputs,
        config.dr.as_ref(),
        &problem,
        &result.x,
        result.objective,
    )?;
    let profile = scc_profile(&solution, &grid, &inputs, SccSource::Surrogate(&surrogate))?;
    let inadequate = inadequate_buses(&profile, threshold);
    let costs = cost_breakdown(
        &solution,
        &grid,
        &inputs,
        config.dr.as_ref(),
        config.label.clone(),
    )?;

    let horizon = inputs.horizon() as f64;
    let post = crate::dr::effective_demand(&inputs.demand, &solution.dr)?;
    let bundle = ScenarioBundle {
        label: config.label.clone(),
        grid_file: config
            .grid
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        dr_enabled: config.dr_enabled,
        scc_enabled: config.scc_enabled,
        status: status_name(result.status).to_string(),
        objective: result.objective,
        best_bound: result.best_bound,
        gap: (result.objective - result.best_bound) / result.objective.abs().max(1.0),
        node_count: result.node_count,
        operation_cost: costs.operation_cost,
        consumer_payment: costs.consumer_payment,
        total_cost: costs.total_cost,
        baseline_demand_avg: inputs.demand.iter().sum::<f64>() / horizon,
        post_dr_demand_avg: post.iter().sum::<f64>() / horizon,
        // `+ 0.0` normalizes the -0.0 an empty f64 sum produces.
        curtailment_total: solution
            .dr
            .curtail
            .iter()
            .map(|c| c.iter().sum::<f64>())
            .sum::<f64>()
            + 0.0,
        shift_in_total: solution.dr.shift_in.iter().sum::<f64>() + 0.0,
        shift_out_total: solution.dr.shift_out.iter().sum::<f64>() + 0.0,
        inadequate_buses: inadequate,
    };

    write_outputs(&config.output_dir, &bundle, &solution, &profile, &costs)?;
    Ok(ScenarioOutcome {
        bundle,
        solution,
        profile,
        costs,
        solve: result,
    })
}

fn write_outputs(
    dir: &Path,
    bundle: &ScenarioBundle,
    solution: &UcSolution,
    profile: &SccProfile,
    costs: &CostReport,
) -> Result<(), ScenarioError> {
    let w = |name: &str, contents: String| -> Result<(), ScenarioError> {
        fs::write(dir.join(name), contents).map_err(io_err(dir))
    };
    w("solution.json", serde_json::to_string_pretty(solution)? + "\n")?;
    w("bundle.json", serde_json::to_string_pretty(bundle)? + "\n")?;
    w("scc_profile.csv", profile.to_csv())?;
    w(
        "costs.csv",
        format!("{}\n{}\n", CostReport::csv_header(), costs.to_csv_row()),
    )?;
    w("summary.txt", render_summary(bundle))?;
    Ok(())
}

fn render_summary(b: &ScenarioBundle) -> String {
    let mut s = String::new();
    s.push_str(&format!("scenario: {}\n", b.label));
    s.push_str(&format!("status: {} (gap {:.3e}, {} nodes)\n", b.status, b.gap, b.node_count));
    s.push_str(&format!("operation cost: {:.2}\n", b.operation_cost));
    s.push_str(&format!("consumer payment: {:.2}\n", b.consumer_payment));
    s.push_str(&format!("total cost: {:.2}\n", b.total_cost));
    s.push_str(&format!(
        "demand avg: {:.2} baseline, {:.2} post-DR\n",
        b.baseline_demand_avg, b.post_dr_demand_avg
    ));
    s.push_str(&format!(
        "curtailment total: {:.2}, shift in/out: {:.2}/{:.2}\n",
        b.curtailment_total, b.shift_in_total, b.shift_out_total
    ));
    let buses = if b.inadequate_buses.is_empty() {
        "none".to_string()
    } else {
        b.inadequate_buses
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    };
    s.push_str(&format!("inadequate buses: {buses}\n"));
    s
}

pub fn load_bundle(path: &Path) -> Result<ScenarioBundle, ScenarioError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

/// Side-by-side comparison table of several scenario bundles.
pub fn compare_scenarios(bundles: &[ScenarioBundle]) -> Result<String, ScenarioError> {
    if bundles.len() < 2 {
        return Err(ScenarioError::TooFewBundles);
    }
    for b in &bundles[1..] {
        if b.grid_file != bundles[0].grid_file {
            return Err(ScenarioError::GridMismatch(
                bundles[0].grid_file.clone(),
                b.grid_file.clone(),
            ));
        }
    }
    let mut out = String::from("metric");
    for b in bundles {
        out.push_str(&format!(",{}", b.label));
    }
    out.push('\n');
    let mut row = |name: &str, f: &dyn Fn(&ScenarioBundle) -> String| {
        out.push_str(name);
        for b in bundles {
            out.push_str(&format!(",{}", f(b)));
        }
        out.push('\n');
    };
    row("status", &|b| b.status.clone());
    row("operation_cost", &|b| format!("{}", b.operation_cost));
    row("consumer_payment", &|b| format!("{}", b.consumer_payment));
    row("total_cost", &|b| format!("{}", b.total_cost));
    row("baseline_demand_avg", &|b| format!("{}", b.baseline_demand_avg));
    row("post_dr_demand_avg", &|b| format!("{}", b.post_dr_demand_avg));
    row("curtailment_total", &|b| format!("{}", b.curtailment_total));
    row("shift_in_total", &|b| format!("{}", b.shift_in_total));
    row("shift_out_total", &|b| format!("{}", b.shift_out_total));
    row("inadequate_buses", &|b| {
        if b.inadequate_buses.is_empty() {
            "-".to_string()
        } else {
            b.inadequate_buses
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        }
    });
    Ok(out)
}
