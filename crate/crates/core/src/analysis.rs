//! Post-solve adequacy screening and cost reporting: per-bus SCC profiles
//! over the horizon, threshold screening, and the operation/payment/total
//! cost breakdown.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dr;
use crate::dr::DrSpec;
use crate::grid::{scc_oracle, BusId, GridError, GridModel};
use crate::surrogate::{evaluate_surrogate, SccSurrogate, SurrogateError};
use crate::uc::{TimeSeriesInputs, UcSolution};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("solution horizon {got} does not match series horizon {expected}")]
    HorizonMismatch { got: usize, expected: usize },
    #[error("solution has {got} SG rows, grid has {expected}")]
    SgMismatch { got: usize, expected: usize },
    #[error("cost components sum to {recomputed}, solver objective is {objective}")]
    CostMismatch { objective: f64, recomputed: f64 },
    #[error("DR solution needs the DR spec for the payment recomputation")]
    MissingDrSpec,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Dr(#[from] dr::DrError),
}

/// Which SCC evaluator fills the profile.
#[derive(Debug, Clone, Copy)]
pub enum SccSource<'a> {
    Surrogate(&'a SccSurrogate),
    Oracle,
}

impl SccSource<'_> {
    pub fn tag(&self) -> &'static str {
        match self {
            SccSource::Surrogate(_) => "surrogate",
            SccSource::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SccProfile {
    pub bus_ids: Vec<BusId>,
    /// Fault current per bus per period, `values[b][t]`, p.u.
    pub values: Vec<Vec<f64>>,
    /// Horizon minimum per bus.
    pub minima: Vec<f64>,
    /// "surrogate" or "oracle".
    pub source: String,
}

impl SccProfile {
    /// Delimiter-separated table: bus, minimum, then one column per period.
    pub fn to_csv(&self) -> String {
        let horizon = self.values.first().map_or(0, Vec::len);
        let mut out = String::from("bus,min");
        for t in 0..horizon {
            out.push_str(&format!(",t{t}"));
        }
        out.push('\n');
        for (b, &bus) in self.bus_ids.iter().enumerate() {
            out.push_str(&format!("{bus},{}", self.minima[b]));
            for v in &self.values[b] {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluate the chosen SCC source at every bus and period of a solution.
pub fn scc_profile(
    sol: &UcSolution,
    grid: &GridModel,
    inputs: &TimeSeriesInputs,
    source: SccSource,
) -> Result<SccProfile, AnalysisError> {
    let horizon = inputs.horizon();
    if sol.horizon() != horizon {
        return Err(AnalysisError::HorizonMismatch {
            got: sol.horizon(),
            expected: horizon,
        });
    }
    if sol.u.len() != grid.num_sgs() {
        return Err(AnalysisError::SgMismatch {
            got: sol.u.len(),
            expected: grid.num_sgs(),
        });
    }
    let nb = grid.num_buses();
    let mut values = vec![Vec::with_capacity(horizon); nb];
    for t in 0..horizon {
        let u: Vec<u8> = (0..grid.num_sgs()).map(|g| sol.u[g][t]).collect();
        let alpha: Vec<f64> = (0..grid.num_ibrs()).map(|c| inputs.alpha[c][t]).collect();
        for (b, &bus) in grid.buses.iter().enumerate() {
            let v = match source {
                SccSource::Surrogate(s) => evaluate_surrogate(s, &u, &alpha, bus)?,
                SccSource::Oracle => scc_oracle(grid, &u, &alpha, bus)?,
            };
            values[b].push(v);
        }
    }
    let minima = values
        .iter()
        .map(|row| row.iter().cloned().fold(f64::INFINITY, f64::min))
        .collect();
    Ok(SccProfile {
        bus_ids: grid.buses.clone(),
        values,
        minima,
        source: source.tag().to_string(),
    })
}

/// Buses whose horizon-minimum SCC falls below the threshold, ascending.
pub fn inadequate_buses(profile: &SccProfile, threshold: f64) -> Vec<BusId> {
    let mut buses: Vec<BusId> = profile
        .bus_ids
        .iter()
        .zip(&profile.minima)
        .filter(|&(_, &m)| m < threshold)
        .map(|(&b, _)| b)
        .collect();
    buses.sort_unstable();
    buses
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostReport {
    pub label: String,
    pub operation_cost: f64,
    pub consumer_payment: f64,
    pub total_cost: f64,
}

impl CostReport {
    pub fn csv_header() -> &'static str {
        "scenario,operation_cost,consumer_payment,total_cost"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.label, self.operation_cost, self.consumer_payment, self.total_cost
        )
    }
}

/// Recompute the cost components from first principles and cross-check
/// against the solver objective carried by the solution.
pub fn cost_breakdown(
    sol: &UcSolution,
    grid: &GridModel,
    inputs: &TimeSeriesInputs,
    dr_spec: Option<&DrSpec>,
    label: impl Into<String>,
) -> Result<CostReport, AnalysisError> {
    let horizon = sol.horizon();
    let mut operation = 0.0;
    for (g, sg) in grid.generators.iter().enumerate() {
        for t in 0..horizon {
            operation += sg.c_nl * sol.u[g][t] as f64
                + sg.c_m * sol.p_sg[g][t]
                + sol.start_cost[g][t]
                + sol.shut_cost[g][t];
        }
    }
    let payment = if sol.dr_enabled {
        let spec = dr_spec.ok_or(AnalysisError::MissingDrSpec)?;
        dr::consumer_payment(&inputs.demand, &sol.dr, spec, &inputs.lambda)?.1
    } else {
        inputs
            .lambda
            .iter()
            .zip(&inputs.demand)
            .map(|(l, d)| l * d)
            .sum()
    };
    let total = operation + payment;
    if (total - sol.objective).abs() > 1e-6 * sol.objective.abs().max(1.0) {
        return Err(AnalysisError::CostMismatch {
            objective: sol.objective,
            recomputed: total,
        });
    }
    Ok(CostReport {
        label: label.into(),
        operation_cost: operation,
        consumer_payment: payment,
        total_cost: total,
    })
}
