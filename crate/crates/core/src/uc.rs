//! Unit-commitment MILP assembly: single-balance UC with start/shut cost
//! epigraphs, curtailable wind, the optional DR block, and the optional
//! per-bus SCC threshold constraints with McCormick pair terms.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dr::{self, DrDecisions, DrError, DrSpec};
use crate::grid::GridModel;
use crate::milp::{MilpError, MilpProblem, RowSense, VarKey};
use crate::surrogate::SccSurrogate;

#[derive(Debug, Error)]
pub enum UcError {
    #[error("series horizons differ: demand {demand}, lambda {lambda}, alpha {alpha}")]
    HorizonMismatch {
        demand: usize,
        lambda: usize,
        alpha: usize,
    },
    #[error("horizon must be at least one period")]
    EmptyHorizon,
    #[error("alpha series needs one row per IBR ({expected}), got {got}")]
    AlphaRows { got: usize, expected: usize },
    #[error("alpha value {0} outside [0, 1]")]
    AlphaRange(f64),
    #[error("demand at period {0} must be positive")]
    NonpositiveDemand(usize),
    #[error("DR flag set but no DR spec provided")]
    MissingDrSpec,
    #[error("surrogate does not match the grid")]
    SurrogateMismatch,
    #[error("recomputed cost {recomputed} differs from solver objective {objective}")]
    ObjectiveMismatch { objective: f64, recomputed: f64 },
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Dr(#[from] DrError),
}

/// Exogenous per-period series driving one scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSeriesInputs {
    /// Baseline demand, MWh per period.
    pub demand: Vec<f64>,
    /// Energy price, currency/MWh.
    pub lambda: Vec<f64>,
    /// IBR availability, `alpha[ibr][t]` in [0, 1].
    pub alpha: Vec<Vec<f64>>,
}

impl TimeSeriesInputs {
    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    pub fn validate(&self, grid: &GridModel) -> Result<(), UcError> {
        let t = self.demand.len();
        if t == 0 {
            return Err(UcError::EmptyHorizon);
        }
        let alpha_len = self.alpha.first().map_or(t, Vec::len);
        if self.lambda.len() != t || self.alpha.iter().any(|a| a.len() != t) {
            return Err(UcError::HorizonMismatch {
                demand: t,
                lambda: self.lambda.len(),
                alpha: alpha_len,
            });
        }
        if self.alpha.len() != grid.num_ibrs() {
            return Err(UcError::AlphaRows {
                got: self.alpha.len(),
                expected: grid.num_ibrs(),
            });
        }
        for row in &self.alpha {
            for &a in row {
                if !(0.0..=1.0).contains(&a) {
                    return Err(UcError::AlphaRange(a));
                }
            }
        }
        for (t, &d) in self.demand.iter().enumerate() {
            if d <= 0.0 {
                return Err(UcError::NonpositiveDemand(t));
            }
        }
        Ok(())
    }
}

/// Assemble the UC MILP. The energy payment enters the objective either as
/// DR-dependent terms (dr_enabled) or as the constant baseline payment.
pub fn build_uc_milp(
    grid: &GridModel,
    inputs: &TimeSeriesInputs,
    dr_spec: Option<&DrSpec>,
    dr_enabled: bool,
) -> Result<MilpProblem, UcError> {
    inputs.validate(grid)?;
    let spec = if dr_enabled {
        Some(dr_spec.ok_or(UcError::MissingDrSpec)?)
    } else {
        None
    };
    let horizon = inputs.horizon();
    let mut p = MilpProblem::new("uc");

    for (g, sg) in grid.generators.iter().enumerate() {
        for t in 0..horizon {
            p.add_variable(VarKey::Commit { sg: g, t }, 0.0, 1.0, sg.c_nl, true)?;
            p.add_variable(VarKey::SgPower { sg: g, t }, 0.0, sg.p_max, sg.c_m, false)?;
            p.add_variable(VarKey::StartCost { sg: g, t }, 0.0, f64::INFINITY, 1.0, false)?;
            p.add_variable(VarKey::ShutCost { sg: g, t }, 0.0, f64::INFINITY, 1.0, false)?;
        }
    }
    for (c, ibr) in grid.ibrs.iter().enumerate() {
        for t in 0..horizon {
            // Wind is free of charge and curtailable below its availability.
            p.add_variable(
                VarKey::IbrPower { ibr: c, t },
                0.0,
                inputs.alpha[c][t] * ibr.p_max,
                0.0,
                false,
            )?;
        }
    }
    if let Some(spec) = spec {
        dr::build_dr_block(&mut p, spec, &inputs.demand)?;
    }

    // Generation limits tied to commitment.
    for (g, sg) in grid.generators.iter().enumerate() {
        for t in 0..horizon {
            let u = p.col(&VarKey::Commit { sg: g, t })?;
            let pg = p.col(&VarKey::SgPower { sg: g, t })?;
            p.add_row(
                format!("pmax_{g}_{t}"),
                vec![(pg, 1.0), (u, -sg.p_max)],
                RowSense::Le,
                0.0,
            )?;
            p.add_row(
                format!("pmin_{g}_{t}"),
                vec![(pg, 1.0), (u, -sg.p_min)],
                RowSense::Ge,
                0.0,
            )?;
        }
    }

    // Start-up / shut-down cost epigraphs.
    for (g, sg) in grid.generators.iter().enumerate() {
        for t in 0..horizon {
            let cst = p.col(&VarKey::StartCost { sg: g, t })?;
            let csh = p.col(&VarKey::ShutCost { sg: g, t })?;
            let u = p.col(&VarKey::Commit { sg: g, t })?;
            if t == 0 {
                let u0 = sg.u0 as f64;
                p.add_row(
                    format!("start_{g}_{t}"),
                    vec![(cst, 1.0), (u, -sg.k_st)],
                    RowSense::Ge,
                    -sg.k_st * u0,
                )?;
                p.add_row(
                    format!("shut_{g}_{t}"),
                    vec![(csh, 1.0), (u, sg.k_sh)],
                    RowSense::Ge,
                    sg.k_sh * u0,
                )?;
            } else {
                let up = p.col(&VarKey::Commit { sg: g, t: t - 1 })?;
                p.add_row(
                    format!("start_{g}_{t}"),
                    vec![(cst, 1.0), (u, -sg.k_st), (up, sg.k_st)],
                    RowSense::Ge,
                    0.0,
                )?;
                p.add_row(
                    format!("shut_{g}_{t}"),
                    vec![(csh, 1.0), (u, sg.k_sh), (up, -sg.k_sh)],
                    RowSense::Ge,
                    0.0,
                )?;
            }
        }
    }

    // Supply-demand balance with the post-DR demand substituted in.
    for t in 0..horizon {
        let mut coeffs = Vec::new();
        for g in 0..grid.num_sgs() {
            coeffs.push((p.col(&VarKey::SgPower { sg: g, t })?, 1.0));
        }
        for c in 0..grid.num_ibrs() {
            coeffs.push((p.col(&VarKey::IbrPower { ibr: c, t })?, 1.0));
        }
        if let Some(spec) = spec {
            for n in 0..spec.num_classes() {
                coeffs.push((p.col(&VarKey::Curtail { class: n, t })?, 1.0));
            }
            coeffs.push((p.col(&VarKey::ShiftOut { t })?, 1.0));
            coeffs.push((p.col(&VarKey::ShiftIn { t })?, -1.0));
        }
        p.add_row(format!("bal_{t}"), coeffs, RowSense::Eq, inputs.demand[t])?;
    }

    // Consumer payment. The baseline energy cost is a constant; DR shifts
    // it through the response variables.
    let baseline_payment: f64 = inputs
        .lambda
        .iter()
        .zip(&inputs.demand)
        .map(|(l, d)| l * d)
        .sum();
    p.objective_offset += baseline_payment;
    if let Some(spec) = spec {
        for t in 0..horizon {
            let l = inputs.lambda[t];
            for (n, class) in spec.il_classes.iter().enumerate() {
                let c = p.col(&VarKey::Curtail { class: n, t })?;
                p.add_to_objective(c, -l - class.compensation);
            }
            let pin = p.col(&VarKey::ShiftIn { t })?;
            p.add_to_objective(pin, l - spec.c_sl_in);
            let pout = p.col(&VarKey::ShiftOut { t })?;
            p.add_to_objective(pout, -l - spec.c_sl_out);
        }
    }
    Ok(p)
}

/// Add the per-bus, per-period SCC threshold rows plus the McCormick system
/// defining the pair-activation variables.
pub fn add_scc_constraints(
    p: &mut MilpProblem,
    grid: &GridModel,
    s: &SccSurrogate,
    inputs: &TimeSeriesInputs,
    threshold: f64,
    relax_eta: bool,
) -> Result<(), UcError> {
    if !s.matches_grid(grid) {
        return Err(UcError::SurrogateMismatch);
    }
    let horizon = inputs.horizon();
    for (m, &(i, j)) in s.pairs.iter().enumerate() {
        for t in 0..horizon {
            let eta = p.add_variable(VarKey::Eta { pair: m, t }, 0.0, 1.0, 0.0, !relax_eta)?;
            let ui = p.col(&VarKey::Commit { sg: i, t })?;
            let uj = p.col(&VarKey::Commit { sg: j, t })?;
            p.add_row(
                format!("mcc_a_{m}_{t}"),
                vec![(eta, 1.0), (ui, -1.0)],
                RowSense::Le,
                0.0,
            )?;
            p.add_row(
                format!("mcc_b_{m}_{t}"),
                vec![(eta, 1.0), (uj, -1.0)],
                RowSense::Le,
                0.0,
            )?;
            p.add_row(
                format!("mcc_c_{m}_{t}"),
                vec![(eta, 1.0), (ui, -1.0), (uj, -1.0)],
                RowSense::Ge,
                -1.0,
            )?;
        }
    }
    for (b, &bus) in s.bus_ids.iter().enumerate() {
        for t in 0..horizon {
            let mut coeffs = Vec::new();
            for (g, &k) in s.k_g[b].iter().enumerate() {
                coeffs.push((p.col(&VarKey::Commit { sg: g, t })?, k));
            }
            for (m, &k) in s.k_m[b].iter().enumerate() {
                coeffs.push((p.col(&VarKey::Eta { pair: m, t })?, k));
            }
            // IBR availability is exogenous: fold it into the RHS, along
            // with the conservative shift when the surrogate carries one.
            let mut rhs = threshold;
            for (c, &k) in s.k_c[b].iter().enumerate() {
                rhs -= k * inputs.alpha[c][t];
            }
            if s.shift_enabled {
                rhs += s.conservative_shift[b];
            }
            p.add_row(format!("scc_{bus}_{t}"), coeffs, RowSense::Ge, rhs)?;
        }
    }
    Ok(())
}

/// Typed solution with independently recomputed cost components.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UcSolution {
    /// Commitment per SG per period, `u[g][t]`.
    pub u: Vec<Vec<u8>>,
    /// SG dispatch, MW.
    pub p_sg: Vec<Vec<f64>>,
    /// IBR dispatch, MW.
    pub p_ibr: Vec<Vec<f64>>,
    pub start_cost: Vec<Vec<f64>>,
    pub shut_cost: Vec<Vec<f64>>,
    /// Pair activations, `eta[m][t]`; empty when SCC constraints are off.
    pub eta: Vec<Vec<f64>>,
    pub dr: DrDecisions,
    pub dr_enabled: bool,
    pub objective: f64,
    pub operation_cost: f64,
    pub consumer_payment: f64,
}

impl UcSolution {
    pub fn horizon(&self) -> usize {
        self.u.first().map_or(0, Vec::len)
    }
}

/// Populate a typed solution from the raw primal vector and cross-check the
/// recomputed cost against the solver objective.
pub fn extract_solution(
    grid: &GridModel,
    inputs: &TimeSeriesInputs,
    dr_spec: Option<&DrSpec>,
    p: &MilpProblem,
    x: &[f64],
    objective: f64,
) -> Result<UcSolution, UcError> {
    let horizon = inputs.horizon();
    let ng = grid.num_sgs();
    let nc = grid.num_ibrs();
    let grab = |key: VarKey| -> Result<f64, UcError> { Ok(x[p.col(&key)?]) };

    let mut u = vec![vec![0u8; horizon]; ng];
    let mut p_sg = vec![vec![0.0; horizon]; ng];
    let mut start_cost = vec![vec![0.0; horizon]; ng];
    let mut shut_cost = vec![vec![0.0; horizon]; ng];
    for g in 0..ng {
        for t in 0..horizon {
            u[g][t] = grab(VarKey::Commit { sg: g, t })?.round() as u8;
            p_sg[g][t] = grab(VarKey::SgPower { sg: g, t })?;
            start_cost[g][t] = grab(VarKey::StartCost { sg: g, t })?;
            shut_cost[g][t] = grab(VarKey::ShutCost { sg: g, t })?;
        }
    }
    let mut p_ibr = vec![vec![0.0; horizon]; nc];
    for c in 0..nc {
        for t in 0..horizon {
            p_ibr[c][t] = grab(VarKey::IbrPower { ibr: c, t })?;
        }
    }
    let mut eta = Vec::new();
    if p.try_col(&VarKey::Eta { pair: 0, t: 0 }).is_some() {
        for (m, _) in grid.sg_pairs().iter().enumerate() {
            let mut row = Vec::with_capacity(horizon);
            for t in 0..horizon {
                row.push(grab(VarKey::Eta { pair: m, t })?);
            }
            eta.push(row);
        }
    }

    let dr_enabled = p.try_col(&VarKey::ShiftIn { t: 0 }).is_some();
    let num_classes = dr_spec.map_or(0, DrSpec::num_classes);
    let mut drd = DrDecisions::zero(num_classes, horizon);
    if dr_enabled {
        for n in 0..num_classes {
            for t in 0..horizon {
                drd.curtail[n][t] = grab(VarKey::Curtail { class: n, t })?;
            }
        }
        for t in 0..horizon {
            drd.shift_in[t] = grab(VarKey::ShiftIn { t })?;
            drd.shift_out[t] = grab(VarKey::ShiftOut { t })?;
            drd.z_in[t] = grab(VarKey::ShiftInFlag { t })?.round() as u8;
            drd.z_out[t] = grab(VarKey::ShiftOutFlag { t })?.round() as u8;
        }
    }

    let mut operation_cost = 0.0;
    for (g, sg) in grid.generators.iter().enumerate() {
        for t in 0..horizon {
            operation_cost += sg.c_nl * u[g][t] as f64
                + sg.c_m * p_sg[g][t]
                + start_cost[g][t]
                + shut_cost[g][t];
        }
    }
    let payment = if dr_enabled {
        let spec = dr_spec.ok_or(UcError::MissingDrSpec)?;
        dr::consumer_payment(&inputs.demand, &drd, spec, &inputs.lambda)?.1
    } else {
        inputs
            .lambda
            .iter()
            .zip(&inputs.demand)
            .map(|(l, d)| l * d)
            .sum()
    };
    let recomputed = operation_cost + payment;
    if (recomputed - objective).abs() > 1e-6 * objective.abs().max(1.0) {
        return Err(UcError::ObjectiveMismatch {
            objective,
            recomputed,
        });
    }

    Ok(UcSolution {
        u,
        p_sg,
        p_ibr,
        start_cost,
        shut_cost,
        eta,
        dr: drd,
        dr_enabled,
        objective,
        operation_cost,
        consumer_payment: payment,
    })
}
