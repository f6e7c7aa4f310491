//! Incentive-based demand response: interruptible-load (IL) curtailment
//! classes and a shiftable-load (SL) block, plus the post-DR demand and
//! consumer-payment arithmetic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{MilpError, MilpProblem, RowSense, VarKey};

#[derive(Debug, Error)]
pub enum DrError {
    #[error("horizon must be at least one period")]
    EmptyHorizon,
    #[error("baseline demand at period {0} must be positive")]
    NonpositiveBaseline(usize),
    #[error("invalid DR spec: {0}")]
    BadSpec(String),
    #[error("decision vectors do not match the horizon")]
    LengthMismatch,
    #[error(transparent)]
    Milp(#[from] MilpError),
}

/// One interruptible-load class: its curtailment ratio and compensation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IlClass {
    /// Fraction of baseline demand this class may curtail in one period.
    pub beta1: f64,
    /// Compensation, currency/MWh.
    pub compensation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrSpec {
    pub il_classes: Vec<IlClass>,
    /// Cap on curtailment summed over two consecutive periods, as a
    /// fraction of the current period's baseline.
    pub beta2: f64,
    /// Shift-in bound as a fraction of baseline.
    pub beta3: f64,
    /// Shift-out bound as a fraction of baseline.
    pub beta4: f64,
    /// Shift-in compensation, currency/MWh.
    pub c_sl_in: f64,
    /// Shift-out compensation, currency/MWh.
    pub c_sl_out: f64,
}

impl DrSpec {
    pub fn validate(&self) -> Result<(), DrError> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        for (n, c) in self.il_classes.iter().enumerate() {
            if !unit(c.beta1) {
                return Err(DrError::BadSpec(format!("class {n}: beta1 outside [0, 1]")));
            }
            if c.compensation < 0.0 {
                return Err(DrError::BadSpec(format!("class {n}: negative compensation")));
            }
        }
        for (name, v) in [("beta2", self.beta2), ("beta3", self.beta3), ("beta4", self.beta4)] {
            if !unit(v) {
                return Err(DrError::BadSpec(format!("{name} outside [0, 1]")));
            }
        }
        if self.c_sl_in < 0.0 || self.c_sl_out < 0.0 {
            return Err(DrError::BadSpec("negative SL compensation".into()));
        }
        let drain: f64 = self.il_classes.iter().map(|c| c.beta1).sum::<f64>() + self.beta4;
        if drain >= 1.0 {
            return Err(DrError::BadSpec(format!(
                "sum of beta1 plus beta4 is {drain}, post-DR demand could hit zero"
            )));
        }
        Ok(())
    }

    pub fn num_classes(&self) -> usize {
        self.il_classes.len()
    }
}

/// Extracted DR decision variables of a solved horizon.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DrDecisions {
    /// Curtailment per class per period, `curtail[n][t]`, MWh.
    pub curtail: Vec<Vec<f64>>,
    pub shift_in: Vec<f64>,
    pub shift_out: Vec<f64>,
    pub z_in: Vec<u8>,
    pub z_out: Vec<u8>,
}

impl DrDecisions {
    /// All-zero response (feasible by construction).
    pub fn zero(num_classes: usize, horizon: usize) -> Self {
        DrDecisions {
            curtail: vec![vec![0.0; horizon]; num_classes],
            shift_in: vec![0.0; horizon],
            shift_out: vec![0.0; horizon],
            z_in: vec![0; horizon],
            z_out: vec![0; horizon],
        }
    }

    pub fn horizon(&self) -> usize {
        self.shift_in.len()
    }

    fn check(&self, baseline: &[f64]) -> Result<(), DrError> {
        let t = baseline.len();
        if self.shift_in.len() != t
            || self.shift_out.len() != t
            || self.curtail.iter().any(|c| c.len() != t)
        {
            return Err(DrError::LengthMismatch);
        }
        Ok(())
    }
}

/// Add the IL and SL variables and constraints for the whole horizon.
pub fn build_dr_block(
    p: &mut MilpProblem,
    spec: &DrSpec,
    baseline: &[f64],
) -> Result<(), DrError> {
    spec.validate()?;
    if baseline.is_empty() {
        return Err(DrError::EmptyHorizon);
    }
    for (t, &d) in baseline.iter().enumerate() {
        if d <= 0.0 {
            return Err(DrError::NonpositiveBaseline(t));
        }
    }
    let horizon = baseline.len();

    for (n, class) in spec.il_classes.iter().enumerate() {
        for t in 0..horizon {
            p.add_variable(
                VarKey::Curtail { class: n, t },
                0.0,
                class.beta1 * baseline[t],
                0.0,
                false,
            )?;
        }
    }
    for t in 0..horizon {
        p.add_variable(VarKey::ShiftIn { t }, 0.0, spec.beta3 * baseline[t], 0.0, false)?;
        p.add_variable(VarKey::ShiftOut { t }, 0.0, spec.beta4 * baseline[t], 0.0, false)?;
        p.add_variable(VarKey::ShiftInFlag { t }, 0.0, 1.0, 0.0, true)?;
        p.add_variable(VarKey::ShiftOutFlag { t }, 0.0, 1.0, 0.0, true)?;
    }

    // Two-consecutive-period curtailment cap; the pre-horizon curtailment
    // is taken as zero, so the first row has a single term.
    for n in 0..spec.num_classes() {
        for t in 0..horizon {
            let mut coeffs = vec![(p.col(&VarKey::Curtail { class: n, t })?, 1.0)];
            if t > 0 {
                coeffs.push((p.col(&VarKey::Curtail { class: n, t: t - 1 })?, 1.0));
            }
            p.add_row(
                format!("il_window_{n}_{t}"),
                coeffs,
                RowSense::Le,
                spec.beta2 * baseline[t],
            )?;
        }
    }

    for t in 0..horizon {
        let zin = p.col(&VarKey::ShiftInFlag { t })?;
        let zout = p.col(&VarKey::ShiftOutFlag { t })?;
        let pin = p.col(&VarKey::ShiftIn { t })?;
        let pout = p.col(&VarKey::ShiftOut { t })?;
        p.add_row(
            format!("sl_excl_{t}"),
            vec![(zin, 1.0), (zout, 1.0)],
            RowSense::Le,
            1.0,
        )?;
        p.add_row(
            format!("sl_in_cap_{t}"),
            vec![(pin, 1.0), (zin, -spec.beta3 * baseline[t])],
            RowSense::Le,
            0.0,
        )?;
        p.add_row(
            format!("sl_out_cap_{t}"),
            vec![(pout, 1.0), (zout, -spec.beta4 * baseline[t])],
            RowSense::Le,
            0.0,
        )?;
    }

    let mut conserve = Vec::with_capacity(2 * horizon);
    for t in 0..horizon {
        conserve.push((p.col(&VarKey::ShiftIn { t })?, 1.0));
        conserve.push((p.col(&VarKey::ShiftOut { t })?, -1.0));
    }
    p.add_row("sl_conserve", conserve, RowSense::Eq, 0.0)?;
    Ok(())
}

/// Per-period demand after the DR response is applied.
pub fn effective_demand(baseline: &[f64], d: &DrDecisions) -> Result<Vec<f64>, DrError> {
    d.check(baseline)?;
    Ok(baseline
        .iter()
        .enumerate()
        .map(|(t, &pd)| {
            let curt: f64 = d.curtail.iter().map(|c| c[t]).sum();
            pd - d.shift_out[t] + d.shift_in[t] - curt
        })
        .collect())
}

/// Consumer payment: energy cost of the post-DR demand minus the
/// compensation for curtailed and shifted energy.
pub fn consumer_payment(
    baseline: &[f64],
    d: &DrDecisions,
    spec: &DrSpec,
    lambda: &[f64],
) -> Result<(Vec<f64>, f64), DrError> {
    d.check(baseline)?;
    if lambda.len() != baseline.len() {
        return Err(DrError::LengthMismatch);
    }
    let post = effective_demand(baseline, d)?;
    let per_period: Vec<f64> = (0..baseline.len())
        .map(|t| {
            let comp_il: f64 = spec
                .il_classes
                .iter()
                .zip(&d.curtail)
                .map(|(c, curt)| c.compensation * curt[t])
                .sum();
            lambda[t] * post[t]
                - comp_il
                - spec.c_sl_in * d.shift_in[t]
                - spec.c_sl_out * d.shift_out[t]
        })
        .collect();
    let total = per_period.iter().sum();
    Ok((per_period, total))
}
