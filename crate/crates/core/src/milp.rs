//! Generic mixed-integer linear program container with a typed
//! variable-index registry.
//!
//! The registry maps a domain-level variable key (commitment of SG g at
//! period t, pair activation, DR curtailment, ...) to its column, so that
//! model assembly, MPS export and solution extraction all agree on the
//! meaning of every column.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("duplicate variable key {0}")]
    DuplicateVariable(String),
    #[error("duplicate row name {0}")]
    DuplicateRow(String),
    #[error("row {row}: coefficient references undeclared column {col}")]
    UndeclaredColumn { row: String, col: usize },
    #[error("row {row}: repeated coefficient for column {col}")]
    RepeatedCoefficient { row: String, col: usize },
    #[error("variable {0}: lower bound exceeds upper bound")]
    BoundOrder(String),
    #[error("unknown variable key {0}")]
    UnknownKey(String),
}

/// Domain identity of a column.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKey {
    /// u_{g,t}
    Commit { sg: usize, t: usize },
    /// P_{g,t}
    SgPower { sg: usize, t: usize },
    /// P_{c,t}
    IbrPower { ibr: usize, t: usize },
    /// C^st_{g,t}
    StartCost { sg: usize, t: usize },
    /// C^sh_{g,t}
    ShutCost { sg: usize, t: usize },
    /// Pair activation for SG pair m at period t.
    Eta { pair: usize, t: usize },
    /// Interruptible-load curtailment of class n at period t.
    Curtail { class: usize, t: usize },
    ShiftIn { t: usize },
    ShiftOut { t: usize },
    ShiftInFlag { t: usize },
    ShiftOutFlag { t: usize },
    /// Free-form column (generic LPs, MPS import).
    Named(String),
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKey::Commit { sg, t } => write!(f, "u_{sg}_{t}"),
            VarKey::SgPower { sg, t } => write!(f, "pg_{sg}_{t}"),
            VarKey::IbrPower { ibr, t } => write!(f, "pc_{ibr}_{t}"),
            VarKey::StartCost { sg, t } => write!(f, "cst_{sg}_{t}"),
            VarKey::ShutCost { sg, t } => write!(f, "csh_{sg}_{t}"),
            VarKey::Eta { pair, t } => write!(f, "eta_{pair}_{t}"),
            VarKey::Curtail { class, t } => write!(f, "curt_{class}_{t}"),
            VarKey::ShiftIn { t } => write!(f, "slin_{t}"),
            VarKey::ShiftOut { t } => write!(f, "slout_{t}"),
            VarKey::ShiftInFlag { t } => write!(f, "zin_{t}"),
            VarKey::ShiftOutFlag { t } => write!(f, "zout_{t}"),
            VarKey::Named(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Column {
    pub key: VarKey,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
    pub integer: bool,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct MilpProblem {
    pub name: String,
    cols: Vec<Column>,
    rows: Vec<Row>,
    /// Constant added to the linear objective (e.g. the baseline energy
    /// payment when DR is disabled).
    pub objective_offset: f64,
    index: BTreeMap<VarKey, usize>,
    row_names: BTreeMap<String, usize>,
}

impl MilpProblem {
    pub fn new(name: impl Into<String>) -> Self {
        MilpProblem {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> &[Column] {
        &self.cols
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn add_variable(
        &mut self,
        key: VarKey,
        lower: f64,
        upper: f64,
        objective: f64,
        integer: bool,
    ) -> Result<usize, MilpError> {
        if lower > upper {
            return Err(MilpError::BoundOrder(key.to_string()));
        }
        if self.index.contains_key(&key) {
            return Err(MilpError::DuplicateVariable(key.to_string()));
        }
        let idx = self.cols.len();
        self.index.insert(key.clone(), idx);
        self.cols.push(Column {
            key,
            lower,
            upper,
            objective,
            integer,
        });
        Ok(idx)
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
    ) -> Result<usize, MilpError> {
        let name = name.into();
        if self.row_names.contains_key(&name) {
            return Err(MilpError::DuplicateRow(name));
        }
        let mut seen = Vec::with_capacity(coeffs.len());
        for &(col, _) in &coeffs {
            if col >= self.cols.len() {
                return Err(MilpError::UndeclaredColumn { row: name, col });
            }
            if seen.contains(&col) {
                return Err(MilpError::RepeatedCoefficient { row: name, col });
            }
            seen.push(col);
        }
        let idx = self.rows.len();
        self.row_names.insert(name.clone(), idx);
        self.rows.push(Row {
            name,
            coeffs,
            sense,
            rhs,
        });
        Ok(idx)
    }

    /// Column index of a registered key.
    pub fn col(&self, key: &VarKey) -> Result<usize, MilpError> {
        self.index
            .get(key)
            .copied()
            .ok_or_else(|| MilpError::UnknownKey(key.to_string()))
    }

    pub fn try_col(&self, key: &VarKey) -> Option<usize> {
        self.index.get(&key.clone()).copied()
    }

    pub fn column(&self, idx: usize) -> &Column {
        &self.cols[idx]
    }

    pub fn set_objective(&mut self, idx: usize, coeff: f64) {
        self.cols[idx].objective = coeff;
    }

    pub fn add_to_objective(&mut self, idx: usize, coeff: f64) {
        self.cols[idx].objective += coeff;
    }

    pub fn set_bounds(&mut self, idx: usize, lower: f64, upper: f64) -> Result<(), MilpError> {
        if lower > upper {
            return Err(MilpError::BoundOrder(self.cols[idx].key.to_string()));
        }
        self.cols[idx].lower = lower;
        self.cols[idx].upper = upper;
        Ok(())
    }

    /// Objective value of a primal point, including the constant offset.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset
            + self
                .cols
                .iter()
                .zip(x)
                .map(|(c, &v)| c.objective * v)
                .sum::<f64>()
    }

    /// Largest constraint violation of a primal point.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(c, a)| a * x[c]).sum();
            let v = match row.sense {
                RowSense::Le => lhs - row.rhs,
                RowSense::Ge => row.rhs - lhs,
                RowSense::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (c, &v) in self.cols.iter().zip(x) {
            worst = worst.max(c.lower - v).max(v - c.upper);
        }
        worst
    }
}
