//! Grid data model, nodal admittance assembly and the three-phase
//! bolted-fault current oracle.
//!
//! The oracle is the ground truth that the linear SCC surrogate is trained
//! against: synchronous machines contribute as a 1.0 p.u. pre-fault voltage
//! behind their subtransient reactance, inverter-based resources as
//! saturated current sources scaled by the impedance transfer ratio to the
//! faulted bus.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type BusId = usize;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("cannot read grid file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("grid file parse error: {0}")]
    Parse(String),
    #[error("schema violation in field `{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("branch graph is disconnected (bus {0} unreachable from bus {1})")]
    Disconnected(BusId, BusId),
    #[error("unknown bus id {0}")]
    UnknownBus(BusId),
    #[error("degenerate network: admittance assembly has an all-zero row at bus {0}")]
    DegenerateNetwork(BusId),
    #[error("commitment vector has length {got}, expected {expected}")]
    CommitmentLength { got: usize, expected: usize },
    #[error("availability vector has length {got}, expected {expected}")]
    AlphaLength { got: usize, expected: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub from: BusId,
    pub to: BusId,
    /// Series resistance, p.u. on the system base.
    pub r: f64,
    /// Series reactance, p.u. on the system base.
    pub x: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncGenerator {
    pub bus: BusId,
    pub p_min: f64,
    pub p_max: f64,
    /// No-load cost, currency/h.
    pub c_nl: f64,
    /// Marginal cost, currency/MWh.
    pub c_m: f64,
    /// Start-up cost, currency/h.
    pub k_st: f64,
    /// Shut-down cost, currency/h.
    pub k_sh: f64,
    /// Commitment state before the first period.
    pub u0: u8,
    /// Subtransient reactance, p.u. on the system base.
    pub x_subtransient: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ibr {
    pub bus: BusId,
    pub p_max: f64,
    /// Ratio of fault current to rated current.
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Rated current, p.u. on the system base.
    pub rated_current: f64,
}

fn default_kappa() -> f64 {
    1.2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridModel {
    pub base_mva: f64,
    /// Minimum admissible fault current at any bus, p.u.
    pub scc_threshold: f64,
    pub buses: Vec<BusId>,
    pub branches: Vec<Branch>,
    pub generators: Vec<SyncGenerator>,
    pub ibrs: Vec<Ibr>,
}

impl GridModel {
    pub fn num_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn num_sgs(&self) -> usize {
        self.generators.len()
    }

    pub fn num_ibrs(&self) -> usize {
        self.ibrs.len()
    }

    /// Dense index of a bus id.
    pub fn bus_index(&self, bus: BusId) -> Result<usize, GridError> {
        self.buses
            .iter()
            .position(|&b| b == bus)
            .ok_or(GridError::UnknownBus(bus))
    }

    /// Unordered SG pairs in deterministic (i, j) order with i < j.
    pub fn sg_pairs(&self) -> Vec<(usize, usize)> {
        let g = self.num_sgs();
        let mut pairs = Vec::with_capacity(g * (g - 1) / 2);
        for i in 0..g {
            for j in (i + 1)..g {
                pairs.push((i, j));
            }
        }
        pairs
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.base_mva <= 0.0 {
            return Err(GridError::Schema {
                field: "base_mva".into(),
                reason: "must be positive".into(),
            });
        }
        if !(self.scc_threshold > 0.0) {
            return Err(GridError::Schema {
                field: "scc_threshold".into(),
                reason: "must be positive".into(),
            });
        }
        if self.buses.is_empty() {
            return Err(GridError::Schema {
                field: "buses".into(),
                reason: "at least one bus required".into(),
            });
        }
        let mut seen = HashMap::new();
        for (i, &b) in self.buses.iter().enumerate() {
            if seen.insert(b, i).is_some() {
                return Err(GridError::Schema {
                    field: "buses".into(),
                    reason: format!("duplicate bus id {b}"),
                });
            }
        }
        for (i, br) in self.branches.iter().enumerate() {
            for (end, bus) in [("from", br.from), ("to", br.to)] {
                if !seen.contains_key(&bus) {
                    return Err(GridError::Schema {
                        field: format!("branches[{i}].{end}"),
                        reason: format!("references nonexistent bus {bus}"),
                    });
                }
            }
            if br.from == br.to {
                return Err(GridError::Schema {
                    field: format!("branches[{i}]"),
                    reason: "self-loop branch".into(),
                });
            }
            if (br.r * br.r + br.x * br.x).sqrt() == 0.0 {
                return Err(GridError::Schema {
                    field: format!("branches[{i}]"),
                    reason: "zero series impedance".into(),
                });
            }
        }
        for (i, g) in self.generators.iter().enumerate() {
            if !seen.contains_key(&g.bus) {
                return Err(GridError::Schema {
                    field: format!("generators[{i}].bus"),
                    reason: format!("references nonexistent bus {}", g.bus),
                });
            }
            if !(g.p_min > 0.0 && g.p_min <= g.p_max) {
                return Err(GridError::Schema {
                    field: format!("generators[{i}].p_min"),
                    reason: "requires 0 < p_min <= p_max".into(),
                });
            }
            if g.c_nl < 0.0 || g.c_m < 0.0 || g.k_st < 0.0 || g.k_sh < 0.0 {
                return Err(GridError::Schema {
                    field: format!("generators[{i}]"),
                    reason: "cost coefficients must be nonnegative".into(),
                });
            }
            if g.u0 > 1 {
                return Err(GridError::Schema {
                    field: format!("generators[{i}].u0"),
                    reason: "must be 0 or 1".into(),
                });
            }
            if !(g.x_subtransient > 0.0) {
                return Err(GridError::Schema {
                    field: format!("generators[{i}].x_subtransient"),
                    reason: "must be positive".into(),
                });
            }
        }
        for (i, c) in self.ibrs.iter().enumerate() {
            if !seen.contains_key(&c.bus) {
                return Err(GridError::Schema {
                    field: format!("ibrs[{i}].bus"),
                    reason: format!("references nonexistent bus {}", c.bus),
                });
            }
            if c.p_max < 0.0 {
                return Err(GridError::Schema {
                    field: format!("ibrs[{i}].p_max"),
                    reason: "must be nonnegative".into(),
                });
            }
            if !(1.0..=2.0).contains(&c.kappa) {
                return Err(GridError::Schema {
                    field: format!("ibrs[{i}].kappa"),
                    reason: "must lie in [1.0, 2.0]".into(),
                });
            }
            if c.rated_current < 0.0 {
                return Err(GridError::Schema {
                    field: format!("ibrs[{i}].rated_current"),
                    reason: "must be nonnegative".into(),
                });
            }
        }
        self.check_connected()?;
        Ok(())
    }

    fn check_connected(&self) -> Result<(), GridError> {
        let n = self.buses.len();
        if n <= 1 {
            return Ok(());
        }
        let mut adj = vec![Vec::new(); n];
        for br in &self.branches {
            let f = self.bus_index(br.from)?;
            let t = self.bus_index(br.to)?;
            adj[f].push(t);
            adj[t].push(f);
        }
        let mut visited = vec![false; n];
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    stack.push(w);
                }
            }
        }
        if let Some(i) = visited.iter().position(|&v| !v) {
            return Err(GridError::Disconnected(self.buses[i], self.buses[0]));
        }
        Ok(())
    }
}

/// Load and validate a grid model from its TOML description.
pub fn load_grid(path: &Path) -> Result<GridModel, GridError> {
    let text = std::fs::read_to_string(path).map_err(|source| GridError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let grid: GridModel = toml::from_str(&text).map_err(|e| GridError::Parse(e.to_string()))?;
    grid.validate()?;
    Ok(grid)
}

/// Nodal admittance matrix for a fault study: branch admittances plus, for
/// every committed SG, the shunt 1/(j x'') at its bus.
pub fn build_fault_admittance(
    grid: &GridModel,
    commitment: &[u8],
) -> Result<DMatrix<Complex64>, GridError> {
    if commitment.len() != grid.num_sgs() {
        return Err(GridError::CommitmentLength {
            got: commitment.len(),
            expected: grid.num_sgs(),
        });
    }
    let n = grid.num_buses();
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for br in &grid.branches {
        let f = grid.bus_index(br.from)?;
        let t = grid.bus_index(br.to)?;
        let yb = Complex64::new(1.0, 0.0) / Complex64::new(br.r, br.x);
        y[(f, f)] += yb;
        y[(t, t)] += yb;
        y[(f, t)] -= yb;
        y[(t, f)] -= yb;
    }
    for (g, &u) in grid.generators.iter().zip(commitment) {
        if u != 0 {
            let b = grid.bus_index(g.bus)?;
            y[(b, b)] += Complex64::new(1.0, 0.0) / Complex64::new(0.0, g.x_subtransient);
        }
    }
    for (i, &bus) in grid.buses.iter().enumerate() {
        if y.row(i).iter().all(|v| v.norm() == 0.0) {
            return Err(GridError::DegenerateNetwork(bus));
        }
    }
    Ok(y)
}

/// Fault current magnitude (p.u.) at `bus` for a bolted three-phase fault.
///
/// With at least one committed SG the network has a finite Thevenin
/// impedance Z = Y^{-1}; the SG contribution is |1/Z_bb| from a 1.0 p.u.
/// pre-fault voltage and each IBR adds its saturated injection scaled by
/// |Z_bc|/|Z_bb|. With no SG committed, every IBR injection must exit
/// through the fault, so the current equals the sum of the injections
/// (the transfer ratio degenerates to one); that path requires the grounded
/// network (fault bus removed) to stay nonsingular, which connectivity
/// guarantees. With no source at all the current is zero.
pub fn scc_oracle(
    grid: &GridModel,
    commitment: &[u8],
    alpha: &[f64],
    bus: BusId,
) -> Result<f64, GridError> {
    if commitment.len() != grid.num_sgs() {
        return Err(GridError::CommitmentLength {
            got: commitment.len(),
            expected: grid.num_sgs(),
        });
    }
    if alpha.len() != grid.num_ibrs() {
        return Err(GridError::AlphaLength {
            got: alpha.len(),
            expected: grid.num_ibrs(),
        });
    }
    let b = grid.bus_index(bus)?;
    let any_sg = commitment.iter().any(|&u| u != 0);
    let ibr_injection = |c: &Ibr, a: f64| c.kappa * a * c.rated_current;

    if !any_sg {
        let total: f64 = grid
            .ibrs
            .iter()
            .zip(alpha)
            .map(|(c, &a)| ibr_injection(c, a))
            .sum();
        if total == 0.0 {
            return Ok(0.0);
        }
        // Ground the faulted bus and check the reduced branch network is
        // nonsingular before claiming all injections reach the fault.
        reduced_nonsingular(grid, b)?;
        return Ok(total);
    }

    let y = build_fault_admittance(grid, commitment)?;
    let z = y
        .lu()
        .try_inverse()
        .ok_or(GridError::DegenerateNetwork(bus))?;
    let zbb = z[(b, b)].norm();
    if zbb == 0.0 {
        return Err(GridError::DegenerateNetwork(bus));
    }
    let mut current = 1.0 / zbb;
    for (c, &a) in grid.ibrs.iter().zip(alpha) {
        let ci = grid.bus_index(c.bus)?;
        current += z[(b, ci)].norm() / zbb * ibr_injection(c, a);
    }
    Ok(current)
}

fn reduced_nonsingular(grid: &GridModel, fault: usize) -> Result<(), GridError> {
    let n = grid.num_buses();
    if n == 1 {
        return Ok(());
    }
    let y = {
        // Branch-only assembly; SG shunts are absent by construction here.
        let mut y = DMatrix::<Complex64>::zeros(n, n);
        for br in &grid.branches {
            let f = grid.bus_index(br.from)?;
            let t = grid.bus_index(br.to)?;
            let yb = Complex64::new(1.0, 0.0) / Complex64::new(br.r, br.x);
            y[(f, f)] += yb;
            y[(t, t)] += yb;
            y[(f, t)] -= yb;
            y[(t, f)] -= yb;
        }
        y
    };
    let keep: Vec<usize> = (0..n).filter(|&i| i != fault).collect();
    let mut red = DMatrix::<Complex64>::zeros(n - 1, n - 1);
    for (ri, &i) in keep.iter().enumerate() {
        for (rj, &j) in keep.iter().enumerate() {
            red[(ri, rj)] = y[(i, j)];
        }
    }
    if red.lu().try_inverse().is_none() {
        return Err(GridError::DegenerateNetwork(grid.buses[fault]));
    }
    Ok(())
}
