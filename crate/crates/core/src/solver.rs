//! Exact MILP solving at desk scale: LP relaxations through the built-in
//! simplex, then best-bound branch-and-bound with plunging dives so that
//! consecutive nodes reuse the live factorization.

use std::collections::BinaryHeap;
use std::time::Instant;

use thiserror::Error;

use crate::milp::MilpProblem;
use crate::simplex::{self, Basis, LpCore, LpOptions, LpStatus, Workspace};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("integer variable {0} must have finite bounds")]
    UnboundedInteger(String),
    #[error("invalid option: {0}")]
    BadOption(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchRule {
    /// Most fractional binary, ties broken by lowest column index.
    MostFractional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSelection {
    /// Lowest parent bound first, with a down-first dive after branching.
    BestBound,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub rel_gap: f64,
    pub feas_tol: f64,
    pub int_tol: f64,
    pub node_limit: usize,
    /// Seconds; `None` means no limit.
    pub time_limit: Option<f64>,
    pub branching: BranchRule,
    pub node_selection: NodeSelection,
    /// Serial, reproducible search order. The solver is always serial in
    /// this implementation; the flag additionally pins the log contents.
    pub deterministic: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_gap: 1e-6,
            feas_tol: 1e-7,
            int_tol: 1e-6,
            node_limit: 1_000_000,
            time_limit: None,
            branching: BranchRule::MostFractional,
            node_selection: NodeSelection::BestBound,
            deterministic: true,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.rel_gap > 0.0 && self.feas_tol > 0.0 && self.int_tol > 0.0) {
            return Err(SolveError::BadOption("tolerances must be positive".into()));
        }
        if self.node_limit < 1 {
            return Err(SolveError::BadOption("node limit must be >= 1".into()));
        }
        Ok(())
    }

    fn lp_options(&self) -> LpOptions {
        LpOptions {
            feas_tol: self.feas_tol,
            ..LpOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    GapLimit,
    Infeasible,
    Unbounded,
    Limit,
}

#[derive(Debug, Clone)]
pub struct NodeLogEntry {
    pub node: usize,
    pub incumbent: Option<f64>,
    pub bound: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Structural primal vector; empty when no feasible point was found.
    pub x: Vec<f64>,
    pub objective: f64,
    pub best_bound: f64,
    pub node_count: usize,
    pub wall_time: f64,
    pub log: Vec<NodeLogEntry>,
}

impl SolveResult {
    pub fn render_log(&self) -> String {
        let mut out = String::from("node incumbent bound gap\n");
        for e in &self.log {
            let inc = e
                .incumbent
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!("{} {} {:.6} {:.3e}\n", e.node, inc, e.bound, e.gap));
        }
        out
    }
}

fn rel_gap(incumbent: f64, bound: f64) -> f64 {
    (incumbent - bound) / incumbent.abs().max(1.0)
}

/// Solve the LP relaxation (integrality ignored).
pub fn solve_lp(p: &MilpProblem, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    opts.validate()?;
    let start = Instant::now();
    let core = LpCore::from_problem(p);
    let lower: Vec<f64> = p.cols().iter().map(|c| c.lower).collect();
    let upper: Vec<f64> = p.cols().iter().map(|c| c.upper).collect();
    let (lo, hi) = core.scaled_bounds(&lower, &upper);
    let mut ws = Workspace::new();
    let r = simplex::solve_lp(&core, &lo, &hi, None, &opts.lp_options(), &mut ws);
    let objective = r.objective + p.objective_offset;
    let status = match r.status {
        LpStatus::Optimal => SolveStatus::Optimal,
        LpStatus::Infeasible => SolveStatus::Infeasible,
        LpStatus::Unbounded => SolveStatus::Unbounded,
        LpStatus::IterLimit => SolveStatus::Limit,
    };
    Ok(SolveResult {
        status,
        x: if status == SolveStatus::Optimal { r.x } else { Vec::new() },
        objective,
        best_bound: objective,
        node_count: 1,
        wall_time: start.elapsed().as_secs_f64(),
        log: vec![NodeLogEntry {
            node: 1,
            incumbent: (status == SolveStatus::Optimal).then_some(objective),
            bound: objective,
            gap: 0.0,
        }],
    })
}

struct Node {
    bound: f64,
    id: usize,
    /// (column, lower, upper) tightenings accumulated from the root.
    fixes: Vec<(usize, f64, f64)>,
    basis: Option<Basis>,
}

// Min-heap ordering on (bound, id).
struct HeapEntry(Node);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0.bound == other.0.bound && self.0.id == other.0.id
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reverse for a min-heap.
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then(other.0.id.cmp(&self.0.id))
    }
}

/// Branch-and-bound over LP relaxations.
pub fn solve_milp(p: &MilpProblem, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    opts.validate()?;
    for c in p.cols() {
        if c.integer && !(c.lower.is_finite() && c.upper.is_finite()) {
            return Err(SolveError::UnboundedInteger(c.key.to_string()));
        }
    }
    let start = Instant::now();
    let core = LpCore::from_problem(p);
    let base_lower: Vec<f64> = p.cols().iter().map(|c| c.lower).collect();
    let base_upper: Vec<f64> = p.cols().iter().map(|c| c.upper).collect();
    let int_cols: Vec<usize> = p
        .cols()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.integer)
        .map(|(i, _)| i)
        .collect();
    let lp_opts = opts.lp_options();
    let mut ws = Workspace::new();

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut log = Vec::new();
    let mut node_count = 0usize;
    let mut next_id = 0usize;
    let mut status: Option<SolveStatus> = None;
    next_id += 1;
    let mut dive: Option<Node> = Some(Node {
        bound: -f64::INFINITY,
        id: next_id,
        fixes: Vec::new(),
        basis: None,
    });

    let prune_tol = |inc: f64| opts.rel_gap * inc.abs().max(1.0);

    loop {
        let node = match dive.take() {
            Some(n) => n,
            None => match heap.pop() {
                Some(HeapEntry(n)) => n,
                None => break,
            },
        };
        // Bound-based pruning against the incumbent.
        if let Some((inc, _)) = &incumbent {
            if node.bound >= inc - prune_tol(*inc) {
                continue;
            }
        }
        if node_count >= opts.node_limit {
            status = Some(SolveStatus::Limit);
            break;
        }
        if let Some(tl) = opts.time_limit {
            if start.elapsed().as_secs_f64() > tl {
                status = Some(SolveStatus::Limit);
                break;
            }
        }

        let mut lower = base_lower.clone();
        let mut upper = base_upper.clone();
        for &(c, lo, hi) in &node.fixes {
            lower[c] = lo;
            upper[c] = hi;
        }
        let (lo, hi) = core.scaled_bounds(&lower, &upper);
        let r = simplex::solve_lp(&core, &lo, &hi, node.basis.as_ref(), &lp_opts, &mut ws);
        node_count += 1;

        let global_bound = open_bound(&heap, &incumbent, node.bound);
        match r.status {
            LpStatus::Infeasible => {
                log_node(&mut log, node_count, &incumbent, global_bound);
                continue;
            }
            LpStatus::Unbounded => {
                status = Some(SolveStatus::Unbounded);
                break;
            }
            LpStatus::IterLimit => {
                status = Some(SolveStatus::Limit);
                break;
            }
            LpStatus::Optimal => {}
        }
        let obj = r.objective + p.objective_offset;
        if let Some((inc, _)) = &incumbent {
            if obj >= inc - prune_tol(*inc) {
                log_node(&mut log, node_count, &incumbent, global_bound);
                continue;
            }
        }

        // Branching variable: most fractional integer column.
        let mut branch: Option<(usize, f64, f64)> = None; // (col, value, score)
        for &c in &int_cols {
            let v = r.x[c];
            let frac = (v - v.round()).abs();
            if frac > opts.int_tol {
                let score = frac.min(1.0 - frac);
                match branch {
                    Some((_, _, best)) if score <= best => {}
                    _ => branch = Some((c, v, score)),
                }
            }
        }

        match branch {
            None => {
                // Integer feasible.
                incumbent = Some((obj, r.x.clone()));
                log_node(&mut log, node_count, &incumbent, global_bound);
            }
            Some((c, v, _)) => {
                log_node(&mut log, node_count, &incumbent, global_bound);
                let down = Node {
                    bound: obj,
                    id: {
                        next_id += 1;
                        next_id
                    },
                    fixes: {
                        let mut f = node.fixes.clone();
                        f.push((c, lower[c], v.floor()));
                        f
                    },
                    basis: Some(r.basis.clone()),
                };
                let up = Node {
                    bound: obj,
                    id: {
                        next_id += 1;
                        next_id
                    },
                    fixes: {
                        let mut f = node.fixes;
                        f.push((c, v.ceil(), upper[c]));
                        f
                    },
                    basis: Some(r.basis),
                };
                // Plunge toward the rounding of the fractional value (the
                // child more likely to stay feasible); the factorization
                // stays warm along the dive. Exact halves dive down.
                if v - v.floor() > 0.5 {
                    heap.push(HeapEntry(down));
                    dive = Some(up);
                } else {
                    heap.push(HeapEntry(up));
                    dive = Some(down);
                }
            }
        }

        // Early stop once the gap contract is met.
        if let Some((inc, _)) = &incumbent {
            let open = open_bound_after(&heap, &dive, *inc);
            let gap = rel_gap(*inc, open);
            if gap <= opts.rel_gap && (dive.is_some() || !heap.is_empty()) {
                // A vanishing proven gap is plain optimality; a merely
                // tolerable one is a gap-limit stop.
                status = Some(if gap <= 1e-12 {
                    SolveStatus::Optimal
                } else {
                    SolveStatus::GapLimit
                });
                break;
            }
        }
    }

    let wall_time = start.elapsed().as_secs_f64();
    let open = open_bound_after(&heap, &dive, incumbent.as_ref().map(|(o, _)| *o).unwrap_or(f64::INFINITY));
    match incumbent {
        Some((obj, x)) => {
            let status = status.unwrap_or(SolveStatus::Optimal);
            let best_bound = if status == SolveStatus::Optimal { obj } else { open.min(obj) };
            Ok(SolveResult {
                status,
                x,
                objective: obj,
                best_bound,
                node_count,
                wall_time,
                log,
            })
        }
        None => {
            let status = status.unwrap_or(SolveStatus::Infeasible);
            Ok(SolveResult {
                status,
                x: Vec::new(),
                objective: f64::INFINITY,
                best_bound: if status == SolveStatus::Infeasible {
                    f64::INFINITY
                } else {
                    open
                },
                node_count,
                wall_time,
                log,
            })
        }
    }
}

fn open_bound(
    heap: &BinaryHeap<HeapEntry>,
    incumbent: &Option<(f64, Vec<f64>)>,
    current: f64,
) -> f64 {
    let mut b = current;
    if let Some(HeapEntry(n)) = heap.peek() {
        b = b.min(n.bound);
    }
    if let Some((inc, _)) = incumbent {
        b = b.min(*inc);
    }
    b
}

fn open_bound_after(heap: &BinaryHeap<HeapEntry>, dive: &Option<Node>, incumbent: f64) -> f64 {
    let mut b = incumbent;
    if let Some(HeapEntry(n)) = heap.peek() {
        b = b.min(n.bound);
    }
    if let Some(n) = dive {
        b = b.min(n.bound);
    }
    b
}

fn log_node(
    log: &mut Vec<NodeLogEntry>,
    node: usize,
    incumbent: &Option<(f64, Vec<f64>)>,
    bound: f64,
) {
    let inc = incumbent.as_ref().map(|(o, _)| *o);
    let gap = match inc {
        Some(i) if bound.is_finite() => rel_gap(i, bound.min(i)),
        _ => f64::INFINITY,
    };
    log.push(NodeLogEntry {
        node,
        incumbent: inc,
        bound,
        gap,
    });
}
