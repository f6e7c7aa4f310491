//! Bounded-variable revised primal simplex.
//!
//! Works on an equilibrated standard form `Ax + s = b` where every variable
//! (structural or slack) carries a lower/upper bound. The basis inverse is
//! held explicitly (column-major, one column per constraint row) and updated
//! by rank-1 product-form pivots; refactorization exploits that basic slack
//! columns are unit vectors, so only the structural kernel is inverted.
//!
//! Phase 1 drives basic bound violations to zero with the composite
//! (infeasibility-sum) objective, phase 2 is textbook Dantzig pricing with a
//! Bland fallback after long degenerate stretches. Entirely deterministic:
//! ties break on the lowest column index.

use crate::milp::{MilpProblem, RowSense};

pub const INF: f64 = f64::INFINITY;

const PIVOT_EPS: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-9;
const REFACTOR_EVERY: usize = 256;
const DEGENERATE_LIMIT: usize = 600;

/// Standard-form LP data shared by all branch-and-bound nodes.
#[derive(Debug, Clone)]
pub struct LpCore {
    pub nrows: usize,
    pub nstruct: usize,
    col_ptr: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
    /// Scaled structural objective.
    obj: Vec<f64>,
    /// Scaled right-hand side.
    rhs: Vec<f64>,
    senses: Vec<RowSense>,
    col_scale: Vec<f64>,
    obj_norm: f64,
}

impl LpCore {
    pub fn from_problem(p: &MilpProblem) -> LpCore {
        let nrows = p.num_rows();
        let nstruct = p.num_cols();

        // Geometric-mean equilibration, rows then columns.
        let mut row_scale = vec![1.0f64; nrows];
        for (r, row) in p.rows().iter().enumerate() {
            let mut lo = INF;
            let mut hi = 0.0f64;
            for &(_, a) in &row.coeffs {
                let m = a.abs();
                if m > 0.0 {
                    lo = lo.min(m);
                    hi = hi.max(m);
                }
            }
            if hi > 0.0 {
                row_scale[r] = 1.0 / (lo * hi).sqrt();
            }
        }
        let mut col_scale = vec![1.0f64; nstruct];
        let mut col_lo = vec![INF; nstruct];
        let mut col_hi = vec![0.0f64; nstruct];
        for (r, row) in p.rows().iter().enumerate() {
            for &(c, a) in &row.coeffs {
                let m = (a * row_scale[r]).abs();
                if m > 0.0 {
                    col_lo[c] = col_lo[c].min(m);
                    col_hi[c] = col_hi[c].max(m);
                }
            }
        }
        for c in 0..nstruct {
            if col_hi[c] > 0.0 {
                col_scale[c] = 1.0 / (col_lo[c] * col_hi[c]).sqrt();
            }
        }

        // CSC assembly of the scaled matrix.
        let mut counts = vec![0usize; nstruct + 1];
        for row in p.rows() {
            for &(c, _) in &row.coeffs {
                counts[c + 1] += 1;
            }
        }
        for c in 0..nstruct {
            counts[c + 1] += counts[c];
        }
        let nnz = counts[nstruct];
        let mut col_rows = vec![0usize; nnz];
        let mut col_vals = vec![0.0f64; nnz];
        let mut fill = counts.clone();
        for (r, row) in p.rows().iter().enumerate() {
            for &(c, a) in &row.coeffs {
                let k = fill[c];
                col_rows[k] = r;
                col_vals[k] = a * row_scale[r] * col_scale[c];
                fill[c] += 1;
            }
        }

        let obj: Vec<f64> = p
            .cols()
            .iter()
            .enumerate()
            .map(|(c, col)| col.objective * col_scale[c])
            .collect();
        let obj_norm = obj.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
        let rhs: Vec<f64> = p
            .rows()
            .iter()
            .enumerate()
            .map(|(r, row)| row.rhs * row_scale[r])
            .collect();
        let senses = p.rows().iter().map(|r| r.sense).collect();

        LpCore {
            nrows,
            nstruct,
            col_ptr: counts,
            col_rows,
            col_vals,
            obj,
            rhs,
            senses,
            col_scale,
            obj_norm,
        }
    }

    pub fn ntotal(&self) -> usize {
        self.nstruct + self.nrows
    }

    /// Scaled bound vectors (structural + slack) from original-space
    /// structural bounds.
    pub fn scaled_bounds(&self, lower: &[f64], upper: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let nt = self.ntotal();
        let mut lo = Vec::with_capacity(nt);
        let mut hi = Vec::with_capacity(nt);
        for c in 0..self.nstruct {
            lo.push(lower[c] / self.col_scale[c]);
            hi.push(upper[c] / self.col_scale[c]);
        }
        for r in 0..self.nrows {
            match self.senses[r] {
                RowSense::Le => {
                    lo.push(0.0);
                    hi.push(INF);
                }
                RowSense::Ge => {
                    lo.push(-INF);
                    hi.push(0.0);
                }
                RowSense::Eq => {
                    lo.push(0.0);
                    hi.push(0.0);
                }
            }
        }
        (lo, hi)
    }

    /// Map a scaled total-space solution back to original structural values.
    pub fn unscale(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nstruct).map(|c| x[c] * self.col_scale[c]).collect()
    }

    fn col(&self, j: usize) -> &[usize] {
        &self.col_rows[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    fn col_v(&self, j: usize) -> &[f64] {
        &self.col_vals[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    /// Structural objective value (scaled space == original space).
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.obj.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum St {
    Basic(u32),
    Lower,
    Upper,
    Free,
}

/// Simplex basis snapshot, cheap to clone per branch-and-bound node.
#[derive(Debug, Clone)]
pub struct Basis {
    state: Vec<St>,
    basic: Vec<u32>,
}

impl Basis {
    fn slack(core: &LpCore) -> Basis {
        let nt = core.ntotal();
        let mut state = vec![St::Lower; nt];
        let mut basic = Vec::with_capacity(core.nrows);
        for r in 0..core.nrows {
            let j = core.nstruct + r;
            state[j] = St::Basic(r as u32);
            basic.push(j as u32);
        }
        Basis { state, basic }
    }

    fn is_valid(&self, core: &LpCore) -> bool {
        if self.basic.len() != core.nrows || self.state.len() != core.ntotal() {
            return false;
        }
        self.basic.iter().enumerate().all(|(p, &j)| {
            (j as usize) < core.ntotal() && self.state[j as usize] == St::Basic(p as u32)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    /// Original-space structural solution.
    pub x: Vec<f64>,
    pub objective: f64,
    pub basis: Basis,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub max_iters: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feas_tol: 1e-7,
            opt_tol: 1e-9,
            max_iters: 200_000,
        }
    }
}

/// Reusable working storage; keeping it alive across warm-started solves
/// preserves the factorization when the basis has not changed.
pub struct Workspace {
    binv: Vec<f64>,
    xb: Vec<f64>,
    m: usize,
    /// Basis the current factorization corresponds to.
    factored: Option<Basis>,
    pivots: usize,
}

impl Workspace {
    pub fn new() -> Workspace {
        Workspace {
            binv: Vec::new(),
            xb: Vec::new(),
            m: 0,
            factored: None,
            pivots: 0,
        }
    }

    fn binv_col(&self, r: usize) -> &[f64] {
        &self.binv[r * self.m..(r + 1) * self.m]
    }
}

impl Default for Workspace {
    fn default() -> Self {
        Self::new()
    }
}

pub fn solve_lp(
    core: &LpCore,
    lower: &[f64],
    upper: &[f64],
    warm: Option<&Basis>,
    opts: &LpOptions,
    ws: &mut Workspace,
) -> LpResult {
    let m = core.nrows;
    let nt = core.ntotal();
    debug_assert_eq!(lower.len(), nt);
    debug_assert_eq!(upper.len(), nt);

    let mut basis = match warm {
        Some(b) if b.is_valid(core) => b.clone(),
        _ => Basis::slack(core),
    };
    normalize_nonbasic(&mut basis, lower, upper);

    let same_factorization = ws
        .factored
        .as_ref()
        .map(|f| f.basic == basis.basic)
        .unwrap_or(false)
        && ws.m == m;
    if !same_factorization {
        if !refactor(core, &basis, ws) {
            basis = Basis::slack(core);
            normalize_nonbasic(&mut basis, lower, upper);
            let ok = refactor(core, &basis, ws);
            debug_assert!(ok, "slack basis must factorize");
        }
    }
    compute_xb(core, &basis, lower, upper, ws);

    let mut iterations = 0usize;
    let mut degenerate_run = 0usize;
    let mut bland = false;
    let dual_tol = opts.opt_tol * core.obj_norm;

    loop {
        if iterations >= opts.max_iters {
            return finish(core, &basis, lower, upper, ws, LpStatus::IterLimit, iterations);
        }

        // Classify basic feasibility and build the working objective.
        let mut cb = vec![0.0f64; m];
        let mut phase1 = false;
        for p in 0..m {
            let j = basis.basic[p] as usize;
            let v = ws.xb[p];
            if v < lower[j] - opts.feas_tol {
                cb[p] = -1.0;
                phase1 = true;
            } else if v > upper[j] + opts.feas_tol {
                cb[p] = 1.0;
                phase1 = true;
            }
        }
        if !phase1 {
            for p in 0..m {
                cb[p] = obj_of(core, basis.basic[p] as usize);
            }
        }
        let price_tol = if phase1 { opts.opt_tol } else { dual_tol };

        // BTRAN: y[r] = cb . binv_col(r)
        let mut y = vec![0.0f64; m];
        let nonzero_cb = cb.iter().any(|&c| c != 0.0);
        if nonzero_cb {
            for r in 0..m {
                let col = ws.binv_col(r);
                let mut acc = 0.0;
                for p in 0..m {
                    acc += cb[p] * col[p];
                }
                y[r] = acc;
            }
        }

        // Pricing.
        let mut enter: Option<(usize, f64, i8)> = None; // (col, score, dir)
        for j in 0..nt {
            let st = basis.state[j];
            if matches!(st, St::Basic(_)) || lower[j] >= upper[j] {
                continue;
            }
            let cj = if phase1 { 0.0 } else { obj_of(core, j) };
            let mut d = cj;
            if nonzero_cb {
                if j < core.nstruct {
                    for (&r, &v) in core.col(j).iter().zip(core.col_v(j)) {
                        d -= y[r] * v;
                    }
                } else {
                    d -= y[j - core.nstruct];
                }
            }
            let (eligible, dir) = match st {
                St::Lower => (d < -price_tol, 1i8),
                St::Upper => (d > price_tol, -1i8),
                St::Free => (d.abs() > price_tol, if d > 0.0 { -1 } else { 1 }),
                St::Basic(_) => unreachable!(),
            };
            if !eligible {
                continue;
            }
            if bland {
                enter = Some((j, d.abs(), dir));
                break;
            }
            match enter {
                Some((_, best, _)) if d.abs() <= best => {}
                _ => enter = Some((j, d.abs(), dir)),
            }
        }

        let (q, _, dir) = match enter {
            Some(e) => e,
            None => {
                if phase1 {
                    return finish(core, &basis, lower, upper, ws, LpStatus::Infeasible, iterations);
                }
                return finish(core, &basis, lower, upper, ws, LpStatus::Optimal, iterations);
            }
        };
        let dirf = dir as f64;

        // FTRAN: w = B^-1 a_q.
        let mut w = vec![0.0f64; m];
        if q < core.nstruct {
            for (&r, &v) in core.col(q).iter().zip(core.col_v(q)) {
                let col = ws.binv_col(r);
                for p in 0..m {
                    w[p] += v * col[p];
                }
            }
        } else {
            w.copy_from_slice(ws.binv_col(q - core.nstruct));
        }

        // Ratio test.
        let span = upper[q] - lower[q];
        let mut best_t = if span.is_finite() { span } else { INF };
        let mut leave: Option<(usize, St, f64)> = None; // (position, exit side, |pivot|)
        for p in 0..m {
            let wp = w[p];
            if wp.abs() <= PIVOT_EPS {
                continue;
            }
            let j = basis.basic[p] as usize;
            let x = ws.xb[p];
            let delta = -dirf * wp;
            let (t, side) = if phase1 && x < lower[j] - opts.feas_tol {
                if delta > 0.0 {
                    ((lower[j] - x) / delta, St::Lower)
                } else {
                    continue;
                }
            } else if phase1 && x > upper[j] + opts.feas_tol {
                if delta < 0.0 {
                    ((upper[j] - x) / delta, St::Upper)
                } else {
                    continue;
                }
            } else if delta > 0.0 {
                if upper[j].is_finite() {
                    ((upper[j] - x) / delta, St::Upper)
                } else {
                    continue;
                }
            } else if lower[j].is_finite() {
                ((lower[j] - x) / delta, St::Lower)
            } else {
                continue;
            };
            let t = t.max(0.0);
            if t < best_t - RATIO_TIE {
                best_t = t;
                leave = Some((p, side, wp.abs()));
            } else if let Some((lp, _, lpiv)) = leave {
                if t <= best_t + RATIO_TIE {
                    best_t = best_t.min(t);
                    let better = if bland {
                        (basis.basic[p] as usize) < basis.basic[lp] as usize
                    } else {
                        wp.abs() > lpiv
                    };
                    if better {
                        leave = Some((p, side, wp.abs()));
                    }
                }
            }
        }

        if leave.is_none() && !best_t.is_finite() {
            if phase1 {
                // No breakpoint despite an eligible direction: numerical
                // trouble; refactorize once, then give up as infeasible.
                if ws.pivots > 0 {
                    let ok = refactor(core, &basis, ws);
                    debug_assert!(ok);
                    compute_xb(core, &basis, lower, upper, ws);
                    continue;
                }
                return finish(core, &basis, lower, upper, ws, LpStatus::Infeasible, iterations);
            }
            return finish(core, &basis, lower, upper, ws, LpStatus::Unbounded, iterations);
        }

        iterations += 1;
        if best_t <= RATIO_TIE {
            degenerate_run += 1;
            if degenerate_run > DEGENERATE_LIMIT {
                bland = true;
            }
        } else {
            degenerate_run = 0;
            bland = false;
        }

        match leave {
            None => {
                // Bound flip: q crosses to its opposite bound.
                let step = dirf * best_t;
                for p in 0..m {
                    ws.xb[p] -= step * w[p];
                }
                basis.state[q] = match basis.state[q] {
                    St::Lower => St::Upper,
                    St::Upper => St::Lower,
                    s => s,
                };
            }
            Some((pe, side, _)) => {
                let entering_start = nonbasic_value(q, &basis.state, lower, upper);
                let step = dirf * best_t;
                for p in 0..m {
                    ws.xb[p] -= step * w[p];
                }
                let lv = basis.basic[pe] as usize;
                basis.state[lv] = if lower[lv] >= upper[lv] { St::Lower } else { side };
                basis.state[q] = St::Basic(pe as u32);
                basis.basic[pe] = q as u32;
                ws.xb[pe] = entering_start + step;
                update_binv(ws, &w, pe);
                ws.pivots += 1;
                if ws.pivots >= REFACTOR_EVERY {
                    if !refactor(core, &basis, ws) {
                        // Should not happen for a basis we just pivoted to.
                        basis = Basis::slack(core);
                        normalize_nonbasic(&mut basis, lower, upper);
                        let ok = refactor(core, &basis, ws);
                        debug_assert!(ok);
                    }
                    compute_xb(core, &basis, lower, upper, ws);
                }
            }
        }
    }
}

fn obj_of(core: &LpCore, j: usize) -> f64 {
    if j < core.nstruct {
        core.obj[j]
    } else {
        0.0
    }
}

fn nonbasic_value(j: usize, state: &[St], lower: &[f64], upper: &[f64]) -> f64 {
    match state[j] {
        St::Lower => lower[j],
        St::Upper => upper[j],
        St::Free => 0.0,
        St::Basic(_) => unreachable!("basic variable has no nonbasic value"),
    }
}

/// Repair nonbasic states that reference an infinite bound.
fn normalize_nonbasic(basis: &mut Basis, lower: &[f64], upper: &[f64]) {
    for j in 0..basis.state.len() {
        basis.state[j] = match basis.state[j] {
            St::Lower if !lower[j].is_finite() => {
                if upper[j].is_finite() {
                    St::Upper
                } else {
                    St::Free
                }
            }
            St::Upper if !upper[j].is_finite() => {
                if lower[j].is_finite() {
                    St::Lower
                } else {
                    St::Free
                }
            }
            St::Free if lower[j].is_finite() => St::Lower,
            St::Free if upper[j].is_finite() => St::Upper,
            s => s,
        };
    }
}

/// Rank-1 product-form update of the explicit inverse after a pivot at
/// basis position `pe` with FTRAN column `w`.
fn update_binv(ws: &mut Workspace, w: &[f64], pe: usize) {
    let m = ws.m;
    let piv = w[pe];
    for r in 0..m {
        let col = &mut ws.binv[r * m..(r + 1) * m];
        let ce = col[pe] / piv;
        if ce != 0.0 {
            for p in 0..m {
                col[p] -= w[p] * ce;
            }
            col[pe] = ce;
        }
    }
}

/// Rebuild the explicit inverse for `basis`. Exploits basic slack columns
/// being unit vectors: only the structural kernel C_N is inverted.
fn refactor(core: &LpCore, basis: &Basis, ws: &mut Workspace) -> bool {
    let m = core.nrows;
    ws.m = m;
    ws.binv.clear();
    ws.binv.resize(m * m, 0.0);
    ws.xb.resize(m, 0.0);
    ws.pivots = 0;
    ws.factored = None;

    // Slack-covered rows and structural basis positions.
    let mut slack_pos_of_row = vec![usize::MAX; m];
    let mut struct_pos = Vec::new();
    for (p, &j) in basis.basic.iter().enumerate() {
        let j = j as usize;
        if j >= core.nstruct {
            let r = j - core.nstruct;
            if slack_pos_of_row[r] != usize::MAX {
                return false; // duplicate basic slack
            }
            slack_pos_of_row[r] = p;
        } else {
            struct_pos.push(p);
        }
    }
    let rows_n: Vec<usize> = (0..m).filter(|&r| slack_pos_of_row[r] == usize::MAX).collect();
    let k = struct_pos.len();
    if rows_n.len() != k {
        return false;
    }

    if k > 0 {
        let mut map_n = vec![usize::MAX; m];
        for (i, &r) in rows_n.iter().enumerate() {
            map_n[r] = i;
        }
        // Kernel C_N, column-major k x k.
        let mut cn = nalgebra::DMatrix::<f64>::zeros(k, k);
        for (jj, &p) in struct_pos.iter().enumerate() {
            let j = basis.basic[p] as usize;
            for (&r, &v) in core.col(j).iter().zip(core.col_v(j)) {
                if map_n[r] != usize::MAX {
                    cn[(map_n[r], jj)] = v;
                }
            }
        }
        let minv = match cn.lu().try_inverse() {
            Some(inv) => inv,
            None => return false,
        };
        if minv.iter().any(|v| !v.is_finite()) {
            return false;
        }
        // Columns of B^-1 for uncovered rows.
        let mut spread = vec![0.0f64; m];
        for (c, &r) in rows_n.iter().enumerate() {
            let col = &mut ws.binv[r * m..(r + 1) * m];
            // y = sum_j M[j][c] * a_{struct_j}  (sparse accumulate)
            for s in spread.iter_mut() {
                *s = 0.0;
            }
            for (jj, &p) in struct_pos.iter().enumerate() {
                let coef = minv[(jj, c)];
                if coef == 0.0 {
                    continue;
                }
                let j = basis.basic[p] as usize;
                for (&rr, &v) in core.col(j).iter().zip(core.col_v(j)) {
                    spread[rr] += coef * v;
                }
                col[p] = coef;
            }
            for rr in 0..m {
                let sp = slack_pos_of_row[rr];
                if sp != usize::MAX {
                    col[sp] = -spread[rr];
                }
            }
        }
    }
    // Columns for slack-covered rows.
    for r in 0..m {
        let sp = slack_pos_of_row[r];
        if sp != usize::MAX {
            ws.binv[r * m + sp] = 1.0;
        }
    }
    true
}

fn compute_xb(core: &LpCore, basis: &Basis, lower: &[f64], upper: &[f64], ws: &mut Workspace) {
    let m = core.nrows;
    let mut resid = core.rhs.clone();
    for j in 0..core.ntotal() {
        if matches!(basis.state[j], St::Basic(_)) {
            continue;
        }
        let v = nonbasic_value(j, &basis.state, lower, upper);
        if v == 0.0 {
            continue;
        }
        if j < core.nstruct {
            for (&r, &a) in core.col(j).iter().zip(core.col_v(j)) {
                resid[r] -= a * v;
            }
        } else {
            resid[j - core.nstruct] -= v;
        }
    }
    let binv = &ws.binv;
    let xb = &mut ws.xb;
    for v in xb.iter_mut() {
        *v = 0.0;
    }
    for (r, &rv) in resid.iter().enumerate() {
        if rv != 0.0 {
            let col = &binv[r * m..(r + 1) * m];
            for p in 0..m {
                xb[p] += rv * col[p];
            }
        }
    }
}

fn finish(
    core: &LpCore,
    basis: &Basis,
    lower: &[f64],
    upper: &[f64],
    ws: &mut Workspace,
    status: LpStatus,
    iterations: usize,
) -> LpResult {
    let nt = core.ntotal();
    let mut x = vec![0.0f64; nt];
    for j in 0..nt {
        x[j] = match basis.state[j] {
            St::Basic(p) => ws.xb[p as usize],
            _ => nonbasic_value(j, &basis.state, lower, upper),
        };
    }
    let objective = core.objective(&x[..core.nstruct]);
    ws.factored = Some(basis.clone());
    LpResult {
        status,
        x: core.unscale(&x),
        objective,
        basis: basis.clone(),
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{MilpProblem, VarKey};
    use approx::assert_relative_eq;

    fn named(p: &mut MilpProblem, n: &str, lo: f64, hi: f64, obj: f64) -> usize {
        p.add_variable(VarKey::Named(n.into()), lo, hi, obj, false)
            .unwrap()
    }

    fn solve(p: &MilpProblem) -> LpResult {
        let core = LpCore::from_problem(p);
        let lower: Vec<f64> = p.cols().iter().map(|c| c.lower).collect();
        let upper: Vec<f64> = p.cols().iter().map(|c| c.upper).collect();
        let (lo, hi) = core.scaled_bounds(&lower, &upper);
        solve_lp(&core, &lo, &hi, None, &LpOptions::default(), &mut Workspace::new())
    }

    #[test]
    fn min_x_above_three() {
        let mut p = MilpProblem::new("t");
        named(&mut p, "x", 3.0, INF, 1.0);
        let r = solve(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert_relative_eq!(r.objective, 3.0, max_relative = 1e-9);
    }

    #[test]
    fn unbounded_detected() {
        let mut p = MilpProblem::new("t");
        named(&mut p, "x", 0.0, INF, -1.0);
        assert_eq!(solve(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_detected() {
        let mut p = MilpProblem::new("t");
        let x = named(&mut p, "x", 0.0, 1.0, 1.0);
        p.add_row("r", vec![(x, 1.0)], RowSense::Ge, 2.0).unwrap();
        assert_eq!(solve(&p).status, LpStatus::Infeasible);
    }

    #[test]
    fn two_var_vertex() {
        // min -x - 2y  s.t. x + y <= 4, x <= 3, y <= 2 -> (2, 2), obj -6
        let mut p = MilpProblem::new("t");
        let x = named(&mut p, "x", 0.0, 3.0, -1.0);
        let y = named(&mut p, "y", 0.0, 2.0, -2.0);
        p.add_row("cap", vec![(x, 1.0), (y, 1.0)], RowSense::Le, 4.0)
            .unwrap();
        let r = solve(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert_relative_eq!(r.objective, -6.0, max_relative = 1e-9);
        assert_relative_eq!(r.x[x], 2.0, epsilon = 1e-9);
        assert_relative_eq!(r.x[y], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn equality_and_negative_bounds() {
        // min x + y  s.t. x + y = 1, x in [-5, 5], y in [-5, 5] -> obj 1
        let mut p = MilpProblem::new("t");
        let x = named(&mut p, "x", -5.0, 5.0, 1.0);
        let y = named(&mut p, "y", -5.0, 5.0, 1.0);
        p.add_row("bal", vec![(x, 1.0), (y, 1.0)], RowSense::Eq, 1.0)
            .unwrap();
        let r = solve(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert_relative_eq!(r.objective, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn warm_start_reuses_basis() {
        let mut p = MilpProblem::new("t");
        let x = named(&mut p, "x", 0.0, 10.0, -1.0);
        let y = named(&mut p, "y", 0.0, 10.0, -1.0);
        p.add_row("r1", vec![(x, 1.0), (y, 2.0)], RowSense::Le, 10.0)
            .unwrap();
        p.add_row("r2", vec![(x, 2.0), (y, 1.0)], RowSense::Le, 10.0)
            .unwrap();
        let core = LpCore::from_problem(&p);
        let (lo, hi) = core.scaled_bounds(&[0.0, 0.0], &[10.0, 10.0]);
        let mut ws = Workspace::new();
        let r1 = solve_lp(&core, &lo, &hi, None, &LpOptions::default(), &mut ws);
        assert_eq!(r1.status, LpStatus::Optimal);
        // Tighten a bound and re-solve from the old basis.
        let (lo2, hi2) = core.scaled_bounds(&[0.0, 0.0], &[1.0, 10.0]);
        let r2 = solve_lp(&core, &lo2, &hi2, Some(&r1.basis), &LpOptions::default(), &mut ws);
        assert_eq!(r2.status, LpStatus::Optimal);
        assert!(r2.x[x] <= 1.0 + 1e-9);
        assert!(r2.iterations <= r1.iterations + 4);
    }
}
