//! Acceptance suite: end-to-end checks that tie the solver, the model, the
//! surrogate and the fault oracle together on the bundled 30-bus fixture.
//!
//! Each test prints a single PASS line on success; reference numbers were
//! frozen from an independent Python/numpy implementation
//! (`tests/data/zbus_reference.py`) and the LP cross-check runs scipy's
//! HiGHS wrapper (`tests/data/mps_crosscheck.py`).

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sccuc::dr::{DrSpec, IlClass};
use sccuc::grid::{build_fault_admittance, load_grid, scc_oracle, Branch, GridModel, Ibr, SyncGenerator};
use sccuc::milp::{MilpProblem, RowSense, VarKey};
use sccuc::mps::write_mps_file;
use sccuc::scenario::{load_config, load_series, run_scenario, ScenarioOutcome};
use sccuc::solver::{solve_lp, solve_milp, SolveOptions, SolveStatus};
use sccuc::surrogate::{fit_surrogate, generate_samples, validation_report, SampleStrategy, SccSample};
use sccuc::uc::{add_scc_constraints, build_uc_milp, TimeSeriesInputs};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

// ---------------------------------------------------------------------------
// Shared scenario runs (three cases on the 30-bus fixture, T = 6):
//   a: no DR, no SCC constraints
//   b: DR, no SCC constraints
//   c: DR and SCC constraints
// ---------------------------------------------------------------------------

struct Cases {
    _dir: tempfile::TempDir,
    a: ScenarioOutcome,
    b: ScenarioOutcome,
    c: ScenarioOutcome,
    elapsed: f64,
}

fn run_case(name: &str, out: &Path) -> ScenarioOutcome {
    let mut cfg = load_config(&fixtures().join(name)).unwrap();
    cfg.output_dir = out.to_path_buf();
    run_scenario(&cfg).unwrap()
}

fn cases() -> &'static Cases {
    static CASES: OnceLock<Cases> = OnceLock::new();
    CASES.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let start = Instant::now();
        let a = run_case("case_a.toml", &dir.path().join("a"));
        let b = run_case("case_b.toml", &dir.path().join("b"));
        let c = run_case("case_c.toml", &dir.path().join("c"));
        let elapsed = start.elapsed().as_secs_f64();
        Cases { _dir: dir, a, b, c, elapsed }
    })
}

fn solved_ok(outcome: &ScenarioOutcome) {
    assert!(
        matches!(outcome.bundle.status.as_str(), "optimal" | "gap-limit"),
        "case {} ended with status {}",
        outcome.bundle.label,
        outcome.bundle.status
    );
    assert!(outcome.bundle.gap <= 1e-3 + 1e-12);
}

// ---------------------------------------------------------------------------
// Small synthetic system shared by the brute-force and surrogate checks.
// ---------------------------------------------------------------------------

fn sg(bus: usize, p_min: f64, p_max: f64, c_m: f64, u0: u8) -> SyncGenerator {
    SyncGenerator {
        bus,
        p_min,
        p_max,
        c_nl: 100.0,
        c_m,
        k_st: 500.0,
        k_sh: 200.0,
        u0,
        x_subtransient: 0.3,
    }
}

fn tiny_grid() -> GridModel {
    GridModel {
        base_mva: 100.0,
        scc_threshold: 3.0,
        buses: vec![1, 2, 3],
        branches: vec![
            Branch { from: 1, to: 2, r: 0.01, x: 0.1 },
            Branch { from: 2, to: 3, r: 0.02, x: 0.2 },
        ],
        generators: vec![sg(1, 20.0, 100.0, 10.0, 1), sg(2, 10.0, 80.0, 20.0, 0)],
        ibrs: vec![Ibr {
            bus: 3,
            p_max: 30.0,
            kappa: 1.2,
            rated_current: 0.5,
        }],
    }
}

fn tiny_dr() -> DrSpec {
    DrSpec {
        il_classes: vec![
            IlClass { beta1: 0.1, compensation: 5.0 },
            IlClass { beta1: 0.08, compensation: 7.0 },
        ],
        beta2: 0.2,
        beta3: 0.12,
        beta4: 0.12,
        c_sl_in: 2.0,
        c_sl_out: 3.0,
    }
}

fn tiny_inputs() -> TimeSeriesInputs {
    TimeSeriesInputs {
        demand: vec![60.0, 75.0, 55.0],
        lambda: vec![30.0, 35.0, 25.0],
        alpha: vec![vec![0.5, 0.6, 0.4]],
    }
}

// ---------------------------------------------------------------------------
// 1. Pair-activation linearization is exact at binary corners.
// ---------------------------------------------------------------------------

#[test]
fn pair_activation_exact_on_binary_corners() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let u1 = rng.gen_range(0..=1) as f64;
        let u2 = rng.gen_range(0..=1) as f64;
        // Both the loosest and the tightest feasible eta must coincide with
        // the product, so the linearization leaves no slack at the corners.
        for maximize in [false, true] {
            let mut p = MilpProblem::new("mc");
            let eta = p
                .add_variable(
                    VarKey::Named("eta".into()),
                    0.0,
                    1.0,
                    if maximize { -1.0 } else { 1.0 },
                    false,
                )
                .unwrap();
            let a = p.add_variable(VarKey::Named("u1".into()), u1, u1, 0.0, false).unwrap();
            let b = p.add_variable(VarKey::Named("u2".into()), u2, u2, 0.0, false).unwrap();
            p.add_row("cap_a", vec![(eta, 1.0), (a, -1.0)], RowSense::Le, 0.0).unwrap();
            p.add_row("cap_b", vec![(eta, 1.0), (b, -1.0)], RowSense::Le, 0.0).unwrap();
            p.add_row("lift", vec![(eta, 1.0), (a, -1.0), (b, -1.0)], RowSense::Ge, -1.0)
                .unwrap();
            let r = solve_lp(&p, &SolveOptions::default()).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal);
            let got = if maximize { -r.objective } else { r.objective };
            assert_eq!(got, u1 * u2, "eta != u1*u2 at ({u1}, {u2})");
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 1.0, "took {secs:.3} s");
    println!("pair-activation exactness (1000 corners, tolerance 0): PASS");
}

// ---------------------------------------------------------------------------
// 2. Branch-and-bound matches brute-force enumeration on a tiny system with
//    both the DR and the SCC block active.
// ---------------------------------------------------------------------------

#[test]
fn branch_and_bound_matches_brute_force() {
    let start = Instant::now();
    let grid = tiny_grid();
    let series = tiny_inputs();
    let spec = tiny_dr();
    let samples = generate_samples(&grid, &SampleStrategy::Exhaustive, &[0.0, 0.5, 1.0]).unwrap();
    let s = fit_surrogate(&grid, &samples, false).unwrap();
    let mut p = build_uc_milp(&grid, &series, Some(&spec), true).unwrap();
    add_scc_constraints(&mut p, &grid, &s, &series, 2.0, true).unwrap();

    let mut opts = SolveOptions::default();
    opts.rel_gap = 1e-9;
    let r = solve_milp(&p, &opts).unwrap();
    assert!(matches!(r.status, SolveStatus::Optimal | SolveStatus::GapLimit));

    // Enumerate every assignment of the binaries (2 SG commitments and the
    // two shift flags per period) and solve the remaining LP.
    let binaries: Vec<usize> = (0..p.num_cols()).filter(|&i| p.column(i).integer).collect();
    assert_eq!(binaries.len(), 12);
    let lp_opts = SolveOptions::default();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << binaries.len()) {
        let mut q = p.clone();
        for (bit, &col) in binaries.iter().enumerate() {
            let v = ((mask >> bit) & 1) as f64;
            q.set_bounds(col, v, v).unwrap();
        }
        let lr = solve_lp(&q, &lp_opts).unwrap();
        if lr.status == SolveStatus::Optimal && lr.objective < best {
            best = lr.objective;
        }
    }
    assert!(best.is_finite(), "enumeration found no feasible assignment");
    assert_relative_eq!(r.objective, best, max_relative = 1e-6);

    // Every logged incumbent must dominate the bound it was logged with.
    for e in &r.log {
        if let Some(inc) = e.incumbent {
            assert!(inc >= e.bound - 1e-6 * inc.abs().max(1.0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "took {secs:.1} s");
    println!("brute-force equivalence ({best:.4}, 4096 assignments, rel 1e-6): PASS");
}

// ---------------------------------------------------------------------------
// 3. Cost ordering across the three fixture cases.
// ---------------------------------------------------------------------------

#[test]
fn demand_response_and_adequacy_cost_ordering() {
    let cs = cases();
    for o in [&cs.a, &cs.b, &cs.c] {
        solved_ok(o);
    }
    let (a, b, c) = (cs.a.bundle.objective, cs.b.bundle.objective, cs.c.bundle.objective);
    let tol = 1e-6 * a.abs().max(1.0);
    assert!(b <= a + tol, "DR raised the total cost: {b} > {a}");
    assert!(c >= b - tol, "adequacy constraints lowered the cost: {c} < {b}");
    // Frozen fixture snapshot (deterministic solve, gap 1e-3).
    assert_relative_eq!(cs.a.bundle.total_cost, 14215446.135, max_relative = 1e-9);
    assert_relative_eq!(cs.b.bundle.total_cost, 9983375.540000001, max_relative = 1e-9);
    assert_relative_eq!(cs.c.bundle.total_cost, 10012987.315, max_relative = 1e-9);
    assert!(
        cs.c.bundle.operation_cost >= cs.b.bundle.operation_cost - tol,
        "adequacy constraints should not reduce the operating cost"
    );
    assert!(cs.elapsed < 600.0, "three cases took {:.1} s", cs.elapsed);
    println!("cost ordering b <= a, c >= b ({b:.2} <= {a:.2}, {c:.2} >= {b:.2}): PASS");
}

// ---------------------------------------------------------------------------
// 4. The constrained case keeps every bus adequate in every period.
// ---------------------------------------------------------------------------

#[test]
fn constrained_case_meets_the_adequacy_threshold_everywhere() {
    let cs = cases();
    solved_ok(&cs.c);
    let threshold = 5.0;
    let mut worst = f64::INFINITY;
    for row in &cs.c.profile.values {
        for &v in row {
            worst = worst.min(v);
            assert!(v >= threshold - 1e-6, "profile value {v} below {threshold}");
        }
    }
    assert!(
        cs.c.bundle.inadequate_buses.is_empty(),
        "inadequate buses remain: {:?}",
        cs.c.bundle.inadequate_buses
    );
    println!("adequacy threshold held everywhere (worst {worst:.4} >= {threshold} - 1e-6): PASS");
}

// ---------------------------------------------------------------------------
// 5. Without adequacy constraints, DR degrades adequacy: the DR case's
//    inadequate-bus list strictly grows over the no-DR case's list.
// ---------------------------------------------------------------------------

#[test]
fn demand_response_widens_the_inadequate_bus_set() {
    let cs = cases();
    solved_ok(&cs.a);
    solved_ok(&cs.b);
    let base = &cs.a.bundle.inadequate_buses;
    let with_dr = &cs.b.bundle.inadequate_buses;
    assert!(!base.is_empty(), "fixture should leave some remote buses inadequate");
    for bus in base {
        assert!(with_dr.contains(bus), "bus {bus} left the inadequate set under DR");
    }
    assert!(
        with_dr.len() > base.len(),
        "DR did not widen the set: {base:?} vs {with_dr:?}"
    );
    println!(
        "inadequate set grew from {} to {} buses and stayed a superset: PASS",
        base.len(),
        with_dr.len()
    );
}

// ---------------------------------------------------------------------------
// 6. Surrogate training: exact recovery on synthetic linear ground truth,
//    tight normal-equation residual on the fixture, scatter table emitted.
// ---------------------------------------------------------------------------

#[test]
fn surrogate_training_recovers_and_validates() {
    // (a) Ground truth exactly linear in [u | alpha | u_i u_j] features is
    // recovered to machine precision.
    let grid = tiny_grid();
    let truth = [
        (vec![2.0, 1.5], vec![0.7], vec![-0.4]),
        (vec![1.1, 2.2], vec![0.3], vec![0.5]),
        (vec![0.9, 0.8], vec![1.4], vec![0.2]),
    ];
    let mut samples = Vec::new();
    for bits in 0u8..4 {
        for &a in &[0.0, 0.5, 1.0] {
            let u = vec![bits & 1, (bits >> 1) & 1];
            let currents = truth
                .iter()
                .map(|(kg, kc, km)| {
                    kg[0] * u[0] as f64
                        + kg[1] * u[1] as f64
                        + kc[0] * a
                        + km[0] * (u[0] * u[1]) as f64
                })
                .collect();
            samples.push(SccSample { commitment: u, alpha: vec![a], currents });
        }
    }
    let fit = fit_surrogate(&grid, &samples, false).unwrap();
    for (b, (kg, kc, km)) in truth.iter().enumerate() {
        for (got, want) in fit.k_g[b].iter().zip(kg) {
            assert_relative_eq!(got, want, max_relative = 1e-9, epsilon = 1e-9);
        }
        for (got, want) in fit.k_c[b].iter().zip(kc) {
            assert_relative_eq!(got, want, max_relative = 1e-9, epsilon = 1e-9);
        }
        for (got, want) in fit.k_m[b].iter().zip(km) {
            assert_relative_eq!(got, want, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    // (b) On the 30-bus fixture the least-squares solution satisfies the
    // normal equations tightly; recompute the residual from scratch here.
    let grid = load_grid(&fixtures().join("ieee30_grid.toml")).unwrap();
    let strategy = SampleStrategy::Random { count: 1200, seed: 7 };
    let samples = generate_samples(&grid, &strategy, &[0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
    let s = fit_surrogate(&grid, &samples, false).unwrap();
    let pairs = grid.sg_pairs();
    let n = samples.len();
    let nfeat = grid.num_sgs() + grid.num_ibrs() + pairs.len();
    let feature = |smp: &SccSample, j: usize| -> f64 {
        let g = grid.num_sgs();
        let c = grid.num_ibrs();
        if j < g {
            smp.commitment[j] as f64
        } else if j < g + c {
            smp.alpha[j - g]
        } else {
            let (i, k) = pairs[j - g - c];
            (smp.commitment[i] * smp.commitment[k]) as f64
        }
    };
    let mut worst_rel = 0.0f64;
    for (b, &bus) in grid.buses.iter().enumerate() {
        let row = s.bus_row(bus).unwrap();
        let k: Vec<f64> = s.k_g[row]
            .iter()
            .chain(&s.k_c[row])
            .chain(&s.k_m[row])
            .copied()
            .collect();
        let resid: Vec<f64> = (0..n)
            .map(|i| {
                (0..nfeat).map(|j| feature(&samples[i], j) * k[j]).sum::<f64>()
                    - samples[i].currents[b]
            })
            .collect();
        let mut grad_inf = 0.0f64;
        let mut scale = 1.0f64;
        for j in 0..nfeat {
            let g: f64 = (0..n).map(|i| feature(&samples[i], j) * resid[i]).sum();
            let xty: f64 = (0..n)
                .map(|i| feature(&samples[i], j) * samples[i].currents[b])
                .sum();
            grad_inf = grad_inf.max(g.abs());
            scale = scale.max(xty.abs());
        }
        worst_rel = worst_rel.max(grad_inf / scale);
    }
    assert!(worst_rel <= 1e-8, "normal-equation residual {worst_rel:.3e}");

    // (c) The actual-vs-approx scatter table is emitted for inspection.
    let report = validation_report(&s, &samples).unwrap();
    assert!(report.scatter.starts_with("bus,actual,approx\n"));
    assert_eq!(report.scatter.lines().count(), 1 + n * grid.num_buses());
    println!(
        "surrogate recovery exact, fixture residual {worst_rel:.2e} <= 1e-8, scatter emitted: PASS"
    );
}

// ---------------------------------------------------------------------------
// 7. Fault-current oracle: frozen reference values, monotonicity, and the
//    admittance inverse actually being an inverse.
// ---------------------------------------------------------------------------

/// All SGs on, full IBR availability; frozen from tests/data/zbus_reference.py.
const ALL_ON_FULL_ALPHA: [(usize, f64); 30] = [
    (1, 9.288260198028919),
    (2, 9.689652281699296),
    (3, 9.675946869227515),
    (4, 9.914780845065598),
    (5, 9.046603654863572),
    (6, 9.894571797407039),
    (7, 9.256149261978205),
    (8, 9.440981964843116),
    (9, 8.505603619485257),
    (10, 8.586874391677298),
    (11, 6.671254683688348),
    (12, 8.278484950394628),
    (13, 7.027224128702263),
    (14, 7.160849994610294),
    (15, 7.962532957782951),
    (16, 7.640401029409843),
    (17, 8.060776164928974),
    (18, 7.192090974579977),
    (19, 7.2186640957586246),
    (20, 7.371123957871185),
    (21, 8.279052603627765),
    (22, 8.28697380622633),
    (23, 7.430481605585804),
    (24, 8.052175713264289),
    (25, 7.895291380649446),
    (26, 6.347779488501791),
    (27, 8.776998182292443),
    (28, 9.513509920933503),
    (29, 6.630960044176418),
    (30, 6.899182549151688),
];

#[test]
fn oracle_matches_reference_and_is_monotone() {
    let grid = load_grid(&fixtures().join("ieee30_grid.toml")).unwrap();
    let all_on = vec![1u8; grid.num_sgs()];
    let full = vec![1.0; grid.num_ibrs()];
    for &(bus, want) in &ALL_ON_FULL_ALPHA {
        let got = scc_oracle(&grid, &all_on, &full, bus).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }

    // Turning any unit on, or raising any availability, never lowers the
    // fault current anywhere.
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..500 {
        let mut u: Vec<u8> = (0..grid.num_sgs()).map(|_| rng.gen_range(0..=1)).collect();
        if u.iter().all(|&b| b == 0) {
            u[rng.gen_range(0..grid.num_sgs())] = 1;
        }
        let alpha: Vec<f64> = (0..grid.num_ibrs()).map(|_| rng.gen::<f64>()).collect();
        let bus = grid.buses[rng.gen_range(0..grid.num_buses())];

        let g = rng.gen_range(0..grid.num_sgs());
        let mut off = u.clone();
        off[g] = 0;
        let mut on = u.clone();
        on[g] = 1;
        let i_off = scc_oracle(&grid, &off, &alpha, bus).unwrap();
        let i_on = scc_oracle(&grid, &on, &alpha, bus).unwrap();
        assert!(
            i_on >= i_off - 1e-9,
            "committing unit {g} dropped the current at bus {bus}: {i_off} -> {i_on}"
        );

        let c = rng.gen_range(0..grid.num_ibrs());
        let mut more = alpha.clone();
        more[c] += 0.5 * (1.0 - more[c]);
        let i_lo = scc_oracle(&grid, &u, &alpha, bus).unwrap();
        let i_hi = scc_oracle(&grid, &u, &more, bus).unwrap();
        assert!(
            i_hi >= i_lo - 1e-9,
            "raising alpha[{c}] dropped the current at bus {bus}: {i_lo} -> {i_hi}"
        );
    }

    // Y * Y^{-1} = I on the all-on fixture network.
    let y = build_fault_admittance(&grid, &all_on).unwrap();
    let z = y.clone().lu().try_inverse().unwrap();
    let prod = &y * &z;
    let mut resid = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let want = if i == j { 1.0 } else { 0.0 };
            resid = resid.max((prod[(i, j)].re - want).abs().max(prod[(i, j)].im.abs()));
        }
    }
    assert!(resid <= 1e-9, "inverse residual {resid:.3e}");
    println!(
        "oracle frozen values (30 buses, rel 1e-12), monotone over 500 pairs, \
         inverse residual {resid:.2e}: PASS"
    );
}

// ---------------------------------------------------------------------------
// 8. Solver contract: independent LP cross-check through the MPS exchange
//    format, bound dominance in the node log, shift conservation.
// ---------------------------------------------------------------------------

fn random_lp(rng: &mut ChaCha8Rng) -> MilpProblem {
    let n = rng.gen_range(3..=10);
    let m = rng.gen_range(2..=8);
    let mut p = MilpProblem::new("rand");
    for j in 0..n {
        let upper = rng.gen_range(1.0..10.0);
        let lower = if rng.gen_bool(0.2) { -rng.gen_range(0.0..3.0) } else { 0.0 };
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let obj = sign * rng.gen_range(0.5..5.0);
        p.add_variable(VarKey::Named(format!("x{j}")), lower, upper, obj, false)
            .unwrap();
    }
    for i in 0..m {
        let mut coeffs = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                coeffs.push((j, sign * rng.gen_range(0.5..4.0)));
            }
        }
        if coeffs.is_empty() {
            coeffs.push((rng.gen_range(0..n), 1.0));
        }
        let (sense, rhs) = match rng.gen_range(0..10) {
            0..=5 => (RowSense::Le, rng.gen_range(0.0..20.0)),
            6..=8 => (RowSense::Ge, rng.gen_range(-5.0..5.0)),
            _ => (RowSense::Eq, rng.gen_range(0.0..5.0)),
        };
        p.add_row(format!("r{i}"), coeffs, sense, rhs).unwrap();
    }
    p
}

#[test]
fn lp_results_match_an_independent_solver() {
    let script = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join("mps_crosscheck.py");
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let opts = SolveOptions::default();
    let mut optimal = 0usize;
    let mut infeasible = 0usize;
    for i in 0..50 {
        let p = random_lp(&mut rng);
        let file = dir.path().join(format!("lp{i}.mps"));
        write_mps_file(&p, &file).unwrap();
        let out = Command::new("python3")
            .arg(&script)
            .arg(&file)
            .output()
            .expect("python3 with scipy is required for the cross-check");
        assert!(
            out.status.success(),
            "cross-check script failed on lp{i}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let line = String::from_utf8_lossy(&out.stdout);
        let mut parts = line.split_whitespace();
        let status = parts.next().unwrap_or("");
        let r = solve_lp(&p, &opts).unwrap();
        match (r.status, status) {
            (SolveStatus::Optimal, "optimal") => {
                let theirs: f64 = parts.next().unwrap().parse().unwrap();
                assert!(
                    (r.objective - theirs).abs() <= 1e-7 * theirs.abs().max(1.0),
                    "lp{i}: {} vs {theirs}",
                    r.objective
                );
                optimal += 1;
            }
            (SolveStatus::Infeasible, "infeasible") => infeasible += 1,
            (ours, theirs) => panic!("lp{i}: status mismatch, ours {ours:?} vs HiGHS {theirs}"),
        }
    }
    assert!(optimal >= 20, "only {optimal} of 50 instances were optimal");

    // Node-log sanity and shift conservation on the fixture cases.
    let cs = cases();
    for o in [&cs.a, &cs.b, &cs.c] {
        for e in &o.solve.log {
            if let Some(inc) = e.incumbent {
                assert!(
                    inc >= e.bound - 1e-6 * inc.abs().max(1.0),
                    "case {}: incumbent {inc} below bound {}",
                    o.bundle.label,
                    e.bound
                );
            }
        }
        let gap = o.bundle.shift_in_total - o.bundle.shift_out_total;
        assert!(
            gap.abs() <= 1e-7 * o.bundle.shift_in_total.max(1.0),
            "case {}: shift imbalance {gap}",
            o.bundle.label
        );
    }
    println!(
        "LP cross-check ({optimal} optimal, {infeasible} infeasible, rel 1e-7), \
         node log dominance, shift conservation: PASS"
    );
}

// ---------------------------------------------------------------------------
// 9. Determinism: two identical runs produce byte-identical solution files.
// ---------------------------------------------------------------------------

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = load_config(&fixtures().join("case_a.toml")).unwrap();
    cfg.output_dir = dir.path().join("first");
    run_scenario(&cfg).unwrap();
    cfg.output_dir = dir.path().join("second");
    run_scenario(&cfg).unwrap();
    for name in ["solution.json", "bundle.json", "scc_profile.csv", "solve.log"] {
        let first = std::fs::read(dir.path().join("first").join(name)).unwrap();
        let second = std::fs::read(dir.path().join("second").join(name)).unwrap();
        assert_eq!(first, second, "{name} differs between identical runs");
    }
    println!("determinism (solution.json and friends byte-identical): PASS");
}

// ---------------------------------------------------------------------------
// Model-size audit at the full daily horizon.
// ---------------------------------------------------------------------------

#[test]
fn full_horizon_model_dimensions() {
    let grid = load_grid(&fixtures().join("ieee30_grid.toml")).unwrap();
    let inputs = load_series(&fixtures().join("series24.toml")).unwrap();
    let strategy = SampleStrategy::Random { count: 400, seed: 3 };
    let samples = generate_samples(&grid, &strategy, &[0.0, 0.5, 1.0]).unwrap();
    let s = fit_surrogate(&grid, &samples, false).unwrap();
    let mut p = build_uc_milp(&grid, &inputs, None, false).unwrap();
    add_scc_constraints(&mut p, &grid, &s, &inputs, grid.scc_threshold, true).unwrap();

    let horizon = inputs.horizon();
    assert_eq!(horizon, 24);
    let binaries = p.cols().iter().filter(|c| c.integer).count();
    assert_eq!(binaries, grid.num_sgs() * horizon); // 12 * 24 = 288
    let etas = p
        .cols()
        .iter()
        .filter(|c| matches!(c.key, VarKey::Eta { .. }))
        .count();
    assert_eq!(etas, grid.sg_pairs().len() * horizon); // 66 * 24 = 1584
    let scc_rows = p.rows().iter().filter(|r| r.name.starts_with("scc_")).count();
    assert_eq!(scc_rows, grid.num_buses() * horizon); // 30 * 24 = 720
    let mcc_rows = p.rows().iter().filter(|r| r.name.starts_with("mcc_")).count();
    assert_eq!(mcc_rows, 3 * etas);
    println!("full-horizon dimensions (288 binaries, 1584 pairs, 720 threshold rows): PASS");
}
