//! Per-bus linear short-circuit-current surrogate.
//!
//! Training samples pair a source state (SG commitment, IBR availability)
//! with the oracle fault current at every bus. Each bus gets an ordinary
//! least-squares fit, without intercept, on the features
//! `[u_g | alpha_c | u_i * u_j]`; the pair products make the model exact on
//! the interaction structure the oracle actually exhibits.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{scc_oracle, BusId, GridError, GridModel};

/// Largest sample count admitted for exhaustive enumeration.
pub const EXHAUSTIVE_CAP: u128 = 1_000_000;

/// Default availability levels used when none are configured.
pub const DEFAULT_ALPHA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Relative normal-equation residual admitted for a fit.
const NORMAL_EQ_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("alpha grid is empty")]
    EmptyAlphaGrid,
    #[error("alpha grid value {0} outside [0, 1]")]
    AlphaRange(f64),
    #[error("exhaustive enumeration needs {needed} samples, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("no samples provided")]
    NoSamples,
    #[error("sample {index} has inconsistent dimensions")]
    SampleShape { index: usize },
    #[error("{got} samples for {features} features; rank-deficient design needs allow_min_norm")]
    RankDeficient { got: usize, features: usize },
    #[error("normal-equation residual {residual:.3e} for bus {bus} exceeds {NORMAL_EQ_TOL:.0e}")]
    PoorFit { bus: BusId, residual: f64 },
    #[error("surrogate dimensions do not match grid")]
    DimensionMismatch,
    #[error("unknown bus id {0}")]
    UnknownBus(BusId),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("cannot access surrogate file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("surrogate file parse error: {0}")]
    Format(#[from] serde_json::Error),
}

/// One training point: a source state plus oracle currents at every bus.
#[derive(Debug, Clone, PartialEq)]
pub struct SccSample {
    pub commitment: Vec<u8>,
    pub alpha: Vec<f64>,
    /// Oracle fault current per bus, in grid bus order, p.u.
    pub currents: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum SampleStrategy {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusDiagnostics {
    pub rmse: f64,
    pub max_abs_error: f64,
    /// Largest (approx − actual); positive means the surrogate can claim
    /// more fault current than the grid delivers.
    pub max_overestimate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SccSurrogate {
    pub bus_ids: Vec<BusId>,
    /// SG coefficients per bus: `k_g[b][g]`.
    pub k_g: Vec<Vec<f64>>,
    /// IBR coefficients per bus: `k_c[b][c]`.
    pub k_c: Vec<Vec<f64>>,
    /// Pair coefficients per bus: `k_m[b][m]`, ordered as `pairs`.
    pub k_m: Vec<Vec<f64>>,
    /// Unordered SG index pairs, (i, j) with i < j.
    pub pairs: Vec<(usize, usize)>,
    pub diagnostics: Vec<BusDiagnostics>,
    /// Per-bus offset that, when enabled, removes every training-set
    /// overestimate.
    pub conservative_shift: Vec<f64>,
    pub shift_enabled: bool,
}

impl SccSurrogate {
    pub fn num_buses(&self) -> usize {
        self.bus_ids.len()
    }

    pub fn num_sgs(&self) -> usize {
        self.k_g.first().map_or(0, Vec::len)
    }

    pub fn num_ibrs(&self) -> usize {
        self.k_c.first().map_or(0, Vec::len)
    }

    pub fn bus_row(&self, bus: BusId) -> Result<usize, SurrogateError> {
        self.bus_ids
            .iter()
            .position(|&b| b == bus)
            .ok_or(SurrogateError::UnknownBus(bus))
    }

    pub fn matches_grid(&self, grid: &GridModel) -> bool {
        self.bus_ids == grid.buses
            && self.num_sgs() == grid.num_sgs()
            && self.num_ibrs() == grid.num_ibrs()
            && self.pairs == grid.sg_pairs()
    }
}

fn check_alpha_grid(alpha_grid: &[f64]) -> Result<(), SurrogateError> {
    if alpha_grid.is_empty() {
        return Err(SurrogateError::EmptyAlphaGrid);
    }
    for &a in alpha_grid {
        if !(0.0..=1.0).contains(&a) {
            return Err(SurrogateError::AlphaRange(a));
        }
    }
    Ok(())
}

fn oracle_row(grid: &GridModel, u: &[u8], alpha: &[f64]) -> Result<Vec<f64>, SurrogateError> {
    grid.buses
        .iter()
        .map(|&b| scc_oracle(grid, u, alpha, b).map_err(SurrogateError::from))
        .collect()
}

/// Generate training samples with oracle currents at every bus.
pub fn generate_samples(
    grid: &GridModel,
    strategy: &SampleStrategy,
    alpha_grid: &[f64],
) -> Result<Vec<SccSample>, SurrogateError> {
    check_alpha_grid(alpha_grid)?;
    let g = grid.num_sgs();
    let c = grid.num_ibrs();
    match strategy {
        SampleStrategy::Exhaustive => {
            let needed = (1u128 << g) * (alpha_grid.len() as u128).pow(c as u32);
            if needed > EXHAUSTIVE_CAP {
                return Err(SurrogateError::CapExceeded {
                    needed,
                    cap: EXHAUSTIVE_CAP,
                });
            }
            let mut samples = Vec::with_capacity(needed as usize);
            let alpha_combos = alpha_grid.len().pow(c as u32);
            for mask in 0..(1usize << g) {
                let u: Vec<u8> = (0..g).map(|i| ((mask >> i) & 1) as u8).collect();
                for combo in 0..alpha_combos {
                    let mut rest = combo;
                    let alpha: Vec<f64> = (0..c)
                        .map(|_| {
                            let a = alpha_grid[rest % alpha_grid.len()];
                            rest /= alpha_grid.len();
                            a
                        })
                        .collect();
                    let currents = oracle_row(grid, &u, &alpha)?;
                    samples.push(SccSample {
                        commitment: u.clone(),
                        alpha,
                        currents,
                    });
                }
            }
            Ok(samples)
        }
        SampleStrategy::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut samples = Vec::with_capacity(*count);
            for _ in 0..*count {
                let u: Vec<u8> = (0..g).map(|_| rng.gen_range(0..=1u8)).collect();
                let alpha: Vec<f64> = (0..c)
                    .map(|_| alpha_grid[rng.gen_range(0..alpha_grid.len())])
                    .collect();
                let currents = oracle_row(grid, &u, &alpha)?;
                samples.push(SccSample {
                    commitment: u,
                    alpha,
                    currents,
                });
            }
            Ok(samples)
        }
    }
}

fn feature_row(u: &[u8], alpha: &[f64], pairs: &[(usize, usize)]) -> Vec<f64> {
    let mut row = Vec::with_capacity(u.len() + alpha.len() + pairs.len());
    row.extend(u.iter().map(|&v| v as f64));
    row.extend_from_slice(alpha);
    row.extend(pairs.iter().map(|&(i, j)| (u[i] * u[j]) as f64));
    row
}

/// Ordinary least-squares fit of the per-bus surrogate.
///
/// `allow_min_norm` consents to the minimum-norm solution when the design
/// matrix is rank deficient (e.g. fewer samples than features).
pub fn fit_surrogate(
    grid: &GridModel,
    samples: &[SccSample],
    allow_min_norm: bool,
) -> Result<SccSurrogate, SurrogateError> {
    if samples.is_empty() {
        return Err(SurrogateError::NoSamples);
    }
    let g = grid.num_sgs();
    let c = grid.num_ibrs();
    let nb = grid.num_buses();
    let pairs = grid.sg_pairs();
    let nfeat = g + c + pairs.len();
    for (i, s) in samples.iter().enumerate() {
        if s.commitment.len() != g || s.alpha.len() != c || s.currents.len() != nb {
            return Err(SurrogateError::SampleShape { index: i });
        }
    }

    let n = samples.len();
    let x = DMatrix::from_fn(n, nfeat, |i, j| {
        feature_row(&samples[i].commitment, &samples[i].alpha, &pairs)[j]
    });
    let svd = x.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let rank_tol = max_sv * (n.max(nfeat) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > rank_tol).count();
    if rank < nfeat && !allow_min_norm {
        return Err(SurrogateError::RankDeficient {
            got: n,
            features: nfeat,
        });
    }

    let mut k_g = Vec::with_capacity(nb);
    let mut k_c = Vec::with_capacity(nb);
    let mut k_m = Vec::with_capacity(nb);
    let mut diagnostics = Vec::with_capacity(nb);
    let mut conservative_shift = Vec::with_capacity(nb);
    for b in 0..nb {
        let y = DVector::from_fn(n, |i, _| samples[i].currents[b]);
        let k = svd
            .solve(&y, rank_tol)
            .expect("SVD was computed with both factors");

        // The fit is only accepted if it satisfies the normal equations.
        let resid = &x * &k - &y;
        let grad = x.transpose() * resid;
        let scale = (x.transpose() * &y).amax().max(1.0);
        let rel = grad.amax() / scale;
        if rel > NORMAL_EQ_TOL {
            return Err(SurrogateError::PoorFit {
                bus: grid.buses[b],
                residual: rel,
            });
        }

        let pred = &x * &k;
        let mut sq = 0.0f64;
        let mut max_abs = 0.0f64;
        let mut max_over = f64::NEG_INFINITY;
        for i in 0..n {
            let e = pred[i] - y[i];
            sq += e * e;
            max_abs = max_abs.max(e.abs());
            max_over = max_over.max(e);
        }
        diagnostics.push(BusDiagnostics {
            rmse: (sq / n as f64).sqrt(),
            max_abs_error: max_abs,
            max_overestimate: max_over,
        });
        conservative_shift.push(max_over.max(0.0));
        let kv: Vec<f64> = k.iter().cloned().collect();
        k_g.push(kv[..g].to_vec());
        k_c.push(kv[g..g + c].to_vec());
        k_m.push(kv[g + c..].to_vec());
    }

    Ok(SccSurrogate {
        bus_ids: grid.buses.clone(),
        k_g,
        k_c,
        k_m,
        pairs,
        diagnostics,
        conservative_shift,
        shift_enabled: false,
    })
}

/// Approximate fault current at `bus` for a given source state.
pub fn evaluate_surrogate(
    s: &SccSurrogate,
    u: &[u8],
    alpha: &[f64],
    bus: BusId,
) -> Result<f64, SurrogateError> {
    if u.len() != s.num_sgs() || alpha.len() != s.num_ibrs() {
        return Err(SurrogateError::DimensionMismatch);
    }
    let b = s.bus_row(bus)?;
    let mut v = 0.0;
    for (k, &ug) in s.k_g[b].iter().zip(u) {
        v += k * ug as f64;
    }
    for (k, &a) in s.k_c[b].iter().zip(alpha) {
        v += k * a;
    }
    for (k, &(i, j)) in s.k_m[b].iter().zip(&s.pairs) {
        v += k * (u[i] * u[j]) as f64;
    }
    if s.shift_enabled {
        v -= s.conservative_shift[b];
    }
    Ok(v)
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub bus_ids: Vec<BusId>,
    pub diagnostics: Vec<BusDiagnostics>,
    /// Delimiter-separated scatter table: bus, actual, approx.
    pub scatter: String,
}

/// Evaluate the surrogate on a holdout set and emit the per-bus scatter.
pub fn validation_report(
    s: &SccSurrogate,
    holdout: &[SccSample],
) -> Result<ValidationReport, SurrogateError> {
    if holdout.is_empty() {
        return Err(SurrogateError::NoSamples);
    }
    let nb = s.num_buses();
    let mut sq = vec![0.0f64; nb];
    let mut max_abs = vec![0.0f64; nb];
    let mut max_over = vec![f64::NEG_INFINITY; nb];
    let mut scatter = String::from("bus,actual,approx\n");
    for (i, sample) in holdout.iter().enumerate() {
        if sample.currents.len() != nb {
            return Err(SurrogateError::SampleShape { index: i });
        }
        for (b, &bus) in s.bus_ids.iter().enumerate() {
            let approx = evaluate_surrogate(s, &sample.commitment, &sample.alpha, bus)?;
            let actual = sample.currents[b];
            let e = approx - actual;
            sq[b] += e * e;
            max_abs[b] = max_abs[b].max(e.abs());
            max_over[b] = max_over[b].max(e);
            scatter.push_str(&format!("{bus},{actual},{approx}\n"));
        }
    }
    let n = holdout.len() as f64;
    let diagnostics = (0..nb)
        .map(|b| BusDiagnostics {
            rmse: (sq[b] / n).sqrt(),
            max_abs_error: max_abs[b],
            max_overestimate: max_over[b],
        })
        .collect();
    Ok(ValidationReport {
        bus_ids: s.bus_ids.clone(),
        diagnostics,
        scatter,
    })
}

/// Persist a surrogate; floats keep shortest round-trip form, so
/// save → load is bit-exact.
pub fn save_surrogate(s: &SccSurrogate, path: &Path) -> Result<(), SurrogateError> {
    let text = serde_json::to_string_pretty(s)?;
    std::fs::write(path, text).map_err(|source| SurrogateError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_surrogate(path: &Path) -> Result<SccSurrogate, SurrogateError> {
    let text = std::fs::read_to_string(path).map_err(|source| SurrogateError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}
