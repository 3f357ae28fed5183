use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::root::{solve_increasing, Root};
use super::rotated::RotatedModel;
use crate::error::{Error, Result};

/// Radius factor of the neighbourhood the graph lives in.
pub const GRAPH_RADIUS: f64 = 1.5;
/// Radius factor of the neighbourhood the zero set is searched in.
pub const ZERO_SET_RADIUS: f64 = 1.25;

const VARPI_SLACK: f64 = 1e-12;

/// Solves `d_slow(eta, yhat) = varpi` over the `ỹ1` slab of the real
/// `(3/2) r̃_k`-neighbourhood of the rotated domain.
pub fn solve_eta(rot: &RotatedModel, varpi: f64, yhat: &[f64]) -> Result<Root> {
    solve_eta_with(rot, varpi, yhat, None)
}

/// As [`solve_eta`]; with a known zero `z1` the bracket
/// `[z1 - frak_r_tilde_k, z1 + frak_r_tilde_k]` is tried first.
pub fn solve_eta_with(rot: &RotatedModel, varpi: f64, yhat: &[f64], z1: Option<f64>) -> Result<Root> {
    let n = rot.dim();
    if yhat.len() + 1 != n {
        return Err(Error::domain(format!("yhat has {} entries, expected {}", yhat.len(), n - 1)));
    }
    let v0 = rot.frame.varpi0_k;
    let fail = |lo: f64, hi: f64| Error::Bracketing {
        varpi,
        yhat: yhat.to_vec(),
        lo,
        hi,
    };
    if varpi.abs() > v0 * (1.0 + VARPI_SLACK) {
        return Err(fail(f64::NAN, f64::NAN));
    }
    let f = |t: f64| {
        let mut y = Vec::with_capacity(n);
        y.push(t);
        y.extend_from_slice(yhat);
        rot.d_slow(&y)
    };
    let slope = rot.slow_convexity();
    if let Some(z) = z1 {
        let w = rot.frame.frak_r_tilde_k;
        if let Ok(r) = solve_increasing(f, varpi, z - w, z + w, slope, fail) {
            return Ok(r);
        }
    }
    let Some((lo, hi)) = eta_bracket(rot, yhat) else {
        return Err(fail(f64::NAN, f64::NAN));
    };
    solve_increasing(f, varpi, lo, hi, slope, fail)
}

/// The `ỹ1` slab of the real `(3/2) r̃_k`-neighbourhood over `yhat`, the
/// bracket [`solve_eta`] searches.
pub fn eta_bracket(rot: &RotatedModel, yhat: &[f64]) -> Option<(f64, f64)> {
    rot.domain_tilde.slab(yhat, GRAPH_RADIUS * rot.frame.r_tilde_k)
}

/// [`solve_eta`] on a precomputed [`eta_bracket`], for repeated solves over
/// the same base point.
pub fn solve_eta_in(rot: &RotatedModel, varpi: f64, yhat: &[f64], bracket: Option<(f64, f64)>) -> Result<Root> {
    let fail = |lo: f64, hi: f64| Error::Bracketing {
        varpi,
        yhat: yhat.to_vec(),
        lo,
        hi,
    };
    let (Some((lo, hi)), true) = (bracket, yhat.len() + 1 == rot.dim()) else {
        return solve_eta(rot, varpi, yhat);
    };
    if varpi.abs() > rot.frame.varpi0_k * (1.0 + VARPI_SLACK) {
        return Err(fail(f64::NAN, f64::NAN));
    }
    let f = |t: f64| {
        let mut y = Vec::with_capacity(rot.dim());
        y.push(t);
        y.extend_from_slice(yhat);
        rot.d_slow(&y)
    };
    solve_increasing(f, varpi, lo, hi, rot.slow_convexity(), fail)
}

/// Base cubes `frak_r_k (j + [0,1)^(n-1))` whose projection meets the zero set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeDecomposition {
    pub edge: f64,
    /// Multi-indices `j`, lexicographically sorted.
    pub cubes: Vec<Vec<i64>>,
    /// Number of candidate cubes scanned.
    pub scanned: usize,
    pub sub_grid: usize,
    /// Zero-set detection samples each cube on a `3^(n-1)` sub-grid, so thin
    /// intersections can be missed.
    pub note: String,
}

impl CubeDecomposition {
    pub fn corner(&self, j: &[i64]) -> Vec<f64> {
        j.iter().map(|&v| v as f64 * self.edge).collect()
    }

    /// `per_cube^(n-1)` cell centres inside cube `j`.
    pub fn sub_grid(&self, j: &[i64], per_cube: usize) -> Vec<Vec<f64>> {
        let m = j.len();
        let total = per_cube.pow(m as u32);
        (0..total)
            .map(|mut c| {
                j.iter()
                    .map(|&ji| {
                        let i = c % per_cube;
                        c /= per_cube;
                        self.edge * (ji as f64 + (i as f64 + 0.5) / per_cube as f64)
                    })
                    .collect()
            })
            .collect()
    }

    /// Centroid of the union of cubes (zero vector when empty).
    pub fn centroid(&self, dim: usize) -> Vec<f64> {
        if self.cubes.is_empty() {
            return vec![0.0; dim];
        }
        let mut c = vec![0.0; dim];
        for j in &self.cubes {
            for (ci, &ji) in c.iter_mut().zip(j) {
                *ci += (ji as f64 + 0.5) * self.edge;
            }
        }
        c.iter().map(|v| v / self.cubes.len() as f64).collect()
    }

    pub fn contains_index(&self, j: &[i64]) -> bool {
        self.cubes.binary_search_by(|c| c.as_slice().cmp(j)).is_ok()
    }

    /// Index of the cube containing `yhat`.
    pub fn index_of(&self, yhat: &[f64]) -> Vec<i64> {
        yhat.iter().map(|v| (v / self.edge).floor() as i64).collect()
    }
}

/// Scans every cube meeting the `yhat`-shadow of the real
/// `(5/4) r̃_k`-neighbourhood and keeps those where a sub-grid line carries a
/// sign change of `d_slow` inside that neighbourhood. Computed once per
/// rotated model.
pub fn cube_decomposition(rot: &RotatedModel) -> CubeDecomposition {
    rot.cubes.get_or_init(|| scan_cubes(rot)).clone()
}

fn scan_cubes(rot: &RotatedModel) -> CubeDecomposition {
    let n = rot.dim();
    let m = n - 1;
    let edge = rot.frame.frak_r_k;
    let rho = ZERO_SET_RADIUS * rot.frame.r_tilde_k;
    let ranges: Vec<(i64, i64)> = (1..n)
        .map(|i| {
            let (a, b) = rot.domain_tilde.coordinate_range(i, rho);
            ((a / edge).floor() as i64, (b / edge).floor() as i64)
        })
        .collect();
    let mut candidates: Vec<Vec<i64>> = vec![vec![]];
    for &(a, b) in &ranges {
        candidates = candidates
            .into_iter()
            .flat_map(|p| {
                (a..=b).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let sub = 3;
    let proto = CubeDecomposition {
        edge,
        cubes: Vec::new(),
        scanned: candidates.len(),
        sub_grid: sub,
        note: format!("zero set detected on a {sub}^{m} sub-grid per cube; thinner intersections can be missed"),
    };
    let cubes: Vec<Vec<i64>> = candidates
        .into_par_iter()
        .filter(|j| {
            proto.sub_grid(j, sub).iter().any(|yhat| {
                rot.domain_tilde.slab(yhat, rho).is_some_and(|(lo, hi)| {
                    let f = |t: f64| {
                        let mut y = vec![t];
                        y.extend_from_slice(yhat);
                        rot.d_slow(&y)
                    };
                    f(lo) <= 0.0 && f(hi) >= 0.0
                })
            })
        })
        .collect();
    CubeDecomposition { cubes, ..proto }
}

/// Graph `eta(varpi, yhat)` on a uniform varpi grid and per-cube base grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceGraph {
    pub k: Vec<i64>,
    pub varpi0: f64,
    pub varpi_grid: Vec<f64>,
    pub base_grid: Vec<Vec<f64>>,
    /// `eta[b][v]`: column `b` holds one base point across the varpi grid.
    pub eta: Vec<Vec<f64>>,
    pub residuals: Vec<Vec<f64>>,
    pub tolerances: Vec<Vec<f64>>,
    pub cubes: CubeDecomposition,
    pub margins: GraphMargins,
}

/// Slack left by each invariant (positive means satisfied).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMargins {
    /// `min (tolerance - residual)`.
    pub residual: f64,
    pub max_residual: f64,
    /// `max over columns of max finite-difference d eta / d varpi`.
    pub max_eta_slope: f64,
    /// `1 / (gamma |k|^2)`.
    pub slope_bound: f64,
    pub min_eta_increment: f64,
    /// `(3/2) r̃_k - max distance of a graph point to the rotated domain`.
    pub inclusion: f64,
}

/// Relative slack in the finite-difference slope bound.
pub const SLOPE_SLACK: f64 = 1e-6;

pub fn build_graph(rot: &RotatedModel, n_varpi: usize, per_cube: usize) -> Result<ResonanceGraph> {
    if n_varpi < 2 || per_cube < 1 {
        return Err(Error::domain("need nvarpi >= 2 and percube >= 1"));
    }
    let cubes = cube_decomposition(rot);
    let v0 = rot.frame.varpi0_k;
    let varpi_grid: Vec<f64> = (0..n_varpi)
        .map(|i| -v0 + 2.0 * v0 * i as f64 / (n_varpi - 1) as f64)
        .collect();
    let base_grid: Vec<Vec<f64>> = cubes.cubes.iter().flat_map(|j| cubes.sub_grid(j, per_cube)).collect();
    let columns: Vec<Vec<Root>> = base_grid
        .par_iter()
        .map(|yhat| {
            let bracket = eta_bracket(rot, yhat);
            varpi_grid
                .iter()
                .map(|&w| solve_eta_in(rot, w, yhat, bracket))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let slope_bound = 1.0 / rot.slow_convexity();
    let rho = GRAPH_RADIUS * rot.frame.r_tilde_k;
    let mut margins = GraphMargins {
        residual: f64::INFINITY,
        max_residual: 0.0,
        max_eta_slope: 0.0,
        slope_bound,
        min_eta_increment: f64::INFINITY,
        inclusion: f64::INFINITY,
    };
    for (yhat, col) in base_grid.iter().zip(&columns) {
        for (i, r) in col.iter().enumerate() {
            margins.residual = margins.residual.min(r.tolerance - r.residual);
            margins.max_residual = margins.max_residual.max(r.residual);
            if r.residual > r.tolerance {
                return Err(Error::Invariant {
                    invariant: "graph residual <= solver tolerance".into(),
                    witness: format!("varpi = {}, yhat = {yhat:?}: {} > {}", varpi_grid[i], r.residual, r.tolerance),
                });
            }
            let mut y = vec![r.x];
            y.extend_from_slice(yhat);
            let d = rot.domain_tilde.distance(&y);
            margins.inclusion = margins.inclusion.min(rho - d);
            if d > rho * (1.0 + 1e-9) {
                return Err(Error::Invariant {
                    invariant: "graph inside the (3/2) r̃_k neighbourhood".into(),
                    witness: format!("ỹ = {y:?}: distance {d} > {rho}"),
                });
            }
        }
        for (i, w) in col.windows(2).enumerate() {
            let dv = varpi_grid[i + 1] - varpi_grid[i];
            let inc = w[1].x - w[0].x;
            margins.min_eta_increment = margins.min_eta_increment.min(inc);
            margins.max_eta_slope = margins.max_eta_slope.max(inc / dv);
            let noise = (w[0].residual + w[1].residual) * slope_bound;
            if inc < -noise || inc > dv * slope_bound * (1.0 + SLOPE_SLACK) + noise {
                return Err(Error::Invariant {
                    invariant: "0 <= d eta / d varpi <= 1/(gamma|k|^2)".into(),
                    witness: format!(
                        "yhat = {yhat:?}, varpi in [{}, {}]: increment {inc}, step {dv}",
                        varpi_grid[i],
                        varpi_grid[i + 1]
                    ),
                });
            }
        }
    }
    let eta = columns.iter().map(|c| c.iter().map(|r| r.x).collect()).collect();
    let residuals = columns.iter().map(|c| c.iter().map(|r| r.residual).collect()).collect();
    let tolerances = columns.iter().map(|c| c.iter().map(|r| r.tolerance).collect()).collect();
    Ok(ResonanceGraph {
        k: rot.k().entries().to_vec(),
        varpi0: v0,
        varpi_grid,
        base_grid,
        eta,
        residuals,
        tolerances,
        cubes,
        margins,
    })
}
