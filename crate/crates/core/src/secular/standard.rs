use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::average::fast_angle_average;
use super::potential::TrigPotential;
use crate::error::{Error, Result};
use crate::resgraph::{cube_decomposition, solve_eta, RotatedModel};

/// `m_k = ½ d2_slow(eta(0, yhat0), yhat0)`.
pub fn curvature_at(rot: &RotatedModel, yhat0: &[f64]) -> Result<f64> {
    let eta = solve_eta(rot, 0.0, yhat0)?.x;
    let mut y = vec![eta];
    y.extend_from_slice(yhat0);
    Ok(0.5 * rot.d2_slow(&y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub theta: f64,
    pub value: f64,
    pub kind: CriticalKind,
}

/// Energies of the leading pendulum `m_k p^2 + eps f1(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendulumEnergies {
    /// `eps min f1`: the elliptic equilibrium level.
    pub min: f64,
    /// `eps max f1`.
    pub max: f64,
    /// Hyperbolic level, at the maximiser of `f1`.
    pub separatrix: f64,
    /// The same three levels divided by `m_k` (the `eps G0` normalisation).
    pub rescaled_min: f64,
    pub rescaled_max: f64,
    pub rescaled_separatrix: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardFormData {
    pub k: Vec<i64>,
    pub yhat0: Vec<f64>,
    pub eps: f64,
    /// `j -> f_{jk}`.
    pub f1: BTreeMap<i64, Complex64>,
    pub m_k: f64,
    /// `f1 / m_k`.
    pub g0: BTreeMap<i64, Complex64>,
    pub real: bool,
    pub degenerate: bool,
    pub critical_points: Vec<CriticalPoint>,
    pub pendulum_energies: Option<PendulumEnergies>,
    pub notes: Vec<String>,
    /// Higher-order terms of the normal form are not evaluated.
    pub remainders: BTreeMap<String, String>,
}

/// Samples per unit of the highest harmonic in the critical-point scan.
const SCAN_DENSITY: usize = 64;

/// First-order secular data at `yhat0` (the centroid of the base cubes when
/// `None`): fast-angle average, curvature, normalised potential `G0`, its
/// critical points and the pendulum levels.
pub fn standard_form(
    rot: &RotatedModel,
    f: &TrigPotential,
    yhat0: Option<&[f64]>,
    eps: f64,
) -> Result<StandardFormData> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Parameter(format!("0 <= eps <= 1 (eps = {eps})")));
    }
    if f.dim != rot.dim() {
        return Err(Error::domain(format!("potential has n = {}, model has n = {}", f.dim, rot.dim())));
    }
    let mut notes = Vec::new();
    let yhat0 = match yhat0 {
        Some(y) => y.to_vec(),
        None => default_base_point(rot, &mut notes)?,
    };
    let m_k = curvature_at(rot, &yhat0)?;
    let floor = 0.5 * rot.slow_convexity();
    if m_k < floor * (1.0 - 1e-9) {
        return Err(Error::Invariant {
            invariant: "m_k >= gamma|k|^2 / 2".into(),
            witness: format!("yhat0 = {yhat0:?}: m_k = {m_k} < {floor}"),
        });
    }
    let f1 = fast_angle_average(f, &rot.frame);
    let g0: BTreeMap<i64, Complex64> = f1.iter().map(|(&j, &c)| (j, c / m_k)).collect();
    let real = f.is_real();
    let degenerate = !f1.iter().any(|(&j, c)| j != 0 && c.norm() > 0.0);
    let mut critical_points = Vec::new();
    let mut pendulum_energies = None;
    if degenerate {
        notes.push("no mode of f is a non-zero multiple of k: the averaged potential is constant, no pendulum structure".into());
    } else if !real {
        notes.push("potential is not real: critical points and pendulum levels are not defined".into());
    } else {
        critical_points = critical_points_of(&g0);
        let (gmin, gmax) = critical_points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| {
            (a.min(c.value), b.max(c.value))
        });
        let (fmin, fmax) = (gmin * m_k, gmax * m_k);
        pendulum_energies = Some(PendulumEnergies {
            min: eps * fmin,
            max: eps * fmax,
            separatrix: eps * fmax,
            rescaled_min: eps * gmin,
            rescaled_max: eps * gmax,
            rescaled_separatrix: eps * gmax,
        });
    }
    let remainders = ["nu(p, q1)", "G(p, q)", "O(|p_hat - p_hat0|)", "O(|p1|)"]
        .iter()
        .map(|s| (s.to_string(), "not computed".to_string()))
        .collect();
    Ok(StandardFormData {
        k: rot.k().entries().to_vec(),
        yhat0,
        eps,
        f1,
        m_k,
        g0,
        real,
        degenerate,
        critical_points,
        pendulum_energies,
        notes,
        remainders,
    })
}

/// Centroid of the base cubes; when the graph does not pass over it, the
/// centre of the cube closest to the centroid.
fn default_base_point(rot: &RotatedModel, notes: &mut Vec<String>) -> Result<Vec<f64>> {
    let cubes = cube_decomposition(rot);
    let m = rot.dim() - 1;
    if cubes.cubes.is_empty() {
        return Err(Error::domain("no base cube meets the zero set; pass yhat0 explicitly"));
    }
    let c = cubes.centroid(m);
    if solve_eta(rot, 0.0, &c).is_ok() {
        return Ok(c);
    }
    let dist = |j: &Vec<i64>| {
        j.iter()
            .zip(&c)
            .map(|(&ji, ci)| ((ji as f64 + 0.5) * cubes.edge - ci).powi(2))
            .sum::<f64>()
    };
    let nearest = cubes
        .cubes
        .iter()
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .expect("non-empty");
    let p: Vec<f64> = nearest.iter().map(|&ji| (ji as f64 + 0.5) * cubes.edge).collect();
    notes.push(format!("centroid {c:?} is not over the graph; using the centre {p:?} of the nearest cube"));
    Ok(p)
}

fn series(g: &BTreeMap<i64, Complex64>, theta: f64, order: u32) -> f64 {
    g.iter()
        .map(|(&j, c)| {
            let w = Complex64::new(0.0, j as f64).powu(order);
            (w * c * Complex64::from_polar(1.0, j as f64 * theta)).re
        })
        .sum()
}

/// Critical points of a real trigonometric polynomial on `[0, 2π)`: sign changes
/// of the derivative on a dense grid, refined by bisection.
pub fn critical_points_of(g: &BTreeMap<i64, Complex64>) -> Vec<CriticalPoint> {
    let deg = g.keys().map(|j| j.unsigned_abs()).max().unwrap_or(0).max(1) as usize;
    let samples = SCAN_DENSITY * deg;
    let h = 2.0 * PI / samples as f64;
    let d = |t: f64| series(g, t, 1);
    let mut out = Vec::new();
    for i in 0..samples {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let (da, db) = (d(a), d(b));
        if da == 0.0 {
            out.push(classify(g, a));
            continue;
        }
        if da * db < 0.0 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if d(mid) * da > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(classify(g, 0.5 * (lo + hi)));
        }
    }
    out
}

fn classify(g: &BTreeMap<i64, Complex64>, theta: f64) -> CriticalPoint {
    let curv = series(g, theta, 2);
    CriticalPoint {
        theta,
        value: series(g, theta, 0),
        kind: if curv > 0.0 { CriticalKind::Min } else { CriticalKind::Max },
    }
}
