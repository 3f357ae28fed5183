use serde::{Deserialize, Serialize};

use super::rotated::RotatedModel;
use crate::error::{Error, Result};

/// Points per axis of the deterministic sampling grids.
pub const DEFAULT_GRID: usize = 41;
const ITERATIONS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateCheck {
    pub sup: f64,
    pub bound: f64,
    /// `bound - sup`.
    pub margin: f64,
    pub pass: bool,
    pub witness: Vec<f64>,
}

impl EstimateCheck {
    fn new(bound: f64) -> Self {
        Self {
            sup: 0.0,
            bound,
            margin: bound,
            pass: true,
            witness: Vec::new(),
        }
    }

    fn record(&mut self, value: f64, at: &[f64]) {
        if value > self.sup || self.witness.is_empty() {
            self.sup = value.max(self.sup);
            self.witness = at.to_vec();
        }
        self.margin = self.bound - self.sup;
        self.pass = self.margin >= 0.0;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub y0: Vec<f64>,
    pub r_hat_k: f64,
    pub r1: f64,
    /// `sup |d_slow(ỹ1⁰, yhat)|` over the `r_hat_k`-ball vs `½ gamma |k|^2 r1`.
    pub slow_drift: EstimateCheck,
    /// `sup |d2_slow(ỹ) - d2_slow(y0)|` over the product ball vs `½ gamma |k|^2`.
    pub curvature_drift: EstimateCheck,
    /// `max` ratio of successive steps of `eta <- eta - d_slow/d`.
    pub contraction_factor: f64,
    pub max_iterations: usize,
    pub points: usize,
}

/// Real contraction estimates around a graph point `y0 = (eta(0, yhat0), yhat0)`,
/// on deterministic grids of `grid` points per axis, plus the Newton-like
/// fixed-point iteration with frozen derivative `d2_slow(y0)`.
pub fn contraction_certificate(rot: &RotatedModel, y0: &[f64], grid: usize) -> Result<ContractionCertificate> {
    let n = rot.dim();
    if y0.len() != n {
        return Err(Error::domain(format!("y0 has {} entries, expected {n}", y0.len())));
    }
    let res = rot.d_slow(y0);
    if res.abs() > 1e-10 {
        return Err(Error::domain(format!("y0 = {y0:?} is not on the zero graph: d_slow = {res}")));
    }
    let grid = grid.max(2);
    let f = &rot.frame;
    let conv = rot.slow_convexity();
    let d = rot.d2_slow(y0);
    let y1 = y0[0];
    let hat0 = &y0[1..];
    let ball = ball_grid(hat0, f.r_hat_k, grid);
    let line: Vec<f64> = (0..grid)
        .map(|i| y1 - f.r1 + 2.0 * f.r1 * i as f64 / (grid - 1) as f64)
        .collect();

    let mut drift = EstimateCheck::new(0.5 * conv * f.r1);
    let mut curv = EstimateCheck::new(0.5 * conv);
    let mut factor: f64 = 0.0;
    let mut max_iter = 0;
    for yhat in &ball {
        let at = |t: f64| {
            let mut y = vec![t];
            y.extend_from_slice(yhat);
            y
        };
        let p = at(y1);
        drift.record(rot.d_slow(&p).abs(), &p);
        for &t in &line {
            let q = at(t);
            curv.record((rot.d2_slow(&q) - d).abs(), &q);
        }
        let mut eta = y1;
        let mut prev_step = f64::NAN;
        let floor = 1e-14 * (1.0 + y1.abs());
        for it in 1..=ITERATIONS {
            let step = rot.d_slow(&at(eta)) / d;
            eta -= step;
            let s = step.abs();
            if prev_step.is_finite() && prev_step > floor {
                factor = factor.max(s / prev_step);
            }
            max_iter = max_iter.max(it);
            if s <= floor {
                break;
            }
            prev_step = s;
        }
    }
    Ok(ContractionCertificate {
        y0: y0.to_vec(),
        r_hat_k: f.r_hat_k,
        r1: f.r1,
        slow_drift: drift,
        curvature_drift: curv,
        contraction_factor: factor,
        max_iterations: max_iter,
        points: ball.len(),
    })
}

/// Points of the regular grid on `[-1,1]^m` (spacing `2/(grid-1)`) inside the
/// unit ball, scaled to `center + radius * u`.
pub(crate) fn ball_grid(center: &[f64], radius: f64, grid: usize) -> Vec<Vec<f64>> {
    let m = center.len();
    let total = grid.pow(m as u32);
    (0..total)
        .filter_map(|mut c| {
            let u: Vec<f64> = (0..m)
                .map(|_| {
                    let i = c % grid;
                    c /= grid;
                    -1.0 + 2.0 * i as f64 / (grid - 1) as f64
                })
                .collect();
            (u.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12)
                .then(|| center.iter().zip(&u).map(|(c, v)| c + radius * v).collect())
        })
        .collect()
}
