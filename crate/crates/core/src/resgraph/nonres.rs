use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::{cube_decomposition, eta_bracket, solve_eta_in};
use super::rotated::RotatedModel;
use crate::error::{Error, Result};
use crate::lattice::{enumerate_generators, NormSelector, ResonanceVector};
use crate::model::CoveringParams;
use crate::rng::{chunks, substream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonresSample {
    pub y_tilde: Vec<f64>,
    /// `min |A ω(A^T ỹ)·l|` over `l` in `G_K \ Z e1`.
    pub min_value: f64,
    pub argmin: ResonanceVector,
    /// `min_value - threshold`.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonresReport {
    pub k: ResonanceVector,
    pub samples: usize,
    pub seed: u64,
    /// `2 alpha K^(n+3) / |k|`.
    pub threshold: f64,
    /// `alpha / C`.
    pub half_width: f64,
    pub cubes: usize,
    pub pass_fraction: f64,
    pub worst_margin: f64,
    pub worst: Option<NonresSample>,
    pub records: Vec<NonresSample>,
}

/// Samples the normal set around the resonance (base uniform over the cubes,
/// `ỹ1` uniform between the graphs at `∓ alpha/C`) and tests non-resonance
/// modulo `Z e1` against `2 alpha K^(n+3)/|k|` by exhausting `G_K`.
pub fn check_nonresonance(rot: &RotatedModel, params: &CoveringParams, samples: usize, seed: u64) -> Result<NonresReport> {
    let half = params.resonance_width();
    let v0 = rot.frame.varpi0_k;
    if half > v0 {
        return Err(Error::Parameter(format!("alpha/C <= varpi0 (alpha/C = {half}, varpi0 = {v0})")));
    }
    if params.n != rot.dim() {
        return Err(Error::domain("params and frame dimensions differ"));
    }
    let k = rot.k().clone();
    let threshold = 2.0 * params.alpha_k_power() / k.norm2();
    let ells: Vec<(ResonanceVector, Vec<f64>)> = enumerate_generators(rot.dim(), params.k_cut, &NormSelector::OneNorm)?
        .into_iter()
        .filter(|l| !l.is_parallel_to(ResonanceVector::unit(rot.dim(), 0).entries()))
        .map(|l| {
            let f = l.as_f64();
            (l, f)
        })
        .collect();
    let cubes = cube_decomposition(rot);
    let mut report = NonresReport {
        k,
        samples,
        seed,
        threshold,
        half_width: half,
        cubes: cubes.cubes.len(),
        pass_fraction: 1.0,
        worst_margin: f64::INFINITY,
        worst: None,
        records: Vec::new(),
    };
    if cubes.cubes.is_empty() || samples == 0 || ells.is_empty() {
        return Ok(report);
    }
    let records: Vec<NonresSample> = chunks(samples)
        .into_par_iter()
        .map(|(idx, len)| -> Result<Vec<NonresSample>> {
            let mut rng = substream(seed, "nonres", idx);
            (0..len)
                .map(|_| {
                    let j = &cubes.cubes[rng.gen_range(0..cubes.cubes.len())];
                    let yhat: Vec<f64> = j.iter().map(|&ji| cubes.edge * (ji as f64 + rng.gen::<f64>())).collect();
                    let bracket = eta_bracket(rot, &yhat);
                    let lo = solve_eta_in(rot, -half, &yhat, bracket)?.x;
                    let hi = solve_eta_in(rot, half, &yhat, bracket)?.x;
                    let t = lo + (hi - lo) * rng.gen::<f64>();
                    let mut y = vec![t];
                    y.extend_from_slice(&yhat);
                    Ok(evaluate(rot, &ells, threshold, y))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let passed = records.iter().filter(|r| r.pass).count();
    report.pass_fraction = passed as f64 / records.len() as f64;
    let worst = records
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .cloned();
    report.worst_margin = worst.as_ref().map_or(f64::INFINITY, |w| w.margin);
    report.worst = worst;
    report.records = records;
    Ok(report)
}

fn evaluate(rot: &RotatedModel, ells: &[(ResonanceVector, Vec<f64>)], threshold: f64, y: Vec<f64>) -> NonresSample {
    let g = rot.gradient(&y);
    let (mut best, mut arg) = (f64::INFINITY, 0);
    for (i, (_, lf)) in ells.iter().enumerate() {
        let v = g.iter().zip(lf).map(|(a, b)| a * b).sum::<f64>().abs();
        if v < best {
            best = v;
            arg = i;
        }
    }
    NonresSample {
        y_tilde: y,
        min_value: best,
        argmin: ells[arg].0.clone(),
        margin: best - threshold,
        pass: best >= threshold,
    }
}
