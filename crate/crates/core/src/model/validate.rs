//! Sampling-based spot checks of the declared model constants.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::convex::ConvexModel;
use crate::rng::{chunks, substream};

pub const DEFAULT_SAMPLES: usize = 4096;

/// Relative slack before a declared constant counts as violated.
const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantViolation {
    pub constant: String,
    pub declared: f64,
    pub observed: f64,
    pub witness: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_pair: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub seed: u64,
    pub min_hessian_eigenvalue: f64,
    pub max_hessian_eigenvalue: f64,
    pub max_hessian_asymmetry: f64,
    pub min_lipschitz_ratio: f64,
    pub max_lipschitz_ratio: f64,
    pub sup_frequency: f64,
    pub violations: Vec<ConstantViolation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone)]
struct Extreme {
    value: f64,
    at: Vec<f64>,
    pair: Option<Vec<f64>>,
}

impl Extreme {
    fn new(value: f64) -> Self {
        Self {
            value,
            at: Vec::new(),
            pair: None,
        }
    }
}

#[derive(Debug, Clone)]
struct Partial {
    min_eig: Extreme,
    max_eig: Extreme,
    asym: f64,
    min_ratio: Extreme,
    max_ratio: Extreme,
    sup_omega: Extreme,
}

impl Partial {
    fn empty() -> Self {
        Self {
            min_eig: Extreme::new(f64::INFINITY),
            max_eig: Extreme::new(f64::NEG_INFINITY),
            asym: 0.0,
            min_ratio: Extreme::new(f64::INFINITY),
            max_ratio: Extreme::new(f64::NEG_INFINITY),
            sup_omega: Extreme::new(0.0),
        }
    }

    // keeps the earlier witness on ties, so merging in chunk order is deterministic
    fn merge(mut self, o: Partial) -> Self {
        if o.min_eig.value < self.min_eig.value {
            self.min_eig = o.min_eig;
        }
        if o.max_eig.value > self.max_eig.value {
            self.max_eig = o.max_eig;
        }
        self.asym = self.asym.max(o.asym);
        if o.min_ratio.value < self.min_ratio.value {
            self.min_ratio = o.min_ratio;
        }
        if o.max_ratio.value > self.max_ratio.value {
            self.max_ratio = o.max_ratio;
        }
        if o.sup_omega.value > self.sup_omega.value {
            self.sup_omega = o.sup_omega;
        }
        self
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Empirical Hessian eigenvalue range, Lipschitz ratios and `sup |omega|` over
/// uniform samples of the real `2r`-neighborhood of the domain; each declared
/// constant contradicted by a sample is reported with its witness.
///
/// Half the Lipschitz pairs are independent, half are close pairs (offset of
/// order `1e-3 r`) so that local extremes of the ratio are probed too.
pub fn validate_constants(model: &ConvexModel, samples: usize, seed: u64) -> ValidationReport {
    let samples = samples.max(1);
    let rho = 2.0 * model.r;
    let n = model.dim();
    let partial = chunks(samples)
        .into_par_iter()
        .map(|(idx, len)| {
            let mut rng = substream(seed, "validate", idx);
            let mut p = Partial::empty();
            for i in 0..len {
                let y = model.domain.sample_neighborhood(&mut rng, rho);
                let hess = model.hessian(&y);
                let asym = (&hess - hess.transpose()).abs().max();
                p.asym = p.asym.max(asym);
                let sym = (&hess + hess.transpose()) * 0.5;
                let eig = sym.symmetric_eigenvalues();
                if eig.min() < p.min_eig.value {
                    p.min_eig = Extreme { value: eig.min(), at: y.clone(), pair: None };
                }
                if eig.max() > p.max_eig.value {
                    p.max_eig = Extreme { value: eig.max(), at: y.clone(), pair: None };
                }
                let w = model.omega(&y);
                let wn = norm(&w);
                if wn > p.sup_omega.value {
                    p.sup_omega = Extreme { value: wn, at: y.clone(), pair: None };
                }
                let y0 = if i % 2 == 1 {
                    let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let near: Vec<f64> = y.iter().zip(&dir).map(|(a, d)| a + 1e-3 * model.r * d).collect();
                    if model.domain.distance(&near) <= rho {
                        near
                    } else {
                        model.domain.sample_neighborhood(&mut rng, rho)
                    }
                } else {
                    model.domain.sample_neighborhood(&mut rng, rho)
                };
                let dy: Vec<f64> = y.iter().zip(&y0).map(|(a, b)| a - b).collect();
                let dist = norm(&dy);
                if dist > 0.0 {
                    let dw: Vec<f64> = w.iter().zip(model.omega(&y0)).map(|(a, b)| a - b).collect();
                    let ratio = norm(&dw) / dist;
                    if ratio < p.min_ratio.value {
                        p.min_ratio = Extreme { value: ratio, at: y.clone(), pair: Some(y0.clone()) };
                    }
                    if ratio > p.max_ratio.value {
                        p.max_ratio = Extreme { value: ratio, at: y.clone(), pair: Some(y0) };
                    }
                }
            }
            p
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Partial::empty(), Partial::merge);

    let c = &model.constants;
    let mut violations = Vec::new();
    let mut flag = |name: &str, declared: f64, e: &Extreme, bad: bool| {
        if bad {
            violations.push(ConstantViolation {
                constant: name.into(),
                declared,
                observed: e.value,
                witness: e.at.clone(),
                witness_pair: e.pair.clone(),
            });
        }
    };
    flag(
        "convexity",
        0.0,
        &partial.min_eig,
        partial.min_eig.value <= 0.0,
    );
    flag(
        "gamma",
        c.gamma,
        &partial.min_eig,
        partial.min_eig.value < c.gamma * (1.0 - SLACK),
    );
    flag(
        "L",
        c.lip,
        &partial.max_eig,
        partial.max_eig.value > c.lip * (1.0 + SLACK),
    );
    flag(
        "L",
        c.lip,
        &partial.max_ratio,
        partial.max_ratio.value > c.lip * (1.0 + SLACK),
    );
    flag(
        "Lbar",
        c.lip_inv_bar,
        &partial.min_ratio,
        partial.min_ratio.value < (1.0 - SLACK) / c.lip_inv_bar,
    );
    flag(
        "M",
        c.sup_omega,
        &partial.sup_omega,
        partial.sup_omega.value > c.sup_omega * (1.0 + SLACK),
    );

    ValidationReport {
        samples,
        seed,
        min_hessian_eigenvalue: partial.min_eig.value,
        max_hessian_eigenvalue: partial.max_eig.value,
        max_hessian_asymmetry: partial.asym,
        min_lipschitz_ratio: partial.min_ratio.value,
        max_lipschitz_ratio: partial.max_ratio.value,
        sup_frequency: partial.sup_omega.value,
        violations,
    }
}
