use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::{bound_with, PairTerm};
use super::classify::Classifier;
use crate::error::Result;
use crate::model::{ConvexModel, CoveringParams};
use crate::rng::{chunks, substream};

/// Monte Carlo zone fractions over the domain with binomial standard errors,
/// together with the explicit residual-zone bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    /// Keys: `R0`, `R1`, `R2`, `R0&R1`, and `R1k:<k>` per simple resonance.
    pub fractions: BTreeMap<String, f64>,
    pub stderr: BTreeMap<String, f64>,
    pub samples: usize,
    pub seed: u64,
    pub domain_volume: f64,
    /// `fraction(R2) * meas(B)`.
    pub r2_measure: f64,
    pub r2_measure_stderr: f64,
    pub analytic_r2_bound: f64,
    pub per_pair_terms: Vec<PairTerm>,
    pub warnings: Vec<String>,
}

impl MeasureReport {
    pub fn fraction(&self, zone: &str) -> f64 {
        self.fractions.get(zone).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Default)]
struct Counts {
    r0: u64,
    r1: u64,
    r2: u64,
    both: u64,
    per_k: Vec<u64>,
}

impl Counts {
    fn add(mut self, o: Counts) -> Self {
        self.r0 += o.r0;
        self.r1 += o.r1;
        self.r2 += o.r2;
        self.both += o.both;
        if self.per_k.len() < o.per_k.len() {
            self.per_k.resize(o.per_k.len(), 0);
        }
        for (a, b) in self.per_k.iter_mut().zip(o.per_k) {
            *a += b;
        }
        self
    }
}

/// Uniform i.i.d. points over the domain, classified in fixed-size chunks with
/// one substream per chunk; integer counts make the merge order-independent.
pub fn estimate_measures(
    model: &ConvexModel,
    params: &CoveringParams,
    samples: usize,
    seed: u64,
) -> Result<MeasureReport> {
    let cl = Classifier::new(model, params)?;
    let samples = samples.max(1);
    let nk = cl.low.len();
    let counts = chunks(samples)
        .into_par_iter()
        .map(|(idx, len)| {
            let mut rng = substream(seed, "measure", idx);
            let mut c = Counts {
                per_k: vec![0; nk],
                ..Default::default()
            };
            for _ in 0..len {
                let y = model.domain.sample(&mut rng);
                let label = cl.classify_unchecked(&y);
                c.r0 += label.in_r0 as u64;
                c.r1 += label.in_r1() as u64;
                c.r2 += label.in_r2 as u64;
                c.both += (label.in_r0 && label.in_r1()) as u64;
                for k in &label.simple_resonances {
                    if let Some(i) = cl.low.iter().position(|g| &g.k == k) {
                        c.per_k[i] += 1;
                    }
                }
            }
            c
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Counts::default(), Counts::add);

    let total = samples as f64;
    let se = |p: f64| (p * (1.0 - p) / total).sqrt();
    let mut fractions = BTreeMap::new();
    let mut stderr = BTreeMap::new();
    let mut put = |key: String, count: u64| {
        let p = count as f64 / total;
        fractions.insert(key.clone(), p);
        stderr.insert(key, se(p));
    };
    put("R0".into(), counts.r0);
    put("R1".into(), counts.r1);
    put("R2".into(), counts.r2);
    put("R0&R1".into(), counts.both);
    for (g, &c) in cl.low.iter().zip(&counts.per_k) {
        put(format!("R1k:{}", g.k), c);
    }
    let bound = bound_with(&cl);
    let vol = model.domain.volume();
    let p2 = counts.r2 as f64 / total;
    Ok(MeasureReport {
        fractions,
        stderr,
        samples,
        seed,
        domain_volume: vol,
        r2_measure: p2 * vol,
        r2_measure_stderr: se(p2) * vol,
        analytic_r2_bound: bound.total,
        per_pair_terms: bound.terms,
        warnings: cl.warnings.clone(),
    })
}
