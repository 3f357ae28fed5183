use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{enumerate_generators, NormSelector, ResonanceVector};
use crate::model::{ConvexModel, CoveringParams};

/// Generator sets above this size trigger a cutoff warning.
pub const GENERATOR_WARN_LIMIT: usize = 1_000_000;

/// Relative tolerance under which a value counts as sitting on a threshold;
/// such points satisfy the non-strict inequality.
pub const THRESHOLD_TOL: f64 = 1e-12;

pub(crate) fn at_least(value: f64, threshold: f64) -> bool {
    value >= threshold - THRESHOLD_TOL * threshold.abs()
}

pub(crate) fn at_most(value: f64, threshold: f64) -> bool {
    value <= threshold + THRESHOLD_TOL * threshold.abs()
}

/// Zone membership of one action point. Zones may overlap; `in_r2` is the
/// complement of the other two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneLabel {
    pub in_r0: bool,
    pub simple_resonances: Vec<ResonanceVector>,
    pub in_r2: bool,
}

impl ZoneLabel {
    pub fn in_r1(&self) -> bool {
        !self.simple_resonances.is_empty()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Generator {
    pub k: ResonanceVector,
    pub kf: Vec<f64>,
    pub norm: f64,
    pub norm_sq: f64,
}

impl Generator {
    fn new(k: ResonanceVector) -> Self {
        Self {
            kf: k.as_f64(),
            norm: k.norm2(),
            norm_sq: k.norm2_sq(),
            k,
        }
    }
}

/// Covering classifier with the generator sets for `K0` and `K` enumerated once.
#[derive(Debug, Clone)]
pub struct Classifier<'m> {
    pub(crate) model: &'m ConvexModel,
    pub(crate) params: CoveringParams,
    pub(crate) low: Vec<Generator>,
    pub(crate) high: Vec<Generator>,
    pub warnings: Vec<String>,
}

impl<'m> Classifier<'m> {
    pub fn new(model: &'m ConvexModel, params: &CoveringParams) -> Result<Self> {
        let n = model.dim();
        if params.n != n {
            return Err(Error::domain(format!("params are for n = {}, model has n = {n}", params.n)));
        }
        // |omega·jk| >= |omega·k| for j >= 1, so the R0 test over all 0 < |k|_1 <= K0
        // reduces to the generators
        let low: Vec<_> = enumerate_generators(n, params.k0_cut, &NormSelector::OneNorm)?
            .into_iter()
            .map(Generator::new)
            .collect();
        let high: Vec<_> = enumerate_generators(n, params.k_cut, &NormSelector::OneNorm)?
            .into_iter()
            .map(Generator::new)
            .collect();
        let mut warnings = Vec::new();
        if high.len() > GENERATOR_WARN_LIMIT {
            warnings.push(format!(
                "generator set for K = {} has {} elements (> {GENERATOR_WARN_LIMIT}); classification is slow",
                params.k_cut,
                high.len()
            ));
        }
        Ok(Self {
            model,
            params: *params,
            low,
            high,
            warnings,
        })
    }

    pub fn params(&self) -> &CoveringParams {
        &self.params
    }

    pub fn low_generators(&self) -> impl Iterator<Item = &ResonanceVector> {
        self.low.iter().map(|g| &g.k)
    }

    pub fn high_generator_count(&self) -> usize {
        self.high.len()
    }

    /// Classifies `y`, which must lie in the domain.
    pub fn classify(&self, y: &[f64]) -> Result<ZoneLabel> {
        if y.len() != self.model.dim() {
            return Err(Error::domain(format!("y has {} entries, expected {}", y.len(), self.model.dim())));
        }
        if self.model.domain.distance(y) > 1e-12 {
            return Err(Error::domain(format!("y = {y:?} lies outside the domain")));
        }
        Ok(self.classify_unchecked(y))
    }

    pub(crate) fn classify_unchecked(&self, y: &[f64]) -> ZoneLabel {
        let omega = self.model.omega(y);
        let r0_thr = self.params.nonresonance_threshold();
        let r1_thr = self.params.resonance_width();
        let mut in_r0 = true;
        let mut simple = Vec::new();
        for g in &self.low {
            let wk = dot(&omega, &g.kf);
            if !at_least(wk.abs(), r0_thr) {
                in_r0 = false;
            }
            if at_most(wk.abs(), r1_thr) && self.passes_ell_test(&omega, wk, g) {
                simple.push(g.k.clone());
            }
        }
        let in_r2 = !in_r0 && simple.is_empty();
        ZoneLabel {
            in_r0,
            simple_resonances: simple,
            in_r2,
        }
    }

    /// `|π⊥_k omega · l| >= 3 alpha K^(n+3) / |k|` for every `l` in `G_K \ Zk`.
    fn passes_ell_test(&self, omega: &[f64], wk: f64, g: &Generator) -> bool {
        let thr = 3.0 * self.params.alpha_k_power() / g.norm;
        let scale = wk / g.norm_sq;
        self.high.iter().all(|l| {
            if g.k.is_parallel_to(l.k.entries()) {
                return true;
            }
            let proj = dot(omega, &l.kf) - scale * dot(&g.kf, &l.kf);
            at_least(proj.abs(), thr)
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One-shot classification.
pub fn classify(model: &ConvexModel, params: &CoveringParams, y: &[f64]) -> Result<ZoneLabel> {
    Classifier::new(model, params)?.classify(y)
}
