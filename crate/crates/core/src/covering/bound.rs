use serde::{Deserialize, Serialize};

use super::classify::Classifier;
use crate::error::Result;
use crate::lattice::ResonanceVector;
use crate::model::{ConvexModel, CoveringParams};

/// Contribution of one pair `(k, l)` to the residual-zone bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub k: ResonanceVector,
    pub l: ResonanceVector,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct R2Bound {
    pub total: f64,
    pub terms: Vec<PairTerm>,
}

/// Explicit bound on the measure of the residual zone: each pair `(k, l)` with
/// `k` in `G_K0`, `l` in `G_K \ Zk` confines `omega` to a rectangle of sides
/// `2 alpha / |k|^2` and `6 alpha K^(n+3) |k|` times a cube of side `2M`, and the
/// frequency map pulls volumes back with factor `Lbar^n`:
///
/// `term(k, l) = Lbar^n 3 2^n M^(n-2) alpha^2 K^(n+3) / |k|`.
pub fn analytic_r2_bound(model: &ConvexModel, params: &CoveringParams) -> Result<R2Bound> {
    Ok(bound_with(&Classifier::new(model, params)?))
}

pub(crate) fn bound_with(cl: &Classifier<'_>) -> R2Bound {
    let n = cl.params.n as i32;
    let c = &cl.model.constants;
    let common = c.lip_inv_bar.powi(n)
        * 3.0
        * 2f64.powi(n)
        * c.sup_omega.powi(n - 2)
        * cl.params.alpha
        * cl.params.alpha_k_power();
    let mut terms = Vec::new();
    let mut total = 0.0;
    for g in &cl.low {
        let per = common / g.norm;
        for l in &cl.high {
            if g.k.is_parallel_to(l.k.entries()) {
                continue;
            }
            total += per;
            terms.push(PairTerm {
                k: g.k.clone(),
                l: l.k.clone(),
                bound: per,
            });
        }
    }
    R2Bound { total, terms }
}
