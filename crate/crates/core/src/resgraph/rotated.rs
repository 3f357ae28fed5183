use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::CubeDecomposition;
use super::tilted::TiltedDomain;
use crate::error::{Error, Result};
use crate::lattice::{unimodular_completion, ResonanceVector, UnimodularFrame};
use crate::model::ConvexModel;
use crate::rng::substream;

/// `h` in the coordinates `ỹ = A^{-T} y` adapted to a resonance `k`: the first
/// rotated action is conjugate to the slow angle `k·x`.
#[derive(Debug, Clone)]
pub struct RotatedModel {
    pub frame: UnimodularFrame,
    pub model: ConvexModel,
    pub domain_tilde: TiltedDomain,
    /// Operator 2-norm of `A`.
    pub a_norm: f64,
    pub(crate) cubes: OnceLock<CubeDecomposition>,
}

impl RotatedModel {
    pub fn new(model: &ConvexModel, frame: UnimodularFrame) -> Result<Self> {
        if frame.dim() != model.dim() {
            return Err(Error::domain(format!(
                "frame has n = {}, model has n = {}",
                frame.dim(),
                model.dim()
            )));
        }
        let domain_tilde = TiltedDomain::new(model.domain.clone(), &frame.a_inv)?;
        let a_norm = frame.a.to_f64().singular_values().max();
        Ok(Self {
            frame,
            model: model.clone(),
            domain_tilde,
            a_norm,
            cubes: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn k(&self) -> &ResonanceVector {
        &self.frame.k
    }

    /// `h(A^T ỹ)`.
    pub fn h0(&self, yt: &[f64]) -> f64 {
        self.model.energy(&self.frame.to_original(yt))
    }

    /// `∂_{ỹ1} h0 = ω(A^T ỹ)·k`.
    pub fn d_slow(&self, yt: &[f64]) -> f64 {
        self.frame.k.dot(&self.model.omega(&self.frame.to_original(yt)))
    }

    /// `∂²_{ỹ1} h0 = ∇²h(A^T ỹ) k·k`.
    pub fn d2_slow(&self, yt: &[f64]) -> f64 {
        self.model.curvature_along(&self.frame.to_original(yt), &self.frame.k.as_f64())
    }

    /// `∇h0(ỹ) = A ω(A^T ỹ)`.
    pub fn gradient(&self, yt: &[f64]) -> Vec<f64> {
        self.frame.push_gradient(&self.model.omega(&self.frame.to_original(yt)))
    }

    /// Lower bound `gamma |k|^2` on `d2_slow`.
    pub fn slow_convexity(&self) -> f64 {
        self.model.constants.gamma * self.frame.k.norm2_sq()
    }

    /// `L |k|`: the Lipschitz constant of `d_slow` as usually stated.
    pub fn stated_lipschitz(&self) -> f64 {
        self.model.constants.lip * self.frame.k.norm2()
    }

    /// `L |k| |A|`: the Lipschitz constant of `d_slow` that actually holds,
    /// since `∇ d_slow = A ∇²h k`.
    pub fn lipschitz(&self) -> f64 {
        self.stated_lipschitz() * self.a_norm
    }
}

/// Rotates `model` around `k` with the default certified completion.
pub fn build_rotated(model: &ConvexModel, k: &ResonanceVector) -> Result<RotatedModel> {
    let frame = unimodular_completion(k, &model.frame_constants())?;
    RotatedModel::new(model, frame)
}

/// Sampled checks of the rotated model's structural estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotatedInvariants {
    pub samples: usize,
    pub seed: u64,
    /// `max |Δ d_slow| / |Δỹ|` over sampled pairs.
    pub max_lipschitz_ratio: f64,
    pub stated_lipschitz: f64,
    /// Whether the sampled ratio stays below `L|k|` (informational).
    pub stated_lipschitz_holds: bool,
    pub lipschitz_bound: f64,
    /// `min (d_slow(ỹ1) - d_slow(ỹ1')) / (ỹ1 - ỹ1')` along sampled lines.
    pub min_slow_slope: f64,
    pub min_d2_slow: f64,
    pub slow_convexity: f64,
}

const REL_SLACK: f64 = 1e-9;

/// Samples pairs in the real `r̃_k`-neighbourhood of the rotated domain and
/// checks the Lipschitz bound `L|k||A|`, slow monotonicity with slope
/// `gamma |k|^2`, and `d2_slow >= gamma |k|^2`. The first violation is an error.
pub fn check_rotated_invariants(rot: &RotatedModel, samples: usize, seed: u64) -> Result<RotatedInvariants> {
    let rho = rot.frame.r_tilde_k;
    let mut rng = substream(seed, "rotated", 0);
    let n = rot.dim();
    let ranges: Vec<(f64, f64)> = (0..n).map(|i| rot.domain_tilde.coordinate_range(i, rho)).collect();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let y: Vec<f64> = ranges.iter().map(|&(a, b)| rng.gen_range(a..b)).collect();
        if rot.domain_tilde.in_neighborhood(&y, rho) {
            return y;
        }
    };
    let conv = rot.slow_convexity();
    let bound = rot.lipschitz();
    let mut out = RotatedInvariants {
        samples,
        seed,
        max_lipschitz_ratio: 0.0,
        stated_lipschitz: rot.stated_lipschitz(),
        stated_lipschitz_holds: true,
        lipschitz_bound: bound,
        min_slow_slope: f64::INFINITY,
        min_d2_slow: f64::INFINITY,
        slow_convexity: conv,
    };
    for _ in 0..samples {
        let y = draw(&mut rng);
        let z = draw(&mut rng);
        let dist = y.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let dy = rot.d_slow(&y);
        if dist > 0.0 {
            let ratio = (dy - rot.d_slow(&z)).abs() / dist;
            out.max_lipschitz_ratio = out.max_lipschitz_ratio.max(ratio);
            if ratio > bound * (1.0 + REL_SLACK) {
                return Err(invariant("d_slow Lipschitz bound L|k||A|", &y, &z, ratio, bound));
            }
        }
        // move along ỹ1 only, staying in the neighbourhood
        let mut w = y.clone();
        w[0] = z[0];
        if w[0] != y[0] && rot.domain_tilde.in_neighborhood(&w, rho) {
            let slope = (rot.d_slow(&w) - dy) / (w[0] - y[0]);
            out.min_slow_slope = out.min_slow_slope.min(slope);
            if slope < conv * (1.0 - REL_SLACK) {
                return Err(invariant("slow monotonicity gamma|k|^2", &y, &w, slope, conv));
            }
        }
        let d2 = rot.d2_slow(&y);
        out.min_d2_slow = out.min_d2_slow.min(d2);
        if d2 < conv * (1.0 - REL_SLACK) {
            return Err(Error::Invariant {
                invariant: "d2_slow >= gamma|k|^2".into(),
                witness: format!("ỹ = {y:?}: {d2} < {conv}"),
            });
        }
    }
    out.stated_lipschitz_holds = out.max_lipschitz_ratio <= out.stated_lipschitz * (1.0 + REL_SLACK);
    Ok(out)
}

fn invariant(name: &str, y: &[f64], z: &[f64], value: f64, bound: f64) -> Error {
    Error::Invariant {
        invariant: name.into(),
        witness: format!("ỹ = {y:?}, ỹ' = {z:?}: {value} vs {bound}"),
    }
}
