use serde::{Deserialize, Serialize};

use super::completion::{certify_bounds, CompletionRegistry};
use super::intmat::IntMatrix;
use super::vector::ResonanceVector;
use crate::error::{Error, Result};

/// Model constants a frame needs: convexity `gamma`, Lipschitz constant `lip`
/// of the frequency map, action analyticity radius `r`, and optionally the
/// radius `r_tilde` used for the contraction ball (defaults to `r / (n |k|_inf)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameConstants {
    pub gamma: f64,
    pub lip: f64,
    pub r: f64,
    pub r_tilde: Option<f64>,
}

/// Unimodular matrix with first row `k`, its exact inverse, and the radii of
/// the rotated model around the resonance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnimodularFrame {
    pub k: ResonanceVector,
    pub a: IntMatrix,
    pub a_inv: IntMatrix,
    /// `r / (n |k|_inf)`: analyticity radius of the rotated model.
    pub r_tilde_k: f64,
    /// `gamma |k| / (2 L)`.
    pub t_k: f64,
    /// `min(1, t_k)`.
    pub t_tilde_k: f64,
    /// Edge of the base cubes, `t̃_k r / (8 n^(3/2) |k|)`.
    pub frak_r_k: f64,
    /// Half-bracket around a known zero, `2 sqrt(n) L frak_r_k / (gamma |k|)`.
    pub frak_r_tilde_k: f64,
    /// Half-width of the graph's varpi range, `sqrt(n) L |k| frak_r_k`.
    pub varpi0_k: f64,
    /// Radius actually used in the contraction ball (`<= r_tilde_k`).
    pub r_tilde: f64,
    /// `t̃_k^2 r_tilde / (2^9 n)`.
    pub r_hat_k: f64,
    /// `r_hat_k / t_k`.
    pub r1: f64,
}

impl UnimodularFrame {
    /// Certifies a caller-supplied matrix and attaches the radii.
    pub fn from_matrix(k: ResonanceVector, a: IntMatrix, consts: &FrameConstants) -> Result<Self> {
        let a_inv = certify_bounds(&k, &a)?;
        Self::assemble(k, a, a_inv, consts)
    }

    fn assemble(k: ResonanceVector, a: IntMatrix, a_inv: IntMatrix, c: &FrameConstants) -> Result<Self> {
        if !(c.gamma > 0.0 && c.lip > 0.0 && c.r > 0.0) {
            return Err(Error::domain(format!(
                "frame constants must be positive (gamma = {}, L = {}, r = {})",
                c.gamma, c.lip, c.r
            )));
        }
        let n = k.dim() as f64;
        let knorm = k.norm2();
        let r_tilde_k = c.r / (n * k.norm_inf() as f64);
        let r_tilde = c.r_tilde.unwrap_or(r_tilde_k);
        if !(r_tilde > 0.0 && r_tilde <= r_tilde_k * (1.0 + 1e-12)) {
            return Err(Error::domain(format!(
                "r_tilde = {r_tilde} must lie in (0, r/(n|k|_inf)] = (0, {r_tilde_k}]"
            )));
        }
        let t_k = c.gamma * knorm / (2.0 * c.lip);
        let t_tilde_k = t_k.min(1.0);
        let frak_r_k = t_tilde_k * c.r / (8.0 * n.powf(1.5) * knorm);
        let frak_r_tilde_k = 2.0 * n.sqrt() * c.lip / (c.gamma * knorm) * frak_r_k;
        let varpi0_k = n.sqrt() * c.lip * knorm * frak_r_k;
        let r_hat_k = t_tilde_k * t_tilde_k * r_tilde / (512.0 * n);
        Ok(Self {
            k,
            a,
            a_inv,
            r_tilde_k,
            t_k,
            t_tilde_k,
            frak_r_k,
            frak_r_tilde_k,
            varpi0_k,
            r_tilde,
            r_hat_k,
            r1: r_hat_k / t_k,
        })
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// `A^T ỹ`: the original action for rotated coordinates `ỹ`.
    pub fn to_original(&self, y_tilde: &[f64]) -> Vec<f64> {
        self.a.tmul_vec_f64(y_tilde)
    }

    /// `A^{-T} y`.
    pub fn to_rotated(&self, y: &[f64]) -> Vec<f64> {
        self.a_inv.tmul_vec_f64(y)
    }

    /// `A v`: pushes a gradient in original actions to rotated actions.
    pub fn push_gradient(&self, v: &[f64]) -> Vec<f64> {
        self.a.mul_vec_f64(v)
    }
}

/// Completes `k` to a certified frame: extended-Euclid construction, exhaustive
/// fallback for n <= 3.
pub fn unimodular_completion(k: &ResonanceVector, consts: &FrameConstants) -> Result<UnimodularFrame> {
    let reg = CompletionRegistry::default();
    unimodular_completion_with(&reg, "euclid", k, consts)
}

pub fn unimodular_completion_with(
    registry: &CompletionRegistry,
    strategy: &str,
    k: &ResonanceVector,
    consts: &FrameConstants,
) -> Result<UnimodularFrame> {
    let fallback = (strategy != "exhaustive").then_some("exhaustive");
    let (a, a_inv) = registry.complete_certified(k, strategy, fallback)?;
    UnimodularFrame::assemble(k.clone(), a, a_inv, consts)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: FrameConstants = FrameConstants {
        gamma: 1.0,
        lip: 1.0,
        r: 0.25,
        r_tilde: None,
    };

    #[test]
    fn radii_follow_their_definitions() {
        let k = ResonanceVector::new(vec![2, 3]).unwrap();
        let f = unimodular_completion(&k, &UNIT).unwrap();
        let kn = 13f64.sqrt();
        assert!((f.r_tilde_k - 0.25 / 6.0).abs() < 1e-15);
        assert!((f.t_k - kn / 2.0).abs() < 1e-15);
        assert_eq!(f.t_tilde_k, 1.0);
        let frak = 0.25 / (8.0 * 2f64.powf(1.5) * kn);
        assert!((f.frak_r_k - frak).abs() < 1e-15);
        assert!(f.frak_r_k <= f.r_tilde_k / (8.0 * 2f64.sqrt()));
        assert!((f.varpi0_k - 2f64.sqrt() * kn * frak).abs() < 1e-15);
        assert!((f.r_hat_k - f.r_tilde_k / 1024.0).abs() < 1e-15);
        assert!((f.r1 - f.r_hat_k / f.t_k).abs() < 1e-18);
    }

    #[test]
    fn r_tilde_must_not_exceed_maximal_choice() {
        let k = ResonanceVector::new(vec![1, 0]).unwrap();
        let mut c = UNIT;
        c.r_tilde = Some(0.2);
        assert!(unimodular_completion(&k, &c).is_err());
        c.r_tilde = Some(0.05);
        let f = unimodular_completion(&k, &c).unwrap();
        assert_eq!(f.r_tilde, 0.05);
        assert!(f.r_hat_k < unimodular_completion(&k, &UNIT).unwrap().r_hat_k);
    }

    #[test]
    fn explicit_matrix_is_certified() {
        let k = ResonanceVector::new(vec![2, 3]).unwrap();
        let a = IntMatrix::from_rows(&[vec![2, 3], vec![1, 2]]).unwrap();
        let f = UnimodularFrame::from_matrix(k.clone(), a, &UNIT).unwrap();
        assert_eq!(f.a_inv.rows(), vec![vec![2, -3], vec![-1, 2]]);
        let bad = IntMatrix::from_rows(&[vec![2, 3], vec![3, 5]]).unwrap();
        assert!(UnimodularFrame::from_matrix(k, bad, &UNIT).is_err());
    }

    #[test]
    fn coordinate_maps_are_inverse() {
        let k = ResonanceVector::new(vec![3, -1, 2]).unwrap();
        let f = unimodular_completion(&k, &UNIT).unwrap();
        let y = [0.3, -0.7, 1.1];
        let back = f.to_original(&f.to_rotated(&y));
        for (a, b) in back.iter().zip(y) {
            assert!((a - b).abs() < 1e-13);
        }
        // first rotated coordinate pairs with k: (A^T ỹ)·k depends on ỹ through A k
        let yt = f.to_rotated(&y);
        assert!((f.to_original(&yt)[0] - y[0]).abs() < 1e-13);
    }

    #[test]
    fn deterministic() {
        let k = ResonanceVector::new(vec![4, -7, 3]).unwrap();
        assert_eq!(unimodular_completion(&k, &UNIT).unwrap(), unimodular_completion(&k, &UNIT).unwrap());
    }
}
