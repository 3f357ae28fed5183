use serde::{Deserialize, Serialize};

use super::convex::ConvexModel;
use crate::error::{Error, Result};

/// Fourier cutoffs, small-divisor threshold and the covering constants derived
/// from `(eps, K, K0)` and the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringParams {
    pub n: usize,
    pub eps: f64,
    #[serde(rename = "K")]
    pub k_cut: f64,
    #[serde(rename = "K0")]
    pub k0_cut: f64,
    pub s_hat: f64,
    /// `9n/2 + 2`.
    pub nu: f64,
    /// `sqrt(eps) K^nu`.
    pub alpha: f64,
    /// `5 n (n-1)^(n-1)`.
    pub c1: f64,
    /// `12 c1 n L / gamma`.
    #[serde(rename = "C")]
    pub c_big: f64,
    /// `11 n + 6`.
    pub b: f64,
}

impl CoveringParams {
    /// Band half-width `alpha / C` around a simple resonance.
    pub fn resonance_width(&self) -> f64 {
        self.alpha / self.c_big
    }

    /// Non-resonance threshold `alpha / (2C)`.
    pub fn nonresonance_threshold(&self) -> f64 {
        self.alpha / (2.0 * self.c_big)
    }

    /// `alpha K^(n+3)`; the simple-resonance test uses three times this over `|k|`.
    pub fn alpha_k_power(&self) -> f64 {
        self.alpha * self.k_cut.powi(self.n as i32 + 3)
    }
}

/// Relative slack on the cutoff inequalities (absorbs `K / (6 ŝ)` round trips).
const SLACK: f64 = 1e-12;

/// Pure function of `(n, ŝ, L, gamma, eps, K, K0)`.
pub fn covering_params(model: &ConvexModel, eps: f64, k_cut: f64, k0_cut: f64) -> Result<CoveringParams> {
    covering_params_raw(
        model.dim(),
        model.s_hat(),
        model.constants.lip,
        model.constants.gamma,
        eps,
        k_cut,
        k0_cut,
    )
}

pub fn covering_params_raw(
    n: usize,
    s_hat: f64,
    lip: f64,
    gamma: f64,
    eps: f64,
    k_cut: f64,
    k0_cut: f64,
) -> Result<CoveringParams> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Parameter(format!("0 <= eps <= 1 (eps = {eps})")));
    }
    if n == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let ge = |a: f64, b: f64| a >= b * (1.0 - SLACK);
    if !ge(k_cut, 6.0 * s_hat * k0_cut) {
        return Err(Error::Parameter(format!(
            "K ≥ 6·sHat·K0 (K = {k_cut}, sHat = {s_hat}, K0 = {k0_cut})"
        )));
    }
    if !ge(6.0 * s_hat * k0_cut, 6.0 * k0_cut) {
        return Err(Error::Parameter(format!("6·sHat·K0 ≥ 6·K0 (sHat = {s_hat})")));
    }
    if !ge(6.0 * k0_cut, 12.0) {
        return Err(Error::Parameter(format!("6·K0 ≥ 12 (K0 = {k0_cut})")));
    }
    let nf = n as f64;
    let nu = 4.5 * nf + 2.0;
    let c1 = 5.0 * nf * (nf - 1.0).powi(n as i32 - 1);
    Ok(CoveringParams {
        n,
        eps,
        k_cut,
        k0_cut,
        s_hat,
        nu,
        alpha: eps.sqrt() * k_cut.powf(nu),
        c1,
        c_big: 12.0 * c1 * nf * lip / gamma,
        b: 11.0 * nf + 6.0,
    })
}

/// `K = max(12 ŝ, ceil((ln eps)^2))`, `K0 = K / (6 ŝ)`.
pub fn cutoffs_from_eps(eps: f64, s_hat: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Parameter(format!("0 < eps <= 1 for K_from_eps (eps = {eps})")));
    }
    let k = (12.0 * s_hat).max(eps.ln().powi(2).ceil());
    Ok((k, k / (6.0 * s_hat)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_dimensional_constants() {
        let p = covering_params_raw(2, 1.0, 1.0, 1.0, 1e-6, 12.0, 2.0).unwrap();
        assert_eq!(p.nu, 11.0);
        assert_eq!(p.b, 28.0);
        assert_eq!(p.c1, 10.0);
        assert_eq!(p.c_big, 240.0);
        assert_eq!(p.alpha, 1e-3 * 12f64.powf(11.0));
    }

    #[test]
    fn cutoff_inequalities_are_named() {
        let e = covering_params_raw(2, 1.0, 1.0, 1.0, 0.1, 6.0, 2.0).unwrap_err();
        assert!(e.to_string().contains("K ≥ 6·sHat·K0"), "{e}");
        let e = covering_params_raw(2, 1.0, 1.0, 1.0, 0.1, 12.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("6·K0 ≥ 12"), "{e}");
        let e = covering_params_raw(2, 2.0, 1.0, 1.0, 0.1, 12.0, 2.0).unwrap_err();
        assert!(e.to_string().contains("K ≥ 6·sHat·K0"), "{e}");
        assert!(covering_params_raw(2, 1.0, 1.0, 1.0, 1.5, 12.0, 2.0).is_err());
    }

    #[test]
    fn eps_derived_cutoffs_are_admissible() {
        for &(eps, s_hat) in &[(1e-2, 1.0), (1e-8, 1.0), (1e-3, 2.5), (0.5, 1.3)] {
            let (k, k0) = cutoffs_from_eps(eps, s_hat).unwrap();
            covering_params_raw(3, s_hat, 1.0, 1.0, eps, k, k0).unwrap();
        }
        assert_eq!(cutoffs_from_eps(1e-8, 1.0).unwrap().0, 340.0);
    }

    #[test]
    fn alpha_is_monotone() {
        let a = |eps: f64, k: f64| covering_params_raw(2, 1.0, 1.0, 1.0, eps, k, 2.0).unwrap().alpha;
        assert!(a(1e-4, 12.0) < a(1e-3, 12.0));
        assert!(a(1e-4, 12.0) < a(1e-4, 13.0));
        assert_eq!(a(0.0, 12.0), 0.0);
    }
}
