use std::sync::Arc;

use nalgebra::DMatrix;

use super::domain::Domain;
use super::hamiltonian::{FamilyRegistry, IntegrableHamiltonian, ModelConstants};
use super::spec::ModelSpec;
use super::validate::{validate_constants, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::lattice::FrameConstants;

/// Convex integrable Hamiltonian on a domain, with its analyticity data and
/// the constants the resonance constructions rely on.
#[derive(Debug, Clone)]
pub struct ConvexModel {
    pub family: String,
    h: Arc<dyn IntegrableHamiltonian>,
    pub domain: Domain,
    /// Action analyticity radius.
    pub r: f64,
    /// Angle analyticity widths.
    pub s: Vec<f64>,
    pub constants: ModelConstants,
}

impl ConvexModel {
    /// Wires external evaluators with declared constants. Only positivity and
    /// shapes are checked here; use [`validate_constants`] to spot-check.
    pub fn from_evaluator(
        family: impl Into<String>,
        h: Arc<dyn IntegrableHamiltonian>,
        domain: Domain,
        r: f64,
        s: Vec<f64>,
        constants: ModelConstants,
    ) -> Result<Self> {
        let n = h.dim();
        if n == 0 || domain.dim() != n || s.len() != n {
            return Err(Error::domain(format!(
                "dimension mismatch: h has n = {n}, domain {}, s {}",
                domain.dim(),
                s.len()
            )));
        }
        if !(r > 0.0) {
            return Err(Error::domain(format!("r = {r} must be positive")));
        }
        if let Some(w) = s.iter().find(|&&w| !(w > 0.0)) {
            return Err(Error::domain(format!("angle width {w} must be positive")));
        }
        let c = &constants;
        if !(c.gamma > 0.0) {
            return Err(Error::ModelAssumption(format!("declared gamma = {} must be positive", c.gamma)));
        }
        if !(c.lip > 0.0 && c.lip_inv_bar > 0.0 && c.sup_omega > 0.0) {
            return Err(Error::domain("declared L, Lbar and M must be positive"));
        }
        Ok(Self {
            family: family.into(),
            h,
            domain,
            r,
            s,
            constants,
        })
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn energy(&self, y: &[f64]) -> f64 {
        self.h.energy(y)
    }

    pub fn omega(&self, y: &[f64]) -> Vec<f64> {
        self.h.frequency(y)
    }

    pub fn hessian(&self, y: &[f64]) -> DMatrix<f64> {
        self.h.hessian(y)
    }

    pub fn curvature_along(&self, y: &[f64], v: &[f64]) -> f64 {
        self.h.curvature_along(y, v)
    }

    pub fn hamiltonian(&self) -> &Arc<dyn IntegrableHamiltonian> {
        &self.h
    }

    /// `s_max / s_min`.
    pub fn s_hat(&self) -> f64 {
        let max = self.s.iter().copied().fold(f64::MIN, f64::max);
        let min = self.s.iter().copied().fold(f64::MAX, f64::min);
        max / min
    }

    pub fn frame_constants(&self) -> FrameConstants {
        FrameConstants {
            gamma: self.constants.gamma,
            lip: self.constants.lip,
            r: self.r,
            r_tilde: None,
        }
    }
}

/// Builds the model described by `spec` without checking the constants.
pub fn assemble_model(spec: &ModelSpec, registry: &FamilyRegistry) -> Result<ConvexModel> {
    if !(spec.r > 0.0) {
        return Err(Error::domain(format!("r = {} must be positive", spec.r)));
    }
    if spec.s.is_empty() {
        return Err(Error::domain("s must list one width per angle"));
    }
    if let Some(w) = spec.s.iter().find(|&&w| !(w > 0.0)) {
        return Err(Error::domain(format!("angle width {w} must be positive")));
    }
    let family = registry.get(&spec.family)?;
    let domain = spec.domain()?;
    let h = family.build(spec)?;
    let closed = family.closed_form_constants(spec, &domain)?;
    let d = &spec.declared;
    let constants = ModelConstants {
        gamma: d.gamma.unwrap_or(closed.gamma),
        lip: d.lip.unwrap_or(closed.lip),
        lip_inv_bar: d.lip_inv_bar.unwrap_or(closed.lip_inv_bar),
        sup_omega: d.sup_omega.unwrap_or(closed.sup_omega),
    };
    ConvexModel::from_evaluator(spec.family.clone(), h, domain, spec.r, spec.s.clone(), constants)
}

/// Builds the model and spot-checks its constants at the default budget.
pub fn build_model(spec: &ModelSpec) -> Result<ConvexModel> {
    let model = assemble_model(spec, &FamilyRegistry::default())?;
    let report = validate_constants(&model, DEFAULT_SAMPLES, 0);
    if let Some(v) = report.violations.first() {
        return Err(Error::ModelAssumption(format!(
            "declared {} = {} contradicted by observed {} at y = {:?}",
            v.constant, v.declared, v.observed, v.witness
        )));
    }
    Ok(model)
}
