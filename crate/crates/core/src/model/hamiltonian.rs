//! Integrable Hamiltonians `h(y)` and the registry of built-in families.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::domain::Domain;
use super::spec::ModelSpec;
use crate::error::{Error, Result};

/// Evaluators for an integrable Hamiltonian. Implementations must be pure.
pub trait IntegrableHamiltonian: Send + Sync + Debug {
    fn dim(&self) -> usize;

    fn energy(&self, y: &[f64]) -> f64;

    /// Frequency map `omega(y) = grad h(y)`.
    fn frequency(&self, y: &[f64]) -> Vec<f64>;

    fn hessian(&self, y: &[f64]) -> DMatrix<f64>;

    /// `hess h(y) v · v`.
    fn curvature_along(&self, y: &[f64], v: &[f64]) -> f64 {
        let h = self.hessian(y);
        let n = v.len();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += h[(i, j)] * v[i] * v[j];
            }
        }
        acc
    }
}

/// The four constants the theory assumes: convexity `gamma`, Lipschitz `L`,
/// inverse-Lipschitz `Lbar` and `M = sup |omega|` on the `2r`-neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub gamma: f64,
    #[serde(rename = "L")]
    pub lip: f64,
    #[serde(rename = "Lbar")]
    pub lip_inv_bar: f64,
    #[serde(rename = "M")]
    pub sup_omega: f64,
}

/// `½ |y|²`.
#[derive(Debug, Clone)]
pub struct IsotropicQuadratic {
    pub n: usize,
}

impl IntegrableHamiltonian for IsotropicQuadratic {
    fn dim(&self) -> usize {
        self.n
    }
    fn energy(&self, y: &[f64]) -> f64 {
        0.5 * y.iter().map(|v| v * v).sum::<f64>()
    }
    fn frequency(&self, y: &[f64]) -> Vec<f64> {
        y.to_vec()
    }
    fn hessian(&self, _y: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.n, self.n)
    }
    fn curvature_along(&self, _y: &[f64], v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum()
    }
}

/// `½ |y - y0|²`.
#[derive(Debug, Clone)]
pub struct ShiftedQuadratic {
    pub center: Vec<f64>,
}

impl IntegrableHamiltonian for ShiftedQuadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn energy(&self, y: &[f64]) -> f64 {
        0.5 * y.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    }
    fn frequency(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.center).map(|(a, b)| a - b).collect()
    }
    fn hessian(&self, _y: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim())
    }
}

/// `½ Q y · y` with `Q` symmetric positive definite.
#[derive(Debug, Clone)]
pub struct AnisotropicQuadratic {
    pub q: DMatrix<f64>,
}

impl AnisotropicQuadratic {
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        if q.nrows() != q.ncols() || q.nrows() == 0 {
            return Err(Error::domain("Q must be a non-empty square matrix"));
        }
        if (&q - q.transpose()).abs().max() > 1e-12 * q.abs().max() {
            return Err(Error::domain("Q must be symmetric"));
        }
        let eig = q.clone().symmetric_eigenvalues();
        if eig.min() <= 0.0 {
            return Err(Error::ModelAssumption(format!(
                "Q is not positive definite (min eigenvalue {})",
                eig.min()
            )));
        }
        Ok(Self { q })
    }

    pub fn eigen_range(&self) -> (f64, f64) {
        let eig = self.q.clone().symmetric_eigenvalues();
        (eig.min(), eig.max())
    }
}

impl IntegrableHamiltonian for AnisotropicQuadratic {
    fn dim(&self) -> usize {
        self.q.nrows()
    }
    fn energy(&self, y: &[f64]) -> f64 {
        0.5 * y.iter().zip(self.frequency(y)).map(|(a, b)| a * b).sum::<f64>()
    }
    fn frequency(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.q[(i, j)] * y[j]).sum()).collect()
    }
    fn hessian(&self, _y: &[f64]) -> DMatrix<f64> {
        self.q.clone()
    }
}

/// `½ |y|² + c Σ y_i⁴` with `c >= 0`.
#[derive(Debug, Clone)]
pub struct QuadraticQuartic {
    pub n: usize,
    pub c: f64,
}

impl IntegrableHamiltonian for QuadraticQuartic {
    fn dim(&self) -> usize {
        self.n
    }
    fn energy(&self, y: &[f64]) -> f64 {
        y.iter().map(|v| 0.5 * v * v + self.c * v.powi(4)).sum()
    }
    fn frequency(&self, y: &[f64]) -> Vec<f64> {
        y.iter().map(|v| v + 4.0 * self.c * v.powi(3)).collect()
    }
    fn hessian(&self, y: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.n,
            y.iter().map(|v| 1.0 + 12.0 * self.c * v * v),
        ))
    }
    fn curvature_along(&self, y: &[f64], v: &[f64]) -> f64 {
        y.iter().zip(v).map(|(a, b)| (1.0 + 12.0 * self.c * a * a) * b * b).sum()
    }
}

/// A named family of Hamiltonians with closed-form constants.
pub trait HamiltonianFamily: Send + Sync {
    fn name(&self) -> &'static str;

    fn build(&self, spec: &ModelSpec) -> Result<Arc<dyn IntegrableHamiltonian>>;

    /// Constants on the real `2r`-neighborhood of `domain`.
    fn closed_form_constants(&self, spec: &ModelSpec, domain: &Domain) -> Result<ModelConstants>;
}

struct IsotropicFamily;
struct AnisotropicFamily;
struct QuarticFamily;
struct ShiftedFamily;

impl HamiltonianFamily for IsotropicFamily {
    fn name(&self) -> &'static str {
        "isotropic_quadratic"
    }
    fn build(&self, spec: &ModelSpec) -> Result<Arc<dyn IntegrableHamiltonian>> {
        Ok(Arc::new(IsotropicQuadratic { n: spec.dim() }))
    }
    fn closed_form_constants(&self, spec: &ModelSpec, domain: &Domain) -> Result<ModelConstants> {
        Ok(ModelConstants {
            gamma: 1.0,
            lip: 1.0,
            lip_inv_bar: 1.0,
            sup_omega: domain.sup_norm(2.0 * spec.r),
        })
    }
}

impl HamiltonianFamily for ShiftedFamily {
    fn name(&self) -> &'static str {
        "shifted_quadratic"
    }
    fn build(&self, spec: &ModelSpec) -> Result<Arc<dyn IntegrableHamiltonian>> {
        Ok(Arc::new(ShiftedQuadratic {
            center: shift_of(spec)?,
        }))
    }
    fn closed_form_constants(&self, spec: &ModelSpec, domain: &Domain) -> Result<ModelConstants> {
        let y0 = shift_of(spec)?;
        let shifted = match domain {
            Domain::Box { lo, hi } => Domain::Box {
                lo: lo.iter().zip(&y0).map(|(a, c)| a - c).collect(),
                hi: hi.iter().zip(&y0).map(|(a, c)| a - c).collect(),
            },
            Domain::Ball { center, radius } => Domain::Ball {
                center: center.iter().zip(&y0).map(|(a, c)| a - c).collect(),
                radius: *radius,
            },
        };
        Ok(ModelConstants {
            gamma: 1.0,
            lip: 1.0,
            lip_inv_bar: 1.0,
            sup_omega: shifted.sup_norm(2.0 * spec.r),
        })
    }
}

fn shift_of(spec: &ModelSpec) -> Result<Vec<f64>> {
    let y0 = spec
        .y0
        .clone()
        .ok_or_else(|| Error::domain("shifted_quadratic needs 'y0'"))?;
    if y0.len() != spec.dim() {
        return Err(Error::domain("y0 has the wrong dimension"));
    }
    Ok(y0)
}

fn q_of(spec: &ModelSpec) -> Result<AnisotropicQuadratic> {
    let rows = spec.q.as_ref().ok_or_else(|| Error::domain("anisotropic_quadratic needs 'Q'"))?;
    let n = spec.dim();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::domain(format!("Q must be {n}x{n}")));
    }
    AnisotropicQuadratic::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl HamiltonianFamily for AnisotropicFamily {
    fn name(&self) -> &'static str {
        "anisotropic_quadratic"
    }
    fn build(&self, spec: &ModelSpec) -> Result<Arc<dyn IntegrableHamiltonian>> {
        Ok(Arc::new(q_of(spec)?))
    }
    fn closed_form_constants(&self, spec: &ModelSpec, domain: &Domain) -> Result<ModelConstants> {
        let h = q_of(spec)?;
        let (lmin, lmax) = h.eigen_range();
        let rho = 2.0 * spec.r;
        let norm = |v: &[f64]| h.frequency(v).iter().map(|x| x * x).sum::<f64>().sqrt();
        // |Qy| is convex: its sup over B is attained at an extreme point
        let sup_b = match domain {
            Domain::Box { .. } => domain.vertices().iter().map(|v| norm(v)).fold(0.0, f64::max),
            Domain::Ball { center, radius } => norm(center) + lmax * radius,
        };
        Ok(ModelConstants {
            gamma: lmin,
            lip: lmax,
            lip_inv_bar: 1.0 / lmin,
            sup_omega: sup_b + lmax * rho,
        })
    }
}

impl HamiltonianFamily for QuarticFamily {
    fn name(&self) -> &'static str {
        "quadratic_quartic"
    }
    fn build(&self, spec: &ModelSpec) -> Result<Arc<dyn IntegrableHamiltonian>> {
        let c = spec.c.unwrap_or(0.0);
        if !(c >= 0.0) {
            return Err(Error::ModelAssumption(format!("quartic coefficient c = {c} must be >= 0")));
        }
        Ok(Arc::new(QuadraticQuartic { n: spec.dim(), c }))
    }
    fn closed_form_constants(&self, spec: &ModelSpec, domain: &Domain) -> Result<ModelConstants> {
        let c = spec.c.unwrap_or(0.0);
        let (lo, hi) = domain.bounding_box(2.0 * spec.r);
        let mut min_sq = f64::INFINITY;
        let mut max_sq: f64 = 0.0;
        let mut sup_sq = 0.0;
        for (a, b) in lo.iter().zip(&hi) {
            let m = a.abs().max(b.abs());
            let lo_sq = if *a <= 0.0 && *b >= 0.0 { 0.0 } else { (a * a).min(b * b) };
            min_sq = min_sq.min(lo_sq);
            max_sq = max_sq.max(m * m);
            sup_sq += (m + 4.0 * c * m.powi(3)).powi(2);
        }
        let gamma = 1.0 + 12.0 * c * min_sq;
        Ok(ModelConstants {
            gamma,
            lip: 1.0 + 12.0 * c * max_sq,
            lip_inv_bar: 1.0 / gamma,
            sup_omega: f64::sqrt(sup_sq),
        })
    }
}

/// Name-indexed set of Hamiltonian families; the `family` key of a model spec
/// selects one.
pub struct FamilyRegistry {
    families: BTreeMap<&'static str, Box<dyn HamiltonianFamily>>,
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        let mut reg = Self {
            families: BTreeMap::new(),
        };
        reg.register(Box::new(IsotropicFamily));
        reg.register(Box::new(AnisotropicFamily));
        reg.register(Box::new(QuarticFamily));
        reg.register(Box::new(ShiftedFamily));
        reg
    }
}

impl FamilyRegistry {
    pub fn register(&mut self, family: Box<dyn HamiltonianFamily>) {
        self.families.insert(family.name(), family);
    }

    pub fn get(&self, name: &str) -> Result<&dyn HamiltonianFamily> {
        self.families.get(name).map(|f| f.as_ref()).ok_or_else(|| {
            Error::domain(format!(
                "unknown family '{name}' (known: {})",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.families.keys().copied()
    }
}
