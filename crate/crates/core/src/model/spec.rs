use serde::{Deserialize, Serialize};

use super::domain::Domain;
use crate::error::{Error, Result};

/// Declared constants; any omitted entry falls back to the family's closed form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredSpec {
    pub gamma: Option<f64>,
    #[serde(rename = "L")]
    pub lip: Option<f64>,
    #[serde(rename = "Lbar")]
    pub lip_inv_bar: Option<f64>,
    #[serde(rename = "M")]
    pub sup_omega: Option<f64>,
}

/// `domain.kind = "box"` with `bounds = [[lo, hi], ...]`, or `"ball"` with
/// `radius` (or `bounds = [[R]]`) and an optional `center` (origin by default).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
}

/// Model description as read from a spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: String,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
    pub domain: DomainSpec,
    pub r: f64,
    pub s: Vec<f64>,
    #[serde(default)]
    pub declared: DeclaredSpec,
}

impl ModelSpec {
    /// Dimension, taken from the angle widths `s`.
    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn domain(&self) -> Result<Domain> {
        let n = self.dim();
        let d = match self.domain.kind.as_str() {
            "box" => {
                let b = self
                    .domain
                    .bounds
                    .as_ref()
                    .ok_or_else(|| Error::domain("domain.bounds is required for a box"))?;
                if b.iter().any(|p| p.len() != 2) {
                    return Err(Error::domain("domain.bounds must list [lo, hi] pairs"));
                }
                Domain::new_box(b.iter().map(|p| p[0]).collect(), b.iter().map(|p| p[1]).collect())?
            }
            "ball" => {
                let radius = match (self.domain.radius, &self.domain.bounds) {
                    (Some(r), _) => r,
                    (None, Some(b)) if b.len() == 1 && b[0].len() == 1 => b[0][0],
                    _ => return Err(Error::domain("domain.radius is required for a ball")),
                };
                Domain::new_ball(self.domain.center.clone().unwrap_or_else(|| vec![0.0; n]), radius)?
            }
            other => return Err(Error::domain(format!("domain.kind '{other}' is not 'box' or 'ball'"))),
        };
        if d.dim() != n {
            return Err(Error::domain(format!(
                "domain has dimension {} but s has {n} entries",
                d.dim()
            )));
        }
        Ok(d)
    }

    /// Isotropic quadratic on the unit ball.
    pub fn isotropic_unit_ball(n: usize, r: f64) -> Self {
        Self {
            family: "isotropic_quadratic".into(),
            q: None,
            c: None,
            y0: None,
            domain: DomainSpec {
                kind: "ball".into(),
                bounds: None,
                radius: Some(1.0),
                center: None,
            },
            r,
            s: vec![1.0; n],
            declared: DeclaredSpec::default(),
        }
    }

    pub fn with_box(mut self, bounds: Vec<[f64; 2]>) -> Self {
        self.domain = DomainSpec {
            kind: "box".into(),
            bounds: Some(bounds.into_iter().map(|p| p.to_vec()).collect()),
            radius: None,
            center: None,
        };
        self
    }
}
