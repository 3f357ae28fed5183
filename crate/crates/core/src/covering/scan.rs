use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{Classifier, ZoneLabel};
use crate::error::{Error, Result};
use crate::model::{ConvexModel, CoveringParams};

/// Zone code of one planar grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZoneCode {
    R0,
    R1,
    R0R1,
    R2,
    Outside,
}

impl ZoneCode {
    pub fn of(label: &ZoneLabel) -> Self {
        match (label.in_r0, label.in_r1()) {
            (true, true) => ZoneCode::R0R1,
            (true, false) => ZoneCode::R0,
            (false, true) => ZoneCode::R1,
            (false, false) => ZoneCode::R2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ZoneCode::R0 => "R0",
            ZoneCode::R1 => "R1",
            ZoneCode::R0R1 => "R0+R1",
            ZoneCode::R2 => "R2",
            ZoneCode::Outside => "outside",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub i: usize,
    pub j: usize,
    pub u: f64,
    pub v: f64,
    pub zone: ZoneCode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scan2d {
    pub axes: (usize, usize),
    pub grid: usize,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    /// Coordinates held fixed off the two scanned axes (domain centre).
    pub base_point: Vec<f64>,
    pub cells: Vec<ScanCell>,
}

/// Labels a `grid x grid` lattice of cell centres over the bounding box of the
/// domain along `axes`, with the remaining coordinates at the domain centre.
pub fn scan2d(model: &ConvexModel, params: &CoveringParams, axes: (usize, usize), grid: usize) -> Result<Scan2d> {
    let n = model.dim();
    let (a, b) = axes;
    if a >= n || b >= n || a == b {
        return Err(Error::domain(format!("axes ({a},{b}) must be two distinct indices below {n}")));
    }
    if grid == 0 {
        return Err(Error::domain("grid must be positive"));
    }
    let cl = Classifier::new(model, params)?;
    let (lo, hi) = model.domain.bounding_box(0.0);
    let base: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let coord = |axis: usize, idx: usize| lo[axis] + (hi[axis] - lo[axis]) * (idx as f64 + 0.5) / grid as f64;
    let cells = (0..grid * grid)
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c / grid, c % grid);
            let mut y = base.clone();
            y[a] = coord(a, i);
            y[b] = coord(b, j);
            let zone = if model.domain.contains(&y) {
                ZoneCode::of(&cl.classify_unchecked(&y))
            } else {
                ZoneCode::Outside
            };
            ScanCell {
                i,
                j,
                u: y[a],
                v: y[b],
                zone,
            }
        })
        .collect();
    Ok(Scan2d {
        axes,
        grid,
        u_range: (lo[a], hi[a]),
        v_range: (lo[b], hi[b]),
        base_point: base,
        cells,
    })
}
