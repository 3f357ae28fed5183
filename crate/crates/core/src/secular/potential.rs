use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite Fourier series `f(x) = Σ f_m e^{i m·x}` on the n-torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPotential {
    pub dim: usize,
    pub modes: BTreeMap<Vec<i64>, Complex64>,
}

/// Coefficients closer than this to their conjugate partner count as real.
const REAL_TOL: f64 = 1e-12;

impl TrigPotential {
    pub fn new(dim: usize, modes: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("potential dimension must be positive"));
        }
        let mut map = BTreeMap::new();
        for (m, c) in modes {
            if m.len() != dim {
                return Err(Error::domain(format!("mode {m:?} does not have {dim} entries")));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::domain(format!("coefficient of {m:?} is not finite")));
            }
            *map.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(Self { dim, modes: map })
    }

    /// `Σ a_m cos(m·x)` stored as the conjugate pairs `a_m / 2`.
    pub fn from_cosines(dim: usize, terms: &[(Vec<i64>, f64)]) -> Result<Self> {
        let mut modes = Vec::new();
        for (m, a) in terms {
            if m.iter().all(|&v| v == 0) {
                modes.push((m.clone(), Complex64::new(*a, 0.0)));
            } else {
                modes.push((m.clone(), Complex64::new(a / 2.0, 0.0)));
                modes.push((m.iter().map(|v| -v).collect(), Complex64::new(a / 2.0, 0.0)));
            }
        }
        Self::new(dim, modes)
    }

    /// Reads lines `m1,...,mn, re, im`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut modes = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 3 {
                return Err(Error::domain(format!("line {}: expected m1,...,mn, re, im", no + 1)));
            }
            let n = fields.len() - 2;
            if *dim.get_or_insert(n) != n {
                return Err(Error::domain(format!("line {}: mode has {n} entries, earlier lines had {}", no + 1, dim.unwrap())));
            }
            let m = fields[..n]
                .iter()
                .map(|s| s.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::domain(format!("line {}: {e}", no + 1)))?;
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::domain(format!("line {}: {e}", no + 1)))
            };
            modes.push((m, Complex64::new(num(fields[n])?, num(fields[n + 1])?)));
        }
        let dim = dim.ok_or_else(|| Error::domain("potential file lists no modes"))?;
        Self::new(dim, modes)
    }

    pub fn to_text(&self) -> String {
        self.modes
            .iter()
            .map(|(m, c)| {
                let idx: Vec<String> = m.iter().map(i64::to_string).collect();
                format!("{}, {:e}, {:e}\n", idx.join(","), c.re, c.im)
            })
            .collect()
    }

    /// `f_{-m} = conj(f_m)` for every stored mode.
    pub fn is_real(&self) -> bool {
        self.modes.iter().all(|(m, c)| {
            let neg: Vec<i64> = m.iter().map(|v| -v).collect();
            let partner = self.modes.get(&neg).copied().unwrap_or_default();
            (partner - c.conj()).norm() <= REAL_TOL * (1.0 + c.norm())
        })
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.modes
            .iter()
            .map(|(m, c)| {
                let phase: f64 = m.iter().zip(x).map(|(&a, b)| a as f64 * b).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// `Σ |f_m|^2`.
    pub fn energy(&self) -> f64 {
        self.modes.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_degree(&self) -> i64 {
        self.modes
            .keys()
            .map(|m| m.iter().map(|v| v.abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
}
