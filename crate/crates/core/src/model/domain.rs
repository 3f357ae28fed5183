use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Action domain `B`: an axis-aligned box or a Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Domain {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::domain("box bounds must be non-empty with matching lengths"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::domain("box bounds must satisfy lo < hi componentwise"));
        }
        Ok(Domain::Box { lo, hi })
    }

    pub fn new_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain("ball needs a non-empty center and a positive radius"));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn unit_ball(n: usize) -> Self {
        Domain::Ball {
            center: vec![0.0; n],
            radius: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lo, .. } => lo.len(),
            Domain::Ball { center, .. } => center.len(),
        }
    }

    /// Euclidean distance from `y` to the (closed) domain.
    pub fn distance(&self, y: &[f64]) -> f64 {
        match self {
            Domain::Box { lo, hi } => y
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&v, (&a, &b))| {
                    let d = if v < a { a - v } else if v > b { v - b } else { 0.0 };
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            Domain::Ball { center, radius } => {
                let d = y.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                (d - radius).max(0.0)
            }
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.len() == self.dim() && self.distance(y) == 0.0
    }

    /// Membership in the real `rho`-neighborhood.
    pub fn in_neighborhood(&self, y: &[f64], rho: f64) -> bool {
        self.distance(y) <= rho
    }

    /// Coordinate ranges of the `rho`-neighborhood.
    pub fn bounding_box(&self, rho: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Box { lo, hi } => (lo.iter().map(|v| v - rho).collect(), hi.iter().map(|v| v + rho).collect()),
            Domain::Ball { center, radius } => (
                center.iter().map(|c| c - radius - rho).collect(),
                center.iter().map(|c| c + radius + rho).collect(),
            ),
        }
    }

    /// Lebesgue measure of the domain.
    pub fn volume(&self) -> f64 {
        match self {
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Domain::Ball { radius, center } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
        }
    }

    /// Uniform sample over the domain (rejection from the bounding box for balls).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| rng.gen_range(*a..*b)).collect(),
            Domain::Ball { .. } => self.sample_neighborhood(rng, 0.0),
        }
    }

    /// Uniform sample over the real `rho`-neighborhood, by rejection.
    pub fn sample_neighborhood<R: Rng + ?Sized>(&self, rng: &mut R, rho: f64) -> Vec<f64> {
        let (lo, hi) = self.bounding_box(rho);
        loop {
            let y: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
            if self.distance(&y) <= rho {
                return y;
            }
        }
    }

    /// `sup |y|` over the `rho`-neighborhood.
    pub fn sup_norm(&self, rho: f64) -> f64 {
        match self {
            Domain::Box { lo, hi } => {
                lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt() + rho
            }
            Domain::Ball { center, radius } => center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius + rho,
        }
    }

    /// Vertices of a box (empty for balls).
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            Domain::Box { lo, hi } => (0..1usize << lo.len())
                .map(|mask| {
                    (0..lo.len())
                        .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                        .collect()
                })
                .collect(),
            Domain::Ball { .. } => Vec::new(),
        }
    }
}

/// `pi^(n/2) / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_n = 2 pi / n V_{n-2}
    let mut v = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut d = if n.is_multiple_of(2) { 2 } else { 3 };
    while d <= n {
        v *= 2.0 * std::f64::consts::PI / d as f64;
        d += 2;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((Domain::new_ball(vec![1.0, 2.0], 2.0).unwrap().volume() - 4.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn distances() {
        let b = Domain::new_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(b.distance(&[0.5, 0.0]), 0.0);
        assert!((b.distance(&[2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-15);
        let u = Domain::unit_ball(2);
        assert!((u.distance(&[3.0, 4.0]) - 4.0).abs() < 1e-15);
        assert!(u.contains(&[0.6, 0.8]));
        assert!(!u.contains(&[0.6, 0.81]));
    }

    #[test]
    fn sampling_stays_inside() {
        let mut rng = substream(1, "test", 0);
        let u = Domain::unit_ball(3);
        for _ in 0..1000 {
            assert!(u.contains(&u.sample(&mut rng)));
            assert!(u.distance(&u.sample_neighborhood(&mut rng, 0.5)) <= 0.5);
        }
    }

    #[test]
    fn sup_norms() {
        assert_eq!(Domain::unit_ball(2).sup_norm(0.5), 1.5);
        let b = Domain::new_box(vec![-1.0, 0.0], vec![2.0, 2.0]).unwrap();
        assert!((b.sup_norm(0.0) - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.vertices().len(), 4);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(Domain::new_box(vec![1.0], vec![0.0]).is_err());
        assert!(Domain::new_ball(vec![0.0], -1.0).is_err());
    }
}
