use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::IntMatrix;
use crate::model::Domain;

/// Linear image `N B` of a box or ball domain, with `N = A^{-T}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltedDomain {
    pub base: Domain,
    /// Row-major `N`.
    pub map: Vec<Vec<f64>>,
    #[serde(skip)]
    ellipse: Spectral,
    #[serde(skip)]
    faces: Vec<Face>,
}

/// Row-major data for distances to the image of a ball.
#[derive(Debug, Clone, PartialEq)]
struct Spectral {
    n_inv: Vec<Vec<f64>>,
    /// Eigenvalues of `N^T N`.
    vals: Vec<f64>,
    /// Its eigenvectors as columns.
    vecs: Vec<Vec<f64>>,
    /// `V^T N^T`.
    spectral: Vec<Vec<f64>>,
}

/// One face of a box: each coordinate pinned low (1), high (2) or free (0),
/// with the least-squares projector onto the free block.
#[derive(Debug, Clone, PartialEq)]
struct Face {
    state: Vec<u8>,
    free: Vec<usize>,
    /// `(N_f^T N_f)^{-1} N_f^T`, row-major; `None` when `N_f` is rank deficient.
    proj: Option<Vec<Vec<f64>>>,
}

const GOLDEN_STEPS: usize = 90;
const BISECT_STEPS: usize = 200;
const NEWTON_STEPS: usize = 60;

impl TiltedDomain {
    pub fn new(base: Domain, a_inv: &IntMatrix) -> Result<Self> {
        let n = base.dim();
        if a_inv.dim() != n {
            return Err(Error::domain("frame and domain dimensions differ"));
        }
        let n_mat = a_inv.transpose().to_f64();
        let n_inv = a_inv
            .unimodular_inverse()?
            .transpose()
            .to_f64();
        let eig = (n_mat.transpose() * &n_mat).symmetric_eigen();
        let faces = match base {
            Domain::Box { .. } => box_faces(&n_mat),
            Domain::Ball { .. } => Vec::new(),
        };
        let ellipse = Spectral {
            n_inv: rows(&n_inv),
            vals: eig.eigenvalues.iter().copied().collect(),
            vecs: rows(&eig.eigenvectors),
            spectral: rows(&(eig.eigenvectors.transpose() * n_mat.transpose())),
        };
        Ok(Self {
            base,
            map: rows(&n_mat),
            ellipse,
            faces,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Euclidean distance from `yt` to `N B`.
    pub fn distance(&self, yt: &[f64]) -> f64 {
        match &self.base {
            Domain::Box { lo, hi } => box_image_distance(&self.map, &self.faces, lo, hi, yt),
            Domain::Ball { center, radius } => {
                let nc = mul(&self.map, center);
                let b: Vec<f64> = yt.iter().zip(&nc).map(|(y, c)| y - c).collect();
                self.ball_image_distance(&b, *radius)
            }
        }
    }

    pub fn in_neighborhood(&self, yt: &[f64], rho: f64) -> bool {
        self.distance(yt) <= rho
    }

    /// Range of coordinate `i` over the real `rho`-neighbourhood of `N B`.
    pub fn coordinate_range(&self, i: usize, rho: f64) -> (f64, f64) {
        let row = &self.map[i];
        let (lo, hi) = match &self.base {
            Domain::Box { lo, hi } => row.iter().zip(lo.iter().zip(hi)).fold((0.0, 0.0), |(a, b), (w, (l, h))| {
                (a + (w * l).min(w * h), b + (w * l).max(w * h))
            }),
            Domain::Ball { center, radius } => {
                let mid: f64 = row.iter().zip(center).map(|(w, c)| w * c).sum();
                let half = radius * row.iter().map(|w| w * w).sum::<f64>().sqrt();
                (mid - half, mid + half)
            }
        };
        (lo - rho, hi + rho)
    }

    /// The interval of `yt_1` with `(yt_1, yhat)` in the real `rho`-neighbourhood,
    /// or `None` when the line misses it.
    pub fn slab(&self, yhat: &[f64], rho: f64) -> Option<(f64, f64)> {
        let (t_lo, t_hi) = self.coordinate_range(0, rho);
        let g = |t: f64| {
            let mut y = Vec::with_capacity(yhat.len() + 1);
            y.push(t);
            y.extend_from_slice(yhat);
            self.distance(&y)
        };
        let tmin = golden_below(&g, t_lo, t_hi, rho)?;
        // g is convex in t, so each side crosses rho exactly once
        let left = bisect_level(&g, t_lo, tmin, rho, true);
        let right = bisect_level(&g, tmin, t_hi, rho, false);
        Some((left, right))
    }
}

/// A point of `[a, b]` where the convex `g` is at most `level`, by golden
/// section search for the minimum stopped at the first such point.
fn golden_below(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, level: f64) -> Option<f64> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..GOLDEN_STEPS {
        if fc <= level {
            return Some(c);
        }
        if fd <= level {
            return Some(d);
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = g(d);
        }
    }
    [(fc, c), (fd, d)].into_iter().find(|&(f, _)| f <= level).map(|(_, t)| t)
}

/// Innermost point of `[a, b]` with `g <= level`, assuming `g` is monotone on it
/// (decreasing when `descending`). Illinois regula falsi keeps a bracket whose
/// inner end always satisfies the level.
fn bisect_level(g: &impl Fn(f64) -> f64, a: f64, b: f64, level: f64, descending: bool) -> f64 {
    // (inside, outside) ends with their residuals g - level
    let (mut xi, mut xo) = if descending { (b, a) } else { (a, b) };
    let (mut fi, mut fo) = (g(xi) - level, g(xo) - level);
    if fo <= 0.0 {
        return xo;
    }
    let tol = 1e-13 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut side = 0i8;
    for _ in 0..BISECT_STEPS {
        if (xo - xi).abs() <= tol {
            break;
        }
        let mut m = xi - fi * (xo - xi) / (fo - fi);
        if !m.is_finite() || (m - xi) * (m - xo) >= 0.0 {
            m = 0.5 * (xi + xo);
        }
        let fm = g(m) - level;
        if fm <= 0.0 {
            xi = m;
            fi = fm;
            if side == 1 {
                fo *= 0.5;
            }
            side = 1;
        } else {
            xo = m;
            fo = fm;
            if side == -1 {
                fi *= 0.5;
            }
            side = -1;
        }
    }
    xi
}

fn box_faces(n_mat: &DMatrix<f64>) -> Vec<Face> {
    let n = n_mat.nrows();
    (0..3usize.pow(n as u32))
        .map(|code| {
            let mut c = code;
            let state: Vec<u8> = (0..n)
                .map(|_| {
                    let s = (c % 3) as u8;
                    c /= 3;
                    s
                })
                .collect();
            let free: Vec<usize> = (0..n).filter(|&i| state[i] == 0).collect();
            let proj = if free.is_empty() {
                Some(Vec::new())
            } else {
                let nf = n_mat.select_columns(&free);
                (nf.transpose() * &nf).cholesky().map(|chol| {
                    let p = chol.inverse() * nf.transpose();
                    (0..p.nrows()).map(|i| p.row(i).iter().copied().collect()).collect()
                })
            };
            Face { state, free, proj }
        })
        .collect()
}

/// `min |b - N y|` over `lo <= y <= hi`, by enumerating the faces of the box:
/// each coordinate is free or pinned to a bound, the free block is solved by
/// least squares, and infeasible candidates are dropped.
fn box_image_distance(map: &[Vec<f64>], faces: &[Face], lo: &[f64], hi: &[f64], b: &[f64]) -> f64 {
    let n = lo.len();
    let apply = |y: &[f64], i: usize| map[i].iter().zip(y).map(|(m, v)| m * v).sum::<f64>();
    let mut best = f64::INFINITY;
    let mut y = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for face in faces {
        let Some(proj) = &face.proj else { continue };
        for i in 0..n {
            y[i] = match face.state[i] {
                1 => lo[i],
                2 => hi[i],
                _ => 0.0,
            };
        }
        if !face.free.is_empty() {
            for i in 0..n {
                rhs[i] = b[i] - apply(&y, i);
            }
            let tol = 1e-12;
            let mut feasible = true;
            for (row, &i) in proj.iter().zip(&face.free) {
                let v: f64 = row.iter().zip(&rhs).map(|(p, r)| p * r).sum();
                let w = tol * (hi[i] - lo[i]).max(1.0);
                if v < lo[i] - w || v > hi[i] + w {
                    feasible = false;
                    break;
                }
                y[i] = v.clamp(lo[i], hi[i]);
            }
            if !feasible {
                continue;
            }
        }
        let d = (0..n).map(|i| (b[i] - apply(&y, i)).powi(2)).sum::<f64>().sqrt();
        best = best.min(d);
        if best == 0.0 {
            break;
        }
    }
    best
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn mul(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl TiltedDomain {
    /// `min |b - N z|` over `|z| <= radius`: zero when the unconstrained solution
    /// is feasible, otherwise the boundary solution of `(N^T N + lambda) z = N^T b`
    /// with `|z(lambda)| = radius`, found by Newton iteration on `lambda` in the
    /// eigenbasis of `N^T N`.
    fn ball_image_distance(&self, b: &[f64], radius: f64) -> f64 {
        let e = &self.ellipse;
        if norm(&mul(&e.n_inv, b)) <= radius {
            return 0.0;
        }
        let c = mul(&e.spectral, b);
        // Newton on the concave, increasing 1/|z(lambda)| - 1/radius from the
        // left converges monotonically to the root
        let mut lambda: f64 = 0.0;
        for _ in 0..NEWTON_STEPS {
            let (mut s2, mut s3) = (0.0, 0.0);
            for (ci, di) in c.iter().zip(&e.vals) {
                let q = ci / (di + lambda);
                s2 += q * q;
                s3 += q * q / (di + lambda);
            }
            let zn = s2.sqrt();
            let step = (1.0 / radius - 1.0 / zn) * zn * s2 / s3;
            if !(step > 1e-15 * lambda.max(f64::MIN_POSITIVE)) {
                break;
            }
            lambda += step;
        }
        let w: Vec<f64> = c.iter().zip(&e.vals).map(|(ci, di)| ci / (di + lambda)).collect();
        let mut z = mul(&e.vecs, &w);
        let zn = norm(&z);
        if zn > radius {
            z.iter_mut().for_each(|v| *v *= radius / zn);
        }
        let nz = mul(&self.map, &z);
        norm(&b.iter().zip(&nz).map(|(x, y)| x - y).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn frame_inv(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(&rows).unwrap().unimodular_inverse().unwrap()
    }

    #[test]
    fn identity_image_matches_base_distance() {
        let inv = IntMatrix::identity(2);
        for base in [Domain::unit_ball(2), Domain::new_box(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap()] {
            let t = TiltedDomain::new(base.clone(), &inv).unwrap();
            for y in [[0.0, 0.0], [3.0, 1.0], [-2.0, -2.0], [0.5, 2.5]] {
                assert!((t.distance(&y) - base.distance(&y)).abs() < 1e-10, "{y:?}");
            }
        }
    }

    #[test]
    fn distance_agrees_with_sampled_image() {
        let inv = frame_inv(vec![vec![2, 3], vec![-1, -1]]);
        let nm = inv.transpose().to_f64();
        for base in [Domain::unit_ball(2), Domain::new_box(vec![-1.0, -0.5], vec![0.5, 1.0]).unwrap()] {
            let t = TiltedDomain::new(base.clone(), &inv).unwrap();
            let (lo, hi) = base.bounding_box(0.0);
            let pts: Vec<DVector<f64>> = (0..=300)
                .flat_map(|i| (0..=300).map(move |j| (i, j)))
                .map(|(i, j)| {
                    DVector::from_vec(vec![
                        lo[0] + (hi[0] - lo[0]) * i as f64 / 300.0,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / 300.0,
                    ])
                })
                .filter(|y| base.contains(y.as_slice()))
                .map(|y| &nm * y)
                .collect();
            for yt in [[3.0, -1.0], [0.0, 0.0], [-4.0, 2.5], [1.0, 1.0]] {
                let b = DVector::from_column_slice(&yt);
                let brute = pts.iter().map(|p| (&b - p).norm()).fold(f64::INFINITY, f64::min);
                let d = t.distance(&yt);
                assert!(d <= brute + 1e-12 && brute - d < 0.03, "{yt:?}: {d} vs {brute}");
            }
        }
    }

    #[test]
    fn slab_of_unit_disc_under_identity() {
        let t = TiltedDomain::new(Domain::unit_ball(2), &IntMatrix::identity(2)).unwrap();
        let (a, b) = t.slab(&[0.6], 0.0).unwrap();
        assert!((a + 0.8).abs() < 1e-9 && (b - 0.8).abs() < 1e-9);
        let (a, b) = t.slab(&[0.0], 0.5).unwrap();
        assert!((a + 1.5).abs() < 1e-9 && (b - 1.5).abs() < 1e-9);
        assert!(t.slab(&[1.6], 0.5).is_none());
    }
}
