use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::potential::TrigPotential;
use crate::lattice::UnimodularFrame;

/// Average of `f(A^{-1} x̃)` over the fast angles `x̃_2..x̃_n`: the modes
/// `m = j k` survive, re-indexed by `j`.
pub fn fast_angle_average(f: &TrigPotential, frame: &UnimodularFrame) -> BTreeMap<i64, Complex64> {
    let k = frame.k.entries();
    let mut out = BTreeMap::new();
    for (m, c) in &f.modes {
        if let Some(j) = multiple_of(m, k) {
            *out.entry(j).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }
    out
}

/// `j` with `m = j k`, if any.
fn multiple_of(m: &[i64], k: &[i64]) -> Option<i64> {
    let p = k.iter().position(|&v| v != 0)?;
    if m[p] % k[p] != 0 {
        return None;
    }
    let j = m[p] / k[p];
    m.iter().zip(k).all(|(&a, &b)| a == j * b).then_some(j)
}

/// Trapezoid quadrature of the same average on `nodes` points per angle,
/// followed by a discrete Fourier transform in the slow angle. Exact for
/// trigonometric polynomials whose rotated degree is below `nodes / 2`.
pub fn quadrature_average(f: &TrigPotential, frame: &UnimodularFrame, nodes: usize) -> BTreeMap<i64, Complex64> {
    let n = frame.dim();
    let nodes = nodes.max(1);
    let h = 2.0 * PI / nodes as f64;
    let fast_points = nodes.pow(n as u32 - 1);
    let a_inv = &frame.a_inv;
    // slow-angle samples of the fast average
    let samples: Vec<Complex64> = (0..nodes)
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for mut c in 0..fast_points {
                let mut xt = vec![t as f64 * h];
                for _ in 1..n {
                    xt.push((c % nodes) as f64 * h);
                    c /= nodes;
                }
                acc += f.eval(&a_inv.mul_vec_f64(&xt));
            }
            acc / fast_points as f64
        })
        .collect();
    let half = (nodes as i64 - 1) / 2;
    let mut out = BTreeMap::new();
    for j in -half..=half {
        let c: Complex64 = samples
            .iter()
            .enumerate()
            .map(|(t, v)| v * Complex64::from_polar(1.0, -(j as f64) * t as f64 * h))
            .sum::<Complex64>()
            / nodes as f64;
        out.insert(j, c);
    }
    out
}

/// Smallest node count for which [`quadrature_average`] is exact on `f`:
/// one more than twice the largest rotated frequency `|(A^{-T} m)_i|`.
pub fn required_nodes(f: &TrigPotential, frame: &UnimodularFrame) -> usize {
    let max = f
        .modes
        .keys()
        .map(|m| {
            frame
                .a_inv
                .tmul_vec_f64(&m.iter().map(|&v| v as f64).collect::<Vec<_>>())
                .iter()
                .fold(0.0f64, |acc, v| acc.max(v.abs()))
        })
        .fold(0.0, f64::max);
    2 * max.round() as usize + 1
}
