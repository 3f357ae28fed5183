use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Greatest common divisor of the absolute values; `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| gcd(g, x))
}

/// A primitive integer vector with first non-zero entry positive, i.e. one
/// generator per rational direction of the integer lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct ResonanceVector {
    entries: Vec<i64>,
    norm1: i64,
    norm_inf: i64,
}

impl ResonanceVector {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("resonance vector must have at least one entry"));
        }
        if gcd_slice(&entries) != 1 {
            return Err(Error::domain(format!(
                "{entries:?} is not primitive (gcd of entries must be 1)"
            )));
        }
        if entries.iter().find(|&&x| x != 0).copied().unwrap_or(0) <= 0 {
            return Err(Error::domain(format!(
                "{entries:?}: first non-zero entry must be positive"
            )));
        }
        let mut norm1: i64 = 0;
        for &x in &entries {
            norm1 = norm1
                .checked_add(x.checked_abs().ok_or_else(|| Error::Overflow("|k|_1".into()))?)
                .ok_or_else(|| Error::Overflow("|k|_1".into()))?;
        }
        let norm_inf = entries.iter().map(|x| x.abs()).max().unwrap_or(0);
        Ok(Self {
            entries,
            norm1,
            norm_inf,
        })
    }

    /// Primitive representative of the direction of `v` (divides by the gcd
    /// and fixes the sign). Errors on the zero vector.
    pub fn from_direction(v: &[i64]) -> Result<Self> {
        let g = gcd_slice(v);
        if g == 0 {
            return Err(Error::domain("the zero vector has no direction"));
        }
        let first = v.iter().find(|&&x| x != 0).copied().unwrap_or(1);
        let sign = first.signum();
        Self::new(v.iter().map(|&x| sign * x / g).collect())
    }

    /// Unit coordinate vector e_i (0-based index).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::new(e).expect("unit vectors are primitive")
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn norm1(&self) -> i64 {
        self.norm1
    }

    pub fn norm_inf(&self) -> i64 {
        self.norm_inf
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        self.norm2_sq().sqrt()
    }

    pub fn norm2_sq(&self) -> f64 {
        self.entries.iter().map(|&x| (x as f64) * (x as f64)).sum()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|&x| x as f64).collect()
    }

    pub fn dot(&self, w: &[f64]) -> f64 {
        dot_int(&self.entries, w)
    }

    /// True when `other` is an integer multiple of this vector.
    pub fn is_parallel_to(&self, other: &[i64]) -> bool {
        let e = &self.entries;
        if e.len() != other.len() {
            return false;
        }
        // all 2x2 minors vanish
        for i in 0..e.len() {
            for j in (i + 1)..e.len() {
                if (e[i] as i128) * (other[j] as i128) != (e[j] as i128) * (other[i] as i128) {
                    return false;
                }
            }
        }
        true
    }
}

impl TryFrom<Vec<i64>> for ResonanceVector {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ResonanceVector> for Vec<i64> {
    fn from(k: ResonanceVector) -> Self {
        k.entries
    }
}

impl std::fmt::Display for ResonanceVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn dot_int(k: &[i64], w: &[f64]) -> f64 {
    k.iter().zip(w).map(|(&a, &b)| a as f64 * b).sum()
}

/// Norm used to cut off the generator set.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSelector {
    /// `|k|_1 = sum |k_i|`.
    OneNorm,
    /// `|k|_s = sum s_i |k_i|` with the given positive widths.
    Weighted(Vec<f64>),
}

/// `|k|_s = sum_i s_i |k_i|`.
pub fn weighted_norm(k: &[i64], s: &[f64]) -> Result<f64> {
    if k.len() != s.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: k has {} entries, s has {}",
            k.len(),
            s.len()
        )));
    }
    if let Some(w) = s.iter().find(|&&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::domain(format!("width {w} is not positive")));
    }
    Ok(k.iter().zip(s).map(|(&a, &w)| w * a.unsigned_abs() as f64).sum())
}

/// Relative slack for comparing a real norm against a real cutoff.
const CUTOFF_SLACK: f64 = 1e-12;

/// Every generator with `norm(k) <= cutoff`, in lexicographic order of the
/// entries.
///
/// The scan walks coordinates left to right, pruning by the remaining norm
/// budget, so the output is produced directly in order without sorting.
pub fn enumerate_generators(n: usize, cutoff: f64, norm: &NormSelector) -> Result<Vec<ResonanceVector>> {
    if n == 0 {
        return Err(Error::domain("dimension n must be at least 1"));
    }
    if !(cutoff >= 1.0) || !cutoff.is_finite() {
        return Err(Error::domain(format!("cutoff K = {cutoff} must be a finite real >= 1")));
    }
    let weights: Vec<f64> = match norm {
        NormSelector::OneNorm => vec![1.0; n],
        NormSelector::Weighted(s) => {
            weighted_norm(&vec![0; n], s)?;
            s.clone()
        }
    };
    let budget = cutoff * (1.0 + CUTOFF_SLACK);
    let mut out = Vec::new();
    let mut current = vec![0i64; n];
    scan(0, budget, &weights, &mut current, true, &mut out)?;
    Ok(out)
}

fn scan(
    i: usize,
    budget: f64,
    weights: &[f64],
    current: &mut Vec<i64>,
    leading_zero: bool,
    out: &mut Vec<ResonanceVector>,
) -> Result<()> {
    let n = current.len();
    if i == n {
        if !leading_zero && gcd_slice(current) == 1 {
            out.push(ResonanceVector::new(current.clone())?);
        }
        return Ok(());
    }
    let bound_f = (budget / weights[i]).floor();
    if bound_f > i64::MAX as f64 / 2.0 {
        return Err(Error::Overflow("enumeration bound".into()));
    }
    let bound = bound_f as i64;
    // while all earlier entries vanish, this one must be non-negative
    let lo = if leading_zero { 0 } else { -bound };
    for x in lo..=bound {
        let cost = weights[i] * x.unsigned_abs() as f64;
        if cost > budget {
            continue;
        }
        current[i] = x;
        scan(i + 1, budget - cost, weights, current, leading_zero && x == 0, out)?;
    }
    current[i] = 0;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn brute(n: usize, k: i64) -> BTreeSet<Vec<i64>> {
        let side = (2 * k + 1).pow(n as u32);
        let mut set = BTreeSet::new();
        for idx in 0..side {
            let mut v = Vec::with_capacity(n);
            let mut r = idx;
            for _ in 0..n {
                v.push(r % (2 * k + 1) - k);
                r /= 2 * k + 1;
            }
            let n1: i64 = v.iter().map(|x| x.abs()).sum();
            let first = v.iter().find(|&&x| x != 0).copied().unwrap_or(0);
            if n1 <= k && gcd_slice(&v) == 1 && first > 0 {
                set.insert(v);
            }
        }
        set
    }

    #[test]
    fn small_cases() {
        let one = enumerate_generators(1, 5.0, &NormSelector::OneNorm).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].entries(), &[1]);

        let two = enumerate_generators(2, 1.0, &NormSelector::OneNorm).unwrap();
        let got: Vec<_> = two.iter().map(|k| k.entries().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn n2_k3_matches_grid_scan() {
        let got = enumerate_generators(2, 3.0, &NormSelector::OneNorm).unwrap();
        let oracle = brute(2, 3);
        assert_eq!(oracle.len(), 8);
        let got: BTreeSet<_> = got.iter().map(|k| k.entries().to_vec()).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn output_is_lexicographic() {
        let got = enumerate_generators(3, 5.0, &NormSelector::OneNorm).unwrap();
        assert!(got.windows(2).all(|w| w[0].entries() < w[1].entries()));
    }

    #[test]
    fn weighted_cutoff() {
        // s = (1, 2): (0,1) costs 2, (1,0) costs 1, (1,±1) costs 3
        let got = enumerate_generators(2, 2.0, &NormSelector::Weighted(vec![1.0, 2.0])).unwrap();
        let got: Vec<_> = got.iter().map(|k| k.entries().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 1], vec![1, 0]]);
        for k in enumerate_generators(3, 6.0, &NormSelector::Weighted(vec![0.5, 1.0, 2.0])).unwrap() {
            assert!(weighted_norm(k.entries(), &[0.5, 1.0, 2.0]).unwrap() <= 6.0 + 1e-9);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(enumerate_generators(0, 3.0, &NormSelector::OneNorm), Err(Error::Domain(_))));
        assert!(matches!(enumerate_generators(2, 0.5, &NormSelector::OneNorm), Err(Error::Domain(_))));
        assert!(enumerate_generators(2, 3.0, &NormSelector::Weighted(vec![1.0])).is_err());
        assert!(weighted_norm(&[1, 2], &[1.0]).is_err());
        assert!(weighted_norm(&[1, 2], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn weighted_norm_values() {
        assert_eq!(weighted_norm(&[2, -1], &[1.0, 2.0]).unwrap(), 4.0);
        assert_eq!(weighted_norm(&[1, 2, -3], &[0.5, 1.0, 2.0]).unwrap(), 8.5);
        assert_eq!(weighted_norm(&[3, -4, 0, 1], &[1.0; 4]).unwrap(), 8.0);
    }

    #[test]
    fn constructor_rejects_non_generators() {
        assert!(ResonanceVector::new(vec![2, 4]).is_err());
        assert!(ResonanceVector::new(vec![0, -1]).is_err());
        assert!(ResonanceVector::new(vec![0, 0]).is_err());
        assert_eq!(ResonanceVector::from_direction(&[0, -4, 6]).unwrap().entries(), &[0, 2, -3]);
    }

    #[test]
    fn parallel_test() {
        let k = ResonanceVector::new(vec![1, -2]).unwrap();
        assert!(k.is_parallel_to(&[-3, 6]));
        assert!(!k.is_parallel_to(&[1, 2]));
    }

    proptest::proptest! {
        #[test]
        fn generators_are_primitive_with_cached_norms(n in 1usize..4, cutoff in 1.0f64..7.0) {
            for k in enumerate_generators(n, cutoff, &NormSelector::OneNorm).unwrap() {
                let e = k.entries();
                proptest::prop_assert_eq!(gcd_slice(e), 1);
                proptest::prop_assert!(e.iter().find(|&&x| x != 0).copied().unwrap() > 0);
                proptest::prop_assert_eq!(k.norm1(), e.iter().map(|x| x.abs()).sum::<i64>());
                proptest::prop_assert_eq!(k.norm_inf(), e.iter().map(|x| x.abs()).max().unwrap());
                proptest::prop_assert!(k.norm1() as f64 <= cutoff);
            }
        }
    }
}
