//! Completion of a generator `k` to an integer matrix of determinant one with
//! first row `k`.
//!
//! Strategies are registered by name in a [`CompletionRegistry`]; the default
//! pipeline runs `euclid` and falls back to `exhaustive` for n <= 3 when the
//! constructive output fails certification.

use std::collections::BTreeMap;

use super::intmat::IntMatrix;
use super::vector::{gcd_slice, ResonanceVector};
use crate::error::{Error, Result};

pub trait CompletionStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Integer matrix with first row `k`; certification happens elsewhere.
    fn complete(&self, k: &ResonanceVector) -> Result<IntMatrix>;
}

/// `(g, u, v)` with `a u + b v = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

/// Inductive construction on the leading entries of `k` (extended Euclid on
/// the gcd of the first n-1 entries against the last one).
#[derive(Debug, Default, Clone, Copy)]
pub struct EuclidCompletion;

impl CompletionStrategy for EuclidCompletion {
    fn name(&self) -> &'static str {
        "euclid"
    }

    fn complete(&self, k: &ResonanceVector) -> Result<IntMatrix> {
        let (a, det) = complete_signed(k.entries())?;
        debug_assert!(k.dim() == 1 || det == 1);
        Ok(a)
    }
}

/// Returns a matrix with first row `k` (any primitive `k`, any sign) and its
/// determinant. For n >= 2 the determinant is always +1.
fn complete_signed(k: &[i64]) -> Result<(IntMatrix, i64)> {
    let n = k.len();
    if n == 1 {
        return Ok((IntMatrix::from_rows(&[vec![k[0]]])?, k[0]));
    }
    let head = &k[..n - 1];
    let last = k[n - 1];
    let g = gcd_slice(head);
    let mut a = IntMatrix::zeros(n);
    for (j, &x) in k.iter().enumerate() {
        a.set(0, j, x);
    }
    if g == 0 {
        // k = (0, ..., 0, ±1): rows k, e_1, ..., e_{n-1}
        for i in 1..n {
            a.set(i, i - 1, 1);
        }
        // cyclic shift of n rows has sign (-1)^(n-1)
        let det = if (n - 1).is_multiple_of(2) { last } else { -last };
        if det < 0 {
            a.set(1, 0, -1);
        }
        return Ok((a, 1));
    }
    let reduced: Vec<i64> = head.iter().map(|&x| x / g).collect();
    let (sub, sub_det) = complete_signed(&reduced)?;
    for i in 1..n - 1 {
        for j in 0..n - 1 {
            a.set(i, j, sub.get(i, j));
        }
    }
    // g*y - last*x = sub_det makes det(A) = sub_det^2 = 1
    let (one, mut u, _) = ext_gcd(g, last);
    debug_assert_eq!(one, 1);
    if last != 0 {
        // canonical representative u in (-|last|/2, |last|/2]
        let m = last.abs();
        u = u.rem_euclid(m);
        if 2 * u > m {
            u -= m;
        }
    }
    let v_num = 1i128 - g as i128 * u as i128;
    let v = if last != 0 { (v_num / last as i128) as i64 } else { 0 };
    let y = sub_det * u;
    let x = -sub_det * v;
    for (j, &r) in reduced.iter().enumerate() {
        a.set(n - 1, j, x.checked_mul(r).ok_or_else(|| Error::Overflow("completion row".into()))?);
    }
    a.set(n - 1, n - 1, y);
    Ok((a, 1))
}

/// Bounded search over rows with entries in `[-|k|_inf, |k|_inf]`, first hit
/// in lexicographic order. Only n = 2 and n = 3.
#[derive(Debug, Default, Clone, Copy)]
pub struct ExhaustiveCompletion;

impl CompletionStrategy for ExhaustiveCompletion {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn complete(&self, k: &ResonanceVector) -> Result<IntMatrix> {
        let e = k.entries();
        let m = k.norm_inf();
        let range = || -m..=m;
        match e.len() {
            1 => IntMatrix::from_rows(&[vec![e[0]]]),
            2 => {
                for a in range() {
                    for b in range() {
                        if e[0] * b - e[1] * a == 1 {
                            let cand = IntMatrix::from_rows(&[e.to_vec(), vec![a, b]])?;
                            if certify_bounds(k, &cand).is_ok() {
                                return Ok(cand);
                            }
                        }
                    }
                }
                Err(Error::certification("exhaustive search", format!("no completion for {k}")))
            }
            3 => {
                for r1 in triples(m) {
                    let c = cross(e, &r1);
                    if c == [0, 0, 0] {
                        continue;
                    }
                    for r2 in triples(m) {
                        if c[0] * r2[0] + c[1] * r2[1] + c[2] * r2[2] == 1 {
                            let cand = IntMatrix::from_rows(&[e.to_vec(), r1.to_vec(), r2.to_vec()])?;
                            if certify_bounds(k, &cand).is_ok() {
                                return Ok(cand);
                            }
                        }
                    }
                }
                Err(Error::certification("exhaustive search", format!("no completion for {k}")))
            }
            n => Err(Error::domain(format!("exhaustive completion supports n <= 3, got n = {n}"))),
        }
    }
}

fn triples(m: i64) -> impl Iterator<Item = [i64; 3]> {
    (-m..=m).flat_map(move |a| (-m..=m).flat_map(move |b| (-m..=m).map(move |c| [a, b, c])))
}

fn cross(a: &[i64], b: &[i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Verifies every bound on a completion in exact integer arithmetic and
/// returns the exact inverse.
pub fn certify_bounds(k: &ResonanceVector, a: &IntMatrix) -> Result<IntMatrix> {
    let n = k.dim();
    if a.dim() != n {
        return Err(Error::certification("shape", format!("{}x{} matrix for n = {n}", a.dim(), a.dim())));
    }
    if a.row(0) != k.entries() {
        return Err(Error::certification("first row of A equals k", format!("row = {:?}", a.row(0))));
    }
    let det = a.determinant()?;
    if det != 1 {
        return Err(Error::certification("det(A) = 1", format!("det = {det}")));
    }
    let kinf = k.norm_inf();
    let tail = a.max_abs_rows_from(1);
    if tail > kinf {
        return Err(Error::certification("|Â|_inf <= |k|_inf", format!("{tail} > {kinf}")));
    }
    if a.max_abs() != kinf {
        return Err(Error::certification("|A|_inf = |k|_inf", format!("{} != {kinf}", a.max_abs())));
    }
    let inv = a.unimodular_inverse()?;
    if a.checked_mul(&inv)? != IntMatrix::identity(n) {
        return Err(Error::certification("A·Ainv = I", "product is not the identity"));
    }
    let inv_max = inv.max_abs() as i128;
    let bound_sq = inverse_bound_squared(n, kinf)?;
    if inv_max * inv_max > bound_sq {
        return Err(Error::certification(
            "|Ainv|_inf <= (n-1)^((n-1)/2) |k|_inf^(n-1)",
            format!("|Ainv|_inf = {inv_max}"),
        ));
    }
    Ok(inv)
}

/// `(n-1)^(n-1) |k|_inf^(2(n-1))`, the square of the inverse bound, exactly.
pub fn inverse_bound_squared(n: usize, kinf: i64) -> Result<i128> {
    let e = (n.saturating_sub(1)) as u32;
    let overflow = || Error::Overflow(format!("|k|_inf^(n-1) for n = {n}, |k|_inf = {kinf}"));
    let base = (n.saturating_sub(1) as i128).checked_pow(e).ok_or_else(overflow)?;
    let kpow = (kinf as i128).checked_pow(2 * e).ok_or_else(overflow)?;
    base.checked_mul(kpow).ok_or_else(overflow)
}

/// Name-indexed set of completion strategies.
pub struct CompletionRegistry {
    strategies: BTreeMap<&'static str, Box<dyn CompletionStrategy>>,
}

impl Default for CompletionRegistry {
    fn default() -> Self {
        let mut reg = Self {
            strategies: BTreeMap::new(),
        };
        reg.register(Box::new(EuclidCompletion));
        reg.register(Box::new(ExhaustiveCompletion));
        reg
    }
}

impl CompletionRegistry {
    pub fn register(&mut self, strategy: Box<dyn CompletionStrategy>) {
        self.strategies.insert(strategy.name(), strategy);
    }

    pub fn get(&self, name: &str) -> Option<&dyn CompletionStrategy> {
        self.strategies.get(name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.strategies.keys().copied()
    }

    /// Runs `primary`, certifies, and on failure tries `fallback` when n <= 3.
    pub fn complete_certified(
        &self,
        k: &ResonanceVector,
        primary: &str,
        fallback: Option<&str>,
    ) -> Result<(IntMatrix, IntMatrix)> {
        let lookup = |name: &str| {
            self.get(name)
                .ok_or_else(|| Error::domain(format!("unknown completion strategy '{name}'")))
        };
        let first = lookup(primary)?
            .complete(k)
            .and_then(|a| certify_bounds(k, &a).map(|inv| (a, inv)));
        match (first, fallback) {
            (Ok(pair), _) => Ok(pair),
            (Err(e), Some(fb)) if k.dim() <= 3 => {
                let a = lookup(fb)?.complete(k)?;
                certify_bounds(k, &a).map(|inv| (a, inv)).map_err(|_| e)
            }
            (Err(e), _) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::vector::{enumerate_generators, NormSelector};

    fn rv(v: &[i64]) -> ResonanceVector {
        ResonanceVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(2, 3), (12, 18), (0, 5), (7, 0), (-4, 6), (1, -9)] {
            let (g, u, v) = ext_gcd(a, b);
            assert_eq!(a * u + b * v, g);
            assert_eq!(g, super::super::vector::gcd(a, b));
        }
    }

    #[test]
    fn identity_for_first_unit_vector() {
        for n in 1..6 {
            let a = EuclidCompletion.complete(&ResonanceVector::unit(n, 0)).unwrap();
            assert_eq!(a, IntMatrix::identity(n));
        }
    }

    #[test]
    fn two_dimensional_examples() {
        let a = EuclidCompletion.complete(&rv(&[0, 1])).unwrap();
        assert_eq!(a.rows(), vec![vec![0, 1], vec![-1, 0]]);
        let k = rv(&[2, 3]);
        let a = EuclidCompletion.complete(&k).unwrap();
        let inv = certify_bounds(&k, &a).unwrap();
        assert!(inv.max_abs() <= 3);
    }

    #[test]
    fn exhaustive_finds_admissible_matrices() {
        // hand-checked admissible completions
        let a = ExhaustiveCompletion.complete(&rv(&[2, 3])).unwrap();
        certify_bounds(&rv(&[2, 3]), &a).unwrap();
        let b = IntMatrix::from_rows(&[vec![2, 3], vec![1, 2]]).unwrap();
        certify_bounds(&rv(&[2, 3]), &b).unwrap();
        let c = ExhaustiveCompletion.complete(&rv(&[2, 3, 5])).unwrap();
        certify_bounds(&rv(&[2, 3, 5]), &c).unwrap();
    }

    #[test]
    fn certification_rejects_bad_matrices() {
        let k = rv(&[2, 3]);
        let wrong_det = IntMatrix::from_rows(&[vec![2, 3], vec![1, 1]]).unwrap();
        assert!(matches!(certify_bounds(&k, &wrong_det), Err(Error::Certification { .. })));
        let too_big = IntMatrix::from_rows(&[vec![2, 3], vec![5, 8]]).unwrap();
        let err = certify_bounds(&k, &too_big).unwrap_err();
        assert!(err.to_string().contains("|Â|_inf"));
    }

    #[test]
    fn euclid_certifies_on_all_small_generators() {
        for n in 2..=4 {
            for k in enumerate_generators(n, 10.0, &NormSelector::OneNorm).unwrap() {
                let a = EuclidCompletion.complete(&k).unwrap();
                certify_bounds(&k, &a).unwrap_or_else(|e| panic!("{k}: {e}"));
            }
        }
    }

    #[test]
    fn registry_lookup() {
        let reg = CompletionRegistry::default();
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["euclid", "exhaustive"]);
        assert!(reg.complete_certified(&rv(&[3, 5]), "nope", None).is_err());
        let (a, inv) = reg.complete_certified(&rv(&[3, 5]), "exhaustive", None).unwrap();
        assert_eq!(a.checked_mul(&inv).unwrap(), IntMatrix::identity(2));
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(inverse_bound_squared(12, i64::MAX / 2), Err(Error::Overflow(_))));
    }
}
