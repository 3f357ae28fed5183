//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero when
//! any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resokam_core::covering::estimate_measures;
use resokam_core::lattice::{
    enumerate_generators, gcd_slice, inverse_bound_squared, unimodular_completion, FrameConstants, IntMatrix,
    NormSelector, ResonanceVector,
};
use resokam_core::model::{build_model, covering_params, ConvexModel, ModelSpec};
use resokam_core::resgraph::{
    build_graph, build_rotated, check_nonresonance, contraction_certificate, cube_decomposition, solve_eta,
};
use resokam_core::secular::{fast_angle_average, quadrature_average, required_nodes, TrigPotential};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn isotropic() -> ModelSpec {
    ModelSpec::isotropic_unit_ball(2, 0.25)
}

fn anisotropic() -> ModelSpec {
    let mut s = ModelSpec::isotropic_unit_ball(2, 0.25);
    s.family = "anisotropic_quadratic".into();
    s.q = Some(vec![vec![2.0, 0.5], vec![0.5, 1.0]]);
    s
}

fn quartic() -> ModelSpec {
    let mut s = ModelSpec::isotropic_unit_ball(2, 0.25);
    s.family = "quadratic_quartic".into();
    s.c = Some(0.1);
    s
}

fn model(spec: &ModelSpec) -> ConvexModel {
    build_model(spec).expect("model builds")
}

const UNIT: FrameConstants = FrameConstants {
    gamma: 1.0,
    lip: 1.0,
    r: 1.0,
    r_tilde: None,
};

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for n in 2..=4 {
        for k in enumerate_generators(n, 10.0, &NormSelector::OneNorm).unwrap() {
            checked += 1;
            let f = match unimodular_completion(&k, &UNIT) {
                Ok(f) => f,
                Err(e) => {
                    failures.push(format!("{:?}: {e}", k.entries()));
                    continue;
                }
            };
            let kinf = k.norm_inf();
            let a = &f.a;
            let ok = a.determinant() == Ok(1)
                && a.row(0) == k.entries()
                && (1..n).all(|i| a.row(i).iter().all(|v| v.abs() <= kinf))
                && a.max_abs() == kinf
                && a.checked_mul(&f.a_inv).ok() == Some(IntMatrix::identity(n))
                && {
                    let m = f.a_inv.max_abs() as i128;
                    m * m <= inverse_bound_squared(n, kinf).unwrap()
                };
            if !ok {
                failures.push(format!("{:?}", k.entries()));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && secs < 10.0,
        format!("{checked} frames, {} failures, {secs:.2} s (limit 10 s) {:?}", failures.len(), failures.first()),
    )
}

fn brute_generators(n: usize, cut: i64) -> BTreeSet<Vec<i64>> {
    let side = (2 * cut + 1) as usize;
    (0..side.pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let v = (c % side) as i64 - cut;
                    c /= side;
                    v
                })
                .collect::<Vec<i64>>()
        })
        .filter(|k| {
            let first = k.iter().find(|&&v| v != 0);
            first.is_some_and(|&v| v > 0)
                && k.iter().map(|v| v.abs()).sum::<i64>() <= cut
                && gcd_slice(k) == 1
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let mut mismatches = 0usize;
    let mut total = 0usize;
    for n in 2..=3 {
        for cut in 1..=8 {
            let got: Vec<Vec<i64>> = enumerate_generators(n, cut as f64, &NormSelector::OneNorm)
                .unwrap()
                .iter()
                .map(|k| k.entries().to_vec())
                .collect();
            let set: BTreeSet<Vec<i64>> = got.iter().cloned().collect();
            let brute = brute_generators(n, cut);
            total += brute.len();
            mismatches += set.symmetric_difference(&brute).count() + (got.len() - set.len());
        }
    }
    outcome(mismatches == 0, format!("{total} generators over n in {{2,3}}, K in 1..=8; {mismatches} mismatches"))
}

/// `eta = (varpi - sum_i yhat_i (Q a_i)·k) / (Q k·k)` for `h = Qy·y/2`.
fn closed_form_eta(q: &[Vec<f64>], a: &IntMatrix, varpi: f64, yhat: &[f64]) -> f64 {
    let n = a.dim();
    let qk = |row: &[i64]| -> f64 {
        let k = a.row(0);
        (0..n)
            .map(|i| (0..n).map(|j| q[i][j] * row[j] as f64).sum::<f64>() * k[i] as f64)
            .sum()
    };
    let shift: f64 = yhat.iter().enumerate().map(|(i, y)| y * qk(a.row(i + 1))).sum();
    (varpi - shift) / qk(a.row(0))
}

struct GraphStats {
    graphs: usize,
    max_residual: f64,
    max_rel_error: f64,
    max_slope_ratio: f64,
    min_slope_ratio: f64,
}

fn graph_sweep(spec: &ModelSpec, q: &[Vec<f64>]) -> GraphStats {
    let m = model(spec);
    let mut s = GraphStats {
        graphs: 0,
        max_residual: 0.0,
        max_rel_error: 0.0,
        max_slope_ratio: 0.0,
        min_slope_ratio: f64::INFINITY,
    };
    for k in enumerate_generators(2, 6.0, &NormSelector::OneNorm).unwrap() {
        let rot = build_rotated(&m, &k).unwrap();
        let g = build_graph(&rot, 9, 3).unwrap();
        s.graphs += 1;
        let bound = 1.0 / rot.slow_convexity();
        for (b, yhat) in g.base_grid.iter().enumerate() {
            for (v, &varpi) in g.varpi_grid.iter().enumerate() {
                s.max_residual = s.max_residual.max(g.residuals[b][v]);
                let exact = closed_form_eta(q, &rot.frame.a, varpi, yhat);
                let err = (g.eta[b][v] - exact).abs() / exact.abs().max(1.0);
                s.max_rel_error = s.max_rel_error.max(err);
            }
            for v in 0..g.varpi_grid.len() - 1 {
                let slope = (g.eta[b][v + 1] - g.eta[b][v]) / (g.varpi_grid[v + 1] - g.varpi_grid[v]);
                s.max_slope_ratio = s.max_slope_ratio.max(slope / bound);
                s.min_slope_ratio = s.min_slope_ratio.min(slope / bound);
            }
        }
    }
    s
}

fn criteria_3_4() -> (Outcome, Outcome) {
    let start = Instant::now();
    let iso = graph_sweep(&isotropic(), &[vec![1.0, 0.0], vec![0.0, 1.0]]);
    let ani = graph_sweep(&anisotropic(), &[vec![2.0, 0.5], vec![0.5, 1.0]]);
    let secs = start.elapsed().as_secs_f64();
    let res = iso.max_residual.max(ani.max_residual);
    let rel = iso.max_rel_error.max(ani.max_rel_error);
    let c3 = outcome(
        res <= 1e-10 && rel <= 1e-10 && secs < 30.0,
        format!(
            "{} graphs, max residual {res:.3e}, max relative error vs closed form {rel:.3e}, {secs:.2} s (limit 30 s)",
            iso.graphs + ani.graphs
        ),
    );
    let worst = iso.max_slope_ratio.max(ani.max_slope_ratio);
    let attained = (iso.max_slope_ratio - 1.0).abs().max((iso.min_slope_ratio - 1.0).abs());
    let c4 = outcome(
        worst <= 1.0 + 1e-6 && attained <= 1e-8,
        format!("max slope / bound {worst:.12}; isotropic slopes within {attained:.3e} of the bound"),
    );
    (c3, c4)
}

fn criterion_5() -> Outcome {
    let m = model(&quartic());
    let rot = build_rotated(&m, &ResonanceVector::new(vec![1, 0]).unwrap()).unwrap();
    let cubes = cube_decomposition(&rot);
    let yhat = cubes.centroid(1);
    let eta = solve_eta(&rot, 0.0, &yhat).unwrap().x;
    let c = contraction_certificate(&rot, &[eta, yhat[0]], resokam_core::resgraph::DEFAULT_GRID).unwrap();
    let pass = c.slow_drift.pass
        && c.slow_drift.margin > 0.0
        && c.curvature_drift.pass
        && c.curvature_drift.margin > 0.0
        && c.contraction_factor <= 0.5;
    outcome(
        pass,
        format!(
            "drift margin {:.3e}, curvature margin {:.3e}, contraction factor {:.3e}",
            c.slow_drift.margin, c.curvature_drift.margin, c.contraction_factor
        ),
    )
}

fn criteria_6_7() -> (Outcome, Outcome) {
    let start = Instant::now();
    let m = model(&isotropic());
    let samples = 1_000_000;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut in_range = true;
    let mut dominance_fail = Vec::new();
    let mut worst_dominance = f64::INFINITY;
    for i in 0..5 {
        let eps = 10f64.powf(-25.0 + i as f64 / 4.0);
        let p = covering_params(&m, eps, 12.0, 2.0).unwrap();
        let r = estimate_measures(&m, &p, samples, 11).unwrap();
        let frac = r.fraction("R2");
        in_range &= frac > 1e-4 && frac < 1e-1;
        xs.push(p.alpha.ln());
        ys.push(frac.ln());
        let slack = r.analytic_r2_bound + 3.0 * r.r2_measure_stderr - r.r2_measure;
        worst_dominance = worst_dominance.min(slack / r.analytic_r2_bound);
        if slack < 0.0 {
            dominance_fail.push(eps);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let fracs: Vec<String> = ys.iter().map(|y| format!("{:.2e}", y.exp())).collect();
    let threads = rayon::current_num_threads();
    let c6 = outcome(
        in_range && (1.7..=2.3).contains(&slope) && secs < 60.0,
        format!(
            "slope {slope:.3} (target [1.7, 2.3]); fractions {fracs:?}; {secs:.2} s on {threads} worker(s) (limit 60 s with 8)"
        ),
    );
    let c7 = outcome(
        dominance_fail.is_empty(),
        format!("bound dominates at {}/5 points; smallest relative slack {worst_dominance:.3}", 5 - dominance_fail.len()),
    );
    (c6, c7)
}

fn random_generator(rng: &mut ChaCha8Rng, n: usize, max: i64) -> ResonanceVector {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-max..=max)).collect();
        if let Ok(k) = ResonanceVector::from_direction(&v) {
            return k;
        }
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut pairs = 0usize;
    let mut surviving = 0usize;
    for (n, kmax) in [(2usize, 2i64), (3, 1)] {
        let ks: Vec<ResonanceVector> = (0..10).map(|_| random_generator(&mut rng, n, kmax)).collect();
        for _ in 0..25 {
            let count = rng.gen_range(1..=20);
            let modes: Vec<(Vec<i64>, Complex64)> = (0..count)
                .map(|i| {
                    // every other mode is a multiple of one of the k, so averages are non-trivial
                    let m = if i % 2 == 0 {
                        let k = &ks[rng.gen_range(0..ks.len())];
                        let j = rng.gen_range(-2i64..=2);
                        k.entries().iter().map(|v| j * v).collect()
                    } else {
                        (0..n).map(|_| rng.gen_range(-5i64..=5)).collect()
                    };
                    (m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                })
                .collect();
            let f = TrigPotential::new(n, modes).unwrap();
            for k in &ks {
                let frame = unimodular_completion(k, &UNIT).unwrap();
                let fast = fast_angle_average(&f, &frame);
                surviving += fast.len();
                let quad = quadrature_average(&f, &frame, required_nodes(&f, &frame));
                let keys: BTreeSet<i64> = fast.keys().chain(quad.keys()).copied().collect();
                for j in keys {
                    let a = fast.get(&j).copied().unwrap_or_default();
                    let b = quad.get(&j).copied().unwrap_or_default();
                    worst = worst.max((a - b).norm());
                }
                pairs += 1;
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("{pairs} (potential, k) pairs, {surviving} surviving coefficients, max deviation {worst:.3e}"),
    )
}

fn criterion_9() -> Outcome {
    let m = model(&isotropic());
    let k = ResonanceVector::new(vec![0, 1]).unwrap();
    let rot = build_rotated(&m, &k).unwrap();
    let p = covering_params(&m, 1e-24, 12.0, 2.0).unwrap();
    let precondition = p.resonance_width() <= rot.frame.varpi0_k;
    let r = check_nonresonance(&rot, &p, 10_000, 9).unwrap();
    let a = &rot.frame.a;
    let ells: Vec<Vec<i64>> = brute_generators(2, 12)
        .into_iter()
        .filter(|l| l[1] != 0)
        .collect();
    let mut picks: Vec<usize> = (0..9).map(|i| i * r.records.len() / 9).collect();
    let worst_idx = r
        .records
        .iter()
        .position(|s| Some(s) == r.worst.as_ref())
        .unwrap_or(0);
    picks.push(worst_idx);
    let mut exact = 0usize;
    for &i in &picks {
        let s = &r.records[i];
        // isotropic: omega(y) = y, so the rotated gradient is A A^T ỹ
        let y: Vec<f64> = (0..2).map(|j| (0..2).map(|i| a.get(i, j) as f64 * s.y_tilde[i]).sum()).collect();
        let g: Vec<f64> = (0..2).map(|i| a.row(i).iter().zip(&y).map(|(&v, w)| v as f64 * w).sum()).collect();
        let min = ells
            .iter()
            .map(|l| g.iter().zip(l).map(|(x, &v)| x * v as f64).sum::<f64>().abs())
            .fold(f64::INFINITY, f64::min);
        if min == s.min_value && min - r.threshold == s.margin {
            exact += 1;
        }
    }
    let worst_matches = r.worst.as_ref().is_some_and(|w| w.margin == r.worst_margin);
    outcome(
        precondition && r.samples == 10_000 && exact == picks.len() && worst_matches,
        format!(
            "alpha/C = {:.3e} <= varpi0 = {:.3e}; {} samples, worst margin {:.6e}, pass fraction {}; {exact}/{} spot checks exact",
            p.resonance_width(),
            rot.frame.varpi0_k,
            r.records.len(),
            r.worst_margin,
            r.pass_fraction,
            picks.len()
        ),
    )
}

fn run_verify(dir: &Path, threads: &str) -> (i32, serde_json::Value) {
    let spec = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/quadratic2d.toml");
    let code = resokam::run([
        "resokam",
        "verify-all",
        "--spec",
        spec.to_str().unwrap(),
        "--seed",
        "7",
        "--threads",
        threads,
        "--out",
        dir.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(dir.join("verify_all.json")).unwrap_or_default();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap_or(serde_json::Value::Null);
    (code, v["results"].clone())
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let dirs: Vec<PathBuf> = ["a", "b", "c"].iter().map(|d| tmp.path().join(d)).collect();
    let (c1, r1) = run_verify(&dirs[0], "1");
    let (c2, r2) = run_verify(&dirs[1], "1");
    let (c3, r3) = run_verify(&dirs[2], "8");
    let bytes = |v: &serde_json::Value| serde_json::to_string(v).unwrap();
    let same_seed = bytes(&r1) == bytes(&r2);
    let threads = bytes(&r1) == bytes(&r3);
    outcome(
        c1 == 0 && c2 == 0 && c3 == 0 && !r1.is_null() && same_seed && threads,
        format!(
            "exit codes {c1}/{c2}/{c3}; repeat identical: {same_seed}; threads 1 vs 8 identical: {threads}; {} checks",
            r1["checks"].as_array().map_or(0, |a| a.len())
        ),
    )
}

fn main() {
    let mut results: BTreeMap<u32, (&str, Outcome)> = BTreeMap::new();
    results.insert(1, ("frame certification", criterion_1()));
    results.insert(2, ("lattice oracle", criterion_2()));
    let (c3, c4) = criteria_3_4();
    results.insert(3, ("graph residuals", c3));
    results.insert(4, ("graph slope bound", c4));
    results.insert(5, ("contraction certificate", criterion_5()));
    let (c6, c7) = criteria_6_7();
    results.insert(6, ("measure scaling", c6));
    results.insert(7, ("analytic bound dominance", c7));
    results.insert(8, ("fast-angle average", criterion_8()));
    results.insert(9, ("non-resonance report", criterion_9()));
    results.insert(10, ("determinism", criterion_10()));
    let mut failed = 0;
    for (i, (name, o)) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {i:>2} [{name}]: {tag} ({})", o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
