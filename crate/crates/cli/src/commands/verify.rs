use resokam_core::covering::estimate_measures;
use resokam_core::lattice::{enumerate_generators, inverse_bound_squared, NormSelector, ResonanceVector};
use resokam_core::model::{covering_params, validate_constants, ConvexModel, CoveringParams};
use resokam_core::resgraph::{build_graph, SLOPE_SLACK, build_rotated, check_nonresonance, check_rotated_invariants, RotatedModel};
use resokam_core::secular::{fast_angle_average, quadrature_average, required_nodes, standard_form, TrigPotential};
use serde::Serialize;

use super::graph::{certificate_at, certificate_passes, default_yhat, CONTRACTION_LIMIT};
use super::load;
use crate::args::VerifyArgs;
use crate::config::{load_params, ParamsFile};
use crate::error::{CliError, CliResult};
use crate::report::ReportWriter;
use crate::Ctx;

/// Relative rounding allowance on sampled lower and upper bounds.
const REL_SLACK: f64 = 1e-9;

/// Agreement required between the fast-angle average and its quadrature oracle.
const AVERAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Slack left by the invariant; negative when it fails.
    pub margin: f64,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub params: CoveringParams,
    pub resonances: Vec<Vec<i64>>,
    pub checks: Vec<Check>,
    /// Reported values that are not pass/fail criteria.
    pub informational: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

struct Suite {
    checks: Vec<Check>,
    informational: Vec<Check>,
}

impl Suite {
    fn push(&mut self, name: impl Into<String>, margin: f64, detail: impl Serialize) -> CliResult<()> {
        self.checks.push(Check {
            name: name.into(),
            pass: margin >= 0.0,
            margin,
            detail: json(detail)?,
        });
        Ok(())
    }

    fn info(&mut self, name: impl Into<String>, margin: f64, detail: impl Serialize) -> CliResult<()> {
        self.informational.push(Check {
            name: name.into(),
            pass: margin >= 0.0,
            margin,
            detail: json(detail)?,
        });
        Ok(())
    }

    /// Records a library-level invariant failure as a failed check with its
    /// witness; configuration errors still abort the run.
    fn guard<T>(&mut self, name: &str, r: resokam_core::Result<T>) -> CliResult<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e) if CliError::Core(e.clone()).exit_code() == 3 => {
                self.checks.push(Check {
                    name: name.to_string(),
                    pass: false,
                    margin: f64::NEG_INFINITY,
                    detail: serde_json::Value::String(e.to_string()),
                });
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }
}

fn json(v: impl Serialize) -> CliResult<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(e.to_string()))
}

/// Fills unset fields: `K0 = 2`, `K = 12 ŝ`, and `eps` such that
/// `alpha / C` is half the smallest `varpi0` over the checked resonances.
fn default_params(file: &ParamsFile, model: &ConvexModel, rots: &[RotatedModel]) -> CliResult<ParamsFile> {
    if file.k_from_eps {
        return Ok(file.clone());
    }
    let s_hat = model.s_hat();
    let k0 = file.k0.unwrap_or(2.0);
    let k = file.k.unwrap_or(12.0 * s_hat);
    let eps = match file.eps {
        Some(e) => e,
        None => {
            let unit = covering_params(model, 1.0, k, k0)?;
            let v0 = rots.iter().map(|r| r.frame.varpi0_k).fold(f64::INFINITY, f64::min);
            // alpha / C is proportional to sqrt(eps)
            let target = 0.5 * v0 / unit.resonance_width();
            (target * target).min(1.0)
        }
    };
    Ok(ParamsFile {
        eps: Some(eps),
        k: Some(k),
        k0: Some(k0),
        k_from_eps: false,
    })
}

/// Default potential for the secular check: one cosine along each resonance,
/// its second harmonic, and a mode along the first axis.
fn probe_potential(n: usize, ks: &[ResonanceVector]) -> resokam_core::Result<TrigPotential> {
    let mut terms = Vec::new();
    for k in ks {
        terms.push((k.entries().to_vec(), 1.0));
        terms.push((k.entries().iter().map(|v| 2 * v).collect(), 0.25));
    }
    terms.push((ResonanceVector::unit(n, 0).entries().to_vec(), 0.5));
    TrigPotential::from_cosines(n, &terms)
}

/// Runs every module check for `model`; returns the resolved parameters and
/// the suite report.
pub fn verify_all(
    model: &ConvexModel,
    file: &ParamsFile,
    seed: u64,
    samples: usize,
    kmax: i64,
) -> CliResult<(ParamsFile, SuiteReport)> {
    let n = model.dim();
    if kmax < 1 {
        return Err(CliError::usage("--kmax must be at least 1"));
    }
    let ks = enumerate_generators(n, kmax as f64, &NormSelector::OneNorm)?;
    let rots = ks
        .iter()
        .map(|k| build_rotated(model, k))
        .collect::<resokam_core::Result<Vec<_>>>()?;
    let file = default_params(file, model, &rots)?;
    let p = file.resolve(model)?;
    let mut s = Suite {
        checks: Vec::new(),
        informational: Vec::new(),
    };

    // lattice: frames for every generator up to the cutoff
    let gens = enumerate_generators(n, p.k_cut, &NormSelector::OneNorm)?;
    let mut slack = f64::INFINITY;
    let mut certified = 0usize;
    let mut failures = Vec::new();
    for k in &gens {
        match resokam_core::lattice::unimodular_completion(k, &model.frame_constants()) {
            Ok(f) => {
                let bound = (inverse_bound_squared(n, k.norm_inf())? as f64).sqrt();
                slack = slack.min(bound - f.a_inv.max_abs() as f64);
                certified += 1;
            }
            Err(e) => failures.push(format!("{:?}: {e}", k.entries())),
        }
    }
    let margin = if failures.is_empty() { slack } else { -(failures.len() as f64) };
    s.push(
        "lattice.frames",
        margin,
        serde_json::json!({ "generators": gens.len(), "certified": certified, "failures": failures }),
    )?;

    // model: declared constants against sampled Hessians and frequencies
    let v = validate_constants(model, samples, seed);
    let c = model.constants;
    s.push("model.gamma", v.min_hessian_eigenvalue - c.gamma, &v.violations)?;
    s.push("model.L", c.lip - v.max_lipschitz_ratio, serde_json::json!({ "max_hessian_eigenvalue": v.max_hessian_eigenvalue }))?;
    s.push("model.Lbar", v.min_lipschitz_ratio - 1.0 / c.lip_inv_bar, serde_json::Value::Null)?;
    s.push("model.M", c.sup_omega - v.sup_frequency, serde_json::Value::Null)?;
    s.push("model.violations", -(v.violations.len() as f64), v.violations.len())?;

    // covering: zones cover the domain, R2 bound dominates
    if let Some(m) = s.guard("covering.measure", estimate_measures(model, &p, samples, seed))? {
        let union = m.fraction("R0") + m.fraction("R1") - m.fraction("R0&R1") + m.fraction("R2");
        s.push("covering.partition", -(union - 1.0).abs(), serde_json::json!({ "union": union }))?;
        s.push(
            "covering.r2_bound",
            m.analytic_r2_bound + 3.0 * m.r2_measure_stderr - m.r2_measure,
            serde_json::json!({
                "r2_measure": m.r2_measure,
                "stderr": m.r2_measure_stderr,
                "analytic_bound": m.analytic_r2_bound,
                "fractions": m.fractions,
            }),
        )?;
    }

    let f = probe_potential(n, &ks)?;
    let (n_varpi, per_cube) = if n == 2 { (9, 3) } else { (5, 1) };
    for rot in &rots {
        let tag = super::ints(rot.k().entries());
        let name = |what: &str| format!("resgraph[{tag}].{what}");
        if let Some(inv) = s.guard(&name("rotated"), check_rotated_invariants(rot, samples.min(4096), seed))? {
            s.push(name("lipschitz"), inv.lipschitz_bound * (1.0 + REL_SLACK) - inv.max_lipschitz_ratio, &inv)?;
            let floor = inv.slow_convexity * (1.0 - REL_SLACK);
            s.push(name("slow_slope"), inv.min_slow_slope - floor, serde_json::Value::Null)?;
            s.push(name("d2_slow"), inv.min_d2_slow - floor, serde_json::Value::Null)?;
            s.info(
                name("stated_lipschitz"),
                inv.stated_lipschitz - inv.max_lipschitz_ratio,
                serde_json::json!({ "stated": inv.stated_lipschitz, "observed": inv.max_lipschitz_ratio }),
            )?;
        }
        if let Some(g) = s.guard(&name("graph"), build_graph(rot, n_varpi, per_cube))? {
            let m = &g.margins;
            s.push(name("graph.residual"), m.residual, serde_json::json!({ "max_residual": m.max_residual }))?;
            s.push(
                name("graph.slope"),
                m.slope_bound * (1.0 + SLOPE_SLACK) - m.max_eta_slope,
                serde_json::json!({ "max_slope": m.max_eta_slope, "bound": m.slope_bound }),
            )?;
            s.push(name("graph.monotone"), m.min_eta_increment, serde_json::Value::Null)?;
            s.push(name("graph.inclusion"), m.inclusion, serde_json::json!({ "cubes": g.cubes.cubes.len() }))?;
        }
        match default_yhat(rot) {
            Ok(yhat) => {
                let cert = certificate_at(rot, &yhat, resokam_core::resgraph::DEFAULT_GRID);
                let cert = match cert {
                    Ok(c) => Some(c),
                    Err(CliError::Core(e)) => s.guard(&name("certificate"), Err(e))?,
                    Err(e) => return Err(e),
                };
                if let Some(c) = cert {
                    s.push(name("certificate.slow_drift"), c.slow_drift.margin, &c.slow_drift)?;
                    s.push(name("certificate.curvature_drift"), c.curvature_drift.margin, &c.curvature_drift)?;
                    s.push(
                        name("certificate.contraction"),
                        if certificate_passes(&c) { CONTRACTION_LIMIT - c.contraction_factor } else { -1.0 },
                        serde_json::json!({ "factor": c.contraction_factor, "iterations": c.max_iterations }),
                    )?;
                }
            }
            Err(_) => s.info(name("certificate"), 0.0, "no base cube meets the zero set")?,
        }
        if let Some(r) = s.guard(&name("nonres"), check_nonresonance(rot, &p, (samples / 10).max(100), seed))? {
            let margin = if r.pass_fraction < 1.0 { r.worst_margin.min(-f64::MIN_POSITIVE) } else { r.worst_margin };
            s.info(
                name("nonres"),
                if margin.is_finite() { margin } else { 0.0 },
                serde_json::json!({ "samples": r.samples, "threshold": r.threshold, "pass_fraction": r.pass_fraction, "worst": r.worst }),
            )?;
        }
        let fast = fast_angle_average(&f, &rot.frame);
        let quad = quadrature_average(&f, &rot.frame, required_nodes(&f, &rot.frame));
        let err = quad
            .iter()
            .map(|(j, q)| (q - fast.get(j).copied().unwrap_or_default()).norm())
            .chain(fast.keys().filter(|j| !quad.contains_key(j)).map(|j| fast[j].norm()))
            .fold(0.0, f64::max);
        s.push(name("secular.average"), AVERAGE_TOL - err, serde_json::json!({ "max_error": err }))?;
        if let Ok(yhat) = default_yhat(rot) {
            if let Some(sf) = s.guard(&name("secular.curvature"), standard_form(rot, &f, Some(&yhat), p.eps))? {
                s.push(
                    name("secular.curvature"),
                    sf.m_k - 0.5 * rot.slow_convexity(),
                    serde_json::json!({ "m_k": sf.m_k, "critical_points": sf.critical_points.len() }),
                )?;
            }
        }
    }

    let failed = s.checks.iter().filter(|c| !c.pass).count();
    let report = SuiteReport {
        params: p,
        resonances: ks.iter().map(|k| k.entries().to_vec()).collect(),
        passed: s.checks.len() - failed,
        failed,
        checks: s.checks,
        informational: s.informational,
    };
    Ok((file, report))
}

pub fn run(ctx: &Ctx, a: &VerifyArgs) -> CliResult<String> {
    let l = load(&a.spec)?;
    let file = load_params(a.params.params.as_deref(), &a.params.overrides())?;
    let (resolved, report) = verify_all(&l.model, &file, a.seed, a.samples, a.kmax)?;
    let config = ctx.config("verify-all", Some(&a.spec.spec), Some(&l.spec), Some(&resolved), a, Some(a.seed))?;
    let path = ReportWriter::new(&ctx.out)?.finish("verify_all.json", &config, &report)?;
    let summary = format!("verify-all: {} checks passed, {} failed", report.passed, report.failed);
    if report.ok() {
        Ok(format!("{summary} -> {}", path.display()))
    } else {
        let names: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(CliError::Violation(format!("{summary} ({}); report: {}", names.join(", "), path.display())))
    }
}
