use resokam_core::lattice::UnimodularFrame;
use resokam_core::resgraph::{
    build_graph, build_rotated, check_nonresonance, contraction_certificate, cube_decomposition, solve_eta,
    ContractionCertificate, GraphMargins, NonresSample, RotatedModel,
};
use resokam_core::model::CoveringParams;
use resokam_core::lattice::ResonanceVector;
use serde::Serialize;

use super::{ints, load, params, point, resonance};
use crate::args::{BuildArgs, CertifyArgs, NonresArgs};
use crate::error::{CliError, CliResult};
use crate::plot;
use crate::report::{csv, num, ReportWriter};
use crate::Ctx;

/// Largest accepted empirical contraction factor of the fixed-point iteration.
pub const CONTRACTION_LIMIT: f64 = 0.5;

#[derive(Serialize)]
struct BuildResult {
    k: Vec<i64>,
    frame: UnimodularFrame,
    a_norm: f64,
    slow_convexity: f64,
    lipschitz: f64,
    stated_lipschitz: f64,
    varpi0: f64,
    varpi_grid: Vec<f64>,
    cube_edge: f64,
    cubes: Vec<Vec<i64>>,
    cubes_scanned: usize,
    cube_note: String,
    base_points: usize,
    margins: GraphMargins,
}

pub fn build(ctx: &Ctx, a: &BuildArgs) -> CliResult<String> {
    let l = load(&a.spec)?;
    let n = l.model.dim();
    let k = resonance("k", &a.k, n)?;
    if a.svg && n != 2 {
        return Err(CliError::usage(format!("unsupported plot: graph needs n = 2, model has n = {n}")));
    }
    let rot = build_rotated(&l.model, &k)?;
    let g = build_graph(&rot, a.nvarpi, a.percube)?;
    let mut w = ReportWriter::new(&ctx.out)?;
    let mut header = vec!["varpi".to_string()];
    header.extend((2..=n).map(|i| format!("yhat{i}")));
    header.extend(["eta".into(), "residual".into()]);
    let mut rows = Vec::with_capacity(g.base_grid.len() * g.varpi_grid.len());
    for (b, yhat) in g.base_grid.iter().enumerate() {
        for (v, &varpi) in g.varpi_grid.iter().enumerate() {
            let mut r = vec![num(varpi)];
            r.extend(yhat.iter().map(|&x| num(x)));
            r.push(num(g.eta[b][v]));
            r.push(num(g.residuals[b][v]));
            rows.push(r);
        }
    }
    w.side_file("graph.csv", &csv(&header, rows))?;
    if a.svg {
        let mut curves = Vec::new();
        for (label, varpi) in [("varpi = 0", 0.0), ("varpi = -varpi0", -g.varpi0), ("varpi = +varpi0", g.varpi0)] {
            curves.push((label.to_string(), curve(&rot, varpi, &g.base_grid)?));
        }
        w.side_file("graph.svg", &plot::graph_curves(&curves, n, k.entries())?)?;
    }
    let config = ctx.config("graph build", Some(&a.spec.spec), Some(&l.spec), None, a, None)?;
    let result = BuildResult {
        k: g.k.clone(),
        frame: rot.frame.clone(),
        a_norm: rot.a_norm,
        slow_convexity: rot.slow_convexity(),
        lipschitz: rot.lipschitz(),
        stated_lipschitz: rot.stated_lipschitz(),
        varpi0: g.varpi0,
        varpi_grid: g.varpi_grid.clone(),
        cube_edge: g.cubes.edge,
        cubes: g.cubes.cubes.clone(),
        cubes_scanned: g.cubes.scanned,
        cube_note: g.cubes.note.clone(),
        base_points: g.base_grid.len(),
        margins: g.margins.clone(),
    };
    let path = w.finish("graph.json", &config, &result)?;
    Ok(format!(
        "graph build: k = ({}), {} cubes, {} columns, max residual {} -> {}",
        ints(k.entries()),
        g.cubes.cubes.len(),
        g.base_grid.len(),
        num(g.margins.max_residual),
        path.display()
    ))
}

/// `(yhat_2, eta(varpi, yhat))` sorted by the base coordinate (n = 2).
fn curve(rot: &RotatedModel, varpi: f64, base: &[Vec<f64>]) -> CliResult<Vec<(f64, f64)>> {
    let mut pts = base
        .iter()
        .map(|y| Ok((y[0], solve_eta(rot, varpi, y)?.x)))
        .collect::<CliResult<Vec<_>>>()?;
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pts)
}

#[derive(Serialize)]
struct NonresResult {
    params: CoveringParams,
    k: ResonanceVector,
    samples: usize,
    seed: u64,
    threshold: f64,
    half_width: f64,
    varpi0: f64,
    cubes: usize,
    pass_fraction: f64,
    worst_margin: f64,
    worst: Option<NonresSample>,
    csv: &'static str,
}

pub fn nonres(ctx: &Ctx, a: &NonresArgs) -> CliResult<String> {
    let l = load(&a.spec)?;
    let (file, p) = params(&a.params, &l.model)?;
    let n = l.model.dim();
    let k = resonance("k", &a.k, n)?;
    let rot = build_rotated(&l.model, &k)?;
    let report = check_nonresonance(&rot, &p, a.samples, a.seed)?;
    let mut w = ReportWriter::new(&ctx.out)?;
    let mut header: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    header.extend(["min_value".into(), "margin".into(), "pass".into()]);
    header.extend((1..=n).map(|i| format!("l{i}")));
    let rows = report.records.iter().map(|s| {
        let mut r: Vec<String> = s.y_tilde.iter().map(|&x| num(x)).collect();
        r.extend([num(s.min_value), num(s.margin), s.pass.to_string()]);
        r.extend(s.argmin.entries().iter().map(i64::to_string));
        r
    });
    w.side_file("nonres_samples.csv", &csv(&header, rows))?;
    let config = ctx.config("graph nonres", Some(&a.spec.spec), Some(&l.spec), Some(&file), a, Some(a.seed))?;
    let result = NonresResult {
        params: p,
        k: report.k.clone(),
        samples: report.samples,
        seed: report.seed,
        threshold: report.threshold,
        half_width: report.half_width,
        varpi0: rot.frame.varpi0_k,
        cubes: report.cubes,
        pass_fraction: report.pass_fraction,
        worst_margin: report.worst_margin,
        worst: report.worst.clone(),
        csv: "nonres_samples.csv",
    };
    let path = w.finish("nonres.json", &config, &result)?;
    Ok(format!(
        "graph nonres: k = ({}), {} samples, pass fraction {}, worst margin {} -> {}",
        ints(k.entries()),
        report.samples,
        num(report.pass_fraction),
        num(report.worst_margin),
        path.display()
    ))
}

/// Base point used when none is given: the centroid of the base cubes.
pub(crate) fn default_yhat(rot: &RotatedModel) -> CliResult<Vec<f64>> {
    let cubes = cube_decomposition(rot);
    if cubes.cubes.is_empty() {
        return Err(CliError::usage("no base cube meets the zero set; pass --yhat"));
    }
    Ok(cubes.centroid(rot.dim() - 1))
}

pub(crate) fn certificate_at(rot: &RotatedModel, yhat: &[f64], grid: usize) -> CliResult<ContractionCertificate> {
    let eta = solve_eta(rot, 0.0, yhat)?.x;
    let mut y0 = vec![eta];
    y0.extend_from_slice(yhat);
    Ok(contraction_certificate(rot, &y0, grid)?)
}

pub(crate) fn certificate_passes(c: &ContractionCertificate) -> bool {
    c.slow_drift.pass && c.curvature_drift.pass && c.contraction_factor <= CONTRACTION_LIMIT
}

#[derive(Serialize)]
struct CertifyResult {
    k: Vec<i64>,
    yhat: Vec<f64>,
    contraction_limit: f64,
    pass: bool,
    certificate: ContractionCertificate,
}

pub fn certify(ctx: &Ctx, a: &CertifyArgs) -> CliResult<String> {
    let l = load(&a.spec)?;
    let n = l.model.dim();
    let k = resonance("k", &a.k, n)?;
    let rot = build_rotated(&l.model, &k)?;
    let yhat = match &a.yhat {
        Some(t) => point("yhat", t, n - 1)?,
        None => default_yhat(&rot)?,
    };
    let cert = certificate_at(&rot, &yhat, a.grid)?;
    let pass = certificate_passes(&cert);
    let config = ctx.config("graph certify", Some(&a.spec.spec), Some(&l.spec), None, a, None)?;
    let summary = format!(
        "graph certify: k = ({}), drift margin {}, curvature margin {}, factor {}",
        ints(k.entries()),
        num(cert.slow_drift.margin),
        num(cert.curvature_drift.margin),
        num(cert.contraction_factor)
    );
    let result = CertifyResult {
        k: k.entries().to_vec(),
        yhat,
        contraction_limit: CONTRACTION_LIMIT,
        pass,
        certificate: cert,
    };
    let path = ReportWriter::new(&ctx.out)?.finish("certificate.json", &config, &result)?;
    if pass {
        Ok(format!("{summary} -> {}", path.display()))
    } else {
        Err(CliError::Violation(format!("{summary}; certificate fails (report: {})", path.display())))
    }
}
