use resokam_core::covering::{estimate_measures, scan2d, Classifier, MeasureReport, ZoneCode, ZoneLabel};
use resokam_core::model::CoveringParams;
use serde::Serialize;

use super::{load, params, point};
use crate::args::{ClassifyArgs, MeasureArgs, ScanArgs};
use crate::config::parse_list;
use crate::error::{CliError, CliResult};
use crate::plot;
use crate::report::{csv, num, ReportWriter};
use crate::Ctx;

#[derive(Serialize)]
struct ClassifyResult {
    y: Vec<f64>,
    params: CoveringParams,
    zone: &'static str,
    label: ZoneLabel,
    warnings: Vec<String>,
}

pub fn classify(ctx: &Ctx, a: &ClassifyArgs) -> CliResult<String> {
    let l = load(&a.spec)?;
    let (file, p) = params(&a.params, &l.model)?;
    let y = point("y", &a.y, l.model.dim())?;
    let classifier = Classifier::new(&l.model, &p)?;
    let label = classifier.classify(&y)?;
    let zone = ZoneCode::of(&label).as_str();
    let config = ctx.config("cover classify", Some(&a.spec.spec), Some(&l.spec), Some(&file), a, None)?;
    let result = ClassifyResult {
        y,
        params: p,
        zone,
        label,
        warnings: classifier.warnings.clone(),
    };
    let path = ReportWriter::new(&ctx.out)?.finish("cover_classify.json", &config, &result)?;
    Ok(format!(
        "cover classify: zone {zone}, {} simple resonance(s) -> {}",
        result.label.simple_resonances.len(),
        path.display()
    ))
}

#[derive(Serialize)]
struct MeasureResult {
    params: CoveringParams,
    report: MeasureReport,
    /// `analytic bound + 3 stderr - Monte Carlo meas(R2)`.
    bound_dominance_margin: f64,
}

pub fn measure(ctx: &Ctx, a: &MeasureArgs) -> CliResult<String> {
    let l = load(&a.spec)?;
    let (file, p) = params(&a.params, &l.model)?;
    let report = estimate_measures(&l.model, &p, a.samples, a.seed)?;
    let margin = report.analytic_r2_bound + 3.0 * report.r2_measure_stderr - report.r2_measure;
    let config = ctx.config("cover measure", Some(&a.spec.spec), Some(&l.spec), Some(&file), a, Some(a.seed))?;
    let summary = format!(
        "cover measure: {} samples, R0 {}, R1 {}, R2 {}",
        a.samples,
        num(report.fraction("R0")),
        num(report.fraction("R1")),
        num(report.fraction("R2"))
    );
    let result = MeasureResult {
        params: p,
        report,
        bound_dominance_margin: margin,
    };
    let path = ReportWriter::new(&ctx.out)?.finish("cover_measure.json", &config, &result)?;
    Ok(format!("{summary} -> {}", path.display()))
}

#[derive(Serialize)]
struct ScanResult {
    params: CoveringParams,
    axes: (usize, usize),
    grid: usize,
    u_range: (f64, f64),
    v_range: (f64, f64),
    base_point: Vec<f64>,
    counts: std::collections::BTreeMap<&'static str, usize>,
}

pub fn scan(ctx: &Ctx, a: &ScanArgs) -> CliResult<String> {
    let l = load(&a.spec)?;
    let (file, p) = params(&a.params, &l.model)?;
    let axes: Vec<usize> = parse_list("axis", &a.axis)?;
    let n = l.model.dim();
    if axes.len() != 2 || axes[0] == axes[1] || axes.iter().any(|&i| i >= n) {
        return Err(CliError::usage(format!("--axis: need two distinct indices below n = {n}")));
    }
    if a.grid == 0 {
        return Err(CliError::usage("--grid must be positive"));
    }
    // fail before any output when the plot cannot be produced
    if a.svg && n != 2 {
        return Err(CliError::usage(format!("unsupported plot: zones2d needs n = 2, model has n = {n}")));
    }
    let scan = scan2d(&l.model, &p, (axes[0], axes[1]), a.grid)?;
    let mut w = ReportWriter::new(&ctx.out)?;
    let header: Vec<String> = ["i", "j", "u", "v", "zone"].iter().map(|s| s.to_string()).collect();
    let rows = scan.cells.iter().map(|c| {
        vec![c.i.to_string(), c.j.to_string(), num(c.u), num(c.v), c.zone.as_str().to_string()]
    });
    w.side_file("zones2d.csv", &csv(&header, rows))?;
    if a.svg {
        w.side_file("zones2d.svg", &plot::zones2d(&scan, n)?)?;
    }
    let mut counts = std::collections::BTreeMap::new();
    for c in &scan.cells {
        *counts.entry(c.zone.as_str()).or_insert(0) += 1;
    }
    let config = ctx.config("cover scan2d", Some(&a.spec.spec), Some(&l.spec), Some(&file), a, None)?;
    let result = ScanResult {
        params: p,
        axes: scan.axes,
        grid: scan.grid,
        u_range: scan.u_range,
        v_range: scan.v_range,
        base_point: scan.base_point.clone(),
        counts,
    };
    let path = w.finish("cover_scan2d.json", &config, &result)?;
    Ok(format!("cover scan2d: {}x{} cells -> {}", a.grid, a.grid, path.display()))
}
