use resokam_core::lattice::{
    enumerate_generators, unimodular_completion_with, CompletionRegistry, IntMatrix, NormSelector, UnimodularFrame,
};
use serde::Serialize;

use super::{ints, resonance};
use crate::args::{CompleteArgs, EnumerateArgs};
use crate::config::{load_model, load_spec, parse_list};
use crate::error::{CliError, CliResult};
use crate::report::{csv, num, ReportWriter};
use crate::Ctx;

#[derive(Serialize)]
struct EnumerateResult {
    n: usize,
    cutoff: f64,
    weights: Option<Vec<f64>>,
    count: usize,
    csv: &'static str,
}

pub fn enumerate(ctx: &Ctx, a: &EnumerateArgs) -> CliResult<String> {
    let weights = a.s.as_deref().map(|s| parse_list::<f64>("s", s)).transpose()?;
    let selector = match &weights {
        Some(w) if w.len() != a.n => {
            return Err(CliError::usage(format!("--s: expected {} widths, got {}", a.n, w.len())));
        }
        Some(w) => NormSelector::Weighted(w.clone()),
        None => NormSelector::OneNorm,
    };
    let gens = enumerate_generators(a.n, a.k_cut, &selector)?;
    let mut header: Vec<String> = (1..=a.n).map(|i| format!("k{i}")).collect();
    header.extend(["norm1".into(), "normInf".into()]);
    let rows = gens.iter().map(|k| {
        let mut r: Vec<String> = k.entries().iter().map(i64::to_string).collect();
        r.push(k.norm1().to_string());
        r.push(k.norm_inf().to_string());
        r
    });
    let config = ctx.config("lattice enumerate", None, None, None, a, None)?;
    let mut w = ReportWriter::new(&ctx.out)?;
    w.side_file("generators.csv", &csv(&header, rows))?;
    let result = EnumerateResult {
        n: a.n,
        cutoff: a.k_cut,
        weights,
        count: gens.len(),
        csv: "generators.csv",
    };
    let path = w.finish("lattice_enumerate.json", &config, &result)?;
    Ok(format!("lattice enumerate: {} generators with n = {}, K = {} -> {}", gens.len(), a.n, num(a.k_cut), path.display()))
}

#[derive(Serialize)]
struct CompleteResult {
    k: Vec<i64>,
    strategy: String,
    #[serde(rename = "A")]
    a: Option<IntMatrix>,
    #[serde(rename = "Ainv")]
    a_inv: Option<IntMatrix>,
    det: Option<i64>,
    bounds_ok: bool,
    failure: Option<String>,
    /// Radii of the rotated model; present when a model spec was given.
    frame: Option<UnimodularFrame>,
}

pub fn complete(ctx: &Ctx, a: &CompleteArgs) -> CliResult<String> {
    let n = a.k.split(',').count();
    let k = resonance("k", &a.k, n)?;
    let registry = CompletionRegistry::default();
    if registry.get(&a.strategy).is_none() {
        let names: Vec<&str> = registry.names().collect();
        return Err(CliError::usage(format!("--strategy: unknown '{}' (known: {})", a.strategy, names.join(", "))));
    }
    let spec = a.spec.as_deref().map(load_spec).transpose()?;
    let consts = match &spec {
        Some(s) => {
            let m = load_model(s)?;
            if m.dim() != n {
                return Err(CliError::usage(format!("--k has {n} entries, model has n = {}", m.dim())));
            }
            Some(m.frame_constants())
        }
        None => None,
    };
    let unit = resokam_core::lattice::FrameConstants {
        gamma: 1.0,
        lip: 1.0,
        r: 1.0,
        r_tilde: None,
    };
    let outcome = unimodular_completion_with(&registry, &a.strategy, &k, consts.as_ref().unwrap_or(&unit));
    let config = ctx.config("lattice complete", a.spec.as_deref(), spec.as_ref(), None, a, None)?;
    let w = ReportWriter::new(&ctx.out)?;
    match outcome {
        Ok(frame) => {
            let det = frame.a.determinant()?;
            let result = CompleteResult {
                k: k.entries().to_vec(),
                strategy: a.strategy.clone(),
                a: Some(frame.a.clone()),
                a_inv: Some(frame.a_inv.clone()),
                det: Some(det),
                bounds_ok: true,
                failure: None,
                frame: consts.map(|_| frame),
            };
            let path = w.finish("frame.json", &config, &result)?;
            Ok(format!("lattice complete: k = ({}), det = {det}, bounds certified -> {}", ints(k.entries()), path.display()))
        }
        Err(e @ resokam_core::Error::Certification { .. }) => {
            let result = CompleteResult {
                k: k.entries().to_vec(),
                strategy: a.strategy.clone(),
                a: None,
                a_inv: None,
                det: None,
                bounds_ok: false,
                failure: Some(e.to_string()),
                frame: None,
            };
            let path = w.finish("frame.json", &config, &result)?;
            Err(CliError::Violation(format!("{e} (report: {})", path.display())))
        }
        Err(e) => Err(e.into()),
    }
}
