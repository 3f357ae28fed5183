use resokam_core::resgraph::build_rotated;
use resokam_core::secular::{standard_form, StandardFormData, TrigPotential};
use serde::Serialize;

use super::{ints, load, point, resonance};
use crate::args::SecularArgs;
use crate::config::read_text;
use crate::error::{CliError, CliResult};
use crate::plot;
use crate::report::{num, ReportWriter};
use crate::Ctx;

#[derive(Serialize)]
struct Mode {
    m: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SecularResult {
    potential: Vec<Mode>,
    data: StandardFormData,
}

pub fn run(ctx: &Ctx, a: &SecularArgs) -> CliResult<String> {
    let l = load(&a.spec)?;
    let n = l.model.dim();
    let k = resonance("k", &a.k, n)?;
    let f = TrigPotential::parse(&read_text(&a.potential)?)
        .map_err(|e| CliError::usage(format!("potential {}: {e}", a.potential.display())))?;
    if f.dim != n {
        return Err(CliError::usage(format!("potential has n = {}, model has n = {n}", f.dim)));
    }
    let yhat = a.yhat.as_deref().map(|t| point("yhat", t, n - 1)).transpose()?;
    let rot = build_rotated(&l.model, &k)?;
    let data = standard_form(&rot, &f, yhat.as_deref(), a.eps)?;
    let mut w = ReportWriter::new(&ctx.out)?;
    if a.svg {
        w.side_file("secular.svg", &plot::g0_and_pendulum(&data))?;
    }
    let summary = match &data.pendulum_energies {
        Some(e) => format!(
            "secular: k = ({}), m_k {}, {} critical points, separatrix {}",
            ints(k.entries()),
            num(data.m_k),
            data.critical_points.len(),
            num(e.separatrix)
        ),
        None => format!("secular: k = ({}), m_k {}, no pendulum structure", ints(k.entries()), num(data.m_k)),
    };
    let config = ctx.config("secular", Some(&a.spec.spec), Some(&l.spec), None, a, None)?;
    let path = w.finish("secular.json", &config, &SecularResult { potential: modes(&f), data })?;
    Ok(format!("{summary} -> {}", path.display()))
}

fn modes(f: &TrigPotential) -> Vec<Mode> {
    f.modes
        .iter()
        .map(|(m, c)| Mode {
            m: m.clone(),
            re: c.re,
            im: c.im,
        })
        .collect()
}
