use resokam_core::model::{validate_constants, ModelConstants, ValidationReport};
use serde::Serialize;

use super::load;
use crate::args::ValidateArgs;
use crate::error::{CliError, CliResult};
use crate::Ctx;

#[derive(Serialize)]
struct ValidateResult {
    family: String,
    n: usize,
    s_hat: f64,
    constants: ModelConstants,
    report: ValidationReport,
}

pub fn validate(ctx: &Ctx, a: &ValidateArgs) -> CliResult<String> {
    let l = load(&a.spec)?;
    let report = validate_constants(&l.model, a.samples, a.seed);
    let ok = report.ok();
    let violations = report.violations.len();
    let result = ValidateResult {
        family: l.model.family.clone(),
        n: l.model.dim(),
        s_hat: l.model.s_hat(),
        constants: l.model.constants,
        report,
    };
    let config = ctx.config("model validate", Some(&a.spec.spec), Some(&l.spec), None, a, Some(a.seed))?;
    let path = crate::report::ReportWriter::new(&ctx.out)?.finish("model_validate.json", &config, &result)?;
    if ok {
        Ok(format!("model validate: {} samples, declared constants hold -> {}", a.samples, path.display()))
    } else {
        Err(CliError::Violation(format!(
            "{violations} declared constant(s) contradicted; witnesses in {}",
            path.display()
        )))
    }
}
