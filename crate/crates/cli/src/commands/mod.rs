mod cover;
mod graph;
mod lattice;
mod model;
mod secular;
mod verify;

use resokam_core::lattice::ResonanceVector;
use resokam_core::model::{ConvexModel, CoveringParams, ModelSpec};

use crate::args::{Command, CoverCmd, GraphCmd, LatticeCmd, ModelCmd, ParamArgs, SpecArg};
use crate::config::{load_model, load_params, load_spec, parse_list, ParamsFile};
use crate::error::{CliError, CliResult};
use crate::Ctx;

pub use verify::{verify_all, SuiteReport};

pub fn dispatch(ctx: &Ctx, command: Command) -> CliResult<String> {
    match command {
        Command::Lattice(LatticeCmd::Enumerate(a)) => lattice::enumerate(ctx, &a),
        Command::Lattice(LatticeCmd::Complete(a)) => lattice::complete(ctx, &a),
        Command::Model(ModelCmd::Validate(a)) => model::validate(ctx, &a),
        Command::Cover(CoverCmd::Classify(a)) => cover::classify(ctx, &a),
        Command::Cover(CoverCmd::Measure(a)) => cover::measure(ctx, &a),
        Command::Cover(CoverCmd::Scan2d(a)) => cover::scan(ctx, &a),
        Command::Graph(GraphCmd::Build(a)) => graph::build(ctx, &a),
        Command::Graph(GraphCmd::Nonres(a)) | Command::Nonres(a) => graph::nonres(ctx, &a),
        Command::Graph(GraphCmd::Certify(a)) => graph::certify(ctx, &a),
        Command::Secular(a) => secular::run(ctx, &a),
        Command::VerifyAll(a) => verify::run(ctx, &a),
    }
}

pub(crate) struct Loaded {
    pub spec: ModelSpec,
    pub model: ConvexModel,
}

pub(crate) fn load(arg: &SpecArg) -> CliResult<Loaded> {
    let spec = load_spec(&arg.spec)?;
    let model = load_model(&spec)?;
    Ok(Loaded { spec, model })
}

pub(crate) fn params(args: &ParamArgs, model: &ConvexModel) -> CliResult<(ParamsFile, CoveringParams)> {
    let file = load_params(args.params.as_deref(), &args.overrides())?;
    let p = file.resolve(model)?;
    Ok((file, p))
}

pub(crate) fn resonance(field: &str, text: &str, n: usize) -> CliResult<ResonanceVector> {
    let k: Vec<i64> = parse_list(field, text)?;
    if k.len() != n {
        return Err(CliError::usage(format!("--{field}: expected {n} entries, got {}", k.len())));
    }
    ResonanceVector::new(k).map_err(|e| CliError::usage(format!("--{field}: {e}")))
}

pub(crate) fn point(field: &str, text: &str, n: usize) -> CliResult<Vec<f64>> {
    let y: Vec<f64> = parse_list(field, text)?;
    if y.len() != n {
        return Err(CliError::usage(format!("--{field}: expected {n} entries, got {}", y.len())));
    }
    Ok(y)
}

pub(crate) fn ints(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}
