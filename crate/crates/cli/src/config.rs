use std::path::{Path, PathBuf};

use resokam_core::model::{
    build_model, covering_params, cutoffs_from_eps, ConvexModel, CoveringParams, ModelSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Contents of a `--params` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub eps: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(rename = "K0")]
    pub k0: Option<f64>,
    #[serde(rename = "K_from_eps", default)]
    pub k_from_eps: bool,
}

impl ParamsFile {
    /// Fields set in `over` replace those in `self`.
    pub fn merged(mut self, over: &ParamsFile) -> Self {
        self.eps = over.eps.or(self.eps);
        self.k = over.k.or(self.k);
        self.k0 = over.k0.or(self.k0);
        self.k_from_eps |= over.k_from_eps;
        self
    }

    pub fn resolve(&self, model: &ConvexModel) -> CliResult<CoveringParams> {
        let eps = self.eps.ok_or_else(|| CliError::usage("params: missing field 'eps'"))?;
        let (k, k0) = if self.k_from_eps {
            cutoffs_from_eps(eps, model.s_hat())?
        } else {
            (
                self.k.ok_or_else(|| CliError::usage("params: missing field 'K' (or set K_from_eps = true)"))?,
                self.k0.ok_or_else(|| CliError::usage("params: missing field 'K0' (or set K_from_eps = true)"))?,
            )
        };
        Ok(covering_params(model, eps, k, k0)?)
    }
}

/// Everything a run depends on; embedded verbatim in each report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    pub spec_path: Option<PathBuf>,
    pub spec: Option<ModelSpec>,
    pub params: Option<ParamsFile>,
    pub options: serde_json::Value,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: PathBuf,
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load_spec(path: &Path) -> CliResult<ModelSpec> {
    let text = read_text(path)?;
    toml::from_str(&text).map_err(|e| CliError::usage(format!("model spec {}: {e}", path.display())))
}

/// Builds and validates the model; contradicted declared constants are a
/// configuration error here.
pub fn load_model(spec: &ModelSpec) -> CliResult<ConvexModel> {
    build_model(spec).map_err(|e| match e {
        resokam_core::Error::ModelAssumption(m) => CliError::usage(format!("model spec: {m}")),
        other => other.into(),
    })
}

pub fn load_params(path: Option<&Path>, over: &ParamsFile) -> CliResult<ParamsFile> {
    let base = match path {
        Some(p) => {
            let text = read_text(p)?;
            toml::from_str(&text).map_err(|e| CliError::usage(format!("params file {}: {e}", p.display())))?
        }
        None => ParamsFile::default(),
    };
    Ok(base.merged(over))
}

pub fn parse_list<T: std::str::FromStr>(field: &str, text: &str) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| CliError::usage(format!("--{field}: cannot parse '{}': {e}", s.trim())))
        })
        .collect()
}
