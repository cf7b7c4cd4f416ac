//! Coefficient-model files (JSON, version "1") and built-in models.

use std::path::Path;

use serde::{Deserialize, Serialize};
use steenrod_core::motivic::ModelBuilder;
use steenrod_core::{Bidegree, CoefficientModel, PrimeContext};

use crate::error::CliError;
use crate::expr::to_combination;

pub const BUILTIN: [&str; 3] = ["trivial", "alg-closed", "real-etale"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub version: String,
    pub name: String,
    pub ell: u32,
    #[serde(default = "one")]
    pub d: u32,
    /// Weights are twists read modulo d.
    #[serde(default)]
    pub etale: bool,
    /// Undeclared P- and β-actions are zero instead of an error.
    #[serde(default)]
    pub formal: bool,
    #[serde(default)]
    pub generators: Vec<GeneratorEntry>,
    #[serde(default)]
    pub products: Vec<ProductEntry>,
    #[serde(default)]
    pub p_action: Vec<ActionEntry>,
    #[serde(default)]
    pub bockstein: Vec<BocksteinEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bott: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus_one: Option<String>,
    /// Étale classes H^s(k, μ^{⊗t}) when they differ from the generators' monomials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etale_classes: Option<Vec<ClassEntry>>,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub name: String,
    pub deg: i64,
    #[serde(alias = "twist")]
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub a: u32,
    pub symbol: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BocksteinEntry {
    pub symbol: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub name: String,
    pub deg: i64,
    #[serde(alias = "weight")]
    pub twist: i64,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn build(&self) -> Result<CoefficientModel, CliError> {
        if self.version != "1" {
            return Err(CliError::Domain(format!("unsupported model version {:?}", self.version)));
        }
        let ctx = PrimeContext::new(self.ell, self.d)?;
        let mut b = ModelBuilder::new(&self.name, ctx).etale(self.etale).formal(self.formal);
        for g in &self.generators {
            b = b.generator(&g.name, Bidegree::new(g.deg, g.weight));
        }
        for p in &self.products {
            b = b.product(&p.left, &p.right, to_combination(&p.value)?);
        }
        for p in &self.p_action {
            b = b.p_action(p.a, &p.symbol, to_combination(&p.value)?);
        }
        for p in &self.bockstein {
            b = b.bockstein(&p.symbol, to_combination(&p.value)?);
        }
        if let Some(s) = &self.bott {
            b = b.bott(s);
        }
        if let Some(s) = &self.zeta {
            b = b.zeta(s);
        }
        if let Some(s) = &self.minus_one {
            b = b.minus_one(s);
        }
        for c in self.etale_classes.iter().flatten() {
            b = b.etale_class(&c.name, Bidegree::new(c.deg, c.twist));
        }
        Ok(b.build()?)
    }
}

/// Resolves `--model`: a built-in name or a JSON file. Explicit `--l`/`--d`
/// must agree with a file's prime data.
pub fn load(spec: Option<&str>, ell: Option<u32>, d: Option<u32>) -> Result<CoefficientModel, CliError> {
    let ctx = || PrimeContext::new(ell.unwrap_or(3), d.unwrap_or(1));
    let model = match spec.unwrap_or("trivial") {
        "trivial" => CoefficientModel::trivial(ctx()?),
        "alg-closed" => CoefficientModel::alg_closed(ell.unwrap_or(3))?,
        "real-etale" => CoefficientModel::real_etale(),
        path => {
            let text = std::fs::read_to_string(Path::new(path))
                .map_err(|source| CliError::Io { path: path.into(), source })?;
            let cfg = ModelConfig::from_json(&text).map_err(|source| CliError::ModelFile { path: path.into(), source })?;
            cfg.build()?
        }
    };
    let mctx = model.ctx();
    if ell.is_some_and(|l| l != mctx.ell()) || d.is_some_and(|d| d != mctx.d()) {
        return Err(CliError::Domain(format!(
            "model {} has l={}, d={}, which disagrees with --l/--d",
            model.name(),
            mctx.ell(),
            mctx.d()
        )));
    }
    Ok(model)
}
