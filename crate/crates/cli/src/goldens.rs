//! Golden reference values checked by `erw report`.

use std::path::Path;

use erw_core::exact_engine::{asymptotic_constant, exact_mean_xi, lower_bound_prob_one};
use erw_core::gamma_kernel::c;
use erw_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const BUILTIN: &str = include_str!("../goldens.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    C,
    AsymptoticConstant,
    ExactMean,
    ProbOneProduct,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Golden {
    pub name: String,
    pub quantity: Quantity,
    pub n: Option<u64>,
    pub xi: Option<f64>,
    pub p: Option<f64>,
    pub beta: Option<f64>,
    pub value: f64,
    pub rel_tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GoldenFile {
    golden: Vec<Golden>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenCheck {
    pub golden: Golden,
    pub computed: Option<f64>,
    pub rel_error: Option<f64>,
    pub error: Option<String>,
    pub pass: bool,
}

pub fn parse(text: &str, origin: &str) -> CliResult<Vec<Golden>> {
    let file: GoldenFile = toml::from_str(text)
        .map_err(|e| CliError::Config(format!("malformed goldens file {origin}: {e}")))?;
    Ok(file.golden)
}

pub fn load(path: Option<&Path>) -> CliResult<Vec<Golden>> {
    match path {
        None => parse(BUILTIN, "(built in)"),
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => parse(&text, &path.display().to_string()),
            Err(e) => Err(CliError::MissingData {
                what: format!("goldens file {} ({e})", path.display()),
                hint: "drop --goldens to use the built-in reference values, or point it at a TOML file \
                       with [[golden]] entries as described in docs/schema.md"
                    .into(),
            }),
        },
    }
}

fn need<T: Copy>(x: Option<T>, field: &str, g: &Golden) -> Result<T, String> {
    x.ok_or_else(|| format!("golden {:?} is missing `{field}`", g.name))
}

fn compute(g: &Golden) -> Result<f64, String> {
    let model = || -> Result<ModelParams, String> {
        ModelParams::new(need(g.p, "p", g)?, need(g.beta, "beta", g)?).map_err(|e| e.to_string())
    };
    match g.quantity {
        Quantity::C => c(need(g.n, "n", g)?, need(g.xi, "xi", g)?).map_err(|e| e.to_string()),
        Quantity::AsymptoticConstant => asymptotic_constant(&model()?).map_err(|e| e.to_string()),
        Quantity::ExactMean => {
            let n = need(g.n, "n", g)?;
            if n < 1 {
                return Err("exact_mean needs n >= 1".into());
            }
            Ok(exact_mean_xi(n, &model()?))
        }
        Quantity::ProbOneProduct => lower_bound_prob_one(&model()?, need(g.n, "n", g)?)
            .map(|b| b.truncated_product)
            .map_err(|e| e.to_string()),
    }
}

pub fn check(g: &Golden) -> GoldenCheck {
    match compute(g) {
        Ok(v) => {
            let rel = ((v - g.value) / g.value).abs();
            GoldenCheck { golden: g.clone(), computed: Some(v), rel_error: Some(rel), error: None, pass: rel <= g.rel_tol }
        }
        Err(e) => GoldenCheck { golden: g.clone(), computed: None, rel_error: None, error: Some(e), pass: false },
    }
}
