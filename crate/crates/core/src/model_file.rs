//! JSON model files.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "risks": [{ "beta": 0.12, "weights": [0.4, 0.6] }, ...],
//!   "kernel": { "family": "laplace", "t": 1.0 },
//!   "alphas": [{ "indices": [1, 2], "value": 16.0 }, ...],
//!   "portfolios": [[1, 2], [3, 4]],
//!   "deductibles": { "d1": 40.0, "d2": 30.0 }
//! }
//! ```
//!
//! Risk indices are 1-based. Unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::erlang::MixedErlang;
use crate::error::{Error, Result};
use crate::kernel::{KernelFamily, KernelSpec};
use crate::reinsurance::ReinsuranceProgram;
use crate::sarmanov::{validate_model, SarmanovModel, Subset, ValidationReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: u32,
    pub risks: Vec<RiskEntry>,
    pub kernel: KernelEntry,
    #[serde(default)]
    pub alphas: Vec<AlphaEntry>,
    pub portfolios: Vec<Vec<usize>>,
    pub deductibles: Deductibles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskEntry {
    pub beta: f64,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelEntry {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaEntry {
    pub indices: Vec<usize>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Deductibles {
    pub d1: f64,
    pub d2: f64,
}

/// A structurally valid model file, with its admissibility verdict.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub model: SarmanovModel,
    pub program: ReinsuranceProgram,
    pub validation: ValidationReport,
}

fn at(path: &str, e: Error) -> Error {
    let msg = match e {
        Error::InvalidModel(m) | Error::InvalidProgram(m) | Error::Domain(m) | Error::Unsupported(m) => m,
        other => other.to_string(),
    };
    Error::Parse(format!("{path}: {msg}"))
}

fn subset(path: &str, indices: &[usize], n: usize) -> Result<Subset> {
    for (k, &i) in indices.iter().enumerate() {
        if i == 0 || i > n {
            return Err(Error::Parse(format!("{path}[{k}]: risk index {i} outside 1..={n}")));
        }
        if indices[..k].contains(&i) {
            return Err(Error::Parse(format!("{path}[{k}]: risk index {i} repeated")));
        }
    }
    Subset::from_indices(indices.iter().map(|i| i - 1)).map_err(|e| at(path, e))
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Parse(format!("{path}: {inner}"))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    /// Structural checks and conversion; admissibility is reported, not enforced.
    pub fn build(&self) -> Result<LoadedModel> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!("schema: unsupported version {}, expected {SCHEMA_VERSION}", self.schema)));
        }
        if self.risks.is_empty() {
            return Err(Error::Parse("risks: at least one risk is required".into()));
        }
        let n = self.risks.len();
        let marginals = self
            .risks
            .iter()
            .enumerate()
            .map(|(i, r)| MixedErlang::new(r.beta, r.weights.clone()).map_err(|e| at(&format!("risks[{i}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        let family: KernelFamily = self.kernel.family.parse().map_err(|e| at("kernel.family", e))?;
        let kernel = KernelSpec::new(family, self.kernel.t).map_err(|e| at("kernel.t", e))?;
        let mut alphas = Vec::with_capacity(self.alphas.len());
        for (k, a) in self.alphas.iter().enumerate() {
            let path = format!("alphas[{k}].indices");
            let t = subset(&path, &a.indices, n)?;
            if t.len() < 2 {
                return Err(Error::Parse(format!("{path}: a dependence term needs at least two risks")));
            }
            if let Some(j) = self.alphas[..k].iter().position(|b| subset("", &b.indices, n).ok() == Some(t)) {
                return Err(Error::Parse(format!("{path}: same subset as alphas[{j}]")));
            }
            if !a.value.is_finite() {
                return Err(Error::Parse(format!("alphas[{k}].value: must be finite")));
            }
            alphas.push((t, a.value));
        }
        let model = SarmanovModel::new(marginals, kernel, alphas).map_err(|e| at("alphas", e))?;
        if self.portfolios.len() != 2 {
            return Err(Error::Parse(format!("portfolios: expected two portfolios, got {}", self.portfolios.len())));
        }
        let p1 = subset("portfolios[0]", &self.portfolios[0], n)?;
        let p2 = subset("portfolios[1]", &self.portfolios[1], n)?;
        let program = ReinsuranceProgram::new(p1, p2, self.deductibles.d1, self.deductibles.d2)
            .map_err(|e| at("portfolios", e))?;
        program.check_against(&model).map_err(|e| at("portfolios", e))?;
        let validation = validate_model(&model)?;
        Ok(LoadedModel { model, program, validation })
    }
}

/// Parse and structurally validate model text; the admissibility verdict
/// is in [`LoadedModel::validation`].
pub fn parse_model_str(text: &str) -> Result<LoadedModel> {
    ModelFile::from_json(text)?.build()
}

pub fn parse_model(path: &Path) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_model_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// The models behind the published tables.
pub mod fixtures {
    pub const INDEPENDENCE: &str = include_str!("../fixtures/tables_independence.json");
    pub const LAPLACE: &str = include_str!("../fixtures/tables_laplace.json");
    pub const FGM: &str = include_str!("../fixtures/tables_fgm.json");

    /// `(name, json)` in table column order.
    pub const ALL: [(&str, &str); 3] = [("independence", INDEPENDENCE), ("laplace", LAPLACE), ("fgm", FGM)];

    pub fn by_name(name: &str) -> Option<&'static str> {
        ALL.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, j)| *j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sarmanov::ValidationStatus;

    #[test]
    fn fixtures_parse() {
        let f = parse_model_str(fixtures::FGM).unwrap();
        assert_eq!(f.model.dim(), 4);
        assert_eq!(f.model.alphas().len(), 11);
        assert_eq!(f.model.alpha(Subset::from_indices([0, 1]).unwrap()), 0.6);
        assert_eq!(f.program.d1, 40.0);
        assert_eq!(f.validation.status, ValidationStatus::Violation);
        let i = parse_model_str(fixtures::INDEPENDENCE).unwrap();
        assert!(i.model.is_independent() && i.validation.is_ok());
        let l = parse_model_str(fixtures::LAPLACE).unwrap();
        assert_eq!(l.model.kernel(), KernelSpec::Laplace { t: 1.0 });
    }

    #[test]
    fn round_trip() {
        let f = ModelFile::from_json(fixtures::LAPLACE).unwrap();
        assert_eq!(ModelFile::from_json(&f.to_json()).unwrap(), f);
    }

    fn edit(f: impl FnOnce(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(fixtures::FGM).unwrap();
        f(&mut v);
        v.to_string()
    }

    fn err(text: &str) -> String {
        match parse_model_str(text) {
            Err(Error::Parse(m)) => m,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_field_paths() {
        let m = err(&edit(|v| v["alphas"][2]["indices"] = serde_json::json!([1, 1])));
        assert!(m.starts_with("alphas[2].indices[1]:"), "{m}");
        let m = err(&edit(|v| v["alphas"][0]["indices"] = serde_json::json!([1, 9])));
        assert!(m.contains("outside"), "{m}");
        let m = err(&edit(|v| v["risks"][1]["weights"] = serde_json::json!([0.5, 0.6])));
        assert!(m.starts_with("risks[1]:"), "{m}");
        let m = err(&edit(|v| v["risks"][0]["extra"] = serde_json::json!(1)));
        assert!(m.starts_with("risks[0].extra:") && m.contains("unknown field"), "{m}");
        let m = err(&edit(|v| v["kernel"]["family"] = serde_json::json!("gumbel")));
        assert!(m.starts_with("kernel.family:"), "{m}");
        let m = err(&edit(|v| v["schema"] = serde_json::json!(2)));
        assert!(m.starts_with("schema:"), "{m}");
        let m = err(&edit(|v| v["portfolios"] = serde_json::json!([[1, 2], [3]])));
        assert!(m.starts_with("portfolios:"), "{m}");
        let m = err(&edit(|v| v["deductibles"]["d1"] = serde_json::json!("forty")));
        assert!(m.starts_with("deductibles.d1:"), "{m}");
    }

    #[test]
    fn empty_alphas_is_independence() {
        let t = edit(|v| v["alphas"] = serde_json::json!([]));
        assert!(parse_model_str(&t).unwrap().model.is_independent());
        let t = edit(|v| {
            v.as_object_mut().unwrap().remove("alphas");
        });
        assert!(parse_model_str(&t).unwrap().model.is_independent());
    }
}
