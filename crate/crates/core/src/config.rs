//! Text configs: algebras with their operator (TOML), morphisms (TOML),
//! pairing runs (TOML) and MC elements (JSON). Paths inside a config are
//! relative to the file that names them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{parse_monomial_rule, parse_series, Algebra, GeneratorSpec, ParamSpec, Ring, Truncation};
use crate::hodge::PairingSpec;
use crate::mc::McElement;
use crate::morphisms::{BvMorphism, LinearRuleMap};
use crate::operators::{BvInstance, Component, HbarOperator, PolyDiffOperator, RuleTable};

/// One `h`-component: operator text, or a table of `monomial -> value` rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentConfig {
    Text(String),
    Rules { rules: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorConfig {
    /// `Δ_0, Δ_1, …`
    pub components: Vec<ComponentConfig>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraConfig {
    pub name: String,
    pub m: i64,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    pub operator: OperatorConfig,
}

impl AlgebraConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Builds the instance; `trunc` overrides the config's truncation.
    pub fn build(&self, trunc: Option<Truncation>) -> Result<BvInstance> {
        let trunc = trunc.or(self.truncation).unwrap_or_default();
        let alg = Arc::new(Algebra::new(&self.name, self.generators.clone(), self.m)?);
        let plain = Ring::plain(alg.clone(), trunc);
        let comps = self
            .operator
            .components
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let degree = HbarOperator::component_degree(&alg, k);
                Ok(match c {
                    ComponentConfig::Text(t) => Component::Poly(PolyDiffOperator::parse(&plain, t, Some(degree))?),
                    ComponentConfig::Rules { rules } => {
                        let table = rules
                            .iter()
                            .map(|r| parse_monomial_rule(&plain, &plain, r))
                            .collect::<Result<BTreeMap<_, _>>>()?;
                        Component::Table(RuleTable::new(&plain, degree, table)?)
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let delta = HbarOperator::new(&alg, comps)?;
        Ok(BvInstance::new(alg, delta, trunc))
    }
}

/// `f_k` as rule lists; monomials up to `complete_up_to` without a rule
/// get an explicit zero rule in `f_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismConfig {
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete_up_to: Option<u32>,
    pub components: Vec<Vec<String>>,
}

impl MorphismConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self, source: BvInstance, target: BvInstance) -> Result<BvMorphism> {
        let src = Ring::plain(source.algebra.clone(), source.truncation);
        let tgt = Ring::plain(target.algebra.clone(), source.truncation);
        let mut rules = self
            .components
            .iter()
            .map(|lines| {
                lines
                    .iter()
                    .map(|l| parse_monomial_rule(&src, &tgt, l))
                    .collect::<Result<BTreeMap<_, _>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(n) = self.complete_up_to {
            if rules.is_empty() {
                rules.push(BTreeMap::new());
            }
            for m in source.algebra.monomials_up_to(n) {
                if !rules.iter().any(|t| t.contains_key(&m)) {
                    rules[0].insert(m, tgt.zero());
                }
            }
        }
        BvMorphism::new(source, target, LinearRuleMap { rules })
    }
}

/// An MC element: parameters, `γ` as element text, optional labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaConfig {
    pub params: Vec<ParamSpec>,
    pub gamma: String,
    #[serde(default)]
    pub labels: Vec<String>,
}

impl GammaConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self, inst: &BvInstance) -> Result<McElement> {
        let ring = inst.ring().with_params(self.params.clone())?;
        let g = parse_series(&ring, &self.gamma)?;
        McElement::new(ring, g, self.labels.clone())
    }
}

/// A pairing run: the morphism, both tables, windows, and optionally an
/// MC element for the twisted checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingConfig {
    pub morphism: String,
    #[serde(default = "default_window")]
    pub window: u32,
    #[serde(default = "default_pole_window")]
    pub pole_window: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    pub source: PairingSpec,
    pub target: PairingSpec,
}

fn default_window() -> u32 {
    8
}

fn default_pole_window() -> u32 {
    3
}

impl PairingConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// `name` relative to the directory of `base`.
pub fn resolve(base: &Path, name: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(name)
}

pub fn load_algebra(path: &Path, trunc: Option<Truncation>) -> Result<BvInstance> {
    AlgebraConfig::parse(&read(path)?)?.build(trunc)
}

/// Loads a morphism with its source and target; both algebras use the
/// source's truncation.
pub fn load_morphism(path: &Path, trunc: Option<Truncation>) -> Result<BvMorphism> {
    let cfg = MorphismConfig::parse(&read(path)?)?;
    let source = load_algebra(&resolve(path, &cfg.source), trunc)?;
    let target = load_algebra(&resolve(path, &cfg.target), Some(source.truncation))?;
    cfg.build(source, target)
}

pub fn load_gamma(path: &Path, inst: &BvInstance) -> Result<McElement> {
    GammaConfig::parse(&read(path)?)?.build(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A1: &str = r#"
name = "A1"
m = 1
generators = [{ name = "t", degree = 0 }, { name = "dt", degree = -1 }]
operator = { components = ["t * d/ddt", "d/dt d/ddt"] }
"#;

    #[test]
    fn algebra_round_trip() {
        let cfg = AlgebraConfig::parse(A1).unwrap();
        let again = AlgebraConfig::parse(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
        let inst = cfg.build(Some(Truncation::new(6, 3, 0))).unwrap();
        assert_eq!(inst.algebra.generators().len(), 2);
    }

    #[test]
    fn table_components() {
        let text = r#"
name = "A1"
m = 1
generators = [{ name = "t", degree = 0 }, { name = "dt", degree = -1 }]
operator = { components = [{ rules = ["dt -> t", "t*dt -> t^2"] }, "d/dt d/ddt"] }
"#;
        let inst = AlgebraConfig::parse(text).unwrap().build(None).unwrap();
        let r = inst.ring();
        let v = crate::operators::LinearOp::apply(&inst.delta, &r, &parse_series(&r, "t*dt").unwrap()).unwrap();
        assert_eq!(v, parse_series(&r, "t^2 + h").unwrap());
    }

    #[test]
    fn parse_errors_are_parse_errors() {
        assert!(matches!(AlgebraConfig::parse("name = 3"), Err(Error::Parse(_))));
        assert!(matches!(GammaConfig::parse("{"), Err(Error::Parse(_))));
    }
}
