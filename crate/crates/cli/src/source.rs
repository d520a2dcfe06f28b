//! Game sources: JSON files and generator specs like `dag:v=6,e=10,n=3`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use pqlab::format::AnyGame;
use pqlab::game::CongestionGame;
use pqlab::instances::{
    g_ell, inject_chains, matching_pennies, r_ell, random_bimatrix, random_dag, random_graphical, random_step_spec,
    step_links,
};
use pqlab::oracle::step_game;
use pqlab::{Error, Rational};

/// A generator name with `key=value` parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub kind: String,
    pub params: BTreeMap<String, String>,
}

impl GenSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut params = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| invalid(format!("generator parameter {item:?} is not key=value")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { kind: kind.trim().to_string(), params })
    }

    pub fn get(&self, key: &str) -> Result<Option<u64>> {
        self.params
            .get(key)
            .map(|v| v.parse::<u64>().map_err(|_| invalid(format!("{key}={v} is not a number"))))
            .transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.get(key)?.map_or(default, |v| v as usize))
    }

    pub fn require(&self, key: &str) -> Result<usize> {
        self.get(key)?.map(|v| v as usize).ok_or_else(|| invalid(format!("generator {} needs {key}=", self.kind)))
    }

    /// The seed from the generator string, else from `--seed`; randomized kinds need one.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64> {
        self.get("seed")?
            .or(flag)
            .ok_or_else(|| invalid(format!("generator {} is randomized and needs a seed", self.kind)))
    }
}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Error::InvalidSpec(msg.into()))
}

pub fn generate(spec: &GenSpec, seed: Option<u64>) -> Result<AnyGame<Rational>> {
    let game = match spec.kind.as_str() {
        "random" => {
            let k = spec.get("k")?.map(|v| v as usize);
            let rows =
                spec.get("rows")?.map(|v| v as usize).or(k).ok_or_else(|| invalid("random needs k= or rows="))?;
            let cols = spec.get("cols")?.map(|v| v as usize).or(k).unwrap_or(rows);
            AnyGame::Bimatrix(random_bimatrix(rows, cols, spec.seed(seed)?)?)
        }
        "pennies" => AnyGame::Bimatrix(matching_pennies(spec.usize_or("k", 2)?)?),
        "g-ell" => AnyGame::Bimatrix(g_ell(spec.require("ell")?)?),
        "r-ell" => AnyGame::Bimatrix(r_ell(spec.require("k")?, spec.require("ell")?)?),
        "graphical" => AnyGame::Graphical(random_graphical(
            spec.require("n")?,
            spec.usize_or("k", 2)?,
            spec.usize_or("d", 1)?,
            spec.seed(seed)?,
        )?),
        "step" => {
            let spec_links =
                random_step_spec(spec.require("m")?, spec.require("n")?, spec.usize_or("steps", 3)?, spec.seed(seed)?)?;
            AnyGame::Congestion(step_links(&spec_links)?)
        }
        "appendix" => AnyGame::Congestion(step_game(spec.require("n")?, spec.require("i")?)?),
        "dag" => {
            let s = spec.seed(seed)?;
            let base: CongestionGame<Rational> =
                random_dag(spec.require("v")?, spec.require("e")?, spec.usize_or("n", 2)?, s)?;
            let chains = spec.usize_or("chains", 0)?;
            AnyGame::Congestion(if chains > 0 { inject_chains(&base, chains, s)? } else { base })
        }
        other => bail!(Error::InvalidSpec(format!("unknown generator {other:?}"))),
    };
    Ok(game)
}

pub fn read_game(path: &Path) -> Result<AnyGame<Rational>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(AnyGame::from_json(&text)?)
}

/// The game from `--game` or `--gen`, exactly one of which must be given.
pub fn load(file: Option<&Path>, gen: Option<&str>, seed: Option<u64>) -> Result<AnyGame<Rational>> {
    match (file, gen) {
        (Some(path), None) => read_game(path),
        (None, Some(spec)) => generate(&GenSpec::parse(spec)?, seed),
        _ => Err(invalid("give exactly one of --game and --gen")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        let s = GenSpec::parse("step:m=2,n=1024").unwrap();
        assert_eq!(s.kind, "step");
        assert_eq!(s.require("n").unwrap(), 1024);
        assert!(s.seed(None).is_err());
        assert_eq!(s.seed(Some(4)).unwrap(), 4);
        assert!(GenSpec::parse("dag:v").is_err());
        assert_eq!(GenSpec::parse("pennies").unwrap().params.len(), 0);
    }
}
