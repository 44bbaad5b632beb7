//! TOML run configuration. Every key is optional; command-line flags win.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

pub const CONFIG_ENV: &str = "GLKIT_CONFIG";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub strict_soft: Option<bool>,
    pub budget_secs: Option<f64>,
    pub timing: Option<bool>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub capelli: CapelliSection,
    #[serde(default)]
    pub tau: TauSection,
    #[serde(default)]
    pub star: StarSection,
    #[serde(default)]
    pub whittaker: WhittakerSection,
    #[serde(default)]
    pub hecke: HeckeSection,
    #[serde(default)]
    pub counting: CountingSection,
    #[serde(default)]
    pub eisenstein: EisensteinSection,
    #[serde(default)]
    pub exponents: ExponentsSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapelliSection {
    pub n: Option<usize>,
    pub extended: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauSection {
    pub cases: Option<usize>,
    pub nmax: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarSection {
    pub n: Option<usize>,
    pub order: Option<usize>,
    pub pairs: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhittakerSection {
    pub n: Option<usize>,
    pub q: Option<String>,
    pub deg: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeckeSection {
    pub p: Option<u64>,
    pub j: Option<i64>,
    pub pair: Option<String>,
    pub bound: Option<u64>,
    pub ratio_bound: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountingSection {
    pub pair: Option<String>,
    pub sweep: Option<String>,
    pub lemma_cases: Option<usize>,
    pub max_len: Option<usize>,
    pub distance_samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EisensteinSection {
    #[serde(rename = "T")]
    pub t: Option<u64>,
    pub tgrid: Option<String>,
    #[serde(rename = "L")]
    pub l: Option<i64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsSection {
    pub nmax: Option<i64>,
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// The explicit path if given, else the file named by `GLKIT_CONFIG`, else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::from_path(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::from_path(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_tables_parse() {
        let c: Config = toml::from_str(
            "seed = 3\n[tolerances]\nmain-term = 5.0\n[eisenstein]\nT = 64\nL = 40\n[hecke]\npair = \"gl3-gl2\"\n",
        )
        .unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.eisenstein.t, Some(64));
        assert_eq!(c.eisenstein.l, Some(40));
        assert_eq!(c.tolerances["main-term"], 5.0);
        assert_eq!(c.hecke.pair.as_deref(), Some("gl3-gl2"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Config>("sede = 3").is_err());
        assert!(toml::from_str::<Config>("[star]\nordre = 3").is_err());
    }
}
