//! TOML tower descriptions.
//!
//! ```toml
//! name = "T"
//! p = 2
//! k = 1               # optional
//! modulus = [1, 1, 1] # optional, little-endian, monic
//! terms = [
//!   { c = 1, i = 21 },
//!   { v = 1, c = "[0,1]", i = 5 },
//! ]
//! ```

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use zptower::gf::FieldCtx;
use zptower::tower::{Term, TowerSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: Option<String>,
    p: u32,
    #[serde(default = "one")]
    k: u32,
    modulus: Option<Vec<u32>>,
    terms: Vec<RawTerm>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    #[serde(default)]
    v: u32,
    c: toml::Value,
    i: u64,
}

/// A parsed spec plus any warnings raised while reading it.
#[derive(Debug)]
pub struct LoadedSpec {
    pub spec: TowerSpec,
    pub warnings: Vec<String>,
}

pub fn parse_spec(text: &str, default_name: &str) -> Result<LoadedSpec> {
    let raw: RawSpec = toml::from_str(text).context("malformed spec file")?;
    let field = match &raw.modulus {
        Some(m) => FieldCtx::with_modulus(raw.p, raw.k, m)?,
        None => FieldCtx::new(raw.p, raw.k)?,
    };
    let field = Arc::new(field);
    if raw.terms.is_empty() {
        bail!("spec has no terms");
    }
    let mut terms = Vec::with_capacity(raw.terms.len());
    let mut warnings = Vec::new();
    for t in &raw.terms {
        let c = match &t.c {
            toml::Value::Integer(n) => field.from_int(*n),
            toml::Value::String(s) => field.parse(s)?,
            other => return Err(anyhow!("coefficient must be an integer or a string, got {other}")),
        };
        if t.i % raw.p as u64 == 0 {
            warnings.push(format!("exponent {} is divisible by p = {}; it will be normalized", t.i, raw.p));
        }
        terms.push(Term { v: t.v, c, i: t.i });
    }
    let name = raw.name.unwrap_or_else(|| default_name.to_string());
    Ok(LoadedSpec { spec: TowerSpec::new(field, terms, name)?, warnings })
}

pub fn load_spec(path: &Path) -> Result<LoadedSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("tower");
    parse_spec(&text, stem).with_context(|| format!("in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms_and_warns() {
        let s = parse_spec("name = \"t\"\np = 3\nterms = [{ c = 1, i = 5 }, { c = -1, i = 6 }]\n", "x").unwrap();
        assert_eq!(s.spec.terms.len(), 2);
        assert_eq!(s.spec.terms[1].c, s.spec.field.from_int(2));
        assert_eq!(s.warnings.len(), 1);
        let g = parse_spec("p = 2\nk = 2\nterms = [{ v = 1, c = \"[0,1]\", i = 3 }]\n", "x").unwrap();
        assert_eq!(g.spec.name, "x");
        assert_eq!(g.spec.terms[0].c, g.spec.field.gen());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_spec("p = 4\nterms = [{ c = 1, i = 5 }]", "x").is_err());
        assert!(parse_spec("p = 2\nterms = []", "x").is_err());
        assert!(parse_spec("p = 2\nterms = [{ c = 1.5, i = 5 }]", "x").is_err());
        assert!(parse_spec("p = 2\nk = 2\nmodulus = [1, 0, 1]\nterms = [{ c = 1, i = 5 }]", "x").is_err());
        assert!(parse_spec("p = 2\nextra = 1\nterms = [{ c = 1, i = 5 }]", "x").is_err());
    }
}
