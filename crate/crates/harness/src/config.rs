//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Keys are the [`ExperimentConfig`] field names or their short aliases
//! (`sigma`, `R0`, `P0`, `delta`, `r0`, `q0`). Keys left out keep the values of
//! [`ExperimentConfig::separated_regime`].

use std::collections::BTreeSet;
use std::path::Path;

use dcl::fields::ExperimentConfig;
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::separated_regime();
    let mut seen = BTreeSet::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`, got {raw:?}", no + 1)))?;
        let key = canonical_key(key.trim());
        if !seen.insert(key.to_string()) {
            return Err(HarnessError::Config(format!("line {}: {key} given twice", no + 1)));
        }
        cfg.set(key, value.trim()).map_err(|e| HarnessError::Config(format!("line {}: {e}", no + 1)))?;
    }
    cfg.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(cfg)
}

fn canonical_key(key: &str) -> &str {
    match key {
        "sigma" => "heavy_width",
        "R0" => "heavy_offset",
        "P0" => "heavy_momentum",
        "delta" => "light_width",
        "r0" => "light_center",
        "q0" => "light_momentum",
        other => other,
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config(&text)
}

/// The config as it is hashed and written to manifests; parsing it gives the
/// same config back.
pub fn canonical_text(cfg: &ExperimentConfig) -> String {
    cfg.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Hex SHA-256 of [`canonical_text`].
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    Sha256::digest(canonical_text(cfg).as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text_round_trips() {
        let cfg = ExperimentConfig::default_regime();
        assert_eq!(parse_config(&canonical_text(&cfg)).unwrap(), cfg);
        assert_eq!(config_hash(&cfg).len(), 64);
        assert_ne!(config_hash(&cfg), config_hash(&ExperimentConfig::separated_regime()));
    }

    #[test]
    fn comments_aliases_and_defaults() {
        let cfg = parse_config("# header\nalpha = 3   # stronger\n\nq0=2.5\n").unwrap();
        assert_eq!(cfg.alpha, 3.0);
        assert_eq!(cfg.light_momentum, 2.5);
        assert_eq!(cfg.heavy_offset, ExperimentConfig::separated_regime().heavy_offset);
    }

    #[test]
    fn rejects_bad_lines() {
        for text in ["alpha 3", "alpha = 1\nalpha = 2", "q0 = 1\nlight_momentum = 2", "mass = 1", "alpha = x", "alpha = -1"] {
            assert!(matches!(parse_config(text), Err(HarnessError::Config(_))), "{text:?}");
        }
    }
}
