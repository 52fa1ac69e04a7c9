use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use cuneitext::baselines::{SamplingMode, DEFAULT_LAMBDA};
use cuneitext::chunk::DEFAULT_MAX_LEN;
use cuneitext::corpus::SplitRatios;
use cuneitext::eval::ChrfParams;
use cuneitext::rng::DEFAULT_SEED;
use cuneitext::{CollisionPolicy, SignList};
use serde::Serialize;

use crate::args::{Mode, Settings};

pub const DEFAULT_FACTOR: u32 = 5;
pub const DEFAULT_ORDER: usize = 2;

/// Settings after merging flags over the config file over defaults. This is
/// what run.json records, so it leaves out the worker count.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub signlist: Option<PathBuf>,
    pub catalogue: Option<PathBuf>,
    pub seed: u64,
    pub ratios: SplitRatios,
    pub chrf: ChrfParams,
    pub mode: SamplingMode,
    pub k: usize,
    pub lambda: f64,
    pub factor: u32,
    pub max_len: usize,
    pub first_wins: bool,
    pub ascii_upper_brackets: bool,
    #[serde(skip)]
    pub workers: Option<usize>,
}

fn read_config(path: &Path) -> anyhow::Result<Settings> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let parsed = if is_json {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        toml::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("parsing config {}", path.display()))
}

impl RunConfig {
    pub fn resolve(flags: &Settings) -> anyhow::Result<Self> {
        let file = match &flags.config {
            Some(path) => read_config(path)?,
            None => Settings::default(),
        };
        macro_rules! pick {
            ($field:ident) => {
                flags.$field.clone().or(file.$field.clone())
            };
        }
        let ratios = match pick!(ratios) {
            Some(s) => s.parse::<SplitRatios>()?,
            None => SplitRatios::default(),
        };
        let defaults = ChrfParams::default();
        let chrf = ChrfParams {
            beta: pick!(beta).unwrap_or(defaults.beta),
            max_order: pick!(order).unwrap_or(defaults.max_order),
            include_specials: pick!(include_specials).unwrap_or(defaults.include_specials),
            whitespace_removed: true,
            eq1_literal: flags.eq1_literal || file.eq1_literal,
        };
        chrf.validate()?;
        let config = RunConfig {
            signlist: pick!(signlist),
            catalogue: pick!(catalogue),
            seed: pick!(seed).unwrap_or(DEFAULT_SEED),
            ratios,
            chrf,
            mode: match pick!(mode) {
                Some(Mode::Argmax) => SamplingMode::Argmax,
                Some(Mode::Weighted) | None => SamplingMode::Weighted,
            },
            k: pick!(k).unwrap_or(DEFAULT_ORDER),
            lambda: pick!(lambda).unwrap_or(DEFAULT_LAMBDA),
            factor: pick!(factor).unwrap_or(DEFAULT_FACTOR),
            max_len: pick!(max_len).unwrap_or(DEFAULT_MAX_LEN),
            first_wins: flags.first_wins || file.first_wins,
            ascii_upper_brackets: flags.ascii_upper_brackets || file.ascii_upper_brackets,
            workers: pick!(workers),
        };
        if config.workers == Some(0) {
            bail!("--workers must be at least 1");
        }
        Ok(config)
    }

    pub fn sign_list(&self) -> anyhow::Result<SignList> {
        let Some(path) = &self.signlist else {
            return Ok(SignList::mini());
        };
        let bytes =
            std::fs::read(path).with_context(|| format!("reading sign list {}", path.display()))?;
        let policy = if self.first_wins {
            CollisionPolicy::FirstWins
        } else {
            CollisionPolicy::Strict
        };
        SignList::load(&bytes, policy)
            .with_context(|| format!("loading sign list {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(
            &path,
            r#"{"seed": 3, "k": 4, "include-specials": false, "first-wins": true}"#,
        )
        .unwrap();
        let flags = Settings {
            config: Some(path),
            k: Some(1),
            ..Settings::default()
        };
        let cfg = RunConfig::resolve(&flags).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.k, 1);
        assert!(!cfg.chrf.include_specials);
        assert!(cfg.first_wins);
        assert_eq!(cfg.max_len, DEFAULT_MAX_LEN);
        assert_eq!(cfg.factor, DEFAULT_FACTOR);
    }

    #[test]
    fn defaults_without_config() {
        let cfg = RunConfig::resolve(&Settings::default()).unwrap();
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.ratios, SplitRatios::default());
        assert_eq!(cfg.mode, SamplingMode::Weighted);
        assert!(RunConfig::resolve(&Settings {
            workers: Some(0),
            ..Settings::default()
        })
        .is_err());
    }
}
