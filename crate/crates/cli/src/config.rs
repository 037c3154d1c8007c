//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. The keys `seed`,
//! `samples`, `workers` and `out` are typed; every other key is kept as a
//! command parameter. Lists are comma separated and may contain inclusive
//! ranges `a..b` or stepped ranges `a..b:s`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use randpoly::rng::SeedMode;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SAMPLES: u64 = 10_000;
pub const WORKERS_ENV: &str = "RANDPOLY_WORKERS";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub samples: u64,
    /// `None` defers to the environment, then to the number of CPUs.
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub params: BTreeMap<String, String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            workers: None,
            out: None,
            params: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", no + 1))?;
            cfg.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", no + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    /// Inverse of [`ExperimentConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "samples = {}", self.samples).unwrap();
        if let Some(w) = self.workers {
            writeln!(s, "workers = {w}").unwrap();
        }
        if let Some(out) = &self.out {
            writeln!(s, "out = {}", out.display()).unwrap();
        }
        for (k, v) in &self.params {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key.is_empty() || key.contains(char::is_whitespace) {
            bail!("invalid key '{key}'");
        }
        match key {
            "seed" => self.seed = parse_num(key, value)?,
            "samples" => {
                self.samples = parse_num(key, value)?;
                if self.samples == 0 {
                    bail!("samples must be positive");
                }
            }
            "workers" => {
                let w: usize = parse_num(key, value)?;
                self.workers = (w > 0).then_some(w);
            }
            "out" => self.out = Some(PathBuf::from(value)),
            _ => {
                self.params.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn usize_list(&self, key: &str, default: &str) -> Result<Vec<usize>> {
        parse_usize_list(self.param(key).unwrap_or(default)).with_context(|| format!("key '{key}'"))
    }

    pub fn opt_usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.param(key)
            .map(|v| parse_usize_list(v).with_context(|| format!("key '{key}'")))
            .transpose()
    }

    pub fn f64_list(&self, key: &str, default: &str) -> Result<Vec<f64>> {
        parse_f64_list(self.param(key).unwrap_or(default)).with_context(|| format!("key '{key}'"))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.param(key).map_or(Ok(default), |v| parse_num(key, v))
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.param(key).unwrap_or(default)
    }

    pub fn seed_mode(&self) -> Result<SeedMode> {
        match self.str_or("seed_mode", "derived") {
            "derived" => Ok(SeedMode::Derived),
            "direct" => Ok(SeedMode::Direct),
            other => bail!("seed_mode must be 'derived' or 'direct', got '{other}'"),
        }
    }

    /// Worker count: this config, then the environment, then all CPUs (0).
    pub fn resolved_workers(&self) -> Result<usize> {
        if let Some(w) = self.workers {
            return Ok(w);
        }
        match std::env::var(WORKERS_ENV) {
            Ok(v) if !v.trim().is_empty() => parse_num(WORKERS_ENV, v.trim()),
            _ => Ok(0),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("{key}: cannot parse '{value}': {e}"))
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        if let Some((a, rest)) = item.split_once("..") {
            let (b, step) = match rest.split_once(':') {
                Some((b, step)) => (b, parse_num::<usize>("step", step.trim())?),
                None => (rest, 1),
            };
            let a: usize = parse_num("range start", a.trim())?;
            let b: usize = parse_num("range end", b.trim())?;
            if step == 0 || a > b {
                bail!("invalid range '{item}'");
            }
            out.extend((a..=b).step_by(step));
        } else {
            out.push(parse_num("list item", item)?);
        }
    }
    if out.is_empty() {
        bail!("empty list");
    }
    Ok(out)
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| parse_num("list item", x))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        bail!("empty list");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("seed", "42").unwrap();
        cfg.set("workers", "3").unwrap();
        cfg.set("out", "/tmp/x.csv").unwrap();
        cfg.set("bases", "1.2,1.7").unwrap();
        cfg.set("d", "10..14:2").unwrap();
        let text = cfg.to_text();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
        assert_eq!(cfg.usize_list("d", "1").unwrap(), vec![10, 12, 14]);
        assert_eq!(cfg.f64_list("bases", "2").unwrap(), vec![1.2, 1.7]);
        assert_eq!(cfg.usize_list("k", "3,5..6").unwrap(), vec![3, 5, 6]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse("seed 3").is_err());
        assert!(ExperimentConfig::parse("seed = x").is_err());
        assert!(ExperimentConfig::parse("samples = 0").is_err());
        assert!(parse_usize_list("5..3").is_err());
        assert!(parse_usize_list("").is_err());
        let cfg = ExperimentConfig::parse("# comment\n\nseed_mode = sideways\n").unwrap();
        assert!(cfg.seed_mode().is_err());
    }
}
