//! Global run settings. Precedence: config file, then flags, then the
//! `STRINGFORGE_THREADS` environment variable, then defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub format: Format,
    /// `None` leaves rayon at the number of available cores.
    pub threads: Option<usize>,
    pub seed: u64,
    /// Truncation order for `specialize` when `--order` is absent.
    pub order: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { format: Format::Text, threads: None, seed: 0, order: 6 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub order: Option<u32>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = self.order {
            cfg.order = o;
        }
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Overrides> {
    let mut seen = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", n + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        if seen.insert(key.to_string(), value.to_string()).is_some() {
            bail!("config line {}: `{key}` set twice", n + 1);
        }
    }
    let mut out = Overrides::default();
    for (key, value) in &seen {
        let bad = || format!("config key `{key}`: cannot read `{value}`");
        match key.as_str() {
            "format" => out.format = Some(Format::from_str(value, true).map_err(|_| anyhow::anyhow!(bad()))?),
            "threads" => out.threads = Some(positive(value).with_context(bad)?),
            "seed" => out.seed = Some(value.parse().with_context(bad)?),
            "order" => out.order = Some(value.parse().with_context(bad)?),
            _ => bail!("unknown config key `{key}`"),
        }
    }
    Ok(out)
}

fn positive(s: &str) -> Result<usize> {
    let n: usize = s.parse()?;
    if n == 0 {
        bail!("thread count must be positive");
    }
    Ok(n)
}

pub fn resolve(config_file: Option<&Path>, flags: &Overrides, env_threads: Option<&str>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(t) = env_threads {
        cfg.threads = Some(positive(t).with_context(|| format!("STRINGFORGE_THREADS=`{t}`"))?);
    }
    flags.apply(&mut cfg);
    if let Some(path) = config_file {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        parse_config(&text)?.apply(&mut cfg);
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let o = parse_config("# run\nformat = json\nthreads=2  # two\n\nseed = 7\norder = 4\n").unwrap();
        assert_eq!(o.format, Some(Format::Json));
        assert_eq!(o.threads, Some(2));
        assert_eq!(o.seed, Some(7));
        assert_eq!(o.order, Some(4));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_config("threads").is_err());
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("threads = 0").is_err());
        assert!(parse_config("seed = 1\nseed = 2").is_err());
    }

    #[test]
    fn precedence() {
        let dir = std::env::temp_dir().join(format!("sf-config-{}", std::process::id()));
        fs::write(&dir, "threads = 3\n").unwrap();
        let flags = Overrides { threads: Some(2), format: Some(Format::Json), ..Default::default() };
        let cfg = resolve(Some(&dir), &flags, Some("1")).unwrap();
        fs::remove_file(&dir).unwrap();
        assert_eq!(cfg.threads, Some(3));
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(resolve(None, &flags, Some("1")).unwrap().threads, Some(2));
        assert_eq!(resolve(None, &Overrides::default(), Some("1")).unwrap().threads, Some(1));
        assert_eq!(resolve(None, &Overrides::default(), None).unwrap(), RunConfig::default());
    }
}
