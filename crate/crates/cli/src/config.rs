//! Layered settings: command line, then `TMOMENTS_*` environment, then a
//! flat `key = value` file, then built-in defaults.

use anyhow::{anyhow, Context, Result};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

/// Keys accepted in a config file, named after the long flags.
pub const KNOWN_KEYS: &[&str] = &[
    "a",
    "b",
    "c",
    "theta",
    "T",
    "tmin",
    "tmax",
    "points",
    "variant",
    "cache",
    "out",
    "format",
    "tol",
    "threads",
    "nodes",
    "max-phase",
    "exec",
    "seed",
    "envelope-max",
    "slope-slack",
    "theorem",
    "method",
    "limit",
    "epsilon",
    "keep",
    "components",
];

/// Marks errors caused by the invocation rather than the computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(|e| usage(format!("{e:#}")))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
            let k = k.trim().trim_start_matches("--");
            if !KNOWN_KEYS.contains(&k) {
                return Err(usage(format!("config line {}: unknown key '{k}'", i + 1)));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    /// `flag` if given, else the file value for `key`.
    pub fn pick<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key '{key}': {e}"))),
        }
    }

    pub fn pick_or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(key, flag)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.pick(key, flag)?
            .ok_or_else(|| usage(format!("missing required setting --{key}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_yield_to_flags() {
        let f = FileConfig::parse("# run\na = 2\n--theta=0.25 # trailing\n").unwrap();
        assert_eq!(f.pick::<u32>("a", None).unwrap(), Some(2));
        assert_eq!(f.pick("a", Some(5u32)).unwrap(), Some(5));
        assert_eq!(f.pick_or("theta", None, 0.5).unwrap(), 0.25);
        assert_eq!(f.pick::<u32>("b", None).unwrap(), None);
        assert!(f.require::<u32>("b", None).is_err());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(FileConfig::parse("nonsense").is_err());
        assert!(FileConfig::parse("colour = red").is_err());
        let f = FileConfig::parse("a = x").unwrap();
        assert!(f.pick::<u32>("a", None).is_err());
    }
}
