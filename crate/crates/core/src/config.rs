//! `key = value` configuration files.
//!
//! One pair per line; `#` starts a comment that runs to the end of the
//! line; blank lines are ignored. Keys may repeat only where the consumer
//! asks for every value (see [`KeyValues::all`]).

use std::path::Path;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl FromStr for KeyValues {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key = value, got {line:?}", i + 1)))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(Error::Format(format!("line {}: empty key", i + 1)));
            }
            entries.push((key.to_string(), v.trim().to_string()));
        }
        Ok(KeyValues { entries })
    }
}

impl KeyValues {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        std::fs::read_to_string(path)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?
            .parse()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    /// The value of a key that may appear at most once.
    pub fn get(&self, key: &str) -> Result<Option<&str>> {
        let mut found = self.entries.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let first = found.next();
        if found.next().is_some() {
            return Err(Error::InvalidParameter(format!("config key '{key}' given more than once")));
        }
        Ok(first)
    }

    /// Every value of a repeatable key, in file order.
    pub fn all(&self, key: &str) -> Vec<&str> {
        self.entries.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
    }

    /// Replaces every value of `key` with `values` (appending if absent).
    pub fn set<S: Into<String>>(&mut self, key: &str, values: impl IntoIterator<Item = S>) {
        self.entries.retain(|(k, _)| k != key);
        self.entries.extend(values.into_iter().map(|v| (key.to_string(), v.into())));
    }

    /// Parsed value of a single-valued key.
    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?
            .map(|v| {
                v.parse()
                    .map_err(|e| Error::InvalidParameter(format!("config key '{key}': {e}")))
            })
            .transpose()
    }

    /// Fails on the first key not in `known`.
    pub fn check_known(&self, known: &[&str]) -> Result<()> {
        match self.keys().find(|k| !known.contains(k)) {
            Some(k) => Err(Error::InvalidParameter(format!("unknown config key '{k}'"))),
            None => Ok(()),
        }
    }
}
