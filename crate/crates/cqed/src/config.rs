//! Flat `key = value` configuration with `[section]` headers.
//!
//! Keys are command-line flag names without the leading dashes. `[common]`
//! applies to every subcommand that accepts the key; `[<subcommand>]`
//! applies to that subcommand only. Flags given on the command line win.

use crate::error::{Error, Result};

pub const COMMON_SECTION: &str = "common";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    pub path: String,
    pub entries: Vec<Entry>,
}

impl Config {
    pub fn parse(path: &str, text: &str) -> Result<Self> {
        let mut section = COMMON_SECTION.to_string();
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| Error::ConfigParse {
                path: path.to_string(),
                line,
                message,
            };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|n| !n.is_empty())
                    .ok_or_else(|| err(format!("malformed section header `{body}`")))?;
                section = name.to_string();
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{body}`")))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(err(format!("invalid key `{key}`")));
            }
            entries.push(Entry {
                section: section.clone(),
                key: key.replace('_', "-"),
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(Self {
            path: path.to_string(),
            entries,
        })
    }

    /// Entries for `subcommand`, `[common]` first so section values win.
    pub fn for_subcommand<'a>(&'a self, subcommand: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        let common = self.entries.iter().filter(|e| e.section == COMMON_SECTION);
        let own = self.entries.iter().filter(move |e| e.section == subcommand);
        common.chain(own)
    }
}
