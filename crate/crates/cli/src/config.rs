//! `key = value` defaults files.
//!
//! Each key names a long flag (without the dashes). Values are spliced into
//! the argument list ahead of the user's own flags, so flags given on the
//! command line win.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected `key = value`, got `{}`", lineno + 1, raw.trim());
        };
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            bail!("line {}: invalid key `{key}`", lineno + 1);
        }
        entries.push((key.to_owned(), value.trim().to_owned()));
    }
    Ok(entries)
}

pub fn load(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
    parse(&text).with_context(|| format!("in config file {}", path.display()))
}

/// Finds the value of `--config` in raw arguments.
pub fn find_config_arg(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_owned());
        }
    }
    None
}

/// Turns config entries into flags. Boolean flags take `true`/`false`.
pub fn to_flags(entries: &[(String, String)], is_switch: impl Fn(&str) -> bool) -> Result<Vec<String>> {
    let mut flags = Vec::new();
    for (key, value) in entries {
        if is_switch(key) {
            match value.as_str() {
                "true" | "1" | "yes" => flags.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                other => bail!("`{key}` expects true or false, got `{other}`"),
            }
        } else {
            flags.push(format!("--{key}={value}"));
        }
    }
    Ok(flags)
}
