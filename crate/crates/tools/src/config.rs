//! Run configuration: clap flags layered over an optional flat `key=value`
//! config file over built-in defaults. All fields arrive as `Option` so the
//! precedence (flags > file > defaults) is a plain `or` chain, and the fully
//! resolved configuration is echoed into every output artifact.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

/// Configuration / usage errors (exit status 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

/// Parsed `key=value` file: one pair per line, `#` comments, blank lines
/// ignored. Keys must belong to the invoked subcommand.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    entries: HashMap<String, String>,
    consumed: std::cell::RefCell<Vec<String>>,
}

impl FileConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config file {}: {e}", path.display())))?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                ));
            };
            if entries
                .insert(key.trim().to_string(), value.trim().to_string())
                .is_some()
            {
                return err(format!(
                    "{}:{}: duplicate key {:?}",
                    path.display(),
                    lineno + 1,
                    key.trim()
                ));
            }
        }
        Ok(Self {
            entries,
            consumed: std::cell::RefCell::new(Vec::new()),
        })
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> ConfigResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.consumed.borrow_mut().push(key.to_string());
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| ConfigError(format!("config key {key}={raw:?}: {e}"))),
        }
    }

    pub fn get_string(&self, key: &str) -> Option<String> {
        self.consumed.borrow_mut().push(key.to_string());
        self.entries.get(key).cloned()
    }

    /// Reject keys that no resolver consumed (typo protection).
    pub fn finish(&self) -> ConfigResult<()> {
        let consumed = self.consumed.borrow();
        let unknown: Vec<&String> = self
            .entries
            .keys()
            .filter(|k| !consumed.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            let mut names: Vec<String> = unknown.iter().map(|s| s.to_string()).collect();
            names.sort();
            err(format!("unknown config keys: {}", names.join(", ")))
        }
    }
}

/// Comma/semicolon separated list of f64.
pub fn parse_f64_list(raw: &str, what: &str) -> ConfigResult<Vec<f64>> {
    let mut out = Vec::new();
    for piece in raw.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        match piece.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(e) => return err(format!("{what}: bad entry {piece:?}: {e}")),
        }
    }
    if out.is_empty() {
        return err(format!("{what}: empty list"));
    }
    Ok(out)
}

/// Complex amplitude list `re,im;re,im;...` (or bare reals `re;re;...`).
pub fn parse_complex_list(raw: &str, what: &str) -> ConfigResult<Vec<Complex64>> {
    let mut out = Vec::new();
    for piece in raw.split(';') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let z = match piece.split_once(',') {
            Some((re, im)) => {
                let re: f64 = re
                    .trim()
                    .parse()
                    .map_err(|e| ConfigError(format!("{what}: bad real part {re:?}: {e}")))?;
                let im: f64 = im
                    .trim()
                    .parse()
                    .map_err(|e| ConfigError(format!("{what}: bad imag part {im:?}: {e}")))?;
                Complex64::new(re, im)
            }
            None => {
                let re: f64 = piece
                    .parse()
                    .map_err(|e| ConfigError(format!("{what}: bad entry {piece:?}: {e}")))?;
                Complex64::new(re, 0.0)
            }
        };
        out.push(z);
    }
    if out.is_empty() {
        return err(format!("{what}: empty list"));
    }
    Ok(out)
}

/// Key-value echo of a fully resolved configuration, embedded as `#`
/// comments in every artifact and printed on request.
#[derive(Debug, Clone, Default)]
pub struct ResolvedEcho {
    pairs: Vec<(String, String)>,
}

impl ResolvedEcho {
    pub fn new(subcommand: &str) -> Self {
        let mut s = Self::default();
        s.push("subcommand", subcommand);
        s
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.pairs.push((key.to_string(), value.to_string()));
    }

    pub fn comment_lines(&self) -> Vec<String> {
        self.pairs
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.pairs {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

/// Resolve an output path: explicit flag wins, else default file name in the
/// current directory.
pub fn resolve_out(flag: Option<PathBuf>, file: Option<String>, default_name: &str) -> PathBuf {
    flag.or(file.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(default_name))
}
