//! Output files and experiment configs.
//!
//! Every output file starts with `#` comment lines giving the tool version,
//! a hash of the run configuration and the seed. Numbers are written in
//! scientific notation with 16 significant digits, independent of locale.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{GlassError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub config_hash: String,
    pub seed: u64,
}

impl Header {
    /// Hash of a canonical configuration text.
    pub fn new(canonical_config: &str, seed: u64) -> Self {
        let digest = Sha256::digest(canonical_config.as_bytes());
        let mut hex = String::with_capacity(64);
        for b in digest {
            let _ = write!(hex, "{b:02x}");
        }
        Header { config_hash: hex, seed }
    }

    fn render(&self) -> String {
        format!(
            "# glasscape {VERSION}\n# config_hash {}\n# seed {}\n",
            self.config_hash, self.seed
        )
    }
}

/// `x` with 16 significant digits; `inf`, `-inf`, `nan` for non-finite values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.15e}")
    }
}

/// A cell of a CSV row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

pub fn render_csv(header: &Header, columns: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.render();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Structured text: one `key value` pair per line.
pub fn render_summary(header: &Header, pairs: &[(&str, Cell)]) -> String {
    let mut out = header.render();
    for (k, v) in pairs {
        out.push_str(k);
        out.push(' ');
        out.push_str(&v.render());
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Parse a `key value` file into ordered pairs, skipping blanks and `#`
/// comments. Duplicate keys are rejected.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut out: Vec<(String, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.splitn(2, char::is_whitespace);
        let key = it.next().unwrap_or_default().to_string();
        let value = it.next().map(str::trim).unwrap_or_default().to_string();
        if value.is_empty() {
            return Err(GlassError::Parse {
                line: i + 1,
                msg: format!("key `{key}` has no value"),
            });
        }
        if out.iter().any(|(k, _, _)| *k == key) {
            return Err(GlassError::Parse {
                line: i + 1,
                msg: format!("duplicate key `{key}`"),
            });
        }
        out.push((key, value, i + 1));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exploratory,
    Test,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exploratory" => Ok(Mode::Exploratory),
            "test" => Ok(Mode::Test),
            other => Err(format!("unknown mode `{other}` (exploratory|test)")),
        }
    }
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exploratory => "exploratory",
            Mode::Test => "test",
        }
    }
}

/// Experiment config file. Every key is optional; command-line flags take
/// precedence over values given here.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub mixture_file: Option<PathBuf>,
    pub n: Option<usize>,
    pub q: Option<f64>,
    pub beta: Option<f64>,
    pub replicas: Option<usize>,
    pub chains: Option<usize>,
    pub sweeps: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| GlassError::Parse {
        line,
        msg: format!("bad value for `{key}`: {e}"),
    })
}

impl ExperimentConfig {
    /// Parse config text. A relative `mixture_file` is resolved against
    /// `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (key, value, line) in parse_key_values(text)? {
            match key.as_str() {
                "mixture_file" => {
                    let p = PathBuf::from(&value);
                    cfg.mixture_file = Some(match base_dir {
                        Some(d) if p.is_relative() => d.join(p),
                        _ => p,
                    });
                }
                "n" => cfg.n = Some(parse_value(&key, &value, line)?),
                "q" => cfg.q = Some(parse_value(&key, &value, line)?),
                "beta" => cfg.beta = Some(parse_value(&key, &value, line)?),
                "replicas" => cfg.replicas = Some(parse_value(&key, &value, line)?),
                "chains" => cfg.chains = Some(parse_value(&key, &value, line)?),
                "sweeps" => cfg.sweeps = Some(parse_value(&key, &value, line)?),
                "seed" => cfg.seed = Some(parse_value(&key, &value, line)?),
                "mode" => cfg.mode = Some(parse_value(&key, &value, line)?),
                other => {
                    return Err(GlassError::Parse {
                        line,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }
}
