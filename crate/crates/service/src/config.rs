//! Service configuration. Precedence, lowest first: built-in defaults, the
//! key=value config file, `FSN_*` environment variables, command-line flags.

use std::net::IpAddr;
use std::path::PathBuf;

use clap::Parser;
use fsn_core::ElasticityParams;
use thiserror::Error;

pub const DEFAULT_PORT: u16 = 8420;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {reason}")]
    Unreadable { path: PathBuf, reason: String },
    #[error("config line {line}: expected key=value")]
    BadLine { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("theta must lie in (0, 1]")]
    InvalidTheta,
    #[error("invalid elasticity parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Default, Parser)]
#[command(name = "fsn-service", about = "Serve an FSN knowledge base over HTTP")]
pub struct Cli {
    /// TCP port to listen on [default: 8420]
    #[arg(long)]
    pub port: Option<u16>,
    /// Directory holding the journal
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// FSN link threshold in (0, 1]
    #[arg(long)]
    pub theta: Option<f64>,
    /// Load the news knowledge base when the journal is empty
    #[arg(long)]
    pub seed_fixture: bool,
    /// key=value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub bind: IpAddr,
    pub port: u16,
    pub data_dir: PathBuf,
    pub theta: f64,
    pub seed_fixture: bool,
    pub params: ElasticityParams,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            bind: IpAddr::from([127, 0, 0, 1]),
            port: DEFAULT_PORT,
            data_dir: PathBuf::from("fsn-data"),
            theta: 0.3,
            seed_fixture: false,
            params: ElasticityParams::default(),
        }
    }
}

const KEYS: [&str; 9] = [
    "bind",
    "port",
    "data_dir",
    "theta",
    "seed_fixture",
    "modulus",
    "yield_strain",
    "necking_strain",
    "post_yield_slope",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        }),
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::BadLine { line: i + 1 })?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(ConfigError::UnknownKey(k.to_string()));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "bind" => self.bind = parse(key, value)?,
            "port" => self.port = parse(key, value)?,
            "data_dir" => self.data_dir = PathBuf::from(value.trim()),
            "theta" => self.theta = parse(key, value)?,
            "seed_fixture" => self.seed_fixture = parse_bool(key, value)?,
            "modulus" => self.params.modulus = parse(key, value)?,
            "yield_strain" => self.params.yield_strain = parse(key, value)?,
            "necking_strain" => self.params.necking_strain = parse(key, value)?,
            "post_yield_slope" => self.params.post_yield_slope = parse(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Layers file, environment and flags over the defaults. `env` looks up
    /// a variable by name.
    pub fn resolve(cli: &Cli, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        let file = cli.config.clone().or_else(|| env("FSN_CONFIG").map(PathBuf::from));
        if let Some(path) = file {
            let text = std::fs::read_to_string(&path).map_err(|e| ConfigError::Unreadable {
                path: path.clone(),
                reason: e.to_string(),
            })?;
            for (k, v) in parse_file(&text)? {
                cfg.set(&k, &v)?;
            }
        }
        for key in KEYS {
            if let Some(v) = env(&format!("FSN_{}", key.to_uppercase())) {
                cfg.set(key, &v)?;
            }
        }
        if let Some(p) = cli.port {
            cfg.port = p;
        }
        if let Some(d) = &cli.data_dir {
            cfg.data_dir = d.clone();
        }
        if let Some(t) = cli.theta {
            cfg.theta = t;
        }
        if cli.seed_fixture {
            cfg.seed_fixture = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(ConfigError::InvalidTheta);
        }
        self.params
            .validate()
            .map_err(|e| ConfigError::InvalidParams(e.to_string()))
    }
}
