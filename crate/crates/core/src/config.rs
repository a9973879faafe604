//! Run configuration: a flat `key = value` file merged with command-line
//! overrides (command line wins).
//!
//! ```text
//! # sectors, one per line; relative paths resolve against the file's directory
//! sector.SPX = spx.csv
//! sector.USB = usb.csv
//! min_obs = 20
//! zero_tol = 0
//! eps_frac = 0.1
//! pick_frac = 0.25
//! returns = levels
//! forward_fill = false
//! format = both
//! out = out/
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{DEFAULT_EPS_FRAC, DEFAULT_PICK_FRAC};
use crate::error::{Error, Result};
use crate::ingest::DEFAULT_MIN_OBS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnsMode {
    /// Correlate index levels directly.
    #[default]
    Levels,
    /// Correlate daily log-returns.
    Log,
}

impl FromStr for ReturnsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "levels" => Ok(ReturnsMode::Levels),
            "log" => Ok(ReturnsMode::Log),
            other => Err(Error::Validation(format!("returns must be levels or log, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::Validation(format!("format must be csv, json or both, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectorSource {
    pub id: String,
    pub path: PathBuf,
}

impl FromStr for SectorSource {
    type Err = Error;

    /// Parses `ID=path`.
    fn from_str(s: &str) -> Result<Self> {
        let (id, path) = s
            .split_once('=')
            .ok_or_else(|| Error::Validation(format!("sector must be ID=path, got {s}")))?;
        let id = id.trim();
        if id.is_empty() || path.trim().is_empty() {
            return Err(Error::Validation(format!("sector must be ID=path, got {s}")));
        }
        Ok(SectorSource {
            id: id.to_string(),
            path: PathBuf::from(path.trim()),
        })
    }
}

/// Validated configuration of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub sectors: Vec<SectorSource>,
    pub min_obs: usize,
    pub zero_tol: f64,
    pub eps_frac: f64,
    pub pick_frac: f64,
    pub returns: ReturnsMode,
    pub forward_fill: bool,
    /// Not echoed into the manifest so runs into different directories match.
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    /// Defaults for everything except sectors and output directory.
    pub fn new(sectors: Vec<SectorSource>, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            sectors,
            min_obs: DEFAULT_MIN_OBS,
            zero_tol: 0.0,
            eps_frac: DEFAULT_EPS_FRAC,
            pick_frac: DEFAULT_PICK_FRAC,
            returns: ReturnsMode::Levels,
            forward_fill: false,
            out_dir: out_dir.into(),
            format: OutputFormat::Both,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sectors.len() < 3 {
            return Err(Error::Validation(format!(
                "at least 3 sectors required, got {}",
                self.sectors.len()
            )));
        }
        let mut ids = BTreeSet::new();
        let mut paths = BTreeSet::new();
        for s in &self.sectors {
            if !ids.insert(s.id.as_str()) {
                return Err(Error::Validation(format!("duplicate sector id {}", s.id)));
            }
            if !paths.insert(s.path.as_path()) {
                return Err(Error::Validation(format!("path {} used twice", s.path.display())));
            }
        }
        if self.min_obs < 2 {
            return Err(Error::Validation(format!("min_obs must be at least 2, got {}", self.min_obs)));
        }
        if !(self.zero_tol >= 0.0 && self.zero_tol.is_finite()) {
            return Err(Error::Validation(format!("zero_tol must be non-negative, got {}", self.zero_tol)));
        }
        for (name, v) in [("eps_frac", self.eps_frac), ("pick_frac", self.pick_frac)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Validation(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

/// Configuration values that may each be unset; layered file → command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub sectors: Vec<SectorSource>,
    pub min_obs: Option<usize>,
    pub zero_tol: Option<f64>,
    pub eps_frac: Option<f64>,
    pub pick_frac: Option<f64>,
    pub returns: Option<ReturnsMode>,
    pub forward_fill: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

fn parse_value<V: FromStr>(key: &str, raw: &str, line: usize) -> Result<V> {
    raw.parse()
        .map_err(|_| Error::Validation(format!("config line {line}: bad value `{raw}` for {key}")))
}

impl PartialConfig {
    /// Parses config-file text; relative sector and output paths are resolved
    /// against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = PartialConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Validation(format!("config line {line_no}: expected key = value")))?;
            if let Some(id) = key.strip_prefix("sector.") {
                cfg.sectors.push(SectorSource {
                    id: id.to_string(),
                    path: base_dir.join(value),
                });
                continue;
            }
            match key {
                "min_obs" => cfg.min_obs = Some(parse_value(key, value, line_no)?),
                "zero_tol" => cfg.zero_tol = Some(parse_value(key, value, line_no)?),
                "eps_frac" => cfg.eps_frac = Some(parse_value(key, value, line_no)?),
                "pick_frac" => cfg.pick_frac = Some(parse_value(key, value, line_no)?),
                "returns" => cfg.returns = Some(value.parse()?),
                "forward_fill" => cfg.forward_fill = Some(parse_value(key, value, line_no)?),
                "out" => cfg.out_dir = Some(base_dir.join(value)),
                "format" => cfg.format = Some(value.parse()?),
                other => {
                    return Err(Error::Validation(format!("config line {line_no}: unknown key {other}")))
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        PartialConfig::parse(&text, base).map_err(|e| e.context(format!("config {}", path.display())))
    }

    /// Layers `over` on top of `self`. A non-empty sector list replaces ours.
    pub fn merge(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            sectors: if over.sectors.is_empty() { self.sectors } else { over.sectors },
            min_obs: over.min_obs.or(self.min_obs),
            zero_tol: over.zero_tol.or(self.zero_tol),
            eps_frac: over.eps_frac.or(self.eps_frac),
            pick_frac: over.pick_frac.or(self.pick_frac),
            returns: over.returns.or(self.returns),
            forward_fill: over.forward_fill.or(self.forward_fill),
            out_dir: over.out_dir.or(self.out_dir),
            format: over.format.or(self.format),
        }
    }

    /// Fills defaults and validates. `out_dir` defaults to `out`.
    pub fn finish(self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(self.sectors, self.out_dir.unwrap_or_else(|| PathBuf::from("out")));
        if let Some(v) = self.min_obs {
            cfg.min_obs = v;
        }
        if let Some(v) = self.zero_tol {
            cfg.zero_tol = v;
        }
        if let Some(v) = self.eps_frac {
            cfg.eps_frac = v;
        }
        if let Some(v) = self.pick_frac {
            cfg.pick_frac = v;
        }
        if let Some(v) = self.returns {
            cfg.returns = v;
        }
        if let Some(v) = self.forward_fill {
            cfg.forward_fill = v;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
