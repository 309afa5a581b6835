//! Run configuration: config-file parsing, flag/file merging, grid
//! specifications, and the error classification that drives exit codes.
//!
//! The configuration format is flat `key = value` text grouped under
//! `[section]` headers, where the sections are the subcommand names plus
//! `[run]` for execution options. CLI flags mirror config keys 1:1 and
//! take precedence; every override is recorded so the run summary can
//! report which file values were replaced.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

/// Error classified by process exit code:
/// 1 I/O, 2 configuration, 3 convergence, 4 singular system.
#[derive(Debug)]
pub enum CliError {
    /// Filesystem or runtime failure (exit 1).
    Io(String),
    /// Invalid flags, config keys, or parameter values (exit 2).
    Config(String),
    /// A solver failed to reach its tolerance or iteration budget (exit 3).
    Convergence(String),
    /// A linear system was numerically singular / degenerate (exit 4).
    Singular(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Singular(_) => 4,
        }
    }

    /// Prefix the message with the sweep point where the failure occurred.
    pub fn at_point(self, index: usize, var: &str, value: f64) -> Self {
        let wrap = |m: String| format!("sweep point {index} ({var} = {value}): {m}");
        match self {
            CliError::Io(m) => CliError::Io(wrap(m)),
            CliError::Config(m) => CliError::Config(wrap(m)),
            CliError::Convergence(m) => CliError::Convergence(wrap(m)),
            CliError::Singular(m) => CliError::Singular(wrap(m)),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Convergence(m) => write!(f, "convergence failure: {m}"),
            CliError::Singular(m) => write!(f, "singular system: {m}"),
        }
    }
}

/// `require(cond, "e-c must be > 0")` → configuration error when violated.
pub fn require(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg.to_string()))
    }
}

// ─────────────────────────── grid specifications ───────────────────────────

/// Uniform sweep grid parsed from `START:STOP:POINTS`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    /// Parse `START:STOP:POINTS`, enforcing `points ≥ 2` and `start < stop`.
    pub fn parse(key: &str, text: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!(
                "{key} must have the form START:STOP:POINTS (got `{text}`)"
            )));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| {
            CliError::Config(format!("{key}: start `{}` is not a real number", parts[0]))
        })?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| {
            CliError::Config(format!("{key}: stop `{}` is not a real number", parts[1]))
        })?;
        let points: usize = parts[2].trim().parse().map_err(|_| {
            CliError::Config(format!("{key}: points `{}` is not an integer", parts[2]))
        })?;
        require(start.is_finite() && stop.is_finite(), &format!("{key}: bounds must be finite"))?;
        require(points >= 2, &format!("{key}: points must be >= 2 (got {points})"))?;
        require(start < stop, &format!("{key}: start must be < stop"))?;
        Ok(Self { start, stop, points })
    }

    /// The grid values in ascending order; both endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    /// Canonical `START:STOP:POINTS` form for the summary echo.
    pub fn canonical(&self) -> String {
        format!("{}:{}:{}", self.start, self.stop, self.points)
    }
}

// ───────────────────────────── config files ─────────────────────────────

/// Recognized sections and their keys. Anything else is rejected.
const SECTION_KEYS: &[(&str, &[&str])] = &[
    ("bands", &["e-c", "e-j", "q-grid", "temp", "levels", "n-max"]),
    ("squid", &["e-j", "e-c", "e-l", "phi-e-grid"]),
    (
        "flux-rate",
        &["nu-grid", "eps", "a", "delta", "gamma1", "gamma2", "g", "temp", "mode"],
    ),
    ("detector", &["sweep", "gamma-ratio"]),
    ("run", &["threads", "output"]),
];

fn section_keys(section: &str) -> Option<&'static [&'static str]> {
    SECTION_KEYS
        .iter()
        .find(|(name, _)| *name == section)
        .map(|(_, keys)| *keys)
}

/// Parsed config file: section name → key → raw value string.
#[derive(Debug, Default)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn section(&self, name: &str) -> Option<&BTreeMap<String, String>> {
        self.sections.get(name)
    }
}

/// Read and parse a config file; unknown sections or keys are rejected.
pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    parse(&text)
}

fn parse(text: &str) -> Result<ConfigFile, CliError> {
    let mut file = ConfigFile::default();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = inner.trim().to_string();
            if section_keys(&name).is_none() {
                return Err(CliError::Config(format!(
                    "line {n}: unknown section [{name}]"
                )));
            }
            file.sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {n}: expected `key = value`, a [section] header, or a # comment (got `{line}`)"
            )));
        };
        let key = k.trim().to_string();
        let value = v.trim().to_string();
        let Some(section) = current.clone() else {
            return Err(CliError::Config(format!(
                "line {n}: key `{key}` appears before any [section] header"
            )));
        };
        let allowed = section_keys(&section).expect("section validated on entry");
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "line {n}: unknown key `{key}` in section [{section}]"
            )));
        }
        let entries = file.sections.get_mut(&section).expect("section present");
        if entries.insert(key.clone(), value).is_some() {
            return Err(CliError::Config(format!(
                "line {n}: duplicate key `{key}` in section [{section}]"
            )));
        }
    }
    Ok(file)
}

// ───────────────────────── flag / file resolution ─────────────────────────

/// Merges one config-file section with the corresponding CLI flags.
/// Flags win; every key where a flag replaced a file value is recorded.
pub struct Resolver<'a> {
    section: Option<&'a BTreeMap<String, String>>,
    /// Keys where a CLI flag overrode a config-file value.
    pub overridden: Vec<String>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: Option<&'a ConfigFile>, section: &str) -> Self {
        Self {
            section: file.and_then(|f| f.section(section)),
            overridden: Vec::new(),
        }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.section.and_then(|s| s.get(key)).map(String::as_str)
    }

    fn note_override(&mut self, key: &str) {
        if self.raw(key).is_some() {
            self.overridden.push(key.to_string());
        }
    }

    pub fn f64_opt(&mut self, key: &str, flag: Option<f64>) -> Result<Option<f64>, CliError> {
        if let Some(v) = flag {
            self.note_override(key);
            return Ok(Some(v));
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s.parse::<f64>().map(Some).map_err(|_| {
                CliError::Config(format!("config key {key}: `{s}` is not a real number"))
            }),
        }
    }

    pub fn f64(&mut self, key: &str, flag: Option<f64>, default: Option<f64>) -> Result<f64, CliError> {
        match self.f64_opt(key, flag)? {
            Some(v) => Ok(v),
            None => default.ok_or_else(|| missing(key)),
        }
    }

    pub fn usize_opt(&mut self, key: &str, flag: Option<usize>) -> Result<Option<usize>, CliError> {
        if let Some(v) = flag {
            self.note_override(key);
            return Ok(Some(v));
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s.parse::<usize>().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "config key {key}: `{s}` is not a non-negative integer"
                ))
            }),
        }
    }

    pub fn usize(
        &mut self,
        key: &str,
        flag: Option<usize>,
        default: Option<usize>,
    ) -> Result<usize, CliError> {
        match self.usize_opt(key, flag)? {
            Some(v) => Ok(v),
            None => default.ok_or_else(|| missing(key)),
        }
    }

    pub fn string_opt(&mut self, key: &str, flag: Option<&str>) -> Result<Option<String>, CliError> {
        if let Some(v) = flag {
            self.note_override(key);
            return Ok(Some(v.to_string()));
        }
        Ok(self.raw(key).map(str::to_string))
    }

    pub fn string(&mut self, key: &str, flag: Option<&str>) -> Result<String, CliError> {
        self.string_opt(key, flag)?.ok_or_else(|| missing(key))
    }

    pub fn grid(&mut self, key: &str, flag: Option<&str>) -> Result<GridSpec, CliError> {
        let text = self.string(key, flag)?;
        GridSpec::parse(key, &text)
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!(
        "missing required parameter `{key}` (pass --{key} or set it in the config file)"
    ))
}
