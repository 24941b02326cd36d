//! `key = value` run configuration.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use screening_core::discrimination::DiscriminationConfig;
use screening_core::{ModelParams, SharingMatrix, Variant, WorkerPartition, WorkerSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub kind: ErrorKind,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Parse => "parse error",
            ErrorKind::Validation => "invalid config",
        };
        match self.line {
            Some(l) => write!(f, "{kind} at line {l}: {}", self.message),
            None => write!(f, "{kind}: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn parse_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { kind: ErrorKind::Parse, line: Some(line), message: message.into() }
}

fn invalid(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError { kind: ErrorKind::Validation, line, message: message.into() }
}

pub const KEYS: &[&str] = &[
    "s_low", "s_high", "p", "beta", "delta", "d", "n_workers", "rho", "rho_matrix", "partition_s", "partition_p",
    "q_reluctant", "game", "y_set", "ell", "alpha", "c", "mode",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub matrix: SharingMatrix,
    pub partition: WorkerPartition,
    pub discrimination: Option<DiscriminationConfig>,
}

impl RunConfig {
    pub fn variant(&self) -> Variant {
        self.params.variant
    }
}

struct Entries<'a> {
    map: HashMap<&'a str, (usize, &'a str)>,
}

impl<'a> Entries<'a> {
    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|&(l, _)| l)
    }

    fn raw(&self, key: &str) -> Option<(usize, &'a str)> {
        self.map.get(key).copied()
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(key)
            .map(|(l, v)| v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| parse_err(l, format!("{key}: expected a number, got '{v}'"))))
            .transpose()
    }

    fn required(&self, key: &str) -> Result<f64, ConfigError> {
        self.number(key)?.ok_or_else(|| invalid(None, format!("missing required key '{key}'")))
    }

    fn set(&self, key: &str, n: usize) -> Result<Option<WorkerSet>, ConfigError> {
        let Some((l, v)) = self.raw(key) else { return Ok(None) };
        parse_set(v, n).map(Some).map_err(|m| parse_err(l, format!("{key}: {m}")))
    }
}

/// Comma- or space-separated worker ids below `n`.
pub fn parse_set(text: &str, n: usize) -> Result<WorkerSet, String> {
    let mut set = WorkerSet::empty();
    for tok in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let id: usize = tok.parse().map_err(|_| format!("'{tok}' is not a worker id"))?;
        if id >= n {
            return Err(format!("worker {id} out of range for {n} workers"));
        }
        set = set.with(id);
    }
    Ok(set)
}

/// Whitespace-separated square grid.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| format!("matrix line {}: '{t}' is not a number", i + 1)))
                .collect()
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_in(text, None)
}

/// Parses `text`, resolving a relative `rho_matrix` path against `base`.
pub fn parse_config_in(text: &str, base: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| parse_err(line, format!("expected 'key = value', got '{body}'")))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(parse_err(line, format!("unknown key '{k}'")));
        }
        if let Some((first, _)) = map.insert(k, (line, v)) {
            return Err(parse_err(line, format!("duplicate key '{k}' (first set at line {first})")));
        }
    }
    build(&Entries { map }, base)
}

fn build(e: &Entries, base: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let variant = match e.raw("game") {
        None => Variant::Simple,
        Some((l, v)) => Variant::from_name(v).map_err(|_| parse_err(l, format!("game: expected simple or alternating, got '{v}'")))?,
    };
    let s_low = e.required("s_low")?;
    let s_high = e.required("s_high")?;
    let p = e.required("p")?;
    let beta = e.required("beta")?;
    let delta = e.required("delta")?;
    let d = e.required("d")?;
    let n_raw = e.required("n_workers")?;
    let n_line = e.line("n_workers");
    if n_raw.fract() != 0.0 || !(1.0..=64.0).contains(&n_raw) {
        return Err(invalid(n_line, "n_workers must be an integer in 1..=64"));
    }
    let n = n_raw as usize;
    let range = |key: &str, ok: bool, what: &str| if ok { Ok(()) } else { Err(invalid(e.line(key), format!("{key} {what}"))) };
    range("s_low", s_low > 0.0, "must be positive")?;
    range("s_high", s_high > s_low, "must exceed s_low")?;
    range("p", p > 0.0 && p < 1.0, "must lie in (0, 1)")?;
    range("beta", beta > 0.0 && beta <= 1.0, "must lie in (0, 1]")?;
    range("delta", delta > 0.0 && delta < 1.0, "must lie in (0, 1)")?;
    range("d", d > 0.0, "must be positive")?;
    let params = ModelParams::new(s_low, s_high, p, beta, delta, d, n, variant).map_err(|err| invalid(None, err.to_string()))?;

    let matrix = match (e.number("rho")?, e.raw("rho_matrix")) {
        (Some(_), Some((l, _))) => return Err(parse_err(l, "set either rho or rho_matrix, not both")),
        (None, None) => return Err(invalid(None, "missing required key 'rho' (or 'rho_matrix')")),
        (Some(rho), None) => {
            range("rho", (0.0..=1.0).contains(&rho), "must lie in [0, 1]")?;
            SharingMatrix::scalar(n, rho).map_err(|err| invalid(e.line("rho"), err.to_string()))?
        }
        (None, Some((l, path))) => {
            let full = base.map_or_else(|| Path::new(path).to_path_buf(), |b| b.join(path));
            let text = std::fs::read_to_string(&full).map_err(|err| invalid(Some(l), format!("rho_matrix: cannot read {}: {err}", full.display())))?;
            let rows = parse_matrix(&text).map_err(|m| invalid(Some(l), format!("rho_matrix: {m}")))?;
            if rows.len() != n {
                return Err(invalid(Some(l), format!("rho_matrix has {} rows for {n} workers", rows.len())));
            }
            SharingMatrix::from_rows(rows).map_err(|err| invalid(Some(l), format!("rho_matrix: {err}")))?
        }
    };

    let all = WorkerSet::full(n);
    let screeners = e.set("partition_s", n)?;
    let reluctant = e.set("partition_p", n)?;
    let q = e.number("q_reluctant")?;
    let (screeners, reluctant) = match (screeners, reluctant) {
        (None, None) => (all, WorkerSet::empty()),
        (Some(s), None) => (s, all.difference(s)),
        (None, Some(r)) => (all.difference(r), r),
        (Some(s), Some(r)) => (s, r),
    };
    let part_line = e.line("partition_p").or(e.line("partition_s"));
    if !reluctant.is_empty() && q.is_none() {
        return Err(invalid(part_line, "q_reluctant is required when partition_p is nonempty"));
    }
    let partition = if reluctant.is_empty() && screeners == all {
        WorkerPartition::all_screeners(&params)
    } else {
        WorkerPartition::new(screeners, reluctant, q.unwrap_or(1.0), &params)
            .map_err(|err| invalid(e.line("q_reluctant").or(part_line), err.to_string()))?
    };

    let disc_keys = ["y_set", "ell", "alpha", "c", "mode"];
    let discrimination = if disc_keys.iter().any(|k| e.raw(k).is_some()) {
        let y = e.set("y_set", n)?.ok_or_else(|| invalid(None, "discrimination block needs 'y_set'"))?;
        let mode = e.raw("mode").map_or("perception", |(_, v)| v);
        let cfg = DiscriminationConfig::new(y, e.number("ell")?.unwrap_or(0.0), e.number("alpha")?.unwrap_or(0.0), e.number("c")?.unwrap_or(0.0), mode)
            .map_err(|err| invalid(e.line("mode"), err.to_string()))?;
        cfg.validate(&params).map_err(|err| invalid(None, err.to_string()))?;
        Some(cfg)
    } else {
        None
    };

    Ok(RunConfig { params, matrix, partition, discrimination })
}
