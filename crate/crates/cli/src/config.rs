//! Flat `key = value` experiment configs with one section per module.
//!
//! ```text
//! seed = 7
//! out = runs/abs
//!
//! [scheme]
//! action = rates
//! problem = abs-cone
//! h = 2^-6..2^-9
//! ```

use crate::error::CliError;
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const MODULES: [&str; 9] =
    ["path", "convex", "solve", "chars", "scheme", "semilinear", "scl", "acceptance", "catalog"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    /// Module section, one of [`MODULES`].
    pub command: String,
    pub action: String,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(command: &str, action: &str) -> Self {
        Self { command: command.into(), action: action.into(), ..Self::default() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut section: Option<String> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| CliError::Config(format!("line {}: {msg}", no + 1));
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| at("unterminated section header".into()))?.trim();
                if section.is_some() {
                    return Err(at("only one module section per config".into()));
                }
                if !MODULES.contains(&name) {
                    return Err(at(format!("unknown module section [{name}]")));
                }
                cfg.command = name.into();
                section = Some(name.into());
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| at(format!("expected key = value, got {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(at("empty key".into()));
            }
            match (&section, k) {
                (None, "seed") => cfg.seed = Some(v.parse().map_err(|_| at(format!("seed {v:?} is not an integer")))?),
                (None, "out") => cfg.out = Some(PathBuf::from(v)),
                (None, _) => return Err(at(format!("key {k:?} must sit inside a module section"))),
                (Some(_), "action") => cfg.action = v.into(),
                (Some(_), _) => {
                    if cfg.params.insert(k.into(), v.into()).is_some() {
                        return Err(at(format!("duplicate key {k:?}")));
                    }
                }
            }
        }
        if cfg.command.is_empty() {
            return Err(CliError::Usage("empty config: expected a module section such as [scheme]".into()));
        }
        Ok(cfg)
    }

    /// Text form that [`parse`](Self::parse) reads back to an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(seed) = self.seed {
            s.push_str(&format!("seed = {seed}\n"));
        }
        if let Some(out) = &self.out {
            s.push_str(&format!("out = {}\n", out.display()));
        }
        s.push_str(&format!("\n[{}]\n", self.command));
        if !self.action.is_empty() {
            s.push_str(&format!("action = {}\n", self.action));
        }
        for (k, v) in &self.params {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.params.get(key).map(String::as_str).unwrap_or(default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.params.get(key).map_or(Ok(default), |v| parse_number(v).map_err(|e| bad(key, e)))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.params.get(key).map_or(Ok(default), |v| v.parse().map_err(|_| bad(key, format!("{v:?} is not a count"))))
    }

    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        self.params.get(key).map_or(Ok(default.to_vec()), |v| parse_list(v).map_err(|e| bad(key, e)))
    }

    pub fn seed_or(&self, default: u64) -> u64 {
        self.seed.unwrap_or(default)
    }
}

fn bad(key: &str, msg: String) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

/// Decimal numbers and powers `b^e` (`2^-7`).
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: f64 = b.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
        let e: i32 = e.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        return Ok(b.powi(e));
    }
    s.parse().map_err(|_| format!("{s:?} is not a number"))
}

/// Comma lists, or `b^e1..b^e2` for every integer exponent in between.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let (ba, ea) = a.trim().split_once('^').ok_or_else(|| format!("range {s:?} needs powers, e.g. 2^-6..2^-9"))?;
        let (bb, eb) = b.trim().split_once('^').ok_or_else(|| format!("range {s:?} needs powers, e.g. 2^-6..2^-9"))?;
        if ba.trim() != bb.trim() {
            return Err(format!("range {s:?} mixes bases"));
        }
        let base: f64 = ba.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
        let (e0, e1): (i32, i32) = (
            ea.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?,
            eb.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?,
        );
        let step = if e1 >= e0 { 1 } else { -1 };
        let mut out = vec![];
        let mut e = e0;
        loop {
            out.push(base.powi(e));
            if e == e1 {
                break;
            }
            e += step;
        }
        return Ok(out);
    }
    s.split(',').map(parse_number).collect()
}
