//! Run configuration: flat `key = value` text, `#` starts a comment.
//!
//! Keys use `_` or `-` interchangeably: `a_max_sphere`, `a_max_torus`, `step`,
//! `tol`, `n_max`, `alpha`, `out`, `threads`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub a_max_sphere: f64,
    pub a_max_torus: f64,
    pub step: f64,
    pub tol: f64,
    pub n_max: usize,
    pub alpha: f64,
    pub out: PathBuf,
    /// Worker threads; 0 lets the pool decide. Results do not depend on it.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            a_max_sphere: 40.0,
            a_max_torus: 50.0,
            step: 0.01,
            tol: 1e-12,
            n_max: 20,
            alpha: 0.1,
            out: PathBuf::from("."),
            threads: 0,
        }
    }
}

pub const KEYS: [&str; 8] = [
    "a_max_sphere",
    "a_max_torus",
    "step",
    "tol",
    "n_max",
    "alpha",
    "out",
    "threads",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse {value:?}")))
}

impl RunConfig {
    /// Sets one key; `key` may use dashes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "a_max_sphere" => self.a_max_sphere = parse(&key, value)?,
            "a_max_torus" => self.a_max_torus = parse(&key, value)?,
            "step" => self.step = parse(&key, value)?,
            "tol" => self.tol = parse(&key, value)?,
            "n_max" => self.n_max = parse(&key, value)?,
            "alpha" => self.alpha = parse(&key, value)?,
            "out" => self.out = PathBuf::from(value),
            "threads" => self.threads = parse(&key, value)?,
            _ => return Err(Error::InvalidParameter(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of the current values.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "line {}: expected key = value, got {raw:?}",
                    i + 1
                ))
            })?;
            self.set(key, value)
                .map_err(|e| Error::InvalidParameter(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.merge_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Inverse of [`RunConfig::from_text`].
    pub fn to_text(&self) -> String {
        format!(
            "a_max_sphere = {:?}\na_max_torus = {:?}\nstep = {:?}\ntol = {:?}\nn_max = {}\nalpha = {:?}\nout = {}\nthreads = {}\n",
            self.a_max_sphere,
            self.a_max_torus,
            self.step,
            self.tol,
            self.n_max,
            self.alpha,
            self.out.display(),
            self.threads
        )
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a_max_sphere", self.a_max_sphere),
            ("a_max_torus", self.a_max_torus),
            ("step", self.step),
            ("tol", self.tol),
            ("alpha", self.alpha),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{key} must be positive, got {v}"
                )));
            }
        }
        if self.step > self.a_max_sphere.min(self.a_max_torus) {
            return Err(Error::InvalidParameter(format!(
                "step {} exceeds the grid length",
                self.step
            )));
        }
        if self.n_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_max must be >= 2, got {}",
                self.n_max
            )));
        }
        if self.n_max > crate::harmonics::MAX_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "n_max above {} is not supported",
                crate::harmonics::MAX_DEGREE
            )));
        }
        if self.alpha > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if self.out.as_os_str().is_empty() {
            return Err(Error::InvalidParameter("out must not be empty".into()));
        }
        Ok(())
    }
}
