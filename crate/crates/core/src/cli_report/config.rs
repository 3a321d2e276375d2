//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::profile::fmt17;
use crate::settings::Settings;

pub const OUTPUT_ENV: &str = "BN6_OUTPUT_DIR";

/// Optional overrides for where the branch is seeded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SeedOverrides {
    /// `|ε|` of the first branch point.
    pub eps0: Option<f64>,
    /// Starting rate `d` in place of `d₀`.
    pub d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub domain_radius: f64,
    pub grid_n: usize,
    pub tol_bc: f64,
    pub tol_eig: f64,
    pub quad_tol: f64,
    pub newton_tol: f64,
    /// Magnitudes `|ε|`; the sign comes from the computed theorem case.
    pub eps_sweep: Vec<f64>,
    /// Multiples of `d₀`.
    pub d_grid: Vec<f64>,
    pub sigma: f64,
    pub ell_max: usize,
    pub v00_tol: f64,
    /// Magnitudes `|ε|` visited by the continuation after the seed.
    pub branch_eps: Vec<f64>,
    pub seed_overrides: SeedOverrides,
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = Settings::default();
        RunConfig {
            domain_radius: 1.0,
            grid_n: s.grid_n,
            tol_bc: s.tol_bc,
            tol_eig: s.tol_eig,
            quad_tol: s.quad_tol,
            newton_tol: s.newton_tol,
            eps_sweep: [-1.5, -2.0, -2.5, -3.0].iter().map(|p| 10f64.powf(*p)).collect(),
            d_grid: (5..=20).map(|k| k as f64 / 10.0).collect(),
            sigma: s.sigma,
            ell_max: s.ell_max,
            v00_tol: s.v00_tol,
            branch_eps: (0..=6).map(|k| 10f64.powf(-2.0 - 0.25 * k as f64)).collect(),
            seed_overrides: SeedOverrides::default(),
            output_dir: PathBuf::from("bn6-out"),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::ConfigError(format!("{key}: expected a real number, got `{v}`")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| Error::ConfigError(format!("{key}: expected a non-negative integer, got `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

impl RunConfig {
    /// Parses configuration text; absent keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::ConfigError(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "domain_radius" => cfg.domain_radius = parse_f64(key, value)?,
                "grid_n" => cfg.grid_n = parse_usize(key, value)?,
                "tol_bc" => cfg.tol_bc = parse_f64(key, value)?,
                "tol_eig" => cfg.tol_eig = parse_f64(key, value)?,
                "quad_tol" => cfg.quad_tol = parse_f64(key, value)?,
                "newton_tol" => cfg.newton_tol = parse_f64(key, value)?,
                "eps_sweep" => cfg.eps_sweep = parse_list(key, value)?,
                "d_grid" => cfg.d_grid = parse_list(key, value)?,
                "sigma" => cfg.sigma = parse_f64(key, value)?,
                "ell_max" => cfg.ell_max = parse_usize(key, value)?,
                "v00_tol" => cfg.v00_tol = parse_f64(key, value)?,
                "branch_eps" => cfg.branch_eps = parse_list(key, value)?,
                "seed_eps0" => cfg.seed_overrides.eps0 = Some(parse_f64(key, value)?),
                "seed_d" => cfg.seed_overrides.d = Some(parse_f64(key, value)?),
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                other => return Err(Error::ConfigError(other.to_string())),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("domain_radius", self.domain_radius),
            ("tol_bc", self.tol_bc),
            ("tol_eig", self.tol_eig),
            ("quad_tol", self.quad_tol),
            ("newton_tol", self.newton_tol),
            ("v00_tol", self.v00_tol),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ConfigError(format!("{k} must be positive, got {v}")));
            }
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::ConfigError(format!("sigma must lie in (0,1), got {}", self.sigma)));
        }
        if self.grid_n < 64 {
            return Err(Error::ConfigError(format!("grid_n must be at least 64, got {}", self.grid_n)));
        }
        for (k, list) in [("eps_sweep", &self.eps_sweep), ("branch_eps", &self.branch_eps)] {
            if list.is_empty() {
                return Err(Error::ConfigError(format!("{k} is empty")));
            }
            if let Some(e) = list.iter().find(|e| !(e.is_finite() && **e != 0.0)) {
                return Err(Error::ConfigError(format!("{k}: eps values must be nonzero, got {e}")));
            }
        }
        if self.d_grid.is_empty() || self.d_grid.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::ConfigError("d_grid must hold positive multiples of d0".into()));
        }
        Ok(())
    }

    pub fn settings(&self) -> Settings {
        Settings {
            grid_n: self.grid_n,
            tol_bc: self.tol_bc,
            tol_eig: self.tol_eig,
            quad_tol: self.quad_tol,
            newton_tol: self.newton_tol,
            ell_max: self.ell_max,
            sigma: self.sigma,
            v00_tol: self.v00_tol,
        }
    }

    /// Canonical text of every key that affects results (the output directory does not).
    pub fn canonical(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(",");
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_else(|| "none".into());
        let mut s = String::new();
        let _ = writeln!(s, "domain_radius = {}", fmt17(self.domain_radius));
        let _ = writeln!(s, "grid_n = {}", self.grid_n);
        let _ = writeln!(s, "tol_bc = {}", fmt17(self.tol_bc));
        let _ = writeln!(s, "tol_eig = {}", fmt17(self.tol_eig));
        let _ = writeln!(s, "quad_tol = {}", fmt17(self.quad_tol));
        let _ = writeln!(s, "newton_tol = {}", fmt17(self.newton_tol));
        let _ = writeln!(s, "eps_sweep = {}", list(&self.eps_sweep));
        let _ = writeln!(s, "d_grid = {}", list(&self.d_grid));
        let _ = writeln!(s, "sigma = {}", fmt17(self.sigma));
        let _ = writeln!(s, "ell_max = {}", self.ell_max);
        let _ = writeln!(s, "v00_tol = {}", fmt17(self.v00_tol));
        let _ = writeln!(s, "branch_eps = {}", list(&self.branch_eps));
        let _ = writeln!(s, "seed_eps0 = {}", opt(self.seed_overrides.eps0));
        let _ = writeln!(s, "seed_d = {}", opt(self.seed_overrides.d));
        s
    }

    /// SHA-256 of [`RunConfig::canonical`], hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// Reads a config file, then applies the output-directory override from the environment.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&text)?;
    apply_env(&mut cfg);
    Ok(cfg)
}

pub(crate) fn apply_env(cfg: &mut RunConfig) {
    if let Some(dir) = std::env::var_os(OUTPUT_ENV).filter(|d| !d.is_empty()) {
        cfg.output_dir = PathBuf::from(dir);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
        assert_eq!(RunConfig::parse("# nothing\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn single_override() {
        let c = RunConfig::parse("grid_n = 8192").unwrap();
        assert_eq!(c.grid_n, 8192);
        assert_eq!(RunConfig { grid_n: 4096, ..c }, RunConfig::default());
    }

    #[test]
    fn unknown_key_named() {
        match RunConfig::parse("grid_m = 8192") {
            Err(Error::ConfigError(k)) => assert_eq!(k, "grid_m"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_mismatch() {
        assert!(matches!(RunConfig::parse("grid_n = 1.5"), Err(Error::ConfigError(_))));
        assert!(matches!(RunConfig::parse("sigma = 2"), Err(Error::ConfigError(_))));
        assert!(matches!(RunConfig::parse("eps_sweep = 0.1, 0"), Err(Error::ConfigError(_))));
    }

    #[test]
    fn digest_ignores_output_dir() {
        let a = RunConfig::parse("output_dir = /tmp/a").unwrap();
        let b = RunConfig::parse("output_dir = /tmp/b").unwrap();
        assert_eq!(a.digest(), b.digest());
        let c = RunConfig::parse("grid_n = 2048").unwrap();
        assert_ne!(a.digest(), c.digest());
    }
}
