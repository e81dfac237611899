//! Runtime configuration: embedded defaults, an optional key=value file
//! (`--config` flag or `WEIGHTLAB_CONFIG` env var), and flag overrides.
//! The effective configuration is echoed into every report.

use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use weightlab_core::trend::TrendParams;
use weightlab_core::weightfn::OmegaParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Truncation length for constructed sequences.
    pub n: usize,
    /// Windowed-trend tolerance (log units per index).
    pub tol_trend: f64,
    /// Default parameter grid for constructed matrices.
    pub lambda_grid: Vec<f64>,
    /// Weight-function grid: log-spaced points on [1, t_max].
    pub t_max: f64,
    pub omega_points: usize,
    /// Conjugate search: absolute tolerance on the maximizer and the
    /// bracket cap that flags non-superlinear inputs.
    pub tol_conj: f64,
    pub bracket_cap: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n: 64,
            tol_trend: 0.05,
            lambda_grid: (-4..=6).map(|i| 2.0_f64.powi(i)).collect(),
            t_max: 1e8,
            omega_points: 4096,
            tol_conj: 1e-9,
            bracket_cap: 1e9,
        }
    }
}

impl Config {
    pub fn trend_params(&self) -> TrendParams {
        TrendParams {
            tol_trend: self.tol_trend,
        }
    }

    pub fn omega_params(&self) -> OmegaParams {
        OmegaParams {
            t_max: self.t_max,
            points: self.omega_points,
            tol_conj: self.tol_conj,
            bracket_cap: self.bracket_cap,
        }
    }

    /// Parse a key=value file. Lines starting with `#` and blank lines are
    /// skipped; unknown keys are rejected.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Config::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not key=value: `{line}`", lineno + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => cfg.n = value.parse().context("n")?,
                "tol_trend" => cfg.tol_trend = value.parse().context("tol_trend")?,
                "lambda_grid" => {
                    cfg.lambda_grid = value
                        .split(',')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .context("lambda_grid")?
                }
                "t_max" => cfg.t_max = value.parse().context("t_max")?,
                "omega_points" => cfg.omega_points = value.parse().context("omega_points")?,
                "tol_conj" => cfg.tol_conj = value.parse().context("tol_conj")?,
                "bracket_cap" => cfg.bracket_cap = value.parse().context("bracket_cap")?,
                other => bail!("unknown config key `{other}`"),
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_file() {
        let dir = std::env::temp_dir().join("weightlab-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg");
        std::fs::write(&path, "# comment\nn = 32\nlambda_grid = 1, 2, 4\n").unwrap();
        let cfg = Config::load(&path).unwrap();
        assert_eq!(cfg.n, 32);
        assert_eq!(cfg.lambda_grid, vec![1.0, 2.0, 4.0]);
        assert_eq!(cfg.tol_trend, Config::default().tol_trend);
    }

    #[test]
    fn rejects_unknown_keys() {
        let dir = std::env::temp_dir().join("weightlab-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad");
        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(Config::load(&path).is_err());
    }
}
