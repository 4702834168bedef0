//! Experiment configuration: a `key = value` file, then flag overrides.

use std::fs;
use std::path::{Path, PathBuf};

use liouville_core::generators::DEFAULT_MAX_VERTICES;
use thiserror::Error;

pub const MAX_VERTICES_ENV: &str = "GSL_MAX_VERTICES";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    File { path: String, line: usize, message: String },
    #[error("cannot read config {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid {key}: {message}")]
    Invalid { key: &'static str, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub tree_b: usize,
    pub tree_depth: usize,
    pub measure_c: f64,
    pub alpha_grid: Vec<f64>,
    pub gamma: f64,
    /// `Λ` of the summability condition.
    pub lambda_cap: f64,
    /// `λ` of the test functions.
    pub lambda_xi: f64,
    pub radii: Vec<usize>,
    pub tol: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub problem: Option<PathBuf>,
    pub max_vertices: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            tree_b: 2,
            tree_depth: 14,
            measure_c: 1.0,
            alpha_grid: vec![0.5, 1.0, 1.5, 2.0],
            gamma: 1.0,
            lambda_cap: 0.8,
            lambda_xi: 2.0,
            radii: (2..=12).collect(),
            tol: 1e-8,
            out_dir: PathBuf::from("out"),
            seed: 0,
            problem: None,
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

/// Values given on the command line; `None` leaves the file or default value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tree_b: Option<usize>,
    pub tree_depth: Option<usize>,
    pub measure_c: Option<f64>,
    pub alpha_grid: Option<Vec<f64>>,
    pub gamma: Option<f64>,
    pub lambda_cap: Option<f64>,
    pub lambda_xi: Option<f64>,
    pub radii: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub problem: Option<PathBuf>,
}

/// Comma separated list; `a..b` expands to the integers `a` through `b`.
pub fn parse_radii(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
            if b < a {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad radius `{part}`"))?);
        }
    }
    Ok(out)
}

pub fn parse_alpha_grid(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| format!("bad alpha `{p}`")))
        .collect()
}

fn parse_value<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}`"))
}

impl ExperimentConfig {
    /// Defaults, then the config file, then the overrides, then validation.
    pub fn load(
        file: Option<&Path>,
        overrides: &Overrides,
        max_vertices_env: Option<&str>,
    ) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            config.apply_file(&text).map_err(|(line, message)| ConfigError::File {
                path: path.display().to_string(),
                line,
                message,
            })?;
        }
        config.apply_overrides(overrides);
        if let Some(raw) = max_vertices_env {
            config.max_vertices = raw.trim().parse().map_err(|_| ConfigError::Invalid {
                key: MAX_VERTICES_ENV,
                message: format!("`{raw}` is not a vertex count"),
            })?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn apply_file(&mut self, text: &str) -> Result<(), (usize, String)> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| (line, format!("expected `key = value`, got `{content}`")))?;
            let value = value.trim();
            let key = key.trim().replace('-', "_");
            let res = match key.as_str() {
                "tree_b" => parse_value(value).map(|v| self.tree_b = v),
                "tree_depth" => parse_value(value).map(|v| self.tree_depth = v),
                "measure_c" => parse_value(value).map(|v| self.measure_c = v),
                "alpha_grid" => parse_alpha_grid(value).map(|v| self.alpha_grid = v),
                "gamma" => parse_value(value).map(|v| self.gamma = v),
                "lambda_cap" => parse_value(value).map(|v| self.lambda_cap = v),
                "lambda_xi" => parse_value(value).map(|v| self.lambda_xi = v),
                "radii" => parse_radii(value).map(|v| self.radii = v),
                "tol" => parse_value(value).map(|v| self.tol = v),
                "out_dir" => {
                    self.out_dir = PathBuf::from(value);
                    Ok(())
                }
                "seed" => parse_value(value).map(|v| self.seed = v),
                "problem" => {
                    self.problem = Some(PathBuf::from(value));
                    Ok(())
                }
                _ => Err(format!("unknown key `{key}`")),
            };
            res.map_err(|m| (line, m))?;
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &o.$field { self.$field = v.clone(); })*
            };
        }
        take!(tree_b, tree_depth, measure_c, alpha_grid, gamma, lambda_cap, lambda_xi, radii, tol, out_dir, seed);
        if let Some(p) = &o.problem {
            self.problem = Some(p.clone());
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key, message: String| Err(ConfigError::Invalid { key, message });
        if self.tree_b < 1 {
            return bad("tree-b", "branching must be >= 1".into());
        }
        if self.tree_depth < 1 {
            return bad("tree-depth", "depth must be >= 1".into());
        }
        if !(self.measure_c > 0.0 && self.measure_c.is_finite()) {
            return bad("measure-c", format!("must be positive, got {}", self.measure_c));
        }
        if self.alpha_grid.is_empty() {
            return bad("alpha-grid", "empty".into());
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return bad("alpha-grid", format!("alpha must be >= 0, got {a}"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma", format!("must be >= 0, got {}", self.gamma));
        }
        if !(self.lambda_cap > 0.0 && self.lambda_cap < 1.0) {
            return bad("lambda-cap", format!("must lie in (0, 1), got {}", self.lambda_cap));
        }
        if !(self.lambda_xi > 1.0 && self.lambda_xi.is_finite()) {
            return bad("lambda-xi", format!("must be > 1, got {}", self.lambda_xi));
        }
        if self.radii.is_empty() || self.radii[0] < 1 {
            return bad("radii", "need at least one radius >= 1".into());
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return bad("radii", "must be strictly increasing".into());
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol", format!("must be positive, got {}", self.tol));
        }
        if self.max_vertices == 0 {
            return bad(MAX_VERTICES_ENV, "must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_syntax() {
        assert_eq!(parse_radii("2..5, 8").unwrap(), vec![2, 3, 4, 5, 8]);
        assert!(parse_radii("5..2").is_err());
        assert!(parse_radii("x").is_err());
    }

    #[test]
    fn file_then_flags() {
        let mut c = ExperimentConfig::default();
        c.apply_file("# experiment\ntree-b = 3\nalpha_grid = 0.5, 2\nradii = 2..4\n")
            .unwrap();
        assert_eq!(
            (c.tree_b, c.alpha_grid.clone(), c.radii.clone()),
            (3, vec![0.5, 2.0], vec![2, 3, 4])
        );
        c.apply_overrides(&Overrides {
            tree_b: Some(2),
            ..Overrides::default()
        });
        assert_eq!(c.tree_b, 2);
        assert_eq!(c.alpha_grid, vec![0.5, 2.0]);
    }

    #[test]
    fn file_errors_name_the_line() {
        let mut c = ExperimentConfig::default();
        assert_eq!(c.apply_file("gamma = 1\nnonsense\n").unwrap_err().0, 2);
        assert_eq!(c.apply_file("colour = red\n").unwrap_err().0, 1);
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_ok());
        c.lambda_cap = 1.0;
        assert!(c.validate().is_err());
        c = ExperimentConfig::default();
        c.radii = vec![3, 3];
        assert!(c.validate().is_err());
        assert!(matches!(
            ExperimentConfig::load(None, &Overrides::default(), Some("lots")),
            Err(ConfigError::Invalid {
                key: MAX_VERTICES_ENV,
                ..
            })
        ));
    }
}
