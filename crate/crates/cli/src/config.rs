//! Flat `key = value` experiment files.
//!
//! ```text
//! # Cauchy against Gaussian, n = 100..10000
//! dist = cauchy
//! compare = gaussian
//! n_start = 100
//! n_stop = 10000
//! n_step = 100
//! k = 3
//! replications = 1500
//! seed = 20240501
//! ```
//!
//! Keys: `dist`, `compare`, `n_grid` (comma list) or `n_start`/`n_stop`/
//! `n_step`, `k`, `replications` (alias `M`), `seed`, `centered`,
//! `convention`, and the output paths `csv`, `json`, `svg`, `manifest`.
//! Blank lines and `#` comments are ignored; unknown or repeated keys are
//! errors. Command-line flags override file values.

use std::path::{Path, PathBuf};

use outlierfreq_core::{DistributionSpec, ExperimentConfig, OutlierQuery, SConvention};

use crate::error::{CliError, Result};

/// Sweep settings gathered from a file and/or flags; unset fields are `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSettings {
    pub dist: Option<DistributionSpec>,
    pub compare: Option<DistributionSpec>,
    pub n_grid: Option<Vec<usize>>,
    pub n_start: Option<usize>,
    pub n_stop: Option<usize>,
    pub n_step: Option<usize>,
    pub k: Option<f64>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub centered: Option<bool>,
    pub convention: Option<SConvention>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

pub fn parse_grid(v: &str) -> Result<Vec<usize>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| format!("bad sample size {s:?}"))
        })
        .collect()
}

impl SweepSettings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses file contents; `origin` labels diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut out = SweepSettings::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| CliError::ConfigLine {
                path: origin.to_string(),
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let key = key.trim().to_ascii_lowercase();
            let key = if key == "m" {
                "replications".to_string()
            } else {
                key
            };
            let value = value.trim();
            if !seen.insert(key.clone()) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            let num = |what: &str| err(format!("{key}: expected {what}, got {value:?}"));
            match key.as_str() {
                "dist" => out.dist = Some(value.parse().map_err(|e| err(format!("dist: {e}")))?),
                "compare" => {
                    out.compare = Some(value.parse().map_err(|e| err(format!("compare: {e}")))?)
                }
                "n_grid" => {
                    out.n_grid = Some(parse_grid(value).map_err(|m| err(format!("n_grid: {m}")))?)
                }
                "n_start" => out.n_start = Some(value.parse().map_err(|_| num("an integer"))?),
                "n_stop" => out.n_stop = Some(value.parse().map_err(|_| num("an integer"))?),
                "n_step" => out.n_step = Some(value.parse().map_err(|_| num("an integer"))?),
                "k" => out.k = Some(value.parse().map_err(|_| num("a number"))?),
                "replications" => {
                    out.replications = Some(value.parse().map_err(|_| num("an integer"))?)
                }
                "seed" => out.seed = Some(value.parse().map_err(|_| num("an unsigned integer"))?),
                "centered" => {
                    out.centered = Some(parse_bool(value).ok_or_else(|| num("true or false"))?)
                }
                "convention" => {
                    out.convention =
                        Some(value.parse().map_err(|e| err(format!("convention: {e}")))?)
                }
                "csv" => out.csv = Some(value.into()),
                "json" => out.json = Some(value.into()),
                "svg" => out.svg = Some(value.into()),
                "manifest" => out.manifest = Some(value.into()),
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        Ok(out)
    }

    /// Values set in `over` replace those in `self`. A grid given in `over`
    /// (list or range) replaces the whole grid of `self`.
    pub fn overlay(self, over: SweepSettings) -> SweepSettings {
        let over_grid = over.n_grid.is_some() || over.n_start.is_some() || over.n_stop.is_some();
        let (n_grid, n_start, n_stop, n_step) = if over_grid {
            (over.n_grid, over.n_start, over.n_stop, over.n_step)
        } else {
            (
                self.n_grid,
                self.n_start,
                self.n_stop,
                over.n_step.or(self.n_step),
            )
        };
        SweepSettings {
            dist: over.dist.or(self.dist),
            compare: over.compare.or(self.compare),
            n_grid,
            n_start,
            n_stop,
            n_step,
            k: over.k.or(self.k),
            replications: over.replications.or(self.replications),
            seed: over.seed.or(self.seed),
            centered: over.centered.or(self.centered),
            convention: over.convention.or(self.convention),
            csv: over.csv.or(self.csv),
            json: over.json.or(self.json),
            svg: over.svg.or(self.svg),
            manifest: over.manifest.or(self.manifest),
        }
    }

    pub fn grid(&self) -> Result<Vec<usize>> {
        if let Some(grid) = &self.n_grid {
            if self.n_start.is_some() || self.n_stop.is_some() {
                return Err(CliError::Config(
                    "give either n_grid or n_start/n_stop, not both".into(),
                ));
            }
            return Ok(grid.clone());
        }
        match (self.n_start, self.n_stop) {
            (Some(start), Some(stop)) => {
                let step = self.n_step.unwrap_or(1);
                if step == 0 {
                    return Err(CliError::Config("n_step must be positive".into()));
                }
                Ok((start..=stop).step_by(step).collect())
            }
            (None, None) => Ok(Vec::new()),
            _ => Err(CliError::Config(
                "n_start and n_stop must be given together".into(),
            )),
        }
    }

    /// One experiment per law, sharing grid, query and seed.
    pub fn into_configs(&self) -> Result<Vec<ExperimentConfig>> {
        let dist = self
            .dist
            .ok_or_else(|| CliError::Config("missing distribution (dist)".into()))?;
        let seed = self
            .seed
            .ok_or_else(|| CliError::Config("a seed is required (--seed or seed = ...)".into()))?;
        let n_grid = self.grid()?;
        if n_grid.is_empty() {
            return Err(CliError::Config("empty n grid".into()));
        }
        let query = OutlierQuery {
            k: self.k.unwrap_or(3.0),
            centered: self.centered.unwrap_or(false),
            convention: self.convention.unwrap_or_default(),
        };
        let replications = self
            .replications
            .unwrap_or(outlierfreq_core::DEFAULT_REPLICATIONS);
        let configs: Vec<ExperimentConfig> = std::iter::once(dist)
            .chain(self.compare)
            .map(|spec| ExperimentConfig {
                spec,
                n_grid: n_grid.clone(),
                query,
                replications,
                base_seed: seed,
            })
            .collect();
        for c in &configs {
            c.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(configs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = "\
# two curves
dist = cauchy
compare = gaussian   # reference curve
n_start = 100
n_stop = 10000
n_step = 100
k = 3
M = 1500
seed = 7
";

    #[test]
    fn parses_documented_schema() {
        let s = SweepSettings::parse(FIG2, "fig2.cfg").unwrap();
        let configs = s.into_configs().unwrap();
        assert_eq!(configs.len(), 2);
        assert_eq!(configs[0].spec, DistributionSpec::cauchy());
        assert_eq!(configs[1].spec, DistributionSpec::gaussian());
        assert_eq!(configs[0].n_grid.len(), 100);
        assert_eq!(configs[0].n_grid[99], 10_000);
        assert_eq!(configs[0].replications, 1500);
        assert_eq!(configs[0].base_seed, 7);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let err = SweepSettings::parse("dist = cauchy\n\nk = three\n", "x.cfg").unwrap_err();
        assert_eq!(
            err.to_string(),
            "x.cfg:3: k: expected a number, got \"three\""
        );
        let err = SweepSettings::parse("dist = cauchy\nfoo = 1\n", "x.cfg").unwrap_err();
        assert!(err.to_string().starts_with("x.cfg:2: unknown key"));
        let err = SweepSettings::parse("k = 1\nk = 2\n", "x.cfg").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let err = SweepSettings::parse("dist cauchy\n", "x.cfg").unwrap_err();
        assert!(err.to_string().contains("expected key = value"));
        let err = SweepSettings::parse("dist = stable:5\n", "x.cfg").unwrap_err();
        assert!(err.to_string().starts_with("x.cfg:1: dist:"));
    }

    #[test]
    fn empty_grid_is_config_error() {
        let s = SweepSettings::parse("dist = cauchy\nseed = 1\n", "x").unwrap();
        let err = s.into_configs().unwrap_err();
        assert_eq!(err.exit_code(), crate::error::exit::CONFIG);
        let s = SweepSettings::parse("dist = cauchy\nseed = 1\nn_grid = \n", "x").unwrap();
        assert!(s.into_configs().is_err());
    }

    #[test]
    fn seed_is_mandatory() {
        let s = SweepSettings::parse("dist = cauchy\nn_grid = 3,4\n", "x").unwrap();
        assert!(s.into_configs().unwrap_err().to_string().contains("seed"));
    }

    #[test]
    fn flags_override_file() {
        let file = SweepSettings::parse(FIG2, "f").unwrap();
        let flags = SweepSettings {
            seed: Some(99),
            n_grid: Some(vec![5, 10]),
            ..Default::default()
        };
        let merged = file.clone().overlay(flags);
        assert_eq!(merged.seed, Some(99));
        assert_eq!(merged.k, Some(3.0));
        assert_eq!(merged.grid().unwrap(), vec![5, 10]);

        let merged = file.overlay(SweepSettings {
            n_step: Some(1000),
            ..Default::default()
        });
        assert_eq!(merged.grid().unwrap().len(), 10);
        assert_eq!(
            SweepSettings::parse("n_grid = 3\nn_start = 4\nn_stop = 5\n", "x")
                .unwrap()
                .grid()
                .unwrap_err()
                .exit_code(),
            crate::error::exit::CONFIG
        );
    }
}
