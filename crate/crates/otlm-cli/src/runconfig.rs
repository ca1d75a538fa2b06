//! Run configuration file: JSON schema and conversion to solver types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use otlm_core::{ConnectivityMask, CostKind, CostSpec, DatafitKind, OtlmConfig, PenaltyKind};

use crate::cli::SolverOverrides;
use crate::CliError;

pub const RUN_CONFIG_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Dictionary CSV (first column grid, one column per atom).
    pub dictionary: PathBuf,
    /// Target CSV (columns x, y); its grid must match the dictionary's.
    pub target: PathBuf,
    pub cost: CostConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostConfig {
    /// abs_grid | relative_quadratic | custom
    pub kind: String,
    #[serde(default)]
    pub rho: f64,
    /// Truncation radius; omitted or null means unbounded.
    #[serde(default)]
    pub dx_max: Option<f64>,
    /// Explicit entries for the custom kind: [i, j, cost].
    #[serde(default)]
    pub entries: Option<Vec<(usize, usize, f64)>>,
    #[serde(default)]
    pub mask: Option<MaskConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaskConfig {
    /// One-column CSV with the reference profile (length N)...
    #[serde(default)]
    pub profile_csv: Option<PathBuf>,
    /// ...or take the profile from a dictionary atom (by column index).
    #[serde(default)]
    pub profile_atom: Option<usize>,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    /// equality | kl | tv | l2 | poisson
    pub datafit: String,
    /// none | l1 | l2_squared | elastic_net
    #[serde(default = "default_penalty")]
    pub penalty: String,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_check_every")]
    pub check_every: usize,
    #[serde(default = "default_mm_inner")]
    pub mm_inner_iters: usize,
    #[serde(default = "default_w_min_rel")]
    pub w_min_rel: f64,
}

fn default_penalty() -> String {
    "none".into()
}
fn default_max_iters() -> usize {
    10_000
}
fn default_tol() -> f64 {
    1e-9
}
fn default_check_every() -> usize {
    1
}
fn default_mm_inner() -> usize {
    1
}
fn default_w_min_rel() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub weights_csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        if cfg.schema_version != RUN_CONFIG_SCHEMA {
            return Err(CliError::input(format!(
                "{}: unsupported schema_version {} (expected {RUN_CONFIG_SCHEMA})",
                path.display(),
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    /// Resolves the data paths relative to the config file location.
    pub fn resolve_paths(&mut self, config_path: &Path) {
        let base = config_path.parent().unwrap_or(Path::new("."));
        for p in [&mut self.dictionary, &mut self.target] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(mask) = &mut self.cost.mask {
            if let Some(profile) = &mut mask.profile_csv {
                if profile.is_relative() {
                    *profile = base.join(&*profile);
                }
            }
        }
    }

    pub fn apply_overrides(&mut self, o: &SolverOverrides) {
        let s = &mut self.solver;
        if let Some(v) = o.epsilon {
            s.epsilon = v;
        }
        if let Some(v) = o.lambda {
            s.lambda = v;
        }
        if let Some(v) = o.alpha {
            s.alpha = v;
        }
        if let Some(v) = o.beta {
            s.beta = v;
        }
        if let Some(v) = &o.datafit {
            s.datafit = v.clone();
        }
        if let Some(v) = &o.penalty {
            s.penalty = v.clone();
        }
        if let Some(v) = o.tol {
            s.tol = v;
        }
        if let Some(v) = o.max_iters {
            s.max_iters = v as usize;
        }
    }

    pub fn solver_config(&self) -> Result<OtlmConfig, CliError> {
        let s = &self.solver;
        let datafit: DatafitKind = s
            .datafit
            .parse()
            .map_err(|e: otlm_core::OtlmError| CliError::input(e.to_string()))?;
        let penalty = parse_penalty(&s.penalty, s.alpha, s.beta)?;
        let cfg = OtlmConfig {
            epsilon: s.epsilon,
            lambda: s.lambda,
            datafit,
            penalty,
            max_iters: s.max_iters,
            tol: s.tol,
            check_every: s.check_every,
            mm_inner_iters: s.mm_inner_iters,
            w_min_rel: s.w_min_rel,
        };
        cfg.validate().map_err(|e| CliError::input(e.to_string()))?;
        Ok(cfg)
    }

    /// Builds the cost spec; dictionary columns supply atom-based mask
    /// profiles.
    pub fn cost_spec(&self, grid: &[f64], columns: &[Vec<f64>]) -> Result<CostSpec, CliError> {
        let c = &self.cost;
        let dx_max = c.dx_max.unwrap_or(f64::INFINITY);
        let kind = match c.kind.as_str() {
            "abs_grid" => CostKind::AbsGrid { rho: c.rho, dx_max },
            "relative_quadratic" => CostKind::RelativeQuadratic { rho: c.rho, dx_max },
            "custom" => CostKind::Custom {
                entries: c.entries.clone().ok_or_else(|| {
                    CliError::input("custom cost kind needs an 'entries' list".to_string())
                })?,
            },
            other => {
                return Err(CliError::input(format!(
                    "unknown cost kind '{other}' (expected abs_grid|relative_quadratic|custom)"
                )))
            }
        };
        let mask = match &c.mask {
            None => None,
            Some(m) => {
                let profile = match (&m.profile_csv, m.profile_atom) {
                    (Some(path), None) => crate::io::read_vector_csv(path)?,
                    (None, Some(j)) => columns.get(j).cloned().ok_or_else(|| {
                        CliError::input(format!(
                            "mask profile_atom {j} out of range ({} atoms)",
                            columns.len()
                        ))
                    })?,
                    _ => {
                        return Err(CliError::input(
                            "mask needs exactly one of profile_csv or profile_atom".to_string(),
                        ))
                    }
                };
                Some(
                    ConnectivityMask::new(&profile, m.threshold)
                        .map_err(|e| CliError::input(e.to_string()))?,
                )
            }
        };
        Ok(CostSpec {
            kind,
            grid: grid.to_vec(),
            mask,
        })
    }
}

pub fn parse_penalty(name: &str, alpha: f64, beta: f64) -> Result<PenaltyKind, CliError> {
    let p = match name.to_ascii_lowercase().as_str() {
        "none" => PenaltyKind::None,
        "l1" | "lasso" => PenaltyKind::L1 { alpha },
        "l2_squared" | "l2sq" | "ridge" => PenaltyKind::L2Squared { alpha },
        "elastic_net" | "elasticnet" => PenaltyKind::ElasticNet { alpha, beta },
        other => {
            return Err(CliError::input(format!(
                "unknown penalty '{other}' (expected none|l1|l2_squared|elastic_net)"
            )))
        }
    };
    p.validate().map_err(|e| CliError::input(e.to_string()))?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let json = r#"{
            "schema_version": 1,
            "dictionary": "dict.csv",
            "target": "target.csv",
            "cost": {"kind": "abs_grid", "rho": 0.01},
            "solver": {"epsilon": 0.001, "lambda": 1.0, "datafit": "tv"}
        }"#;
        let cfg: RunConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.solver.penalty, "none");
        assert_eq!(cfg.solver.max_iters, 10_000);
        let solver = cfg.solver_config().unwrap();
        assert_eq!(solver.datafit, DatafitKind::Tv);
    }

    #[test]
    fn penalty_parsing() {
        assert!(matches!(
            parse_penalty("ridge", 0.5, 0.0).unwrap(),
            PenaltyKind::L2Squared { .. }
        ));
        assert!(parse_penalty("elastic_net", 0.0, 1.0).is_err());
        assert!(parse_penalty("bogus", 0.0, 0.0).is_err());
    }
}
