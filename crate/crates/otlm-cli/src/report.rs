//! Fit report: the JSON artifact a fit run leaves behind.

use serde::{Deserialize, Serialize};

use otlm_core::{IterationRecord, Solution};

use crate::runconfig::RunConfig;

pub const FIT_REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    /// The resolved configuration the run actually used.
    pub config: RunConfig,
    pub n_samples: usize,
    pub n_atoms: usize,
    pub nnz_kernel: usize,
    pub atoms: Vec<String>,
    pub weights: Vec<f64>,
    pub converged: bool,
    pub iters_used: usize,
    pub final_residuals: Residuals,
    pub diagnostics: Vec<Record>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan_topk: Option<Vec<PlanEntry>>,
    /// Final plan marginals (row sums and column sums), on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marginals: Option<Marginals>,
    /// Wall-clock per phase; excluded from determinism comparisons.
    pub timing_ms: Timing,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Residuals {
    pub w_rel_change: f64,
    pub source_residual: f64,
    pub target_prox_residual: f64,
    pub objective_surrogate: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Record {
    pub iter: usize,
    pub w_rel_change: f64,
    pub source_residual: f64,
    pub target_prox_residual: f64,
    pub objective_surrogate: f64,
}

impl From<&IterationRecord> for Record {
    fn from(r: &IterationRecord) -> Self {
        Self {
            iter: r.iter,
            w_rel_change: r.w_rel_change,
            source_residual: r.source_residual,
            target_prox_residual: r.target_prox_residual,
            objective_surrogate: r.objective_surrogate,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlanEntry {
    pub i: usize,
    pub j: usize,
    pub q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Marginals {
    pub source: Vec<f64>,
    pub target: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Timing {
    pub kernel_build: f64,
    pub solve: f64,
}

impl FitReport {
    pub fn from_solution(
        config: RunConfig,
        atoms: Vec<String>,
        solution: &Solution,
        n_samples: usize,
        nnz_kernel: usize,
        timing_ms: Timing,
    ) -> Self {
        let final_residuals = solution
            .final_record()
            .map(|r| Residuals {
                w_rel_change: r.w_rel_change,
                source_residual: r.source_residual,
                target_prox_residual: r.target_prox_residual,
                objective_surrogate: r.objective_surrogate,
            })
            .unwrap_or_default();
        Self {
            schema_version: FIT_REPORT_SCHEMA,
            config,
            n_samples,
            n_atoms: solution.w.len(),
            nnz_kernel,
            atoms,
            weights: solution.w.clone(),
            converged: solution.converged,
            iters_used: solution.iters_used,
            final_residuals,
            diagnostics: solution.diagnostics().iter().map(Record::from).collect(),
            plan_topk: None,
            marginals: None,
            timing_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}
