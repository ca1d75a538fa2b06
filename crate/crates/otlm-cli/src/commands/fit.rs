//! `otlm fit`: load a problem, solve it, write the report.

use std::path::Path;
use std::time::Instant;

use otlm_core::{build_cost, build_kernel, solve, Dictionary, OtlmError, Target};

use crate::cli::FitArgs;
use crate::report::{FitReport, PlanEntry, Timing};
use crate::runconfig::RunConfig;
use crate::{io, CliError, ExitStatus};

/// Guard for the full-plan emitter: anything past this writes gigabytes.
const FULL_PLAN_MAX_NNZ: usize = 10_000_000;

pub fn run(args: &FitArgs) -> Result<ExitStatus, CliError> {
    let mut config = RunConfig::load(&args.config)?;
    config.resolve_paths(&args.config);
    config.apply_overrides(&args.overrides);
    if let Some(out) = &args.out {
        config.output.report = Some(out.join("report.json"));
        config.output.weights_csv = Some(out.join("weights.csv"));
    }

    let (grid, columns, atoms) = io::read_dictionary_csv(&config.dictionary)?;
    let (target_grid, y) = io::read_target_csv(&config.target)?;
    if grid != target_grid {
        return Err(CliError::input(format!(
            "grid mismatch between {} and {}",
            config.dictionary.display(),
            config.target.display()
        )));
    }
    let dict = Dictionary::from_dense_columns(columns.clone())
        .map_err(|e| CliError::input(format!("{}: {e}", config.dictionary.display())))?;
    let target =
        Target::new(y).map_err(|e| CliError::input(format!("{}: {e}", config.target.display())))?;

    let solver_cfg = config.solver_config()?;
    let cost_spec = config.cost_spec(&grid, &columns)?;
    let cost = build_cost(&cost_spec).map_err(|e| CliError::input(e.to_string()))?;

    let t0 = Instant::now();
    let kernel = build_kernel(&cost, solver_cfg.epsilon).map_err(|e| match e {
        OtlmError::EmptyRow(_) | OtlmError::EmptyCol(_) => CliError::input(format!(
            "infeasible kernel: {e}; epsilon {} is too small for the cost scale",
            solver_cfg.epsilon
        )),
        other => CliError::input(other.to_string()),
    })?;
    let kernel_ms = t0.elapsed().as_secs_f64() * 1e3;

    let t1 = Instant::now();
    let solution = solve(&kernel, &dict, &target, &solver_cfg, None)
        .map_err(|e| CliError::input(e.to_string()))?;
    let solve_ms = t1.elapsed().as_secs_f64() * 1e3;

    let mut report = FitReport::from_solution(
        config.clone(),
        atoms,
        &solution,
        dict.n_samples(),
        kernel.nnz(),
        Timing {
            kernel_build: kernel_ms,
            solve: solve_ms,
        },
    );

    if let Some(k) = args.emit_plan {
        let plan = solution
            .plan(&kernel)
            .map_err(|e| CliError::input(e.to_string()))?;
        let n = plan.n_rows();
        let mut source = vec![0.0; n];
        let mut target_marginal = vec![0.0; n];
        for (i, j, q) in plan.iter() {
            source[i] += q;
            target_marginal[j] += q;
        }
        report.marginals = Some(crate::report::Marginals {
            source,
            target: target_marginal,
        });
        let mut entries = Vec::new();
        for i in 0..plan.n_rows() {
            let (cols, vals) = plan.row(i);
            let mut row: Vec<PlanEntry> = cols
                .iter()
                .zip(vals)
                .map(|(&j, &q)| PlanEntry { i, j, q })
                .collect();
            row.sort_by(|a, b| b.q.total_cmp(&a.q));
            row.truncate(k);
            entries.extend(row);
        }
        report.plan_topk = Some(entries);
    }
    if args.emit_plan_full {
        if kernel.nnz() > FULL_PLAN_MAX_NNZ {
            return Err(CliError::input(format!(
                "full plan has {} entries, past the {FULL_PLAN_MAX_NNZ} guard; use --emit-plan K",
                kernel.nnz()
            )));
        }
        let plan = solution
            .plan(&kernel)
            .map_err(|e| CliError::input(e.to_string()))?;
        let out = config
            .output
            .report
            .clone()
            .unwrap_or_else(|| Path::new("report.json").to_path_buf())
            .with_file_name("plan.csv");
        write_plan_csv(&out, &plan)?;
    }

    let report_path = config
        .output
        .report
        .clone()
        .unwrap_or_else(|| Path::new("report.json").to_path_buf());
    write_text(&report_path, &report.to_json())?;
    if let Some(weights_path) = &config.output.weights_csv {
        io::write_vector_csv(weights_path, "w", &solution.w)?;
    }

    println!(
        "fit: {} atoms, {} iterations, converged = {}, report at {}",
        solution.w.len(),
        solution.iters_used,
        solution.converged,
        report_path.display()
    );
    Ok(if solution.converged {
        ExitStatus::Ok
    } else {
        ExitStatus::NotConverged
    })
}

fn write_plan_csv(path: &Path, plan: &otlm_core::CsrMatrix) -> Result<(), CliError> {
    let mut text = String::from("i,j,q\n");
    for (i, j, q) in plan.iter() {
        text.push_str(&format!("{i},{j},{}\n", io::fmt_full(q)));
    }
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::input(format!("{}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}
