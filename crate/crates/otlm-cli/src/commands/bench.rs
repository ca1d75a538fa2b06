//! `otlm bench`: wall-clock scaling table over a ladder of sizes at a
//! fixed iteration count. File I/O and problem generation stay outside the
//! timed region; kernel build is reported separately from the iterations.

use std::time::Instant;

use otlm_core::{
    build_cost, build_kernel, gen_scaling_problem, solve, CostKind, CostSpec, DatafitKind,
    OtlmConfig, SynthSpec,
};

use crate::cli::BenchArgs;
use crate::commands::fit::write_text;
use crate::runconfig::parse_penalty;
use crate::{CliError, ExitStatus};

pub fn run(args: &BenchArgs) -> Result<ExitStatus, CliError> {
    if args.sizes.is_empty() || args.sizes.windows(2).any(|p| p[0] >= p[1]) {
        return Err(CliError::input(
            "sizes must be a non-empty ascending list".to_string(),
        ));
    }
    if args.repeats == 0 || args.iters == 0 {
        return Err(CliError::input(
            "repeats and iters must be >= 1".to_string(),
        ));
    }
    let datafit: DatafitKind = args
        .datafit
        .parse()
        .map_err(|e: otlm_core::OtlmError| CliError::input(e.to_string()))?;
    let penalty = parse_penalty(&args.penalty, args.alpha, args.beta)?;

    let mut csv = String::from("N,M,nnz_K,iters,time_ms_median,time_ms_p90\n");
    for &n in &args.sizes {
        let m = (n / 10).max(1);
        let spec = SynthSpec::new(n, m, args.seed);
        let problem = gen_scaling_problem(&spec).map_err(|e| CliError::input(e.to_string()))?;
        let cost = build_cost(&CostSpec {
            kind: CostKind::AbsGrid {
                rho: 0.01,
                dx_max: 5.0 * spec.basis_sigma,
            },
            grid: problem.grid.clone(),
            mask: None,
        })
        .map_err(|e| CliError::input(e.to_string()))?;

        let t_kernel = Instant::now();
        let kernel =
            build_kernel(&cost, args.epsilon).map_err(|e| CliError::input(e.to_string()))?;
        let kernel_ms = t_kernel.elapsed().as_secs_f64() * 1e3;

        let cfg = OtlmConfig {
            epsilon: args.epsilon,
            lambda: args.lambda,
            datafit,
            penalty,
            max_iters: args.iters,
            // unreachable tolerance: every repeat runs the full count
            tol: f64::MIN_POSITIVE,
            check_every: args.iters,
            ..OtlmConfig::default()
        };
        let mut times: Vec<f64> = Vec::with_capacity(args.repeats);
        for _ in 0..args.repeats {
            let t0 = Instant::now();
            let sol = solve(&kernel, &problem.dictionary, &problem.target, &cfg, None)
                .map_err(|e| CliError::input(e.to_string()))?;
            times.push(t0.elapsed().as_secs_f64() * 1e3);
            debug_assert_eq!(sol.iters_used, args.iters);
        }
        times.sort_by(f64::total_cmp);
        let median = times[times.len() / 2];
        let p90 = times[((times.len() as f64 * 0.9) as usize).min(times.len() - 1)];
        eprintln!(
            "N {n}: kernel build {kernel_ms:.2} ms, solve median {median:.2} ms over {} repeats",
            args.repeats
        );
        csv.push_str(&format!(
            "{n},{m},{},{},{},{}\n",
            kernel.nnz(),
            args.iters,
            crate::io::fmt_full(median),
            crate::io::fmt_full(p90)
        ));
    }
    write_text(&args.out, &csv)?;
    println!("bench table written to {}", args.out.display());
    Ok(ExitStatus::Ok)
}
