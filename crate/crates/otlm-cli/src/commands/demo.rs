//! `otlm demo`: the misaligned-peaks demonstration, end to end. Fits the
//! transported model and the per-sample baseline on the same data and
//! prints the weight comparison.

use otlm_core::{
    baseline_nn_regression, build_cost, build_kernel, gen_demo_problem, solve, BaselineLoss,
    CostKind, CostSpec, DatafitKind, OtlmConfig, PenaltyKind,
};

use crate::cli::DemoArgs;
use crate::{CliError, ExitStatus};

pub fn run(args: &DemoArgs) -> Result<ExitStatus, CliError> {
    let problem = gen_demo_problem(args.seed).map_err(|e| CliError::input(e.to_string()))?;
    let cost = build_cost(&CostSpec {
        kind: CostKind::AbsGrid {
            rho: 0.01,
            dx_max: f64::INFINITY,
        },
        grid: problem.grid.clone(),
        mask: None,
    })
    .map_err(|e| CliError::input(e.to_string()))?;
    let cfg = OtlmConfig {
        epsilon: 0.001,
        lambda: 1.0,
        datafit: DatafitKind::Tv,
        penalty: PenaltyKind::None,
        max_iters: 150_000,
        tol: 5e-7,
        check_every: 25,
        ..OtlmConfig::default()
    };
    let kernel = build_kernel(&cost, cfg.epsilon).map_err(|e| CliError::input(e.to_string()))?;
    let sol = solve(&kernel, &problem.dictionary, &problem.target, &cfg, None)
        .map_err(|e| CliError::input(e.to_string()))?;
    let base = baseline_nn_regression(
        &problem.dictionary,
        problem.target.values(),
        BaselineLoss::L2,
        20_000,
    )
    .map_err(|e| CliError::input(e.to_string()))?;

    let dist = |w: &[f64]| -> f64 {
        w.iter()
            .zip(&problem.true_weights)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    println!(
        "demo seed {} ({} iterations, converged = {})",
        args.seed, sol.iters_used, sol.converged
    );
    println!(
        "{:>8} {:>24} {:>24} {:>24}",
        "atom", "true", "transported", "per-sample"
    );
    for (j, &truth) in problem.true_weights.iter().enumerate() {
        println!(
            "{:>8} {:>24} {:>24} {:>24}",
            format!("atom_{j}"),
            crate::io::fmt_full(truth),
            crate::io::fmt_full(sol.w[j]),
            crate::io::fmt_full(base[j])
        );
    }
    println!(
        "l2 distance to truth: transported {}, per-sample {}",
        crate::io::fmt_full(dist(&sol.w)),
        crate::io::fmt_full(dist(&base))
    );

    if let Some(out) = &args.out {
        crate::commands::gen::write_problem(out, "demo", args.seed, &problem)?;
        let mut lines = String::from("atom,true,transported,per_sample\n");
        for (j, &truth) in problem.true_weights.iter().enumerate() {
            lines.push_str(&format!(
                "atom_{j},{},{},{}\n",
                crate::io::fmt_full(truth),
                crate::io::fmt_full(sol.w[j]),
                crate::io::fmt_full(base[j])
            ));
        }
        crate::commands::fit::write_text(&out.join("weights_comparison.csv"), &lines)?;
        println!("files written under {}", out.display());
    }
    Ok(if sol.converged {
        ExitStatus::Ok
    } else {
        ExitStatus::NotConverged
    })
}
