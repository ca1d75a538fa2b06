//! `otlm gen`: write a synthetic problem to disk.

use serde::Serialize;

use otlm_core::{gen_demo_problem, gen_scaling_problem, SynthProblem, SynthSpec};

use crate::cli::GenArgs;
use crate::commands::fit::write_text;
use crate::{io, CliError, ExitStatus};

#[derive(Serialize)]
struct Truth<'a> {
    kind: &'a str,
    seed: u64,
    true_weights: &'a [f64],
    components: Vec<ComponentJson>,
}

#[derive(Serialize)]
struct ComponentJson {
    mu: f64,
    sigma: f64,
    gamma: f64,
    amplitude: f64,
}

pub fn run(args: &GenArgs) -> Result<ExitStatus, CliError> {
    let problem = match args.kind.as_str() {
        "demo" => gen_demo_problem(args.seed).map_err(|e| CliError::input(e.to_string()))?,
        "scaling" => {
            let m = args.m.unwrap_or(args.n / 10).max(1);
            let spec = SynthSpec::new(args.n, m, args.seed);
            gen_scaling_problem(&spec).map_err(|e| CliError::input(e.to_string()))?
        }
        other => {
            return Err(CliError::input(format!(
                "unknown generator '{other}' (expected demo|scaling)"
            )))
        }
    };
    write_problem(&args.out, &args.kind, args.seed, &problem)?;
    println!(
        "gen {}: {} samples, {} atoms, files under {}",
        args.kind,
        problem.grid.len(),
        problem.dictionary.n_atoms(),
        args.out.display()
    );
    Ok(ExitStatus::Ok)
}

pub fn write_problem(
    dir: &std::path::Path,
    kind: &str,
    seed: u64,
    problem: &SynthProblem,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    let labels: Vec<String> = (0..problem.dictionary.n_atoms())
        .map(|j| format!("atom_{j}"))
        .collect();
    io::write_dictionary_csv(
        &dir.join("dictionary.csv"),
        &problem.grid,
        &problem.dictionary,
        &labels,
    )?;
    io::write_target_csv(
        &dir.join("target.csv"),
        &problem.grid,
        problem.target.values(),
    )?;
    io::write_vector_csv(&dir.join("grid.csv"), "x", &problem.grid)?;
    let truth = Truth {
        kind,
        seed,
        true_weights: &problem.true_weights,
        components: problem
            .components
            .iter()
            .map(|c| ComponentJson {
                mu: c.mu,
                sigma: c.sigma,
                gamma: c.gamma,
                amplitude: c.amplitude,
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&truth).expect("truth serialization");
    write_text(&dir.join("truth.json"), &json)
}
