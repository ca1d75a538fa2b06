//! `otlm prox`: inspect a datafit proximal operator against its oracle.

use std::path::Path;

use otlm_core::{prox_datafit, prox_oracle_1d, DatafitKind, OracleConfig};

use crate::cli::ProxArgs;
use crate::{io, CliError, ExitStatus};

fn parse_values(raw: &str) -> Result<Vec<f64>, CliError> {
    if let Some(path) = raw.strip_prefix('@') {
        io::read_vector_csv(Path::new(path))
    } else {
        raw.parse::<f64>()
            .map(|v| vec![v])
            .map_err(|_| CliError::input(format!("'{raw}' is neither a number nor @path.csv")))
    }
}

pub fn run(args: &ProxArgs) -> Result<ExitStatus, CliError> {
    let kind: DatafitKind = args
        .datafit
        .parse()
        .map_err(|e: otlm_core::OtlmError| CliError::input(e.to_string()))?;
    let s = parse_values(&args.s)?;
    let y = parse_values(&args.y)?;
    if s.len() != y.len() {
        return Err(CliError::input(format!(
            "s has {} entries but y has {}",
            s.len(),
            y.len()
        )));
    }
    let prox = prox_datafit(kind, &s, &y, args.lambda, args.epsilon)
        .map_err(|e| CliError::input(e.to_string()))?;
    let oracle_cfg = OracleConfig::default();
    println!(
        "{:>4} {:>24} {:>24} {:>24} {:>24}",
        "i", "s", "y", "prox", "oracle"
    );
    for i in 0..s.len() {
        let oracle = prox_oracle_1d(kind, s[i], y[i], args.lambda, args.epsilon, &oracle_cfg)
            .map_err(|e| CliError::input(e.to_string()))?;
        println!(
            "{:>4} {:>24} {:>24} {:>24} {:>24}",
            i,
            io::fmt_full(s[i]),
            io::fmt_full(y[i]),
            io::fmt_full(prox[i]),
            io::fmt_full(oracle)
        );
    }
    Ok(ExitStatus::Ok)
}
