//! CSV input/output. All numeric output is written with 17 significant
//! digits so files round-trip to the exact f64 bits.

use std::fs::File;
use std::path::Path;

use otlm_core::Dictionary;

use crate::CliError;

/// 17 significant digits: lossless for f64.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

fn open_reader(path: &Path) -> Result<csv::Reader<File>, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file))
}

fn parse_field(raw: &str, path: &Path, row: usize, col: usize) -> Result<f64, CliError> {
    raw.trim().parse::<f64>().map_err(|_| {
        CliError::input(format!(
            "{}: row {row}, column {col}: '{raw}' is not a number",
            path.display()
        ))
    })
}

/// Grid coordinates, dense atom columns, and atom labels.
pub type DictionaryData = (Vec<f64>, Vec<Vec<f64>>, Vec<String>);

/// Dictionary CSV: header `x,<atom>,...`; first column is the grid.
pub fn read_dictionary_csv(path: &Path) -> Result<DictionaryData, CliError> {
    let mut reader = open_reader(path)?;
    let labels: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        .iter()
        .skip(1)
        .map(str::to_owned)
        .collect();
    if labels.is_empty() {
        return Err(CliError::input(format!(
            "{}: expected a grid column and at least one atom column",
            path.display()
        )));
    }
    let mut grid = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        if record.len() != labels.len() + 1 {
            return Err(CliError::input(format!(
                "{}: row {r}: expected {} fields, got {}",
                path.display(),
                labels.len() + 1,
                record.len()
            )));
        }
        grid.push(parse_field(&record[0], path, r, 0)?);
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(parse_field(&record[j + 1], path, r, j + 1)?);
        }
    }
    Ok((grid, columns, labels))
}

pub fn write_dictionary_csv(
    path: &Path,
    grid: &[f64],
    dict: &Dictionary,
    labels: &[String],
) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let mut header = vec!["x".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header).map_err(|e| CliError::io(path, e))?;
    // densify column by column once
    let mut dense = vec![vec![0.0; grid.len()]; dict.n_atoms()];
    for (j, col) in dense.iter_mut().enumerate() {
        let (rows, vals) = dict.col(j);
        for (&i, &v) in rows.iter().zip(vals) {
            col[i] = v;
        }
    }
    for i in 0..grid.len() {
        let mut record = vec![fmt_full(grid[i])];
        for col in &dense {
            record.push(fmt_full(col[i]));
        }
        w.write_record(&record).map_err(|e| CliError::io(path, e))?;
    }
    w.flush()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Target CSV: header `x,y`.
pub fn read_target_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = open_reader(path)?;
    let mut grid = Vec::new();
    let mut y = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        if record.len() != 2 {
            return Err(CliError::input(format!(
                "{}: row {r}: expected 2 fields, got {}",
                path.display(),
                record.len()
            )));
        }
        grid.push(parse_field(&record[0], path, r, 0)?);
        y.push(parse_field(&record[1], path, r, 1)?);
    }
    Ok((grid, y))
}

pub fn write_target_csv(path: &Path, grid: &[f64], y: &[f64]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["x", "y"])
        .map_err(|e| CliError::io(path, e))?;
    for (x, v) in grid.iter().zip(y) {
        w.write_record([fmt_full(*x), fmt_full(*v)])
            .map_err(|e| CliError::io(path, e))?;
    }
    w.flush()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// One-column CSV with header `x`.
pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut reader = open_reader(path)?;
    let mut v = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        v.push(parse_field(&record[0], path, r, 0)?);
    }
    Ok(v)
}

pub fn write_vector_csv(path: &Path, header: &str, v: &[f64]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record([header])
        .map_err(|e| CliError::io(path, e))?;
    for x in v {
        w.write_record([fmt_full(*x)])
            .map_err(|e| CliError::io(path, e))?;
    }
    w.flush()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::input(format!("{}: {e}", parent.display())))?;
        }
    }
    let file = File::create(path)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", path.display())))?;
    Ok(csv::Writer::from_writer(file))
}
