//! Series CSV and spectrum TSV files.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::sync::Arc;

use specseg::{build_dft_table, center_series, make_grid, normalize, BandwidthRule, Error};

use crate::error::CliError;

/// Reads a single numeric column. A first line that does not parse as a
/// number is taken as a header. `rows` keeps data rows `a..b` (0-based,
/// end exclusive, header not counted).
pub fn read_series(path: &Path, rows: Option<(usize, usize)>) -> Result<Vec<f64>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| CliError::Parse(format!("{}: line {line}: {e}", path.display())))?;
        if record.len() != 1 {
            return Err(CliError::Parse(format!(
                "{}: line {line}: expected one column, found {}",
                path.display(),
                record.len()
            )));
        }
        let cell = &record[0];
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => {
                return Err(CliError::Parse(format!("{}: line {line}: non-finite value `{cell}`", path.display())))
            }
            Err(_) if i == 0 => {}
            Err(_) => return Err(CliError::Parse(format!("{}: line {line}: not a number: `{cell}`", path.display()))),
        }
    }
    match rows {
        None => Ok(values),
        Some((a, b)) if a < b && b <= values.len() => Ok(values[a..b].to_vec()),
        Some((a, b)) => Err(CliError::Parse(format!(
            "--rows {a}:{b} does not fit the {} data rows",
            values.len()
        ))),
    }
}

pub fn write_series(path: &Path, values: &[f64]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(["value"]).map_err(|e| CliError::io(path, e))?;
    for v in values {
        w.write_record([v.to_string()]).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Options for the normalized segment spectra table.
pub struct SpectrumOptions {
    pub alpha: f64,
    pub grid_size: usize,
    pub band: Option<(f64, f64)>,
    pub bandwidth: BandwidthRule,
}

/// TSV with one row per frequency: `lambda`, then `st(f̂)` of each segment
/// between consecutive `boundaries` (which include `0` and `n`).
pub fn spectra_tsv(values: &[f64], boundaries: &[usize], opts: &SpectrumOptions) -> Result<String, CliError> {
    let series = center_series(values)?;
    let mut grid = make_grid::<f64>(opts.grid_size)?;
    if let Some((lo, hi)) = opts.band {
        grid = grid.restrict(lo, hi)?;
    }
    let grid = Arc::new(grid);
    let table = build_dft_table(&series, grid.clone()).with_bandwidth_rule(opts.bandwidth);
    let mut columns = Vec::new();
    let mut header = String::from("lambda");
    for w in boundaries.windows(2) {
        let (a, b) = (w[0], w[1]);
        let f = table.segment_spectrum(a, b, opts.alpha)?;
        columns.push(normalize(&f).map_err(|_| Error::ZeroSegment { a, b })?);
        header.push_str(&format!("\t({a},{b}]"));
    }
    let mut out = header;
    out.push('\n');
    for (i, lambda) in grid.points().iter().enumerate() {
        out.push_str(&lambda.to_string());
        for c in &columns {
            out.push('\t');
            out.push_str(&c[i].to_string());
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes to `path`, or stdout when it is `None` or `-`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        _ => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}
