//! CSV tables, plain-text reports and gnuplot scripts, written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::trajectory::DensityTrajectory;

/// Failure to write an output file.
#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct WriteError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Provenance lines shared by every output file.
#[derive(Debug, Clone)]
pub struct Header {
    pub config_sha256: String,
    pub command: &'static str,
    pub extra: Vec<(String, String)>,
}

impl Header {
    pub fn with(&self, key: &str, value: impl ToString) -> Self {
        let mut h = self.clone();
        h.extra.push((key.into(), value.to_string()));
        h
    }

    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "# pseudosun {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# config_sha256 {}", self.config_sha256);
        let _ = writeln!(out, "# command {}", self.command);
        for (k, v) in &self.extra {
            let _ = writeln!(out, "# {k} {v}");
        }
    }
}

/// Shortest round-trip-safe rendering at 17 significant digits.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(header: &Header, columns: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    header.render(&mut out);
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(number).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Column names `re_rho_<a><b>, im_rho_<a><b>` for `a ≤ b`, 1-based.
pub fn trajectory_columns(dim: usize) -> Vec<String> {
    let mut cols = vec!["t_fs".to_string()];
    for a in 0..dim {
        for b in a..dim {
            cols.push(format!("re_rho_{}{}", a + 1, b + 1));
            cols.push(format!("im_rho_{}{}", a + 1, b + 1));
        }
    }
    cols
}

pub fn trajectory_csv(header: &Header, traj: &DensityTrajectory) -> String {
    let dim = traj.dim();
    let cols = trajectory_columns(dim);
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let rows = traj.times().points().into_iter().zip(traj.matrices()).map(|(t, m)| {
        let mut row = vec![t];
        for a in 0..dim {
            for b in a..dim {
                row.push(m[(a, b)].re);
                row.push(m[(a, b)].im);
            }
        }
        row
    });
    csv(&header.with("normalization", traj.normalization().as_str()), &col_refs, rows)
}

/// Line plot of `columns` (1-based indices) against column 1 for each file.
pub fn gnuplot(title: &str, xlabel: &str, ylabel: &str, series: &[(String, usize, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set datafile commentschars '#'");
    let _ = writeln!(out, "set key autotitle columnhead");
    let _ = writeln!(out, "set title '{title}'");
    let _ = writeln!(out, "set xlabel '{xlabel}'");
    let _ = writeln!(out, "set ylabel '{ylabel}'");
    let plots: Vec<String> = series
        .iter()
        .map(|(file, col, label)| format!("'{file}' using 1:{col} with lines title '{label}'"))
        .collect();
    let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    out
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, WriteError> {
    let path = dir.join(name);
    let err = |source| WriteError { path: path.clone(), source };
    std::fs::create_dir_all(dir).map_err(|source| WriteError { path: dir.to_path_buf(), source })?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(&path).map_err(|e| err(e.error))?;
    Ok(path)
}
