//! CSV export of probe series and prune reports.
//!
//! Series files have a `t` column followed by one column per series, headed
//! by its label. Shorter series leave trailing cells empty. Values are
//! written in Rust's shortest round-trip decimal form.

use std::fs;
use std::path::Path;

use super::IoError;
use crate::analysis::Series;
use crate::engine::RunRecord;
use crate::lattice::PruneReport;

pub fn export_series_csv(series: &[Series], path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    if series.is_empty() {
        return Err(IoError::NoSeries);
    }
    let mut w = ::csv::Writer::from_path(path).map_err(|e| IoError::csv(path, e))?;
    let mut header = vec!["t".to_string()];
    header.extend(series.iter().map(|s| s.label.clone()));
    w.write_record(&header).map_err(|e| IoError::csv(path, e))?;
    let rows = series.iter().map(Series::len).max().unwrap_or(0);
    for t in 0..rows {
        let mut row = vec![t.to_string()];
        row.extend(
            series
                .iter()
                .map(|s| s.values.get(t).map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&row).map_err(|e| IoError::csv(path, e))?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

/// Reads a file written by [`export_series_csv`]. A series ends at its
/// first empty cell.
pub fn read_series_csv(path: impl AsRef<Path>) -> Result<Vec<Series>, IoError> {
    let path = path.as_ref();
    let mut r = ::csv::Reader::from_path(path).map_err(|e| IoError::csv(path, e))?;
    let headers = r.headers().map_err(|e| IoError::csv(path, e))?.clone();
    if headers.get(0) != Some("t") {
        return Err(IoError::parse(path, 1, "first column must be `t`"));
    }
    let mut out: Vec<Series> = headers
        .iter()
        .skip(1)
        .map(|h| Series::new(h, Vec::new()))
        .collect();
    let mut ended = vec![false; out.len()];
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| IoError::csv(path, e))?;
        let t: usize = rec
            .get(0)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| IoError::parse(path, line, "bad `t` cell"))?;
        if t != i {
            return Err(IoError::parse(path, line, format!("expected t = {i}, found {t}")));
        }
        for (k, s) in out.iter_mut().enumerate() {
            let cell = rec.get(k + 1).unwrap_or("");
            if cell.is_empty() {
                ended[k] = true;
                continue;
            }
            if ended[k] {
                return Err(IoError::parse(path, line, format!("gap in column `{}`", s.label)));
            }
            let v = cell
                .parse()
                .map_err(|_| IoError::parse(path, line, format!("`{cell}` is not a number")))?;
            s.values.push(v);
        }
    }
    Ok(out)
}

/// Two-column export for data not indexed by iteration, such as a spatial
/// slice.
pub fn export_points_csv(
    headers: (&str, &str),
    points: &[(f64, f64)],
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut w = ::csv::Writer::from_path(path).map_err(|e| IoError::csv(path, e))?;
    w.write_record([headers.0, headers.1])
        .map_err(|e| IoError::csv(path, e))?;
    for (x, y) in points {
        w.write_record([x.to_string(), y.to_string()])
            .map_err(|e| IoError::csv(path, e))?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

pub fn export_prune_reports(reports: &[PruneReport], path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut w = ::csv::Writer::from_path(path).map_err(|e| IoError::csv(path, e))?;
    w.write_record([
        "lattice",
        "iteration",
        "sites_before",
        "sites_after",
        "dropped_abs_sum",
        "smallest_kept",
    ])
    .map_err(|e| IoError::csv(path, e))?;
    for r in reports {
        w.write_record([
            r.lattice.clone(),
            r.iteration.to_string(),
            r.sites_before.to_string(),
            r.sites_after.to_string(),
            r.dropped_abs_sum.to_string(),
            r.smallest_kept.to_string(),
        ])
        .map_err(|e| IoError::csv(path, e))?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

/// Writes `probes.csv` (real parts), `probes_im.csv` when any probe picked
/// up an imaginary part, and `prune.csv` into `dir`.
pub fn write_run_record(record: &RunRecord, dir: impl AsRef<Path>) -> Result<(), IoError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    let part = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Series> {
        record
            .probes
            .iter()
            .map(|p| Series::new(p.probe.to_string(), p.values.iter().map(f).collect()))
            .collect()
    };
    if !record.probes.is_empty() {
        export_series_csv(&part(|q| q.re), dir.join("probes.csv"))?;
        let complex = record
            .probes
            .iter()
            .any(|p| p.values.iter().any(|q| q.im != 0.0));
        if complex {
            export_series_csv(&part(|q| q.im), dir.join("probes_im.csv"))?;
        }
    }
    export_prune_reports(&record.prune_reports, dir.join("prune.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("dmaxwell-csv-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn one_series_three_lines() {
        let path = tmp("one.csv");
        export_series_csv(&[Series::new("Ex(0,0,0)", vec![1.0, 1.0])], &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next().unwrap(), "t,\"Ex(0,0,0)\"");
    }

    #[test]
    fn series_align_and_reparse() {
        let path = tmp("two.csv");
        let a = Series::new("a", vec![0.1, 1.0 / 3.0, -2.5e-300]);
        let b = Series::new("b", vec![7.0]);
        export_series_csv(&[a.clone(), b.clone()], &path).unwrap();
        let back = read_series_csv(&path).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn empty_list_rejected() {
        assert!(matches!(export_series_csv(&[], tmp("none.csv")), Err(IoError::NoSeries)));
    }
}
