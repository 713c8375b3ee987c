//! CSV output for aggregate rows and raw per-trial records.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use schoolchoice_core::metrics::MetricsRecord;
use schoolchoice_core::trial::AggregateRow;
use thiserror::Error;

pub const AGGREGATE_HEADER: [&str; 7] = [
    "mechanism",
    "strategy",
    "k_sophisticated",
    "mean_em_higher",
    "mean_em_top3",
    "mean_em_selected",
    "trials",
];

pub const RECORD_HEADER: [&str; 9] = [
    "mechanism",
    "strategy",
    "k_sophisticated",
    "trial_index",
    "trial_seed",
    "em_higher",
    "em_top3",
    "em_selected",
    "baseline_selected",
];

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("nothing to write")]
    Empty,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn fixed(v: f64) -> String {
    format!("{v:.4}")
}

fn optional(v: Option<f64>) -> String {
    v.map(fixed).unwrap_or_default()
}

/// Writes aggregate rows as CSV to any writer.
pub fn write_rows<W: Write>(rows: &[AggregateRow], out: W) -> Result<(), OutputError> {
    if rows.is_empty() {
        return Err(OutputError::Empty);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    for r in rows {
        w.write_record([
            r.mechanism.label().to_string(),
            r.strategy.label().to_string(),
            r.k_sophisticated.to_string(),
            fixed(r.mean_em_higher),
            fixed(r.mean_em_top3),
            optional(r.mean_em_selected),
            r.trials.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes raw per-trial records as CSV.
pub fn write_records<W: Write>(records: &[MetricsRecord], out: W) -> Result<(), OutputError> {
    if records.is_empty() {
        return Err(OutputError::Empty);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.mechanism.label().to_string(),
            r.strategy.label().to_string(),
            r.k_sophisticated.to_string(),
            r.trial_index.to_string(),
            r.trial_seed.to_string(),
            fixed(r.em_higher),
            fixed(r.em_top3),
            optional(r.em_selected),
            optional(r.baseline_selected),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn create(path: &Path) -> Result<File, OutputError> {
    File::create(path).map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes aggregate rows to `path`. Nothing is created when `rows` is
/// empty.
pub fn write_csv(rows: &[AggregateRow], path: &Path) -> Result<(), OutputError> {
    if rows.is_empty() {
        return Err(OutputError::Empty);
    }
    write_rows(rows, create(path)?)
}

pub fn write_records_csv(records: &[MetricsRecord], path: &Path) -> Result<(), OutputError> {
    if records.is_empty() {
        return Err(OutputError::Empty);
    }
    write_records(records, create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use schoolchoice_core::{Mechanism, StrategyKind};

    fn row(selected: Option<f64>) -> AggregateRow {
        AggregateRow {
            mechanism: Mechanism::Boston,
            strategy: StrategyKind::A,
            k_sophisticated: 200,
            mean_em_higher: 12.5,
            mean_em_top3: 3.25,
            mean_em_selected: selected,
            trials: 100,
        }
    }

    fn render(rows: &[AggregateRow]) -> String {
        let mut buf = Vec::new();
        write_rows(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn row_format() {
        assert_eq!(
            render(&[row(None)]),
            "mechanism,strategy,k_sophisticated,mean_em_higher,mean_em_top3,mean_em_selected,trials\n\
             boston,A,200,12.5000,3.2500,,100\n"
        );
        assert!(render(&[row(Some(18.0))]).ends_with("boston,A,200,12.5000,3.2500,18.0000,100\n"));
    }

    #[test]
    fn empty_rows_create_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        assert!(matches!(write_csv(&[], &path), Err(OutputError::Empty)));
        assert!(!path.exists());
    }

    #[test]
    fn same_rows_same_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        let rows = [row(None), row(Some(1.0 / 3.0))];
        write_csv(&rows, &a).unwrap();
        write_csv(&rows, &b).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = write_csv(&[row(None)], Path::new("/nonexistent/dir/out.csv")).unwrap_err();
        assert!(
            err.to_string().contains("/nonexistent/dir/out.csv"),
            "{err}"
        );
    }
}
