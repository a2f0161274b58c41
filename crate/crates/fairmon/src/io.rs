//! File formats: prediction CSVs, stay CSVs, simulator output and atomic
//! writes.
//!
//! Predictions: header `stay_id,score,outcome,<feature columns...>`. The
//! score column is selectable so a file can carry several scorer outputs;
//! the outcome column defaults to `outcome` with `died` accepted as a
//! fallback, which makes simulator output directly consumable.
//!
//! Stays: header `stay_id,icu_id,gcs_total` where `gcs_total` is an integer
//! in 3..=15 or empty (documented as unable to score). `gcs_recorded` is
//! accepted as an alias for `gcs_total`, again so simulator output can be
//! fed straight in. An extended header with `gcs_eye,gcs_verbal,gcs_motor`
//! enables component validation.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gcs::{GcsScore, StayGcsRecord};
use crate::metrics::PredictionRecord;
use crate::sim::{score_legacy, score_robust, LogisticCoeffs, SimulatedStay};

fn csv_error(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_owned(),
        source,
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_owned(),
        source,
    }
}

fn parse_error(path: &Path, line: u64, field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        field: field.to_owned(),
        message: message.into(),
    }
}

/// A CSV file held as named string columns, in header order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&[String]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

/// Read an entire CSV file into string columns.
pub fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut columns: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        for (i, cell) in record.iter().enumerate() {
            if i < columns.len() {
                columns[i].push(cell.to_owned());
            }
        }
        for column in columns.iter_mut().skip(record.len()) {
            column.push(String::new());
        }
    }
    Ok(Table { headers, columns })
}

/// Write string columns back out as CSV, quoting only where needed.
pub fn write_table(table: &Table, path: &Path) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer
        .write_record(&table.headers)
        .map_err(|e| csv_error(path, e))?;
    for row in 0..table.n_rows() {
        let cells: Vec<&str> = table.columns.iter().map(|c| c[row].as_str()).collect();
        writer.write_record(&cells).map_err(|e| csv_error(path, e))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| io_error(path, std::io::Error::other(e)))?;
    write_bytes_atomic(path, &bytes)
}

fn find_column(path: &Path, headers: &[String], name: &str) -> Result<usize> {
    headers.iter().position(|h| h == name).ok_or_else(|| {
        Error::Config(format!(
            "column {name:?} not found in {} (available: {})",
            path.display(),
            headers.join(", ")
        ))
    })
}

/// Read prediction records.
///
/// `score_column` selects which column carries the risk score.
/// `outcome_column` defaults to `outcome`, falling back to `died`. Every
/// name in `feature_columns` must exist and is ingested as a sensitive
/// feature; other columns are ignored.
pub fn read_predictions(
    path: &Path,
    score_column: &str,
    outcome_column: Option<&str>,
    feature_columns: &[String],
) -> Result<Vec<PredictionRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();

    let stay_idx = find_column(path, &headers, "stay_id")?;
    let score_idx = find_column(path, &headers, score_column)?;
    let outcome_idx = match outcome_column {
        Some(name) => find_column(path, &headers, name)?,
        None => find_column(path, &headers, "outcome")
            .or_else(|_| find_column(path, &headers, "died"))
            .map_err(|_| {
                Error::Config(format!(
                    "no outcome column: expected \"outcome\" or \"died\" in {}",
                    path.display()
                ))
            })?,
    };
    let feature_idx: Vec<(String, usize)> = feature_columns
        .iter()
        .map(|name| Ok((name.clone(), find_column(path, &headers, name)?)))
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |idx: usize| record.get(idx).unwrap_or("");

        let stay_id = cell(stay_idx);
        if stay_id.is_empty() {
            return Err(parse_error(path, line, "stay_id", "must be non-empty"));
        }
        let score: f64 = cell(score_idx).parse().map_err(|_| {
            parse_error(
                path,
                line,
                score_column,
                format!("expected a number, got {:?}", cell(score_idx)),
            )
        })?;
        if !(0.0..=1.0).contains(&score) {
            return Err(parse_error(
                path,
                line,
                score_column,
                format!("score {score} outside [0, 1]"),
            ));
        }
        let outcome = match cell(outcome_idx) {
            "0" => false,
            "1" => true,
            other => {
                return Err(parse_error(
                    path,
                    line,
                    &headers[outcome_idx],
                    format!("expected 0 or 1, got {other:?}"),
                ))
            }
        };
        let mut features = HashMap::with_capacity(feature_idx.len());
        for (name, idx) in &feature_idx {
            let level = cell(*idx);
            if level.is_empty() {
                return Err(parse_error(path, line, name, "feature level is empty"));
            }
            features.insert(name.clone(), level.to_owned());
        }
        records.push(PredictionRecord {
            stay_id: stay_id.to_owned(),
            score,
            outcome,
            features,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyInput {
            what: "predictions file has no data rows",
        });
    }
    Ok(records)
}

/// Read stay records with their recorded GCS.
pub fn read_stays(path: &Path) -> Result<Vec<StayGcsRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();

    let stay_idx = find_column(path, &headers, "stay_id")?;
    let icu_idx = find_column(path, &headers, "icu_id")?;
    let (total_idx, total_name) = match headers.iter().position(|h| h == "gcs_total") {
        Some(i) => (Some(i), "gcs_total"),
        None => (
            headers.iter().position(|h| h == "gcs_recorded"),
            "gcs_recorded",
        ),
    };
    let component_idx: Option<[usize; 3]> = match (
        headers.iter().position(|h| h == "gcs_eye"),
        headers.iter().position(|h| h == "gcs_verbal"),
        headers.iter().position(|h| h == "gcs_motor"),
    ) {
        (Some(e), Some(v), Some(m)) => Some([e, v, m]),
        (None, None, None) => None,
        _ => {
            return Err(Error::Config(format!(
                "{}: gcs_eye, gcs_verbal and gcs_motor must be present together",
                path.display()
            )))
        }
    };
    if total_idx.is_none() && component_idx.is_none() {
        return Err(Error::Config(format!(
            "column \"gcs_total\" not found in {} (available: {})",
            path.display(),
            headers.join(", ")
        )));
    }

    let parse_component = |raw: &str, line: u64, field: &str| -> Result<Option<u8>> {
        if raw.is_empty() {
            return Ok(None);
        }
        raw.parse::<u8>()
            .map(Some)
            .map_err(|_| parse_error(path, line, field, format!("expected an integer, got {raw:?}")))
    };

    let mut stays = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |idx: usize| record.get(idx).unwrap_or("");

        let stay_id = cell(stay_idx);
        if stay_id.is_empty() {
            return Err(parse_error(path, line, "stay_id", "must be non-empty"));
        }
        let icu_id = cell(icu_idx);
        if icu_id.is_empty() {
            return Err(parse_error(path, line, "icu_id", "must be non-empty"));
        }

        let total: Option<u8> = match total_idx {
            Some(idx) => parse_component(cell(idx), line, total_name)?,
            None => None,
        };
        let gcs = match component_idx {
            Some([e, v, m]) => {
                let eye = parse_component(cell(e), line, "gcs_eye")?;
                let verbal = parse_component(cell(v), line, "gcs_verbal")?;
                let motor = parse_component(cell(m), line, "gcs_motor")?;
                match (eye, verbal, motor) {
                    (Some(eye), Some(verbal), Some(motor)) => {
                        let score = GcsScore::from_components(eye, verbal, motor)
                            .map_err(|err| err.named_stay(stay_id))?;
                        if let Some(t) = total {
                            if t != score.total() {
                                return Err(parse_error(
                                    path,
                                    line,
                                    total_name,
                                    format!(
                                        "total {t} does not match component sum {}",
                                        score.total()
                                    ),
                                ));
                            }
                        }
                        Some(score)
                    }
                    (None, None, None) => match total {
                        Some(t) => {
                            Some(GcsScore::from_total(t).map_err(|err| err.named_stay(stay_id))?)
                        }
                        None => None,
                    },
                    _ => {
                        return Err(parse_error(
                            path,
                            line,
                            "gcs_eye",
                            "GCS components must be all present or all empty",
                        ))
                    }
                }
            }
            None => match total {
                Some(t) => Some(GcsScore::from_total(t).map_err(|err| err.named_stay(stay_id))?),
                None => None,
            },
        };
        stays.push(StayGcsRecord {
            stay_id: stay_id.to_owned(),
            icu_id: icu_id.to_owned(),
            gcs,
        });
    }
    if stays.is_empty() {
        return Err(Error::EmptyInput {
            what: "stays file has no data rows",
        });
    }
    Ok(stays)
}

/// Header of the simulator output CSV.
pub const COHORT_HEADER: &str =
    "stay_id,icu_id,sex,race,dxGroup,sedated,gcs_true,gcs_recorded,died,score_legacy,score_robust";

/// Render a simulated cohort, scored by both scorers, as CSV bytes.
///
/// Floats are written with the shortest round-trip representation so the
/// file re-reads to exactly the in-memory values.
pub fn cohort_to_csv(stays: &[SimulatedStay], coeffs: &LogisticCoeffs) -> Vec<u8> {
    let mut out = String::with_capacity(stays.len() * 96);
    out.push_str(COHORT_HEADER);
    out.push('\n');
    for stay in stays {
        let recorded = stay
            .recorded_gcs
            .map(|g| g.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            stay.stay_id,
            stay.icu_id,
            stay.sex,
            stay.race,
            stay.dx_group,
            u8::from(stay.sedated),
            stay.true_gcs,
            recorded,
            u8::from(stay.died),
            score_legacy(stay, coeffs),
            score_robust(stay, coeffs),
        ));
    }
    out.into_bytes()
}

/// Write bytes via a temporary file in the target directory plus rename, so
/// readers never observe a partial file.
pub fn write_bytes_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_owned(),
        _ => std::path::PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| io_error(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.flush().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

/// Hex SHA-256 of a file's bytes, prefixed with the algorithm name.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    Ok(format!("sha256:{:x}", Sha256::digest(&bytes)))
}
