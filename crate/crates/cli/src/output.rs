use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

use seqrisk::validation::ReplicationRecord;
use seqrisk::SequenceSample;

use crate::{CliError, ExperimentConfig, Outcome};

pub const SUMMARY_FILE: &str = "summary.json";
pub const METADATA_FILE: &str = "metadata.json";
pub const RECORDS_FILE: &str = "records.csv";
pub const SEQUENCE_FILE: &str = "sequence.csv";

/// The deterministic part of a run: no clocks, no thread counts.
pub fn summary_json(config: &ExperimentConfig, outcome: &Outcome) -> Result<String, CliError> {
    let summary = json!({
        "command": config.command.name(),
        "seed": config.seed,
        "config": config,
        "result": outcome.result,
        "property_holds": outcome.property_holds,
    });
    serde_json::to_string_pretty(&summary).map_err(|e| CliError::Config(format!("cannot encode summary: {e}")))
}

pub fn write_outputs(dir: &Path, config: &ExperimentConfig, outcome: &Outcome) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_text(&dir.join(SUMMARY_FILE), &(summary_json(config, outcome)? + "\n"))?;

    let created = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let metadata = json!({
        "created_unix_seconds": created,
        "version": env!("CARGO_PKG_VERSION"),
        "threads": rayon::current_num_threads(),
    });
    write_text(&dir.join(METADATA_FILE), &(metadata.to_string() + "\n"))?;

    if let Some(records) = &outcome.records {
        write_records(&dir.join(RECORDS_FILE), records, outcome.sweep.as_deref())?;
    }
    if let Some(seq) = &outcome.sequence {
        write_sequence(&dir.join(SEQUENCE_FILE), seq)?;
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, e.into())
}

pub fn write_records(path: &Path, records: &[ReplicationRecord], sweep: Option<&[f64]>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["replication", "seed", "statistic", "bound", "holds"];
    if sweep.is_some() {
        header.push("sweep");
    }
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (i, r) in records.iter().enumerate() {
        let mut row = vec![
            r.replication.to_string(),
            r.seed.to_string(),
            r.statistic.to_string(),
            r.bound.to_string(),
            r.holds.to_string(),
        ];
        if let Some(s) = sweep {
            row.push(s[i].to_string());
        }
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_sequence(path: &Path, seq: &SequenceSample) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["index".to_string()];
    header.extend((0..seq.dim).map(|k| format!("x{k}")));
    header.push("y".into());
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (i, (x, y)) in seq.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(x.iter().map(f64::to_string));
        row.push(y.to_string());
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
