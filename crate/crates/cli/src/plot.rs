//! Plot-ready view of a records CSV.
//!
//! Output columns, always in this order: `sweep,statistic,bound,holds`.
//! `sweep` is the records' `sweep` column when present (bound-vs-n curves)
//! and the replication index otherwise. Rows are sorted by `sweep` with a
//! stable sort, so ties keep their input order. An input with no rows gives
//! a header-only output.

use std::io::{Read, Write};
use std::path::Path;

use crate::CliError;

pub const PLOT_HEADER: [&str; 4] = ["sweep", "statistic", "bound", "holds"];
const REQUIRED: [&str; 5] = ["replication", "seed", "statistic", "bound", "holds"];

struct Row {
    sweep: f64,
    statistic: String,
    bound: String,
    holds: String,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Records(msg.into())
}

/// Converts records from `input` and writes the plot CSV to `output`,
/// returning the number of rows.
pub fn emit_plot_data(input: impl Read, output: impl Write) -> Result<usize, CliError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let empty_input = headers.is_empty() || (headers.len() == 1 && headers[0].is_empty());
    let column = |name: &str| headers.iter().position(|h| h == name);
    let mut rows = Vec::new();
    if !empty_input {
        let idx: Vec<usize> = REQUIRED
            .iter()
            .map(|name| column(name).ok_or_else(|| bad(format!("missing column `{name}`"))))
            .collect::<Result<_, _>>()?;
        let sweep_col = column("sweep");
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let number = |i: usize, name: &str| -> Result<f64, CliError> {
                field(i)
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("row {}: `{name}` is not a number: {:?}", line + 1, field(i))))
            };
            number(idx[1], "seed")?;
            let sweep = match sweep_col {
                Some(c) => number(c, "sweep")?,
                None => number(idx[0], "replication")?,
            };
            let statistic = number(idx[2], "statistic")?;
            let bound = number(idx[3], "bound")?;
            let holds = field(idx[4]).trim();
            if holds != "true" && holds != "false" {
                return Err(bad(format!("row {}: `holds` must be true or false, got {holds:?}", line + 1)));
            }
            rows.push(Row {
                sweep,
                statistic: statistic.to_string(),
                bound: bound.to_string(),
                holds: holds.to_string(),
            });
        }
    }
    rows.sort_by(|a, b| a.sweep.total_cmp(&b.sweep));

    let io = |e: csv::Error| CliError::io("plot output", e.into());
    let mut w = csv::Writer::from_writer(output);
    w.write_record(PLOT_HEADER).map_err(io)?;
    for r in &rows {
        w.write_record([r.sweep.to_string(), r.statistic.clone(), r.bound.clone(), r.holds.clone()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io("plot output", e))?;
    Ok(rows.len())
}

pub fn emit_plot_file(records: &Path, out: &Path) -> Result<usize, CliError> {
    let input = std::fs::File::open(records).map_err(|e| CliError::io(records, e))?;
    // render into memory first so malformed input leaves no partial file
    let mut buf = Vec::new();
    let rows = emit_plot_data(input, &mut buf)?;
    std::fs::write(out, buf).map_err(|e| CliError::io(out, e))?;
    Ok(rows)
}
