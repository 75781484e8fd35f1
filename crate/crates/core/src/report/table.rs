//! Flat CSV export of MI records.

use std::io::Write;
use std::path::Path;

use super::ReportError;
use crate::experiment::RunResult;

pub const CSV_COLUMNS: [&str; 11] = [
    "run_id", "sweep", "variant", "dataset", "split", "epoch", "layer", "i_xt_bits", "i_ty_bits", "train_acc",
    "test_acc",
];

/// One row per MI record. Floats use the shortest text that parses back to
/// the same value.
pub fn write_csv<W: Write>(results: &[RunResult], out: W) -> Result<(), ReportError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for result in results {
        let c = &result.config;
        let run_id = result.run_id();
        for r in &result.records {
            let (train_acc, test_acc) = result
                .metrics_at(r.epoch)
                .map_or((String::new(), String::new()), |m| (m.train_acc.to_string(), m.test_acc.to_string()));
            w.write_record([
                run_id.as_str(),
                c.sweep.as_deref().unwrap_or(""),
                c.variant.as_deref().unwrap_or(""),
                c.dataset.name.as_str(),
                r.split.as_str(),
                &r.epoch.to_string(),
                &r.layer.to_string(),
                &r.i_xt_bits.to_string(),
                &r.i_ty_bits.to_string(),
                &train_acc,
                &test_acc,
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn emit_csv(results: &[RunResult], path: &Path) -> Result<(), ReportError> {
    let mut buf = Vec::new();
    write_csv(results, &mut buf)?;
    super::write_file(path, std::str::from_utf8(&buf).expect("csv is utf-8"))
}
