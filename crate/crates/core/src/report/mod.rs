//! Tables, figures and trend checks built from run results.

pub mod curves;
pub mod svg;
pub mod table;
pub mod verify;

use thiserror::Error;

pub use curves::{
    compression_diagnostic, first_epoch_reaching, info_plane, mi_curves, CompressionVerdict, InfoPlaneSeries, MICurve,
    COMPRESSION_THRESHOLD,
};
pub use svg::{emit_infoplane_svg, emit_mi_epoch_svg, emit_sweep_svg, infoplane_svg, mi_epoch_svg, sweep_svg};
pub use table::{emit_csv, write_csv, CSV_COLUMNS};
pub use verify::{verify_result, VerifyReport};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("no records for the {0} split")]
    Empty(crate::data::Split),
    #[error("compression diagnostic needs at least 4 points, got {0}")]
    TooFewPoints(usize),
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<(), ReportError> {
    let io = |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, contents).map_err(io)
}
