//! Cross-engine validation, presets and run configuration.

pub mod compare;
pub mod config;
pub mod convergence;
pub mod presets;

pub use compare::{compare_system, ComparisonReport};
pub use config::{Mode, Resolved, RunConfig};
pub use convergence::{convergence_study, eps_sweep, ConvergenceStudy};
pub use presets::{load_initial, Preset};

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Writes serializable rows as CSV with a header from the field names.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
