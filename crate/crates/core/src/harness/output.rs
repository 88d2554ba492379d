//! Plain-text run artefacts.
//!
//! An output directory holds:
//!
//! * `config.txt`: the effective configuration (parseable by [`RunConfig`]);
//! * `series.csv`: one header row of [`DiagnosticsRecord::COLUMNS`] and one
//!   row per sample;
//! * `f_<t>.txt`, `e_<t>.txt`, `rho_<t>.txt`: snapshots at the requested times;
//! * `summary.txt`: min/max relative drift per quantity.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use super::run::DriftSummary;
use crate::diagnostics::DiagnosticsRecord;
use crate::error::Result;
use crate::integrators::SystemState;

/// File-name stem for a snapshot time, e.g. `t0040.0000`.
pub fn time_tag(t: f64) -> String {
    format!("t{t:09.4}")
}

pub struct RunWriter {
    dir: PathBuf,
    series: BufWriter<File>,
}

impl RunWriter {
    pub fn create(dir: &Path, config: &RunConfig) -> Result<Self> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("config.txt"), config.to_string())?;
        let mut series = BufWriter::new(File::create(dir.join("series.csv"))?);
        writeln!(series, "{}", DiagnosticsRecord::csv_header())?;
        Ok(Self {
            dir: dir.to_path_buf(),
            series,
        })
    }

    pub fn record(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        writeln!(self.series, "{}", r.csv_row())?;
        // keep partial series readable if a later step fails
        self.series.flush()?;
        Ok(())
    }

    pub fn snapshot(&self, state: &SystemState) -> Result<()> {
        let tag = time_tag(state.t);
        let open = |name: String| -> Result<BufWriter<File>> {
            Ok(BufWriter::new(File::create(self.dir.join(name))?))
        };
        let mut w = open(format!("f_{tag}.txt"))?;
        state.f.write_snapshot(&mut w, state.t)?;
        w.flush()?;
        let mut w = open(format!("e_{tag}.txt"))?;
        state.e.write_dump(&mut w, "E", state.t)?;
        w.flush()?;
        let mut w = open(format!("rho_{tag}.txt"))?;
        state.f.rho().write_dump(&mut w, "rho", state.t)?;
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self, summary: &DriftSummary) -> Result<()> {
        fs::write(self.dir.join("summary.txt"), summary.to_string())?;
        Ok(())
    }
}

/// Reads a `series.csv` written by [`RunWriter`].
pub fn read_series(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != DiagnosticsRecord::csv_header() {
        return Err(crate::Error::config(format!(
            "{} does not start with the series header",
            path.display()
        )));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            DiagnosticsRecord::from_csv_row(l).ok_or_else(|| {
                crate::Error::config(format!("{}: malformed row {}", path.display(), i + 2))
            })
        })
        .collect()
}
