use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use kglab::harness::VerificationRecord;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// Output directory of one run; tracks every file written so the manifest
/// can list them.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
    started: Instant,
}

/// Full double precision in scientific notation.
pub fn sci(v: f64) -> String {
    format!("{v:.17e}")
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(OutputDir { root: root.to_path_buf(), files: Vec::new(), started: Instant::now() })
    }

    fn register(&mut self, name: &str) -> PathBuf {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        self.root.join(name)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.register(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn records(&mut self, name: &str, records: &[VerificationRecord]) -> Result<(), CliError> {
        let mut w = BufWriter::new(File::create(self.register(name))?);
        for r in records {
            r.write_line(&mut w)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut w = BufWriter::new(File::create(self.register(name))?);
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Writes `summary.json` and then `manifest.json`, which lists every
    /// other file of the run.
    pub fn finish(mut self, command: &str, config: &impl Serialize, summary: Value) -> Result<(), CliError> {
        self.json("summary.json", &summary)?;
        let manifest = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "files": self.files,
            "summary": summary,
            "wall_clock_seconds": self.started.elapsed().as_secs_f64(),
        });
        let mut w = BufWriter::new(File::create(self.root.join("manifest.json"))?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}
