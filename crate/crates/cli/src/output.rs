//! Artifact writers. Every CSV starts with a `# <schema>` comment naming
//! its layout version; floats are written with shortest-round-trip
//! formatting so files re-read bit-for-bit.

use std::path::Path;

use inspectrank_core::error::{Error, Result};

pub const INVENTORY_SCHEMA: &str = "inspectrank.inventory.v1";
pub const DECISIONS_SCHEMA: &str = "inspectrank.decisions.v1";
pub const SWEEP_SCHEMA: &str = "inspectrank.sweep.v1";
pub const SAMPLES_SCHEMA: &str = "inspectrank.samples.v1";
pub const CDF_SCHEMA: &str = "inspectrank.cdf.v1";
pub const SCENARIO_SCHEMA: &str = "inspectrank.scenario.v1";
pub const CURVES_SCHEMA: &str = "inspectrank.curves.v1";

/// CSV artifact under construction: schema comment, then records with
/// standard quoting.
pub struct CsvOut {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvOut {
    pub fn new(schema: &str) -> CsvOut {
        let mut buf = Vec::new();
        buf.extend_from_slice(format!("# {schema}\n").as_bytes());
        CsvOut {
            writer: csv::Writer::from_writer(buf),
        }
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|e| Error::validation(format!("csv write: {e}")))
    }

    pub fn into_bytes(self) -> Result<Vec<u8>> {
        self.writer
            .into_inner()
            .map_err(|e| Error::validation(format!("csv write: {e}")))
    }

    pub fn save(self, path: &Path) -> Result<()> {
        let bytes = self.into_bytes()?;
        write_bytes(path, &bytes)
    }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::validation(format!("json write: {e}")))?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}
