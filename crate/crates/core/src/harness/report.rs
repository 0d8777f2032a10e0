use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, ExperimentKind};
use crate::analytic::{write_xy_csv, XyRow};
use crate::charpoly::{write_estimate_csv, EstimateRow};
use crate::error::{Error, Result};

/// One output point. `x` is the mass (masses joined by `;`), the hard-edge
/// argument or the eigenvalue index, depending on the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub label: String,
    pub x: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub reference: Option<f64>,
    pub n_samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the effective config serialised as JSON.
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: ExperimentKind,
    pub records: Vec<Record>,
    pub verdicts: Vec<Verdict>,
    pub tolerances: super::Tolerances,
    pub provenance: Provenance,
}

impl Report {
    pub(crate) fn new(kind: ExperimentKind, cfg: &ExperimentConfig, records: Vec<Record>, verdicts: Vec<Verdict>) -> Self {
        let json = serde_json::to_vec(cfg).expect("config serialises");
        Report {
            experiment: kind,
            records,
            verdicts,
            tolerances: cfg.tolerances.clone(),
            provenance: Provenance {
                config_hash: hex::encode(Sha256::digest(&json)),
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: cfg.seed,
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// CSV payload: `mass,value,stderr,n_samples,seed` for estimates,
    /// `x,value` for analytic curves and the full record otherwise.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        match self.experiment {
            ExperimentKind::Estimate => {
                let rows = self
                    .records
                    .iter()
                    .map(|r| EstimateRow {
                        mass: r.x.clone(),
                        value: r.value,
                        stderr: r.stderr.unwrap_or(0.0),
                        n_samples: r.n_samples.unwrap_or(0),
                        seed: r.seed.unwrap_or(0),
                    })
                    .collect::<Vec<_>>();
                write_estimate_csv(&mut buf, &rows)?;
            }
            ExperimentKind::Analytic => {
                let rows = self
                    .records
                    .iter()
                    .map(|r| {
                        let x = r.x.parse().map_err(|e| Error::Io(format!("bad x {:?}: {e}", r.x)))?;
                        Ok(XyRow { x, value: r.value })
                    })
                    .collect::<Result<Vec<_>>>()?;
                write_xy_csv(&mut buf, &rows)?;
            }
            _ => write_records_csv(&mut buf, &self.records)?,
        }
        Ok(buf)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self)?;
        v.push(b'\n');
        Ok(v)
    }
}

pub fn write_records_csv<W: Write>(out: W, records: &[Record]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
