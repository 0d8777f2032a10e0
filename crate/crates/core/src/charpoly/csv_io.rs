use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Estimate, SourceSpec};
use crate::error::{Error, Result};

/// One CSV line: masses joined by `;`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub mass: String,
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl EstimateRow {
    pub fn new(src: &SourceSpec, e: &Estimate) -> Result<Self> {
        let masses = src
            .real_masses()
            .ok_or_else(|| Error::Unsupported("CSV rows hold real masses only".into()))?;
        Ok(EstimateRow {
            mass: masses.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(";"),
            value: e.value,
            stderr: e.stderr,
            n_samples: e.n_samples,
            seed: e.seed,
        })
    }

    pub fn source(&self) -> Result<SourceSpec> {
        let masses = self
            .mass
            .split(';')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Io(format!("bad mass {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        SourceSpec::real(&masses)
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.value,
            stderr: self.stderr,
            n_samples: self.n_samples,
            seed: self.seed,
        }
    }
}

pub fn write_estimate_csv<W: Write>(out: W, rows: &[EstimateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_estimate_csv<R: Read>(input: R) -> Result<Vec<EstimateRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
