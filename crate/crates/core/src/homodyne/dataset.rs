use super::{check_eta, RNG_ID};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

/// JSON header line of a dataset file, written after `# `.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetHeader {
    pub eta: f64,
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub state_digest: String,
    pub rng_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_digest: Option<String>,
}

/// Homodyne records `(theta_k, x_k)` with the provenance needed to regenerate them.
#[derive(Clone, Debug, PartialEq)]
pub struct HomodyneDataset {
    records: Vec<(f64, f64)>,
    eta: f64,
    seed: u64,
    state_digest: String,
    rng_id: String,
    config_digest: Option<String>,
}

impl HomodyneDataset {
    pub fn new(records: Vec<(f64, f64)>, eta: f64, seed: u64, state_digest: String) -> Result<Self> {
        let ds = HomodyneDataset { records, eta, seed, state_digest, rng_id: RNG_ID.to_string(), config_digest: None };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        check_eta(self.eta).map_err(|e| Error::Data(e.to_string()))?;
        if self.records.is_empty() {
            return Err(Error::Data("dataset has no records".into()));
        }
        for (i, &(t, x)) in self.records.iter().enumerate() {
            if !(0.0..PI).contains(&t) || !x.is_finite() {
                return Err(Error::Data(format!("record {i}: theta {t} must be in [0, pi) and x {x} finite")));
            }
        }
        Ok(())
    }

    pub fn records(&self) -> &[(f64, f64)] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state_digest(&self) -> &str {
        &self.state_digest
    }

    pub fn rng_id(&self) -> &str {
        &self.rng_id
    }

    pub fn config_digest(&self) -> Option<&str> {
        self.config_digest.as_deref()
    }

    pub fn with_config_digest(mut self, digest: impl Into<String>) -> Self {
        self.config_digest = Some(digest.into());
        self
    }

    /// First `m` records, keeping the provenance.
    pub fn prefix(&self, m: usize) -> Result<HomodyneDataset> {
        if m == 0 || m > self.len() {
            return Err(Error::Precondition(format!("prefix {m} of a {}-record dataset", self.len())));
        }
        let mut out = self.clone();
        out.records.truncate(m);
        Ok(out)
    }

    pub fn header(&self) -> DatasetHeader {
        DatasetHeader {
            eta: self.eta,
            seed: self.seed,
            m: self.len(),
            state_digest: self.state_digest.clone(),
            rng_id: self.rng_id.clone(),
            config_digest: self.config_digest.clone(),
        }
    }

    /// `# {header json}`, `theta,x`, then one record per line. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {}", serde_json::to_string(&self.header())?)?;
        writeln!(w, "theta,x")?;
        for (t, x) in &self.records {
            writeln!(w, "{t},{x}")?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        buf
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = |what: &str| -> Result<String> {
            lines.next().ok_or_else(|| Error::Data(format!("missing {what}")))?.map_err(Error::from)
        };
        let first = next("header line")?;
        let json = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::Data("first line must be '# ' followed by the JSON header".into()))?;
        let header: DatasetHeader =
            serde_json::from_str(json).map_err(|e| Error::Data(format!("dataset header: {e}")))?;
        if next("column header")? != "theta,x" {
            return Err(Error::Data("second line must be 'theta,x'".into()));
        }
        let mut records = Vec::with_capacity(header.m);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (t, x) = line.split_once(',').ok_or_else(|| Error::Data(format!("record {i}: expected 'theta,x'")))?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Data(format!("record {i}: {e}")));
            records.push((parse(t)?, parse(x)?));
        }
        if records.len() != header.m {
            return Err(Error::Data(format!("header declares M = {} but {} records follow", header.m, records.len())));
        }
        let ds = HomodyneDataset {
            records,
            eta: header.eta,
            seed: header.seed,
            state_digest: header.state_digest,
            rng_id: header.rng_id,
            config_digest: header.config_digest,
        };
        ds.validate()?;
        Ok(ds)
    }
}
