//! JSON-lines records and the weight-list format.

use std::fs;
use std::io::Write;
use std::path::Path;

use fano_forge::classify::ClassificationRecord;
use fano_forge::degmat::{DegreeMatrix, TorsionRow, WeightVector};
use fano_forge::singtest::{Mode, SingularityClass};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Torsion {
    pub mu: u64,
    pub eta: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineBlock {
    pub dim: i32,
    /// Vertices as exact `"p/q"` strings.
    pub vertices: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    /// `[-p, q]` normal form of a one-dimensional Fine interior.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub dim: usize,
    pub mode: String,
    pub weights: Vec<u64>,
    pub torsion: Vec<Torsion>,
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplex: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine: Option<FineBlock>,
}

impl Record {
    pub fn from_classification(r: &ClassificationRecord, mode: Mode, with_simplex: bool) -> Result<Record> {
        let simplex = if with_simplex {
            let p = r.matrix.simplex()?;
            Some(p.to_i64_rows().ok_or_else(|| CliError::Usage(format!("simplex of {} exceeds 64 bits", r.matrix)))?)
        } else {
            None
        };
        Ok(Record {
            dim: r.matrix.dim(),
            mode: mode.as_str().into(),
            weights: r.matrix.weights().as_slice().to_vec(),
            torsion: r
                .matrix
                .rows()
                .iter()
                .map(|row| Torsion { mu: row.mu, eta: row.eta.clone() })
                .collect(),
            class: r.class.as_str().into(),
            simplex,
            fine: None,
        })
    }

    pub fn degree_matrix(&self) -> fano_forge::Result<DegreeMatrix> {
        let rows = self
            .torsion
            .iter()
            .map(|t| TorsionRow::new(t.mu, t.eta.clone()))
            .collect::<fano_forge::Result<Vec<_>>>()?;
        DegreeMatrix::new(WeightVector::new(self.weights.clone())?, rows)
    }

    pub fn mode(&self) -> fano_forge::Result<Mode> {
        self.mode.parse()
    }

    pub fn singularity_class(&self) -> Option<SingularityClass> {
        match self.class.as_str() {
            "terminal" => Some(SingularityClass::Terminal),
            "canonical_strict" => Some(SingularityClass::CanonicalStrict),
            _ => None,
        }
    }

    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("records serialize");
        s.push('\n');
        s
    }
}

pub fn parse_line(path: &Path, line: usize, text: &str) -> Result<Record> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line,
        msg: e.to_string(),
    })
}

pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(path, i + 1, l))
        .collect()
}

pub fn write_records(path: &Path, records: &[Record]) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path).map_err(CliError::io(path))?);
    for r in records {
        f.write_all(r.to_line().as_bytes()).map_err(CliError::io(path))?;
    }
    f.flush().map_err(CliError::io(path))
}

/// One whitespace-separated tuple per line, `#` starts a comment. Tuples are sorted,
/// then the list is sorted and deduplicated.
pub fn parse_weights(path: &Path, text: &str, n: usize) -> Result<Vec<WeightVector>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CliError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let mut w = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u64>().map_err(|e| err(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<u64>>>()?;
        if w.len() != n + 1 {
            return Err(err(format!("expected {} weights, found {}", n + 1, w.len())));
        }
        w.sort_unstable();
        out.push(WeightVector::new(w).map_err(|e| err(e.to_string()))?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn read_weights(path: &Path, n: usize) -> Result<Vec<WeightVector>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_weights(path, &text, n)
}
