//! The four subcommands. Each takes already-parsed arguments and writes its
//! output; thread pools are set up by the caller.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use fano_forge::classify::{self, enumerate_weight_vectors, minimal_representative, Options};
use fano_forge::degmat::{DegreeMatrix, WeightVector};
use fano_forge::fine::{fine_interior_of_columns, FineResult};
use fano_forge::polytope::{segment_label, segment_normal_form, unimodular_key};
use fano_forge::singtest::{self, Mode};
use fano_forge::{rat, Execution};

use crate::checkpoint;
use crate::error::{CliError, Result};
use crate::record::{self, FineBlock, Record};

/// Records handed to the executor at once in `verify` and `fine`.
const RECORD_CHUNK: usize = 256;

pub struct ClassifyArgs {
    pub dim: usize,
    pub mode: Mode,
    pub weights_file: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub out: PathBuf,
    pub with_simplex: bool,
}

/// Returns the number of records written by this invocation and in total.
pub fn classify(args: &ClassifyArgs, exec: Execution) -> Result<(usize, usize)> {
    let weights = match &args.weights_file {
        Some(path) => record::read_weights(path, args.dim)?,
        None => {
            if args.dim > classify::MAX_DIM {
                return Err(fano_forge::Error::DimensionCap(args.dim, classify::MAX_DIM).into());
            }
            enumerate_weight_vectors(args.dim, args.mode, exec).0
        }
    };
    let options = Options { exec, ..Options::default() };
    let out_path = &args.out;
    let (skip, file, mut journal) = match &args.checkpoint {
        Some(j) => {
            let (done, file, journal) = checkpoint::resume(j, out_path, &weights)?;
            (done, file, Some(journal))
        }
        None => (0, File::create(out_path).map_err(CliError::io(out_path))?, None),
    };
    let previous = if skip > 0 {
        fs::read_to_string(out_path).map_err(CliError::io(out_path))?.lines().count()
    } else {
        0
    };
    let mut out = BufWriter::new(file);
    let mut written = 0usize;
    let todo: Vec<WeightVector> = weights[skip..].to_vec();
    classify::classify_weights_with(todo, args.mode, &options, |shard| {
        let mut bytes = Vec::new();
        for r in &shard.records {
            bytes.extend_from_slice(Record::from_classification(r, args.mode, args.with_simplex)?.to_line().as_bytes());
        }
        out.write_all(&bytes).map_err(CliError::io(out_path))?;
        written += shard.records.len();
        if let Some(j) = journal.as_mut() {
            // the journal must never run ahead of the data it vouches for
            out.flush().map_err(CliError::io(out_path))?;
            j.append(&shard.weights, &checkpoint::shard_hash(&bytes))?;
        }
        Ok::<(), CliError>(())
    })?;
    out.flush().map_err(CliError::io(out_path))?;
    Ok((written, previous + written))
}

/// Checks one record; `Err` carries the reason.
pub fn verify_record(r: &Record) -> std::result::Result<(), String> {
    let q = r.degree_matrix().map_err(|e| format!("degree matrix: {e}"))?;
    let mode = r.mode().map_err(|e| e.to_string())?;
    if r.dim != q.dim() {
        return Err(format!("dim {} but {} weights", r.dim, q.ncols()));
    }
    if !q.is_almost_free() {
        return Err("not almost free".into());
    }
    let claimed = r.singularity_class().ok_or_else(|| format!("unknown class {:?}", r.class))?;
    let class = singtest::classify(&q).map_err(|e| e.to_string())?;
    if class != claimed {
        return Err(format!("class is {}, record says {}", class.as_str(), claimed.as_str()));
    }
    if !class.meets(mode) {
        return Err(format!("{} record in {} mode", class.as_str(), mode.as_str()));
    }
    let p = q.simplex().map_err(|e| format!("simplex: {e}"))?;
    let oracle = singtest::lattice_point_oracle(&p).map_err(|e| e.to_string())?;
    if oracle != class {
        return Err(format!("lattice points give {}, ages give {}", oracle.as_str(), class.as_str()));
    }
    if let Some(s) = &r.simplex {
        if p.to_i64_rows().as_ref() != Some(s) {
            return Err("stored simplex differs from the reconstruction".into());
        }
    }
    let back = DegreeMatrix::from_generator_matrix(&p).map_err(|e| format!("simplex cokernel: {e}"))?;
    let min = minimal_representative(&q).map_err(|e| e.to_string())?;
    if min != q {
        return Err(format!("not minimal, minimal form is {min}"));
    }
    if minimal_representative(&back).map_err(|e| e.to_string())? != q {
        return Err("simplex does not reproduce the degree matrix".into());
    }
    if let Some(f) = &r.fine {
        let expected = fine_block(&p).map_err(|e| format!("fine interior: {e}"))?;
        if *f != expected {
            return Err("fine block differs from recomputation".into());
        }
    }
    Ok(())
}

pub struct VerifyReport {
    pub records: usize,
    pub failures: usize,
}

/// Writes one line per record, then a summary line.
pub fn verify(input: &Path, exec: Execution, report: &mut impl Write) -> Result<VerifyReport> {
    let records = record::read_records(input)?;
    let n = records.len();
    let chunks: Vec<Vec<(usize, Record)>> = chunked(records.into_iter().enumerate().collect(), RECORD_CHUNK);
    let results: Vec<Vec<(usize, std::result::Result<(), String>, Option<DegreeMatrix>)>> =
        exec.map(chunks, |chunk| {
            chunk
                .into_iter()
                .map(|(i, r)| (i, verify_record(&r), r.degree_matrix().ok()))
                .collect()
        });
    let mut failures = 0usize;
    let mut prev: Option<DegreeMatrix> = None;
    let stdout_err = |e| CliError::io("<report>")(e);
    for (i, res, q) in results.into_iter().flatten() {
        let order = match (&prev, &q) {
            (Some(a), Some(b)) if a >= b => Err(format!("out of order or duplicate after {a}")),
            _ => Ok(()),
        };
        match res.and(order) {
            Ok(()) => writeln!(report, "pass {i}").map_err(stdout_err)?,
            Err(reason) => {
                failures += 1;
                writeln!(report, "FAIL {i}: {reason}").map_err(stdout_err)?;
            }
        }
        if q.is_some() {
            prev = q;
        }
    }
    writeln!(report, "{n} records, {} passed, {failures} failed", n - failures).map_err(stdout_err)?;
    Ok(VerifyReport { records: n, failures })
}

pub fn fine_block(p: &fano_forge::abgroup::IntMatrix) -> fano_forge::Result<FineBlock> {
    let f: FineResult = fine_interior_of_columns(p)?;
    let vertices = f
        .polytope
        .vertices()
        .iter()
        .map(|v| v.iter().map(rat::to_string).collect())
        .collect();
    let key = (!f.is_empty()).then(|| unimodular_key(&f.polytope).as_str().to_string());
    let segment = segment_normal_form(&f.polytope).map(|(a, b)| segment_label(&a, &b));
    Ok(FineBlock {
        dim: f.dim(),
        vertices,
        key,
        segment,
    })
}

fn record_fine(r: &Record) -> fano_forge::Result<FineBlock> {
    let p = match &r.simplex {
        Some(rows) => fano_forge::abgroup::IntMatrix::from_rows(rows),
        None => r.degree_matrix()?.simplex()?,
    };
    fine_block(&p)
}

/// Adds the Fine block to every record. Returns the number of records.
pub fn fine(input: &Path, output: &Path, exec: Execution) -> Result<usize> {
    let records = record::read_records(input)?;
    let n = records.len();
    let done: Vec<Vec<fano_forge::Result<Record>>> = exec.map(chunked(records, RECORD_CHUNK), |chunk| {
        chunk
            .into_iter()
            .map(|mut r| {
                r.fine = Some(record_fine(&r)?);
                Ok(r)
            })
            .collect()
    });
    let done = done.into_iter().flatten().collect::<fano_forge::Result<Vec<Record>>>()?;
    record::write_records(output, &done)?;
    Ok(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatsBy {
    FineDim,
    FineKey,
    Weights,
    Segment,
}

impl std::str::FromStr for StatsBy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fine_dim" => Ok(StatsBy::FineDim),
            "fine_key" => Ok(StatsBy::FineKey),
            "weights" => Ok(StatsBy::Weights),
            "segment" => Ok(StatsBy::Segment),
            other => Err(format!("unknown grouping {other:?}; expected fine_dim, fine_key, weights or segment")),
        }
    }
}

fn read_extra_column(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

/// Aggregates `input` into CSV on `out`.
///
/// * `fine_dim`: `fine_dim,count`
/// * `fine_key`: `fine_dim,distinct_keys,records`
/// * `weights`: `weights,count`
/// * `segment`: `segment,count` over one-dimensional Fine interiors
///
/// With an extra column (one value per record, in order) every grouping gains a
/// `value` column and counts are taken per (group, value).
pub fn stats(input: &Path, by: StatsBy, extra: Option<&Path>, out: impl Write) -> Result<()> {
    let records = record::read_records(input)?;
    let extra = match extra {
        Some(p) => {
            let col = read_extra_column(p)?;
            if col.len() != records.len() {
                return Err(CliError::Parse {
                    path: p.to_path_buf(),
                    line: col.len().min(records.len()) + 1,
                    msg: format!("{} values for {} records", col.len(), records.len()),
                });
            }
            Some(col)
        }
        None => None,
    };
    let missing = |i: usize, what: &str| CliError::Parse {
        path: input.to_path_buf(),
        line: i + 1,
        msg: format!("record has no {what}"),
    };
    let value = |i: usize| extra.as_ref().map(|c| c[i].clone()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::Io {
        path: "<csv>".into(),
        source: io::Error::other(e),
    };
    let with_value = extra.is_some();
    let header = |cols: &[&str]| -> Vec<String> {
        let mut h: Vec<String> = cols.iter().map(|s| s.to_string()).collect();
        if with_value {
            h.insert(1, "value".into());
        }
        h
    };
    match by {
        StatsBy::FineDim | StatsBy::Weights | StatsBy::Segment => {
            // numeric group first so fine dimensions sort as integers
            let mut counts: BTreeMap<(i64, String, String), u64> = BTreeMap::new();
            for (i, r) in records.iter().enumerate() {
                let group = match by {
                    StatsBy::FineDim => {
                        let f = r.fine.as_ref().ok_or_else(|| missing(i, "fine block"))?;
                        (f.dim as i64, f.dim.to_string())
                    }
                    StatsBy::Weights => {
                        let s: Vec<String> = r.weights.iter().map(|x| x.to_string()).collect();
                        (0, s.join(" "))
                    }
                    _ => {
                        let f = r.fine.as_ref().ok_or_else(|| missing(i, "fine block"))?;
                        match &f.segment {
                            Some(s) => (0, s.clone()),
                            None => continue,
                        }
                    }
                };
                *counts.entry((group.0, group.1, value(i))).or_default() += 1;
            }
            let name = match by {
                StatsBy::FineDim => "fine_dim",
                StatsBy::Weights => "weights",
                _ => "segment",
            };
            w.write_record(header(&[name, "count"])).map_err(csv_err)?;
            let mut keys: Vec<_> = counts.into_iter().collect();
            if by == StatsBy::Segment {
                keys.sort_by(|a, b| segment_order(&a.0 .1).cmp(&segment_order(&b.0 .1)).then(a.0 .2.cmp(&b.0 .2)));
            }
            for ((_, g, v), c) in keys {
                let mut row = vec![g];
                if with_value {
                    row.push(v);
                }
                row.push(c.to_string());
                w.write_record(row).map_err(csv_err)?;
            }
        }
        StatsBy::FineKey => {
            let mut keys: BTreeMap<(i32, String), (BTreeSet<String>, u64)> = BTreeMap::new();
            for (i, r) in records.iter().enumerate() {
                let f = r.fine.as_ref().ok_or_else(|| missing(i, "fine block"))?;
                let e = keys.entry((f.dim, value(i))).or_default();
                if let Some(k) = &f.key {
                    e.0.insert(k.clone());
                }
                e.1 += 1;
            }
            w.write_record(header(&["fine_dim", "distinct_keys", "records"])).map_err(csv_err)?;
            for ((d, v), (set, count)) in keys {
                let mut row = vec![d.to_string()];
                if with_value {
                    row.push(v);
                }
                row.push(set.len().to_string());
                row.push(count.to_string());
                w.write_record(row).map_err(csv_err)?;
            }
        }
    }
    w.flush().map_err(CliError::io("<csv>"))
}

/// Segments `[-p, q]` sort by `(p, q)` as rationals.
fn segment_order(label: &str) -> (rat::Q, rat::Q) {
    let inner = label.trim_start_matches('[').trim_end_matches(']');
    let (a, b) = inner.split_once(',').unwrap_or(("0", "0"));
    let p = rat::parse(a.trim().trim_start_matches('-')).unwrap_or_default();
    let q = rat::parse(b.trim()).unwrap_or_default();
    (p, q)
}

fn chunked<T>(items: Vec<T>, size: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut it = items.into_iter().peekable();
    while it.peek().is_some() {
        out.push(it.by_ref().take(size).collect());
    }
    out
}
