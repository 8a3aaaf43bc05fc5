//! Append-only journal of finished weight vectors with the hash of their output.
//!
//! Each line is `w_0 … w_n <sha256>` where the hash covers the exact bytes written
//! for that weight vector. Output is written in weight order, so on resume the record
//! file is kept up to the last journaled shard whose bytes still hash correctly and
//! truncated after it.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use fano_forge::degmat::WeightVector;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::record;

pub fn shard_hash(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub struct Journal {
    path: PathBuf,
    file: File,
}

impl Journal {
    pub fn append(&mut self, w: &WeightVector, hash: &str) -> Result<()> {
        let mut line: Vec<String> = w.as_slice().iter().map(|x| x.to_string()).collect();
        line.push(hash.to_string());
        writeln!(self.file, "{}", line.join(" ")).map_err(CliError::io(&self.path))?;
        self.file.flush().map_err(CliError::io(&self.path))
    }
}

fn parse_journal(path: &Path) -> Result<Vec<(Vec<u64>, String)>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CliError::io(path)(e)),
    };
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let mut parts: Vec<&str> = line.split_whitespace().collect();
        let Some(hash) = parts.pop() else { continue };
        let w = parts
            .iter()
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<Vec<u64>, _>>()
            .map_err(|e| CliError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: e.to_string(),
            });
        match w {
            Ok(w) => out.push((w, hash.to_string())),
            // a torn last line from an interrupted write
            Err(_) if i + 1 == text.lines().count() => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Opens the output and journal for a run over `weights`, returning how many leading
/// weight vectors are already complete.
pub fn resume(journal_path: &Path, out_path: &Path, weights: &[WeightVector]) -> Result<(usize, File, Journal)> {
    let entries = parse_journal(journal_path)?;
    let existing = match fs::read(out_path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(CliError::io(out_path)(e)),
    };
    let mut pos = 0usize;
    let mut done = 0usize;
    for (w, hash) in &entries {
        if done >= weights.len() || weights[done].as_slice() != w.as_slice() {
            break;
        }
        let mut end = pos;
        while end < existing.len() {
            let nl = existing[end..].iter().position(|&b| b == b'\n').map(|i| end + i + 1);
            let Some(next) = nl else { break };
            let text = std::str::from_utf8(&existing[end..next]).unwrap_or("");
            match record::parse_line(out_path, 0, text.trim_end()) {
                Ok(r) if r.weights == *w => end = next,
                _ => break,
            }
        }
        if shard_hash(&existing[pos..end]) != *hash {
            break;
        }
        pos = end;
        done += 1;
    }
    let out = OpenOptions::new()
        .create(true)
        .write(true)
        .truncate(false)
        .open(out_path)
        .map_err(CliError::io(out_path))?;
    out.set_len(pos as u64).map_err(CliError::io(out_path))?;
    let mut out = out;
    use std::io::Seek;
    out.seek(std::io::SeekFrom::End(0)).map_err(CliError::io(out_path))?;
    let mut file = File::create(journal_path).map_err(CliError::io(journal_path))?;
    for (w, hash) in &entries[..done] {
        let mut line: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        line.push(hash.clone());
        writeln!(file, "{}", line.join(" ")).map_err(CliError::io(journal_path))?;
    }
    file.flush().map_err(CliError::io(journal_path))?;
    Ok((
        done,
        out,
        Journal {
            path: journal_path.to_path_buf(),
            file,
        },
    ))
}
