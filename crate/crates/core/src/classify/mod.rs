//! Classification of canonical (terminal) fake weighted projective spaces by their
//! minimal degree matrices.
//!
//! Work is sharded by weight vector. Within a shard, matrices with `s` torsion rows
//! are built from minimal matrices with `s − 1` rows by appending a row-minimal row
//! whose modulus divides the previous one, keeping the candidate only if it is almost
//! free, passes the age test and is minimal in its orbit.

pub mod bounds;
pub mod minimal;
pub mod torsion;
pub mod weights;

use std::collections::BTreeSet;

use crate::degmat::{DegreeMatrix, WeightVector};
use crate::error::Result;
use crate::exec::Execution;
use crate::singtest::{self, Mode, SingularityClass};

pub use bounds::{sylvester, Bounds};
pub use minimal::{is_minimal, minimal_representative};
pub use torsion::{eta_normal_form, is_row_minimal, minimal_torsion_rows};
pub use weights::{enumerate_weight_vectors, SearchStats};

/// Largest dimension the weight search is run for.
pub const MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationRecord {
    pub matrix: DegreeMatrix,
    pub class: SingularityClass,
}

impl ClassificationRecord {
    /// Number of torsion rows.
    pub fn depth(&self) -> usize {
        self.matrix.rows().len()
    }
}

/// All records over a single weight vector, sorted.
#[derive(Clone, Debug)]
pub struct Shard {
    pub weights: WeightVector,
    pub records: Vec<ClassificationRecord>,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub exec: Execution,
    /// Shards handed to the executor at once; results are emitted per batch.
    pub batch: usize,
    /// Branch cap for the minimal-representative search.
    pub branch_cap: u128,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            exec: Execution::default(),
            batch: 64,
            branch_cap: minimal::DEFAULT_BRANCH_CAP,
        }
    }
}

/// Every minimal canonical (terminal) degree matrix over `w`.
pub fn classify_weight_vector(w: &WeightVector, mode: Mode, branch_cap: u128) -> Result<Shard> {
    let mut found: Vec<DegreeMatrix> = Vec::new();
    let base = DegreeMatrix::torsion_free(w.clone());
    if !base.is_almost_free() || !singtest::passes(&base, mode) {
        return Ok(Shard { weights: w.clone(), records: Vec::new() });
    }
    let cap = Bounds::torsion_order_cap(w);
    let rows = minimal_torsion_rows(w, mode, cap.min(u64::MAX as u128) as u64);
    found.push(base.clone());
    let mut frontier = vec![base];
    while !frontier.is_empty() {
        let mut next: BTreeSet<DegreeMatrix> = BTreeSet::new();
        for prefix in &frontier {
            let last = prefix.rows().last().map(|r| r.mu);
            let order = prefix.torsion_order();
            for row in &rows {
                if last.is_some_and(|m| m % row.mu != 0) || order * row.mu as u128 > cap {
                    continue;
                }
                let q = prefix.with_row(row.clone())?;
                if !q.is_almost_free() || !singtest::passes(&q, mode) {
                    continue;
                }
                let min = minimal::minimal_representative_with_cap(&q, branch_cap)
                    .map_err(|e| e.with_context(q.to_string()))?;
                if min == q {
                    next.insert(q);
                }
            }
        }
        found.extend(next.iter().cloned());
        frontier = next.into_iter().collect();
    }
    found.sort();
    let records = found
        .into_iter()
        .map(|matrix| {
            let class = singtest::classify(&matrix).expect("almost free by construction");
            ClassificationRecord { matrix, class }
        })
        .collect();
    Ok(Shard { weights: w.clone(), records })
}

/// Classifies the given weight vectors, handing finished shards to `sink` in input
/// order. Shards inside a batch run through `options.exec`.
pub fn classify_weights_with<F, E>(
    weights: Vec<WeightVector>,
    mode: Mode,
    options: &Options,
    mut sink: F,
) -> std::result::Result<(), E>
where
    F: FnMut(Shard) -> std::result::Result<(), E>,
    E: From<crate::Error>,
{
    let cap = options.branch_cap;
    let batch = options.batch.max(1);
    let mut iter = weights.into_iter().peekable();
    while iter.peek().is_some() {
        let chunk: Vec<WeightVector> = iter.by_ref().take(batch).collect();
        let shards = options
            .exec
            .map(chunk, |w| classify_weight_vector(&w, mode, cap));
        for s in shards {
            sink(s?)?;
        }
    }
    Ok(())
}

/// The full classification in dimension `n`, sorted.
pub fn classify_all(n: usize, mode: Mode, options: &Options) -> Result<Vec<ClassificationRecord>> {
    if n > MAX_DIM {
        return Err(crate::Error::DimensionCap(n, MAX_DIM));
    }
    let (weights, _) = enumerate_weight_vectors(n, mode, options.exec);
    let mut out = Vec::new();
    classify_weights_with(weights, mode, options, |s| {
        out.extend(s.records);
        Ok::<(), crate::Error>(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(exec: Execution) -> Options {
        Options { exec, ..Options::default() }
    }

    #[test]
    fn surfaces() {
        let recs = classify_all(2, Mode::Canonical, &opts(Execution::Sequential)).unwrap();
        let shown: Vec<String> = recs.iter().map(|r| r.matrix.to_string()).collect();
        assert_eq!(
            shown,
            vec![
                "(1,1,1)",
                "(1,1,1) mod 3:(0,1,2)",
                "(1,1,2)",
                "(1,1,2) mod 2:(0,1,1)",
                "(1,2,3)",
            ]
        );
        let terminal = classify_all(2, Mode::Terminal, &opts(Execution::Sequential)).unwrap();
        assert_eq!(terminal.len(), 1);
    }

    #[test]
    fn records_are_canonical_and_minimal() {
        for r in classify_all(2, Mode::Canonical, &opts(Execution::Parallel)).unwrap() {
            assert!(r.class.is_canonical());
            assert!(is_minimal(&r.matrix).unwrap());
            assert!(r.matrix.is_almost_free());
        }
    }
}
