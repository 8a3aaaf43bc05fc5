//! Lexicographically least representative of a degree matrix under
//! `η_j ↦ w_j δ + A(η_j)` (`A ∈ Aut Γ`, `δ ∈ Γ`) and permutations of equal-weight
//! columns.
//!
//! Rows are fixed one at a time: each row of `A` together with the matching entry of
//! `δ` produces a row of values, which the column permutation sorts inside the blocks
//! left tied by the earlier rows. Choices are explored in ascending order of that row
//! and the first completion with `A` invertible is the minimum.

use crate::abgroup::{generates, MixedRadix, TorsionGroup};
use crate::degmat::{DegreeMatrix, TorsionRow};
use crate::error::{Error, Result};

/// Cap on the number of partial transforms examined at a single row.
pub const DEFAULT_BRANCH_CAP: u128 = 20_000_000;

#[derive(Clone)]
struct State {
    a: Vec<Vec<u64>>,
    order: Vec<usize>,
    cuts: Vec<bool>,
    rows: Vec<Vec<u64>>,
}

struct Problem<'a> {
    q: &'a DegreeMatrix,
    moduli: Vec<u64>,
    cap: u128,
}

impl Problem<'_> {
    /// Candidate rows of `A` at row `l`: `a_{lk}` is a multiple of `μ_l / gcd(μ_l, μ_k)`.
    fn row_choices(&self, l: usize) -> Vec<Vec<u64>> {
        let ml = self.moduli[l];
        let steps: Vec<u64> = self.moduli.iter().map(|&mk| ml / num_integer::gcd(ml, mk)).collect();
        let counts: Vec<u64> = steps.iter().map(|&st| ml / st).collect();
        MixedRadix::new(counts)
            .map(|d| d.iter().zip(&steps).map(|(x, st)| x * st).collect())
            .collect()
    }

    fn prefix_surjective(&self, a: &[Vec<u64>]) -> bool {
        let l = a.len();
        let group = TorsionGroup::new(self.moduli[..l].to_vec()).expect("chain prefix");
        let cols: Vec<Vec<i64>> = (0..self.moduli.len())
            .map(|k| a.iter().map(|row| row[k] as i64).collect())
            .collect();
        generates(0, &group, &cols)
    }

    fn child(&self, st: &State, arow: &[u64], delta: u64) -> State {
        let l = st.a.len();
        let ml = self.moduli[l] as u128;
        let w = self.q.weights().as_slice();
        let rows = self.q.rows();
        let r: Vec<u64> = (0..w.len())
            .map(|j| {
                let mut acc = w[j] as u128 * delta as u128;
                for (k, row) in rows.iter().enumerate() {
                    acc += arow[k] as u128 * row.eta[j] as u128;
                }
                (acc % ml) as u64
            })
            .collect();
        let n1 = w.len();
        let mut order = st.order.clone();
        let mut start = 0;
        while start < n1 {
            let mut end = start + 1;
            while end < n1 && !st.cuts[end] {
                end += 1;
            }
            order[start..end].sort_by_key(|&j| r[j]);
            start = end;
        }
        let cuts: Vec<bool> = (0..n1)
            .map(|p| p == 0 || st.cuts[p] || r[order[p]] != r[order[p - 1]])
            .collect();
        let mut a = st.a.clone();
        a.push(arow.to_vec());
        let mut out_rows = st.rows.clone();
        out_rows.push(order.iter().map(|&j| r[j]).collect());
        State { a, order, cuts, rows: out_rows }
    }

    fn search(&self, states: Vec<State>) -> Result<Option<Vec<Vec<u64>>>> {
        let l = states[0].a.len();
        if l == self.moduli.len() {
            return Ok(Some(states[0].rows.clone()));
        }
        let choices = self.row_choices(l);
        let total = states.len() as u128 * choices.len() as u128 * self.moduli[l] as u128;
        if total > self.cap {
            return Err(Error::ResourceCap {
                what: "minimal representative branches",
                size: total,
                cap: self.cap,
                context: Some(self.q.to_string()),
            });
        }
        let mut children: Vec<State> = Vec::new();
        for st in &states {
            for arow in &choices {
                let mut a = st.a.clone();
                a.push(arow.clone());
                if !self.prefix_surjective(&a) {
                    continue;
                }
                for delta in 0..self.moduli[l] {
                    children.push(self.child(st, arow, delta));
                }
            }
        }
        children.sort_by(|x, y| x.rows[l].cmp(&y.rows[l]));
        let mut i = 0;
        while i < children.len() {
            let mut j = i + 1;
            while j < children.len() && children[j].rows[l] == children[i].rows[l] {
                j += 1;
            }
            if let Some(found) = self.search(children[i..j].to_vec())? {
                return Ok(Some(found));
            }
            i = j;
        }
        Ok(None)
    }
}

fn root(q: &DegreeMatrix) -> State {
    let w = q.weights().as_slice();
    State {
        a: Vec::new(),
        order: (0..w.len()).collect(),
        cuts: (0..w.len()).map(|p| p == 0 || w[p] != w[p - 1]).collect(),
        rows: Vec::new(),
    }
}

/// The least matrix equivalent to `q` in the row-major order of its torsion lifts.
pub fn minimal_representative_with_cap(q: &DegreeMatrix, cap: u128) -> Result<DegreeMatrix> {
    if q.rows().is_empty() {
        return Ok(q.clone());
    }
    let p = Problem { q, moduli: q.moduli(), cap };
    let rows = p
        .search(vec![root(q)])?
        .expect("the identity transform always completes");
    let rows = rows
        .into_iter()
        .zip(q.moduli())
        .map(|(eta, mu)| TorsionRow { mu, eta })
        .collect();
    DegreeMatrix::new(q.weights().clone(), rows)
}

pub fn minimal_representative(q: &DegreeMatrix) -> Result<DegreeMatrix> {
    minimal_representative_with_cap(q, DEFAULT_BRANCH_CAP)
}

pub fn is_minimal(q: &DegreeMatrix) -> Result<bool> {
    // rows must already be sorted inside equal-weight blocks
    let w = q.weights().as_slice();
    let mut tied: Vec<bool> = (0..w.len()).map(|p| p > 0 && w[p] == w[p - 1]).collect();
    for row in q.rows() {
        for p in 1..w.len() {
            if tied[p] {
                if row.eta[p] < row.eta[p - 1] {
                    return Ok(false);
                }
                tied[p] = row.eta[p] == row.eta[p - 1];
            }
        }
    }
    Ok(minimal_representative(q)? == *q)
}

/// Orbit minimum by applying every automorphism, shift and permutation; a test oracle.
pub fn minimal_representative_brute_force(q: &DegreeMatrix) -> Result<DegreeMatrix> {
    let group = q.group();
    let auts = crate::abgroup::automorphisms(&group, crate::abgroup::DEFAULT_AUT_CAP)?;
    let w = q.weights().as_slice();
    let n1 = w.len();
    let moduli = q.moduli();
    let perms = block_permutations(w);
    let mut best: Option<DegreeMatrix> = None;
    for aut in &auts {
        let images: Vec<Vec<u64>> = (0..n1).map(|j| aut.apply(&group, &q.eta(j))).collect();
        for delta in group.elements() {
            let cols: Vec<Vec<u64>> = (0..n1)
                .map(|j| {
                    images[j]
                        .iter()
                        .zip(&delta)
                        .zip(&moduli)
                        .map(|((&x, &d), &m)| ((x as u128 + w[j] as u128 * d as u128) % m as u128) as u64)
                        .collect()
                })
                .collect();
            for perm in &perms {
                let rows: Vec<TorsionRow> = moduli
                    .iter()
                    .enumerate()
                    .map(|(l, &mu)| TorsionRow { mu, eta: perm.iter().map(|&j| cols[j][l]).collect() })
                    .collect();
                let cand = DegreeMatrix::new(q.weights().clone(), rows)?;
                if best.as_ref().map_or(true, |b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
    }
    Ok(best.unwrap_or_else(|| q.clone()))
}

fn block_permutations(w: &[u64]) -> Vec<Vec<usize>> {
    fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == v.len() {
            out.push(v.clone());
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, out);
            v.swap(k, i);
        }
    }
    let mut result: Vec<Vec<usize>> = vec![Vec::new()];
    let mut start = 0;
    while start < w.len() {
        let mut end = start + 1;
        while end < w.len() && w[end] == w[start] {
            end += 1;
        }
        let mut perms = Vec::new();
        permute(&mut (start..end).collect(), 0, &mut perms);
        result = result
            .into_iter()
            .flat_map(|pre| {
                perms.iter().map(move |p| {
                    let mut x = pre.clone();
                    x.extend(p);
                    x
                })
            })
            .collect();
        start = end;
    }
    result
}
