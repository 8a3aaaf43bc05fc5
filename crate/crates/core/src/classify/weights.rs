//! Search for canonical (terminal) weight vectors.
//!
//! For `q = w / h` the age test of the cyclic group reads
//! `Σ_j ⌊k q_j⌋ ≤ k − 2` for `2 ≤ k ≤ h − 2` (terminal), and for canonical the sum
//! may also equal `k − 1` provided some `k q_j` is an integer. These conditions only
//! depend on the Farey cell of `q` at level `k`, so the simplex of normalized weights
//! is refined level by level into boxes of half-open Farey intervals; a box is dropped
//! as soon as its floor sum fails. Integer vectors with `h = k + 2` are read off the
//! boxes surviving level `k`. The minimal weight fraction of a one-point lattice
//! simplex is at least `1 / (s_{n+1} − 1)`, which makes the refinement finite.

use std::cmp::Ordering;

use num_integer::Integer;

use crate::degmat::{validate_weight_vector, DegreeMatrix, WeightVector};
use crate::exec::Execution;
use crate::singtest::{self, Mode};

use super::bounds::sylvester_u128;

/// Exact fraction with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Fr {
    n: i128,
    d: i128,
}

impl Fr {
    fn new(n: i128, d: i128) -> Self {
        let g = n.gcd(&d);
        let g = if g == 0 { 1 } else { g };
        Fr { n: n / g, d: d / g }
    }

    fn add(self, o: Fr) -> Fr {
        Fr::new(self.n * o.d + o.n * self.d, self.d * o.d)
    }

    /// `⌊k·self⌋`
    fn floor_mul(self, k: i128) -> i128 {
        (self.n * k).div_euclid(self.d)
    }

    fn times_is_integer(self, k: i128) -> bool {
        (self.n * k) % self.d == 0
    }
}

impl PartialOrd for Fr {
    fn partial_cmp(&self, o: &Fr) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Fr {
    fn cmp(&self, o: &Fr) -> Ordering {
        (self.n * o.d).cmp(&(o.n * self.d))
    }
}

/// Coordinate range: the point `lo` when pinned, else `lo ≤ q < hi` (or `lo < q < hi`).
#[derive(Clone, Copy, Debug)]
struct Iv {
    lo: Fr,
    hi: Fr,
    lo_open: bool,
    pinned: bool,
}

impl Iv {
    fn hi_open(&self) -> bool {
        !self.pinned
    }
}

type Cell = Vec<Iv>;

/// A bound endpoint with closedness.
#[derive(Clone, Copy)]
struct End {
    v: Fr,
    closed: bool,
}

fn max_end(a: End, b: End) -> End {
    match a.v.cmp(&b.v) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => End {
            v: a.v,
            closed: a.closed && b.closed,
        },
    }
}

fn min_end(a: End, b: End) -> End {
    match a.v.cmp(&b.v) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => End {
            v: a.v,
            closed: a.closed && b.closed,
        },
    }
}

struct Search {
    n1: usize,
    mode: Mode,
    floor: Fr,
}

impl Search {
    /// Necessary conditions for a sorted point with coordinate sum one and
    /// `q_0 ≥ 1/(s_{n+1}−1)` inside the cell.
    fn feasible(&self, cell: &Cell) -> bool {
        let n1 = self.n1;
        let mut lo: Vec<End> = Vec::with_capacity(n1);
        let mut prev = End {
            v: self.floor,
            closed: true,
        };
        for iv in cell {
            let e = max_end(
                End {
                    v: iv.lo,
                    closed: !iv.lo_open,
                },
                prev,
            );
            lo.push(e);
            prev = e;
        }
        let mut hi: Vec<End> = vec![
            End {
                v: Fr::new(1, 1),
                closed: true
            };
            n1
        ];
        let mut next = End {
            v: Fr::new(1, 1),
            closed: true,
        };
        for j in (0..n1).rev() {
            let iv = &cell[j];
            let own = if iv.pinned {
                End { v: iv.lo, closed: true }
            } else {
                End {
                    v: iv.hi,
                    closed: !iv.hi_open(),
                }
            };
            let e = min_end(own, next);
            hi[j] = e;
            next = e;
        }
        for j in 0..n1 {
            match lo[j].v.cmp(&hi[j].v) {
                Ordering::Greater => return false,
                Ordering::Equal if !(lo[j].closed && hi[j].closed) => return false,
                _ => {}
            }
        }
        let one = Fr::new(1, 1);
        let mut slo = Fr::new(0, 1);
        let mut shi = Fr::new(0, 1);
        for j in 0..n1 {
            slo = slo.add(lo[j].v);
            shi = shi.add(hi[j].v);
        }
        let lo_ok = match slo.cmp(&one) {
            Ordering::Less => true,
            Ordering::Equal => lo.iter().all(|e| e.closed),
            Ordering::Greater => false,
        };
        let hi_ok = match shi.cmp(&one) {
            Ordering::Greater => true,
            Ordering::Equal => hi.iter().all(|e| e.closed),
            Ordering::Less => false,
        };
        lo_ok && hi_ok
    }

    /// Cuts `i/k` strictly inside a free coordinate range.
    fn cuts(iv: &Iv, k: i128) -> Vec<Fr> {
        let mut cuts = Vec::new();
        if iv.pinned {
            return cuts;
        }
        let mut i = iv.lo.floor_mul(k) + 1;
        while Fr::new(i, k) < iv.hi {
            cuts.push(Fr::new(i, k));
            i += 1;
        }
        cuts
    }

    /// Splits coordinate `j` of `cell` at the given cuts.
    fn split_at(cell: &Cell, j: usize, cuts: &[Fr]) -> Vec<Cell> {
        let iv = cell[j];
        let mut out = Vec::with_capacity(cuts.len() + 1);
        let mut lo = iv.lo;
        let mut lo_open = iv.lo_open;
        for &c in cuts.iter().chain(std::iter::once(&iv.hi)) {
            let mut child = cell.clone();
            child[j] = Iv {
                lo,
                hi: c,
                lo_open,
                pinned: false,
            };
            out.push(child);
            lo = c;
            lo_open = false;
        }
        out
    }

    /// Largest `⌊k q⌋` over the range.
    fn floor_hi(iv: &Iv, k: i128) -> i128 {
        if iv.pinned {
            iv.lo.floor_mul(k)
        } else if iv.hi.times_is_integer(k) {
            iv.hi.floor_mul(k) - 1
        } else {
            iv.hi.floor_mul(k)
        }
    }

    /// Pieces of `cell` whose points all pass the test at level `k`. A cell is only
    /// split while the level-`k` floor sum is undecided on it, one coordinate at a time.
    fn refine(&self, cell: &Cell, k: i128) -> Vec<Cell> {
        let mut out = Vec::new();
        let mut stack = vec![cell.clone()];
        while let Some(c) = stack.pop() {
            if !self.feasible(&c) {
                continue;
            }
            let s_lo: i128 = c.iter().map(|iv| iv.lo.floor_mul(k)).sum();
            let s_hi: i128 = c.iter().map(|iv| Self::floor_hi(iv, k)).sum();
            // the test at h − k bounds the sum from below for every h ≥ k + 2
            let floor_sum_min = k + 2 - self.n1 as i128;
            if s_hi < floor_sum_min {
                continue;
            }
            if s_hi <= k - 2 && s_lo >= floor_sum_min {
                out.push(c);
                continue;
            }
            if s_lo > k - 1 || (s_lo > k - 2 && self.mode == Mode::Terminal) {
                continue;
            }
            // undecided: split the coordinate with the most cuts
            let best = (0..self.n1)
                .map(|j| (Self::cuts(&c[j], k), j))
                .max_by_key(|(cuts, j)| (cuts.len(), std::cmp::Reverse(*j)));
            if let Some((cuts, j)) = best {
                if !cuts.is_empty() {
                    stack.extend(Self::split_at(&c, j, &cuts));
                    continue;
                }
            }
            // floors are constant on the cell and sum to k − 1 (canonical only)
            if c.iter().any(|iv| iv.pinned && iv.lo.times_is_integer(k)) {
                out.push(c);
                continue;
            }
            // disjoint faces: pin coordinate j, keep earlier candidates off their endpoint
            let mut base = c.clone();
            for j in 0..self.n1 {
                let iv = c[j];
                if iv.pinned || iv.lo_open || !iv.lo.times_is_integer(k) {
                    continue;
                }
                let mut face = base.clone();
                face[j].pinned = true;
                face[j].hi = face[j].lo;
                if self.feasible(&face) {
                    out.push(face);
                }
                base[j].lo_open = true;
            }
        }
        out
    }

    /// Refines `cell` at level `k`, handing on the surviving pieces and collecting the
    /// integer vectors of sum `k + 2` inside them.
    fn step(&self, cell: &Cell, k: i128, pts: &mut Vec<Vec<u64>>, mut emit: impl FnMut(Cell)) {
        for child in self.refine(cell, k) {
            self.points(&child, k + 2, pts);
            emit(child);
        }
    }

    /// Sorted integer vectors of sum `h` with `w / h` in the cell.
    fn points(&self, cell: &Cell, h: i128, out: &mut Vec<Vec<u64>>) {
        let mut ranges = Vec::with_capacity(self.n1);
        for iv in cell {
            let (a, b) = if iv.pinned {
                if !iv.lo.times_is_integer(h) {
                    return;
                }
                let v = iv.lo.n * h / iv.lo.d;
                (v, v)
            } else {
                let mut a = (iv.lo.n * h).div_euclid(iv.lo.d);
                if a * iv.lo.d < iv.lo.n * h || (iv.lo_open && a * iv.lo.d == iv.lo.n * h) {
                    a += 1;
                }
                // largest v with v/h < hi
                let b = (iv.hi.n * h - 1).div_euclid(iv.hi.d);
                (a.max(1), b)
            };
            if a > b {
                return;
            }
            ranges.push((a, b));
        }
        let mut cur = vec![0i128; self.n1];
        fn rec(j: usize, rem: i128, ranges: &[(i128, i128)], cur: &mut Vec<i128>, out: &mut Vec<Vec<u64>>) {
            let n1 = ranges.len();
            if j == n1 {
                if rem == 0 {
                    out.push(cur.iter().map(|&x| x as u64).collect());
                }
                return;
            }
            let lo = if j > 0 { ranges[j].0.max(cur[j - 1]) } else { ranges[j].0 };
            let left = (n1 - j) as i128;
            let mut v = lo;
            while v <= ranges[j].1 && v * left <= rem {
                cur[j] = v;
                rec(j + 1, rem - v, ranges, cur, out);
                v += 1;
            }
        }
        rec(0, h, &ranges, &mut cur, out);
    }
}

/// Cell count at which the breadth-first phase hands over to independent subtrees.
const SPLIT_CELLS: usize = 4096;

/// Statistics of a weight search.
#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    /// Deepest level reached.
    pub levels: u64,
    /// Cells refined over all levels.
    pub cells: u64,
    /// Integer vectors read off the cells before the final age test.
    pub candidates: u64,
}

fn accept(w: &[u64], mode: Mode) -> bool {
    if !validate_weight_vector(w) {
        return false;
    }
    let q = DegreeMatrix::torsion_free(WeightVector::new(w.to_vec()).expect("sorted positive"));
    singtest::passes(&q, mode)
}

/// Small sums `h < 4` by direct listing.
fn small_sums(n1: usize, mode: Mode, out: &mut Vec<Vec<u64>>) {
    for h in n1 as u64..4 {
        let mut cur = vec![1u64; n1];
        // sorted compositions of h into n1 positive parts
        fn rec(j: usize, rem: u64, cur: &mut Vec<u64>, n1: usize, mode: Mode, out: &mut Vec<Vec<u64>>) {
            if j == n1 {
                if rem == 0 && accept(cur, mode) {
                    out.push(cur.clone());
                }
                return;
            }
            let lo = if j > 0 { cur[j - 1] } else { 1 };
            let mut v = lo;
            while v * (n1 - j) as u64 <= rem {
                cur[j] = v;
                rec(j + 1, rem - v, cur, n1, mode, out);
                v += 1;
            }
        }
        rec(0, h, &mut cur, n1, mode, out);
    }
}

/// All sorted, almost free weight vectors of length `n + 1` whose weighted
/// projective space is canonical (terminal), in ascending order.
pub fn enumerate_weight_vectors(n: usize, mode: Mode, exec: Execution) -> (Vec<WeightVector>, SearchStats) {
    assert!(n >= 1, "dimension must be positive");
    let n1 = n + 1;
    let s = sylvester_u128(n + 1).expect("dimension too large for the weight search");
    let search = Search {
        n1,
        mode,
        floor: Fr::new(1, (s - 1) as i128),
    };
    let mut found: Vec<Vec<u64>> = Vec::new();
    small_sums(n1, mode, &mut found);
    let mut stats = SearchStats::default();
    let start = Iv {
        lo: Fr::new(0, 1),
        hi: Fr::new(1, 1),
        lo_open: false,
        pinned: false,
    };
    // breadth-first until there is enough independent work, then every cell's
    // subtree is searched on its own
    let mut cells: Vec<Cell> = vec![vec![start; n1]];
    let mut k: i128 = 2;
    while !cells.is_empty() && cells.len() < SPLIT_CELLS {
        let mut next = Vec::new();
        let mut pts = Vec::new();
        for c in &cells {
            search.step(c, k, &mut pts, |child| next.push(child));
        }
        stats.cells += cells.len() as u64;
        stats.levels = k as u64;
        found.extend(pts);
        cells = next;
        k += 1;
    }
    let results = exec.map(chunk(cells, 8), |batch| {
        let mut pts = Vec::new();
        let mut visited = 0u64;
        let mut deepest = 0i128;
        let mut stack: Vec<(Cell, i128)> = batch.into_iter().map(|c| (c, k)).collect();
        while let Some((c, level)) = stack.pop() {
            visited += 1;
            deepest = deepest.max(level);
            search.step(&c, level, &mut pts, |child| stack.push((child, level + 1)));
        }
        let raw = pts.len() as u64;
        pts.retain(|w| accept(w, mode));
        (pts, visited, deepest, raw)
    });
    stats.candidates = found.len() as u64;
    found.retain(|w| accept(w, mode));
    for (pts, visited, deepest, raw) in results {
        stats.candidates += raw;
        stats.cells += visited;
        stats.levels = stats.levels.max(deepest as u64);
        found.extend(pts);
    }
    found.sort();
    found.dedup();
    let out = found
        .into_iter()
        .map(|w| WeightVector::new(w).expect("sorted positive"))
        .collect();
    (out, stats)
}

fn chunk<T>(v: Vec<T>, size: usize) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(v.len() / size + 1);
    let mut cur = Vec::with_capacity(size);
    for x in v {
        cur.push(x);
        if cur.len() == size {
            out.push(std::mem::replace(&mut cur, Vec::with_capacity(size)));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Exhaustive scan of all sorted vectors with sum at most `max_sum`; an oracle for
/// small dimensions.
pub fn brute_force_weight_vectors(n: usize, mode: Mode, max_sum: u64) -> Vec<WeightVector> {
    let n1 = n + 1;
    let mut out = Vec::new();
    let mut cur = vec![0u64; n1];
    fn rec(j: usize, rem: u64, cur: &mut Vec<u64>, n1: usize, mode: Mode, out: &mut Vec<Vec<u64>>) {
        if j == n1 - 1 {
            if rem >= cur[j - 1] {
                cur[j] = rem;
                if accept(cur, mode) {
                    out.push(cur.clone());
                }
            }
            return;
        }
        let lo = if j > 0 { cur[j - 1] } else { 1 };
        let mut v = lo;
        while v * (n1 - j) as u64 <= rem {
            cur[j] = v;
            rec(j + 1, rem - v, cur, n1, mode, out);
            v += 1;
        }
    }
    for h in n1 as u64..=max_sum {
        rec(0, h, &mut cur, n1, mode, &mut out);
    }
    out.sort();
    out.into_iter().map(|w| WeightVector::new(w).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(n: usize, mode: Mode) -> Vec<Vec<u64>> {
        enumerate_weight_vectors(n, mode, Execution::Sequential)
            .0
            .into_iter()
            .map(|w| w.as_slice().to_vec())
            .collect()
    }

    #[test]
    fn dimension_one() {
        assert_eq!(ws(1, Mode::Canonical), vec![vec![1, 1]]);
        assert_eq!(ws(1, Mode::Terminal), vec![vec![1, 1]]);
    }

    #[test]
    fn dimension_two() {
        assert_eq!(ws(2, Mode::Canonical), vec![vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 3]]);
        assert_eq!(ws(2, Mode::Terminal), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn dimension_two_matches_brute_force_to_the_sum_cap() {
        // (s_3 − 1)^2 = 36
        for mode in [Mode::Canonical, Mode::Terminal] {
            let brute: Vec<Vec<u64>> = brute_force_weight_vectors(2, mode, 36)
                .into_iter()
                .map(|w| w.as_slice().to_vec())
                .collect();
            assert_eq!(ws(2, mode), brute);
        }
    }

    #[test]
    fn dimension_three_matches_brute_force() {
        // every canonical weight sum in dimension three is below 50
        for mode in [Mode::Canonical, Mode::Terminal] {
            let brute: Vec<Vec<u64>> = brute_force_weight_vectors(3, mode, 80)
                .into_iter()
                .map(|w| w.as_slice().to_vec())
                .collect();
            let found = ws(3, mode);
            assert_eq!(found, brute);
        }
        assert_eq!(ws(3, Mode::Canonical).len(), 104);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = enumerate_weight_vectors(3, Mode::Canonical, Execution::Sequential).0;
        let b = enumerate_weight_vectors(3, Mode::Canonical, Execution::Parallel).0;
        assert_eq!(a, b);
    }
}
