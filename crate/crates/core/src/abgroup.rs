//! Integer matrices, Smith and Hermite normal forms, and finite abelian groups
//! given by invariant factors.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "{:?}", rows)
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r.iter().map(|&x| x.into()));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        IntMatrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rows as `i64`, or `None` if some entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMatrix {
        let rows = (0..self.rows)
            .map(|i| idx.iter().map(|&j| self.get(i, j).clone()).collect())
            .collect();
        let mut m = Self::from_big_rows(rows);
        if self.rows == 0 {
            m.cols = idx.len();
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn rank(&self) -> usize {
        let (h, _) = hermite_rows(self);
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j] * q;
            self.data[dst * self.cols + j] -= s;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src] * q;
            self.data[i * self.cols + dst] -= s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -x;
        }
    }
}

/// Result of [`smith_decomposition`]: `u * m * v == d`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

fn min_abs_nonzero(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smith normal form with unimodular transforms: `U·M·V = D`, `d_i | d_{i+1}`,
/// diagonal entries non-negative.
pub fn smith_decomposition(m: &IntMatrix) -> Smith {
    let (r, c) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    for t in 0..r.min(c) {
        let Some((pi, pj)) = min_abs_nonzero(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let p = d.get(t, t).clone();
            for i in t + 1..r {
                if !d.get(i, t).is_zero() {
                    let q = d.get(i, t).div_floor(&p);
                    d.row_sub(i, t, &q);
                    u.row_sub(i, t, &q);
                }
            }
            for j in t + 1..c {
                if !d.get(t, j).is_zero() {
                    let q = d.get(t, j).div_floor(&p);
                    d.col_sub(j, t, &q);
                    v.col_sub(j, t, &q);
                }
            }
            let col_left = (t + 1..r).find(|&i| !d.get(i, t).is_zero());
            let row_left = (t + 1..c).find(|&j| !d.get(t, j).is_zero());
            if col_left.is_some() || row_left.is_some() {
                // move the smallest remainder into the pivot and repeat
                let mut best = (t, t);
                for i in t + 1..r {
                    let x = d.get(i, t);
                    if !x.is_zero() && x.abs() < d.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..c {
                    let x = d.get(t, j);
                    if !x.is_zero() && x.abs() < d.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                d.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
                d.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
                continue;
            }
            let p = d.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d.get(i, j).is_multiple_of(&p)));
            if let Some(i) = bad {
                let minus_one = -BigInt::one();
                d.row_sub(t, i, &minus_one);
                u.row_sub(t, i, &minus_one);
                continue;
            }
            break;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { u, d, v }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U·A = H`, `U` unimodular,
/// pivots positive, entries above each pivot reduced into `[0, pivot)`, zero rows last.
pub fn hermite_rows(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (r, c) = (a.rows, a.cols);
    let mut h = a.clone();
    let mut u = IntMatrix::identity(r);
    let mut pr = 0;
    for j in 0..c {
        if pr == r {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in pr..r {
                let x = h.get(i, j);
                if !x.is_zero() && best.map_or(true, |b| x.abs() < h.get(b, j).abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(pr, b);
            u.swap_rows(pr, b);
            let p = h.get(pr, j).clone();
            let mut clean = true;
            for i in pr + 1..r {
                if !h.get(i, j).is_zero() {
                    let q = h.get(i, j).div_floor(&p);
                    h.row_sub(i, pr, &q);
                    u.row_sub(i, pr, &q);
                    clean &= h.get(i, j).is_zero();
                }
            }
            if clean {
                break;
            }
        }
        if h.get(pr, j).is_zero() {
            continue;
        }
        if h.get(pr, j).is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        let p = h.get(pr, j).clone();
        for i in 0..pr {
            let q = h.get(i, j).div_floor(&p);
            h.row_sub(i, pr, &q);
            u.row_sub(i, pr, &q);
        }
        pr += 1;
    }
    (h, u)
}

/// Finite abelian group `Z/μ_1 × … × Z/μ_s` with `μ_{ℓ+1} | μ_ℓ` and all `μ_ℓ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TorsionGroup {
    moduli: Vec<u64>,
}

impl TorsionGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.iter().any(|&m| m < 2) {
            return Err(Error::Invalid(format!("invariant factors must be >= 2: {moduli:?}")));
        }
        if moduli.windows(2).any(|p| p[0] % p[1] != 0) {
            return Err(Error::Invalid(format!("invariant factors must form a divisibility chain: {moduli:?}")));
        }
        Ok(TorsionGroup { moduli })
    }

    pub fn trivial() -> Self {
        TorsionGroup { moduli: Vec::new() }
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> u128 {
        self.moduli.iter().map(|&m| m as u128).product()
    }

    /// Canonical lift of an arbitrary integer tuple.
    pub fn element(&self, lift: &[i64]) -> TorsionElement {
        assert_eq!(lift.len(), self.moduli.len());
        TorsionElement {
            lift: lift
                .iter()
                .zip(&self.moduli)
                .map(|(&x, &m)| x.rem_euclid(m as i64) as u64)
                .collect(),
        }
    }

    /// All elements in mixed-radix order, first coordinate slowest.
    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        MixedRadix::new(self.moduli.clone())
    }
}

/// An element of a [`TorsionGroup`] stored by its canonical lift.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionElement {
    pub lift: Vec<u64>,
}

/// Odometer over `[0, r_0) × … × [0, r_k)`, last coordinate fastest.
pub struct MixedRadix {
    radix: Vec<u64>,
    cur: Option<Vec<u64>>,
}

impl MixedRadix {
    pub fn new(radix: Vec<u64>) -> Self {
        let cur = if radix.iter().any(|&r| r == 0) {
            None
        } else {
            Some(vec![0; radix.len()])
        };
        MixedRadix { radix, cur }
    }
}

impl Iterator for MixedRadix {
    type Item = Vec<u64>;
    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().unwrap();
        let mut k = cur.len();
        loop {
            if k == 0 {
                self.cur = None;
                break;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < self.radix[k] {
                break;
            }
            cur[k] = 0;
        }
        Some(out)
    }
}

/// Invariant-factor decomposition `Z^rows / im(M) ≅ Z^k × Γ` together with the
/// projection `Z^rows → Z^k × Γ` (free rows first, then torsion rows reduced).
#[derive(Clone, Debug)]
pub struct Cokernel {
    pub free_rank: usize,
    pub torsion: TorsionGroup,
    pub projection: IntMatrix,
}

pub fn cokernel(m: &IntMatrix) -> Cokernel {
    let smith = smith_decomposition(m);
    let diag = smith.diagonal();
    let rank = smith.rank();
    let r = m.rows;
    let mut free_rows = Vec::new();
    for i in rank..r {
        free_rows.push(smith.u.row(i).to_vec());
    }
    let mut tors: Vec<(u64, Vec<BigInt>)> = Vec::new();
    for (i, di) in diag.iter().enumerate().take(rank) {
        if di.is_one() {
            continue;
        }
        let mu = di.to_u64().expect("torsion factor exceeds 64 bits");
        let row = smith
            .u
            .row(i)
            .iter()
            .map(|x| x.mod_floor(di))
            .collect();
        tors.push((mu, row));
    }
    tors.reverse();
    let torsion = TorsionGroup::new(tors.iter().map(|t| t.0).collect())
        .expect("Smith form yields a divisibility chain");
    let mut rows = free_rows;
    rows.extend(tors.into_iter().map(|t| t.1));
    let mut projection = IntMatrix::from_big_rows(rows);
    if projection.rows == 0 {
        projection.cols = r;
    }
    Cokernel {
        free_rank: r - rank,
        torsion,
        projection,
    }
}

/// True iff the given columns generate `Z^free × Γ`. Each column lists the free
/// coordinates first, then the torsion coordinates (any integer lift).
pub fn generates(free: usize, group: &TorsionGroup, columns: &[Vec<i64>]) -> bool {
    let moduli = group.moduli();
    let nrows = free + moduli.len();
    let modulus = |r: usize| -> Option<i64> { (r >= free).then(|| moduli[r - free] as i64) };
    let mut cols: Vec<Vec<i64>> = columns
        .iter()
        .map(|c| {
            assert_eq!(c.len(), nrows);
            c.iter()
                .enumerate()
                .map(|(r, &x)| modulus(r).map_or(x, |m| x.rem_euclid(m)))
                .collect()
        })
        .collect();
    for r in 0..nrows {
        let m = modulus(r);
        // Euclid on row r among active columns
        loop {
            let mut piv: Option<usize> = None;
            for (k, c) in cols.iter().enumerate() {
                if c[r] != 0 && piv.map_or(true, |p| c[r].abs() < cols[p][r].abs()) {
                    piv = Some(k);
                }
            }
            let Some(p) = piv else { return false };
            let pcol = cols[p].clone();
            let mut clean = true;
            for (k, c) in cols.iter_mut().enumerate() {
                if k == p || c[r] == 0 {
                    continue;
                }
                let q = c[r].div_euclid(pcol[r]);
                for rr in 0..nrows {
                    let v = c[rr] as i128 - q as i128 * pcol[rr] as i128;
                    c[rr] = match modulus(rr) {
                        Some(mm) => v.rem_euclid(mm as i128) as i64,
                        None => i64::try_from(v).expect("generation check overflow"),
                    };
                }
                clean &= c[r] == 0;
            }
            if clean {
                let g = cols[p][r].abs();
                let ok = match m {
                    None => g == 1,
                    Some(mm) => g.gcd(&mm) == 1,
                };
                if !ok {
                    return false;
                }
                cols.swap_remove(p);
                break;
            }
        }
    }
    true
}

/// Integer basis (as the rows of an `n × (n+1)` matrix in row Hermite form) of the
/// kernel of `Z^{n+1} → Z × Γ`, `e_j ↦ (w_j, η_j)`.
pub fn lattice_kernel_basis(group: &TorsionGroup, columns: &[(i64, TorsionElement)]) -> Result<IntMatrix> {
    let moduli = group.moduli();
    let s = moduli.len();
    let ncols = columns.len();
    if ncols < 2 {
        return Err(Error::Invalid("need at least two columns".into()));
    }
    let as_int: Vec<Vec<i64>> = columns
        .iter()
        .map(|(w, e)| {
            assert_eq!(e.lift.len(), s);
            let mut c = vec![*w];
            c.extend(e.lift.iter().map(|&x| x as i64));
            c
        })
        .collect();
    for j in 0..ncols {
        let rest: Vec<Vec<i64>> = (0..ncols).filter(|&k| k != j).map(|k| as_int[k].clone()).collect();
        if !generates(1, group, &rest) {
            return Err(Error::NotAlmostFree);
        }
    }
    // [w 0; η diag(μ)] of shape (1+s) × (ncols+s)
    let mut m = IntMatrix::zeros(1 + s, ncols + s);
    for (j, c) in as_int.iter().enumerate() {
        for (r, &x) in c.iter().enumerate() {
            m.set(r, j, BigInt::from(x));
        }
    }
    for (l, &mu) in moduli.iter().enumerate() {
        m.set(1 + l, ncols + l, BigInt::from(mu));
    }
    let smith = smith_decomposition(&m);
    let rank = smith.rank();
    let kernel: Vec<Vec<BigInt>> = (rank..ncols + s)
        .map(|k| (0..ncols).map(|i| smith.v.get(i, k).clone()).collect())
        .collect();
    let (h, _) = hermite_rows(&IntMatrix::from_big_rows(kernel));
    Ok(h)
}

/// An automorphism of Γ acting on canonical lifts by `γ ↦ (Σ_ℓ a_kℓ γ_ℓ mod μ_k)_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupAut {
    pub matrix: Vec<Vec<u64>>,
}

impl GroupAut {
    pub fn apply(&self, group: &TorsionGroup, g: &[u64]) -> Vec<u64> {
        let mu = group.moduli();
        (0..mu.len())
            .map(|k| {
                let s: u128 = self.matrix[k].iter().zip(g).map(|(&a, &x)| a as u128 * x as u128).sum();
                (s % mu[k] as u128) as u64
            })
            .collect()
    }
}

pub const DEFAULT_AUT_CAP: u128 = 1_000_000;

/// Entry `a_kℓ` of a homomorphism matrix is a multiple of `μ_k / gcd(μ_k, μ_ℓ)`.
pub fn hom_entry_step(mu: &[u64], k: usize, l: usize) -> (u64, u64) {
    let g = mu[k].gcd(&mu[l]);
    (mu[k] / g, g)
}

/// Every automorphism of Γ exactly once, identity first.
pub fn automorphisms(group: &TorsionGroup, cap: u128) -> Result<Vec<GroupAut>> {
    if group.order() > cap {
        return Err(Error::ResourceCap {
            what: "torsion group order",
            size: group.order(),
            cap,
            context: None,
        });
    }
    let mu = group.moduli();
    let s = mu.len();
    let mut radix = Vec::with_capacity(s * s);
    let mut step = Vec::with_capacity(s * s);
    for k in 0..s {
        for l in 0..s {
            let (st, g) = hom_entry_step(mu, k, l);
            radix.push(g);
            step.push(st);
        }
    }
    let homs: u128 = radix.iter().map(|&r| r as u128).product();
    if homs > cap {
        return Err(Error::ResourceCap {
            what: "homomorphism search space",
            size: homs,
            cap,
            context: None,
        });
    }
    let mut out = Vec::new();
    for digits in MixedRadix::new(radix) {
        let matrix: Vec<Vec<u64>> = (0..s)
            .map(|k| (0..s).map(|l| digits[k * s + l] * step[k * s + l]).collect())
            .collect();
        let images: Vec<Vec<i64>> = (0..s)
            .map(|l| (0..s).map(|k| matrix[k][l] as i64).collect())
            .collect();
        if generates(0, group, &images) {
            out.push(GroupAut { matrix });
        }
    }
    let id = GroupAut {
        matrix: (0..s).map(|k| (0..s).map(|l| u64::from(k == l)).collect()).collect(),
    };
    if let Some(p) = out.iter().position(|a| *a == id) {
        out.swap(0, p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn check_smith(a: &IntMatrix) {
        let s = smith_decomposition(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.u.det().abs().is_one());
        assert!(s.v.det().abs().is_one());
        let d = s.diagonal();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        for p in d.windows(2) {
            assert!(!p[0].is_negative());
            if p[0].is_zero() {
                assert!(p[1].is_zero());
            } else {
                assert!(p[1].is_multiple_of(&p[0]));
            }
        }
    }

    #[test]
    fn smith_identity() {
        let s = smith_decomposition(&IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
    }

    #[test]
    fn smith_diag_2_3() {
        let s = smith_decomposition(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.d, m(&[vec![1, 0], vec![0, 6]]));
        check_smith(&m(&[vec![2, 0], vec![0, 3]]));
    }

    #[test]
    fn smith_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let r = rng.gen_range(1..5);
            let c = rng.gen_range(1..6);
            let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..10)).collect()).collect();
            check_smith(&m(&rows));
        }
    }

    #[test]
    fn cokernel_of_example_generator_matrix() {
        let p = m(&[vec![1, 1, -2], vec![0, 3, -3]]);
        let ck = cokernel(&p.transpose());
        assert_eq!(ck.free_rank, 1);
        assert_eq!(ck.torsion.moduli(), &[3]);
    }

    #[test]
    fn cokernel_trivial_cases() {
        let ck = cokernel(&IntMatrix::identity(3));
        assert_eq!(ck.free_rank, 0);
        assert_eq!(ck.torsion.rank(), 0);
        let ck = cokernel(&m(&[vec![0]]));
        assert_eq!(ck.free_rank, 1);
        assert_eq!(ck.torsion.rank(), 0);
    }

    #[test]
    fn hermite_is_reduced_and_unimodular() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let r = rng.gen_range(1..5);
            let c = rng.gen_range(1..6);
            let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-6..7)).collect()).collect();
            let a = m(&rows);
            let (h, u) = hermite_rows(&a);
            assert_eq!(u.mul(&a), h);
            assert!(u.det().abs().is_one());
            let mut last_pivot: Option<usize> = None;
            for i in 0..h.rows() {
                match (0..h.cols()).find(|&j| !h.get(i, j).is_zero()) {
                    Some(j) => {
                        assert!(last_pivot.map_or(true, |lp| j > lp));
                        assert!(h.get(i, j).is_positive());
                        for k in 0..i {
                            assert!(!h.get(k, j).is_negative() && h.get(k, j) < h.get(i, j));
                        }
                        last_pivot = Some(j);
                    }
                    None => assert!((i..h.rows()).all(|k| h.row(k).iter().all(Zero::is_zero))),
                }
            }
            // uniqueness: HNF of a unimodular image is the same
            let (h2, _) = hermite_rows(&u.mul(&a));
            assert_eq!(h, h2);
        }
    }

    #[test]
    fn kernel_basis_example_matrix() {
        let g = TorsionGroup::new(vec![3]).unwrap();
        let cols: Vec<(i64, TorsionElement)> = [(1, 0), (1, 1), (1, 2)]
            .iter()
            .map(|&(w, e)| (w, g.element(&[e])))
            .collect();
        let p = lattice_kernel_basis(&g, &cols).unwrap();
        assert_eq!((p.rows(), p.cols()), (2, 3));
        let w = [1i64, 1, 1].map(BigInt::from);
        assert!(p.mul_vec(&w).iter().all(Zero::is_zero));
        let ck = cokernel(&p.transpose());
        assert_eq!(ck.free_rank, 1);
        assert_eq!(ck.torsion.moduli(), &[3]);
        // the displayed generator matrix spans the same row lattice
        let (h, _) = hermite_rows(&m(&[vec![1, 1, -2], vec![0, 3, -3]]));
        assert_eq!(p, h);
    }

    #[test]
    fn kernel_basis_rejects_non_almost_free() {
        let g = TorsionGroup::trivial();
        let cols: Vec<(i64, TorsionElement)> = [1, 2, 2].iter().map(|&w| (w, g.element(&[]))).collect();
        assert_eq!(lattice_kernel_basis(&g, &cols), Err(Error::NotAlmostFree));
    }

    #[test]
    fn kernel_basis_weighted() {
        let g = TorsionGroup::trivial();
        let cols: Vec<(i64, TorsionElement)> = [1, 1, 2].iter().map(|&w| (w, g.element(&[]))).collect();
        let p = lattice_kernel_basis(&g, &cols).unwrap();
        let w = [1i64, 1, 2].map(BigInt::from);
        assert!(p.mul_vec(&w).iter().all(Zero::is_zero));
        let ck = cokernel(&p.transpose());
        assert_eq!((ck.free_rank, ck.torsion.rank()), (1, 0));
    }

    /// Counts consistent lift matrices whose induced map is injective on all of Γ.
    fn brute_force_aut_count(mu: &[u64]) -> usize {
        let g = TorsionGroup::new(mu.to_vec()).unwrap();
        let elems: Vec<Vec<u64>> = g.elements().collect();
        let s = mu.len();
        let mut radix = Vec::new();
        for &m in mu {
            radix.extend(std::iter::repeat(m).take(s));
        }
        let mut count = 0;
        for digits in MixedRadix::new(radix) {
            let a = |k: usize, l: usize| digits[k * s + l];
            // well defined on Z/μ_ℓ: μ_ℓ·a_kℓ ≡ 0 mod μ_k
            if (0..s).any(|k| (0..s).any(|l| (mu[l] * a(k, l)) % mu[k] != 0)) {
                continue;
            }
            let mut seen = std::collections::HashSet::new();
            for x in &elems {
                let y: Vec<u64> = (0..s)
                    .map(|k| (0..s).map(|l| a(k, l) * x[l]).sum::<u64>() % mu[k])
                    .collect();
                seen.insert(y);
            }
            if seen.len() == elems.len() {
                count += 1;
            }
        }
        count
    }

    fn chains(max_order: u64, prefix: Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let order: u64 = prefix.iter().product();
        let top = prefix.last().copied().unwrap_or(max_order);
        for m in 2..=top {
            if order * m > max_order || top % m != 0 && !prefix.is_empty() {
                continue;
            }
            let mut next = prefix.clone();
            next.push(m);
            out.push(next.clone());
            chains(max_order, next, out);
        }
    }

    #[test]
    fn automorphism_counts() {
        let count = |mu: Vec<u64>| automorphisms(&TorsionGroup::new(mu).unwrap(), DEFAULT_AUT_CAP).unwrap().len();
        assert_eq!(count(vec![3]), 2);
        assert_eq!(count(vec![2, 2]), 6);
        assert_eq!(count(vec![4, 2]), 8);
        assert_eq!(count(vec![]), 1);
    }

    #[test]
    fn automorphism_counts_match_brute_force() {
        let mut groups = Vec::new();
        chains(200, Vec::new(), &mut groups);
        for mu in groups {
            // the brute force scans all μ_k^{s·s} lift matrices
            let space: u64 = mu.iter().map(|&m| m.pow(mu.len() as u32)).product();
            if space > 5_000_000 {
                continue;
            }
            let g = TorsionGroup::new(mu.clone()).unwrap();
            let auts = automorphisms(&g, 10_000_000).unwrap();
            assert_eq!(auts.len(), brute_force_aut_count(&mu), "{mu:?}");
            let set: std::collections::HashSet<_> = auts.iter().collect();
            assert_eq!(set.len(), auts.len());
        }
    }

    #[test]
    fn automorphism_cap() {
        let g = TorsionGroup::new(vec![1_000_003]).unwrap();
        assert!(matches!(automorphisms(&g, 1000), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn torsion_group_validation() {
        assert!(TorsionGroup::new(vec![4, 2]).is_ok());
        assert!(TorsionGroup::new(vec![2, 4]).is_err());
        assert!(TorsionGroup::new(vec![1]).is_err());
    }
}
