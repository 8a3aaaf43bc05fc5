//! Degree matrices of fake weighted projective spaces: a positive weight row over
//! `Z` stacked on torsion rows over `Z/μ_1 ⊇ … ⊇ Z/μ_s`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::abgroup::{self, IntMatrix, TorsionElement, TorsionGroup};
use crate::error::{Error, Result};

/// Non-decreasing positive weights `(w_0, …, w_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector(Vec<u64>);

impl WeightVector {
    pub fn new(w: Vec<u64>) -> Result<Self> {
        if w.len() < 2 {
            return Err(Error::Invalid("a weight vector needs at least two entries".into()));
        }
        if w.iter().any(|&x| x == 0) {
            return Err(Error::Invalid(format!("weights must be positive: {w:?}")));
        }
        if w.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::Invalid(format!("weights must be sorted: {w:?}")));
        }
        Ok(WeightVector(w))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// Dimension `n` of the space (one less than the number of weights).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// True iff `w` is positive, sorted, and every `n`-subset is coprime.
pub fn validate_weight_vector(w: &[u64]) -> bool {
    if w.len() < 2 || w.iter().any(|&x| x == 0) || w.windows(2).any(|p| p[0] > p[1]) {
        return false;
    }
    use num_integer::Integer;
    (0..w.len()).all(|skip| {
        w.iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .fold(0u64, |g, (_, &x)| g.gcd(&x))
            == 1
    })
}

/// A torsion row `η ∈ (Z/μ)^{n+1}` stored by canonical lifts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionRow {
    pub mu: u64,
    pub eta: Vec<u64>,
}

impl TorsionRow {
    pub fn new(mu: u64, eta: Vec<u64>) -> Result<Self> {
        if mu < 2 {
            return Err(Error::Invalid(format!("torsion modulus must be >= 2, got {mu}")));
        }
        if let Some(&e) = eta.iter().find(|&&e| e >= mu) {
            return Err(Error::Invalid(format!("entry {e} is not a canonical lift mod {mu}")));
        }
        Ok(TorsionRow { mu, eta })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeMatrix {
    weights: WeightVector,
    rows: Vec<TorsionRow>,
}

impl DegreeMatrix {
    pub fn new(weights: WeightVector, rows: Vec<TorsionRow>) -> Result<Self> {
        let n1 = weights.as_slice().len();
        for r in &rows {
            if r.eta.len() != n1 {
                return Err(Error::Invalid(format!(
                    "torsion row has {} entries, expected {n1}",
                    r.eta.len()
                )));
            }
        }
        if rows.windows(2).any(|p| p[0].mu % p[1].mu != 0) {
            return Err(Error::Invalid("torsion moduli must form a divisibility chain".into()));
        }
        Ok(DegreeMatrix { weights, rows })
    }

    /// Shorthand used throughout tests: weights plus `(μ, η)` rows.
    pub fn from_parts(w: &[u64], rows: &[(u64, &[u64])]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|&(mu, eta)| TorsionRow::new(mu, eta.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(WeightVector::new(w.to_vec())?, rows)
    }

    pub fn torsion_free(weights: WeightVector) -> Self {
        DegreeMatrix {
            weights,
            rows: Vec::new(),
        }
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn rows(&self) -> &[TorsionRow] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn ncols(&self) -> usize {
        self.weights.0.len()
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.mu).collect()
    }

    pub fn group(&self) -> TorsionGroup {
        TorsionGroup::new(self.moduli()).expect("validated on construction")
    }

    pub fn torsion_order(&self) -> u128 {
        self.rows.iter().map(|r| r.mu as u128).product()
    }

    pub fn eta(&self, j: usize) -> Vec<u64> {
        self.rows.iter().map(|r| r.eta[j]).collect()
    }

    /// Column `j` as `(w_j, η_1j, …, η_sj)`.
    pub fn column(&self, j: usize) -> Vec<i64> {
        let mut c = vec![self.weights.0[j] as i64];
        c.extend(self.rows.iter().map(|r| r.eta[j] as i64));
        c
    }

    /// Appends a row whose modulus divides the current last modulus.
    pub fn with_row(&self, row: TorsionRow) -> Result<Self> {
        let mut rows = self.rows.clone();
        rows.push(row);
        Self::new(self.weights.clone(), rows)
    }

    /// Drops the last torsion row.
    pub fn without_last_row(&self) -> Self {
        let mut rows = self.rows.clone();
        rows.pop();
        DegreeMatrix {
            weights: self.weights.clone(),
            rows,
        }
    }

    pub fn is_almost_free(&self) -> bool {
        is_almost_free(self)
    }

    pub fn simplex(&self) -> Result<IntMatrix> {
        simplex(self)
    }

    /// Degree matrix read off the cokernel of `P^T`; columns are reordered by
    /// ascending weight (stable). Fails unless the cokernel has free rank one.
    pub fn from_generator_matrix(p: &IntMatrix) -> Result<Self> {
        let ck = abgroup::cokernel(&p.transpose());
        if ck.free_rank != 1 {
            return Err(Error::Invalid(format!(
                "generator matrix has class group of free rank {}",
                ck.free_rank
            )));
        }
        let ncols = p.cols();
        let mut free: Vec<BigInt> = ck.projection.row(0).to_vec();
        if free.iter().any(|x| x.is_negative()) {
            free = free.into_iter().map(|x| -x).collect();
        }
        if free.iter().any(|x| !x.is_positive()) {
            return Err(Error::Invalid("generator matrix columns do not positively span".into()));
        }
        let mut weights: Vec<u64> = Vec::with_capacity(ncols);
        for x in &free {
            weights.push(x.to_u64().ok_or_else(|| Error::Invalid("weight exceeds 64 bits".into()))?);
        }
        let moduli = ck.torsion.moduli().to_vec();
        let tors: Vec<Vec<u64>> = (0..moduli.len())
            .map(|l| {
                ck.projection
                    .row(1 + l)
                    .iter()
                    .map(|x| x.to_u64().expect("reduced torsion entry"))
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..ncols).collect();
        order.sort_by_key(|&j| weights[j]);
        let w = WeightVector::new(order.iter().map(|&j| weights[j]).collect())?;
        let rows = moduli
            .iter()
            .zip(&tors)
            .map(|(&mu, t)| TorsionRow::new(mu, order.iter().map(|&j| t[j]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(w, rows)
    }
}

/// Total order used for output: weights, then moduli, then torsion lifts row by row.
impl Ord for DegreeMatrix {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weights
            .cmp(&other.weights)
            .then_with(|| self.moduli().cmp(&other.moduli()))
            .then_with(|| {
                let a = self.rows.iter().map(|r| &r.eta);
                let b = other.rows.iter().map(|r| &r.eta);
                a.cmp(b)
            })
    }
}

impl PartialOrd for DegreeMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DegreeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.weights)?;
        for r in &self.rows {
            let parts: Vec<String> = r.eta.iter().map(|x| x.to_string()).collect();
            write!(f, " mod {}:({})", r.mu, parts.join(","))?;
        }
        Ok(())
    }
}

/// True iff every `n` of the `n+1` columns generate `Z × Γ`.
pub fn is_almost_free(q: &DegreeMatrix) -> bool {
    let group = q.group();
    let cols: Vec<Vec<i64>> = (0..q.ncols()).map(|j| q.column(j)).collect();
    (0..cols.len()).all(|skip| {
        let rest: Vec<Vec<i64>> = cols
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .map(|(_, c)| c.clone())
            .collect();
        abgroup::generates(1, &group, &rest)
    })
}

/// Generator matrix (ray generators as columns, rows in Hermite form) with
/// `Σ w_j v_j = 0`.
pub fn simplex(q: &DegreeMatrix) -> Result<IntMatrix> {
    let group = q.group();
    let cols: Vec<(i64, TorsionElement)> = (0..q.ncols())
        .map(|j| {
            (
                q.weights.0[j] as i64,
                TorsionElement { lift: q.eta(j) },
            )
        })
        .collect();
    abgroup::lattice_kernel_basis(&group, &cols)
}
