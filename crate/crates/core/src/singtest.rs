//! Terminal / canonical test for degree matrices by the integer age criterion,
//! and an independent check by lattice points of the generator simplex.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::abgroup::{self, IntMatrix, MixedRadix};
use crate::degmat::DegreeMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SingularityClass {
    Terminal,
    /// Canonical but not terminal.
    CanonicalStrict,
    NonCanonical,
}

impl SingularityClass {
    pub fn is_canonical(self) -> bool {
        self != SingularityClass::NonCanonical
    }

    pub fn is_terminal(self) -> bool {
        self == SingularityClass::Terminal
    }

    /// The worse of two classes.
    pub fn worst(self, other: Self) -> Self {
        self.max(other)
    }

    pub fn meets(self, mode: Mode) -> bool {
        match mode {
            Mode::Canonical => self.is_canonical(),
            Mode::Terminal => self.is_terminal(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SingularityClass::Terminal => "terminal",
            SingularityClass::CanonicalStrict => "canonical_strict",
            SingularityClass::NonCanonical => "non_canonical",
        }
    }
}

/// Which singularities a classification run admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Canonical,
    Terminal,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Canonical => "canonical",
            Mode::Terminal => "terminal",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Mode::Canonical),
            "terminal" => Ok(Mode::Terminal),
            _ => Err(Error::Invalid(format!("unknown mode {s:?}"))),
        }
    }
}

/// Precomputed integer data of a degree matrix for the age sums.
struct AgeData {
    w: Vec<i128>,
    eta: Vec<Vec<i128>>,
    mu: Vec<u64>,
    /// `μ_1 / μ_ℓ`
    scale: Vec<i128>,
    mu1: i128,
}

impl AgeData {
    fn new(q: &DegreeMatrix) -> Self {
        let mu = q.moduli();
        let mu1 = mu.first().copied().unwrap_or(1) as i128;
        AgeData {
            w: q.weights().as_slice().iter().map(|&x| x as i128).collect(),
            eta: q.rows().iter().map(|r| r.eta.iter().map(|&x| x as i128).collect()).collect(),
            scale: mu.iter().map(|&m| mu1 / m as i128).collect(),
            mu,
            mu1,
        }
    }

    /// `Σ_ℓ (w_i η_ℓj − w_j η_ℓi) · b_ℓ · μ_1/μ_ℓ`
    fn twist(&self, i: usize, j: usize, b: &[u64]) -> i128 {
        let mut t = 0i128;
        for (l, &bl) in b.iter().enumerate() {
            t += (self.w[i] * self.eta[l][j] - self.w[j] * self.eta[l][i]) * bl as i128 * self.scale[l];
        }
        t
    }
}

/// `R_ij(c, b)`: the least non-negative residue of
/// `μ_1 w_j c + Σ_ℓ (w_i η_ℓj − w_j η_ℓi) b_ℓ μ_1/μ_ℓ` modulo `μ_1 w_i`.
pub fn r_value(q: &DegreeMatrix, i: usize, j: usize, c: u64, b: &[u64]) -> Result<u64> {
    let n1 = q.ncols();
    if i >= n1 || j >= n1 || i == j {
        return Err(Error::Invalid(format!("bad column pair ({i}, {j})")));
    }
    let w = q.weights().as_slice();
    if c >= w[i] {
        return Err(Error::Invalid(format!("c = {c} not below w_i = {}", w[i])));
    }
    let mu = q.moduli();
    if b.len() != mu.len() || b.iter().zip(&mu).any(|(&x, &m)| x >= m) {
        return Err(Error::Invalid(format!("b = {b:?} is not a lift tuple for {mu:?}")));
    }
    if c == 0 && b.iter().all(|&x| x == 0) {
        return Err(Error::Invalid("(c, b) must be nonzero".into()));
    }
    let d = AgeData::new(q);
    let m = d.mu1 * d.w[i];
    let v = d.mu1 * d.w[j] * c as i128 + d.twist(i, j, b);
    Ok(v.rem_euclid(m) as u64)
}

/// Scans all `(i, c, b)`. With `stop_at_equality` the scan ends at the first sum equal
/// to `μ_1 w_i` (enough to rule out terminality).
fn scan(q: &DegreeMatrix, stop_at_equality: bool) -> SingularityClass {
    let d = AgeData::new(q);
    let wmax = d.w.iter().copied().max().unwrap_or(1);
    let mumax = d.mu.iter().copied().max().unwrap_or(1) as i128;
    // residues stay below μ_1 w_i, and a twist sums |rows| products residue · b_ℓ
    let bound = d.mu1 * wmax * mumax * (d.mu.len() as i128 + 2);
    if bound < (1i128 << 62) {
        scan_narrow(&d, stop_at_equality)
    } else {
        scan_wide(&d, stop_at_equality)
    }
}

/// [`scan`] in `i64` with the twists reduced modulo `μ_1 w_i` up front.
fn scan_narrow(d: &AgeData, stop_at_equality: bool) -> SingularityClass {
    let n1 = d.w.len();
    let rows = d.mu.len();
    let mut class = SingularityClass::Terminal;
    let mut base = vec![0i64; n1];
    let mut step = vec![0i64; n1];
    // coef[j * rows + ℓ] = (w_i η_ℓj − w_j η_ℓi) μ_1/μ_ℓ mod μ_1 w_i
    let mut coef = vec![0i64; n1 * rows];
    for i in 0..n1 {
        let m128 = d.mu1 * d.w[i];
        let m = m128 as i64;
        for j in 0..n1 {
            step[j] = (d.mu1 * d.w[j]).rem_euclid(m128) as i64;
            for l in 0..rows {
                coef[j * rows + l] = ((d.w[i] * d.eta[l][j] - d.w[j] * d.eta[l][i]) * d.scale[l]).rem_euclid(m128) as i64;
            }
        }
        for b in MixedRadix::new(d.mu.clone()) {
            let b_zero = b.iter().all(|&x| x == 0);
            for j in 0..n1 {
                if j != i {
                    let mut t = 0i64;
                    for (l, &bl) in b.iter().enumerate() {
                        t += coef[j * rows + l] * bl as i64;
                    }
                    base[j] = t % m;
                }
            }
            for c in 0..d.w[i] {
                if c > 0 {
                    for j in 0..n1 {
                        if j != i {
                            base[j] += step[j];
                            if base[j] >= m {
                                base[j] -= m;
                            }
                        }
                    }
                }
                if c == 0 && b_zero {
                    continue;
                }
                let mut sum = 0i64;
                for j in 0..n1 {
                    if j != i {
                        sum += base[j];
                        if sum > m {
                            break;
                        }
                    }
                }
                if sum < m {
                    return SingularityClass::NonCanonical;
                }
                if sum == m {
                    class = SingularityClass::CanonicalStrict;
                    if stop_at_equality {
                        return class;
                    }
                }
            }
        }
    }
    class
}

fn scan_wide(d: &AgeData, stop_at_equality: bool) -> SingularityClass {
    let n1 = d.w.len();
    let mut class = SingularityClass::Terminal;
    let mut base = vec![0i128; n1];
    let mut step = vec![0i128; n1];
    for i in 0..n1 {
        let m = d.mu1 * d.w[i];
        for b in MixedRadix::new(d.mu.clone()) {
            let b_zero = b.iter().all(|&x| x == 0);
            for j in 0..n1 {
                if j != i {
                    base[j] = d.twist(i, j, &b).rem_euclid(m);
                    step[j] = (d.mu1 * d.w[j]).rem_euclid(m);
                }
            }
            for c in 0..d.w[i] {
                if c > 0 {
                    for j in 0..n1 {
                        if j != i {
                            base[j] += step[j];
                            if base[j] >= m {
                                base[j] -= m;
                            }
                        }
                    }
                }
                if c == 0 && b_zero {
                    continue;
                }
                let mut sum = 0i128;
                for j in 0..n1 {
                    if j != i {
                        sum += base[j];
                        if sum > m {
                            break;
                        }
                    }
                }
                if sum < m {
                    return SingularityClass::NonCanonical;
                }
                if sum == m {
                    class = SingularityClass::CanonicalStrict;
                    if stop_at_equality {
                        return class;
                    }
                }
            }
        }
    }
    class
}

/// Singularity class of an almost free degree matrix.
pub fn classify(q: &DegreeMatrix) -> Result<SingularityClass> {
    if !q.is_almost_free() {
        return Err(Error::NotAlmostFree);
    }
    Ok(scan(q, false))
}

/// Age test alone, without the almost-free check; exits as early as the mode allows.
pub fn passes(q: &DegreeMatrix, mode: Mode) -> bool {
    match mode {
        Mode::Canonical => scan(q, false).is_canonical(),
        Mode::Terminal => scan(q, true).is_terminal(),
    }
}

/// Determinants of `P` with column `j` deleted, signed so that they give the linear
/// relation `Σ k_j v_j = 0`.
fn kernel_cofactors(p: &IntMatrix) -> Vec<BigInt> {
    let r = p.cols();
    (0..r)
        .map(|j| {
            let idx: Vec<usize> = (0..r).filter(|&k| k != j).collect();
            let d = p.select_columns(&idx).det();
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Adjugate of a square integer matrix.
fn adjugate(b: &IntMatrix) -> Vec<Vec<BigInt>> {
    let n = b.rows();
    let mut adj = vec![vec![BigInt::zero(); n]; n];
    if n == 1 {
        adj[0][0] = BigInt::from(1);
        return adj;
    }
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<Vec<BigInt>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| b.get(r, c).clone()).collect())
                .collect();
            let minor = IntMatrix::from_big_rows(rows).det();
            // adj[j][i] = (-1)^{i+j} M_ij
            adj[j][i] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    adj
}

/// Classifies the simplex `conv(v_0, …, v_n)` (columns of `P`) by enumerating the
/// lattice points in the half-open parallelepiped of every facet cone.
pub fn lattice_point_oracle(p: &IntMatrix) -> Result<SingularityClass> {
    let n = p.rows();
    let r = p.cols();
    if r != n + 1 {
        return Err(Error::Invalid(format!("expected {} columns, got {r}", n + 1)));
    }
    let k = kernel_cofactors(p);
    let all_pos = k.iter().all(|x| x.is_positive());
    let all_neg = k.iter().all(|x| x.is_negative());
    if !(all_pos || all_neg) {
        return Err(Error::Degenerate("not a simplex around the origin"));
    }
    let mut class = SingularityClass::Terminal;
    for i in 0..r {
        let idx: Vec<usize> = (0..r).filter(|&j| j != i).collect();
        let b = p.select_columns(&idx);
        let det = b.det();
        let sign = if det.is_negative() { -1i128 } else { 1 };
        let dabs = det.abs().to_i128().ok_or(Error::ResourceCap {
            what: "cone index",
            size: u128::MAX,
            cap: i128::MAX as u128,
            context: None,
        })?;
        let adj: Vec<Vec<i128>> = adjugate(&b)
            .into_iter()
            .map(|row| row.iter().map(|x| x.to_i128().expect("adjugate entry fits")).collect())
            .collect();
        // coset representatives of Z^n / (cone lattice) from the lower-triangular basis
        let (h, _) = abgroup::hermite_rows(&b.transpose());
        let diag: Vec<u64> = (0..n).map(|t| h.get(t, t).to_u64().expect("cone index fits")).collect();
        for y in MixedRadix::new(diag) {
            if y.iter().all(|&t| t == 0) {
                continue;
            }
            // λ·|det| = sign·adj·y, reduced mod |det|
            let mut total = 0i128;
            for row in &adj {
                let mut s = 0i128;
                for (a, &t) in row.iter().zip(&y) {
                    s += a * t as i128;
                }
                total += (sign * s).rem_euclid(dabs);
            }
            if total < dabs {
                return Ok(SingularityClass::NonCanonical);
            }
            if total == dabs {
                class = SingularityClass::CanonicalStrict;
            }
        }
    }
    Ok(class)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(w: &[u64], rows: &[(u64, &[u64])]) -> DegreeMatrix {
        DegreeMatrix::from_parts(w, rows).unwrap()
    }

    fn example() -> DegreeMatrix {
        dm(&[1, 1, 1], &[(3, &[0, 1, 2])])
    }

    #[test]
    fn r_values_of_example() {
        let q = example();
        assert_eq!(r_value(&q, 2, 0, 0, &[1]).unwrap(), 1);
        assert_eq!(r_value(&q, 2, 1, 0, &[1]).unwrap(), 2);
    }

    #[test]
    fn r_values_weighted() {
        let q = dm(&[1, 1, 2], &[]);
        assert_eq!(r_value(&q, 2, 0, 1, &[]).unwrap(), 1);
        assert_eq!(r_value(&q, 2, 1, 1, &[]).unwrap(), 1);
    }

    #[test]
    fn r_value_rejects_bad_arguments() {
        let q = example();
        assert!(r_value(&q, 1, 1, 0, &[1]).is_err());
        assert!(r_value(&q, 2, 0, 1, &[1]).is_err());
        assert!(r_value(&q, 2, 0, 0, &[3]).is_err());
        assert!(r_value(&q, 2, 0, 0, &[0]).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&dm(&[1, 1, 1], &[])).unwrap(), SingularityClass::Terminal);
        assert_eq!(classify(&example()).unwrap(), SingularityClass::CanonicalStrict);
        assert_eq!(classify(&dm(&[1, 1, 2], &[])).unwrap(), SingularityClass::CanonicalStrict);
        assert_eq!(classify(&dm(&[1, 1, 1, 1, 2], &[])).unwrap(), SingularityClass::Terminal);
        assert_eq!(classify(&dm(&[1, 1, 3], &[])).unwrap(), SingularityClass::NonCanonical);
        assert_eq!(
            classify(&dm(&[1, 1, 1, 1, 1], &[(5, &[0, 1, 2, 3, 4])])).unwrap(),
            SingularityClass::Terminal
        );
        assert_eq!(classify(&dm(&[1, 2, 2], &[])), Err(Error::NotAlmostFree));
    }

    #[test]
    fn oracle_examples() {
        let p2 = IntMatrix::from_rows(&[vec![1i64, 0, -1], vec![0, 1, -1]]);
        assert_eq!(lattice_point_oracle(&p2).unwrap(), SingularityClass::Terminal);
        let ex = IntMatrix::from_rows(&[vec![1i64, 1, -2], vec![0, 3, -3]]);
        assert_eq!(lattice_point_oracle(&ex).unwrap(), SingularityClass::CanonicalStrict);
        let t113 = IntMatrix::from_rows(&[vec![1i64, 0, -1], vec![0, 1, -3]]);
        assert_eq!(lattice_point_oracle(&t113).unwrap(), SingularityClass::NonCanonical);
        let flat = IntMatrix::from_rows(&[vec![1i64, 2, 3], vec![0, 0, 0]]);
        assert!(lattice_point_oracle(&flat).is_err());
    }

    #[test]
    fn r_sums_do_not_depend_on_column_order() {
        let q = dm(&[1, 2, 3, 5], &[]);
        let q2 = dm(&[1, 2, 3, 5], &[]);
        for c in 1..5 {
            let s1: u64 = [0, 1, 2].iter().map(|&j| r_value(&q, 3, j, c, &[]).unwrap()).sum();
            let s2: u64 = [2, 0, 1].iter().map(|&j| r_value(&q2, 3, j, c, &[]).unwrap()).sum();
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn classify_agrees_with_oracle_on_small_matrices() {
        let mut seen = 0;
        for a in 1..=4u64 {
            for b in a..=6 {
                for c in b..=9 {
                    for mu in [1u64, 2, 3, 4, 5] {
                        let etas: Vec<Vec<u64>> = if mu == 1 {
                            vec![vec![]]
                        } else {
                            MixedRadix::new(vec![mu; 3]).collect()
                        };
                        for eta in etas {
                            let rows: Vec<(u64, &[u64])> = if mu == 1 { vec![] } else { vec![(mu, &eta[..])] };
                            let q = dm(&[a, b, c], &rows);
                            if !q.is_almost_free() {
                                continue;
                            }
                            let p = q.simplex().unwrap();
                            assert_eq!(classify(&q).unwrap(), lattice_point_oracle(&p).unwrap(), "{q}");
                            seen += 1;
                        }
                    }
                }
            }
        }
        assert!(seen > 500);
    }

    #[test]
    fn narrow_and_wide_scans_agree() {
        for a in 1..=3u64 {
            for b in a..=5 {
                for mu in [2u64, 3, 4, 6] {
                    for eta in MixedRadix::new(vec![mu; 4]) {
                        let Ok(q) = DegreeMatrix::from_parts(&[1, a, b, a + b], &[(mu, &eta[..])]) else { continue };
                        let d = AgeData::new(&q);
                        for stop in [false, true] {
                            assert_eq!(scan_narrow(&d, stop), scan_wide(&d, stop), "{q}");
                        }
                    }
                }
            }
        }
    }
}
