//! Local charts of a simplicial toric variety: the stabilizer `H_σ` of the affine
//! slice at a maximal cone, its eigenvalue exponents, and the age test.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::abgroup::{self, IntMatrix, MixedRadix, TorsionGroup};
use crate::degmat::DegreeMatrix;
use crate::error::{Error, Result};
use crate::rat::{self, Q};
use crate::singtest::SingularityClass;

/// Element `(a, b)` of `H_σ` with the pair `(c, η)` it comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartElement {
    pub a: Vec<Q>,
    pub b: Vec<Q>,
    pub c: Vec<BigInt>,
    pub eta: Vec<u64>,
}

impl ChartElement {
    pub fn is_identity(&self) -> bool {
        self.a.iter().chain(&self.b).all(Zero::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgeProfile {
    pub alphas: Vec<Q>,
    pub age: Q,
}

/// Degree data of `P` together with a chosen maximal cone.
#[derive(Clone, Debug)]
pub struct Chart {
    /// free part `W` (k × r) and torsion part `E` (s × r) of the degree matrix
    w: Vec<Vec<BigInt>>,
    e: Vec<Vec<BigInt>>,
    group: TorsionGroup,
    sigma: Vec<usize>,
    complement: Vec<usize>,
    w_sigma_inv: Vec<Vec<Q>>,
    w_sigma: IntMatrix,
}

impl Chart {
    /// `sigma` lists the columns of `P` spanning the cone; degree data is read off
    /// the cokernel of `P^T`.
    pub fn new(p: &IntMatrix, sigma: &[usize]) -> Result<Self> {
        let ck = abgroup::cokernel(&p.transpose());
        let k = ck.free_rank;
        let w: Vec<Vec<BigInt>> = (0..k).map(|i| ck.projection.row(i).to_vec()).collect();
        let e: Vec<Vec<BigInt>> = (k..ck.projection.rows()).map(|i| ck.projection.row(i).to_vec()).collect();
        Self::build(p, w, e, ck.torsion, sigma)
    }

    /// Uses the given degree matrix as the Gale dual of `P` (checked).
    pub fn with_degree_matrix(p: &IntMatrix, q: &DegreeMatrix, sigma: &[usize]) -> Result<Self> {
        if q.ncols() != p.cols() {
            return Err(Error::Invalid("column counts differ".into()));
        }
        let ck = abgroup::cokernel(&p.transpose());
        if ck.free_rank != 1 || ck.torsion.moduli() != q.moduli().as_slice() {
            return Err(Error::Invalid("degree matrix does not match the generator matrix".into()));
        }
        let w = vec![q.weights().as_slice().iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()];
        let e: Vec<Vec<BigInt>> = q
            .rows()
            .iter()
            .map(|r| r.eta.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let moduli = q.moduli();
        for i in 0..p.rows() {
            let prow = p.row(i);
            let dot = |row: &[BigInt]| -> BigInt { row.iter().zip(prow).map(|(a, b)| a * b).sum() };
            if !dot(&w[0]).is_zero() {
                return Err(Error::Invalid("weights do not annihilate P".into()));
            }
            for (row, &m) in e.iter().zip(&moduli) {
                if !(dot(row) % BigInt::from(m)).is_zero() {
                    return Err(Error::Invalid("torsion rows do not annihilate P".into()));
                }
            }
        }
        Self::build(p, w, e, q.group(), sigma)
    }

    fn build(
        p: &IntMatrix,
        w: Vec<Vec<BigInt>>,
        e: Vec<Vec<BigInt>>,
        group: TorsionGroup,
        sigma: &[usize],
    ) -> Result<Self> {
        let n = p.rows();
        let r = p.cols();
        let mut sigma = sigma.to_vec();
        sigma.sort_unstable();
        sigma.dedup();
        if sigma.len() != n || sigma.iter().any(|&j| j >= r) {
            return Err(Error::Invalid(format!("cone {sigma:?} does not index {n} columns of P")));
        }
        if p.select_columns(&sigma).det().is_zero() {
            return Err(Error::Invalid(format!("columns {sigma:?} are linearly dependent")));
        }
        let complement: Vec<usize> = (0..r).filter(|j| !sigma.contains(j)).collect();
        let k = w.len();
        if k != complement.len() {
            return Err(Error::Invalid("generator matrix does not have full rank".into()));
        }
        // W_σ has the free parts of the complementary columns as rows
        let w_sigma_rows: Vec<Vec<BigInt>> = complement
            .iter()
            .map(|&j| (0..k).map(|i| w[i][j].clone()).collect())
            .collect();
        let w_sigma = IntMatrix::from_big_rows(w_sigma_rows.clone());
        let w_sigma_q: Vec<Vec<Q>> = w_sigma_rows.iter().map(|row| row.iter().map(rat::qi).collect()).collect();
        let w_sigma_inv = rat::inverse(&w_sigma_q)
            .ok_or_else(|| Error::Invalid("free parts outside the cone do not have full rank".into()))?;
        Ok(Chart {
            w,
            e,
            group,
            sigma,
            complement,
            w_sigma_inv,
            w_sigma,
        })
    }

    pub fn group(&self) -> &TorsionGroup {
        &self.group
    }

    fn b_of(&self, eta: &[u64]) -> Vec<Q> {
        eta.iter()
            .zip(self.group.moduli())
            .map(|(&x, &m)| Q::new(BigInt::from(x), BigInt::from(m)))
            .collect()
    }

    /// `Φ(c, η) = (W_σ^{-1}(c − E_σ b(η)) mod 1, b(η))`
    pub fn phi(&self, c: &[BigInt], eta: &[u64]) -> ChartElement {
        let b = self.b_of(eta);
        let rhs: Vec<Q> = self
            .complement
            .iter()
            .enumerate()
            .map(|(t, &j)| {
                let eb: Q = self.e.iter().zip(&b).map(|(row, bl)| rat::qi(&row[j]) * bl).sum();
                rat::qi(&c[t]) - eb
            })
            .collect();
        let a = rat::mat_vec(&self.w_sigma_inv, &rhs).iter().map(rat::frac).collect();
        ChartElement {
            a,
            b,
            c: c.to_vec(),
            eta: eta.to_vec(),
        }
    }

    /// Every element of `H_σ` exactly once, identity first.
    pub fn elements(&self) -> Vec<ChartElement> {
        let k = self.complement.len();
        let mut reps: Vec<Vec<BigInt>> = vec![Vec::new()];
        if k > 0 {
            // Z^k / im(W_σ): box under a triangular basis of the image lattice
            let (h, _) = abgroup::hermite_rows(&self.w_sigma.transpose());
            let diag: Vec<u64> = (0..k)
                .map(|t| h.get(t, t).abs().to_u64().expect("chart index fits in 64 bits"))
                .collect();
            reps = MixedRadix::new(diag)
                .map(|y| y.into_iter().map(BigInt::from).collect())
                .collect();
        }
        let mut out = Vec::new();
        for eta in self.group.elements() {
            for c in &reps {
                out.push(self.phi(c, &eta));
            }
        }
        out
    }

    /// Fractional parts of `ω_m · (a, b)` for the columns `m` of the cone.
    pub fn ages(&self, el: &ChartElement) -> Result<AgeProfile> {
        let pair = |m: usize| -> Q {
            let fa: Q = self.w.iter().zip(&el.a).map(|(row, a)| rat::qi(&row[m]) * a).sum();
            let fb: Q = self.e.iter().zip(&el.b).map(|(row, b)| rat::qi(&row[m]) * b).sum();
            fa + fb
        };
        for &m in &self.complement {
            if !rat::frac(&pair(m)).is_zero() {
                return Err(Error::Invalid("element does not fix the affine slice".into()));
            }
        }
        let alphas: Vec<Q> = self.sigma.iter().map(|&m| rat::frac(&pair(m))).collect();
        let age = alphas.iter().sum();
        Ok(AgeProfile { alphas, age })
    }

    pub fn classify(&self) -> Result<SingularityClass> {
        let mut class = SingularityClass::Terminal;
        for el in self.elements() {
            if el.is_identity() {
                continue;
            }
            let age = self.ages(&el)?.age;
            if age < Q::one() {
                return Ok(SingularityClass::NonCanonical);
            }
            if age.is_one() {
                class = SingularityClass::CanonicalStrict;
            }
        }
        Ok(class)
    }
}

pub fn chart_group(p: &IntMatrix, sigma: &[usize]) -> Result<Vec<ChartElement>> {
    Ok(Chart::new(p, sigma)?.elements())
}

pub fn ages(p: &IntMatrix, sigma: &[usize], el: &ChartElement) -> Result<AgeProfile> {
    Chart::new(p, sigma)?.ages(el)
}

pub fn classify_chart(p: &IntMatrix, sigma: &[usize]) -> Result<SingularityClass> {
    Chart::new(p, sigma)?.classify()
}

/// Worst chart class over the maximal cones `cone(v_j, j ≠ i)` of a simplex fan.
pub fn classify_simplex_fan(p: &IntMatrix) -> Result<SingularityClass> {
    let r = p.cols();
    let mut class = SingularityClass::Terminal;
    for i in 0..r {
        let sigma: Vec<usize> = (0..r).filter(|&j| j != i).collect();
        class = class.worst(classify_chart(p, &sigma)?);
    }
    Ok(class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singtest;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn example_p() -> IntMatrix {
        IntMatrix::from_rows(&[vec![1i64, 1, -2], vec![0, 3, -3]])
    }

    #[test]
    fn smooth_chart_is_trivial() {
        let p = IntMatrix::from_rows(&[vec![1i64, 0, -1], vec![0, 1, -1]]);
        for sigma in [[0, 1], [0, 2], [1, 2]] {
            let g = chart_group(&p, &sigma).unwrap();
            assert_eq!(g.len(), 1);
            assert!(g[0].is_identity());
            assert_eq!(classify_chart(&p, &sigma).unwrap(), SingularityClass::Terminal);
        }
    }

    #[test]
    fn example_chart_has_order_three() {
        let p = example_p();
        for sigma in [[0, 1], [0, 2], [1, 2]] {
            let chart = Chart::new(&p, &sigma).unwrap();
            let g = chart.elements();
            assert_eq!(g.len(), 3);
            for el in g.iter().filter(|e| !e.is_identity()) {
                let prof = chart.ages(el).unwrap();
                let mut a = prof.alphas.clone();
                a.sort();
                assert_eq!(a, vec![q(1, 3), q(2, 3)]);
                assert_eq!(prof.age, q(1, 1));
            }
            assert_eq!(chart.classify().unwrap(), SingularityClass::CanonicalStrict);
        }
    }

    #[test]
    fn identity_has_zero_age() {
        let p = example_p();
        let chart = Chart::new(&p, &[0, 1]).unwrap();
        let id = &chart.elements()[0];
        assert!(id.is_identity());
        let prof = chart.ages(id).unwrap();
        assert!(prof.age.is_zero());
    }

    #[test]
    fn phi_in_the_displayed_coordinates() {
        let q_ = DegreeMatrix::from_parts(&[1, 1, 1], &[(3, &[0, 1, 2])]).unwrap();
        let chart = Chart::with_degree_matrix(&example_p(), &q_, &[0, 1]).unwrap();
        let el = chart.phi(&[BigInt::zero()], &[1]);
        assert_eq!(el.a, vec![q(1, 3)]);
        assert_eq!(el.b, vec![q(1, 3)]);
        let prof = chart.ages(&el).unwrap();
        assert_eq!(prof.alphas, vec![q(1, 3), q(2, 3)]);
        assert_eq!(prof.age, q(1, 1));
    }

    #[test]
    fn mismatched_degree_matrix_is_rejected() {
        let q_ = DegreeMatrix::from_parts(&[1, 1, 1], &[(3, &[0, 1, 1])]).unwrap();
        assert!(Chart::with_degree_matrix(&example_p(), &q_, &[0, 1]).is_err());
    }

    #[test]
    fn weighted_surface_chart() {
        let q_ = DegreeMatrix::from_parts(&[1, 1, 2], &[]).unwrap();
        let p = q_.simplex().unwrap();
        let chart = Chart::new(&p, &[0, 1]).unwrap();
        let g = chart.elements();
        assert_eq!(g.len(), 2);
        let prof = chart.ages(&g[1]).unwrap();
        assert_eq!(prof.alphas, vec![q(1, 2), q(1, 2)]);
        assert_eq!(prof.age, q(1, 1));
    }

    #[test]
    fn one_third_one_one_is_not_canonical() {
        let p = IntMatrix::from_rows(&[vec![1i64, 0, -1], vec![0, 1, -3]]);
        assert_eq!(classify_chart(&p, &[0, 2]).unwrap(), SingularityClass::NonCanonical);
    }

    #[test]
    fn chart_orders_match_determinants() {
        for (w, rows) in [
            (vec![1u64, 2, 3], vec![]),
            (vec![1, 1, 1, 1], vec![(2u64, vec![0u64, 0, 1, 1])]),
            (vec![1, 1, 2, 3], vec![]),
        ] {
            let rows_ref: Vec<(u64, &[u64])> = rows.iter().map(|(m, e)| (*m, &e[..])).collect();
            let q_ = DegreeMatrix::from_parts(&w, &rows_ref).unwrap();
            let p = q_.simplex().unwrap();
            for i in 0..p.cols() {
                let sigma: Vec<usize> = (0..p.cols()).filter(|&j| j != i).collect();
                let chart = Chart::new(&p, &sigma).unwrap();
                let det = p.select_columns(&sigma).det().abs();
                assert_eq!(BigInt::from(chart.elements().len()), det);
                // no quasi-reflections
                for el in chart.elements().iter().filter(|e| !e.is_identity()) {
                    let prof = chart.ages(el).unwrap();
                    assert!(prof.alphas.iter().filter(|a| !a.is_zero()).count() >= 2);
                }
            }
            assert_eq!(classify_simplex_fan(&p).unwrap(), singtest::classify(&q_).unwrap());
        }
    }
}
