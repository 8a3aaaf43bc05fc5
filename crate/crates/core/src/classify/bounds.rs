use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::degmat::WeightVector;

/// Sylvester numbers: `s_1 = 2`, `s_{i+1} = s_i² − s_i + 1`.
pub fn sylvester(i: usize) -> BigInt {
    assert!(i >= 1, "Sylvester numbers start at index 1");
    let mut s = BigInt::from(2);
    for _ in 1..i {
        s = &s * &s - &s + BigInt::one();
    }
    s
}

pub(crate) fn sylvester_u128(i: usize) -> Option<u128> {
    sylvester(i).to_u128()
}

/// Caps on the weight sum and on the torsion order of canonical fake weighted
/// projective spaces of dimension `n`.
#[derive(Clone, Debug)]
pub struct Bounds {
    pub dim: usize,
    /// `(s_{n+1} − 1)^n`
    pub weight_sum_cap: BigInt,
}

impl Bounds {
    pub fn new(dim: usize) -> Self {
        let s = sylvester(dim + 1) - BigInt::one();
        Bounds {
            dim,
            weight_sum_cap: num_traits::pow(s, dim),
        }
    }

    /// `⌊(Σ w)^{n−1} / (w_1 ⋯ w_n)⌋`, the cap on `μ_1 ⋯ μ_s` (weights sorted ascending,
    /// so the smallest weight is left out).
    pub fn torsion_order_cap(w: &WeightVector) -> u128 {
        let ws = w.as_slice();
        let n = ws.len() - 1;
        let h = BigInt::from(w.sum());
        let num = num_traits::pow(h, n - 1);
        let den: BigInt = ws[1..].iter().map(|&x| BigInt::from(x)).product();
        (num / den).to_u128().unwrap_or(u128::MAX)
    }
}
