#![allow(dead_code)]

use fano_forge::abgroup::IntMatrix;
use fano_forge::polytope::RationalPolytope;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Product of random elementary integer row operations and sign changes.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    for _ in 0..3 * n {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            if rng.gen_bool(0.5) {
                for x in m[a].iter_mut() {
                    *x = -*x;
                }
            }
            continue;
        }
        let f: i64 = rng.gen_range(-2..=2);
        for j in 0..n {
            m[a][j] += f * m[b][j];
        }
    }
    IntMatrix::from_rows(&m)
}

/// Full-dimensional lattice polytope with a few vertices in `[-r, r]^n`.
pub fn random_lattice_polytope(rng: &mut ChaCha8Rng, n: usize, r: i64) -> RationalPolytope {
    loop {
        let k = rng.gen_range(n + 1..=n + 3);
        let pts: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-r..=r)).collect()).collect();
        let p = RationalPolytope::from_integer_points(n, &pts).unwrap();
        if p.dim() == n as i32 {
            return p;
        }
    }
}
