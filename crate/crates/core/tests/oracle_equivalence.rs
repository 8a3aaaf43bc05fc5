//! The age test on degree matrices against lattice points of the reconstructed simplex.

use fano_forge::classify::{classify_all, Options};
use fano_forge::degmat::DegreeMatrix;
use fano_forge::singtest::{self, Mode};
use fano_forge::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn agree(q: &DegreeMatrix) {
    let by_ages = singtest::classify(q).unwrap();
    let by_points = singtest::lattice_point_oracle(&q.simplex().unwrap()).unwrap();
    assert_eq!(by_ages, by_points, "{q}");
}

#[test]
fn full_outputs_in_dimensions_two_and_three() {
    let opts = Options { exec: Execution::Parallel, ..Options::default() };
    for n in [2, 3] {
        for mode in [Mode::Canonical, Mode::Terminal] {
            for r in classify_all(n, mode, &opts).unwrap() {
                agree(&r.matrix);
            }
        }
    }
}

/// Random almost free matrices with five columns, of every singularity class.
pub fn random_dim4_matrices(seed: u64, count: usize) -> Vec<DegreeMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut w: Vec<u64> = (0..5).map(|_| rng.gen_range(1..=9)).collect();
        w.sort();
        let rows: Vec<(u64, Vec<u64>)> = match rng.gen_range(0..3) {
            0 => vec![],
            1 => {
                let mu = rng.gen_range(2..=6);
                vec![(mu, (0..5).map(|_| rng.gen_range(0..mu)).collect())]
            }
            _ => {
                let mu = [2u64, 3][rng.gen_range(0..2)];
                vec![
                    (mu, (0..5).map(|_| rng.gen_range(0..mu)).collect()),
                    (mu, (0..5).map(|_| rng.gen_range(0..mu)).collect()),
                ]
            }
        };
        let parts: Vec<(u64, &[u64])> = rows.iter().map(|(m, e)| (*m, e.as_slice())).collect();
        let Ok(q) = DegreeMatrix::from_parts(&w, &parts) else { continue };
        if q.is_almost_free() {
            out.push(q);
        }
    }
    out
}

#[test]
fn ten_thousand_random_matrices_in_dimension_four() {
    let qs = random_dim4_matrices(2024, 10_000);
    let mut classes = std::collections::BTreeMap::new();
    for q in &qs {
        agree(q);
        *classes.entry(singtest::classify(q).unwrap()).or_insert(0) += 1;
    }
    // the sample must exercise every class
    assert_eq!(classes.len(), 3, "{classes:?}");
}
