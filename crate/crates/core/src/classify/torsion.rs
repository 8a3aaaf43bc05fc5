//! Single torsion rows over a weight vector: the normal form under units and weight
//! shifts, and the set `M(w)` of row-minimal canonical (terminal) rows.

use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;

use crate::degmat::{DegreeMatrix, TorsionRow, WeightVector};
use crate::error::{Error, Result};
use crate::singtest::{self, Mode};

/// Bounds `d_i = μ g_i / g_{i−1}` with `g_i = gcd(μ, w_0, …, w_i)` and `g_{−1} = μ`.
pub fn shift_bounds(w: &[u64], mu: u64) -> Vec<u64> {
    let mut prev = mu;
    w.iter()
        .map(|&x| {
            let g = prev.gcd(&x);
            let d = mu / prev * g;
            prev = g;
            d
        })
        .collect()
}

/// Smallest non-negative inverse of `a` modulo `m` (`m ≥ 1`, `gcd(a, m) = 1`).
fn inverse_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

/// Normalizes `x` within its class `{x + m w}` so that `0 ≤ x_i < d_i`.
fn shift_normalize(w: &[u64], mu: u64, x: &mut [u64]) {
    let mut prev = mu;
    for i in 0..w.len() {
        let g = prev.gcd(&w[i]);
        let d = mu / prev * g;
        if x[i] >= d {
            // shifts m = t·μ/g_{i−1} leave earlier entries fixed and move x_i by multiples of d
            let step = mu / prev;
            let a = (w[i] as u128 * step as u128 % mu as u128) as u64; // = d · a'
            let q = x[i] / d;
            let mp = mu / d;
            let t = if mp == 1 {
                0
            } else {
                let a1 = (a / d) % mp;
                ((mp - q % mp) % mp) as u128 * inverse_mod(a1, mp) as u128 % mp as u128
            } as u64;
            let m = (t as u128 * step as u128 % mu as u128) as u64;
            for (xj, &wj) in x.iter_mut().zip(w) {
                *xj = ((*xj as u128 + m as u128 * wj as u128) % mu as u128) as u64;
            }
            debug_assert!(x[i] < d);
        }
        prev = g;
    }
}

/// The representative `η(κ)` of `κη` under weight shifts with `0 ≤ η(κ)_i < d_i`.
pub fn eta_normal_form(w: &WeightVector, mu: u64, eta: &[u64], kappa: u64) -> Result<TorsionRow> {
    if kappa.gcd(&mu) != 1 {
        return Err(Error::Invalid(format!("{kappa} is not a unit modulo {mu}")));
    }
    if eta.len() != w.as_slice().len() {
        return Err(Error::Invalid("row length differs from the weight vector".into()));
    }
    let mut x: Vec<u64> = eta
        .iter()
        .map(|&e| (kappa as u128 * (e % mu) as u128 % mu as u128) as u64)
        .collect();
    shift_normalize(w.as_slice(), mu, &mut x);
    TorsionRow::new(mu, x)
}

fn units(mu: u64) -> impl Iterator<Item = u64> {
    (1..mu).filter(move |k| k.gcd(&mu) == 1)
}

/// Least `η(κ)` over all units `κ`: the row-minimal member of the class of `η`.
pub fn row_minimal_form(w: &[u64], mu: u64, eta: &[u64]) -> Vec<u64> {
    let mut best: Option<Vec<u64>> = None;
    let mut x = vec![0u64; eta.len()];
    for k in units(mu) {
        for (xi, &e) in x.iter_mut().zip(eta) {
            *xi = (k as u128 * e as u128 % mu as u128) as u64;
        }
        shift_normalize(w, mu, &mut x);
        if best.as_ref().map_or(true, |b| x < *b) {
            best = Some(x.clone());
        }
    }
    best.unwrap_or_else(|| eta.to_vec())
}

/// `0 ≤ η_i < d_i` and `η ≤ η(κ)` for every unit `κ`.
pub fn is_row_minimal(w: &WeightVector, mu: u64, eta: &[u64]) -> bool {
    let d = shift_bounds(w.as_slice(), mu);
    if eta.iter().zip(&d).any(|(&e, &di)| e >= di) {
        return false;
    }
    row_minimal_form(w.as_slice(), mu, eta) == eta
}

fn smallest_prime_factor(m: u64) -> u64 {
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            return p;
        }
        p += 1;
    }
    m
}

fn generates_mod(eta: &[u64], mu: u64) -> bool {
    eta.iter().fold(mu, |g, &e| g.gcd(&e)) == 1
}

/// Candidate row over `w` passes almost-freeness and the age test.
fn admissible(w: &WeightVector, mu: u64, eta: &[u64], mode: Mode) -> bool {
    if !generates_mod(eta, mu) {
        return false;
    }
    let q = DegreeMatrix::new(w.clone(), vec![TorsionRow { mu, eta: eta.to_vec() }]).expect("well-formed row");
    // the age scan rejects most candidates and is far cheaper than the generation test
    singtest::passes(&q, mode) && q.is_almost_free()
}

/// `x` sorted inside each block of equal weights. Permuting such columns gives an
/// isomorphic matrix, so admissibility only depends on this key.
fn block_sorted(w: &[u64], x: &[u64]) -> Vec<u64> {
    let mut out = x.to_vec();
    let mut start = 0;
    while start < w.len() {
        let end = start + w[start..].iter().take_while(|&&v| v == w[start]).count();
        out[start..end].sort_unstable();
        start = end;
    }
    out
}

/// Rows for a prime modulus: `η_{i0} = 0` at the first index with `p ∤ w_{i0}` and the
/// first nonzero entry equal to one (these are exactly the row-minimal rows).
fn prime_rows(w: &WeightVector, p: u64, mode: Mode) -> Vec<Vec<u64>> {
    let ws = w.as_slice();
    let n1 = ws.len();
    let i0 = ws.iter().position(|&x| x % p != 0).expect("weights are coprime");
    let mut out = Vec::new();
    let mut x = vec![0u64; n1];
    let mut known: HashMap<Vec<u64>, bool> = HashMap::new();
    // enumerate by position of the leading one
    for lead in 0..n1 {
        if lead == i0 {
            continue;
        }
        x.iter_mut().for_each(|v| *v = 0);
        x[lead] = 1;
        let free: Vec<usize> = (lead + 1..n1).filter(|&j| j != i0).collect();
        let mut digits = vec![0u64; free.len()];
        loop {
            for (t, &j) in free.iter().enumerate() {
                x[j] = digits[t];
            }
            let key = block_sorted(ws, &x);
            let ok = match known.get(&key) {
                Some(&ok) => ok,
                None => {
                    let ok = admissible(w, p, &x, mode);
                    known.insert(key, ok);
                    ok
                }
            };
            if ok {
                out.push(x.clone());
            }
            // odometer
            let mut t = free.len();
            loop {
                if t == 0 {
                    break;
                }
                t -= 1;
                digits[t] += 1;
                if digits[t] < p {
                    break;
                }
                digits[t] = 0;
                if t == 0 {
                    t = usize::MAX;
                    break;
                }
            }
            if t == usize::MAX || free.is_empty() {
                break;
            }
        }
    }
    out
}

/// `M(w)`: all row-minimal, almost free, canonical (terminal) rows with modulus at
/// most `cap`, sorted by `(μ, η)`.
pub fn minimal_torsion_rows(w: &WeightVector, mode: Mode, cap: u64) -> Vec<TorsionRow> {
    let ws = w.as_slice();
    let n1 = ws.len();
    let mut by_mu: HashMap<u64, Vec<Vec<u64>>> = HashMap::new();
    for mu in 2..=cap {
        let p = smallest_prime_factor(mu);
        let base = mu / p;
        let rows = if base == 1 {
            prime_rows(w, p, mode)
        } else {
            let Some(prev) = by_mu.get(&base) else {
                by_mu.insert(mu, Vec::new());
                continue;
            };
            // weight shifts by multiples of `base` let us fix one lift digit where p ∤ w
            let fixed = ws.iter().position(|&x| x % p != 0).expect("weights are coprime");
            let mut seen: HashMap<Vec<u64>, bool> = HashMap::new();
            let mut found = BTreeSet::new();
            let mut x = vec![0u64; n1];
            for eta in prev {
                let radix: Vec<u64> = (0..n1).map(|j| if j == fixed { 1 } else { p }).collect();
                for t in crate::abgroup::MixedRadix::new(radix) {
                    for j in 0..n1 {
                        x[j] = eta[j] + base * t[j];
                    }
                    if !generates_mod(&x, mu) {
                        continue;
                    }
                    let rep = row_minimal_form(ws, mu, &x);
                    let key = block_sorted(ws, &rep);
                    if let Some(&ok) = seen.get(&key) {
                        if ok {
                            found.insert(rep);
                        }
                        continue;
                    }
                    let ok = admissible(w, mu, &rep, mode);
                    seen.insert(key, ok);
                    if ok {
                        found.insert(rep);
                    }
                }
            }
            found.into_iter().collect()
        };
        by_mu.insert(mu, rows);
    }
    let mut out: Vec<TorsionRow> = by_mu
        .into_iter()
        .flat_map(|(mu, rows)| rows.into_iter().map(move |eta| TorsionRow { mu, eta }))
        .collect();
    out.sort();
    out
}

/// Exhaustive `M(w)` by scanning every row in `(Z/μ)^{n+1}`; an oracle for tests.
pub fn minimal_torsion_rows_brute_force(w: &WeightVector, mode: Mode, cap: u64) -> Vec<TorsionRow> {
    let n1 = w.as_slice().len();
    let mut out = Vec::new();
    for mu in 2..=cap {
        for eta in crate::abgroup::MixedRadix::new(vec![mu; n1]) {
            if is_row_minimal(w, mu, &eta) && admissible(w, mu, &eta, mode) {
                out.push(TorsionRow { mu, eta });
            }
        }
    }
    out.sort();
    out
}
