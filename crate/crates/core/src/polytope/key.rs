//! Normal form of a rational polytope under `GL(n, Z)` acting linearly.
//!
//! After scaling by the common denominator `L` the vertices form an integer matrix `V`
//! (one column per vertex). For a fixed column order the Hermite form of `V` under
//! unimodular row operations is unique, and its first `k` columns are the Hermite
//! form of the first `k` columns of `V`. The key is `L` together with the
//! column-major least Hermite form over all column orders, found by extending the
//! least prefixes one column at a time.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::RationalPolytope;
use crate::rat::{self, Q};

/// Canonical string of a polytope up to invertible integer linear maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnimodularKey(String);

impl UnimodularKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UnimodularKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Remaining vertices after the row operations so far, with the pivot count.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Partial {
    rank: usize,
    rest: Vec<Vec<BigInt>>,
}

impl Partial {
    /// Places `rest[j]` as the next column: returns the reduced column and the state
    /// with the row operations applied to the other vertices.
    fn place(&self, j: usize) -> (Vec<BigInt>, Partial) {
        let mut rest = self.rest.clone();
        let mut col = rest.remove(j);
        let n = col.len();
        let r = self.rank;
        // row operation on rows a, b: (a, b) ← (a − f·b, b)
        let sub = |vs: &mut Vec<Vec<BigInt>>, col: &mut Vec<BigInt>, a: usize, b: usize, f: &BigInt| {
            let t = &col[b] * f;
            col[a] -= t;
            for v in vs.iter_mut() {
                let t = &v[b] * f;
                v[a] -= t;
            }
        };
        loop {
            let piv = (r..n).filter(|&i| !col[i].is_zero()).min_by_key(|&i| col[i].abs());
            let Some(p) = piv else { break };
            col.swap(r, p);
            for v in rest.iter_mut() {
                v.swap(r, p);
            }
            let mut done = true;
            for i in r + 1..n {
                if !col[i].is_zero() {
                    let f = col[i].div_floor(&col[r]);
                    sub(&mut rest, &mut col, i, r, &f);
                    if !col[i].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < n && !col[r].is_zero() {
            if col[r].is_negative() {
                col[r] = -col[r].clone();
                for v in rest.iter_mut() {
                    v[r] = -v[r].clone();
                }
            }
            for i in 0..r {
                let f = col[i].div_floor(&col[r]);
                if !f.is_zero() {
                    sub(&mut rest, &mut col, i, r, &f);
                }
            }
            (col, Partial { rank: r + 1, rest })
        } else {
            (col, Partial { rank: r, rest })
        }
    }
}

/// Key of `p` up to `GL(n, Z)`; translations are not allowed.
pub fn unimodular_key(p: &RationalPolytope) -> UnimodularKey {
    if p.is_empty() {
        return UnimodularKey("empty".into());
    }
    let l = rat::lcd(p.vertices().iter().flatten());
    let lq = Q::from_integer(l.clone());
    let cols: Vec<Vec<BigInt>> = p
        .vertices()
        .iter()
        .map(|v| v.iter().map(|x| (x * &lq).to_integer()).collect())
        .collect();
    let mut states: BTreeSet<Partial> = BTreeSet::new();
    states.insert(Partial { rank: 0, rest: cols.clone() });
    let mut form: Vec<Vec<BigInt>> = Vec::new();
    for _ in 0..cols.len() {
        let mut best: Option<Vec<BigInt>> = None;
        let mut next: BTreeSet<Partial> = BTreeSet::new();
        for st in &states {
            for j in 0..st.rest.len() {
                let (col, child) = st.place(j);
                match best.as_ref().map(|b| col.cmp(b)) {
                    Some(std::cmp::Ordering::Greater) => continue,
                    Some(std::cmp::Ordering::Less) | None => {
                        best = Some(col);
                        next.clear();
                    }
                    Some(std::cmp::Ordering::Equal) => {}
                }
                next.insert(child);
            }
        }
        form.push(best.expect("a vertex remains"));
        states = next;
    }
    let rank = states.iter().next().map_or(0, |s| s.rank);
    let body: Vec<String> = form
        .iter()
        .map(|c| c[..rank].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    UnimodularKey(format!("{}:{}|{}", rank, l, body.join(";")))
}

/// `(p, q)` with `0 ≤ p ≤ q` when `s` is a segment `[−p, q]·d` through the origin
/// along a primitive lattice direction `d`, up to sign.
pub fn segment_normal_form(s: &RationalPolytope) -> Option<(Q, Q)> {
    if s.dim() != 1 {
        return None;
    }
    let a = &s.vertices()[0];
    let b = &s.vertices()[1];
    let diff: Vec<Q> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let d = super::dd::integral(&diff);
    let k = d.iter().position(|x| !x.is_zero())?;
    let dk = rat::qi(&d[k]);
    let ta = &a[k] / &dk;
    let tb = &b[k] / &dk;
    // both endpoints must be multiples of d
    let on_line = |x: &[Q], t: &Q| x.iter().zip(&d).all(|(xi, di)| *xi == t * rat::qi(di));
    if !on_line(a, &ta) || !on_line(b, &tb) {
        return None;
    }
    let (lo, hi) = if ta < tb { (ta, tb) } else { (tb, ta) };
    if lo.is_positive() || hi.is_negative() {
        return None;
    }
    let (p, q) = (-lo, hi);
    Some(if p <= q { (p, q) } else { (q, p) })
}

/// `[-p, q]` as written in tables of segments, e.g. `[-1/3, 1/2]` or `[0, 1/4]`.
pub fn segment_label(p: &Q, q: &Q) -> String {
    let left = if p.is_zero() { "0".to_string() } else { format!("-{}", rat::to_string(p)) };
    format!("[{}, {}]", left, rat::to_string(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::IntMatrix;
    use crate::rat::q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fr(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn segment(lo: Q, hi: Q, n: usize) -> RationalPolytope {
        let mut a = vec![q(0); n];
        let mut b = vec![q(0); n];
        a[0] = lo;
        b[0] = hi;
        RationalPolytope::from_points(n, &[a, b]).unwrap()
    }

    pub(crate) fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        for _ in 0..3 * n {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                let s = rng.gen_range(0..2);
                if s == 1 {
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

    #[test]
    fn negation_and_translation() {
        let a = segment(fr(-1, 2), fr(2, 3), 4);
        let b = segment(fr(-2, 3), fr(1, 2), 4);
        assert_eq!(unimodular_key(&a), unimodular_key(&b));
        let c = segment(fr(-1, 4), fr(1, 4), 4);
        let d = segment(q(0), fr(1, 2), 4);
        assert_ne!(unimodular_key(&c), unimodular_key(&d));
    }

    #[test]
    fn segment_forms() {
        let s = segment(fr(-2, 3), fr(1, 3), 2);
        let (p, q_) = segment_normal_form(&s).unwrap();
        assert_eq!((p.clone(), q_.clone()), (fr(1, 3), fr(2, 3)));
        assert_eq!(segment_label(&p, &q_), "[-1/3, 2/3]");
        assert_eq!(segment_label(&q(0), &fr(1, 4)), "[0, 1/4]");
        // a slanted segment along the primitive direction (1, 2)
        let t = RationalPolytope::from_points(2, &[vec![fr(-1, 2), q(-1)], vec![fr(1, 4), fr(1, 2)]]).unwrap();
        assert_eq!(segment_normal_form(&t), Some((fr(1, 4), fr(1, 2))));
    }

    #[test]
    fn key_is_invariant_under_random_unimodular_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..40 {
                let pts: Vec<Vec<Q>> = (0..rng.gen_range(1..=n + 3))
                    .map(|_| (0..n).map(|_| fr(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect())
                    .collect();
                let p = RationalPolytope::from_points(n, &pts).unwrap();
                let u = random_unimodular(&mut rng, n);
                let up = p.map_linear(&u).unwrap();
                assert_eq!(unimodular_key(&p), unimodular_key(&up), "{p} vs {up}");
            }
        }
    }

    #[test]
    fn scaling_changes_the_key() {
        let a = RationalPolytope::from_integer_points(2, &[vec![1, 0], vec![0, 1], vec![-1, -1]]).unwrap();
        let pts: Vec<Vec<Q>> = a.vertices().iter().map(|v| v.iter().map(|x| x * fr(1, 2)).collect()).collect();
        let b = RationalPolytope::from_points(2, &pts).unwrap();
        assert_ne!(unimodular_key(&a), unimodular_key(&b));
    }
}
