//! Fine interiors of lattice polytopes and the invariants read off from them.
//!
//! `F(Δ)` is the intersection of `⟨x, v⟩ ≥ ord_Δ(v) + 1` over nonzero integer `v`.
//! Starting from the facet constraints moved inwards by one, every round looks for
//! directions whose constraint still cuts the current polytope `F_k`. Such a `v`
//! satisfies `⟨u − w, v⟩ < 1` for some vertex `u` of `F_k` and every vertex `w` of
//! `Δ`, a bounded region since `u` lies in the interior. Each round adds, per vertex
//! of `F_k`, the direction cutting deepest there; rounds stop when none cuts.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::abgroup::IntMatrix;
use crate::error::{Error, Result};
use crate::polytope::{self, Halfspace, Point, RationalPolytope};
use crate::rat::{self, Q};

/// Largest dimension accepted by [`fine_interior`].
pub const DEFAULT_MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FineResult {
    pub polytope: RationalPolytope,
    /// Primitive directions whose constraints were used, facet normals first.
    pub certificate: Vec<Vec<BigInt>>,
}

impl FineResult {
    /// `-1` when empty.
    pub fn dim(&self) -> i32 {
        self.polytope.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.polytope.is_empty()
    }
}

/// `min ⟨x, v⟩` over `Δ`.
pub fn ord(delta: &RationalPolytope, v: &[BigInt]) -> Q {
    delta.ord(v).expect("nonempty polytope")
}

pub fn fine_interior(delta: &RationalPolytope) -> Result<FineResult> {
    fine_interior_with_cap(delta, DEFAULT_MAX_DIM)
}

/// Fine interior of the simplex spanned by the columns of `p`.
pub fn fine_interior_of_columns(p: &IntMatrix) -> Result<FineResult> {
    fine_interior(&RationalPolytope::from_columns(p)?)
}

pub fn fine_interior_with_cap(delta: &RationalPolytope, max_dim: usize) -> Result<FineResult> {
    let n = delta.ambient();
    if n > max_dim {
        return Err(Error::DimensionCap(n, max_dim));
    }
    if delta.dim() != n as i32 {
        return Err(Error::Invalid(format!("polytope {delta} is not full-dimensional")));
    }
    if delta.vertices().iter().flatten().any(|x| !x.is_integer()) {
        return Err(Error::Invalid(format!("polytope {delta} is not a lattice polytope")));
    }
    let mut cons: Vec<Halfspace> = delta
        .facets()
        .iter()
        .map(|h| Halfspace::new(h.normal.clone(), &h.offset + Q::one()))
        .collect();
    let mut certificate: Vec<Vec<BigInt>> = cons.iter().map(|h| h.normal.clone()).collect();
    loop {
        let us = match polytope::vertices_of(n, &cons) {
            Ok(us) => us,
            Err(Error::EmptyRegion) => {
                return Ok(FineResult {
                    polytope: RationalPolytope::empty(n),
                    certificate,
                })
            }
            Err(e) => return Err(e),
        };
        let cuts: BTreeSet<Vec<BigInt>> = us.iter().filter_map(|u| deepest_cut(delta, u)).collect();
        if cuts.is_empty() {
            return Ok(FineResult {
                polytope: RationalPolytope::from_points(n, &us)?,
                certificate,
            });
        }
        // constraints slack at every vertex are implied by the rest
        cons.retain(|h| us.iter().any(|u| h.slack(u).is_zero()));
        for v in cuts {
            let o = ord(delta, &v) + Q::one();
            certificate.push(v.clone());
            cons.push(Halfspace::new(v, o));
        }
    }
}

/// The primitive `v` whose shifted halfspace `⟨x, v⟩ ≥ ord_Δ(v) + 1` is violated most
/// at `u`, the first in enumeration order on ties. These are the lattice points with
/// `⟨w − u, v⟩ > −1` for every vertex `w` of `Δ`.
fn deepest_cut(delta: &RationalPolytope, u: &Point) -> Option<Vec<BigInt>> {
    deepest_cut_small(delta, u).unwrap_or_else(|| deepest_cut_exact(delta, u))
}

/// With `L` the common denominator of `u` the region is `⟨L w − L u, v⟩ ≥ 1 − L`, and
/// `L · depth = min_w ⟨L w − L u, v⟩ + L`. `None` if anything leaves `i128`.
fn deepest_cut_small(delta: &RationalPolytope, u: &Point) -> Option<Option<Vec<BigInt>>> {
    let l = rat::lcd(u);
    let big_u: Vec<BigInt> = u.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let l = i128::try_from(&l).ok()?;
    let mut rows = Vec::with_capacity(delta.vertices().len());
    for w in delta.vertices() {
        let mut a = Vec::with_capacity(w.len());
        for (x, y) in w.iter().zip(&big_u) {
            a.push(i128::try_from(&(x.to_integer() * l - y)).ok()?);
        }
        rows.push(a);
    }
    let system: Vec<(Vec<i128>, i128)> = rows.iter().map(|a| (a.clone(), 1 - l)).collect();
    let mut best: Option<(i128, Vec<i128>)> = None;
    let mut overflow = false;
    let complete = lattice::for_each_point(&system, &mut |v: &[i128]| {
        if v.iter().all(|&x| x == 0) {
            return;
        }
        let mut m = i128::MAX;
        for a in &rows {
            match a.iter().zip(v).try_fold(0i128, |s, (x, y)| s.checked_add(x.checked_mul(*y)?)) {
                Some(d) => m = m.min(d),
                None => {
                    overflow = true;
                    return;
                }
            }
        }
        let depth = m + l;
        if depth <= 0 || best.as_ref().is_some_and(|(d, _)| *d >= depth) {
            return;
        }
        if v.iter().fold(0i128, |g, &x| g.gcd(&x)) == 1 {
            best = Some((depth, v.to_vec()));
        }
    });
    if !complete || overflow {
        return None;
    }
    Some(best.map(|(_, v)| v.into_iter().map(BigInt::from).collect()))
}

fn deepest_cut_exact(delta: &RationalPolytope, u: &Point) -> Option<Vec<BigInt>> {
    let n = delta.ambient();
    let hs: Vec<Halfspace> = delta
        .vertices()
        .iter()
        .map(|w| {
            let diff: Vec<Q> = w.iter().zip(u).map(|(a, b)| a - b).collect();
            let l = Q::from_integer(rat::lcd(&diff));
            let normal = diff.iter().map(|x| (x * &l).to_integer()).collect();
            Halfspace::new(normal, -l)
        })
        .collect();
    let region = match RationalPolytope::from_halfspaces(n, &hs) {
        Ok(r) => r,
        Err(Error::EmptyRegion) => return None,
        Err(e) => panic!("candidate region around an interior point is bounded: {e}"),
    };
    let mut best: Option<(Q, Vec<BigInt>)> = None;
    for v in region.lattice_points(false) {
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        let at_u: Q = u.iter().zip(&v).map(|(a, b)| a * rat::qi(b)).sum();
        let depth = ord(delta, &v) + Q::one() - at_u;
        if !depth.is_positive() || best.as_ref().is_some_and(|(d, _)| *d >= depth) {
            continue;
        }
        if v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one() {
            best = Some((depth, v));
        }
    }
    best.map(|(_, v)| v)
}

/// Lattice points of `{x : ⟨a, x⟩ ≥ c}` by nested loops, with coordinate bounds from
/// Fourier–Motzkin projections.
mod lattice {
    use num_integer::Integer;

    type Row = (Vec<i128>, i128);

    fn normalize(a: Vec<i128>, c: i128) -> Row {
        let g = a.iter().fold(0i128, |g, x| g.gcd(x));
        if g <= 1 {
            return (a, c);
        }
        // integer points satisfy ⟨a/g, x⟩ ≥ ⌈c/g⌉
        (a.into_iter().map(|x| x / g).collect(), Integer::div_ceil(&c, &g))
    }

    /// Drops the last variable. `None` on overflow.
    fn eliminate_last(rows: &[Row]) -> Option<Vec<Row>> {
        let k = rows.first()?.0.len() - 1;
        let mut out: Vec<Row> = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for r in rows {
            match r.0[k].signum() {
                0 => out.push((r.0[..k].to_vec(), r.1)),
                1 => pos.push(r),
                _ => neg.push(r),
            }
        }
        for p in &pos {
            for q in &neg {
                let (sp, sq) = (-q.0[k], p.0[k]);
                let mut a = Vec::with_capacity(k);
                for j in 0..k {
                    a.push(p.0[j].checked_mul(sp)?.checked_add(q.0[j].checked_mul(sq)?)?);
                }
                let c = p.1.checked_mul(sp)?.checked_add(q.1.checked_mul(sq)?)?;
                out.push(normalize(a, c));
            }
        }
        out.sort();
        out.dedup();
        Some(out)
    }

    /// Calls `f` on every lattice point. Returns false if the region is unbounded
    /// or a projection overflows; `f` may then have seen only some of the points.
    pub fn for_each_point(system: &[Row], f: &mut dyn FnMut(&[i128])) -> bool {
        let n = match system.first() {
            Some(r) => r.0.len(),
            None => return false,
        };
        // levels[k] constrains the first k + 1 coordinates
        let mut levels: Vec<Vec<Row>> = vec![system.iter().map(|(a, c)| normalize(a.clone(), *c)).collect()];
        for _ in 1..n {
            match eliminate_last(levels.last().expect("nonempty")) {
                Some(rows) => levels.push(rows),
                None => return false,
            }
        }
        levels.reverse();
        let mut x = vec![0i128; n];
        walk(&levels, 0, &mut x, f)
    }

    fn walk(levels: &[Vec<Row>], k: usize, x: &mut Vec<i128>, f: &mut dyn FnMut(&[i128])) -> bool {
        let (mut lo, mut hi) = (i128::MIN, i128::MAX);
        for (a, c) in &levels[k] {
            let mut rest = *c;
            for j in 0..k {
                match a[j].checked_mul(x[j]).and_then(|t| rest.checked_sub(t)) {
                    Some(r) => rest = r,
                    None => return false,
                }
            }
            // a_k x_k ≥ rest
            match a[k].signum() {
                1 => lo = lo.max(Integer::div_ceil(&rest, &a[k])),
                -1 => hi = hi.min(Integer::div_floor(&rest, &a[k])),
                _ if rest > 0 => return true,
                _ => {}
            }
        }
        if lo == i128::MIN || hi == i128::MAX {
            return false;
        }
        for v in lo..=hi {
            x[k] = v;
            if k + 1 == x.len() {
                f(x);
            } else if !walk(levels, k + 1, x, f) {
                return false;
            }
        }
        true
    }
}

/// Kodaira dimension `min(dim F, n − 1)`; `None` when `F` is empty, i.e. there is no
/// canonical model.
pub fn kodaira_dimension(fine: &FineResult, n: usize) -> Option<usize> {
    if fine.is_empty() {
        None
    } else {
        Some((fine.dim() as usize).min(n.saturating_sub(1)))
    }
}

/// `⌊m p⌋ + ⌊m q⌋ + 1` for the segment `[−p, q]`.
pub fn plurigenus(p: &Q, q: &Q, m: u64) -> BigInt {
    let mq = Q::from_integer(BigInt::from(m));
    assert!(!p.is_negative() && !q.is_negative(), "segment endpoints in normal form");
    (&mq * p).floor().to_integer() + (&mq * q).floor().to_integer() + BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    fn fr(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn ord_values() {
        let seg = RationalPolytope::from_integer_points(1, &[vec![-1], vec![1]]).unwrap();
        assert_eq!(ord(&seg, &big(&[1])), q(-1));
        let p2 = RationalPolytope::from_integer_points(2, &[vec![1, 0], vec![0, 1], vec![-1, -1]]).unwrap();
        assert_eq!(ord(&p2, &big(&[1, 0])), q(-1));
        assert_eq!(ord(&p2, &big(&[2, 0])), q(-2));
    }

    #[test]
    fn reflexive_cases_give_the_origin() {
        let seg = RationalPolytope::from_integer_points(1, &[vec![-1], vec![1]]).unwrap();
        let f = fine_interior(&seg).unwrap();
        assert_eq!(f.polytope.vertices(), &[vec![q(0)]]);
        let p2 = RationalPolytope::from_integer_points(2, &[vec![1, 0], vec![0, 1], vec![-1, -1]]).unwrap();
        let f = fine_interior(&p2).unwrap();
        assert_eq!(f.dim(), 0);
        assert_eq!(kodaira_dimension(&f, 2), Some(0));
    }

    #[test]
    fn empty_for_hollow_polytopes() {
        let t = RationalPolytope::from_integer_points(2, &[vec![0, 0], vec![2, 0], vec![0, 2]]).unwrap();
        let f = fine_interior(&t).unwrap();
        assert!(f.is_empty());
        assert_eq!(kodaira_dimension(&f, 2), None);
    }

    #[test]
    fn two_interior_points() {
        // weights (1,1,3): the interior points are (0,0) and (0,−1)
        let t = RationalPolytope::from_integer_points(2, &[vec![1, 0], vec![0, 1], vec![-1, -3]]).unwrap();
        let f = fine_interior(&t).unwrap();
        let hull = RationalPolytope::from_integer_points(2, &[vec![0, 0], vec![0, -1]]).unwrap();
        assert_eq!(f.polytope, hull);
        assert_eq!(kodaira_dimension(&f, 2), Some(1));
        for v in &f.certificate {
            assert!(v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one());
        }
    }

    #[test]
    fn plurigenera() {
        assert_eq!(plurigenus(&fr(1, 2), &fr(1, 2), 1), BigInt::from(1));
        assert_eq!(plurigenus(&fr(1, 2), &fr(1, 2), 2), BigInt::from(3));
        assert_eq!(plurigenus(&q(0), &fr(1, 4), 4), BigInt::from(2));
    }

    #[test]
    fn dimension_cap() {
        let pts: Vec<Vec<i64>> = (0..6)
            .map(|i| (0..5).map(|j| if i == j { 1 } else if i == 5 { -1 } else { 0 }).collect())
            .collect();
        let d = RationalPolytope::from_integer_points(5, &pts).unwrap();
        assert!(matches!(fine_interior(&d), Err(Error::DimensionCap(5, 4))));
        assert_eq!(fine_interior_with_cap(&d, 5).unwrap().dim(), 0);
    }
}
