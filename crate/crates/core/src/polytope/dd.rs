//! Double description for pointed polyhedral cones `{y : A y ≥ 0}` over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::{self, Q};

/// Bit set over constraint indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|x| x.count_ones()).sum()
    }

    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

/// Row-reduced echelon basis of the row space, as rationals.
pub(crate) fn rref(rows: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut a: Vec<Vec<Q>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x /= &piv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Basis of `{x : M x = 0}`, canonical (from the reduced echelon form) and integral.
pub(crate) fn kernel(rows: &[Vec<Q>], cols: usize) -> Vec<Vec<BigInt>> {
    let e = rref(rows);
    let pivots: Vec<usize> = e
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero echelon row"))
        .collect();
    let mut out = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[f] = Q::one();
        for (r, &p) in e.iter().zip(&pivots) {
            v[p] = -r[f].clone();
        }
        out.push(integral(&v));
    }
    out
}

/// Positive multiple of a rational vector that is a primitive integer vector.
pub(crate) fn integral(v: &[Q]) -> Vec<BigInt> {
    let l = rat::lcd(v);
    primitive(v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect())
}

pub(crate) fn rank(rows: &[Vec<BigInt>]) -> usize {
    let q: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(rat::qi).collect()).collect();
    rref(&q).len()
}

/// An extreme ray with the set of constraints it makes tight.
#[derive(Clone, Debug)]
pub(crate) struct Ray {
    pub v: Vec<BigInt>,
    tight: Bits,
}

impl Ray {
    pub fn is_tight(&self, i: usize) -> bool {
        self.tight.0[i / 64] >> (i % 64) & 1 == 1
    }
}

/// Extreme rays of `{y : A y ≥ 0}`; `None` when `A` does not have full column rank
/// (the cone has a lineality space).
pub(crate) fn extreme_rays(a: &[Vec<BigInt>], dim: usize) -> Option<Vec<Ray>> {
    let m = a.len();
    // greedy basis of rows
    let mut basis: Vec<usize> = Vec::new();
    let mut echelon: Vec<Vec<Q>> = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut trial = echelon.clone();
        trial.push(row.iter().map(rat::qi).collect());
        let r = rref(&trial);
        if r.len() > echelon.len() {
            echelon = r;
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    if basis.len() < dim {
        return None;
    }
    let b: Vec<Vec<Q>> = basis.iter().map(|&i| a[i].iter().map(rat::qi).collect()).collect();
    let inv = rat::inverse(&b).expect("independent rows");
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vec<Q> = inv.iter().map(|r| r[j].clone()).collect();
            let mut tight = Bits::new(m);
            for (t, &i) in basis.iter().enumerate() {
                if t != j {
                    tight.set(i);
                }
            }
            Ray { v: integral(&col), tight }
        })
        .collect();
    let in_basis: Vec<bool> = (0..m).map(|i| basis.contains(&i)).collect();
    for (i, row) in a.iter().enumerate() {
        if in_basis[i] {
            continue;
        }
        let s: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (r, si) in rays.iter().zip(&s) {
            if !si.is_negative() {
                let mut r = r.clone();
                if si.is_zero() {
                    r.tight.set(i);
                }
                next.push(r);
            }
        }
        for (p, sp) in rays.iter().zip(&s) {
            if !sp.is_positive() {
                continue;
            }
            for (n, sn) in rays.iter().zip(&s) {
                if !sn.is_negative() {
                    continue;
                }
                let common = p.tight.and(&n.tight);
                if (common.count() as usize) + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .all(|r| std::ptr::eq(r, p) || std::ptr::eq(r, n) || !common.subset_of(&r.tight));
                if !adjacent {
                    continue;
                }
                let v: Vec<BigInt> = p.v.iter().zip(&n.v).map(|(x, y)| sp * y - sn * x).collect();
                let mut tight = common;
                tight.set(i);
                next.push(Ray { v: primitive(v), tight });
            }
        }
        rays = next;
    }
    Some(rays)
}
