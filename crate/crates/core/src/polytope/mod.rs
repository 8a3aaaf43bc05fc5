//! Exact rational polytopes in low dimension: H- and V-descriptions, lattice points
//! and a normal form up to invertible integer linear maps.

mod dd;
mod key;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::abgroup::IntMatrix;
use crate::error::{Error, Result};
use crate::rat::{self, Q};

pub use key::{segment_label, segment_normal_form, unimodular_key, UnimodularKey};

/// Largest ambient dimension handled.
pub const MAX_AMBIENT: usize = 6;

/// Boxes up to this many points are scanned directly; larger ones are sliced.
const BOX_SCAN_LIMIT: u64 = 1 << 16;

pub type Point = Vec<Q>;

/// `⟨x, normal⟩ ≥ offset` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<BigInt>,
    pub offset: Q,
}

impl Halfspace {
    /// Divides out the content of `normal`; a zero normal is kept as is.
    pub fn new(normal: Vec<BigInt>, offset: Q) -> Self {
        let g = normal.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() || g.is_one() {
            return Halfspace { normal, offset };
        }
        let offset = offset / Q::from_integer(g.clone());
        Halfspace {
            normal: normal.into_iter().map(|x| x / &g).collect(),
            offset,
        }
    }

    pub fn from_i64(normal: &[i64], offset: Q) -> Self {
        Self::new(normal.iter().map(|&x| BigInt::from(x)).collect(), offset)
    }

    pub fn value(&self, x: &[Q]) -> Q {
        self.normal.iter().zip(x).map(|(a, b)| b * rat::qi(a)).sum()
    }

    pub fn slack(&self, x: &[Q]) -> Q {
        self.value(x) - &self.offset
    }

    /// Integer row `(c·normal, −c·offset)` of the homogenized constraint.
    fn homogenized(&self) -> Vec<BigInt> {
        let d = self.offset.denom().clone();
        let mut row: Vec<BigInt> = self.normal.iter().map(|a| a * &d).collect();
        row.push(-self.offset.numer().clone());
        row
    }
}

/// A bounded rational polytope with both descriptions. Equations `⟨x, e⟩ = c` cut out
/// the affine hull; facets are irredundant inside it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPolytope {
    ambient: usize,
    vertices: Vec<Point>,
    facets: Vec<Halfspace>,
    equations: Vec<Halfspace>,
}

impl fmt::Display for RationalPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .vertices
            .iter()
            .map(|v| format!("({})", v.iter().map(rat::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "conv[{}]", vs.join(", "))
    }
}

/// Vertices of the bounded region `{x : ⟨x, n_i⟩ ≥ b_i}` in `R^ambient`.
pub fn vertices_of(ambient: usize, halfspaces: &[Halfspace]) -> Result<Vec<Point>> {
    if ambient > MAX_AMBIENT {
        return Err(Error::DimensionCap(ambient, MAX_AMBIENT));
    }
    let dim = ambient + 1;
    let mut rows: Vec<Vec<BigInt>> = halfspaces.iter().map(Halfspace::homogenized).collect();
    let mut t = vec![BigInt::zero(); dim];
    t[ambient] = BigInt::one();
    rows.push(t);
    let mut lineal = false;
    let rays = match dd::extreme_rays(&rows, dim) {
        Some(r) => r,
        None => {
            // restrict to the complement of the lineality space of the normals
            lineal = true;
            let normals: Vec<Vec<Q>> = halfspaces
                .iter()
                .map(|h| h.normal.iter().map(rat::qi).collect())
                .collect();
            for k in dd::kernel(&normals, ambient) {
                let mut row = k.clone();
                row.push(BigInt::zero());
                rows.push(row.clone());
                rows.push(row.into_iter().map(|x| -x).collect());
            }
            dd::extreme_rays(&rows, dim).expect("pointed after removing the lineality space")
        }
    };
    let mut verts: Vec<Point> = Vec::new();
    let mut recession = lineal;
    for r in &rays {
        let t = &r.v[ambient];
        if t.is_positive() {
            let tq = rat::qi(t);
            verts.push(r.v[..ambient].iter().map(|x| rat::qi(x) / &tq).collect());
        } else {
            recession = true;
        }
    }
    if verts.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if recession {
        return Err(Error::UnboundedRegion);
    }
    verts.sort();
    verts.dedup();
    Ok(verts)
}

fn rank_of_points(vs: &[Point]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let diffs: Vec<Vec<Q>> = vs[1..]
        .iter()
        .map(|v| v.iter().zip(&vs[0]).map(|(a, b)| a - b).collect())
        .collect();
    dd::rref(&diffs).len()
}

impl RationalPolytope {
    pub fn empty(ambient: usize) -> Self {
        RationalPolytope {
            ambient,
            vertices: Vec::new(),
            facets: Vec::new(),
            equations: Vec::new(),
        }
    }

    /// Convex hull of finitely many points.
    pub fn from_points(ambient: usize, points: &[Point]) -> Result<Self> {
        if ambient > MAX_AMBIENT {
            return Err(Error::DimensionCap(ambient, MAX_AMBIENT));
        }
        if points.iter().any(|p| p.len() != ambient) {
            return Err(Error::Invalid("point of the wrong length".into()));
        }
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            return Ok(Self::empty(ambient));
        }
        let dim = ambient + 1;
        let lifted: Vec<Vec<Q>> = pts
            .iter()
            .map(|p| {
                let mut r = p.clone();
                r.push(-Q::one());
                r
            })
            .collect();
        // (a, β) with ⟨a, x⟩ = β on every point
        let eqs = dd::kernel(&lifted, dim);
        let mut rows: Vec<Vec<BigInt>> = lifted.iter().map(|r| dd::integral(r)).collect();
        for k in &eqs {
            rows.push(k.clone());
            rows.push(k.iter().map(|x| -x).collect());
        }
        let rays = dd::extreme_rays(&rows, dim).expect("pointed once the equations are added");
        let mut facets: Vec<Halfspace> = rays
            .iter()
            .filter(|r| (0..pts.len()).any(|i| r.is_tight(i)))
            .map(|r| Halfspace::new(r.v[..ambient].to_vec(), rat::qi(&r.v[ambient])))
            .collect();
        facets.sort();
        facets.dedup();
        let equations: Vec<Halfspace> = eqs
            .iter()
            .map(|k| Halfspace::new(k[..ambient].to_vec(), rat::qi(&k[ambient])))
            .collect();
        let eq_normals: Vec<Vec<BigInt>> = equations.iter().map(|h| h.normal.clone()).collect();
        let vertices: Vec<Point> = pts
            .into_iter()
            .filter(|p| {
                let mut tight = eq_normals.clone();
                tight.extend(facets.iter().filter(|h| h.slack(p).is_zero()).map(|h| h.normal.clone()));
                dd::rank(&tight) == ambient
            })
            .collect();
        Ok(RationalPolytope {
            ambient,
            vertices,
            facets,
            equations,
        })
    }

    pub fn from_integer_points(ambient: usize, points: &[Vec<i64>]) -> Result<Self> {
        let pts: Vec<Point> = points.iter().map(|p| p.iter().map(|&x| rat::q(x)).collect()).collect();
        Self::from_points(ambient, &pts)
    }

    /// The polytope cut out by `halfspaces`; empty and unbounded regions are errors.
    pub fn from_halfspaces(ambient: usize, halfspaces: &[Halfspace]) -> Result<Self> {
        let vs = vertices_of(ambient, halfspaces)?;
        Self::from_points(ambient, &vs)
    }

    /// Simplex spanned by the columns of `p`.
    pub fn from_columns(p: &IntMatrix) -> Result<Self> {
        let pts: Vec<Point> = (0..p.cols())
            .map(|j| p.column(j).iter().map(rat::qi).collect())
            .collect();
        Self::from_points(p.rows(), &pts)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn equations(&self) -> &[Halfspace] {
        &self.equations
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension of the affine hull, `-1` when empty.
    pub fn dim(&self) -> i32 {
        if self.is_empty() {
            -1
        } else {
            rank_of_points(&self.vertices) as i32
        }
    }

    /// All facet and equation constraints as halfspaces (equations twice).
    pub fn halfspaces(&self) -> Vec<Halfspace> {
        let mut out = self.facets.clone();
        for e in &self.equations {
            out.push(e.clone());
            out.push(Halfspace::new(e.normal.iter().map(|x| -x).collect(), -e.offset.clone()));
        }
        out
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        !self.is_empty()
            && self.equations.iter().all(|e| e.slack(x).is_zero())
            && self.facets.iter().all(|h| !h.slack(x).is_negative())
    }

    /// Membership in the relative interior.
    pub fn contains_relint(&self, x: &[Q]) -> bool {
        !self.is_empty()
            && self.equations.iter().all(|e| e.slack(x).is_zero())
            && self.facets.iter().all(|h| h.slack(x).is_positive())
    }

    /// `min ⟨x, v⟩` over the polytope.
    pub fn ord(&self, v: &[BigInt]) -> Option<Q> {
        self.vertices
            .iter()
            .map(|x| x.iter().zip(v).map(|(a, b)| a * rat::qi(b)).sum::<Q>())
            .min()
    }

    /// Image under the linear map `u`.
    pub fn map_linear(&self, u: &IntMatrix) -> Result<Self> {
        let pts: Vec<Point> = self
            .vertices
            .iter()
            .map(|x| {
                (0..u.rows())
                    .map(|i| u.row(i).iter().zip(x).map(|(a, b)| b * rat::qi(a)).sum())
                    .collect()
            })
            .collect();
        Self::from_points(u.rows(), &pts)
    }

    /// Lattice points, or those in the relative interior, in ascending order.
    pub fn lattice_points(&self, interior_only: bool) -> Vec<Vec<BigInt>> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut hs: Vec<(Halfspace, bool)> = self.facets.iter().map(|h| (h.clone(), interior_only)).collect();
        for e in &self.equations {
            hs.push((e.clone(), false));
            hs.push((Halfspace::new(e.normal.iter().map(|x| -x).collect(), -e.offset.clone()), false));
        }
        let mut out = Vec::new();
        lattice_points_in(self.ambient, &hs, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

fn satisfied(h: &Halfspace, strict: bool, x: &[BigInt]) -> bool {
    let v: BigInt = h.normal.iter().zip(x).map(|(a, b)| a * b).sum();
    let v = rat::qi(&v);
    if strict {
        v > h.offset
    } else {
        v >= h.offset
    }
}

/// Integer points of `{⟨x, n⟩ ≥ b}` (strict where flagged), slicing along the first
/// coordinate when the bounding box is large.
fn lattice_points_in(d: usize, hs: &[(Halfspace, bool)], prefix: &mut Vec<BigInt>, out: &mut Vec<Vec<BigInt>>) {
    if d == 0 {
        if hs.iter().all(|(h, s)| if *s { h.offset.is_negative() } else { !h.offset.is_positive() }) {
            out.push(prefix.clone());
        }
        return;
    }
    let closed: Vec<Halfspace> = hs.iter().map(|(h, _)| h.clone()).collect();
    let Ok(vs) = vertices_of(d, &closed) else {
        return;
    };
    let lo: Vec<BigInt> = (0..d).map(|j| vs.iter().map(|v| v[j].ceil().to_integer()).min().unwrap()).collect();
    let hi: Vec<BigInt> = (0..d).map(|j| vs.iter().map(|v| v[j].floor().to_integer()).max().unwrap()).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return;
    }
    let size = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (b - a + 1u32).to_u64().unwrap_or(u64::MAX))
        .fold(1u64, |acc, s| acc.saturating_mul(s));
    if size <= BOX_SCAN_LIMIT {
        let radix: Vec<u64> = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1u32).to_u64().unwrap()).collect();
        for off in crate::abgroup::MixedRadix::new(radix) {
            let x: Vec<BigInt> = lo.iter().zip(&off).map(|(a, &o)| a + o).collect();
            if hs.iter().all(|(h, s)| satisfied(h, *s, &x)) {
                let mut p = prefix.clone();
                p.extend(x);
                out.push(p);
            }
        }
        return;
    }
    let mut c = lo[0].clone();
    while c <= hi[0] {
        let cq = rat::qi(&c);
        let section: Vec<(Halfspace, bool)> = hs
            .iter()
            .map(|(h, s)| {
                let off = &h.offset - &cq * rat::qi(&h.normal[0]);
                (Halfspace::new(h.normal[1..].to_vec(), off), *s)
            })
            .collect();
        prefix.push(c.clone());
        lattice_points_in(d - 1, &section, prefix, out);
        prefix.pop();
        c += 1;
    }
}
