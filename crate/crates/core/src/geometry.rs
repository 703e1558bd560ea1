//! Vectors in F_q^d, the distance form ‖x‖ = Σ x_i², the cone form, the
//! zero sphere S₀, the cone C_n, and distance sets.
//!
//! A vector is a slice of [`FqElem`]. Its *vector index* is the base-q number
//! with the first coordinate as the most significant digit, so sorting by
//! index is lexicographic order on coordinates.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqElem};

/// Enumeration guardrail for full-space scans.
pub const ENUMERATION_CAP: u128 = 10_000_000;

pub type VecFq = Vec<FqElem>;

/// q^d, saturating at u128::MAX.
pub fn space_size(ctx: &FieldCtx, d: usize) -> u128 {
    (ctx.q() as u128).saturating_pow(d as u32)
}

pub(crate) fn check_enumeration(ctx: &FieldCtx, d: usize, cap: u128) -> Result<u64> {
    let size = space_size(ctx, d);
    if size > cap {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    Ok(size as u64)
}

pub fn vec_index(ctx: &FieldCtx, v: &[FqElem]) -> u64 {
    let q = ctx.q() as u64;
    v.iter().fold(0u64, |acc, x| acc * q + x.idx() as u64)
}

pub fn vec_from_index(ctx: &FieldCtx, d: usize, idx: u64) -> VecFq {
    let mut out = vec![FqElem::ZERO; d];
    write_vec_from_index(ctx, idx, &mut out);
    out
}

pub(crate) fn write_vec_from_index(ctx: &FieldCtx, mut idx: u64, out: &mut [FqElem]) {
    let q = ctx.q() as u64;
    for slot in out.iter_mut().rev() {
        *slot = FqElem((idx % q) as u32);
        idx /= q;
    }
}

pub fn dot(ctx: &FieldCtx, u: &[FqElem], v: &[FqElem]) -> FqElem {
    u.iter()
        .zip(v)
        .fold(FqElem::ZERO, |acc, (&a, &b)| ctx.add(acc, ctx.mul(a, b)))
}

pub fn sub_vec(ctx: &FieldCtx, u: &[FqElem], v: &[FqElem]) -> VecFq {
    u.iter().zip(v).map(|(&a, &b)| ctx.sub(a, b)).collect()
}

pub fn add_vec(ctx: &FieldCtx, u: &[FqElem], v: &[FqElem]) -> VecFq {
    u.iter().zip(v).map(|(&a, &b)| ctx.add(a, b)).collect()
}

pub fn scale_vec(ctx: &FieldCtx, c: FqElem, v: &[FqElem]) -> VecFq {
    v.iter().map(|&a| ctx.mul(c, a)).collect()
}

/// ‖v‖ = v_1² + … + v_d².
#[inline]
pub fn norm(ctx: &FieldCtx, v: &[FqElem]) -> FqElem {
    v.iter()
        .fold(FqElem::ZERO, |acc, &x| ctx.add(acc, ctx.square(x)))
}

/// ‖x − y‖ without allocating the difference.
#[inline]
pub fn distance(ctx: &FieldCtx, x: &[FqElem], y: &[FqElem]) -> FqElem {
    x.iter().zip(y).fold(FqElem::ZERO, |acc, (&a, &b)| {
        ctx.add(acc, ctx.square(ctx.sub(a, b)))
    })
}

/// ‖x‖_{C_n} = x_1² + … + x_{n−1}² − x_n².
pub fn cone_norm(ctx: &FieldCtx, x: &[FqElem]) -> Result<FqElem> {
    let n = x.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall { got: n, min: 2 });
    }
    Ok(ctx.sub(norm(ctx, &x[..n - 1]), ctx.square(x[n - 1])))
}

/// A deduplicated set of points of F_q^d kept in lexicographic order.
#[derive(Clone, Debug)]
pub struct PointSet {
    ctx: Arc<FieldCtx>,
    dim: usize,
    coords: Vec<FqElem>,
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.dim == other.dim && self.coords == other.coords
    }
}

impl Eq for PointSet {}

impl PointSet {
    pub fn new<I>(ctx: Arc<FieldCtx>, dim: usize, points: I) -> Result<PointSet>
    where
        I: IntoIterator<Item = VecFq>,
    {
        if dim == 0 {
            return Err(Error::DimensionTooSmall { got: 0, min: 1 });
        }
        let mut rows = Vec::new();
        for v in points {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(v.len(), dim));
            }
            if let Some(bad) = v.iter().find(|x| x.idx() >= ctx.q()) {
                return Err(Error::InvalidElement(bad.idx() as u64));
            }
            rows.push(v);
        }
        rows.sort_unstable();
        rows.dedup();
        Ok(PointSet {
            coords: rows.concat(),
            ctx,
            dim,
        })
    }

    /// Builds a set from vector indices (duplicates are dropped).
    pub fn from_indices<I>(ctx: Arc<FieldCtx>, dim: usize, indices: I) -> Result<PointSet>
    where
        I: IntoIterator<Item = u64>,
    {
        if dim == 0 {
            return Err(Error::DimensionTooSmall { got: 0, min: 1 });
        }
        let size = space_size(&ctx, dim);
        let mut idx: Vec<u64> = indices.into_iter().collect();
        if let Some(&bad) = idx.iter().find(|&&i| i as u128 >= size) {
            return Err(Error::InvalidElement(bad));
        }
        idx.sort_unstable();
        idx.dedup();
        let mut coords = vec![FqElem::ZERO; idx.len() * dim];
        for (chunk, &i) in coords.chunks_mut(dim).zip(&idx) {
            write_vec_from_index(&ctx, i, chunk);
        }
        Ok(PointSet { ctx, dim, coords })
    }

    /// All of F_q^d.
    pub fn full_space(ctx: Arc<FieldCtx>, dim: usize) -> Result<PointSet> {
        let n = check_enumeration(&ctx, dim, ENUMERATION_CAP)?;
        PointSet::from_indices(ctx, dim, 0..n)
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn field(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[FqElem] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::Chunks<'_, FqElem> {
        self.coords.chunks(self.dim)
    }

    pub fn indices(&self) -> Vec<u64> {
        self.iter().map(|v| vec_index(&self.ctx, v)).collect()
    }

    pub fn contains(&self, v: &[FqElem]) -> bool {
        v.len() == self.dim && (0..self.len()).map(|i| self.point(i)).any(|p| p == v)
    }

    /// Size of the ambient space q^d.
    pub fn ambient_size(&self) -> u128 {
        space_size(&self.ctx, self.dim)
    }

    /// A + t.
    pub fn translate(&self, t: &[FqElem]) -> Result<PointSet> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch(t.len(), self.dim));
        }
        let pts: Vec<VecFq> = self.iter().map(|v| add_vec(&self.ctx, v, t)).collect();
        PointSet::new(self.ctx.clone(), self.dim, pts)
    }

    /// A × F_q ⊂ F_q^{d+1}.
    pub fn product_lift(&self) -> Result<PointSet> {
        let mut pts = Vec::with_capacity(self.len() * self.ctx.q() as usize);
        for v in self.iter() {
            for s in self.ctx.elements() {
                let mut w = v.to_vec();
                w.push(s);
                pts.push(w);
            }
        }
        PointSet::new(self.ctx.clone(), self.dim + 1, pts)
    }
}

fn enumerate_where<F>(ctx: &Arc<FieldCtx>, d: usize, keep: F) -> Result<PointSet>
where
    F: Fn(&[FqElem]) -> bool + Sync,
{
    let n = check_enumeration(ctx, d, ENUMERATION_CAP)?;
    let block = 4096u64;
    let blocks = n.div_ceil(block);
    let kept: Vec<u64> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut buf = vec![FqElem::ZERO; d];
            let lo = b * block;
            let hi = (lo + block).min(n);
            let mut out = Vec::new();
            for idx in lo..hi {
                write_vec_from_index(ctx, idx, &mut buf);
                if keep(&buf) {
                    out.push(idx);
                }
            }
            out
        })
        .collect();
    PointSet::from_indices(ctx.clone(), d, kept)
}

/// S₀ = {x ∈ F_q^d : ‖x‖ = 0}.
pub fn enumerate_sphere_zero(ctx: &Arc<FieldCtx>, d: usize) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::DimensionTooSmall { got: 0, min: 1 });
    }
    enumerate_where(ctx, d, |v| norm(ctx, v).is_zero())
}

/// {x ∈ F_q^d : ‖x‖ = r}.
pub fn enumerate_sphere(ctx: &Arc<FieldCtx>, d: usize, radius: FqElem) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::DimensionTooSmall { got: 0, min: 1 });
    }
    enumerate_where(ctx, d, |v| norm(ctx, v) == radius)
}

/// C_n = {x ∈ F_q^n : x_n² = x_1² + … + x_{n−1}²}.
pub fn enumerate_cone(ctx: &Arc<FieldCtx>, n: usize) -> Result<PointSet> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { got: n, min: 2 });
    }
    enumerate_where(ctx, n, |v| {
        let last = v.len() - 1;
        norm(ctx, &v[..last]) == ctx.square(v[last])
    })
}

/// Δ(A) = {‖a − b‖ : a, b ∈ A}.
pub fn distance_set(a: &PointSet) -> Result<BTreeSet<FqElem>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let ctx = a.field();
    let q = ctx.q() as usize;
    let seen: Vec<bool> = (0..a.len())
        .into_par_iter()
        .fold(
            || vec![false; q],
            |mut seen, i| {
                let x = a.point(i);
                for j in i..a.len() {
                    seen[distance(ctx, x, a.point(j)).idx() as usize] = true;
                }
                seen
            },
        )
        .reduce(
            || vec![false; q],
            |mut l, r| {
                l.iter_mut().zip(r).for_each(|(x, y)| *x |= y);
                l
            },
        );
    Ok(seen
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(k, _)| FqElem(k as u32))
        .collect())
}

/// Δ_x(A) = {‖x − a‖ : a ∈ A}.
pub fn pinned_distance_set(x: &[FqElem], a: &PointSet) -> Result<BTreeSet<FqElem>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch(x.len(), a.dim()));
    }
    Ok(a.iter().map(|y| distance(a.field(), x, y)).collect())
}
