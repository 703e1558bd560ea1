//! Seeded generators for test sets and the square-distance-set searches.
//!
//! Randomness comes from `ChaCha8Rng` seeded through `seed_from_u64`, which is
//! portable across platforms. Restart `r` of a search uses stream `r` of the
//! same seed.

use std::path::PathBuf;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::corollary13_size_bound;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqElem};
use crate::geometry::{
    check_enumeration, enumerate_sphere, norm, vec_from_index, vec_index, PointSet, VecFq,
    ENUMERATION_CAP,
};

/// Largest ambient space for the square-distance searches.
pub const SEARCH_CAP: u128 = 100_000;
/// Node budget of the branch-and-bound search.
pub const NODE_BUDGET: u64 = 100_000_000;

/// How to build a point set. Vectors are given as lists of element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum GenSpec {
    Random {
        size: u64,
        seed: u64,
    },
    Line {
        point: Vec<u64>,
        direction: Vec<u64>,
    },
    Subspace {
        point: Vec<u64>,
        basis: Vec<Vec<u64>>,
    },
    /// The sphere of the given radius, or a seeded random `size`-subset of it.
    SphereSlice {
        radius: u64,
        size: Option<u64>,
        seed: u64,
    },
    FullSpace,
    /// `base` generated in dimension d − 1, then lifted to A × F_q.
    ProductLift {
        base: Box<GenSpec>,
    },
    File {
        path: PathBuf,
    },
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn to_vec(ctx: &FieldCtx, d: usize, raw: &[u64]) -> Result<VecFq> {
    if raw.len() != d {
        return Err(Error::DimensionMismatch(raw.len(), d));
    }
    raw.iter().map(|&i| ctx.elem(i)).collect()
}

/// Seeded uniform `k`-subset of `pool`, drawn by partial Fisher–Yates.
fn sample(pool: &mut [u64], k: u64, seed: u64) -> Result<Vec<u64>> {
    if k > pool.len() as u64 {
        return Err(Error::SizeTooLarge {
            size: k,
            available: pool.len() as u64,
        });
    }
    let (chosen, _) = pool.partial_shuffle(&mut rng(seed, 0), k as usize);
    Ok(chosen.to_vec())
}

/// Affine span `point + span(basis)`. The basis must be linearly independent.
fn affine_span(
    ctx: &Arc<FieldCtx>,
    d: usize,
    point: &[u64],
    basis: &[Vec<u64>],
) -> Result<PointSet> {
    let p0 = to_vec(ctx, d, point)?;
    let b: Vec<VecFq> = basis
        .iter()
        .map(|v| to_vec(ctx, d, v))
        .collect::<Result<_>>()?;
    if b.len() > d {
        return Err(Error::InvalidBasis(format!(
            "{} vectors in dimension {d}",
            b.len()
        )));
    }
    let q = ctx.q() as u64;
    let count = check_enumeration(ctx, b.len(), ENUMERATION_CAP)?;
    let mut pts = Vec::with_capacity(count as usize);
    for c in 0..count {
        let coef = vec_from_index(ctx, b.len(), c);
        let mut v = p0.clone();
        for (t, bv) in coef.iter().zip(&b) {
            for (x, &y) in v.iter_mut().zip(bv) {
                *x = ctx.add(*x, ctx.mul(*t, y));
            }
        }
        pts.push(v);
    }
    let set = PointSet::new(ctx.clone(), d, pts)?;
    if set.len() as u64 != q.pow(b.len() as u32) {
        return Err(Error::InvalidBasis(
            "basis vectors are linearly dependent".into(),
        ));
    }
    Ok(set)
}

/// Builds the set described by `spec`; deterministic in (ctx, d, spec).
pub fn generate(ctx: &Arc<FieldCtx>, d: usize, spec: &GenSpec) -> Result<PointSet> {
    match spec {
        GenSpec::FullSpace => PointSet::full_space(ctx.clone(), d),
        GenSpec::Random { size, seed } => {
            let n = check_enumeration(ctx, d, ENUMERATION_CAP)?;
            let mut pool: Vec<u64> = (0..n).collect();
            PointSet::from_indices(ctx.clone(), d, sample(&mut pool, *size, *seed)?)
        }
        GenSpec::Line { point, direction } => {
            affine_span(ctx, d, point, std::slice::from_ref(direction))
        }
        GenSpec::Subspace { point, basis } => affine_span(ctx, d, point, basis),
        GenSpec::SphereSlice { radius, size, seed } => {
            let sphere = enumerate_sphere(ctx, d, ctx.elem(*radius)?)?;
            match size {
                None => Ok(sphere),
                Some(k) => {
                    let mut pool = sphere.indices();
                    PointSet::from_indices(ctx.clone(), d, sample(&mut pool, *k, *seed)?)
                }
            }
        }
        GenSpec::ProductLift { base } => {
            if d < 2 {
                return Err(Error::DimensionTooSmall { got: d, min: 2 });
            }
            generate(ctx, d - 1, base)?.product_lift()
        }
        GenSpec::File { path } => {
            let set = crate::io::read_point_set(path)?;
            if *set.field() != **ctx {
                return Err(Error::FieldMismatch);
            }
            if set.dim() != d {
                return Err(Error::DimensionMismatch(set.dim(), d));
            }
            Ok(set)
        }
    }
}

/// `ok[i]` is true when vector `i` has norm zero or a nonzero square.
fn square_norm_table(ctx: &FieldCtx, d: usize, n: u64) -> Vec<bool> {
    (0..n)
        .into_par_iter()
        .map(|i| ctx.eta(norm(ctx, &vec_from_index(ctx, d, i))) >= 0)
        .collect()
}

fn diff_index(ctx: &FieldCtx, x: &[FqElem], y: &[FqElem]) -> u64 {
    let q = ctx.q() as u64;
    x.iter()
        .zip(y)
        .fold(0, |acc, (&a, &b)| acc * q + ctx.sub(a, b).idx() as u64)
}

/// Greedy maximal square-distance set: candidates in seeded random order,
/// each kept when all its distances to earlier picks are zero or squares.
/// The best of `restarts` runs is returned, ties broken by the smaller
/// sorted index list.
pub fn greedy_square_distance_search(
    ctx: &Arc<FieldCtx>,
    d: usize,
    seed: u64,
    restarts: u32,
) -> Result<PointSet> {
    let n = check_enumeration(ctx, d, SEARCH_CAP)?;
    let ok = square_norm_table(ctx, d, n);
    let vecs: Vec<VecFq> = (0..n).map(|i| vec_from_index(ctx, d, i)).collect();
    let best = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| {
            let mut order: Vec<u64> = (0..n).collect();
            order.shuffle(&mut rng(seed, r));
            let mut picked: Vec<u64> = Vec::new();
            for &c in &order {
                let v = &vecs[c as usize];
                if picked
                    .iter()
                    .all(|&p| ok[diff_index(ctx, v, &vecs[p as usize]) as usize])
                {
                    picked.push(c);
                }
            }
            picked.sort_unstable();
            picked
        })
        .reduce(Vec::new, |a, b| {
            if b.len() > a.len() || (b.len() == a.len() && b < a) {
                b
            } else {
                a
            }
        });
    PointSet::from_indices(ctx.clone(), d, best)
}

/// Outcome of the exhaustive search.
#[derive(Clone, Debug)]
pub struct SquareSearchResult {
    pub size: usize,
    pub witness: PointSet,
    /// False when the node budget ran out; `size` is then a lower bound.
    pub exact: bool,
    pub budget_exhausted: bool,
    pub nodes: u64,
}

#[derive(Clone)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn empty(n: usize) -> Bitset {
        Bitset(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
}

struct Bnb<'a> {
    adj: &'a [Bitset],
    best: Vec<usize>,
    cap: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Bnb<'_> {
    fn expand(&mut self, current: &mut Vec<usize>, mut cand: Bitset) {
        if current.len() > self.best.len() {
            self.best = current.clone();
        }
        while let Some(v) = cand.first() {
            if self.best.len() >= self.cap || self.exhausted {
                return;
            }
            if current.len() + cand.count() <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
                return;
            }
            cand.clear(v);
            current.push(v);
            let next = cand.and(&self.adj[v]);
            self.expand(current, next);
            current.pop();
        }
    }
}

/// Maximum size of a square-distance set in F_q^d.
///
/// For q^d ≤ 16 every subset is enumerated. Otherwise a branch-and-bound
/// over sets containing the origin (distances are translation invariant)
/// stops early once it reaches the size bound for square-distance sets.
pub fn exhaustive_square_distance_max(ctx: &Arc<FieldCtx>, d: usize) -> Result<SquareSearchResult> {
    exhaustive_with_budget(ctx, d, NODE_BUDGET)
}

pub fn exhaustive_with_budget(
    ctx: &Arc<FieldCtx>,
    d: usize,
    budget: u64,
) -> Result<SquareSearchResult> {
    if d < 2 {
        return Err(Error::UnsupportedCase(d));
    }
    let n = check_enumeration(ctx, d, SEARCH_CAP)? as usize;
    let ok = square_norm_table(ctx, d, n as u64);
    let vecs: Vec<VecFq> = (0..n as u64).map(|i| vec_from_index(ctx, d, i)).collect();
    let compatible = |i: usize, j: usize| ok[diff_index(ctx, &vecs[i], &vecs[j]) as usize];

    if n <= 16 {
        let mut best: u32 = 1;
        let mut nodes = 0u64;
        for mask in 1u32..(1 << n) {
            nodes += 1;
            if mask.count_ones() <= best.count_ones() {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let good = members
                .iter()
                .enumerate()
                .all(|(a, &i)| members[a + 1..].iter().all(|&j| compatible(i, j)));
            if good {
                best = mask;
            }
        }
        let witness = PointSet::from_indices(
            ctx.clone(),
            d,
            (0..n as u64).filter(|&i| best >> i & 1 == 1),
        )?;
        return Ok(SquareSearchResult {
            size: witness.len(),
            witness,
            exact: true,
            budget_exhausted: false,
            nodes,
        });
    }

    let adj: Vec<Bitset> = (0..n)
        .map(|i| {
            let mut b = Bitset::empty(n);
            for j in 0..n {
                if j != i && compatible(i, j) {
                    b.set(j);
                }
            }
            b
        })
        .collect();
    let cap_rat = corollary13_size_bound(d, ctx.q())?;
    let cap = cap_rat
        .floor()
        .to_integer()
        .try_into()
        .unwrap_or(usize::MAX);
    let origin = vec_index(ctx, &vec![FqElem::ZERO; d]) as usize;
    let mut search = Bnb {
        adj: &adj,
        best: vec![origin],
        cap,
        nodes: 0,
        budget,
        exhausted: false,
    };
    let mut current = vec![origin];
    search.expand(&mut current, adj[origin].clone());
    let witness = PointSet::from_indices(ctx.clone(), d, search.best.iter().map(|&i| i as u64))?;
    Ok(SquareSearchResult {
        size: witness.len(),
        witness,
        exact: !search.exhausted,
        budget_exhausted: search.exhausted,
        nodes: search.nodes,
    })
}
