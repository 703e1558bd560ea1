//! The additive character χ(a) = exp(2πi·Tr(a)/p), Gauss sums, and the sign
//! constants that carry Gauss-sum powers into the exact pipeline.
//!
//! Everything returning [`Cpx`] lives on the numeric cross-validation path.
//! The exact identities only consume [`GaussSignPair`], whose entries come
//! from the case table on (n mod 4, q mod 4).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqElem};

pub type Cpx = Complex64;

#[inline]
pub fn chi(ctx: &FieldCtx, a: FqElem) -> Cpx {
    ctx.chi[a.idx() as usize]
}

/// G_a = Σ_{s≠0} η(s) χ(as), summed term by term.
pub fn gauss_direct(ctx: &FieldCtx, a: FqElem) -> Result<Cpx> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    Ok(ctx
        .nonzero_elements()
        .map(|s| chi(ctx, ctx.mul(a, s)) * ctx.eta(s) as f64)
        .sum())
}

/// The quadratic form of the same sum, Σ_s χ(a s²).
pub fn gauss_quadratic(ctx: &FieldCtx, a: FqElem) -> Result<Cpx> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    Ok(ctx
        .elements()
        .map(|s| chi(ctx, ctx.mul(a, ctx.square(s))))
        .sum())
}

/// Closed form of G_1 for q = p^ℓ:
/// (−1)^{ℓ−1} √q when p ≡ 1 (mod 4), and (−1)^{ℓ−1} i^ℓ √q when p ≡ 3 (mod 4).
pub fn gauss_closed(ctx: &FieldCtx) -> Cpx {
    let root = (ctx.q() as f64).sqrt();
    let sign = if (ctx.ell() - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let unit = if ctx.p() % 4 == 1 {
        Cpx::new(1.0, 0.0)
    } else {
        match ctx.ell() % 4 {
            0 => Cpx::new(1.0, 0.0),
            1 => Cpx::new(0.0, 1.0),
            2 => Cpx::new(-1.0, 0.0),
            _ => Cpx::new(0.0, -1.0),
        }
    };
    unit * (sign * root)
}

/// Signs of Gauss-sum powers for even n:
/// `sigma = G_1^n / q^{n/2}` and `tau = η(−1) G_1^n / q^{n/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GaussSignPair {
    pub sigma: i8,
    pub tau: i8,
}

/// Sign table for even `n ≥ 2`, keyed on (n mod 4, q mod 4).
pub fn gauss_signs(n: u32, ctx: &FieldCtx) -> Result<GaussSignPair> {
    signs_for(n, ctx.q())
}

pub(crate) fn signs_for(n: u32, q: u32) -> Result<GaussSignPair> {
    if n % 2 == 1 || n == 0 {
        return Err(Error::OddExponent(n));
    }
    let q3 = q % 4 == 3;
    let pair = match (n % 4, q3) {
        // n ≡ 0, q ≡ 3: η(−1)G^n = −q^{n/2}, G^n = q^{n/2}
        (0, true) => GaussSignPair { sigma: 1, tau: -1 },
        // n ≡ 0, q ≡ 1: both +q^{n/2}
        (0, false) => GaussSignPair { sigma: 1, tau: 1 },
        // n ≡ 2, q ≡ 3: G^n = −q^{n/2}, η(−1)G^n = q^{n/2}
        (2, true) => GaussSignPair { sigma: -1, tau: 1 },
        // n ≡ 2, q ≡ 1
        _ => GaussSignPair { sigma: 1, tau: 1 },
    };
    Ok(pair)
}

/// |Σ_s χ(as² + bs) − η(a) G_1 χ(b²/(−4a))|, with G_1 summed directly.
pub fn completing_square_check(ctx: &FieldCtx, a: FqElem, b: FqElem) -> Result<f64> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let lhs: Cpx = ctx
        .elements()
        .map(|s| chi(ctx, ctx.add(ctx.mul(a, ctx.square(s)), ctx.mul(b, s))))
        .sum();
    let minus_four_a = ctx.mul(ctx.from_int(-4), a);
    let arg = ctx.div(ctx.square(b), minus_four_a)?;
    let rhs = gauss_direct(ctx, FqElem::ONE)? * ctx.eta(a) as f64 * chi(ctx, arg);
    Ok((lhs - rhs).norm())
}

/// Σ_{α ∈ F_q^n} χ(β·α), by enumeration of all q^n vectors α.
pub fn orthogonality_sum(ctx: &FieldCtx, beta: &[FqElem]) -> Cpx {
    let q = ctx.q() as u64;
    let n = beta.len() as u32;
    let mut total = Cpx::new(0.0, 0.0);
    for idx in 0..q.pow(n) {
        let mut r = idx;
        let mut dot = FqElem::ZERO;
        for &b in beta {
            let a = FqElem((r % q) as u32);
            r /= q;
            dot = ctx.add(dot, ctx.mul(a, b));
        }
        total += chi(ctx, dot);
    }
    total
}
