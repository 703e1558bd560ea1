//! Fourier transforms of indicator functions and the spectral masses
//!
//! ```text
//! Ω⁰(A) = Σ_{‖m‖ = 0}      |Â(m)|²
//! Ω⁺(A) = Σ_{η(‖m‖) = 1}   |Â(m)|²
//! Ω⁻(A) = Σ_{η(‖m‖) = −1}  |Â(m)|²
//! ```
//!
//! with Â(m) = q^{−d} Σ_{x∈A} χ(−m·x).
//!
//! The masses are computed two ways. [`dft_indicator`] evaluates Â numerically.
//! [`spectral_masses_exact`] uses integer kernels
//! k_Set(v) = Σ_{m∈Set} χ(m·v), so that
//! Σ_{m∈Set} |Â(m)|² = q^{−2d} Σ_{x,y∈A} k_Set(y − x) exactly. Each frequency
//! set is a union of the origin (for S₀) and scaling classes {cm : c ≠ 0}; a
//! class contributes q − 1 to k_Set(v) when m·v = 0 and −1 otherwise.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::character::{chi, gauss_closed, Cpx};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqElem};
use crate::geometry::{
    check_enumeration, cone_norm, dot, norm, space_size, vec_index, write_vec_from_index, PointSet,
};

/// Exact rational carrier for all identity arithmetic.
pub type Rat = BigRational;

/// Cap on q^d for anything that enumerates the frequency space.
pub const SPECTRAL_CAP: u128 = 1_000_000;

/// Environment variable naming the kernel cache directory.
pub const KERNEL_CACHE_ENV: &str = "FQDIST_KERNEL_CACHE";

pub fn rat_int(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

pub fn rat(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rat {
    Rat::new(num.into(), den.into())
}

/// q^e as an exact rational; negative exponents allowed.
pub fn rat_pow(q: u32, e: i64) -> Rat {
    let base = BigInt::from(q).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rat::from_integer(base)
    } else {
        Rat::new(BigInt::one(), base)
    }
}

/// `"num/den"` rendering used in reports.
pub fn rat_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// The three spectral masses of a point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralMass {
    pub omega0: Rat,
    pub omega_plus: Rat,
    pub omega_minus: Rat,
}

impl SpectralMass {
    pub fn total(&self) -> Rat {
        &self.omega0 + &self.omega_plus + &self.omega_minus
    }

    /// Non-negativity, Plancherel Ω⁰+Ω⁺+Ω⁻ = |A|/q^d, and Ω⁰ ≥ |A|²/q^{2d}.
    pub fn invariant_violations(&self, size: usize, q: u32, d: usize) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("omega0", &self.omega0),
            ("omegaPlus", &self.omega_plus),
            ("omegaMinus", &self.omega_minus),
        ] {
            if v.is_negative() {
                out.push(format!("{name} is negative: {}", rat_string(v)));
            }
        }
        let a = rat_int(size as u64);
        let plancherel = &a * rat_pow(q, -(d as i64));
        if self.total() != plancherel {
            out.push(format!(
                "Plancherel: total {} != {}",
                rat_string(&self.total()),
                rat_string(&plancherel)
            ));
        }
        let floor = &a * &a * rat_pow(q, -2 * d as i64);
        if self.omega0 < floor {
            out.push(format!(
                "omega0 {} below |A|^2/q^(2d) = {}",
                rat_string(&self.omega0),
                rat_string(&floor)
            ));
        }
        out
    }
}

/// Floating-point masses from the numeric DFT.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericMass {
    pub omega0: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
}

impl NumericMass {
    /// Largest componentwise distance to the exact masses.
    pub fn max_abs_diff(&self, exact: &SpectralMass) -> f64 {
        [
            (self.omega0, &exact.omega0),
            (self.omega_plus, &exact.omega_plus),
            (self.omega_minus, &exact.omega_minus),
        ]
        .iter()
        .map(|(x, r)| (x - rat_to_f64(r)).abs())
        .fold(0.0, f64::max)
    }
}

/// Â(m) = q^{−d} Σ_{x∈set} χ(−m·x) at one frequency.
pub fn fourier_at(set: &PointSet, m: &[FqElem]) -> Cpx {
    let ctx = set.field();
    let scale = (ctx.q() as f64).powi(-(set.dim() as i32));
    let s: Cpx = set.iter().map(|x| chi(ctx, ctx.neg(dot(ctx, m, x)))).sum();
    s * scale
}

/// Â at every frequency, indexed by vector index.
pub fn dft_indicator(a: &PointSet) -> Result<Vec<Cpx>> {
    let ctx = a.field();
    let d = a.dim();
    let n = check_enumeration(ctx, d, SPECTRAL_CAP)?;
    Ok((0..n)
        .into_par_iter()
        .map_init(
            || vec![FqElem::ZERO; d],
            |buf, idx| {
                write_vec_from_index(ctx, idx, buf);
                fourier_at(a, buf)
            },
        )
        .collect())
}

/// Ω⁰, Ω⁺, Ω⁻ summed from a numeric transform.
pub fn numeric_masses(ctx: &FieldCtx, d: usize, transform: &[Cpx]) -> NumericMass {
    let mut buf = vec![FqElem::ZERO; d];
    let mut out = NumericMass {
        omega0: 0.0,
        omega_plus: 0.0,
        omega_minus: 0.0,
    };
    for (idx, z) in transform.iter().enumerate() {
        write_vec_from_index(ctx, idx as u64, &mut buf);
        let w = z.norm_sqr();
        match ctx.eta(norm(ctx, &buf)) {
            0 => out.omega0 += w,
            1 => out.omega_plus += w,
            _ => out.omega_minus += w,
        }
    }
    out
}

/// Which frequency level set a kernel sums over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrequencySet {
    Zero,
    Plus,
    Minus,
}

impl FrequencySet {
    pub const ALL: [FrequencySet; 3] =
        [FrequencySet::Zero, FrequencySet::Plus, FrequencySet::Minus];

    fn of_norm(eta: i8) -> FrequencySet {
        match eta {
            0 => FrequencySet::Zero,
            1 => FrequencySet::Plus,
            _ => FrequencySet::Minus,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            FrequencySet::Zero => "zero",
            FrequencySet::Plus => "plus",
            FrequencySet::Minus => "minus",
        }
    }

    fn code(self) -> u8 {
        match self {
            FrequencySet::Zero => 0,
            FrequencySet::Plus => 1,
            FrequencySet::Minus => 2,
        }
    }
}

/// Integer kernels k_Set(v) = Σ_{m∈Set} χ(m·v) for the three level sets of
/// ‖m‖, indexed by the vector index of v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelTable {
    p: u32,
    ell: u32,
    modulus: Vec<u32>,
    q: u32,
    d: usize,
    zero: Vec<i64>,
    plus: Vec<i64>,
    minus: Vec<i64>,
}

impl KernelTable {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, set: FrequencySet, v_index: u64) -> i64 {
        self.table(set)[v_index as usize]
    }

    pub fn table(&self, set: FrequencySet) -> &[i64] {
        match set {
            FrequencySet::Zero => &self.zero,
            FrequencySet::Plus => &self.plus,
            FrequencySet::Minus => &self.minus,
        }
    }

    fn matches(&self, ctx: &FieldCtx, d: usize) -> bool {
        self.p == ctx.p() && self.ell == ctx.ell() && self.modulus == ctx.modulus() && self.d == d
    }

    fn cache_path(dir: &Path, ctx: &FieldCtx, d: usize, set: FrequencySet) -> PathBuf {
        let m: Vec<String> = ctx.modulus().iter().map(|c| c.to_string()).collect();
        dir.join(format!(
            "kernel_p{}_l{}_d{}_m{}_{}.bin",
            ctx.p(),
            ctx.ell(),
            d,
            m.join("-"),
            set.tag()
        ))
    }

    /// Writes one file per level set into `dir` (see README for the layout).
    pub fn write_cache(&self, ctx: &FieldCtx, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for set in FrequencySet::ALL {
            let mut bytes = Vec::new();
            bytes.extend_from_slice(CACHE_MAGIC);
            for x in [self.p, self.ell, self.d as u32, self.modulus.len() as u32] {
                bytes.extend_from_slice(&x.to_le_bytes());
            }
            for c in &self.modulus {
                bytes.extend_from_slice(&c.to_le_bytes());
            }
            bytes.push(set.code());
            let values = self.table(set);
            bytes.extend_from_slice(&(values.len() as u64).to_le_bytes());
            for v in values {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            let path = Self::cache_path(dir, ctx, self.d, set);
            let tmp = path.with_extension("tmp");
            fs::File::create(&tmp)?.write_all(&bytes)?;
            fs::rename(tmp, path)?;
        }
        Ok(())
    }

    /// Reads a cached table; `Ok(None)` when any file is missing or its
    /// header does not describe this field and dimension.
    pub fn read_cache(ctx: &FieldCtx, d: usize, dir: &Path) -> Result<Option<KernelTable>> {
        let mut tables = Vec::new();
        for set in FrequencySet::ALL {
            let path = Self::cache_path(dir, ctx, d, set);
            let mut bytes = Vec::new();
            match fs::File::open(&path) {
                Ok(mut f) => f.read_to_end(&mut bytes)?,
                Err(_) => return Ok(None),
            };
            match parse_cache(&bytes, ctx, d, set) {
                Some(t) => tables.push(t),
                None => return Ok(None),
            }
        }
        let minus = tables.pop().unwrap_or_default();
        let plus = tables.pop().unwrap_or_default();
        let zero = tables.pop().unwrap_or_default();
        Ok(Some(KernelTable {
            p: ctx.p(),
            ell: ctx.ell(),
            modulus: ctx.modulus().to_vec(),
            q: ctx.q(),
            d,
            zero,
            plus,
            minus,
        }))
    }
}

const CACHE_MAGIC: &[u8; 8] = b"FQDKERN1";

fn parse_cache(bytes: &[u8], ctx: &FieldCtx, d: usize, set: FrequencySet) -> Option<Vec<i64>> {
    let mut pos = 0usize;
    let mut take = |n: usize| -> Option<&[u8]> {
        let s = bytes.get(pos..pos + n)?;
        pos += n;
        Some(s)
    };
    if take(8)? != CACHE_MAGIC {
        return None;
    }
    let mut u32s = [0u32; 4];
    for slot in u32s.iter_mut() {
        *slot = u32::from_le_bytes(take(4)?.try_into().ok()?);
    }
    let [p, ell, dim, mlen] = u32s;
    if p != ctx.p() || ell != ctx.ell() || dim as usize != d || mlen as usize != ctx.modulus().len()
    {
        return None;
    }
    for &c in ctx.modulus() {
        if u32::from_le_bytes(take(4)?.try_into().ok()?) != c {
            return None;
        }
    }
    if take(1)?[0] != set.code() {
        return None;
    }
    let count = u64::from_le_bytes(take(8)?.try_into().ok()?);
    if count as u128 != space_size(ctx, d) {
        return None;
    }
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        out.push(i64::from_le_bytes(take(8)?.try_into().ok()?));
    }
    Some(out)
}

/// Builds the three kernels by scaling-class decomposition.
pub fn build_kernels(ctx: &FieldCtx, d: usize) -> Result<KernelTable> {
    let n = check_enumeration(ctx, d, SPECTRAL_CAP)?;
    let q = ctx.q() as i64;

    // One representative per scaling class: first nonzero coordinate equal to 1.
    let mut reps: Vec<(Vec<FqElem>, FrequencySet)> = Vec::new();
    let mut buf = vec![FqElem::ZERO; d];
    for idx in 1..n {
        write_vec_from_index(ctx, idx, &mut buf);
        if buf.iter().find(|x| !x.is_zero()) == Some(&FqElem::ONE) {
            reps.push((buf.clone(), FrequencySet::of_norm(ctx.eta(norm(ctx, &buf)))));
        }
    }

    let rows: Vec<[i64; 3]> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![FqElem::ZERO; d],
            |v, idx| {
                write_vec_from_index(ctx, idx, v);
                // The origin lies in S₀ only.
                let mut acc = [1i64, 0, 0];
                for (m, set) in &reps {
                    let c = if dot(ctx, m, v).is_zero() { q - 1 } else { -1 };
                    acc[set.code() as usize] += c;
                }
                acc
            },
        )
        .collect();

    Ok(KernelTable {
        p: ctx.p(),
        ell: ctx.ell(),
        modulus: ctx.modulus().to_vec(),
        q: ctx.q(),
        d,
        zero: rows.iter().map(|r| r[0]).collect(),
        plus: rows.iter().map(|r| r[1]).collect(),
        minus: rows.iter().map(|r| r[2]).collect(),
    })
}

/// Reads kernels from `cache_dir` when present, otherwise builds them and
/// (if a directory was given) writes them back.
pub fn load_or_build_kernels(
    ctx: &FieldCtx,
    d: usize,
    cache_dir: Option<&Path>,
) -> Result<KernelTable> {
    if let Some(dir) = cache_dir {
        if let Some(k) = KernelTable::read_cache(ctx, d, dir)? {
            return Ok(k);
        }
    }
    let k = build_kernels(ctx, d)?;
    if let Some(dir) = cache_dir {
        k.write_cache(ctx, dir)?;
    }
    Ok(k)
}

/// Cache directory from [`KERNEL_CACHE_ENV`], if set and nonempty.
pub fn kernel_cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(KERNEL_CACHE_ENV)
        .filter(|s| !s.is_empty())
        .map(PathBuf::from)
}

/// Exact Ω⁰, Ω⁺, Ω⁻ from the kernel identity.
pub fn spectral_masses_exact(a: &PointSet, k: &KernelTable) -> Result<SpectralMass> {
    let ctx = a.field();
    let d = a.dim();
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !k.matches(ctx, d) {
        return Err(Error::DimensionMismatch(k.d, d));
    }
    let q = ctx.q() as u64;
    let sums = (0..a.len())
        .into_par_iter()
        .map_init(
            || vec![FqElem::ZERO; d],
            |diff, i| {
                let x = a.point(i);
                let mut acc = [0i128; 3];
                for y in a.iter() {
                    for ((slot, &yi), &xi) in diff.iter_mut().zip(y).zip(x) {
                        *slot = ctx.sub(yi, xi);
                    }
                    let v = diff.iter().fold(0u64, |acc, e| acc * q + e.idx() as u64) as usize;
                    acc[0] += k.zero[v] as i128;
                    acc[1] += k.plus[v] as i128;
                    acc[2] += k.minus[v] as i128;
                }
                acc
            },
        )
        .reduce(
            || [0i128; 3],
            |l, r| [l[0] + r[0], l[1] + r[1], l[2] + r[2]],
        );
    let den = BigInt::from(k.q).pow(2 * d as u32);
    let mk = |s: i128| Rat::new(BigInt::from(s), den.clone());
    Ok(SpectralMass {
        omega0: mk(sums[0]),
        omega_plus: mk(sums[1]),
        omega_minus: mk(sums[2]),
    })
}

fn delta0(m: &[FqElem]) -> f64 {
    if m.iter().all(|x| x.is_zero()) {
        1.0
    } else {
        0.0
    }
}

/// Closed form of the cone transform:
/// Ĉ_n(m) = q^{−1}δ₀(m) + q^{−n−1} η(−1) G_1^n Σ_{s≠0} η^n(s) χ(‖m‖_{C_n} / (−4s)).
pub fn cone_fourier_formula(ctx: &FieldCtx, m: &[FqElem]) -> Result<Cpx> {
    let n = m.len();
    let cn = cone_norm(ctx, m)?;
    let q = ctx.q() as f64;
    let minus_four = ctx.from_int(-4);
    let mut inner = Cpx::new(0.0, 0.0);
    for s in ctx.nonzero_elements() {
        let arg = ctx.div(cn, ctx.mul(minus_four, s))?;
        let weight = if n % 2 == 0 { 1.0 } else { ctx.eta(s) as f64 };
        inner += chi(ctx, arg) * weight;
    }
    let g = gauss_closed(ctx).powi(n as i32);
    Ok(Cpx::new(delta0(m) / q, 0.0)
        + g * inner * (ctx.eta_minus_one() as f64 * q.powi(-(n as i32) - 1)))
}

/// Closed form of the zero-sphere transform:
/// Ŝ₀(m) = δ₀(m)/q + q^{−d−1} η^d(−1) G_1^d Σ_{s≠0} η^d(s) χ(‖m‖ / (4s)).
pub fn sphere0_fourier_formula(ctx: &FieldCtx, m: &[FqElem]) -> Result<Cpx> {
    let d = m.len();
    if d < 2 {
        return Err(Error::DimensionTooSmall { got: d, min: 2 });
    }
    let nm = norm(ctx, m);
    let q = ctx.q() as f64;
    let four = ctx.from_int(4);
    let odd = d % 2 == 1;
    let mut inner = Cpx::new(0.0, 0.0);
    for s in ctx.nonzero_elements() {
        let arg = ctx.div(nm, ctx.mul(four, s))?;
        let weight = if odd { ctx.eta(s) as f64 } else { 1.0 };
        inner += chi(ctx, arg) * weight;
    }
    let sign = if odd { ctx.eta_minus_one() as f64 } else { 1.0 };
    let g = gauss_closed(ctx).powi(d as i32);
    Ok(Cpx::new(delta0(m) / q, 0.0) + g * inner * (sign * q.powi(-(d as i32) - 1)))
}

/// Largest |formula − direct| over every frequency, for a variety enumerated
/// in full and one of the closed forms above.
pub fn max_formula_error<F>(variety: &PointSet, formula: F) -> Result<f64>
where
    F: Fn(&FieldCtx, &[FqElem]) -> Result<Cpx> + Sync,
{
    let direct = dft_indicator(variety)?;
    let ctx = variety.field();
    let d = variety.dim();
    direct
        .par_iter()
        .enumerate()
        .map_init(
            || vec![FqElem::ZERO; d],
            |buf, (idx, z)| {
                write_vec_from_index(ctx, idx as u64, buf);
                formula(ctx, buf).map(|f| (f - z).norm())
            },
        )
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Both sides of the pair-counting identity
/// |{(x,y) ∈ E² : x − y ∈ V}| = q^{2n} Σ_m V̂(m) |Ê(m)|².
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountingCheck {
    pub direct: u64,
    pub fourier: f64,
    pub fourier_imag: f64,
}

impl CountingCheck {
    pub fn agrees(&self) -> bool {
        let tol = if self.direct == 0 {
            1e-6
        } else {
            1e-6 * self.direct as f64
        };
        (self.direct as f64 - self.fourier).abs() < tol && self.fourier_imag.abs() < tol
    }
}

pub fn verify_counting_lemma(e: &PointSet, v: &PointSet) -> Result<CountingCheck> {
    if e.dim() != v.dim() {
        return Err(Error::DimensionMismatch(e.dim(), v.dim()));
    }
    if *e.ctx() != *v.ctx() {
        return Err(Error::FieldMismatch);
    }
    let ctx = e.field();
    let n = e.dim();
    let size = check_enumeration(ctx, n, SPECTRAL_CAP)?;
    let mut member = vec![false; size as usize];
    for w in v.iter() {
        member[vec_index(ctx, w) as usize] = true;
    }
    let direct: u64 = (0..e.len())
        .into_par_iter()
        .map_init(
            || vec![FqElem::ZERO; n],
            |diff, i| {
                let x = e.point(i);
                e.iter()
                    .filter(|y| {
                        for ((slot, &xi), &yi) in diff.iter_mut().zip(x).zip(y.iter()) {
                            *slot = ctx.sub(xi, yi);
                        }
                        member[vec_index(ctx, diff) as usize]
                    })
                    .count() as u64
            },
        )
        .sum();
    let e_hat = dft_indicator(e)?;
    let v_hat = dft_indicator(v)?;
    let total: Cpx = v_hat
        .iter()
        .zip(&e_hat)
        .map(|(vh, eh)| vh * eh.norm_sqr())
        .sum();
    let scale = (ctx.q() as f64).powi(2 * n as i32);
    Ok(CountingCheck {
        direct,
        fourier: total.re * scale,
        fourier_imag: total.im * scale,
    })
}

/// Ω⁰ ≤ min{q^{−d}|A|, q^{−d−1}|A| + q^{−(3d+1)/2}|A|²} for odd d ≥ 3.
#[derive(Clone, Debug, PartialEq)]
pub struct Omega0Bound {
    pub omega0: Rat,
    pub plancherel: Rat,
    pub gauss: Rat,
}

impl Omega0Bound {
    pub fn holds(&self) -> bool {
        self.omega0 <= self.plancherel && self.omega0 <= self.gauss
    }

    /// min(bounds) − Ω⁰.
    pub fn slack(&self) -> Rat {
        let m = if self.plancherel < self.gauss {
            &self.plancherel
        } else {
            &self.gauss
        };
        m - &self.omega0
    }
}

pub fn omega0_bound_check(a: &PointSet, mass: &SpectralMass) -> Result<Omega0Bound> {
    let d = a.dim();
    if d % 2 == 0 || d < 3 {
        return Err(Error::WrongParity {
            d,
            expected: "odd d >= 3",
        });
    }
    let q = a.field().q();
    let size = rat_int(a.len() as u64);
    let di = d as i64;
    Ok(Omega0Bound {
        omega0: mass.omega0.clone(),
        plancherel: &size * rat_pow(q, -di),
        gauss: &size * rat_pow(q, -di - 1) + &size * &size * rat_pow(q, -(3 * di + 1) / 2),
    })
}

/// True when the rational is an integer.
pub fn is_integral(r: &Rat) -> bool {
    r.denom().is_one()
}
