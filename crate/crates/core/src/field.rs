//! Arithmetic in F_q for odd prime powers q = p^ℓ.
//!
//! An element c_0 + c_1 X + … + c_{ℓ−1} X^{ℓ−1} of F_p[X]/(f) is packed into
//! the integer `c_0 + c_1 p + … + c_{ℓ−1} p^{ℓ−1}`. Multiplication goes through
//! discrete log / antilog tables built from a primitive element, and the
//! quadratic character, trace and additive character are tabulated once at
//! construction so that downstream enumeration loops only do lookups.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;

/// Largest field order accepted by [`make_field`].
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// An element of F_q, stored by its packed base-p index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FqElem(pub(crate) u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    /// Packed index in `[0, q)`.
    #[inline]
    pub fn idx(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Immutable description of F_{p^ℓ} together with its lookup tables.
pub struct FieldCtx {
    p: u32,
    ell: u32,
    q: u32,
    /// Low coefficients c_0..c_{ℓ−1} of the monic modulus; `[0]` for prime fields.
    modulus: Vec<u32>,
    /// p^i for i < ℓ.
    place: Vec<u32>,
    /// exp[k] = g^k for the chosen primitive element g, k in [0, q−1).
    exp: Vec<u32>,
    /// log[a] for a ≠ 0; log[0] is unused.
    log: Vec<u32>,
    eta: Vec<i8>,
    trace: Vec<u32>,
    square: Vec<u32>,
    pub(crate) chi: Vec<Complex64>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("ell", &self.ell)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.ell == other.ell && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// Builds F_{p^ℓ}. The modulus is the monic irreducible of degree ℓ whose
/// coefficient vector (c_0, …, c_{ℓ−1}) is lexicographically smallest.
pub fn make_field(p: u64, ell: u32) -> Result<Arc<FieldCtx>> {
    FieldCtx::new(p, ell).map(Arc::new)
}

impl FieldCtx {
    pub fn new(p: u64, ell: u32) -> Result<FieldCtx> {
        if ell < 1 {
            return Err(Error::BadDegree(ell));
        }
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic(p));
        }
        let q = p
            .checked_pow(ell)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(Error::FieldTooLarge { p, ell })?;
        let modulus = find_modulus(p, ell);
        let place: Vec<u32> = (0..ell).map(|i| p.pow(i) as u32).collect();

        let mut ctx = FieldCtx {
            p: p as u32,
            ell,
            q: q as u32,
            modulus,
            place,
            exp: Vec::new(),
            log: Vec::new(),
            eta: Vec::new(),
            trace: Vec::new(),
            square: Vec::new(),
            chi: Vec::new(),
        };
        ctx.build_log_tables();
        ctx.build_character_tables();
        Ok(ctx)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn ell(&self) -> u32 {
        self.ell
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Low coefficients of the monic modulus, c_0 first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Element with the given packed index.
    pub fn elem(&self, idx: u64) -> Result<FqElem> {
        if idx < self.q as u64 {
            Ok(FqElem(idx as u32))
        } else {
            Err(Error::InvalidElement(idx))
        }
    }

    /// The image of an integer under Z → F_p ⊂ F_q.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Element from its polynomial coefficients c_0, c_1, … (each reduced mod p).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FqElem {
        let mut idx = 0u32;
        for (i, &c) in coeffs.iter().take(self.ell as usize).enumerate() {
            idx += (c % self.p as u64) as u32 * self.place[i];
        }
        FqElem(idx)
    }

    pub fn coeffs(&self, a: FqElem) -> Vec<u32> {
        (0..self.ell as usize)
            .map(|i| (a.0 / self.place[i]) % self.p)
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(FqElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FqElem> {
        (1..self.q).map(FqElem)
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.ell == 1 {
            let s = a.0 + b.0;
            return FqElem(if s >= self.p { s - self.p } else { s });
        }
        let mut out = 0;
        let (mut x, mut y) = (a.0, b.0);
        for &w in &self.place {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * w;
            x /= self.p;
            y /= self.p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        if self.ell == 1 {
            return FqElem(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let mut out = 0;
        let mut x = a.0;
        for &w in &self.place {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * w;
            x /= self.p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        let n = self.q - 1;
        let k = self.log[a.0 as usize] + self.log[b.0 as usize];
        FqElem(self.exp[(if k >= n { k - n } else { k }) as usize])
    }

    #[inline]
    pub fn square(&self, a: FqElem) -> FqElem {
        FqElem(self.square[a.0 as usize])
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.q - 1;
        let k = self.log[a.0 as usize];
        Ok(FqElem(self.exp[((n - k) % n) as usize]))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e with the convention 0^0 = 1.
    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        if a.0 == 0 {
            return FqElem::ZERO;
        }
        let n = (self.q - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % n)) % n;
        FqElem(self.exp[k as usize])
    }

    /// Absolute trace Tr(a) = a + a^p + … + a^{p^{ℓ−1}}, as an integer in [0, p).
    #[inline]
    pub fn trace(&self, a: FqElem) -> u32 {
        self.trace[a.0 as usize]
    }

    /// Quadratic character: 1 on nonzero squares, −1 on non-squares, 0 at 0.
    #[inline]
    pub fn eta(&self, a: FqElem) -> i8 {
        self.eta[a.0 as usize]
    }

    /// η(−1), which is 1 exactly when q ≡ 1 (mod 4).
    pub fn eta_minus_one(&self) -> i8 {
        if self.q % 4 == 1 {
            1
        } else {
            -1
        }
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let to_poly = |x: u32| -> Vec<u64> {
            (0..self.ell as usize)
                .map(|i| ((x / self.place[i]) % self.p) as u64)
                .collect()
        };
        let mut m: Vec<u64> = self.modulus.iter().map(|&c| c as u64).collect();
        m.push(1);
        let r = poly::mul_mod(&to_poly(a), &to_poly(b), &m, p);
        r.iter()
            .enumerate()
            .map(|(i, &c)| c as u32 * self.place[i])
            .sum()
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_log_tables(&mut self) {
        let order = (self.q - 1) as u64;
        let factors = poly::distinct_prime_factors(order);
        let g = (2..self.q)
            .chain(std::iter::once(1))
            .find(|&g| factors.iter().all(|&r| self.slow_pow(g, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; self.q as usize];
        let mut cur = 1u32;
        for k in 0..order as u32 {
            exp.push(cur);
            log[cur as usize] = k;
            cur = self.slow_mul(cur, g);
        }
        debug_assert_eq!(cur, 1);
        self.exp = exp;
        self.log = log;
    }

    fn build_character_tables(&mut self) {
        let q = self.q as usize;
        let mut eta = vec![0i8; q];
        for a in 1..q {
            eta[a] = if self.log[a] % 2 == 0 { 1 } else { -1 };
        }
        self.eta = eta;

        let square: Vec<u32> = (0..self.q)
            .map(|a| self.mul(FqElem(a), FqElem(a)).0)
            .collect();
        self.square = square;

        let p_pow = self.p as u64;
        let mut trace = vec![0u32; q];
        for (a, t) in trace.iter_mut().enumerate().skip(1) {
            let mut acc = FqElem::ZERO;
            let mut conj = FqElem(a as u32);
            for _ in 0..self.ell {
                acc = self.add(acc, conj);
                conj = self.pow(conj, p_pow);
            }
            debug_assert!(acc.0 < self.p, "trace must land in the prime field");
            *t = acc.0;
        }
        self.trace = trace;

        let roots: Vec<Complex64> = (0..self.p)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.p as f64))
            .collect();
        self.chi = self.trace.iter().map(|&t| roots[t as usize]).collect();
    }
}

fn find_modulus(p: u64, ell: u32) -> Vec<u32> {
    if ell == 1 {
        return vec![0];
    }
    let count = p.pow(ell);
    for n in 0..count {
        // c_0 is the most significant digit of the lexicographic order.
        let mut c = vec![0u64; ell as usize + 1];
        let mut r = n;
        for i in (0..ell as usize).rev() {
            c[i] = r % p;
            r /= p;
        }
        c[ell as usize] = 1;
        if poly::is_irreducible(&c, p) {
            return c[..ell as usize].iter().map(|&x| x as u32).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_odd_prime_powers(max_q: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        for p in 3..=max_q {
            if !is_prime(p) {
                continue;
            }
            let mut ell = 1;
            while p.pow(ell) <= max_q {
                out.push((p, ell));
                ell += 1;
            }
        }
        out
    }

    #[test]
    fn construction_errors() {
        assert_eq!(make_field(2, 1).unwrap_err(), Error::EvenCharacteristic(2));
        assert_eq!(make_field(9, 1).unwrap_err(), Error::NonPrime(9));
        assert_eq!(make_field(4, 1).unwrap_err(), Error::NonPrime(4));
        assert_eq!(make_field(5, 0).unwrap_err(), Error::BadDegree(0));
        assert!(matches!(
            make_field(3, 13),
            Err(Error::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn prime_field_basics() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(f5.q(), 5);
        assert_eq!(f5.mul(FqElem(2), FqElem(3)), FqElem(1));
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(f7.inv(FqElem(3)).unwrap(), FqElem(5));
        assert_eq!(f7.inv(FqElem::ZERO), Err(Error::DivisionByZero));
        assert_eq!(f5.trace(FqElem(3)), 3);
    }

    #[test]
    fn f9_modulus_and_arithmetic() {
        let f9 = make_field(3, 2).unwrap();
        // Monic quadratics X^2 + c1 X + c0 with no root in F_3, smallest (c0, c1) first.
        let mut expected = None;
        'outer: for c0 in 0..3u64 {
            for c1 in 0..3u64 {
                if (0..3u64).all(|x| (x * x + c1 * x + c0) % 3 != 0) {
                    expected = Some(vec![c0 as u32, c1 as u32]);
                    break 'outer;
                }
            }
        }
        assert_eq!(f9.modulus(), expected.unwrap().as_slice());
        assert_eq!(f9.modulus(), &[1, 0]);
        let x = f9.from_coeffs(&[0, 1]);
        assert_eq!(f9.mul(x, x), FqElem(2));
        assert_eq!(f9.trace(x), 0);
        assert_eq!(f9.trace(FqElem::ONE), 2);
    }

    #[test]
    fn eta_small_values() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(f5.eta(FqElem(4)), 1);
        assert_eq!(f5.eta(FqElem(2)), -1);
        for (p, ell) in all_odd_prime_powers(49) {
            assert_eq!(make_field(p, ell).unwrap().eta(FqElem::ZERO), 0);
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, ell) in all_odd_prime_powers(27) {
            let f = make_field(p, ell).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), FqElem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FqElem::ONE);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.mul(a, b), FqElem(f.slow_mul(a.0, b.0)));
                    for c in f.elements().step_by(3) {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn eta_properties_exhaustive() {
        for (p, ell) in all_odd_prime_powers(49) {
            let f = make_field(p, ell).unwrap();
            let q = f.q();
            // Squares by enumeration, independent of the log tables.
            let mut is_square = vec![false; q as usize];
            for a in f.nonzero_elements() {
                is_square[FqElem(f.slow_mul(a.0, a.0)).0 as usize] = true;
            }
            let plus = f.nonzero_elements().filter(|&a| f.eta(a) == 1).count();
            let minus = f.nonzero_elements().filter(|&a| f.eta(a) == -1).count();
            assert_eq!(plus, (q as usize - 1) / 2);
            assert_eq!(minus, (q as usize - 1) / 2);
            for a in f.nonzero_elements() {
                assert_eq!(f.eta(a) == 1, is_square[a.0 as usize]);
                // Euler's criterion.
                let e = f.pow(a, (q as u64 - 1) / 2);
                assert_eq!(e == FqElem::ONE, f.eta(a) == 1);
                for b in f.nonzero_elements() {
                    assert_eq!(f.eta(f.mul(a, b)), f.eta(a) * f.eta(b));
                    assert_eq!(f.eta(f.mul(f.square(b), a)), f.eta(a));
                }
            }
            assert_eq!(f.eta(f.neg(FqElem::ONE)), f.eta_minus_one());
        }
    }

    #[test]
    fn trace_linear_and_surjective() {
        for (p, ell) in all_odd_prime_powers(125) {
            let f = make_field(p, ell).unwrap();
            let mut hit = vec![false; p as usize];
            for a in f.elements() {
                let t = f.trace(a);
                assert!(t < f.p());
                hit[t as usize] = true;
                for b in f.elements().step_by(7) {
                    for alpha in 0..p as i64 {
                        let lhs = f.trace(f.add(f.mul(f.from_int(alpha), a), b));
                        let rhs = (alpha as u64 * t as u64 + f.trace(b) as u64) % p;
                        assert_eq!(lhs as u64, rhs);
                    }
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn coeff_roundtrip() {
        let f = make_field(5, 3).unwrap();
        for a in f.elements() {
            let c: Vec<u64> = f.coeffs(a).iter().map(|&x| x as u64).collect();
            assert_eq!(f.from_coeffs(&c), a);
        }
    }
}
