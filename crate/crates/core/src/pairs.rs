//! Ordered-pair statistics SQ(A) and ZR(A).
//!
//! SQ counts pairs (x, y) ∈ A×A with η(‖x−y‖) = 1 and ZR those with
//! ‖x−y‖ = 0 (the diagonal included). [`count_pairs`] is the brute-force
//! oracle; [`predict_from_spectrum`] recovers the same integers from the
//! spectral masses.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::{chi, gauss_direct, signs_for, Cpx};
use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::geometry::{
    check_enumeration, cone_norm, distance, norm, write_vec_from_index, PointSet,
};
use crate::spectral::{dft_indicator, is_integral, rat, rat_int, rat_pow, Rat, SpectralMass};

/// Cap on the number of ordered pairs a brute-force loop may visit.
pub const PAIR_CAP: u128 = 1_000_000_000;

/// Cap on q^d for the numeric master-formula check.
pub const MASTER_CAP: u128 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub sq: u64,
    pub zr: u64,
    pub nonsq: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.sq + self.zr + self.nonsq
    }

    /// SQ + ZR/2 as an exact rational.
    pub fn half_sum(&self) -> Rat {
        rat_int(self.sq) + rat(self.zr, 2u32)
    }
}

fn check_pairs(n: u128) -> Result<()> {
    let pairs = n * n;
    if pairs > PAIR_CAP {
        return Err(Error::TooManyPairs {
            pairs,
            cap: PAIR_CAP,
        });
    }
    Ok(())
}

/// Brute-force SQ, ZR and the non-square count over all ordered pairs.
pub fn count_pairs(a: &PointSet) -> Result<PairCounts> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    check_pairs(a.len() as u128)?;
    let ctx = a.field();
    let [sq, zr, nonsq] = (0..a.len())
        .into_par_iter()
        .map(|i| {
            let x = a.point(i);
            let mut acc = [0u64; 3];
            for y in a.iter() {
                match ctx.eta(distance(ctx, x, y)) {
                    1 => acc[0] += 1,
                    0 => acc[1] += 1,
                    _ => acc[2] += 1,
                }
            }
            acc
        })
        .reduce(|| [0; 3], |l, r| [l[0] + r[0], l[1] + r[1], l[2] + r[2]]);
    Ok(PairCounts { sq, zr, nonsq })
}

/// Pairs of the lift E = A × F_q whose difference lies on the cone C_{d+1},
/// counted directly, next to the value q(2·SQ + ZR) predicted from `counts`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConeLift {
    pub cone_incidences: u64,
    pub predicted: u64,
}

impl ConeLift {
    pub fn holds(&self) -> bool {
        self.cone_incidences == self.predicted
    }
}

pub fn cone_lift_check(a: &PointSet, counts: &PairCounts) -> Result<ConeLift> {
    let q = a.field().q() as u64;
    check_pairs(a.len() as u128 * q as u128)?;
    let e = a.product_lift()?;
    let ctx = e.field();
    let n = e.dim();
    let incidences: u64 = (0..e.len())
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
                        cone_norm(ctx, diff).map(|c| c.is_zero()).unwrap_or(false)
                    })
                    .count() as u64
            },
        )
        .sum();
    Ok(ConeLift {
        cone_incidences: incidences,
        predicted: q * (2 * counts.sq + counts.zr),
    })
}

/// The two exact halves recovered from the spectrum: SQ + ZR/2 and ZR/2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralHalves {
    pub half_sum: Rat,
    pub half_zr: Rat,
}

/// SQ + ZR/2 and ZR/2 from Ω⁰, Ω⁺, Ω⁻.
///
/// With τ(n) = η(−1)G_1^n/q^{n/2} and σ(n) = G_1^n/q^{n/2}:
///
/// odd d ≥ 3:
///   SQ + ZR/2 = |A|²/2 + τ(d+1)·q^{(3d+1)/2}Ω⁰/2 − τ(d+1)·q^{(d−1)/2}|A|/2
///   ZR/2      = |A|²/2q + τ(d+1)·q^{(3d−1)/2}(Ω⁺ − Ω⁻)/2
///
/// even d ≥ 2:
///   SQ + ZR/2 = |A|²/2 + σ(d+2)·q^{3d/2}(Ω⁺ − Ω⁻)/2
///   ZR/2      = |A|²/2q + σ(d)·q^{3d/2}Ω⁰/2 − σ(d)·q^{(d−2)/2}|A|/2
pub fn spectral_halves(size: usize, q: u32, d: usize, m: &SpectralMass) -> Result<SpectralHalves> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let a = rat_int(size as u64);
    let a2 = &a * &a;
    let half = rat(1, 2);
    let di = d as i64;
    let (half_sum, half_zr) = if d % 2 == 1 {
        let tau = rat_int(signs_for(d as u32 + 1, q)?.tau);
        let hs = &a2 * &half + &tau * rat_pow(q, (3 * di + 1) / 2) * &m.omega0 * &half
            - &tau * rat_pow(q, (di - 1) / 2) * &a * &half;
        let hz = &a2 / rat_int(2 * q)
            + &tau * rat_pow(q, (3 * di - 1) / 2) * (&m.omega_plus - &m.omega_minus) * &half;
        (hs, hz)
    } else {
        let s2 = rat_int(signs_for(d as u32 + 2, q)?.sigma);
        let s0 = rat_int(signs_for(d as u32, q)?.sigma);
        let hs =
            &a2 * &half + s2 * rat_pow(q, 3 * di / 2) * (&m.omega_plus - &m.omega_minus) * &half;
        let hz = &a2 / rat_int(2 * q) + &s0 * rat_pow(q, 3 * di / 2) * &m.omega0 * &half
            - &s0 * rat_pow(q, (di - 2) / 2) * &a * &half;
        (hs, hz)
    };
    Ok(SpectralHalves { half_sum, half_zr })
}

fn to_count(r: &Rat, what: &str) -> Result<u64> {
    if !is_integral(r) || r.is_negative() {
        return Err(Error::NonIntegral(format!(
            "{what} = {}/{}",
            r.numer(),
            r.denom()
        )));
    }
    r.numer()
        .to_u64()
        .ok_or_else(|| Error::NonIntegral(format!("{what} out of range")))
}

/// SQ and ZR predicted exactly from the spectral masses of `a`.
pub fn predict_from_spectrum(a: &PointSet, m: &SpectralMass) -> Result<PairCounts> {
    let q = a.field().q();
    let halves = spectral_halves(a.len(), q, a.dim(), m)?;
    let zr = to_count(&(&halves.half_zr * rat_int(2)), "ZR")?;
    let sq = to_count(&(&halves.half_sum - &halves.half_zr), "SQ")?;
    let total = BigInt::from(a.len() as u64).pow(2);
    let nonsq = to_count(
        &Rat::from_integer(total - BigInt::from(sq) - BigInt::from(zr)),
        "non-square count",
    )?;
    Ok(PairCounts { sq, zr, nonsq })
}

/// Numeric right-hand side of
/// SQ + ZR/2 = |A|²/2 + (q^{d−1} η^d(−1) G_1^{d+1} / 2) Σ_m Σ_{s≠0} η^{d+1}(s) χ(s‖m‖) |Â(m)|².
pub fn master_formula_rhs(a: &PointSet) -> Result<Cpx> {
    let ctx = a.field();
    let d = a.dim();
    check_enumeration(ctx, d, MASTER_CAP)?;
    let transform = dft_indicator(a)?;
    // The inner sum depends on ‖m‖ only.
    let inner: Vec<Cpx> = ctx
        .elements()
        .map(|t| {
            ctx.nonzero_elements()
                .map(|s| {
                    let w = if (d + 1) % 2 == 0 {
                        1.0
                    } else {
                        ctx.eta(s) as f64
                    };
                    chi(ctx, ctx.mul(s, t)) * w
                })
                .sum()
        })
        .collect();
    let mut buf = vec![FqElem::ZERO; d];
    let mut total = Cpx::new(0.0, 0.0);
    for (idx, z) in transform.iter().enumerate() {
        write_vec_from_index(ctx, idx as u64, &mut buf);
        total += inner[norm(ctx, &buf).idx() as usize] * z.norm_sqr();
    }
    let q = ctx.q() as f64;
    let eta_d = if d % 2 == 1 {
        ctx.eta_minus_one() as f64
    } else {
        1.0
    };
    let g = gauss_direct(ctx, FqElem::ONE)?.powi(d as i32 + 1);
    let n = a.len() as f64;
    Ok(Cpx::new(n * n / 2.0, 0.0) + g * total * (q.powi(d as i32 - 1) * eta_d / 2.0))
}

/// |numeric RHS − (SQ + ZR/2)| with the left side taken from `counts`.
pub fn master_formula_check(a: &PointSet, counts: &PairCounts) -> Result<f64> {
    let rhs = master_formula_rhs(a)?;
    let lhs = counts.sq as f64 + counts.zr as f64 / 2.0;
    Ok((rhs - Cpx::new(lhs, 0.0)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::geometry::{space_size, vec_from_index};
    use crate::spectral::{build_kernels, spectral_masses_exact};

    fn v(xs: &[u32]) -> Vec<FqElem> {
        xs.iter().map(|&x| FqElem(x)).collect()
    }

    #[test]
    fn count_examples() {
        let f3 = make_field(3, 1).unwrap();
        let single = PointSet::new(f3.clone(), 2, vec![v(&[1, 2])]).unwrap();
        assert_eq!(
            count_pairs(&single).unwrap(),
            PairCounts {
                sq: 0,
                zr: 1,
                nonsq: 0
            }
        );

        // Norm distribution of F_3^2 by enumeration: N_0, N_1, N_2.
        let mut dist = [0u64; 3];
        for idx in 0..9 {
            dist[norm(&f3, &vec_from_index(&f3, 2, idx)).idx() as usize] += 1;
        }
        assert_eq!(dist, [1, 4, 4]);
        let full = PointSet::full_space(f3.clone(), 2).unwrap();
        let c = count_pairs(&full).unwrap();
        assert_eq!((c.sq, c.zr), (9 * dist[1], 9 * dist[0]));
        assert_eq!((c.sq, c.zr), (36, 9));

        let three = PointSet::new(f3.clone(), 2, vec![v(&[0, 0]), v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(
            count_pairs(&three).unwrap(),
            PairCounts {
                sq: 4,
                zr: 3,
                nonsq: 2
            }
        );

        let empty = PointSet::new(f3, 2, Vec::new()).unwrap();
        assert_eq!(count_pairs(&empty), Err(Error::EmptySet));
    }

    #[test]
    fn pair_cap() {
        let f = make_field(101, 1).unwrap();
        let a = PointSet::full_space(f, 3).unwrap();
        assert!(matches!(count_pairs(&a), Err(Error::TooManyPairs { .. })));
    }

    #[test]
    fn cone_lift_examples() {
        let f3 = make_field(3, 1).unwrap();
        let single = PointSet::new(f3.clone(), 2, vec![v(&[0, 0])]).unwrap();
        let c = count_pairs(&single).unwrap();
        assert_eq!(
            cone_lift_check(&single, &c).unwrap(),
            ConeLift {
                cone_incidences: 3,
                predicted: 3
            }
        );

        let two = PointSet::new(f3.clone(), 2, vec![v(&[0, 0]), v(&[1, 0])]).unwrap();
        let c = count_pairs(&two).unwrap();
        assert_eq!(cone_lift_check(&two, &c).unwrap().cone_incidences, 18);

        let full = PointSet::full_space(f3.clone(), 2).unwrap();
        let c = count_pairs(&full).unwrap();
        let lift = cone_lift_check(&full, &c).unwrap();
        assert_eq!(lift.cone_incidences, 243);
        assert!(lift.holds());
    }

    #[test]
    fn prediction_full_spaces() {
        let f3 = make_field(3, 1).unwrap();
        let k2 = build_kernels(&f3, 2).unwrap();
        let full = PointSet::full_space(f3.clone(), 2).unwrap();
        let m = spectral_masses_exact(&full, &k2).unwrap();
        let h = spectral_halves(9, 3, 2, &m).unwrap();
        assert_eq!(h.half_sum, rat(81, 2));
        assert_eq!(h.half_zr, rat(9, 2));
        assert_eq!(
            predict_from_spectrum(&full, &m).unwrap(),
            PairCounts {
                sq: 36,
                zr: 9,
                nonsq: 36
            }
        );

        let k3 = build_kernels(&f3, 3).unwrap();
        let full3 = PointSet::full_space(f3.clone(), 3).unwrap();
        let m3 = spectral_masses_exact(&full3, &k3).unwrap();
        let predicted = predict_from_spectrum(&full3, &m3).unwrap();
        assert_eq!((predicted.sq, predicted.zr), (162, 243));
        assert_eq!(predicted, count_pairs(&full3).unwrap());
    }

    #[test]
    fn prediction_rejects_line() {
        let f5 = make_field(5, 1).unwrap();
        let k = build_kernels(&f5, 1).unwrap();
        let a = PointSet::from_indices(f5, 1, [0, 1, 3]).unwrap();
        let m = spectral_masses_exact(&a, &k).unwrap();
        assert_eq!(
            predict_from_spectrum(&a, &m),
            Err(Error::UnsupportedDimension(1))
        );
    }

    #[test]
    fn prediction_matches_on_strided_sets() {
        for (p, ell, d) in [
            (3u64, 1u32, 2usize),
            (5, 1, 2),
            (3, 1, 3),
            (3, 2, 2),
            (3, 1, 4),
        ] {
            let f = make_field(p, ell).unwrap();
            let k = build_kernels(&f, d).unwrap();
            let n = space_size(&f, d) as u64;
            for stride in [1u64, 2, 3, 4, 7, 11] {
                for offset in 0..stride.min(3) {
                    let a =
                        PointSet::from_indices(f.clone(), d, (offset..n).step_by(stride as usize))
                            .unwrap();
                    let m = spectral_masses_exact(&a, &k).unwrap();
                    assert_eq!(
                        predict_from_spectrum(&a, &m).unwrap(),
                        count_pairs(&a).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn master_formula_full_space() {
        let f3 = make_field(3, 1).unwrap();
        let full = PointSet::full_space(f3, 2).unwrap();
        let c = count_pairs(&full).unwrap();
        assert!(master_formula_check(&full, &c).unwrap() < 1e-9);
    }
}
