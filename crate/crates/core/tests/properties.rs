use std::sync::Arc;

use proptest::prelude::*;

use fq_distance::bounds::{check_all, corollary13_size_bound, is_square_distance_set};
use fq_distance::geometry::{space_size, vec_from_index};
use fq_distance::io::{format_point_set, parse_point_set};
use fq_distance::pairs::{cone_lift_check, count_pairs, predict_from_spectrum, PairCounts};
use fq_distance::spectral::{build_kernels, rat_int, spectral_masses_exact, KernelTable};
use fq_distance::{make_field, FieldCtx, FqElem, PointSet};

/// Fields and dimensions small enough for exhaustive kernels.
const CELLS: [(u64, u32, usize); 8] = [
    (3, 1, 2),
    (5, 1, 2),
    (7, 1, 2),
    (3, 2, 2),
    (3, 1, 3),
    (5, 1, 3),
    (3, 1, 4),
    (3, 2, 3),
];

fn cell(i: usize) -> (Arc<FieldCtx>, usize) {
    let (p, ell, d) = CELLS[i];
    (make_field(p, ell).unwrap(), d)
}

fn kernels() -> &'static [KernelTable] {
    static K: std::sync::OnceLock<Vec<KernelTable>> = std::sync::OnceLock::new();
    K.get_or_init(|| {
        (0..CELLS.len())
            .map(|i| {
                let (f, d) = cell(i);
                build_kernels(&f, d).unwrap()
            })
            .collect()
    })
}

fn set_strategy() -> impl Strategy<Value = (usize, Vec<u64>)> {
    (0..CELLS.len()).prop_flat_map(|i| {
        let (f, d) = cell(i);
        let n = space_size(&f, d) as u64;
        (
            Just(i),
            prop::collection::vec(0..n, 1..(n as usize).min(120)),
        )
    })
}

/// Pair counts for prime q with plain integer arithmetic and Euler's criterion.
fn naive_counts(p: u64, pts: &[Vec<u64>]) -> PairCounts {
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut c = PairCounts {
        sq: 0,
        zr: 0,
        nonsq: 0,
    };
    for x in pts {
        for y in pts {
            let n: u64 = x
                .iter()
                .zip(y)
                .map(|(a, b)| (a + p - b) % p)
                .map(|t| t * t % p)
                .sum::<u64>()
                % p;
            if n == 0 {
                c.zr += 1;
            } else if pow(n, (p - 1) / 2) == 1 {
                c.sq += 1;
            } else {
                c.nonsq += 1;
            }
        }
    }
    c
}

fn shifted(f: &FieldCtx, a: &PointSet, t: &[FqElem]) -> PointSet {
    a.translate(t)
        .unwrap_or_else(|_| panic!("translate in {f:?}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spectral_prediction_matches_brute_force((i, idx) in set_strategy()) {
        let (f, d) = cell(i);
        let a = PointSet::from_indices(f, d, idx).unwrap();
        let mass = spectral_masses_exact(&a, &kernels()[i]).unwrap();
        prop_assert!(mass.invariant_violations(a.len(), a.field().q(), d).is_empty());
        let counts = count_pairs(&a).unwrap();
        prop_assert_eq!(predict_from_spectrum(&a, &mass).unwrap(), counts);
        prop_assert!(cone_lift_check(&a, &counts).unwrap().holds());
    }

    #[test]
    fn brute_force_matches_integer_oracle((i, idx) in set_strategy()) {
        let (f, d) = cell(i);
        prop_assume!(f.ell() == 1);
        let a = PointSet::from_indices(f.clone(), d, idx).unwrap();
        let raw: Vec<Vec<u64>> = a.iter().map(|v| v.iter().map(|x| x.idx() as u64).collect()).collect();
        prop_assert_eq!(count_pairs(&a).unwrap(), naive_counts(f.p() as u64, &raw));
    }

    #[test]
    fn counts_invariant_under_translation_and_scaling((i, idx) in set_strategy(), t in 0u64..10_000, c in 1u64..10_000) {
        let (f, d) = cell(i);
        let a = PointSet::from_indices(f.clone(), d, idx).unwrap();
        let base = count_pairs(&a).unwrap();
        let n = space_size(&f, d) as u64;
        let shift = vec_from_index(&f, d, t % n);
        prop_assert_eq!(count_pairs(&shifted(&f, &a, &shift)).unwrap(), base);
        let c = f.elem(1 + c % (f.q() as u64 - 1)).unwrap();
        let scaled = PointSet::new(f.clone(), d, a.iter().map(|v| v.iter().map(|&x| f.mul(c, x)).collect())).unwrap();
        prop_assert_eq!(count_pairs(&scaled).unwrap(), base);
    }

    #[test]
    fn bounds_hold_for_random_sets((i, idx) in set_strategy()) {
        let (f, d) = cell(i);
        let a = PointSet::from_indices(f, d, idx).unwrap();
        for r in check_all(&a).unwrap() {
            prop_assert!(r.holds, "{:?}", r);
            prop_assert_eq!(r.slack.clone(), &r.rhs - &r.lhs);
        }
    }

    #[test]
    fn square_distance_sets_respect_size_bound((i, idx) in set_strategy()) {
        let (f, d) = cell(i);
        // Prune greedily to a square-distance subset, then compare with the bound.
        let mut kept: Vec<u64> = Vec::new();
        for x in idx {
            let mut trial = kept.clone();
            trial.push(x);
            if is_square_distance_set(&PointSet::from_indices(f.clone(), d, trial.clone()).unwrap()) {
                kept = trial;
            }
        }
        let s = PointSet::from_indices(f.clone(), d, kept).unwrap();
        prop_assert!(rat_int(s.len() as u64) <= corollary13_size_bound(d, f.q()).unwrap());
        prop_assert_eq!(count_pairs(&s).unwrap().nonsq, 0);
    }

    #[test]
    fn file_format_round_trips((i, idx) in set_strategy()) {
        let (f, d) = cell(i);
        let a = PointSet::from_indices(f, d, idx).unwrap();
        prop_assert_eq!(parse_point_set(&format_point_set(&a)).unwrap(), a);
    }
}
