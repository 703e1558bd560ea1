//! Exact upper bounds on SQ + ZR and SQ, and on the size of square-distance
//! sets, dispatched on (d mod 4, q mod 4).
//!
//! Every exponent that appears is an integer under its clause's parity
//! hypothesis, so all bounds are exact rationals and comparisons carry no
//! tolerance. Equality cases do occur (full spaces, lines) and must compare
//! as equal.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{distance, PointSet};
use crate::pairs::{count_pairs, PairCounts};
use crate::spectral::{rat_int, rat_pow, rat_string, Rat};

fn ser_rat<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(r))
}

/// Which statement a report evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Statement {
    /// Upper bound on SQ + ZR.
    PairSumBound,
    /// Upper bound on SQ in odd dimensions.
    OddSquareBound,
    /// Upper bound on SQ in even dimensions.
    EvenSquareBound,
    /// The unconditional even-dimension SQ bound.
    EvenSquareLemma,
    /// Size bound for square-distance sets.
    SquareSetSize,
}

/// Clause selected by (d mod 4, q mod 4).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseTag {
    pub statement: Statement,
    pub d_mod4: u8,
    pub q_mod4: u8,
    pub clause: u8,
}

/// Which sub-expression produced the bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind", content = "index")]
pub enum Branch {
    Single,
    /// |A| strictly above the size threshold.
    LargeSet,
    /// |A| strictly below the size threshold.
    SmallSet,
    /// |A| exactly at the threshold; both bounds apply and the smaller is reported.
    Threshold,
    /// Index (0-based) of the minimizing term of a minimum.
    Argmin(u8),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub case: CaseTag,
    #[serde(serialize_with = "ser_rat")]
    pub lhs: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub rhs: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub slack: Rat,
    pub holds: bool,
    pub branch: Branch,
}

impl BoundReport {
    fn new(case: CaseTag, lhs: Rat, rhs: Rat, branch: Branch) -> BoundReport {
        let slack = &rhs - &lhs;
        let holds = slack >= rat_int(0);
        BoundReport {
            case,
            lhs,
            rhs,
            slack,
            holds,
            branch,
        }
    }
}

/// q^{num/2}, where `num` must be even.
fn qh(q: u32, num: i64) -> Rat {
    assert!(
        num % 2 == 0,
        "half-integer exponent {num}/2 under an integral clause"
    );
    rat_pow(q, num / 2)
}

fn check_q(q: u32) {
    assert!(q % 2 == 1, "q must be odd");
}

/// Clause (1..=4) of the SQ + ZR bound and the square-set size bound.
pub fn pair_sum_clause(d: usize, q: u32) -> Result<u8> {
    if d < 2 {
        return Err(Error::UnsupportedCase(d));
    }
    check_q(q);
    let q3 = q % 4 == 3;
    Ok(match (d % 4, q3) {
        (3, true) => 1,
        (1, _) | (3, false) => 2,
        (2, true) => 3,
        _ => 4,
    })
}

fn tag(statement: Statement, d: usize, q: u32, clause: u8) -> CaseTag {
    CaseTag {
        statement,
        d_mod4: (d % 4) as u8,
        q_mod4: (q % 4) as u8,
        clause,
    }
}

/// Upper bound on SQ(A) + ZR(A).
pub fn theorem12_bound(d: usize, q: u32, size: u64) -> Result<Rat> {
    let clause = pair_sum_clause(d, q)?;
    let a = rat_int(size);
    let a2 = &a * &a;
    let di = d as i64;
    let base = &a2 / rat_int(2) + &a2 / rat_int(2 * q as u64);
    Ok(match clause {
        1 => {
            base - &a2 / (rat_int(2) * qh(q, di - 1)) - &a2 / (rat_int(2) * qh(q, di + 1))
                + qh(q, di - 1) * &a
        }
        2 => base + qh(q, di + 1) * &a / rat_int(2) - qh(q, di - 1) * &a / rat_int(2),
        3 => base - &a2 / qh(q, di) + qh(q, di) * &a / rat_int(2) + qh(q, di - 2) * &a / rat_int(2),
        _ => base + qh(q, di) * &a / rat_int(2) - qh(q, di - 2) * &a / rat_int(2),
    })
}

/// Compares |A| with a rational threshold and evaluates the matching branch;
/// at equality both branches apply and the smaller bound is returned.
fn threshold_branch(size: u64, threshold: &Rat, large: Rat, small: Rat) -> (Rat, Branch) {
    let a = rat_int(size);
    if a > *threshold {
        (large, Branch::LargeSet)
    } else if a < *threshold {
        (small, Branch::SmallSet)
    } else if large <= small {
        (large, Branch::Threshold)
    } else {
        (small, Branch::Threshold)
    }
}

/// (q^{(d+1)/2} + q) / (1 + q^{−(d−1)/2}) for odd d.
pub fn odd_threshold(d: usize, q: u32) -> Rat {
    let di = d as i64;
    (qh(q, di + 1) + rat_int(q)) / (rat_int(1) + qh(q, -(di - 1)))
}

/// (q^{d/2} + q) / (1 + q^{−(d−2)/2}) for even d.
pub fn even_threshold(d: usize, q: u32) -> Rat {
    let di = d as i64;
    (qh(q, di) + rat_int(q)) / (rat_int(1) + qh(q, -(di - 2)))
}

/// Upper bound on SQ(A) for odd d ≥ 3.
pub fn theorem13_bound(d: usize, q: u32, size: u64) -> Result<(Rat, Branch)> {
    if d % 2 == 0 {
        return Err(Error::WrongParity {
            d,
            expected: "odd d >= 3",
        });
    }
    if d < 3 {
        return Err(Error::UnsupportedCase(d));
    }
    check_q(q);
    let a = rat_int(size);
    let a2 = &a * &a;
    let di = d as i64;
    let two = rat_int(2);
    if d % 4 == 3 && q % 4 == 3 {
        let large = &a2 / &two + qh(q, di - 1) * &a
            - &a2 / rat_int(2 * q as u64)
            - &a2 / (&two * qh(q, di - 1))
            - &a2 / (&two * qh(q, di + 1));
        let small =
            &a2 / &two + qh(q, di - 1) * &a / &two - &a2 / (&two * qh(q, di - 1)) - &a / &two;
        Ok(threshold_branch(size, &odd_threshold(d, q), large, small))
    } else {
        let terms = [
            qh(q, di + 1) * &a / &two,
            qh(q, di - 1) * &a / &two + &a2 / &two,
            &a / &two + qh(q, di + 1) * &a / &two - &a2 / rat_int(2 * q as u64),
        ];
        let (idx, min) = terms
            .iter()
            .enumerate()
            .fold(
                (0usize, &terms[0]),
                |best, (i, t)| if t < best.1 { (i, t) } else { best },
            );
        let bound = &a2 / &two - qh(q, di - 1) * &a / &two - &a / &two + min;
        Ok((bound, Branch::Argmin(idx as u8)))
    }
}

/// Upper bound on SQ(A) for even d ≥ 2.
pub fn theorem14_bound(d: usize, q: u32, size: u64) -> Result<(Rat, Branch)> {
    if d % 2 == 1 || d == 0 {
        return Err(Error::WrongParity {
            d,
            expected: "even d >= 2",
        });
    }
    check_q(q);
    let a = rat_int(size);
    let a2 = &a * &a;
    let di = d as i64;
    let two = rat_int(2);
    if d % 4 == 2 && q % 4 == 3 {
        let b = &a2 / &two + qh(q, di) * &a / &two
            - &a2 / rat_int(2 * q as u64)
            - qh(q, di - 2) * &a / &two;
        Ok((b, Branch::Single))
    } else {
        let large =
            &a2 / &two + qh(q, di) * &a / &two - &a2 / qh(q, di) - &a2 / rat_int(2 * q as u64)
                + qh(q, di - 2) * &a / &two;
        let small = lemma61_bound(d, q, size)?;
        Ok(threshold_branch(size, &even_threshold(d, q), large, small))
    }
}

/// SQ(A) ≤ |A|²/2 + q^{d/2}|A|/2 − |A|²/(2q^{d/2}) − |A|/2 for even d ≥ 2.
pub fn lemma61_bound(d: usize, q: u32, size: u64) -> Result<Rat> {
    if d % 2 == 1 || d == 0 {
        return Err(Error::WrongParity {
            d,
            expected: "even d >= 2",
        });
    }
    let a = rat_int(size);
    let a2 = &a * &a;
    let di = d as i64;
    let two = rat_int(2);
    Ok(&a2 / &two + qh(q, di) * &a / &two - &a2 / (&two * qh(q, di)) - &a / &two)
}

/// Largest possible size of a square-distance set in F_q^d.
pub fn corollary13_size_bound(d: usize, q: u32) -> Result<Rat> {
    let clause = pair_sum_clause(d, q)?;
    let di = d as i64;
    let qr = rat_int(q);
    Ok(match clause {
        1 => {
            rat_int(2) * qh(q, di + 1) / (&qr - rat_int(1) + (&qr + rat_int(1)) * qh(q, -(di - 1)))
        }
        2 => qh(q, di + 1),
        3 => {
            qh(q, di)
                + rat_int(2) * (qh(q, di) - &qr)
                    / (&qr - rat_int(1) + rat_int(2) * qh(q, -(di - 2)))
        }
        _ => qh(q, di),
    })
}

/// True when every pairwise distance in `a` is zero or a nonzero square.
pub fn is_square_distance_set(a: &PointSet) -> bool {
    let ctx = a.field();
    (0..a.len()).all(|i| {
        let x = a.point(i);
        (i + 1..a.len()).all(|j| ctx.eta(distance(ctx, x, a.point(j))) >= 0)
    })
}

/// Every applicable bound for `a`, with the measured sides from `counts`.
pub fn check_with_counts(a: &PointSet, counts: &PairCounts) -> Result<Vec<BoundReport>> {
    let d = a.dim();
    let q = a.field().q();
    let size = a.len() as u64;
    let mut out = Vec::new();

    let clause = pair_sum_clause(d, q)?;
    out.push(BoundReport::new(
        tag(Statement::PairSumBound, d, q, clause),
        rat_int(counts.sq + counts.zr),
        theorem12_bound(d, q, size)?,
        Branch::Single,
    ));

    let sq = rat_int(counts.sq);
    if d % 2 == 1 {
        let (rhs, branch) = theorem13_bound(d, q, size)?;
        let clause = if d % 4 == 3 && q % 4 == 3 { 1 } else { 2 };
        out.push(BoundReport::new(
            tag(Statement::OddSquareBound, d, q, clause),
            sq,
            rhs,
            branch,
        ));
    } else {
        let (rhs, branch) = theorem14_bound(d, q, size)?;
        let clause = if d % 4 == 2 && q % 4 == 3 { 1 } else { 2 };
        out.push(BoundReport::new(
            tag(Statement::EvenSquareBound, d, q, clause),
            sq.clone(),
            rhs,
            branch,
        ));
        out.push(BoundReport::new(
            tag(Statement::EvenSquareLemma, d, q, 1),
            sq,
            lemma61_bound(d, q, size)?,
            Branch::Single,
        ));
    }

    if counts.nonsq == 0 {
        out.push(BoundReport::new(
            tag(Statement::SquareSetSize, d, q, clause),
            rat_int(size),
            corollary13_size_bound(d, q)?,
            Branch::Single,
        ));
    }
    Ok(out)
}

/// Every applicable bound for `a`, counting pairs by brute force.
pub fn check_all(a: &PointSet) -> Result<Vec<BoundReport>> {
    if a.dim() < 2 {
        return Err(Error::UnsupportedCase(a.dim()));
    }
    let counts = count_pairs(a)?;
    check_with_counts(a, &counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FqElem};
    use crate::spectral::rat;

    #[test]
    fn theorem12_examples() {
        assert_eq!(theorem12_bound(3, 3, 27).unwrap(), rat_int(405));
        assert_eq!(pair_sum_clause(3, 3).unwrap(), 1);
        assert_eq!(theorem12_bound(2, 3, 9).unwrap(), rat_int(45));
        assert_eq!(pair_sum_clause(2, 3).unwrap(), 3);
        assert_eq!(theorem12_bound(2, 5, 25).unwrap(), rat_int(425));
        assert_eq!(pair_sum_clause(2, 5).unwrap(), 4);
        assert_eq!(theorem12_bound(3, 5, 125).unwrap(), rat_int(10625));
        assert_eq!(theorem12_bound(1, 5, 3), Err(Error::UnsupportedCase(1)));
    }

    #[test]
    fn theorem13_examples() {
        assert_eq!(odd_threshold(3, 3), rat_int(9));
        let (b, branch) = theorem13_bound(3, 3, 27).unwrap();
        // 729/2 + 3·27 − 729/6 − 729/6 − 729/18
        assert_eq!(
            b,
            rat(729, 2) + rat_int(81) - rat(729, 6) - rat(729, 6) - rat(729, 18)
        );
        assert_eq!(b, rat_int(162));
        assert_eq!(branch, Branch::LargeSet);

        let (b, branch) = theorem13_bound(3, 5, 125).unwrap();
        let a = 125i64;
        let terms = [
            rat(25 * a, 2),
            rat(5 * a, 2) + rat(a * a, 2),
            rat(a, 2) + rat(25 * a, 2) - rat(a * a, 10),
        ];
        let min = terms.iter().min().unwrap().clone();
        assert_eq!(b, rat(a * a, 2) - rat(5 * a, 2) - rat(a, 2) + min);
        assert_eq!(branch, Branch::Argmin(2));
        assert!(rat_int(7500) <= b);

        assert!(matches!(
            theorem13_bound(2, 3, 4),
            Err(Error::WrongParity { .. })
        ));
        assert_eq!(theorem13_bound(1, 3, 2), Err(Error::UnsupportedCase(1)));
    }

    #[test]
    fn threshold_equality_uses_both() {
        // |A| = 9 sits exactly on the (d, q) = (3, 3) threshold.
        let (b, branch) = theorem13_bound(3, 3, 9).unwrap();
        assert_eq!(branch, Branch::Threshold);
        let a = rat_int(9);
        let large = &a * &a / rat_int(2) + rat_int(3) * &a
            - &a * &a / rat_int(6)
            - &a * &a / rat_int(6)
            - &a * &a / rat_int(18);
        let small = &a * &a / rat_int(2) + rat_int(3) * &a / rat_int(2)
            - &a * &a / rat_int(6)
            - &a / rat_int(2);
        assert_eq!(b, large.min(small));
    }

    #[test]
    fn theorem14_examples() {
        let (b, branch) = theorem14_bound(2, 3, 9).unwrap();
        assert_eq!(b, rat_int(36));
        assert_eq!(branch, Branch::Single);
        assert_eq!(even_threshold(2, 5), rat_int(5));
        let (b, branch) = theorem14_bound(2, 5, 25).unwrap();
        assert_eq!(b, rat_int(200));
        assert_eq!(branch, Branch::LargeSet);
        let (_, branch) = theorem14_bound(2, 5, 3).unwrap();
        assert_eq!(branch, Branch::SmallSet);
        assert!(matches!(
            theorem14_bound(3, 5, 3),
            Err(Error::WrongParity { .. })
        ));
    }

    #[test]
    fn lemma61_examples() {
        assert_eq!(lemma61_bound(2, 3, 9).unwrap(), rat_int(36));
        assert_eq!(lemma61_bound(2, 5, 5).unwrap(), rat_int(20));
        assert!(lemma61_bound(2, 7, 1).unwrap() >= rat_int(0));
        assert!(lemma61_bound(3, 7, 1).is_err());
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(corollary13_size_bound(2, 5).unwrap(), rat_int(5));
        assert_eq!(corollary13_size_bound(3, 5).unwrap(), rat_int(25));
        assert_eq!(corollary13_size_bound(3, 3).unwrap(), rat(27, 5));
        assert_eq!(corollary13_size_bound(2, 3).unwrap(), rat_int(3));
        assert_eq!(corollary13_size_bound(1, 3), Err(Error::UnsupportedCase(1)));
    }

    #[test]
    fn square_distance_examples() {
        let f5 = make_field(5, 1).unwrap();
        let line =
            PointSet::new(f5.clone(), 2, f5.elements().map(|t| vec![t, FqElem::ZERO])).unwrap();
        assert!(is_square_distance_set(&line));
        assert_eq!(
            rat_int(line.len() as u64),
            corollary13_size_bound(2, 5).unwrap()
        );

        let f3 = make_field(3, 1).unwrap();
        assert!(!is_square_distance_set(
            &PointSet::full_space(f3.clone(), 2).unwrap()
        ));
        assert!(is_square_distance_set(
            &PointSet::from_indices(f3, 2, [4]).unwrap()
        ));
    }

    #[test]
    fn check_all_full_spaces() {
        let f3 = make_field(3, 1).unwrap();
        let r = check_all(&PointSet::full_space(f3.clone(), 2).unwrap()).unwrap();
        assert_eq!(r[0].lhs, rat_int(45));
        assert_eq!(r[0].slack, rat_int(0));
        assert!(r.iter().all(|x| x.holds));
        let r = check_all(&PointSet::full_space(f3, 3).unwrap()).unwrap();
        assert_eq!(r[0].slack, rat_int(0));
        assert!(r.iter().all(|x| x.holds));
    }

    #[test]
    fn report_serializes_rationals_as_strings() {
        let f3 = make_field(3, 1).unwrap();
        let r = check_all(&PointSet::full_space(f3, 2).unwrap()).unwrap();
        let json = serde_json::to_value(&r[0]).unwrap();
        assert_eq!(json["rhs"], "45/1");
        assert_eq!(json["case"]["clause"], 3);
    }
}
