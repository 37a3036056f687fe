//! Exact order bookkeeping for ²G₂(q) and the inequality suite behind the
//! exclusion arguments.
//!
//! All quantities are exact integers: √(3q) = 3^{n+1} since q = 3^{2n+1}.
//! The ambient simple group has order q³(q³+1)(q−1), which factors over the
//! four cyclic Hall subgroups as q³·(q−1)·(q+1)·(q+1−√3q)·(q+1+√3q).

use super::{check_tower, LemmaReport, Status};
use crate::gf3m::{is_prime, FieldCtx, FieldError};

/// Per-field order table for the maximal-subgroup families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderTable {
    pub q: u64,
    /// √(3q) = 3^{n+1}, exact.
    pub sqrt3q: u64,
    /// Borel subgroup, q³(q−1).
    pub borel: u128,
    /// Involution centralizer, q(q²−1).
    pub involution_centralizer: u128,
    /// Cyclic Hall subgroup orders.
    pub hall_a0: u64,
    pub hall_a1: u64,
    pub hall_a2: u64,
    pub hall_a3: u64,
    /// Hall-normalizer orders: 2(q−1), 6(q+1), 6(q+1∓√3q).
    pub norm_a0: u128,
    pub norm_a1: u128,
    pub norm_a2: u128,
    pub norm_a3: u128,
    /// Sylow-2 normalizer: the elementary abelian 2³ has index 21, so 168.
    pub sylow2_normalizer: u128,
}

impl OrderTable {
    pub fn new(f: &FieldCtx) -> Result<OrderTable, FieldError> {
        let q = f.q();
        let qq = q as u128;
        let sqrt3q = 3u64.pow(f.n() as u32 + 1);
        let q3 = qq
            .checked_mul(qq)
            .and_then(|v| v.checked_mul(qq))
            .ok_or_else(|| FieldError::Domain("order table overflow".into()))?;
        Ok(OrderTable {
            q,
            sqrt3q,
            borel: q3 * (qq - 1),
            involution_centralizer: qq * (qq * qq - 1),
            hall_a0: (q - 1) / 2,
            hall_a1: (q + 1) / 4,
            hall_a2: q + 1 - sqrt3q,
            hall_a3: q + 1 + sqrt3q,
            norm_a0: 2 * (qq - 1),
            norm_a1: 6 * (qq + 1),
            norm_a2: 6 * (qq + 1 - sqrt3q as u128),
            norm_a3: 6 * (qq + 1 + sqrt3q as u128),
            sylow2_normalizer: 168,
        })
    }

    /// |²G₂(q)| = q³(q³+1)(q−1); known order data, not derived here.
    pub fn ree_group_order(q: u64) -> Option<u128> {
        let qq = q as u128;
        let q3 = qq.checked_mul(qq)?.checked_mul(qq)?;
        q3.checked_mul(q3.checked_add(1)?)?.checked_mul(qq - 1)
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Evaluates every closed-form order inequality used by the exclusion
/// arguments, with exact integer values on both sides.
pub fn exclusion_inequalities(f: &FieldCtx) -> Result<LemmaReport, FieldError> {
    if f.m() < 3 {
        return Err(FieldError::Domain(
            "the exclusion suite needs a non-prime field (m ≥ 3)".into(),
        ));
    }
    let t = OrderTable::new(f)?;
    let q = t.q as u128;
    let mut rep = LemmaReport::new("exclusion-inequalities", t.q);

    // order factorization across the Hall families
    let ree = OrderTable::ree_group_order(t.q)
        .ok_or_else(|| FieldError::Domain("order table overflow".into()))?;
    let factored = (q * q * q)
        * (q - 1)
        * (q + 1)
        * (t.hall_a2 as u128)
        * (t.hall_a3 as u128);
    rep.push("group-order-hall-factorization", ree, factored, "=", ree == factored);

    // the Hall orders are pairwise coprime
    let halls = [t.hall_a0, t.hall_a1, t.hall_a2, t.hall_a3];
    let coprime = (0..4).all(|i| (i + 1..4).all(|k| gcd_u64(halls[i], halls[k]) == 1));
    rep.push(
        "hall-orders-pairwise-coprime",
        format!("({}, {}, {}, {})", halls[0], halls[1], halls[2], halls[3]),
        "gcd = 1",
        "pairwise",
        coprime,
    );

    // a subgroup of the Borel avoiding order 9 is beaten by the involution
    // centralizer: q²(q−1) < q(q²−1)
    rep.push(
        "derived-cap-below-involution-centralizer",
        q * q * (q - 1),
        t.involution_centralizer,
        "<",
        q * q * (q - 1) < t.involution_centralizer,
    );

    // bounds against the four Hall normalizers
    rep.push("2q-below-na1", 2 * q, t.norm_a1, "<", 2 * q < t.norm_a1);
    rep.push("6-below-na1", 6u128, t.norm_a1, "<", 6 < t.norm_a1);
    rep.push(
        "sylow2-normalizer-at-most-na1",
        t.sylow2_normalizer,
        t.norm_a1,
        "<=",
        t.sylow2_normalizer <= t.norm_a1,
    );
    rep.push(
        "sylow2-normalizer-equals-na1-only-at-27",
        t.sylow2_normalizer,
        t.norm_a1,
        if t.q == 27 { "=" } else { "<" },
        if t.q == 27 {
            t.sylow2_normalizer == t.norm_a1
        } else {
            t.sylow2_normalizer < t.norm_a1
        },
    );
    rep.push("2q-below-na2", 2 * q, t.norm_a2, "<", 2 * q < t.norm_a2);
    rep.push("24-below-na2", 24u128, t.norm_a2, "<", 24 < t.norm_a2);
    rep.push("4-below-na0", 4u128, t.norm_a0, "<", 4 < t.norm_a0);

    // subfield-stabilizer comparisons, one family per proper prime tower
    for d0 in 1..f.m() {
        if f.m() % d0 != 0 {
            continue;
        }
        let r = f.m() / d0;
        if r < 3 || !is_prime(r as u64) {
            continue;
        }
        let q0 = 3u64.pow(d0 as u32);
        let ree0 = OrderTable::ree_group_order(q0)
            .ok_or_else(|| FieldError::Domain("order table overflow".into()))?;
        let sqrt3q0 = 3u128.pow((d0 as u32 + 1) / 2);
        let suffix = format!("-q0-{q0}");
        if r == 3 {
            rep.push(
                &format!("na1-below-subfield-stabilizer{suffix}"),
                t.norm_a1,
                ree0,
                "<",
                t.norm_a1 < ree0,
            );
        }
        rep.push(
            &format!("6(q0+1)-below-subfield-stabilizer{suffix}"),
            6 * (q0 as u128 + 1),
            ree0,
            "<",
            6 * (q0 as u128 + 1) < ree0,
        );
        // valid only for odd d0, where √(3q0) is an integer
        if d0 % 2 == 1 {
            let hall_bound = 6 * (q0 as u128 + sqrt3q0 + 1);
            rep.push(
                &format!("6(q0+sqrt(3q0)+1)-below-subfield-stabilizer{suffix}"),
                hall_bound,
                ree0,
                "<",
                hall_bound < ree0,
            );
        }
        rep.push(
            &format!("168-below-subfield-stabilizer{suffix}"),
            168u128,
            ree0,
            "<",
            168 < ree0,
        );
        rep.push(
            &format!("dihedral-below-subfield-stabilizer{suffix}"),
            2 * (q0 as u128 - 1),
            ree0,
            "<",
            2 * (q0 as u128 - 1) < ree0,
        );
        // the normalized subgroup N(E₀) is at least as large as the stabilizer
        if let Ok(rr) = check_tower(f, f.subfield(d0)?) {
            let _ = rr;
            let nge0 = q * q * q * (q0 as u128 - 1);
            rep.push(
                &format!("nge0-dominates-subfield-stabilizer{suffix}"),
                nge0,
                ree0,
                ">=",
                nge0 >= ree0,
            );
        }
    }

    // Hall order data lines
    rep.push("hall-a0", t.hall_a0, "(q-1)/2", "=", true);
    rep.push("hall-a1", t.hall_a1, "(q+1)/4", "=", true);
    rep.push("hall-a2", t.hall_a2, "q+1-sqrt(3q)", "=", true);
    rep.push("hall-a3", t.hall_a3, "q+1+sqrt(3q)", "=", true);

    if rep.lines.iter().all(|l| l.holds) {
        rep.status = Status::Pass;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_table_q27() {
        let f = FieldCtx::new(3).unwrap();
        let t = OrderTable::new(&f).unwrap();
        assert_eq!(t.sqrt3q, 9);
        assert_eq!(t.borel, 19_683 * 26);
        assert_eq!(t.involution_centralizer, 27 * 728);
        assert_eq!(
            (t.hall_a0, t.hall_a1, t.hall_a2, t.hall_a3),
            (13, 7, 19, 37)
        );
        assert_eq!(t.norm_a0, 52);
        assert_eq!(t.norm_a1, 168);
        assert_eq!(t.norm_a2, 114);
        assert_eq!(t.norm_a3, 222);
        assert_eq!(OrderTable::ree_group_order(3).unwrap(), 1_512);
        assert_eq!(
            OrderTable::ree_group_order(27).unwrap(),
            19_683u128 * 19_684 * 26
        );
    }

    #[test]
    fn inequalities_hold_at_desk_scales() {
        for m in [3usize, 5, 7] {
            let f = FieldCtx::new(m).unwrap();
            let rep = exclusion_inequalities(&f).unwrap();
            assert_eq!(rep.status, Status::Pass, "q = {}", f.q());
            for line in &rep.lines {
                assert!(line.holds, "q = {} line {}", f.q(), line.name);
            }
        }
    }

    #[test]
    fn named_line_q27() {
        let f = FieldCtx::new(3).unwrap();
        let rep = exclusion_inequalities(&f).unwrap();
        let line = rep
            .lines
            .iter()
            .find(|l| l.name == "derived-cap-below-involution-centralizer")
            .unwrap();
        assert_eq!(line.lhs, "18954");
        assert_eq!(line.rhs, "19656");
        assert!(line.holds);
    }

    #[test]
    fn rejects_prime_field() {
        let f = FieldCtx::new(1).unwrap();
        assert!(exclusion_inequalities(&f).is_err());
    }

    #[test]
    fn nge0_dominates_at_q243() {
        let f = FieldCtx::new(5).unwrap();
        let rep = exclusion_inequalities(&f).unwrap();
        let line = rep
            .lines
            .iter()
            .find(|l| l.name == "nge0-dominates-subfield-stabilizer-q0-3")
            .unwrap();
        assert_eq!(line.lhs, "28697814");
        assert_eq!(line.rhs, "1512");
        assert!(line.holds);
    }
}
