use dof_core::durations::corner_point;
use dof_core::geometry::{eliminate_redundant, set_equal, subset};
use dof_core::math::{int, rat};
use dof_core::regions::{
    condition_star, corollary_checks, order1_outer, order1_outer_genie, order1_region_achievable, order1_region_nocsit, order2_outer_full,
    order2_region_delayed, order2_region_min_form, order2_region_nocsit, AntennaConfig, Order1Case, Star,
};
use proptest::prelude::*;

fn cfg(a: u32, b: u32, c: u32, m: u32) -> AntennaConfig {
    AntennaConfig::new(a, b, c, m).unwrap()
}

fn any_config() -> impl Strategy<Value = AntennaConfig> {
    (proptest::array::uniform3(1u32..=10), 1u32..=30).prop_map(|(mut n, m)| {
        n.sort();
        cfg(n[0], n[1], n[2], m)
    })
}

#[test]
fn every_tabulated_triple_meets_star_with_equality() {
    let table = [
        (3, 3, 4),
        (6, 6, 8),
        (7, 14, 15),
        (9, 9, 12),
        (12, 12, 16),
        (13, 39, 40),
        (14, 28, 30),
        (15, 15, 20),
        (18, 18, 24),
        (21, 21, 28),
        (21, 42, 45),
        (21, 84, 85),
        (24, 24, 32),
        (26, 78, 80),
    ];
    for (a, b, c) in table {
        assert_eq!(condition_star(a, b, c), Star::HoldsEquality, "({a},{b},{c})");
    }
}

#[test]
fn equal_antennas_meet_star_at_four_thirds() {
    // N1 = N2 = N: 2N²(N3 − N) = N²(2N − N3)  ⇔  3N3 = 4N
    for n in 1..=30u32 {
        for n3 in n..=2 * n {
            assert_eq!(condition_star(n, n, n3) == Star::HoldsEquality, 3 * n3 == 4 * n, "({n},{n},{n3})");
        }
    }
}

#[test]
fn tabulated_configs_have_matching_regions() {
    for c in [cfg(3, 3, 4, 7), cfg(6, 6, 8, 13), cfg(6, 6, 8, 14), cfg(7, 14, 15, 22)] {
        let r = corollary_checks(&c).unwrap();
        assert_eq!(r.regions_equal, Some(true), "{c}");
        assert_eq!(r.gap_value(), Some(int(0)));
        assert_eq!(r.equality_claim_holds, Some(true));
    }
}

/// Configs in Case 2 or 3: M drawn from (max{N1+N2, N3}, N2+N3].
fn case23_config() -> impl Strategy<Value = AntennaConfig> {
    (proptest::array::uniform3(1u32..=10), 0u32..100).prop_filter_map("no Case 2/3 range", |(mut n, k)| {
        n.sort();
        let (lo, hi) = ((n[0] + n[1]).max(n[2]) + 1, n[1] + n[2]);
        (lo <= hi).then(|| cfg(n[0], n[1], n[2], lo + k % (hi - lo + 1)))
    })
}

proptest! {
    #[test]
    fn star_fails_when_the_two_small_receivers_are_too_small(n in proptest::array::uniform3(1u32..=40)) {
        let mut n = n;
        n.sort();
        prop_assume!(n[0] + n[1] < n[2]);
        prop_assert_eq!(condition_star(n[0], n[1], n[2]), Star::Fails);
    }

    #[test]
    fn cases_partition_m(n in proptest::array::uniform3(1u32..=10), m in 1u32..=40) {
        let mut n = n;
        n.sort();
        let c = cfg(n[0], n[1], n[2], m);
        let want = if m <= (n[0] + n[1]).max(n[2]) {
            Order1Case::Case1
        } else if m <= n[0] + n[2] {
            Order1Case::Case2
        } else if m <= n[1] + n[2] {
            Order1Case::Case3
        } else {
            Order1Case::Case4
        };
        prop_assert_eq!(c.order1_case(), want);
    }

    #[test]
    fn order2_delayed_region_forms_agree(c in any_config()) {
        let d = order2_region_delayed(&c);
        prop_assert!(set_equal(&d, &order2_region_min_form(&c)).unwrap());
        prop_assert!(set_equal(&eliminate_redundant(&order2_outer_full(&c)), &d).unwrap());
    }

    #[test]
    fn order2_no_csit_gap_opens_exactly_above_n2(c in any_config()) {
        let (no, d) = (order2_region_nocsit(&c), order2_region_delayed(&c));
        prop_assert!(subset(&no, &d).unwrap());
        prop_assert_eq!(set_equal(&no, &d).unwrap(), c.m <= c.n2);
    }

    #[test]
    fn order1_no_csit_meets_genie_bound_iff_m_at_most_n2(c in any_config()) {
        let (no, g) = (order1_region_nocsit(&c), order1_outer_genie(&c));
        prop_assert!(subset(&no, &g).unwrap());
        prop_assert_eq!(set_equal(&no, &g).unwrap(), c.m <= c.n2);
    }

    #[test]
    fn achievable_region_sits_between_no_csit_and_outer(c in case23_config()) {
        let ach = order1_region_achievable(&c).unwrap();
        let outer = order1_outer(&c).unwrap();
        let no = order1_region_nocsit(&c);
        prop_assert!(subset(&ach, &outer).unwrap());
        prop_assert!(subset(&no, &ach).unwrap());
        prop_assert!(!set_equal(&no, &ach).unwrap());
        prop_assert!(subset(&outer, &order1_outer_genie(&c)).unwrap());
        prop_assert!(ach.contains(&corner_point(&c).unwrap()).unwrap());
    }
}

#[test]
fn symmetric_order2_corner() {
    // (1,1,1,2): rows (d12+d13) + d23/2 ≤ 1 and its rotations meet at 2/5
    let r = order2_region_delayed(&cfg(1, 1, 1, 2));
    assert!(r.vertices().contains(&vec![rat(2, 5), rat(2, 5), rat(2, 5)]));
}
