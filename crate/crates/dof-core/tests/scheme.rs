use dof_core::durations::{solve_order1, PhaseDurations};
use dof_core::regions::AntennaConfig;
use dof_core::scheme::{
    build_order1_scheme, build_order2_scheme, order1_layout_for, order2_layout, toy_three_phase_plan, toy_two_phase_plan, Phase, SchemeKind, Term,
};
use dof_core::DofError;
use proptest::prelude::*;

fn cfg(a: u32, b: u32, c: u32, m: u32) -> AntennaConfig {
    AntennaConfig::new(a, b, c, m).unwrap()
}

#[test]
fn toy_two_phase_structure() {
    let p = toy_two_phase_plan();
    p.validate().unwrap();
    assert_eq!(p.layout.kind, SchemeKind::Order2);
    assert_eq!(p.total_ts(), 5);
    // three order-2 slots, then two order-3 TSs
    let phases: Vec<Phase> = p.slots.iter().map(|s| s.phase).collect();
    assert_eq!(phases, [Phase::Order2, Phase::Order2, Phase::Order2, Phase::Order3, Phase::Order3]);
    assert!(p.slots.iter().all(|s| s.antennas <= 2));
    // two symbols per pair, each wanted by exactly two receivers
    assert_eq!(p.originals().count(), 6);
    assert!(p.originals().all(|s| s.receivers.len() == 2));
}

#[test]
fn toy_three_phase_structure() {
    let p = toy_three_phase_plan();
    p.validate().unwrap();
    assert_eq!(p.layout.kind, SchemeKind::Order1);
    assert_eq!(p.total_ts(), 8);
    assert_eq!(p.slots.iter().filter(|s| s.phase == Phase::Order1).count(), 3);
    assert!(p.originals().all(|s| s.receivers.len() == 1));
}

#[test]
fn symbol_table_covers_every_symbol_once() {
    for p in [toy_two_phase_plan(), toy_three_phase_plan(), build_order1_scheme(&cfg(2, 2, 3, 5)).unwrap()] {
        let mut ids: Vec<usize> = p.symbol_table().into_values().flatten().collect();
        ids.sort();
        assert_eq!(ids, (0..p.symbols.len()).collect::<Vec<_>>());
    }
}

#[test]
fn receivers_know_only_their_own_rows() {
    let p = toy_two_phase_plan();
    for rx in 1..=3 {
        for e in p.receiver_knowledge(rx).unwrap() {
            for (_, t) in &e.known {
                if let Term::Row { rx: r, part, .. } = *t {
                    assert_eq!(r, rx - 1);
                    assert!(part.is_none());
                }
            }
        }
    }
    assert!(matches!(p.receiver_knowledge(0), Err(DofError::InvalidInput(_))));
    assert!(matches!(p.receiver_knowledge(4), Err(DofError::InvalidInput(_))));
}

#[test]
fn overheard_order2_composites_split_between_receivers() {
    // every order-2 composite mixes rows from at least one receiver and some
    // receiver cannot form it alone, otherwise it would carry nothing new
    let p = toy_two_phase_plan();
    let ks: Vec<_> = (1..=3).map(|rx| p.receiver_knowledge(rx).unwrap()).collect();
    for i in 0..ks[0].len() {
        if ks[0][i].known.is_empty() && ks[0][i].unknown.is_empty() {
            continue;
        }
        assert!(ks.iter().any(|k| !k[i].unknown.is_empty()), "{} is known to everyone", ks[0][i].name);
    }
}

#[test]
fn order2_plan_rejects_order1_durations() {
    let d = PhaseDurations::from_ints([1, 0, 0, 1, 1, 1, 2]);
    assert!(matches!(order2_layout(&cfg(1, 1, 1, 2), &d), Err(DofError::InvalidInput(_))));
}

#[test]
fn json_lists_every_slot() {
    let p = toy_two_phase_plan();
    let j = p.to_json();
    assert_eq!(j["time_slots"].as_array().unwrap().len(), p.total_ts());
    assert_eq!(j["symbols"].as_array().unwrap().len(), 6);
    assert_eq!(j["config"], "1,1,1,2");
}

/// Case-2/3 configs with small antenna counts.
fn small_case23() -> impl Strategy<Value = AntennaConfig> {
    (proptest::array::uniform3(1u32..=4), 0u32..20).prop_filter_map("no Case 2/3 range", |(mut n, k)| {
        n.sort();
        let (lo, hi) = ((n[0] + n[1]).max(n[2]) + 1, n[1] + n[2]);
        (lo <= hi).then(|| cfg(n[0], n[1], n[2], lo + k % (hi - lo + 1)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn layout_counts_follow_durations(c in small_case23()) {
        let (d, _) = solve_order1(&c).unwrap();
        let l = order1_layout_for(&c).unwrap();
        prop_assert_eq!(l.counts, d.counts());
        prop_assert_eq!(l.total_ts(), d.counts().iter().sum::<usize>());
        prop_assert!(l.warnings.is_empty(), "{:?}", l.warnings);
    }

    #[test]
    fn built_plans_validate(c in small_case23()) {
        let l = order1_layout_for(&c).unwrap();
        prop_assume!(l.estimated_terms() < 200_000);
        let p = build_order1_scheme(&c).unwrap();
        p.validate().unwrap();
        prop_assert_eq!(p.total_ts(), l.total_ts());
        prop_assert_eq!(p.originals().count(), l.original_symbol_count());
        prop_assert!(p.slots.iter().all(|s| s.antennas <= c.m as usize));
    }

    #[test]
    fn order2_plans_validate(n in proptest::array::uniform3(1u32..=3), extra in 1u32..3, t in proptest::array::uniform3(0i64..=2), last in 1i64..=4) {
        let mut n = n;
        n.sort();
        let c = cfg(n[0], n[1], n[2], n[1] + extra);
        let d = PhaseDurations::from_ints([0, 0, 0, t[0], t[1], t[2], last]);
        let p = build_order2_scheme(&c, &d).unwrap();
        p.validate().unwrap();
        prop_assert_eq!(p.total_ts() as i64, t.iter().sum::<i64>() + last);
    }
}
