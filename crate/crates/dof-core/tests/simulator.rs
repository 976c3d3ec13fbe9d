use dof_core::durations::{corner_point, order2_durations_for_target, order2_tuple, PhaseDurations};
use dof_core::math::rat;
use dof_core::regions::AntennaConfig;
use dof_core::scheme::{order1_layout_for, order2_layout, toy_three_phase_plan, toy_two_phase_plan};
use dof_core::simulator::{batch_verify, draw_channels, literal_feasible, run, simulate, simulate_plan, Method, Tier, Verdict};
use dof_core::DofError;

fn cfg(a: u32, b: u32, c: u32, m: u32) -> AntennaConfig {
    AntennaConfig::new(a, b, c, m).unwrap()
}

/// Small Case-2/3 configs whose literal run is cheap.
fn small_configs() -> Vec<AntennaConfig> {
    let mut out = Vec::new();
    for n3 in 1..=3u32 {
        for n2 in 1..=n3 {
            for n1 in 1..=n2 {
                for m in (n1 + n2).max(n3) + 1..=n2 + n3 {
                    out.push(cfg(n1, n2, n3, m));
                }
            }
        }
    }
    out
}

#[test]
fn literal_and_structural_tiers_agree() {
    for c in small_configs() {
        let l = order1_layout_for(&c).unwrap();
        if !literal_feasible(&l) {
            continue;
        }
        let lit = simulate(&l, 1, Tier::Literal).unwrap();
        let st = simulate(&l, 1, Tier::Structural).unwrap();
        assert_ne!(lit.method, Method::Structural);
        assert_eq!(st.method, Method::Structural);
        assert_eq!(lit.success, st.success, "{c}");
        assert_eq!(lit.achieved, st.achieved, "{c}");
    }
}

#[test]
fn small_configs_reach_their_corner() {
    for c in small_configs() {
        let l = order1_layout_for(&c).unwrap();
        let rep = simulate(&l, 2, Tier::Auto).unwrap().into_result().unwrap();
        assert_eq!(rep.achieved, corner_point(&c).unwrap(), "{c}");
    }
}

#[test]
fn runs_are_deterministic_in_the_seed() {
    let p = toy_three_phase_plan();
    assert_eq!(simulate_plan(&p, 11).unwrap(), simulate_plan(&p, 11).unwrap());
    let ch = draw_channels(&p, 11).unwrap();
    assert_eq!(run(&p, &ch).unwrap(), run(&p, &ch).unwrap());
}

#[test]
fn toy_plans_decode_every_seed() {
    for seed in 1..=5 {
        let two = simulate_plan(&toy_two_phase_plan(), seed).unwrap();
        assert!(two.success);
        assert_eq!(two.achieved, vec![rat(2, 5), rat(2, 5), rat(2, 5)]);
        let three = simulate_plan(&toy_three_phase_plan(), seed).unwrap();
        assert!(three.success, "seed {seed}: {:?}", three.receivers);
    }
}

#[test]
fn order2_layout_delivers_its_tuple() {
    let c = cfg(1, 2, 3, 4);
    let d = order2_durations_for_target(&c, &[rat(1, 10), rat(1, 5), rat(1, 10)]).unwrap();
    let l = order2_layout(&c, &d).unwrap();
    let rep = simulate(&l, 1, Tier::Auto).unwrap();
    assert!(rep.success, "{:?}", rep.receivers);
    assert_eq!(rep.achieved, order2_tuple(&c, &d).unwrap());
}

#[test]
fn too_short_final_phase_fails_to_decode() {
    // three order-3 rows per slot need two final TSs on (1,1,1,2); one is not enough
    let c = cfg(1, 1, 1, 2);
    let l = order2_layout(&c, &PhaseDurations::from_ints([0, 0, 0, 1, 1, 1, 1])).unwrap();
    for tier in [Tier::Literal, Tier::Structural] {
        let rep = simulate(&l, 1, tier).unwrap();
        assert!(!rep.success, "{tier:?}");
        assert!(matches!(rep.into_result(), Err(DofError::DecodeFailure { .. })));
    }
}

#[test]
fn batch_skips_what_has_no_scheme() {
    let s = batch_verify(&[cfg(2, 2, 3, 5), cfg(1, 2, 3, 3)], 2);
    assert_eq!((s.passed, s.failed, s.skipped), (2, 0, 2));
    assert!(s.entries.iter().filter(|e| e.verdict == Verdict::Skip).all(|e| e.config == cfg(1, 2, 3, 3)));
}
