use tailbound::bounds::{self, FirstPProfile, FourthProfile, MomentProfile, PthProfile};
use tailbound::oracle::{self, MomentConstraintSet, SupportGrid, Verdict};
use tailbound::Event;

fn constraints(profile: &MomentProfile) -> MomentConstraintSet {
    match profile {
        MomentProfile::FirstP(fp) => MomentConstraintSet::first_p(fp),
        MomentProfile::Fourth(f) => MomentConstraintSet::fourth(f),
        MomentProfile::Pth(pp) => MomentConstraintSet::pth(pp),
    }
}

fn lp_min(profile: &MomentProfile, event: Event) -> f64 {
    let cs = constraints(profile);
    let grid = SupportGrid::for_constraints(&cs, oracle::DEFAULT_GRID_POINTS).unwrap();
    oracle::min_prob_lp(&cs, &grid, event).unwrap().min_prob
}

#[test]
fn lp_never_undercuts_a_bound() {
    let profiles: Vec<MomentProfile> = vec![
        FirstPProfile::new(1.5, 0.7).unwrap().into(),
        FirstPProfile::new(3.0, 0.4).unwrap().into(),
        FourthProfile::new(1.5).unwrap().into(),
        FourthProfile::new(8.0).unwrap().into(),
        PthProfile::new(3.0, 1.2).unwrap().into(),
    ];
    for profile in &profiles {
        let bound = bounds::improved_bound(profile).unwrap().value;
        for event in [Event::GeZero, Event::GtZero, Event::LeZero] {
            let min = lp_min(profile, event);
            assert_ne!(
                oracle::certify_values(bound, min, 2e-3),
                Verdict::BoundTooHigh,
                "{profile:?} {event}: {min} < {bound}"
            );
        }
    }
}

#[test]
fn lp_and_parametric_agree_on_sharp_cases() {
    let cases: [(MomentProfile, f64); 2] = [
        (FirstPProfile::new(2.0, 0.8).unwrap().into(), 0.2),
        (FourthProfile::new(1.05).unwrap().into(), 4.0 / 9.0),
    ];
    for (profile, expected) in cases {
        let lp = lp_min(&profile, Event::GeZero);
        let cs = constraints(&profile);
        let par = oracle::min_prob_parametric(&cs, 3, Event::GeZero).unwrap().min_prob;
        assert!((lp - expected).abs() < 2e-3, "lp {lp}");
        assert!((par - expected).abs() < 1e-6, "parametric {par}");
    }
}

#[test]
fn lp_witness_meets_constraints() {
    let profile: MomentProfile = FourthProfile::new(3.0).unwrap().into();
    let cs = constraints(&profile);
    let grid = SupportGrid::for_constraints(&cs, 501).unwrap();
    let r = oracle::min_prob_lp(&cs, &grid, Event::GeZero).unwrap();
    assert!((r.witness.total_mass() - 1.0).abs() < 1e-9);
    for (res, slack) in r.constraint_residuals.iter().zip(&r.slacks) {
        assert!(res.abs() <= slack * (1.0 + 1e-6), "{res} vs {slack}");
    }
    assert!((r.witness.prob_event(Event::GeZero) - r.min_prob).abs() < 1e-12);
}
