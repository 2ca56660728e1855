mod common;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use core_entropy::circle::{
    circle_distance, hausdorff_distance, orbit, separation, tau, unlinked, Angle, AngleSet, SeparationVerdict,
};
use core_entropy::exec::{self, Mode};
use core_entropy::fixtures;
use core_entropy::hubbard::{forest_entropy, mu, HubbardForest};
use core_entropy::markov::{entropy, power_system, system_entropy, IncidenceMatrix};
use core_entropy::newton::{newton_core_entropy, NewtonDescription};
use core_entropy::portrait::{
    itinerary, random_portrait, unlinked_classes, ClassPartition, CriticalPortrait, PortraitData, Side,
};
use core_entropy::thurston::{thurston_entropy, thurston_entropy_with};

fn angle() -> impl Strategy<Value = Angle> {
    (1u64..=60).prop_flat_map(|q| (0..q).prop_map(move |p| Angle::new(p, q).unwrap()))
}

fn angle_set(max: usize) -> impl Strategy<Value = AngleSet> {
    prop::collection::vec(angle(), 1..=max).prop_map(AngleSet::new)
}

fn portrait() -> impl Strategy<Value = CriticalPortrait> {
    (2u64..=5, any::<u64>()).prop_map(|(d, seed)| random_portrait(d, &mut StdRng::seed_from_u64(seed)))
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<u64>>> {
    (1usize..=5).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0u64..3, n), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tau_composes(a in angle(), d1 in 2u64..6, d2 in 2u64..6) {
        prop_assert_eq!(tau(d1, tau(d2, a)), tau(d1 * d2, a));
    }

    #[test]
    fn preimages_map_back(a in angle(), d in 2u64..6) {
        let pre = a.preimages(d).unwrap();
        prop_assert_eq!(pre.len() as u64, d);
        for p in pre {
            prop_assert_eq!(tau(d, p), a);
        }
    }

    #[test]
    fn orbit_closes_up(a in angle(), d in 2u64..5) {
        let o = orbit(d, a);
        prop_assert!(o.period >= 1);
        prop_assert_eq!(o.point(o.preperiod + o.period), o.point(o.preperiod));
        prop_assert_eq!(o.points.len(), o.preperiod + o.period);
    }

    #[test]
    fn distance_is_a_metric(a in angle(), b in angle(), c in angle()) {
        let half = BigRational::new(1.into(), 2.into());
        prop_assert_eq!(circle_distance(a, b), circle_distance(b, a));
        prop_assert!(circle_distance(a, b) <= half);
        prop_assert!(circle_distance(a, c) <= circle_distance(a, b) + circle_distance(b, c));
    }

    #[test]
    fn hausdorff_is_a_metric(a in angle_set(4), b in angle_set(4), c in angle_set(4)) {
        prop_assert_eq!(hausdorff_distance(&a, &b), hausdorff_distance(&b, &a));
        prop_assert_eq!(hausdorff_distance(&a, &b).is_zero(), a == b);
        prop_assert!(hausdorff_distance(&a, &c) <= hausdorff_distance(&a, &b) + hausdorff_distance(&b, &c));
    }

    #[test]
    fn separation_is_symmetric(h in angle_set(4), x in angle(), y in angle()) {
        prop_assert_eq!(separation(&h, x, y), separation(&h, y, x));
        if h.contains(&x) {
            prop_assert_eq!(separation(&h, x, y), SeparationVerdict::OnBoundary);
        }
    }

    #[test]
    fn unlinked_is_symmetric(a in angle_set(3), b in angle_set(3)) {
        prop_assert_eq!(unlinked(&a, &b), unlinked(&b, &a));
    }

    #[test]
    fn classes_split_the_circle_evenly(p in portrait()) {
        let d = p.degree();
        let classes = unlinked_classes(&p);
        prop_assert_eq!(classes.len() as u64, d);
        let share = BigRational::new(1.into(), (d as i64).into());
        for c in &classes {
            prop_assert_eq!(c.length(), share.clone());
        }
    }

    #[test]
    fn every_off_portrait_angle_has_one_class(p in portrait(), t in angle()) {
        let on_portrait = p.blocks().iter().any(|b| b.contains(&t));
        let hits = unlinked_classes(&p).iter().filter(|c| c.contains(t)).count();
        prop_assert_eq!(hits, usize::from(!on_portrait));
    }

    #[test]
    fn itinerary_digits_in_range(p in portrait(), t in angle(), right in any::<bool>()) {
        let side = if right { Side::Right } else { Side::Left };
        let it = itinerary(&p, t, side);
        prop_assert!(it.period >= 1);
        prop_assert!(it.digits.iter().all(|&k| k >= 1 && k as u64 <= p.degree()));
        let partition = ClassPartition::new(&p);
        prop_assert_eq!(it.digit(0), partition.class_index(t, side));
    }

    #[test]
    fn portrait_json_round_trip(p in portrait()) {
        let text = serde_json::to_string(&p).unwrap();
        let back: CriticalPortrait = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &p);
        let data: PortraitData = serde_json::from_str(&text).unwrap();
        prop_assert!(data.report().is_ok());
    }

    #[test]
    fn thurston_entropy_bounds_and_modes(p in portrait()) {
        let seq = thurston_entropy_with(&p, Mode::Sequential);
        let par = thurston_entropy_with(&p, Mode::Parallel);
        prop_assert_eq!(seq, par);
        prop_assert!(seq.value >= 0.0);
        prop_assert!(seq.value <= (p.degree() as f64).ln() + 1e-9);
    }

    #[test]
    fn rotation_by_fixed_point_shift_keeps_entropy(p in portrait()) {
        let d = p.degree();
        prop_assume!(d >= 3);
        let shift = BigRational::new(1.into(), ((d - 1) as i64).into());
        if let Ok(r) = p.rotated(&shift) {
            prop_assert!((thurston_entropy(&r).value - thurston_entropy(&p).value).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_matches_oracle(rows in small_matrix()) {
        let h = entropy(&IncidenceMatrix::from_rows(rows.clone()).unwrap());
        prop_assert!(h.lower <= h.value && h.value <= h.upper);
        prop_assert!((h.value - common::log_spectral_radius(&rows)).abs() < 1e-9);
        if h.nilpotent {
            prop_assert_eq!(h.value, 0.0);
        }
    }

    #[test]
    fn entropy_is_monotone(rows in small_matrix(), i in 0usize..5, j in 0usize..5) {
        let n = rows.len();
        let mut bigger = rows.clone();
        bigger[i % n][j % n] += 1;
        let a = entropy(&IncidenceMatrix::from_rows(rows).unwrap()).value;
        let b = entropy(&IncidenceMatrix::from_rows(bigger).unwrap()).value;
        prop_assert!(a <= b + 1e-9);
    }

    #[test]
    fn exec_modes_agree(items in prop::collection::vec(any::<u32>(), 0..200)) {
        let f = |x: &u32| u64::from(*x) * 3 + 1;
        prop_assert_eq!(exec::map(Mode::Sequential, &items, f), exec::map(Mode::Parallel, &items, f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn newton_entropy_monotone_and_rotation_free(
        picks in prop::collection::vec((0usize..4, 1u64..4), 0..4),
        extra in (0usize..4, 1u64..4),
        turn in 0usize..4,
    ) {
        let models = fixtures::quadratic_models();
        let comp = |&(i, p): &(usize, u64)| (p, core_entropy::hubbard::Model::Forest(models[i].2.clone()));
        let base: Vec<_> = picks.iter().map(comp).collect();
        let h = newton_core_entropy(&NewtonDescription::with_components(3, base.clone())).value;
        let mut more = base.clone();
        more.push(comp(&extra));
        prop_assert!(newton_core_entropy(&NewtonDescription::with_components(3, more)).value >= h - 1e-12);
        let mut rotated = base.clone();
        if !rotated.is_empty() {
            let k = turn % rotated.len();
            rotated.rotate_left(k);
        }
        prop_assert!((newton_core_entropy(&NewtonDescription::with_components(3, rotated)).value - h).abs() < 1e-12);
        if let Some(p_min) = base.iter().map(|(p, _)| *p).min() {
            let d = 3f64;
            prop_assert!(h <= (2.0 * d - 2.0) * d.ln() / p_min as f64);
        }
    }
}

#[test]
fn power_scaling_on_every_forest() {
    for (name, f) in fixtures::all_forests() {
        let h = system_entropy(f.system()).value;
        for k in [2usize, 3] {
            let hk = system_entropy(&power_system(f.system(), k)).value;
            assert!((hk - k as f64 * h).abs() < 2e-9, "{name} k={k}");
        }
    }
}

#[test]
fn mu_never_exceeds_h() {
    let mut forests: Vec<(&str, HubbardForest)> = fixtures::all_forests();
    forests.push(("empty", HubbardForest::empty(2)));
    for (name, f) in forests {
        let m = mu(&f).unwrap();
        assert!(m.mu.value <= forest_entropy(&f).value + 1e-9, "{name}");
    }
}

#[test]
fn forest_json_round_trip() {
    for (name, f) in fixtures::all_forests() {
        let back: HubbardForest = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f, "{name}");
    }
}
