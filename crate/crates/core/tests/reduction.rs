use std::collections::BTreeSet;

use epiq_core::group::PermutationAction;
use epiq_core::io::{spin3, triangle6, ModelFile};
use epiq_core::reduction::{
    admissible_values, cartesian_total, natural_function_check, orbit_reduce, realized_restriction, reduce_model,
    WideParameter,
};

fn magnitude_model() -> epiq_core::ExperimentModel {
    // Four points -2, -1, +1, +2; the single generator swaps magnitudes
    // within each sign.
    let json = r#"{
      "format_version": 1,
      "name": "magnitudes",
      "phi": ["m2", "m1", "p1", "p2"],
      "group": { "elements": [ { "name": "e", "action": "()" }, { "name": "f", "action": "(m2 m1)(p1 p2)" } ] },
      "experiments": [
        { "label": "x", "values": { "m2": "-2", "m1": "-1", "p1": "+1", "p2": "+2" },
          "value_order": ["-2", "-1", "+1", "+2"] },
        { "label": "sign", "values": { "m2": "-", "m1": "-", "p1": "+", "p2": "+" } }
      ],
      "reference": "x"
    }"#;
    ModelFile::from_json(json).unwrap().into_model().unwrap()
}

#[test]
fn realized_tuples_match_brute_force() {
    let m = spin3();
    let r = realized_restriction(&m).unwrap();
    let brute: BTreeSet<Vec<usize>> = (0..m.point_count())
        .map(|phi| m.experiments().iter().map(|e| e.value_at(phi)).collect())
        .collect();
    let found: BTreeSet<Vec<usize>> = r.psi.iter().map(|&p| r.total.points()[p].clone()).collect();
    assert_eq!(found, brute);
    assert_eq!(found.len(), 6);
    for a in 0..3 {
        let adm: BTreeSet<usize> = admissible_values(&r.total, &r.psi, a).unwrap().into_iter().collect();
        let expected: BTreeSet<usize> = brute.iter().map(|t| t[a]).collect();
        assert_eq!(adm, expected);
    }
}

#[test]
fn induced_action_on_realized_tuples_is_a_permutation() {
    let m = spin3();
    let r = realized_restriction(&m).unwrap();
    let induced = r.induced.unwrap();
    assert_eq!(induced.len(), 12);
    for p in &induced {
        let set: BTreeSet<usize> = p.iter().copied().collect();
        assert_eq!(set.len(), r.psi.len());
    }
}

#[test]
fn projection_recovers_factor_action() {
    let m = triangle6();
    let factors: Vec<WideParameter> = (0..3).map(|a| WideParameter::from_experiment(&m, a).unwrap()).collect();
    let total = cartesian_total(factors.clone(), m.action().group_arc()).unwrap();
    assert_eq!(total.point_count(), 27);
    for g in total.acting_elements() {
        for p in 0..total.point_count() {
            for (a, f) in factors.iter().enumerate() {
                assert_eq!(total.project(total.image(p, g), a), f.image(total.project(p, a), g));
            }
        }
    }
    let all: Vec<usize> = (0..27).collect();
    for a in 0..3 {
        assert_eq!(admissible_values(&total, &all, a).unwrap(), vec![0, 1, 2]);
    }
}

#[test]
fn every_reduction_is_natural() {
    for m in [spin3(), triangle6(), magnitude_model()] {
        for a in 0..m.experiments().len() {
            let wide = WideParameter::from_experiment(&m, a).unwrap();
            let orbits = wide.range_orbits();
            let covered: usize = orbits.iter().map(Vec::len).sum();
            assert_eq!(covered, wide.range().len());
            for mask in 1..(1u32 << orbits.len()) {
                let sel: Vec<usize> = (0..orbits.len()).filter(|k| mask & (1 << k) != 0).collect();
                let red = orbit_reduce(&wide, &sel).unwrap();
                assert!(red.naturality().natural);
            }
        }
    }
}

#[test]
fn single_experiment_is_not_natural_under_the_whole_group() {
    let m = spin3();
    for a in 0..3 {
        let f = m.experiment(a).assignment();
        let check = natural_function_check(f, m.action()).unwrap();
        assert!(!check.natural);
        let (p, q, g) = check.witness.unwrap();
        assert_eq!(f[p], f[q]);
        assert_ne!(f[m.action().image(p, g)], f[m.action().image(q, g)]);
        assert!(!m.derive_induced_subgroup(a).unwrap().elements.contains(&g));
    }
}

#[test]
fn magnitude_model_reduces_to_sign() {
    let m = magnitude_model();
    let wide = WideParameter::from_experiment(&m, 0).unwrap();
    assert_eq!(wide.range_orbits(), vec![vec![0, 1], vec![2, 3]]);
    let red = orbit_reduce(&wide, &[0, 1]).unwrap();
    let file = reduce_model(&m, 0, &red).unwrap();
    let reduced = file.clone().into_model().unwrap();
    assert_eq!(reduced.point_count(), 4);
    assert_eq!(reduced.experiment(0).values(), ["-2|-1", "+1|+2"]);
    for phi in 0..4 {
        assert_eq!(reduced.experiment(0).value_at(phi), reduced.experiment(1).value_at(phi));
    }

    let one = orbit_reduce(&wide, &[1]).unwrap();
    let file = reduce_model(&m, 0, &one);
    assert!(matches!(file, Err(epiq_core::Error::InvalidModel(_))));
}
