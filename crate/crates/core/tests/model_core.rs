use epiq_core::group::{shortest_words, word_decompose, PermutationAction};
use epiq_core::io::model_file::{load_model, save_model, ModelFile};
use epiq_core::io::{bundled, spin3, triangle6};
use epiq_core::validate::{validate_assumptions, Status};
use epiq_core::Error;

#[test]
fn induced_subgroup_orders() {
    let t = triangle6();
    for a in 0..3 {
        let sub = t.derive_induced_subgroup(a).unwrap();
        assert_eq!(sub.elements.len(), 3);
        assert!(t.group().is_subgroup(&sub.elements));
    }
    let s = spin3();
    for a in 0..3 {
        let sub = s.derive_induced_subgroup(a).unwrap();
        assert_eq!(sub.elements.len(), 4);
        assert!(!sub.trivial);
    }
}

#[test]
fn spin3_induced_subgroup_has_three_orbits_of_four() {
    let s = spin3();
    let all = s.action().all_points();
    for a in 0..3 {
        let sub = s.derive_induced_subgroup(a).unwrap();
        let orbits = s.action().orbits(&sub.elements, &all).unwrap();
        assert_eq!(orbits.len(), 3);
        assert!(orbits.iter().all(|o| o.len() == 4));
    }
}

#[test]
fn action_law_holds_on_bundled_models() {
    for m in [spin3(), triangle6()] {
        assert_eq!(m.action().action_law_violation(), None);
        assert!(m.action().is_faithful());
    }
}

#[test]
fn words_in_bundled_models() {
    let s = spin3();
    let sets: Vec<Vec<usize>> = (0..3).map(|a| s.derive_induced_subgroup(a).unwrap().elements).collect();
    let e = s.group().identity();
    assert!(word_decompose(s.group(), e, &sets).unwrap().is_empty());
    let r1 = s.group().index_of("r1").unwrap();
    let word = word_decompose(s.group(), r1, &sets).unwrap();
    assert_eq!(word.len(), 2);
    assert_ne!(word[0].0, word[1].0);
    assert!(shortest_words(s.group(), &sets).iter().all(Option::is_some));

    let t = triangle6();
    let sets: Vec<Vec<usize>> = (0..3).map(|a| t.derive_induced_subgroup(a).unwrap().elements).collect();
    let t1 = t.group().index_of("t1").unwrap();
    assert!(matches!(word_decompose(t.group(), t1, &sets), Err(Error::NotInGeneratedSubgroup { .. })));
}

#[test]
fn validation_of_bundled_models() {
    let r = validate_assumptions(&spin3());
    assert_eq!(r.assumptions.len(), 10);
    assert_eq!(r.count(Status::Pass), 10);
    assert!(r.generation_status);

    let r = validate_assumptions(&triangle6());
    assert_eq!(r.count(Status::Pass), 9);
    assert_eq!(r.count(Status::Warning), 1);
    assert_eq!(r.count(Status::Fail), 0);
    assert!(!r.generation_status);
    assert_eq!(r.generated_order, 3);
    assert!(r.passed());
}

#[test]
fn validation_is_deterministic() {
    let m = spin3();
    let a = serde_json::to_string(&validate_assumptions(&m)).unwrap();
    let b = serde_json::to_string(&validate_assumptions(&m)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn value_bijections_match_level_sets() {
    for m in [spin3(), triangle6()] {
        for a in 0..3 {
            for b in 0..3 {
                let g = m.connection(a, b).unwrap();
                let beta = m.value_bijection(a, b, g).unwrap();
                let perm = m.action().perm(g);
                for phi in 0..m.point_count() {
                    let lhs = m.experiment(b).value_at(phi);
                    let rhs = m.experiment(a).value_at(perm[phi]);
                    assert_eq!(beta[rhs], lhs);
                }
            }
        }
    }
}

#[test]
fn broken_cocycle_is_reported() {
    let mut file = ModelFile::from_model(&spin3());
    // d0 -> d60 through the identity.
    let c = file.connections.iter_mut().find(|c| c.from == "d0" && c.to == "d60").unwrap();
    c.element = "r0".into();
    let m = file.into_model().unwrap();
    let r = validate_assumptions(&m);
    assert!(!r.passed());
    assert!(r.assumptions.iter().any(|c| c.status == Status::Fail && !c.witnesses.is_empty()));
}

#[test]
fn non_bijective_permutation_is_rejected() {
    let mut file = ModelFile::from_model(&triangle6());
    let bad = file.group.elements[1].name.clone();
    file.group.elements[1].action = epiq_core::io::model_file::PermSpec::Indices(vec![0; 12]);
    file.group.cayley = None;
    match file.into_model() {
        Err(Error::UnfaithfulAction { element, .. }) => assert_eq!(element, bad),
        other => panic!("expected UnfaithfulAction, got {other:?}"),
    }
}

#[test]
fn save_and_load_round_trip() {
    let dir = std::env::temp_dir().join(format!("epiq-core-roundtrip-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in ["spin3", "triangle6"] {
        let m = bundled(name).unwrap();
        let path = dir.join(format!("{name}.json"));
        save_model(&m, &path).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(ModelFile::from_model(&back), ModelFile::from_model(&m));
        assert_eq!(ModelFile::from_model(&back).to_json(), ModelFile::from_model(&m).to_json());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_bundled_name() {
    assert!(bundled("nope").is_err());
}
