use epiq_core::born::{
    effect_probability, effect_probability_trace, gleason_fit, mixture_check, transition_matrix, Effect,
};
use epiq_core::hilbert::{RealizationMode, Tolerances};
use epiq_core::io::{spin3, triangle6};
use epiq_core::random::{random_density, random_effect, stream};
use epiq_core::{Error, HilbertSpace};

#[test]
fn transition_matrices_are_doubly_stochastic_and_symmetric() {
    for m in [spin3(), triangle6()] {
        let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let p = transition_matrix(&space, a, b);
                assert!(p.row_sum_residual() < 1e-12);
                assert!(p.column_sum_residual() < 1e-12);
                let q = transition_matrix(&space, b, a);
                assert!((p.entries.transpose() - &q.entries).abs().max() < 1e-12);
                if a == b {
                    assert!((&p.entries - nalgebra::DMatrix::<f64>::identity(p.dim(), p.dim())).abs().max() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn triangle_transitions_are_exact_permutations() {
    let m = triangle6();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            let p = transition_matrix(&space, a, b);
            assert!(p.is_permutation(0.0), "{a}->{b}: {:?}", p.rows());
            assert_eq!(p.mode, RealizationMode::IndicatorFallback);
        }
    }
}

#[test]
fn spin3_transitions_are_zero_one() {
    // Every W(g) permutes the two indicator directions, so the angle between
    // measurement axes does not show up in the transition probabilities.
    let m = spin3();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            assert!(transition_matrix(&space, a, b).is_permutation(1e-12));
        }
    }
}

#[test]
fn gleason_recovers_random_states() {
    let m = spin3();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    let d = space.dim();
    for i in 0..20 {
        let mut rng = stream(11, i);
        let rho = random_density::<f64, _>(d, &mut rng);
        let sample: Vec<(Effect<f64>, f64)> = (0..3 * d * d)
            .map(|_| {
                let e = random_effect(d, &mut rng);
                let p = effect_probability(&rho, &e).unwrap();
                (e, p)
            })
            .collect();
        let fit = gleason_fit(&sample).unwrap();
        assert_eq!(fit.rank, d * d);
        assert!(fit.recovered.frobenius_distance(&rho) < 1e-8);
        assert!(fit.residual < 1e-10);
    }
}

#[test]
fn too_few_effects_are_rank_deficient() {
    let mut rng = stream(5, 0);
    let sample: Vec<(Effect<f64>, f64)> = (0..3).map(|_| (random_effect(2, &mut rng), 0.5)).collect();
    assert!(matches!(gleason_fit(&sample), Err(Error::RankDeficient { required: 4, .. })));
}

#[test]
fn mixture_relation_and_decomposition_independence() {
    let m = spin3();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    let d = space.dim();
    for i in 0..100 {
        let mut rng = stream(23, i);
        let rho = random_density::<f64, _>(d, &mut rng);
        let e1 = random_effect(d, &mut rng);
        let e2 = random_effect(d, &mut rng);
        assert!(mixture_check(&e1, &e2, &rho).unwrap() < 1e-10);

        let respectral = Effect::from_hermitian(e1.matrix()).unwrap();
        let p1 = effect_probability(&rho, &e1).unwrap();
        assert!((p1 - effect_probability(&rho, &respectral).unwrap()).abs() < 1e-10);
        assert!((p1 - effect_probability_trace(&rho, &e1).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn experiment_effects_reproduce_born_probabilities() {
    let m = spin3();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    let e = Effect::from_experiment(&space, 1, &[1.0, 0.0]).unwrap();
    for k in 0..2 {
        let p = effect_probability(space.state(0, k), &e).unwrap();
        assert!((p - transition_matrix(&space, 0, 1).get(k, 0)).abs() < 1e-12);
    }
}

#[test]
fn gleason_recovers_pure_state() {
    let m = spin3();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    let mut rng = stream(12, 0);
    let rho = epiq_core::random::random_pure::<f64, _>(space.dim(), &mut rng);
    let sample: Vec<(Effect<f64>, f64)> = (0..12)
        .map(|_| {
            let e = random_effect(space.dim(), &mut rng);
            let p = effect_probability(&rho, &e).unwrap();
            (e, p)
        })
        .collect();
    let fit = gleason_fit(&sample).unwrap();
    assert!(fit.recovered.frobenius_distance(&rho) < 1e-8);
    assert!((fit.recovered.purity() - 1.0).abs() < 1e-8);
}
