use epiq_core::born::transition_matrix;
use epiq_core::density::density_from_prior;
use epiq_core::hilbert::Tolerances;
use epiq_core::io::{spin3, triangle6};
use epiq_core::measurement::{
    conditional_expectation, operator_measure, predictive_distribution, StatisticalModel,
};
use epiq_core::simulate::{replay_run, simulate_sequence, PlanStep};
use epiq_core::{DensityMatrix, HilbertSpace};

#[test]
fn conditional_expectation_for_all_triples() {
    for m in [spin3(), triangle6()] {
        let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let p = transition_matrix(&space, a, b);
                let lambda = m.experiment(b).eigenvalues();
                for k in 0..p.dim() {
                    let avg: f64 = (0..p.dim()).map(|i| lambda[i] * p.get(k, i)).sum();
                    assert!((conditional_expectation(&space, a, k, b) - avg).abs() < 1e-12);
                }
            }
        }
    }
}

fn perfect(m: &epiq_core::ExperimentModel, b: usize) -> PlanStep {
    PlanStep { experiment: b, stat: StatisticalModel::perfect(m, b) }
}

#[test]
fn perfect_repeat_gives_identical_values() {
    let m = spin3();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    let rho = density_from_prior(&space, 0, &[0.5, 0.5]).unwrap();
    let plan = [perfect(&m, 1), perfect(&m, 1)];
    let trace = simulate_sequence(&space, &rho, &plan, 20_000, 3).unwrap();
    let t = &trace.transitions[0];
    assert_eq!(t[0][1] + t[1][0], 0);
    for s in &trace.steps {
        assert!(s.value_sigma_deviation() < 4.0);
        assert!(s.observation_sigma_deviation() < 4.0);
    }
}

#[test]
fn chain_frequencies_follow_predictions() {
    let m = spin3();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    let rho = density_from_prior(&space, 0, &[0.7, 0.3]).unwrap();
    let plan = [perfect(&m, 0), perfect(&m, 1), perfect(&m, 0)];
    let trace = simulate_sequence(&space, &rho, &plan, 20_000, 9).unwrap();
    for s in &trace.steps {
        assert!(s.value_sigma_deviation() < 4.0, "{:?} vs {:?}", s.value_frequencies(), s.predicted_values);
    }
    assert!((trace.steps[0].predicted_values[0] - 0.7).abs() < 1e-12);
}

#[test]
fn noisy_readout_matches_operator_measure() {
    let m = spin3();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    let rho = density_from_prior(&space, 0, &[0.7, 0.3]).unwrap();
    let stat = StatisticalModel::symmetric_noise(&m, 0, 0.1).unwrap();
    let predicted = predictive_distribution(&rho, &operator_measure(&space, &stat).unwrap()).unwrap();
    assert!((predicted[0] - (0.7 * 0.9 + 0.3 * 0.1)).abs() < 1e-12);
    let trace = simulate_sequence(&space, &rho, &[PlanStep { experiment: 0, stat }], 20_000, 17).unwrap();
    let step = &trace.steps[0];
    assert!(step.observation_sigma_deviation() < 4.0);
    let w = step.bayes_weights[0].as_ref().unwrap();
    assert!((w[0] - 0.63 / 0.66).abs() < 1e-12);
}

#[test]
fn replay_matches_sampled_runs() {
    let m = triangle6();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    let rho = DensityMatrix::maximally_mixed(3);
    let plan = [perfect(&m, 0), perfect(&m, 2)];
    let trace = simulate_sequence(&space, &rho, &plan, 100, 4).unwrap();
    for run in &trace.sample {
        let (replayed, states) = replay_run(&space, &rho, &plan, 4, run.run).unwrap();
        assert_eq!(replayed.values, run.values);
        assert_eq!(states.len(), 2);
        for (t, (_, post)) in states.iter().enumerate() {
            assert!((post.purity() - 1.0).abs() < 1e-12);
            let s = space.state(plan[t].experiment, run.values[t]);
            assert!((post.weight_along(s.vector()) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn different_seeds_differ_same_seed_agrees() {
    let m = spin3();
    let space = HilbertSpace::build(&m, Tolerances::default()).unwrap();
    let rho = DensityMatrix::maximally_mixed(2);
    let plan = [perfect(&m, 2)];
    let a = simulate_sequence(&space, &rho, &plan, 5000, 1).unwrap();
    let b = simulate_sequence(&space, &rho, &plan, 5000, 1).unwrap();
    let c = simulate_sequence(&space, &rho, &plan, 5000, 2).unwrap();
    assert_eq!(a.steps[0].value_counts, b.steps[0].value_counts);
    assert_ne!(a.steps[0].value_counts, c.steps[0].value_counts);
}
