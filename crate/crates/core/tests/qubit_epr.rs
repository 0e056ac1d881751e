use epiq_core::qubit::{
    chsh, classical_correlation, classical_sign_model, epr_correlation, epr_correlation_sampled,
    qubit_transition, qubit_transition_closed_form, ChshMode, Direction, SingletPair,
};
use epiq_core::random::{random_unit3, stream};

fn random_direction(seed: u64, i: u64) -> Direction {
    Direction::new(random_unit3(&mut stream(seed, i))).unwrap()
}

#[test]
fn transition_matches_closed_form_on_random_pairs() {
    for i in 0..100 {
        let a = random_direction(1, 2 * i);
        let b = random_direction(1, 2 * i + 1);
        for s in [1, -1] {
            for t in [1, -1] {
                let explicit = qubit_transition(a, s, b, t).unwrap();
                let closed = (1.0 + f64::from(s) * f64::from(t) * a.dot(&b)) / 2.0;
                assert!((explicit - closed).abs() < 1e-12);
                assert!((qubit_transition_closed_form(a, s, b, t) - closed).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn analytic_correlation_is_minus_dot() {
    for i in 0..100 {
        let a = random_direction(2, 2 * i);
        let b = random_direction(2, 2 * i + 1);
        assert_eq!(epr_correlation(a, b) + a.dot(&b), 0.0);
        let joint = SingletPair::joint(a, b);
        let e = joint[0][0] - joint[0][1] - joint[1][0] + joint[1][1];
        assert!((e - epr_correlation(a, b)).abs() < 1e-12);
    }
}

#[test]
fn sampled_correlation_within_three_sigma() {
    let a = Direction::from_planar_degrees(0.0);
    let b = Direction::from_planar_degrees(60.0);
    let c = epr_correlation_sampled(a, b, 100_000, 8).unwrap();
    assert!((c.mean - epr_correlation(a, b)).abs() < 3.0 * c.std_error);
    assert_eq!(c.samples, 100_000);
}

#[test]
fn tsirelson_quadruple() {
    let dirs = [0.0, 90.0, 45.0, 135.0].map(Direction::from_planar_degrees);
    let r = chsh(dirs, ChshMode::QuantumAnalytic, 0, 0).unwrap();
    assert!((r.s - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(r.s, 2.8284271247461903);
    assert!(r.violation);
}

#[test]
fn classical_model_respects_bound() {
    for i in 0..5 {
        let mut rng = stream(31, i);
        let dirs = [0, 1, 2, 3].map(|_| Direction::new(random_unit3(&mut rng)).unwrap());
        let r = chsh(dirs, ChshMode::Classical, 100_000, i).unwrap();
        assert!(r.s <= 2.0 + 3.0 * r.s_std_error.unwrap());
    }
}

#[test]
fn classical_sampler_matches_its_closed_form() {
    let a = Direction::from_planar_degrees(0.0);
    let b = Direction::from_planar_degrees(45.0);
    let c = classical_sign_model(a, b, 100_000, 4).unwrap();
    assert!((c.mean - classical_correlation(a, b)).abs() < 4.0 * c.std_error);
    assert!((classical_correlation(a, b) + 0.5).abs() < 1e-12);
}

#[test]
fn sampled_quantum_chsh_near_analytic() {
    let dirs = [0.0, 90.0, 45.0, 135.0].map(Direction::from_planar_degrees);
    let r = chsh(dirs, ChshMode::QuantumSampled, 100_000, 12).unwrap();
    let se = r.s_std_error.unwrap();
    assert!(r.s <= 2.0 * 2f64.sqrt() + 3.0 * se);
    assert!((r.s - 2.0 * 2f64.sqrt()).abs() < 4.0 * se);
}
