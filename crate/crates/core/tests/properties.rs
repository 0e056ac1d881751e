use proptest::prelude::*;

use epiq_core::born::{effect_probability, effect_probability_trace, mixture_check};
use epiq_core::group::{FiniteGroup, GroupAction, PermutationAction};
use epiq_core::io::report::format_float;
use epiq_core::linalg::{self, MatrixNorm};
use epiq_core::qubit::{chsh, qubit_transition, ChshMode, Direction};
use epiq_core::random::{random_density, random_effect, random_unitary, stream};
use std::sync::Arc;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_unitaries_are_unitary(seed in any::<u64>(), d in 1usize..5) {
        let u = random_unitary::<f64, _>(d, &mut stream(seed, 0));
        prop_assert!(linalg::unitarity_residual(&u, MatrixNorm::Operator) < 1e-12);
    }

    #[test]
    fn effect_probabilities_lie_in_unit_interval(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = stream(seed, 1);
        let rho = random_density::<f64, _>(d, &mut rng);
        let e1 = random_effect(d, &mut rng);
        let e2 = random_effect(d, &mut rng);
        let p = effect_probability(&rho, &e1).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        prop_assert!((p - effect_probability_trace(&rho, &e1).unwrap()).abs() < 1e-10);
        prop_assert!(mixture_check(&e1, &e2, &rho).unwrap() < 1e-10);
    }

    #[test]
    fn densities_have_bounded_purity(seed in any::<u64>(), d in 1usize..5) {
        let rho = random_density::<f64, _>(d, &mut stream(seed, 2));
        let purity = rho.purity();
        prop_assert!(purity <= 1.0 + 1e-12);
        prop_assert!(purity >= 1.0 / d as f64 - 1e-12);
        prop_assert!(rho.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn qubit_transitions_are_symmetric_probabilities(x in -180.0f64..180.0, y in -180.0f64..180.0, s in prop::bool::ANY, t in prop::bool::ANY) {
        let a = Direction::from_planar_degrees(x);
        let b = Direction::from_planar_degrees(y);
        let s = if s { 1 } else { -1 };
        let t = if t { 1 } else { -1 };
        let p = qubit_transition(a, s, b, t).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        prop_assert!((p - qubit_transition(b, t, a, s).unwrap()).abs() < 1e-12);
        prop_assert!((p + qubit_transition(a, s, b, -t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_chsh_obeys_tsirelson(angles in prop::array::uniform4(-180.0f64..180.0)) {
        let dirs = angles.map(Direction::from_planar_degrees);
        let r = chsh(dirs, ChshMode::QuantumAnalytic, 0, 0).unwrap();
        prop_assert!(r.s <= 2.0 * 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn orbits_partition_cyclic_actions(n in 2usize..9, step in 1usize..9) {
        let names = (0..n).map(|i| format!("c{i}")).collect();
        let cayley = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let group = Arc::new(FiniteGroup::from_cayley(names, cayley).unwrap());
        let points = (0..n).map(|i| format!("p{i}")).collect();
        let perms = (0..n).map(|g| (0..n).map(|i| (i + g) % n).collect()).collect();
        let action = GroupAction::new(group.clone(), points, perms).unwrap();
        let sub = group.closure(&[step % n]);
        let all = action.all_points();
        let orbits = action.orbits(&sub, &all).unwrap();
        let mut seen: Vec<usize> = orbits.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, all);
        prop_assert!(orbits.iter().all(|o| o.len() == sub.len()));
    }
}
