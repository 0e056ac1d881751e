//! Statistical measurement models, operator-valued measures and updating of
//! the state after an experiment.

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::linalg::{self, CMatrix};
use crate::model::ExperimentModel;
use crate::scalar::{lit, re, to_f64, Real};

const SUM_TOL: f64 = 1e-12;
/// Below this `<b,j|ρ|b,j>` an observed value is treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-15;

/// `p(y | λ_j)`: rows are outcomes, columns are parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticalModel {
    pub experiment: String,
    pub outcomes: Vec<String>,
    pub likelihood: Vec<Vec<f64>>,
}

impl StatisticalModel {
    pub fn new(experiment: impl Into<String>, outcomes: Vec<String>, likelihood: Vec<Vec<f64>>) -> Result<Self> {
        if outcomes.is_empty() || likelihood.len() != outcomes.len() {
            return Err(Error::InvalidStatisticalModel(format!(
                "{} likelihood rows for {} outcomes",
                likelihood.len(),
                outcomes.len()
            )));
        }
        let n = likelihood[0].len();
        if n == 0 || likelihood.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidStatisticalModel("ragged likelihood matrix".into()));
        }
        if let Some(p) = likelihood.iter().flatten().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidStatisticalModel(format!("likelihood {p} outside [0, 1]")));
        }
        for j in 0..n {
            let s: f64 = likelihood.iter().map(|r| r[j]).sum();
            if (s - 1.0).abs() > SUM_TOL {
                return Err(Error::InvalidStatisticalModel(format!("column {j} sums to {s}")));
            }
        }
        Ok(StatisticalModel { experiment: experiment.into(), outcomes, likelihood })
    }

    /// Observation equals the parameter value.
    pub fn perfect(model: &ExperimentModel, b: usize) -> Self {
        let exp = model.experiment(b);
        let n = exp.value_count();
        let likelihood = (0..n).map(|y| (0..n).map(|j| if y == j { 1.0 } else { 0.0 }).collect()).collect();
        StatisticalModel { experiment: exp.label().into(), outcomes: exp.values().to_vec(), likelihood }
    }

    /// Reads the true value with probability `1 - epsilon`, otherwise one of
    /// the others uniformly.
    pub fn symmetric_noise(model: &ExperimentModel, b: usize, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidStatisticalModel(format!("noise level {epsilon} outside [0, 1]")));
        }
        let exp = model.experiment(b);
        let n = exp.value_count();
        let off = epsilon / (n - 1) as f64;
        let likelihood = (0..n)
            .map(|y| (0..n).map(|j| if y == j { 1.0 - epsilon } else { off }).collect())
            .collect();
        Self::new(exp.label(), exp.values().to_vec(), likelihood)
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn value_count(&self) -> usize {
        self.likelihood[0].len()
    }

    /// `p(y | λ_j)`
    pub fn p(&self, y: usize, j: usize) -> f64 {
        self.likelihood[y][j]
    }

    pub fn outcome_index(&self, y: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == y)
    }
}

/// `M(y) = Σ_j p(y|λ_j) |b,j><b,j|`
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMeasure<T: Real> {
    pub experiment: String,
    pub outcomes: Vec<String>,
    pub elements: Vec<CMatrix<T>>,
}

impl<T: Real> OperatorMeasure<T> {
    /// `||Σ_y M(y) - I||` (max entry).
    pub fn completeness_residual(&self) -> T {
        let d = self.elements[0].nrows();
        let sum = self.elements.iter().fold(CMatrix::zeros(d, d), |acc, m| acc + m);
        linalg::max_entry_norm(&(sum - linalg::identity::<T>(d)))
    }

    /// Distance of the joint spectrum from `[0, 1]`; zero for a valid measure.
    pub fn spectrum_violation(&self) -> T {
        self.elements.iter().fold(T::zero(), |acc, m| {
            linalg::hermitian_eigenvalues(m)
                .into_iter()
                .fold(acc, |acc, x| acc.max(-x).max(x - T::one()))
        })
    }
}

pub fn operator_measure<T: Real>(
    space: &HilbertSpace<'_, T>,
    stat: &StatisticalModel,
) -> Result<OperatorMeasure<T>> {
    let b = space.experiment_index(&stat.experiment)?;
    let states = space.states(b);
    if stat.value_count() != states.len() {
        return Err(Error::DimensionMismatch { expected: states.len(), found: stat.value_count() });
    }
    let d = space.dim();
    let elements = (0..stat.outcome_count())
        .map(|y| {
            states.iter().fold(CMatrix::zeros(d, d), |acc, s| {
                acc + linalg::projector(s.vector()) * re(lit::<T>(stat.p(y, s.value_index)))
            })
        })
        .collect();
    Ok(OperatorMeasure { experiment: stat.experiment.clone(), outcomes: stat.outcomes.clone(), elements })
}

/// `P(y) = tr(ρ M(y))`
pub fn predictive_distribution<T: Real>(rho: &DensityMatrix<T>, m: &OperatorMeasure<T>) -> Result<Vec<T>> {
    if let Some(e) = m.elements.iter().find(|e| e.nrows() != rho.dim()) {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: e.nrows() });
    }
    Ok(m.elements.iter().map(|e| (rho.matrix() * e).trace().re).collect())
}

/// `κ_j = <b,j|ρ|b,j>`, the distribution of `λ^b` under `ρ`.
pub fn value_distribution<T: Real>(space: &HilbertSpace<'_, T>, rho: &DensityMatrix<T>, b: usize) -> Vec<T> {
    space.states(b).iter().map(|s| rho.weight_along(s.vector())).collect()
}

/// `E(λ^b | λ^a = λ_k) = <a,k|T^b|a,k>`
pub fn conditional_expectation<T: Real>(space: &HilbertSpace<'_, T>, a: usize, k: usize, b: usize) -> T {
    linalg::expectation(&space.observable(b).matrix, space.state(a, k).vector()).re
}

/// Dephasing in the `b` basis when `outcome` is `None`; collapse to
/// `|b,j><b,j|` when value `j` was found.
pub fn posterior_state<T: Real>(
    space: &HilbertSpace<'_, T>,
    rho: &DensityMatrix<T>,
    b: usize,
    outcome: Option<usize>,
) -> Result<DensityMatrix<T>> {
    let states = space.states(b);
    match outcome {
        None => {
            let d = space.dim();
            let m = states.iter().fold(CMatrix::zeros(d, d), |acc, s| {
                acc + linalg::projector(s.vector()) * re(rho.weight_along(s.vector()))
            });
            DensityMatrix::new(m)
        }
        Some(j) => {
            let s = states
                .get(j)
                .ok_or_else(|| Error::InvalidArgument(format!("value index {j} out of range")))?;
            let p = rho.weight_along(s.vector());
            if to_f64(p) < ZERO_PROBABILITY {
                return Err(Error::ZeroProbabilityOutcome {
                    experiment: s.experiment.clone(),
                    value: s.value.clone(),
                    probability: to_f64(p),
                });
            }
            DensityMatrix::pure(s.vector())
        }
    }
}

/// Posterior over `λ_j` after observing `y`: `κ_j p(y|λ_j) / Σ_i κ_i p(y|λ_i)`.
pub fn bayes_posterior(prior: &[f64], stat: &StatisticalModel, y: usize) -> Result<Vec<f64>> {
    if prior.len() != stat.value_count() {
        return Err(Error::DimensionMismatch { expected: stat.value_count(), found: prior.len() });
    }
    let joint: Vec<f64> = prior.iter().enumerate().map(|(j, &k)| k * stat.p(y, j)).collect();
    let total: f64 = joint.iter().sum();
    if total < ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome {
            experiment: stat.experiment.clone(),
            value: stat.outcomes[y].clone(),
            probability: total,
        });
    }
    Ok(joint.into_iter().map(|x| x / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::born::transition_matrix;
    use crate::density::density_from_prior;
    use crate::hilbert::Tolerances;
    use crate::io::{spin3, triangle6};

    #[test]
    fn statistical_model_columns_must_sum_to_one() {
        let bad = StatisticalModel::new("x", vec!["u".into(), "v".into()], vec![vec![0.5, 0.5], vec![0.4, 0.5]]);
        assert!(matches!(bad, Err(Error::InvalidStatisticalModel(_))));
    }

    #[test]
    fn measures_resolve_identity() {
        for model in [spin3(), triangle6()] {
            let space = HilbertSpace::<f64>::build(&model, Tolerances::default()).unwrap();
            for b in 0..space.experiment_count() {
                let stat = StatisticalModel::symmetric_noise(&model, b, 0.2).unwrap();
                let m = operator_measure(&space, &stat).unwrap();
                assert!(m.completeness_residual() < 1e-12);
                assert!(m.spectrum_violation() < 1e-12);
            }
        }
    }

    #[test]
    fn maximally_mixed_prediction_averages_likelihood() {
        let model = triangle6();
        let space = HilbertSpace::<f64>::build(&model, Tolerances::default()).unwrap();
        let stat = StatisticalModel::new(
            "w2",
            vec!["x".into(), "y".into()],
            vec![vec![1.0, 0.5, 0.0], vec![0.0, 0.5, 1.0]],
        )
        .unwrap();
        let m = operator_measure(&space, &stat).unwrap();
        let p = predictive_distribution(&DensityMatrix::maximally_mixed(3), &m).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn conditional_expectation_matches_transition_average() {
        let model = spin3();
        let space = HilbertSpace::<f64>::build(&model, Tolerances::default()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let p = transition_matrix(&space, a, b);
                let lambda = model.experiment(b).eigenvalues();
                for k in 0..2 {
                    let avg: f64 = (0..2).map(|i| lambda[i] * p.get(k, i)).sum();
                    assert!((conditional_expectation(&space, a, k, b) - avg).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dephasing_fixed_point_and_collapse() {
        let model = spin3();
        let space = HilbertSpace::<f64>::build(&model, Tolerances::default()).unwrap();
        let rho = density_from_prior(&space, 1, &[0.25, 0.75]).unwrap();
        let same = posterior_state(&space, &rho, 1, None).unwrap();
        assert!(same.frobenius_distance(&rho) < 1e-12);
        let pure = posterior_state(&space, &DensityMatrix::pure(space.state(0, 0).vector()).unwrap(), 0, Some(0)).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        let zero = posterior_state(&space, &DensityMatrix::pure(space.state(0, 0).vector()).unwrap(), 0, Some(1));
        assert!(matches!(zero, Err(Error::ZeroProbabilityOutcome { .. })));
    }

    #[test]
    fn bayes_weights() {
        let model = spin3();
        let stat = StatisticalModel::symmetric_noise(&model, 0, 0.1).unwrap();
        let post = bayes_posterior(&[0.5, 0.5], &stat, 0).unwrap();
        assert!((post[0] - 0.9).abs() < 1e-15);
        let post = bayes_posterior(&[0.7, 0.3], &stat, 1).unwrap();
        // 0.3·0.9 / (0.7·0.1 + 0.3·0.9)
        assert!((post[1] - 0.27 / 0.34).abs() < 1e-15);
    }
}
