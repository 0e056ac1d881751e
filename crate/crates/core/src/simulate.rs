//! Seeded Monte Carlo runs of experiment sequences.
//!
//! Each run draws the parameter value from the current state, an observation
//! from the statistical model, and collapses onto the found value. Run `r`
//! uses the generator stream `(seed, r)`, so results do not depend on how
//! runs are scheduled; counts are merged by summation.

use rand::distributions::{Distribution, WeightedIndex};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::born::transition_matrix;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, RealizationMode};
use crate::measurement::{
    bayes_posterior, operator_measure, posterior_state, predictive_distribution, value_distribution,
    StatisticalModel,
};
use crate::random::stream;
use crate::scalar::{to_f64, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct PlanStep {
    pub experiment: usize,
    pub stat: StatisticalModel,
}

/// Aggregated counts and ensemble predictions for one step of the plan.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary<T: Real> {
    pub experiment: String,
    pub values: Vec<String>,
    pub outcomes: Vec<String>,
    pub value_counts: Vec<u64>,
    pub observation_counts: Vec<u64>,
    /// `κ_j` of the ensemble state before the step.
    pub predicted_values: Vec<f64>,
    /// `tr(ρ M(y))` of the ensemble state before the step.
    pub predicted_observations: Vec<f64>,
    /// Posterior over the values for each outcome; `None` for impossible
    /// outcomes.
    pub bayes_weights: Vec<Option<Vec<f64>>>,
    pub pre_state: DensityMatrix<T>,
    pub post_state: DensityMatrix<T>,
}

impl<T: Real> StepSummary<T> {
    pub fn value_frequencies(&self) -> Vec<f64> {
        frequencies(&self.value_counts)
    }

    pub fn observation_frequencies(&self) -> Vec<f64> {
        frequencies(&self.observation_counts)
    }

    /// `max_y |f_y - p_y| / σ_y` with the binomial `σ_y = √(p(1-p)/N)`.
    /// Deterministic outcomes (σ = 0) give 0 on exact agreement, infinity
    /// otherwise.
    pub fn observation_sigma_deviation(&self) -> f64 {
        sigma_deviation(&self.observation_counts, &self.predicted_observations)
    }

    pub fn value_sigma_deviation(&self) -> f64 {
        sigma_deviation(&self.value_counts, &self.predicted_values)
    }
}

fn frequencies(counts: &[u64]) -> Vec<f64> {
    let n: u64 = counts.iter().sum();
    counts.iter().map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 }).collect()
}

fn sigma_deviation(counts: &[u64], predicted: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    counts.iter().zip(predicted).fold(0.0, |acc: f64, (&c, &p)| {
        let f = c as f64 / nf;
        let sigma = (p * (1.0 - p) / nf).sqrt();
        let dev = (f - p).abs();
        let z = if sigma > 0.0 {
            dev / sigma
        } else if dev <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        acc.max(z)
    })
}

/// One run: the value index and observation index drawn at each step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunTrace {
    pub run: u64,
    pub values: Vec<usize>,
    pub observations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace<T: Real> {
    pub seed: u64,
    pub runs: u64,
    pub initial: DensityMatrix<T>,
    pub steps: Vec<StepSummary<T>>,
    /// `transitions[t][i][j]`: runs with value `i` at step `t` and `j` at `t+1`.
    pub transitions: Vec<Vec<Vec<u64>>>,
    /// The first few runs, for inspection and replay checks.
    pub sample: Vec<RunTrace>,
    pub mode: RealizationMode,
}

/// Sampling tables shared by all runs.
struct Samplers {
    first: WeightedIndex<f64>,
    /// `next[t][i]`: value distribution at step `t+1` given value `i` at `t`.
    next: Vec<Vec<WeightedIndex<f64>>>,
    /// `readout[t][j]`: observation distribution at step `t` given value `j`.
    readout: Vec<Vec<WeightedIndex<f64>>>,
}

fn weighted(weights: &[f64]) -> Result<WeightedIndex<f64>> {
    let clean: Vec<f64> = weights.iter().map(|&w| w.max(0.0)).collect();
    WeightedIndex::new(&clean).map_err(|e| Error::InvalidArgument(format!("sampling weights: {e}")))
}

impl Samplers {
    fn run(&self, rng: &mut ChaCha8Rng, run: u64) -> RunTrace {
        let steps = self.readout.len();
        let mut values: Vec<usize> = Vec::with_capacity(steps);
        let mut observations = Vec::with_capacity(steps);
        for t in 0..steps {
            let j = if t == 0 { self.first.sample(rng) } else { self.next[t - 1][values[t - 1]].sample(rng) };
            let y = self.readout[t][j].sample(rng);
            values.push(j);
            observations.push(y);
        }
        RunTrace { run, values, observations }
    }
}

fn check_plan<T: Real>(space: &HilbertSpace<'_, T>, initial: &DensityMatrix<T>, plan: &[PlanStep]) -> Result<()> {
    if initial.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: initial.dim() });
    }
    for step in plan {
        if step.experiment >= space.experiment_count() {
            return Err(Error::UnknownExperiment(format!("#{}", step.experiment)));
        }
        let label = &space.state(step.experiment, 0).experiment;
        if &step.stat.experiment != label {
            return Err(Error::InvalidStatisticalModel(format!(
                "model for `{}` used at a step measuring `{label}`",
                step.stat.experiment
            )));
        }
        if step.stat.value_count() != space.states(step.experiment).len() {
            return Err(Error::DimensionMismatch {
                expected: space.states(step.experiment).len(),
                found: step.stat.value_count(),
            });
        }
    }
    Ok(())
}

fn samplers<T: Real>(space: &HilbertSpace<'_, T>, initial: &DensityMatrix<T>, plan: &[PlanStep]) -> Result<Option<Samplers>> {
    let Some(first_step) = plan.first() else {
        return Ok(None);
    };
    let kappa: Vec<f64> = value_distribution(space, initial, first_step.experiment).into_iter().map(to_f64).collect();
    let first = weighted(&kappa)?;
    let mut next = Vec::with_capacity(plan.len().saturating_sub(1));
    for w in plan.windows(2) {
        let p = transition_matrix(space, w[0].experiment, w[1].experiment);
        next.push(p.rows().iter().map(|r| weighted(r)).collect::<Result<Vec<_>>>()?);
    }
    let readout = plan
        .iter()
        .map(|s| {
            (0..s.stat.value_count())
                .map(|j| weighted(&(0..s.stat.outcome_count()).map(|y| s.stat.p(y, j)).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(Samplers { first, next, readout }))
}

#[derive(Clone)]
struct Counts {
    values: Vec<Vec<u64>>,
    observations: Vec<Vec<u64>>,
    transitions: Vec<Vec<Vec<u64>>>,
}

impl Counts {
    fn new(plan: &[PlanStep]) -> Self {
        Counts {
            values: plan.iter().map(|s| vec![0; s.stat.value_count()]).collect(),
            observations: plan.iter().map(|s| vec![0; s.stat.outcome_count()]).collect(),
            transitions: plan
                .windows(2)
                .map(|w| vec![vec![0; w[1].stat.value_count()]; w[0].stat.value_count()])
                .collect(),
        }
    }

    fn add(mut self, run: &RunTrace) -> Self {
        for (t, (&j, &y)) in run.values.iter().zip(&run.observations).enumerate() {
            self.values[t][j] += 1;
            self.observations[t][y] += 1;
            if t > 0 {
                self.transitions[t - 1][run.values[t - 1]][j] += 1;
            }
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        fn add_into(a: &mut [u64], b: &[u64]) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            add_into(a, b);
        }
        for (a, b) in self.observations.iter_mut().zip(&other.observations) {
            add_into(a, b);
        }
        for (a, b) in self.transitions.iter_mut().zip(&other.transitions) {
            for (x, y) in a.iter_mut().zip(b) {
                add_into(x, y);
            }
        }
        self
    }
}

const SAMPLE_RUNS: u64 = 8;

pub fn simulate_sequence<T: Real>(
    space: &HilbertSpace<'_, T>,
    initial: &DensityMatrix<T>,
    plan: &[PlanStep],
    runs: u64,
    seed: u64,
) -> Result<SimulationTrace<T>> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    check_plan(space, initial, plan)?;

    // Ensemble chain: the no-readout update applied step by step.
    let mut steps = Vec::with_capacity(plan.len());
    let mut rho = initial.clone();
    for step in plan {
        let b = step.experiment;
        let kappa: Vec<f64> = value_distribution(space, &rho, b).into_iter().map(to_f64).collect();
        let m = operator_measure(space, &step.stat)?;
        let predicted: Vec<f64> = predictive_distribution(&rho, &m)?.into_iter().map(to_f64).collect();
        let bayes = (0..step.stat.outcome_count())
            .map(|y| bayes_posterior(&kappa, &step.stat, y).ok())
            .collect();
        let post = posterior_state(space, &rho, b, None)?;
        steps.push(StepSummary {
            experiment: step.stat.experiment.clone(),
            values: space.states(b).iter().map(|s| s.value.clone()).collect(),
            outcomes: step.stat.outcomes.clone(),
            value_counts: vec![],
            observation_counts: vec![],
            predicted_values: kappa,
            predicted_observations: predicted,
            bayes_weights: bayes,
            pre_state: rho.clone(),
            post_state: post.clone(),
        });
        rho = post;
    }

    let mut counts = Counts::new(plan);
    let mut sample = Vec::new();
    if let Some(s) = samplers(space, initial, plan)? {
        counts = (0..runs)
            .into_par_iter()
            .fold(
                || Counts::new(plan),
                |acc, r| {
                    let mut rng = stream(seed, r);
                    acc.add(&s.run(&mut rng, r))
                },
            )
            .reduce(|| Counts::new(plan), Counts::merge);
        sample = (0..runs.min(SAMPLE_RUNS)).map(|r| s.run(&mut stream(seed, r), r)).collect();
    }
    for (t, step) in steps.iter_mut().enumerate() {
        step.value_counts = counts.values[t].clone();
        step.observation_counts = counts.observations[t].clone();
    }
    let mode = plan
        .iter()
        .flat_map(|s| space.states(s.experiment))
        .fold(space.representation().mode(), |m, s| m.combine(s.mode));
    Ok(SimulationTrace {
        seed,
        runs,
        initial: initial.clone(),
        steps,
        transitions: counts.transitions,
        sample,
        mode,
    })
}

/// `(before, after)` state pairs, one per step.
pub type StepStates<T> = Vec<(DensityMatrix<T>, DensityMatrix<T>)>;

/// Run `run` of a simulation, with the state before and after each step.
pub fn replay_run<T: Real>(
    space: &HilbertSpace<'_, T>,
    initial: &DensityMatrix<T>,
    plan: &[PlanStep],
    seed: u64,
    run: u64,
) -> Result<(RunTrace, StepStates<T>)> {
    check_plan(space, initial, plan)?;
    let Some(s) = samplers(space, initial, plan)? else {
        return Ok((RunTrace { run, values: vec![], observations: vec![] }, vec![]));
    };
    let trace = s.run(&mut stream(seed, run), run);
    let mut states = Vec::with_capacity(plan.len());
    let mut rho = initial.clone();
    for (step, &j) in plan.iter().zip(&trace.values) {
        let post = posterior_state(space, &rho, step.experiment, Some(j))?;
        states.push((rho, post.clone()));
        rho = post;
    }
    Ok((trace, states))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::density_from_prior;
    use crate::hilbert::Tolerances;
    use crate::io::spin3;

    fn space(model: &crate::model::ExperimentModel) -> HilbertSpace<'_, f64> {
        HilbertSpace::build(model, Tolerances::default()).unwrap()
    }

    #[test]
    fn empty_plan_keeps_initial_state() {
        let m = spin3();
        let sp = space(&m);
        let rho = density_from_prior(&sp, 0, &[0.7, 0.3]).unwrap();
        let trace = simulate_sequence(&sp, &rho, &[], 10, 1).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.initial, rho);
    }

    #[test]
    fn perfect_repeat_always_agrees() {
        let m = spin3();
        let sp = space(&m);
        let rho = density_from_prior(&sp, 0, &[0.5, 0.5]).unwrap();
        let step = PlanStep { experiment: 0, stat: StatisticalModel::perfect(&m, 0) };
        let trace = simulate_sequence(&sp, &rho, &[step.clone(), step], 2000, 9).unwrap();
        let t = &trace.transitions[0];
        assert_eq!(t[0][1] + t[1][0], 0);
        assert_eq!(t[0][0] + t[1][1], 2000);
    }

    #[test]
    fn results_are_reproducible() {
        let m = spin3();
        let sp = space(&m);
        let rho = density_from_prior(&sp, 0, &[0.7, 0.3]).unwrap();
        let plan = vec![
            PlanStep { experiment: 0, stat: StatisticalModel::symmetric_noise(&m, 0, 0.1).unwrap() },
            PlanStep { experiment: 1, stat: StatisticalModel::perfect(&m, 1) },
        ];
        let a = simulate_sequence(&sp, &rho, &plan, 5000, 42).unwrap();
        let b = simulate_sequence(&sp, &rho, &plan, 5000, 42).unwrap();
        assert_eq!(a, b);
        let (run, states) = replay_run(&sp, &rho, &plan, 42, 3).unwrap();
        assert_eq!(run, a.sample[3]);
        assert_eq!(states.len(), 2);
    }

    #[test]
    fn zero_runs_is_an_error() {
        let m = spin3();
        let sp = space(&m);
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(simulate_sequence(&sp, &rho, &[], 0, 1).is_err());
    }
}
