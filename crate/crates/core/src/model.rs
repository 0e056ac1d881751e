//! Experiments over a total parameter space and their connections.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::group::{ElementId, FiniteGroup, GroupAction, PointId};

/// A measurable parameter `λ^a`: a total map from points of Φ to a finite
/// ordered set of values, each carrying a real eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    label: String,
    values: Vec<String>,
    eigenvalues: Vec<f64>,
    assignment: Vec<usize>,
}

impl Experiment {
    /// `assignment[i]` is the value index taken at point `i`. Every value must
    /// be attained and there must be at least two of them.
    pub fn new(label: impl Into<String>, values: Vec<String>, eigenvalues: Vec<f64>, assignment: Vec<usize>) -> Result<Self> {
        let label = label.into();
        if values.len() < 2 {
            return Err(Error::InvalidModel(format!(
                "experiment `{label}` has {} distinct value(s); at least two are required",
                values.len()
            )));
        }
        if eigenvalues.len() != values.len() {
            return Err(Error::InvalidModel(format!(
                "experiment `{label}`: {} eigenvalues for {} values",
                eigenvalues.len(),
                values.len()
            )));
        }
        if let Some(x) = eigenvalues.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidModel(format!("experiment `{label}`: eigenvalue {x} is not finite")));
        }
        let distinct: BTreeSet<_> = values.iter().collect();
        if distinct.len() != values.len() {
            return Err(Error::InvalidModel(format!("experiment `{label}` lists a value twice")));
        }
        if let Some(&v) = assignment.iter().find(|&&v| v >= values.len()) {
            return Err(Error::InvalidModel(format!("experiment `{label}`: value index {v} out of range")));
        }
        let used: BTreeSet<_> = assignment.iter().copied().collect();
        if let Some(k) = (0..values.len()).find(|k| !used.contains(k)) {
            return Err(Error::InvalidModel(format!(
                "experiment `{label}`: value `{}` is not taken at any point",
                values[k]
            )));
        }
        Ok(Experiment { label, values, eigenvalues, assignment })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn value_count(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Value index of `λ^a(φ)`.
    pub fn value_at(&self, point: PointId) -> usize {
        self.assignment[point]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Level sets of the value map, in value order.
    pub fn blocks(&self) -> Vec<Vec<PointId>> {
        let mut blocks = vec![Vec::new(); self.values.len()];
        for (p, &v) in self.assignment.iter().enumerate() {
            blocks[v].push(p);
        }
        blocks
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentCatalog {
    experiments: Vec<Experiment>,
    connections: BTreeMap<(usize, usize), ElementId>,
    reference: usize,
}

impl ExperimentCatalog {
    pub fn new(experiments: Vec<Experiment>, connections: BTreeMap<(usize, usize), ElementId>, reference: usize) -> Result<Self> {
        if experiments.is_empty() {
            return Err(Error::InvalidModel("catalog has no experiments".into()));
        }
        let labels: BTreeSet<_> = experiments.iter().map(Experiment::label).collect();
        if labels.len() != experiments.len() {
            return Err(Error::InvalidModel("experiment labels are not unique".into()));
        }
        if reference >= experiments.len() {
            return Err(Error::InvalidModel("reference experiment out of range".into()));
        }
        if let Some(&(a, b)) = connections.keys().find(|(a, b)| *a >= experiments.len() || *b >= experiments.len()) {
            return Err(Error::InvalidModel(format!("connection ({a}, {b}) out of range")));
        }
        Ok(ExperimentCatalog { experiments, connections, reference })
    }

    pub fn experiments(&self) -> &[Experiment] {
        &self.experiments
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    /// Declared connections only.
    pub fn declared_connections(&self) -> &BTreeMap<(usize, usize), ElementId> {
        &self.connections
    }
}

/// Value relabeling `β` with `λ^b(φ) = β(λ^a(φ g))` for all φ.
pub type ValueBijection = Vec<usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentModel {
    name: String,
    action: GroupAction,
    catalog: ExperimentCatalog,
}

/// The maximal partition-compatible subgroup `G^a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgroup {
    pub experiment: usize,
    pub elements: Vec<ElementId>,
    /// Set when only the identity is compatible.
    pub trivial: bool,
}

impl ExperimentModel {
    pub fn new(name: impl Into<String>, action: GroupAction, catalog: ExperimentCatalog) -> Result<Self> {
        if action.points().is_empty() {
            return Err(Error::InvalidModel("total parameter space is empty".into()));
        }
        for e in catalog.experiments() {
            if e.assignment().len() != action.points().len() {
                return Err(Error::InvalidModel(format!(
                    "experiment `{}` does not assign a value to every point",
                    e.label()
                )));
            }
        }
        Ok(ExperimentModel { name: name.into(), action, catalog })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn group(&self) -> &FiniteGroup {
        self.action.group_arc()
    }

    pub fn catalog(&self) -> &ExperimentCatalog {
        &self.catalog
    }

    pub fn experiments(&self) -> &[Experiment] {
        self.catalog.experiments()
    }

    pub fn experiment(&self, a: usize) -> &Experiment {
        &self.catalog.experiments()[a]
    }

    pub fn reference(&self) -> usize {
        self.catalog.reference()
    }

    pub fn point_count(&self) -> usize {
        self.action.points().len()
    }

    pub fn experiment_index(&self, label: &str) -> Result<usize> {
        self.experiments()
            .iter()
            .position(|e| e.label() == label)
            .ok_or_else(|| Error::UnknownExperiment(label.to_string()))
    }

    /// `g_ab`; the diagonal defaults to the identity when undeclared.
    pub fn connection(&self, a: usize, b: usize) -> Option<ElementId> {
        match self.catalog.connections.get(&(a, b)) {
            Some(&g) => Some(g),
            None if a == b => Some(self.group().identity()),
            None => None,
        }
    }

    /// Elements `g` with `λ^a(φ₁) = λ^a(φ₂) ⇒ λ^a(φ₁g) = λ^a(φ₂g)`.
    pub fn derive_induced_subgroup(&self, a: usize) -> Result<InducedSubgroup> {
        let exp = self.experiment(a);
        let elements: Vec<ElementId> = self
            .group()
            .elements()
            .filter(|&g| self.preserves_partition(exp.assignment(), g))
            .collect();
        if !self.group().is_subgroup(&elements) {
            return Err(Error::NotASubgroup(format!("compatible set of `{}`", exp.label())));
        }
        let trivial = elements.len() == 1;
        Ok(InducedSubgroup { experiment: a, elements, trivial })
    }

    /// Whether `g` maps level sets of `assignment` onto level sets.
    pub fn preserves_partition(&self, assignment: &[usize], g: ElementId) -> bool {
        let perm = self.action.perm(g);
        let mut image_of: BTreeMap<usize, usize> = BTreeMap::new();
        for (p, &v) in assignment.iter().enumerate() {
            let w = assignment[perm[p]];
            match image_of.insert(v, w) {
                Some(prev) if prev != w => return false,
                _ => {}
            }
        }
        true
    }

    /// The relabeling `β` with `λ^b(φ) = β(λ^a(φ g))`, when `g` transforms
    /// `λ^a` into `λ^b` up to a bijection of value sets.
    pub fn value_bijection(&self, a: usize, b: usize, g: ElementId) -> Option<ValueBijection> {
        let ea = self.experiment(a);
        let eb = self.experiment(b);
        if ea.value_count() != eb.value_count() {
            return None;
        }
        let perm = self.action.perm(g);
        let mut beta = vec![usize::MAX; ea.value_count()];
        for p in 0..self.point_count() {
            let va = ea.value_at(perm[p]);
            let vb = eb.value_at(p);
            if beta[va] == usize::MAX {
                beta[va] = vb;
            } else if beta[va] != vb {
                return None;
            }
        }
        let distinct: BTreeSet<_> = beta.iter().collect();
        (distinct.len() == beta.len() && !beta.contains(&usize::MAX)).then_some(beta)
    }

    /// First point where `λ^b(φ) = β(λ^a(φ g))` fails for every choice of β,
    /// reported as a pair of points with equal `λ^a(φ g)` but different `λ^b`.
    pub fn connection_witness(&self, a: usize, b: usize, g: ElementId) -> Option<(PointId, PointId)> {
        let ea = self.experiment(a);
        let eb = self.experiment(b);
        let perm = self.action.perm(g);
        let n = self.point_count();
        for p in 0..n {
            for q in (p + 1)..n {
                let same_a = ea.value_at(perm[p]) == ea.value_at(perm[q]);
                let same_b = eb.value_at(p) == eb.value_at(q);
                if same_a != same_b {
                    return Some((p, q));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn cyclic_model(n: usize, labels: &[(&str, Vec<usize>)]) -> ExperimentModel {
        let names = (0..n).map(|i| format!("r{i}")).collect();
        let cayley = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let group = Arc::new(FiniteGroup::from_cayley(names, cayley).unwrap());
        let perms = (0..n).map(|r| (0..n).map(|i| (i + r) % n).collect()).collect();
        let action = GroupAction::new(group, (0..n).map(|i| format!("p{i}")).collect(), perms).unwrap();
        let exps = labels
            .iter()
            .map(|(l, asg)| {
                let k = asg.iter().max().unwrap() + 1;
                let values = (0..k).map(|v| format!("v{v}")).collect();
                let eig = (1..=k).map(|v| v as f64).collect();
                Experiment::new(*l, values, eig, asg.clone()).unwrap()
            })
            .collect();
        let catalog = ExperimentCatalog::new(exps, BTreeMap::new(), 0).unwrap();
        ExperimentModel::new("test", action, catalog).unwrap()
    }

    #[test]
    fn single_valued_experiment_rejected() {
        let err = Experiment::new("a", vec!["x".into()], vec![1.0], vec![0, 0]);
        assert!(matches!(err, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn unused_value_rejected() {
        let err = Experiment::new("a", vec!["x".into(), "y".into(), "z".into()], vec![1.0, 2.0, 3.0], vec![0, 1]);
        assert!(matches!(err, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn injective_value_map_gives_whole_group() {
        let m = cyclic_model(4, &[("a", vec![0, 1, 2, 3])]);
        let sub = m.derive_induced_subgroup(0).unwrap();
        assert_eq!(sub.elements, vec![0, 1, 2, 3]);
    }

    #[test]
    fn parity_partition_on_c4() {
        let m = cyclic_model(4, &[("a", vec![0, 1, 0, 1])]);
        // every rotation maps the parity classes to parity classes
        assert_eq!(m.derive_induced_subgroup(0).unwrap().elements.len(), 4);
        let m = cyclic_model(4, &[("a", vec![0, 0, 1, 1])]);
        assert_eq!(m.derive_induced_subgroup(0).unwrap().elements, vec![0, 2]);
        let m = cyclic_model(6, &[("a", vec![0, 0, 0, 1, 1, 1]), ("b", vec![1, 1, 0, 0, 0, 1])]);
        // rotation by one step turns b into a: λ^a(φ + 1) = λ^b(φ) up to relabeling
        assert_eq!(m.value_bijection(0, 1, 1), Some(vec![1, 0]));
        assert_eq!(m.value_bijection(0, 1, 0), None);
        assert!(m.connection_witness(0, 1, 0).is_some());
        assert!(m.connection_witness(0, 1, 1).is_none());
    }
}
