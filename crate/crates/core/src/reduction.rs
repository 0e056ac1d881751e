//! Model reduction: cartesian total parameters, natural functions, admissible
//! values and restriction of a parameter's range to orbits of its group.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{is_permutation, ElementId, FiniteGroup, PermutationAction, PointId};
use crate::io::model_file::{ConnectionSpec, ElementSpec, ExperimentSpec, GroupSpec, ModelFile, PermSpec, FORMAT_VERSION};
use crate::model::ExperimentModel;

/// A parameter `θ^a` with a finite range on which a subgroup `G^a` acts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WideParameter {
    experiment: String,
    range: Vec<String>,
    group: Arc<FiniteGroup>,
    /// Element -> permutation of range indices; keys form the acting subgroup.
    action: BTreeMap<ElementId, Vec<usize>>,
}

impl WideParameter {
    /// Checks that the keys form a subgroup and that the permutations obey
    /// the right-action law.
    pub fn new(
        experiment: impl Into<String>,
        range: Vec<String>,
        group: Arc<FiniteGroup>,
        action: BTreeMap<ElementId, Vec<usize>>,
    ) -> Result<Self> {
        let experiment = experiment.into();
        let elements: Vec<ElementId> = action.keys().copied().collect();
        if elements.iter().any(|&g| g >= group.order()) || !group.is_subgroup(&elements) {
            return Err(Error::NotASubgroup(format!("acting set of `{experiment}`")));
        }
        for (&g, p) in &action {
            if p.len() != range.len() || !is_permutation(p) {
                return Err(Error::ActionMismatch(format!(
                    "`{}` does not permute the range of `{experiment}`",
                    group.name(g)
                )));
            }
        }
        for (&g, pg) in &action {
            for (&h, ph) in &action {
                let gh = group.mul(g, h);
                if (0..range.len()).any(|v| ph[pg[v]] != action[&gh][v]) {
                    return Err(Error::ActionMismatch(format!(
                        "right-action law fails on the range of `{experiment}` for ({}, {})",
                        group.name(g),
                        group.name(h)
                    )));
                }
            }
        }
        Ok(WideParameter { experiment, range, group, action })
    }

    /// `G^a` acting on the values of `λ^a`.
    pub fn from_experiment(model: &ExperimentModel, a: usize) -> Result<Self> {
        let exp = model.experiment(a);
        let sub = model.derive_induced_subgroup(a)?;
        let perm_of = |g: ElementId| {
            let p = model.action().perm(g);
            let mut img = vec![usize::MAX; exp.value_count()];
            for phi in 0..model.point_count() {
                img[exp.value_at(phi)] = exp.value_at(p[phi]);
            }
            img
        };
        let action = sub.elements.iter().map(|&g| (g, perm_of(g))).collect();
        Self::new(exp.label(), exp.values().to_vec(), model.action().group_arc().clone(), action)
    }

    pub fn experiment(&self) -> &str {
        &self.experiment
    }

    pub fn range(&self) -> &[String] {
        &self.range
    }

    pub fn elements(&self) -> Vec<ElementId> {
        self.action.keys().copied().collect()
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Orbits of the acting subgroup on the whole range.
    pub fn range_orbits(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.range.len()).collect();
        self.orbits(&self.elements(), &all).expect("acting set is a subgroup and the range is invariant")
    }
}

impl PermutationAction for WideParameter {
    fn group(&self) -> &FiniteGroup {
        &self.group
    }

    fn point_count(&self) -> usize {
        self.range.len()
    }

    fn acting_elements(&self) -> Vec<ElementId> {
        self.elements()
    }

    fn image(&self, point: PointId, g: ElementId) -> PointId {
        self.action[&g][point]
    }
}

/// Outcome of the naturality test with a counterexample on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaturalityCheck {
    pub natural: bool,
    /// `(π₁, π₂, g)` with `f(π₁) = f(π₂)` but `f(π₁g) ≠ f(π₂g)`.
    pub witness: Option<(PointId, PointId, ElementId)>,
}

/// Whether `f(π₁) = f(π₂)` implies `f(π₁g) = f(π₂g)` for all acting `g`.
pub fn natural_function_check<L: Ord, A: PermutationAction + ?Sized>(f: &[L], action: &A) -> Result<NaturalityCheck> {
    let total: Vec<Option<&L>> = f.iter().map(Some).collect();
    natural_on_domain(&total, action)
}

/// [`natural_function_check`] for a partial `f`; points mapped to `None` are
/// outside the domain, and leaving the domain counts as a failure.
pub fn natural_on_domain<L: Ord, A: PermutationAction + ?Sized>(f: &[Option<L>], action: &A) -> Result<NaturalityCheck> {
    if f.len() != action.point_count() {
        return Err(Error::DimensionMismatch { expected: action.point_count(), found: f.len() });
    }
    // Level sets of f; checking each point against the first of its class
    // covers every pair.
    let mut classes: BTreeMap<&L, Vec<PointId>> = BTreeMap::new();
    for (p, v) in f.iter().enumerate() {
        if let Some(v) = v {
            classes.entry(v).or_default().push(p);
        }
    }
    for g in action.acting_elements() {
        for members in classes.values() {
            let first = members[0];
            let target = &f[action.image(first, g)];
            for &p in members {
                let img = &f[action.image(p, g)];
                if img.is_none() || target.is_none() || img != target {
                    let witness = if img.is_none() { (p, p, g) } else { (first, p, g) };
                    return Ok(NaturalityCheck { natural: false, witness: Some(witness) });
                }
            }
        }
    }
    Ok(NaturalityCheck { natural: true, witness: None })
}

/// `π = ×_a θ^a` with the componentwise action of the elements shared by all
/// factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartesianTotal {
    factors: Vec<WideParameter>,
    /// Tuples of range indices in lexicographic order.
    points: Vec<Vec<usize>>,
    acting: Vec<ElementId>,
    group: Arc<FiniteGroup>,
}

pub fn cartesian_total(factors: Vec<WideParameter>, group: &Arc<FiniteGroup>) -> Result<CartesianTotal> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("no factors".into()));
    }
    for f in &factors {
        if f.group.as_ref() != group.as_ref() {
            return Err(Error::ActionMismatch(format!("factor `{}` acts through a different group", f.experiment)));
        }
    }
    let mut acting: BTreeSet<ElementId> = factors[0].action.keys().copied().collect();
    for f in &factors[1..] {
        let keys: BTreeSet<ElementId> = f.action.keys().copied().collect();
        acting = acting.intersection(&keys).copied().collect();
    }
    let acting: Vec<ElementId> = acting.into_iter().collect();
    let mut points: Vec<Vec<usize>> = vec![vec![]];
    for f in &factors {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                (0..f.range.len()).map(move |v| {
                    let mut t = prefix.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    Ok(CartesianTotal { factors, points, acting, group: group.clone() })
}

impl CartesianTotal {
    pub fn factors(&self) -> &[WideParameter] {
        &self.factors
    }

    pub fn points(&self) -> &[Vec<usize>] {
        &self.points
    }

    pub fn point_index(&self, tuple: &[usize]) -> Option<PointId> {
        // Mixed-radix position in lexicographic order.
        if tuple.len() != self.factors.len() {
            return None;
        }
        let mut idx = 0;
        for (v, f) in tuple.iter().zip(&self.factors) {
            if *v >= f.range.len() {
                return None;
            }
            idx = idx * f.range.len() + v;
        }
        Some(idx)
    }

    /// `θ^a(π)`
    pub fn project(&self, point: PointId, a: usize) -> usize {
        self.points[point][a]
    }

    pub fn label(&self, point: PointId) -> String {
        let parts: Vec<&str> = self.points[point]
            .iter()
            .zip(&self.factors)
            .map(|(&v, f)| f.range[v].as_str())
            .collect();
        format!("({})", parts.join(", "))
    }
}

impl PermutationAction for CartesianTotal {
    fn group(&self) -> &FiniteGroup {
        &self.group
    }

    fn point_count(&self) -> usize {
        self.points.len()
    }

    fn acting_elements(&self) -> Vec<ElementId> {
        self.acting.clone()
    }

    fn image(&self, point: PointId, g: ElementId) -> PointId {
        let t: Vec<usize> = self.points[point]
            .iter()
            .zip(&self.factors)
            .map(|(&v, f)| f.action[&g][v])
            .collect();
        self.point_index(&t).expect("image tuple is in range")
    }
}

/// `{μ^a : some π ∈ Ψ has θ^a(π) = μ^a}`
pub fn admissible_values(total: &CartesianTotal, psi: &[PointId], a: usize) -> Result<Vec<usize>> {
    if psi.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    if a >= total.factors.len() {
        return Err(Error::InvalidArgument(format!("factor index {a} out of range")));
    }
    if let Some(p) = psi.iter().find(|&&p| p >= total.points.len()) {
        return Err(Error::InvalidArgument(format!("point {p} is not in the cartesian total")));
    }
    let values: BTreeSet<usize> = psi.iter().map(|&p| total.project(p, a)).collect();
    Ok(values.into_iter().collect())
}

/// Tuples `(λ^1(φ), …, λ^n(φ))` realized by points of a model.
#[derive(Debug, Clone)]
pub struct RealizedRestriction {
    pub total: CartesianTotal,
    /// Indices into `total.points()`, sorted.
    pub psi: Vec<PointId>,
    /// Naturality of `φ ↦ tuple` under the model's full action.
    pub naturality: NaturalityCheck,
    /// When natural, `induced[g][i]` is the position in `psi` of `psi[i]·g`.
    pub induced: Option<Vec<Vec<usize>>>,
}

pub fn realized_restriction(model: &ExperimentModel) -> Result<RealizedRestriction> {
    let factors = (0..model.experiments().len())
        .map(|a| WideParameter::from_experiment(model, a))
        .collect::<Result<Vec<_>>>()?;
    let total = cartesian_total(factors, model.action().group_arc())?;
    let tuple_of: Vec<PointId> = (0..model.point_count())
        .map(|phi| {
            let t: Vec<usize> = model.experiments().iter().map(|e| e.value_at(phi)).collect();
            total.point_index(&t).expect("values are in range")
        })
        .collect();
    let psi: Vec<PointId> = tuple_of.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let naturality = natural_function_check(&tuple_of, model.action())?;
    let induced = naturality.natural.then(|| {
        model
            .group()
            .elements()
            .map(|g| {
                psi.iter()
                    .map(|&t| {
                        let phi = tuple_of.iter().position(|&x| x == t).expect("realized");
                        let img = tuple_of[model.action().perm(g)[phi]];
                        psi.binary_search(&img).expect("image of a realized tuple is realized")
                    })
                    .collect()
            })
            .collect()
    });
    Ok(RealizedRestriction { total, psi, naturality, induced })
}

/// A parameter whose range is cut down to a union of orbits, each orbit
/// becoming one reduced value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedExperiment {
    pub source: WideParameter,
    pub orbits: Vec<Vec<usize>>,
    pub selected_orbits: Vec<usize>,
    /// Range value -> index into `labels`; `None` outside the selected orbits.
    pub value_map: Vec<Option<usize>>,
    /// One label per selected orbit: its values joined with `|`.
    pub labels: Vec<String>,
}

impl ReducedExperiment {
    /// Naturality of the reduced value map under the source action.
    pub fn naturality(&self) -> NaturalityCheck {
        natural_on_domain(&self.value_map, &self.source).expect("value map covers the range")
    }
}

pub fn orbit_reduce(wide: &WideParameter, selected: &[usize]) -> Result<ReducedExperiment> {
    if selected.is_empty() {
        return Err(Error::NoOrbitSelected);
    }
    let orbits = wide.range_orbits();
    let chosen: BTreeSet<usize> = selected.iter().copied().collect();
    if let Some(&k) = chosen.iter().find(|&&k| k >= orbits.len()) {
        return Err(Error::InvalidArgument(format!("orbit {k} does not exist ({} orbits)", orbits.len())));
    }
    let mut value_map = vec![None; wide.range.len()];
    let mut labels = Vec::with_capacity(chosen.len());
    for (label_idx, &k) in chosen.iter().enumerate() {
        for &v in &orbits[k] {
            value_map[v] = Some(label_idx);
        }
        let names: Vec<&str> = orbits[k].iter().map(|&v| wide.range[v].as_str()).collect();
        labels.push(names.join("|"));
    }
    Ok(ReducedExperiment {
        source: wide.clone(),
        orbits,
        selected_orbits: chosen.into_iter().collect(),
        value_map,
        labels,
    })
}

/// Model file for the reduced model: Φ restricted to points whose `λ^a` lies
/// in a selected orbit, `λ^a` replaced by the orbit labels, other experiments
/// restricted (and dropped when fewer than two values remain), and the group
/// replaced by the setwise stabilizer of the restricted Φ modulo the elements
/// acting trivially on it.
pub fn reduce_model(model: &ExperimentModel, a: usize, reduced: &ReducedExperiment) -> Result<ModelFile> {
    let exp = model.experiment(a);
    if reduced.source.experiment() != exp.label() {
        return Err(Error::InvalidArgument(format!(
            "reduction of `{}` applied to `{}`",
            reduced.source.experiment(),
            exp.label()
        )));
    }
    if reduced.labels.len() < 2 {
        return Err(Error::InvalidModel(format!(
            "reduced `{}` takes a single value; experiments need at least two",
            exp.label()
        )));
    }
    let keep: Vec<PointId> = (0..model.point_count())
        .filter(|&p| reduced.value_map[exp.value_at(p)].is_some())
        .collect();
    let new_index: BTreeMap<PointId, usize> = keep.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let points = model.action().points();
    let phi: Vec<String> = keep.iter().map(|&p| points[p].clone()).collect();

    // Setwise stabilizer; one representative per distinct restricted action.
    let group = model.group();
    let mut reps: Vec<(ElementId, Vec<usize>)> = Vec::new();
    let mut rep_of: BTreeMap<ElementId, ElementId> = BTreeMap::new();
    for g in group.elements() {
        let perm = model.action().perm(g);
        let restricted: Option<Vec<usize>> = keep.iter().map(|p| new_index.get(&perm[*p]).copied()).collect();
        if let Some(r) = restricted {
            match reps.iter().find(|(_, q)| *q == r) {
                Some(&(h, _)) => {
                    rep_of.insert(g, h);
                }
                None => {
                    rep_of.insert(g, g);
                    reps.push((g, r));
                }
            }
        }
    }
    let elements = reps
        .iter()
        .map(|(g, r)| ElementSpec { name: group.name(*g).to_string(), action: PermSpec::Indices(r.clone()) })
        .collect();

    let mut experiments = Vec::new();
    let mut kept_labels = Vec::new();
    for (b, e) in model.experiments().iter().enumerate() {
        let label = e.label().to_string();
        let spec = if b == a {
            let values = keep
                .iter()
                .map(|&p| (points[p].clone(), reduced.labels[reduced.value_map[e.value_at(p)].expect("kept")].clone()))
                .collect();
            ExperimentSpec { label: label.clone(), values, value_order: Some(reduced.labels.clone()), eigenvalues: None }
        } else {
            let used: BTreeSet<usize> = keep.iter().map(|&p| e.value_at(p)).collect();
            if used.len() < 2 {
                continue;
            }
            ExperimentSpec {
                label: label.clone(),
                values: keep.iter().map(|&p| (points[p].clone(), e.values()[e.value_at(p)].clone())).collect(),
                value_order: Some(used.iter().map(|&v| e.values()[v].clone()).collect()),
                eigenvalues: Some(used.iter().map(|&v| (e.values()[v].clone(), e.eigenvalues()[v])).collect()),
            }
        };
        kept_labels.push((b, label));
        experiments.push(spec);
    }
    let mut connections = Vec::new();
    for (x, lx) in &kept_labels {
        for (y, ly) in &kept_labels {
            let declared = model.catalog().declared_connections().get(&(*x, *y));
            if let Some(&h) = declared.and_then(|g| rep_of.get(g)) {
                connections.push(ConnectionSpec { from: lx.clone(), to: ly.clone(), element: group.name(h).to_string() });
            }
        }
    }
    let reference = if kept_labels.iter().any(|(b, _)| *b == model.reference()) {
        model.experiment(model.reference()).label().to_string()
    } else {
        exp.label().to_string()
    };
    Ok(ModelFile {
        format_version: FORMAT_VERSION,
        name: format!("{}-reduced-{}", model.name(), exp.label()),
        description: Some(format!("orbit reduction of `{}` to {}", exp.label(), reduced.labels.join(", "))),
        phi,
        group: GroupSpec { elements, cayley: None },
        experiments,
        connections,
        reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{spin3, triangle6};

    fn cyclic(n: usize) -> Arc<FiniteGroup> {
        let names = (0..n).map(|i| format!("c{i}")).collect();
        let cayley = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Arc::new(FiniteGroup::from_cayley(names, cayley).unwrap())
    }

    fn binary_trivial(label: &str, g: &Arc<FiniteGroup>) -> WideParameter {
        WideParameter::new(label, vec!["0".into(), "1".into()], g.clone(), BTreeMap::from([(0, vec![0, 1])])).unwrap()
    }

    #[test]
    fn constant_and_injective_functions_are_natural() {
        let g = cyclic(2);
        let swap = WideParameter::new("x", vec!["a".into(), "b".into()], g, BTreeMap::from([(0, vec![0, 1]), (1, vec![1, 0])])).unwrap();
        assert!(natural_function_check(&[7, 7], &swap).unwrap().natural);
        assert!(natural_function_check(&[1, 2], &swap).unwrap().natural);
    }

    #[test]
    fn first_coordinate_under_swap_is_not_natural() {
        // 2×2 product; c1 swaps the two coordinates.
        let g = cyclic(2);
        let range: Vec<String> = ["00", "01", "10", "11"].map(String::from).to_vec();
        let swap = WideParameter::new("pair", range, g, BTreeMap::from([(0, vec![0, 1, 2, 3]), (1, vec![0, 2, 1, 3])])).unwrap();
        let first = [0, 0, 1, 1];
        let check = natural_function_check(&first, &swap).unwrap();
        assert!(!check.natural);
        let (p, q, g) = check.witness.unwrap();
        assert_eq!(first[p], first[q]);
        assert_ne!(first[swap.image(p, g)], first[swap.image(q, g)]);
    }

    #[test]
    fn trivial_product_has_singleton_orbits() {
        let g = cyclic(1);
        let total = cartesian_total(vec![binary_trivial("x", &g), binary_trivial("y", &g)], &g).unwrap();
        assert_eq!(total.point_count(), 4);
        let all: Vec<usize> = (0..4).collect();
        assert_eq!(total.orbits(&total.acting_elements(), &all).unwrap().len(), 4);
        assert_eq!(admissible_values(&total, &all, 1).unwrap(), vec![0, 1]);
        assert_eq!(admissible_values(&total, &[2], 0).unwrap(), vec![1]);
        assert!(matches!(admissible_values(&total, &[], 0), Err(Error::EmptyRestriction)));
    }

    #[test]
    fn mismatched_group_is_rejected() {
        let g2 = cyclic(2);
        let g3 = cyclic(3);
        assert!(matches!(cartesian_total(vec![binary_trivial("x", &g2)], &g3), Err(Error::ActionMismatch(_))));
    }

    #[test]
    fn signed_magnitudes_reduce_to_sign() {
        // Range {-2, -1, +1, +2}; c1 swaps magnitudes within each sign.
        let g = cyclic(2);
        let range: Vec<String> = ["-2", "-1", "+1", "+2"].map(String::from).to_vec();
        let wide = WideParameter::new("m", range, g, BTreeMap::from([(0, vec![0, 1, 2, 3]), (1, vec![1, 0, 3, 2])])).unwrap();
        assert_eq!(wide.range_orbits(), vec![vec![0, 1], vec![2, 3]]);
        let red = orbit_reduce(&wide, &[0, 1]).unwrap();
        assert_eq!(red.labels, vec!["-2|-1", "+1|+2"]);
        assert_eq!(red.value_map, vec![Some(0), Some(0), Some(1), Some(1)]);
        assert!(red.naturality().natural);
        assert!(matches!(orbit_reduce(&wide, &[]), Err(Error::NoOrbitSelected)));
    }

    #[test]
    fn spin3_realizes_six_of_eight_triples() {
        let m = spin3();
        let r = realized_restriction(&m).unwrap();
        assert_eq!(r.total.point_count(), 8);
        assert_eq!(r.psi.len(), 6);
        assert!(r.naturality.natural);
        for a in 0..3 {
            assert_eq!(admissible_values(&r.total, &r.psi, a).unwrap(), vec![0, 1]);
        }
    }

    #[test]
    fn triangle_window_action_on_values() {
        let m = triangle6();
        let w = WideParameter::from_experiment(&m, 0).unwrap();
        // C3 rotates the three corners: one orbit.
        assert_eq!(w.range_orbits().len(), 1);
        let red = orbit_reduce(&w, &[0]).unwrap();
        assert_eq!(red.labels.len(), 1);
        assert!(matches!(reduce_model(&m, 0, &red), Err(Error::InvalidModel(_))));
    }
}
