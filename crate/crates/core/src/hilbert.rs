//! Hilbert spaces built from indicator functions of experiment parameters.
//!
//! The ambient space is `L²(Φ)` with the counting measure, realized as
//! `C^|Φ|`. The common space `H` is the span of the normalized indicators of
//! the reference experiment `c`, and every matrix and state vector below is
//! written in that indicator basis.
//!
//! For `g` in `G^a` the operator `E^a† U(g) E^a` with `E^a = U(g_ca)` maps `H`
//! into itself. `W` is built by multiplying these factors along shortest
//! words over the induced subgroups; it is defined on the subgroup they
//! generate.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{shortest_words, ElementId, Letter};
use crate::linalg::{self, CMatrix, CVector, MatrixNorm};
use crate::model::ExperimentModel;
use crate::scalar::{from_usize, lit, re, to_f64, Real};
use crate::validate::{validate_assumptions, ValidationReport};

/// Numerical tolerances for structural checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Unitarity, homomorphism, eigenvector and orthonormality identities.
    pub structural: f64,
    /// Agreement of alternative words for the same element.
    pub word_consistency: f64,
    /// Unit norms and probability sums.
    pub normalization: f64,
    pub norm: MatrixNorm,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: 1e-10,
            word_consistency: 1e-8,
            normalization: 1e-12,
            norm: MatrixNorm::Operator,
        }
    }
}

impl Tolerances {
    pub fn as_map(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("structural".to_string(), self.structural),
            ("word_consistency".to_string(), self.word_consistency),
            ("normalization".to_string(), self.normalization),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    /// Coordinates indexed by the points of Φ.
    Ambient,
    /// Coordinates in the indicator basis of the common space.
    Common,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector<T: Real> {
    coords: CVector<T>,
    basis: BasisTag,
}

impl<T: Real> AmplitudeVector<T> {
    pub fn new(coords: CVector<T>, basis: BasisTag) -> Self {
        AmplitudeVector { coords, basis }
    }

    pub fn coords(&self) -> &CVector<T> {
        &self.coords
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn norm(&self) -> T {
        self.coords.norm()
    }

    /// `<self|other>`; vectors in different bases cannot be combined.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.basis != other.basis {
            return Err(Error::InvalidArgument(format!(
                "cannot combine {:?} and {:?} coordinates",
                self.basis, other.basis
            )));
        }
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch { expected: self.coords.len(), found: other.coords.len() });
        }
        Ok(linalg::inner(&self.coords, &other.coords))
    }
}

/// Normalized indicators `f_k^a`, one per value, in the ambient realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis<T: Real> {
    pub experiment: String,
    pub vectors: Vec<AmplitudeVector<T>>,
}

impl<T: Real> SubspaceBasis<T> {
    /// Coordinates of an ambient vector on the basis, and the norm of the part
    /// orthogonal to the subspace.
    pub fn project(&self, v: &CVector<T>) -> (CVector<T>, T) {
        let coeffs = CVector::from_iterator(
            self.vectors.len(),
            self.vectors.iter().map(|f| linalg::inner(f.coords(), v)),
        );
        let mut rest = v.clone();
        for (f, &x) in self.vectors.iter().zip(coeffs.iter()) {
            rest -= f.coords() * x;
        }
        (coeffs, rest.norm())
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Entries `1/√(block size)` on the k-th level set of `λ^a`.
pub fn indicator_basis<T: Real>(model: &ExperimentModel, a: usize) -> SubspaceBasis<T> {
    let exp = model.experiment(a);
    let n = model.point_count();
    let vectors = exp
        .blocks()
        .iter()
        .map(|block| {
            let h = re(T::one() / from_usize::<T>(block.len()).sqrt());
            let mut v = CVector::zeros(n);
            for &p in block {
                v[p] = h;
            }
            AmplitudeVector::new(v, BasisTag::Ambient)
        })
        .collect();
    SubspaceBasis { experiment: exp.label().to_string(), vectors }
}

/// Right regular representation `(U(g)f)(φ) = f(φg)` as permutations of
/// ambient coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularRepresentation {
    perms: Vec<Vec<usize>>,
}

pub fn build_regular_rep(model: &ExperimentModel) -> RegularRepresentation {
    RegularRepresentation { perms: model.action().perms().to_vec() }
}

impl RegularRepresentation {
    /// `(U(g)f)_i = f_{perm_g(i)}`
    pub fn apply<T: Real>(&self, g: ElementId, f: &CVector<T>) -> CVector<T> {
        let p = &self.perms[g];
        CVector::from_iterator(f.len(), (0..f.len()).map(|i| f[p[i]]))
    }

    /// Index map of `U(g)`: coordinate `i` of the image reads coordinate
    /// `index_map(g)[i]` of the input.
    pub fn index_map(&self, g: ElementId) -> &[usize] {
        &self.perms[g]
    }

    pub fn matrix<T: Real>(&self, g: ElementId) -> CMatrix<T> {
        let p = &self.perms[g];
        let n = p.len();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, p[i])] = re(T::one());
        }
        m
    }

    pub fn degree(&self) -> usize {
        self.perms.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizationMode {
    /// Built from the product formula over words; covers the whole group.
    Theorem1,
    /// The induced subgroups do not generate the group; anything needing an
    /// element outside their span uses indicator projection.
    IndicatorFallback,
}

impl RealizationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RealizationMode::Theorem1 => "theorem1",
            RealizationMode::IndicatorFallback => "indicator_fallback",
        }
    }

    pub fn combine(self, other: Self) -> Self {
        if self == RealizationMode::Theorem1 && other == RealizationMode::Theorem1 {
            RealizationMode::Theorem1
        } else {
            RealizationMode::IndicatorFallback
        }
    }
}

/// `W` on the common space, defined on the subgroup generated by the `G^a`.
#[derive(Debug, Clone)]
pub struct Representation<T: Real> {
    matrices: Vec<Option<CMatrix<T>>>,
    words: Vec<Option<Vec<Letter>>>,
    factors: BTreeMap<Letter, CMatrix<T>>,
    element_names: Vec<String>,
    mode: RealizationMode,
    consistency_residual: T,
    invariance_residual: T,
}

impl<T: Real> Representation<T> {
    pub fn contains(&self, g: ElementId) -> bool {
        self.matrices.get(g).is_some_and(Option::is_some)
    }

    pub fn matrix(&self, g: ElementId) -> Result<&CMatrix<T>> {
        self.matrices
            .get(g)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::NotInGeneratedSubgroup { element: self.element_names[g].clone() })
    }

    pub fn word(&self, g: ElementId) -> Option<&[Letter]> {
        self.words.get(g).and_then(|w| w.as_deref())
    }

    pub fn domain(&self) -> Vec<ElementId> {
        (0..self.matrices.len()).filter(|&g| self.contains(g)).collect()
    }

    pub fn mode(&self) -> RealizationMode {
        self.mode
    }

    /// Single-letter factors `E^a† U(s) E^a`, keyed by `(experiment, s)`.
    pub fn factors(&self) -> &BTreeMap<Letter, CMatrix<T>> {
        &self.factors
    }

    /// Largest deviation between `W(g)·F(a, s)` and `W(gs)` over all domain
    /// elements and letters.
    pub fn consistency_residual(&self) -> T {
        self.consistency_residual
    }

    /// Largest norm of the part of `E^a† U(s) E^a f` outside the common space.
    pub fn invariance_residual(&self) -> T {
        self.invariance_residual
    }

    pub fn dim(&self) -> usize {
        self.matrices.iter().flatten().next().map_or(0, |m| m.nrows())
    }

    pub fn unitarity_residual(&self, norm: MatrixNorm) -> T {
        self.matrices
            .iter()
            .flatten()
            .fold(T::zero(), |acc, m| acc.max(linalg::unitarity_residual(m, norm)))
    }

    /// `max ||W(g)W(h) - W(gh)||` over domain pairs.
    pub fn homomorphism_residual(&self, model: &ExperimentModel, norm: MatrixNorm) -> T {
        let domain = self.domain();
        let group = model.group();
        let mut worst = T::zero();
        for &g in &domain {
            for &h in &domain {
                let gh = group.mul(g, h);
                if let (Some(wg), Some(wh), Some(wgh)) = (&self.matrices[g], &self.matrices[h], &self.matrices[gh]) {
                    worst = worst.max(norm.of(&(wg * wh - wgh)));
                }
            }
        }
        worst
    }
}

/// Builds `W` from shortest words over the induced subgroups.
pub fn build_w<T: Real>(model: &ExperimentModel, tol: &Tolerances) -> Result<Representation<T>> {
    let group = model.group();
    let c = model.reference();
    let basis = indicator_basis::<T>(model, c);
    let u = build_regular_rep(model);
    let blocks = model.experiment(c).blocks();

    let mut sets = Vec::with_capacity(model.experiments().len());
    let mut factors = BTreeMap::new();
    let mut invariance = T::zero();
    for a in 0..model.experiments().len() {
        let g_ca = model.connection(c, a).ok_or_else(|| Error::UnresolvedReference {
            path: "connections".into(),
            name: format!("({}, {})", model.experiment(c).label(), model.experiment(a).label()),
        })?;
        let g_ca_inv = group.inv(g_ca);
        let sub = model.derive_induced_subgroup(a)?;
        for &s in &sub.elements {
            if s == group.identity() {
                continue;
            }
            let d = basis.dim();
            let mut m = CMatrix::zeros(d, d);
            for (k, f) in basis.vectors.iter().enumerate() {
                // E^a† U(s) E^a f
                let v = u.apply(g_ca, f.coords());
                let v = u.apply(s, &v);
                let v = u.apply(g_ca_inv, &v);
                let (_, outside) = basis.project(&v);
                invariance = invariance.max(outside);
                // The image of an indicator is an indicator, so the entries
                // are overlap counts over sqrt(|B_j| |B_k|); counting avoids
                // accumulating rounding along long words.
                let image: Vec<usize> = {
                    let p = u.index_map(g_ca_inv);
                    let q = u.index_map(s);
                    let r = u.index_map(g_ca);
                    // Coordinate i of the image reads coordinate r[q[p[i]]] of f.
                    (0..p.len()).map(|i| r[q[p[i]]]).collect()
                };
                for j in 0..d {
                    let overlap = blocks[j].iter().filter(|&&i| blocks[k].binary_search(&image[i]).is_ok()).count();
                    if overlap > 0 {
                        let denom = from_usize::<T>(blocks[j].len() * blocks[k].len()).sqrt();
                        m[(j, k)] = re(from_usize::<T>(overlap) / denom);
                    }
                }
            }
            factors.insert((a, s), m);
        }
        sets.push(sub.elements);
    }
    if to_f64(invariance) > tol.structural {
        return Err(Error::InvalidModel(format!(
            "common space is not invariant under the induced factors (residual {:e})",
            to_f64(invariance)
        )));
    }

    let words = shortest_words(group, &sets);
    let d = basis.dim();
    let mut matrices: Vec<Option<CMatrix<T>>> = vec![None; group.order()];
    let mut order: Vec<ElementId> = group.elements().filter(|&g| words[g].is_some()).collect();
    order.sort_by_key(|&g| words[g].as_ref().map_or(usize::MAX, Vec::len));
    for &g in &order {
        let word = words[g].as_ref().expect("filtered");
        let m = match word.split_last() {
            None => linalg::identity(d),
            Some((last, prefix)) => {
                let parent = group.product(prefix.iter().map(|&(_, s)| s));
                let wp = matrices[parent].as_ref().expect("prefix of a shortest word is computed first");
                wp * &factors[last]
            }
        };
        matrices[g] = Some(m);
    }

    // Every word is a prefix path of letters, so checking each one-letter
    // extension of each element covers all alternative decompositions.
    let mut consistency = T::zero();
    for &g in &order {
        let wg = matrices[g].as_ref().expect("computed");
        for (&(a, s), f) in &factors {
            let gs = group.mul(g, s);
            let dev = tol.norm.of(&(wg * f - matrices[gs].as_ref().expect("closure of the domain")));
            if to_f64(dev) > tol.word_consistency {
                return Err(Error::WellDefinednessViolation {
                    element: format!("{} via letter ({}, {})", group.name(gs), model.experiment(a).label(), group.name(s)),
                    deviation: to_f64(dev),
                });
            }
            consistency = consistency.max(dev);
        }
    }

    let mode = if order.len() == group.order() {
        RealizationMode::Theorem1
    } else {
        RealizationMode::IndicatorFallback
    };
    Ok(Representation {
        matrices,
        words,
        factors,
        element_names: group.names().to_vec(),
        mode,
        consistency_residual: consistency,
        invariance_residual: invariance,
    })
}

/// `|a,k>`: the answer `λ^a = λ_k` to the question "what is `λ^a`?".
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    pub experiment: String,
    pub experiment_index: usize,
    pub value_index: usize,
    pub value: String,
    pub coords: AmplitudeVector<T>,
    pub mode: RealizationMode,
}

impl<T: Real> StateVector<T> {
    pub fn vector(&self) -> &CVector<T> {
        self.coords.coords()
    }
}

/// `|a,k> = W(g_ca)|c,j>` where `β(j) = k` for the value relabeling induced by
/// `g_ca`; falls back to the projection of `E^a† f_k^a` when `g_ca` lies
/// outside the domain of `W`.
pub fn state_vector<T: Real>(
    model: &ExperimentModel,
    w: &Representation<T>,
    a: usize,
    k: usize,
    tol: &Tolerances,
) -> Result<StateVector<T>> {
    let c = model.reference();
    let exp = model.experiment(a);
    if k >= exp.value_count() {
        return Err(Error::InvalidArgument(format!("value index {k} out of range for `{}`", exp.label())));
    }
    let g_ca = model.connection(c, a).ok_or_else(|| Error::UnresolvedReference {
        path: "connections".into(),
        name: format!("({}, {})", model.experiment(c).label(), exp.label()),
    })?;
    let basis_c = indicator_basis::<T>(model, c);
    let d = basis_c.dim();
    let (raw, mode) = if w.contains(g_ca) {
        let beta = model.value_bijection(c, a, g_ca).ok_or_else(|| {
            Error::InvalidModel(format!("g_{}{} does not relate the parameters", model.experiment(c).label(), exp.label()))
        })?;
        let j = beta.iter().position(|&x| x == k).expect("bijection");
        let v = w.matrix(g_ca)? * linalg::basis_vector::<T>(d, j);
        (v, RealizationMode::Theorem1)
    } else {
        let f = indicator_basis::<T>(model, a).vectors[k].coords().clone();
        let u = build_regular_rep(model);
        let pulled = u.apply(model.group().inv(g_ca), &f);
        let (coeffs, _) = basis_c.project(&pulled);
        let n = coeffs.norm();
        if to_f64(n) < 1e-12 {
            return Err(Error::DegenerateFallback { experiment: exp.label().into(), value: exp.values()[k].clone() });
        }
        (coeffs / re(n), RealizationMode::IndicatorFallback)
    };
    let v = linalg::apply_phase_convention(&raw, lit(tol.normalization));
    let norm_err = (to_f64(v.norm()) - 1.0).abs();
    if norm_err > tol.normalization {
        return Err(Error::InvalidModel(format!("|{},{}> has norm error {norm_err:e}", exp.label(), exp.values()[k])));
    }
    Ok(StateVector {
        experiment: exp.label().to_string(),
        experiment_index: a,
        value_index: k,
        value: exp.values()[k].clone(),
        coords: AmplitudeVector::new(v, BasisTag::Common),
        mode,
    })
}

/// `T^a = Σ_k λ_k |a,k><a,k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableOperator<T: Real> {
    pub experiment: String,
    pub matrix: CMatrix<T>,
    pub eigenvalues: Vec<T>,
}

impl<T: Real> ObservableOperator<T> {
    pub fn hermitian_residual(&self) -> T {
        linalg::hermitian_residual(&self.matrix)
    }

    /// Largest gap between the sorted computed spectrum and the sorted
    /// declared eigenvalues.
    pub fn spectrum_residual(&self) -> T {
        let computed = linalg::hermitian_eigenvalues(&self.matrix);
        let mut declared = self.eigenvalues.clone();
        declared.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        computed
            .iter()
            .zip(&declared)
            .fold(T::zero(), |acc, (&x, &y)| acc.max((x - y).abs()))
    }

    /// `max_k ||T|a,k> - λ_k|a,k>||`
    pub fn eigen_residual(&self, states: &[StateVector<T>]) -> T {
        states.iter().fold(T::zero(), |acc, s| {
            let v = s.vector();
            let lhs = &self.matrix * v;
            let rhs = v * re(self.eigenvalues[s.value_index]);
            acc.max((lhs - rhs).norm())
        })
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }
}

pub fn observable<T: Real>(model: &ExperimentModel, states: &[StateVector<T>]) -> Result<ObservableOperator<T>> {
    let first = states.first().ok_or_else(|| Error::InvalidArgument("no state vectors".into()))?;
    let exp = model.experiment(first.experiment_index);
    let eigenvalues: Vec<T> = exp.eigenvalues().iter().map(|&x| lit(x)).collect();
    let d = first.vector().len();
    let mut m = CMatrix::zeros(d, d);
    for s in states {
        m += linalg::projector(s.vector()) * re(eigenvalues[s.value_index]);
    }
    Ok(ObservableOperator { experiment: exp.label().to_string(), matrix: m, eigenvalues })
}

/// Everything built from a validated model: `W`, all `|a,k>` and all `T^a`.
#[derive(Debug, Clone)]
pub struct HilbertSpace<'m, T: Real> {
    model: &'m ExperimentModel,
    tolerances: Tolerances,
    validation: ValidationReport,
    w: Representation<T>,
    states: Vec<Vec<StateVector<T>>>,
    observables: Vec<ObservableOperator<T>>,
}

impl<'m, T: Real> HilbertSpace<'m, T> {
    pub fn build(model: &'m ExperimentModel, tolerances: Tolerances) -> Result<Self> {
        let validation = validate_assumptions(model);
        if !validation.passed() {
            let failed: Vec<&str> = validation
                .assumptions
                .iter()
                .filter(|a| a.status == crate::validate::Status::Fail)
                .map(|a| a.id.as_str())
                .collect();
            return Err(Error::InvalidModel(format!("validation failed: {}", failed.join(", "))));
        }
        let w = build_w::<T>(model, &tolerances)?;
        let mut states = Vec::with_capacity(model.experiments().len());
        let mut observables = Vec::with_capacity(model.experiments().len());
        for a in 0..model.experiments().len() {
            let sv = (0..model.experiment(a).value_count())
                .map(|k| state_vector(model, &w, a, k, &tolerances))
                .collect::<Result<Vec<_>>>()?;
            observables.push(observable(model, &sv)?);
            states.push(sv);
        }
        Ok(HilbertSpace { model, tolerances, validation, w, states, observables })
    }

    pub fn model(&self) -> &'m ExperimentModel {
        self.model
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    pub fn representation(&self) -> &Representation<T> {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.model.experiment(self.model.reference()).value_count()
    }

    pub fn experiment_index(&self, label: &str) -> Result<usize> {
        self.model.experiment_index(label)
    }

    pub fn states(&self, a: usize) -> &[StateVector<T>] {
        &self.states[a]
    }

    pub fn state(&self, a: usize, k: usize) -> &StateVector<T> {
        &self.states[a][k]
    }

    pub fn observable(&self, a: usize) -> &ObservableOperator<T> {
        &self.observables[a]
    }

    pub fn experiment_count(&self) -> usize {
        self.states.len()
    }

    /// Fallback if `W` misses part of the group or any state used projection.
    pub fn mode(&self) -> RealizationMode {
        self.states
            .iter()
            .flatten()
            .fold(self.w.mode(), |m, s| m.combine(s.mode))
    }

    /// Gram matrix of `{|a,k>}_k`.
    pub fn gram(&self, a: usize) -> CMatrix<T> {
        let s = &self.states[a];
        CMatrix::from_fn(s.len(), s.len(), |i, j| linalg::inner(s[i].vector(), s[j].vector()))
    }

    /// `max_a ||Gram(a) - I||` (max entry).
    pub fn orthonormality_residual(&self) -> T {
        (0..self.states.len()).fold(T::zero(), |acc, a| {
            let g = self.gram(a);
            let n = g.nrows();
            acc.max(linalg::max_entry_norm(&(g - linalg::identity::<T>(n))))
        })
    }

    /// `max_{a,k} ||T^a|a,k> - λ_k|a,k>||`
    pub fn proposition_residual(&self) -> T {
        (0..self.states.len()).fold(T::zero(), |acc, a| acc.max(self.observables[a].eigen_residual(&self.states[a])))
    }
}

/// Orbit of a seed state under `W`, deduplicated up to phase.
#[derive(Debug, Clone)]
pub struct GcsSet<T: Real> {
    /// `(first element producing it, phase-normalized vector)`
    pub vectors: Vec<(ElementId, CVector<T>)>,
    pub domain_size: usize,
    /// State vectors `|a,k>` not found in the set, as `(experiment, value)`.
    pub missing: Vec<(String, String)>,
}

impl<T: Real> GcsSet<T> {
    pub fn contains_all_states(&self) -> bool {
        self.missing.is_empty()
    }
}

pub fn enumerate_gcs<T: Real>(space: &HilbertSpace<'_, T>, seed: &StateVector<T>) -> GcsSet<T> {
    let tol = lit::<T>(space.tolerances.structural);
    let phase_tol = lit::<T>(space.tolerances.normalization);
    let w = space.representation();
    let mut vectors: Vec<(ElementId, CVector<T>)> = Vec::new();
    let domain = w.domain();
    for &g in &domain {
        let v = linalg::apply_phase_convention(&(w.matrix(g).expect("domain element") * seed.vector()), phase_tol);
        if !vectors.iter().any(|(_, u)| linalg::max_abs_diff(u, &v) < tol) {
            vectors.push((g, v));
        }
    }
    let mut missing = Vec::new();
    for a in 0..space.experiment_count() {
        for s in space.states(a) {
            if !vectors.iter().any(|(_, u)| linalg::phase_distance(u, s.vector()) < tol) {
                missing.push((s.experiment.clone(), s.value.clone()));
            }
        }
    }
    GcsSet { vectors, domain_size: domain.len(), missing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{spin3, triangle6};

    #[test]
    fn indicator_basis_is_orthonormal() {
        let m = spin3();
        let b = indicator_basis::<f64>(&m, 0);
        assert_eq!(b.dim(), 2);
        let ip = b.vectors[0].inner(&b.vectors[1]).unwrap();
        assert_eq!(ip.norm(), 0.0);
        for v in &b.vectors {
            let nonzero: Vec<f64> = v.coords().iter().filter(|z| z.norm() > 0.0).map(|z| z.re).collect();
            assert_eq!(nonzero.len(), 6);
            assert!(nonzero.iter().all(|&x| (x - 1.0 / 6f64.sqrt()).abs() < 1e-15));
        }
        let t = triangle6();
        let b = indicator_basis::<f64>(&t, 0);
        assert_eq!(b.dim(), 3);
        for v in &b.vectors {
            assert_eq!(v.coords().iter().filter(|z| (z.re - 0.5).abs() < 1e-15).count(), 4);
        }
    }

    #[test]
    fn basis_tags_must_match() {
        let a = AmplitudeVector::<f64>::new(linalg::basis_vector(2, 0), BasisTag::Common);
        let b = AmplitudeVector::<f64>::new(linalg::basis_vector(2, 0), BasisTag::Ambient);
        assert!(a.inner(&b).is_err());
    }

    #[test]
    fn regular_rep_composes() {
        let m = spin3();
        let u = build_regular_rep(&m);
        let g = m.group();
        for a in g.elements() {
            for b in g.elements() {
                let ab = u.matrix::<f64>(a) * u.matrix::<f64>(b);
                assert_eq!(ab, u.matrix::<f64>(g.mul(a, b)));
            }
        }
        assert_eq!(u.matrix::<f64>(g.identity()), linalg::identity::<f64>(12));
    }

    #[test]
    fn reference_states_are_standard_basis() {
        let m = spin3();
        let space = HilbertSpace::<f64>::build(&m, Tolerances::default()).unwrap();
        let c = m.reference();
        for k in 0..2 {
            assert_eq!(space.state(c, k).vector(), &linalg::basis_vector::<f64>(2, k));
        }
        let t = space.observable(c);
        assert!((t.matrix[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((t.matrix[(1, 1)].re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn observable_squares_to_identity_for_signs() {
        let m = spin3();
        let space = HilbertSpace::<f64>::build(&m, Tolerances::default()).unwrap();
        for a in 0..3 {
            let t = &space.observable(a).matrix;
            let sq = t * t;
            assert!(linalg::max_entry_norm(&(sq - linalg::identity::<f64>(2))) < 1e-12);
            assert!(space.observable(a).trace().abs() < 1e-12);
        }
    }
}
