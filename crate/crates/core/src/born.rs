//! Transition probabilities, effects and recovery of a density matrix from a
//! generalized probability on effects.

use nalgebra::{ComplexField, DMatrix, DVector};
use serde::Serialize;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, RealizationMode, StateVector};
use crate::linalg::{self, CMatrix, CVector};
use crate::scalar::{cplx, lit, re, to_f64, Real};

/// `P[k][i] = |<a,k|b,i>|²`
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T: Real> {
    pub from: String,
    pub to: String,
    pub entries: DMatrix<T>,
    pub mode: RealizationMode,
}

impl<T: Real> TransitionMatrix<T> {
    pub fn get(&self, k: usize, i: usize) -> T {
        self.entries[(k, i)]
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max_k |Σ_i P[k][i] - 1|`
    pub fn row_sum_residual(&self) -> T {
        self.entries
            .row_iter()
            .fold(T::zero(), |acc, r| acc.max((r.sum() - T::one()).abs()))
    }

    pub fn column_sum_residual(&self) -> T {
        self.entries
            .column_iter()
            .fold(T::zero(), |acc, c| acc.max((c.sum() - T::one()).abs()))
    }

    /// Whether every entry is within `tol` of 0 or 1.
    pub fn is_permutation(&self, tol: T) -> bool {
        self.entries
            .iter()
            .all(|&x| x.abs() <= tol || (x - T::one()).abs() <= tol)
            && self.row_sum_residual() <= tol
            && self.column_sum_residual() <= tol
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .row_iter()
            .map(|r| r.iter().map(|&x| to_f64(x)).collect())
            .collect()
    }
}

pub fn transition_matrix<T: Real>(space: &HilbertSpace<'_, T>, a: usize, b: usize) -> TransitionMatrix<T> {
    let sa = space.states(a);
    let sb = space.states(b);
    let entries = DMatrix::from_fn(sa.len(), sb.len(), |k, i| linalg::inner(sa[k].vector(), sb[i].vector()).modulus_squared());
    let mode = sa.iter().chain(sb).fold(space.representation().mode(), |m, s| m.combine(s.mode));
    TransitionMatrix {
        from: sa[0].experiment.clone(),
        to: sb[0].experiment.clone(),
        entries,
        mode,
    }
}

/// Anything that assigns `<v|ρ|v>` to unit vectors.
pub trait QuantumState<T: Real> {
    fn dim(&self) -> usize;
    /// Born probability of the pure outcome `v`.
    fn weight_along(&self, v: &CVector<T>) -> T;
    fn density(&self) -> CMatrix<T>;
}

impl<T: Real> QuantumState<T> for StateVector<T> {
    fn dim(&self) -> usize {
        self.vector().len()
    }

    fn weight_along(&self, v: &CVector<T>) -> T {
        linalg::inner(v, self.vector()).modulus_squared()
    }

    fn density(&self) -> CMatrix<T> {
        linalg::projector(self.vector())
    }
}

impl<T: Real> QuantumState<T> for CVector<T> {
    fn dim(&self) -> usize {
        self.len()
    }

    fn weight_along(&self, v: &CVector<T>) -> T {
        linalg::inner(v, self).modulus_squared()
    }

    fn density(&self) -> CMatrix<T> {
        linalg::projector(self)
    }
}

impl<T: Real> QuantumState<T> for DensityMatrix<T> {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    fn weight_along(&self, v: &CVector<T>) -> T {
        DensityMatrix::weight_along(self, v)
    }

    fn density(&self) -> CMatrix<T> {
        self.matrix().clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectBasis {
    Experiment(String),
    Explicit,
}

/// `E = Σ_i p_i |i><i|`, kept together with the decomposition it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect<T: Real> {
    basis: EffectBasis,
    vectors: Vec<CVector<T>>,
    weights: Vec<T>,
    matrix: CMatrix<T>,
}

const EFFECT_TOL: f64 = 1e-12;

impl<T: Real> Effect<T> {
    /// Orthonormal `vectors` with weights in `[0, 1]`.
    pub fn from_vectors(basis: EffectBasis, vectors: Vec<CVector<T>>, weights: Vec<T>) -> Result<Self> {
        if vectors.is_empty() || vectors.len() != weights.len() {
            return Err(Error::NotAnEffect(format!("{} vectors for {} weights", vectors.len(), weights.len())));
        }
        let d = vectors[0].len();
        if vectors.len() != d || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::NotAnEffect("decomposition is not a full basis".into()));
        }
        if let Some(&w) = weights.iter().find(|&&w| !(w >= T::zero() && w <= T::one())) {
            return Err(Error::NotAnEffect(format!("weight {} outside [0, 1]", to_f64(w))));
        }
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { T::one() } else { T::zero() };
                let dev = (linalg::inner(&vectors[i], &vectors[j]) - re(target)).modulus();
                if to_f64(dev) > 1e-10 {
                    return Err(Error::NotAnEffect("decomposition vectors are not orthonormal".into()));
                }
            }
        }
        let mut matrix = CMatrix::zeros(d, d);
        for (v, &w) in vectors.iter().zip(&weights) {
            matrix += linalg::projector(v) * re(w);
        }
        Ok(Effect { basis, vectors, weights, matrix })
    }

    /// `Σ_i p_i |b,i><b,i|`
    pub fn from_experiment(space: &HilbertSpace<'_, T>, b: usize, weights: &[T]) -> Result<Self> {
        let states = space.states(b);
        Self::from_vectors(
            EffectBasis::Experiment(states[0].experiment.clone()),
            states.iter().map(|s| s.vector().clone()).collect(),
            weights.to_vec(),
        )
    }

    /// Columns of a unitary as the decomposition basis.
    pub fn from_unitary(u: &CMatrix<T>, weights: &[T]) -> Result<Self> {
        let vectors = (0..u.ncols()).map(|k| u.column(k).into_owned()).collect();
        Self::from_vectors(EffectBasis::Explicit, vectors, weights.to_vec())
    }

    /// Spectral decomposition of a Hermitian matrix whose spectrum lies in
    /// `[0, 1]` up to 1e-12; eigenvalues within that slack are clamped.
    pub fn from_hermitian(m: &CMatrix<T>) -> Result<Self> {
        if to_f64(linalg::hermitian_residual(m)) > EFFECT_TOL {
            return Err(Error::NotAnEffect("matrix is not Hermitian".into()));
        }
        let (values, vectors) = linalg::hermitian_eigen(m);
        let slack = lit::<T>(EFFECT_TOL);
        if values.iter().any(|&x| x < -slack || x > T::one() + slack) {
            let (lo, hi) = (to_f64(values[0]), to_f64(*values.last().expect("nonempty")));
            return Err(Error::NotAnEffect(format!("spectrum [{lo}, {hi}] not inside [0, 1]")));
        }
        let weights = values.iter().map(|&x| x.max(T::zero()).min(T::one())).collect();
        let vecs = (0..vectors.ncols()).map(|k| vectors.column(k).into_owned()).collect();
        let mut e = Self::from_vectors(EffectBasis::Explicit, vecs, weights)?;
        // Keep the caller's matrix exactly; the decomposition reproduces it to rounding.
        e.matrix = m.clone();
        Ok(e)
    }

    pub fn identity(d: usize) -> Self {
        let vectors = (0..d).map(|k| linalg::basis_vector(d, k)).collect();
        Self::from_vectors(EffectBasis::Explicit, vectors, vec![T::one(); d]).expect("identity is an effect")
    }

    pub fn zero(d: usize) -> Self {
        let vectors = (0..d).map(|k| linalg::basis_vector(d, k)).collect();
        Self::from_vectors(EffectBasis::Explicit, vectors, vec![T::zero(); d]).expect("zero is an effect")
    }

    /// `½(self + other)`
    pub fn midpoint(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Self::from_hermitian(&((&self.matrix + &other.matrix) * re(lit::<T>(0.5))))
    }

    pub fn basis(&self) -> &EffectBasis {
        &self.basis
    }

    pub fn vectors(&self) -> &[CVector<T>] {
        &self.vectors
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Matrix equality at 1e-12 (max entry).
    pub fn same_as(&self, other: &Self) -> bool {
        self.dim() == other.dim() && to_f64(linalg::max_entry_norm(&(&self.matrix - &other.matrix))) <= EFFECT_TOL
    }
}

/// `Σ_i p_i P(i | state)` through the effect's own decomposition.
pub fn effect_probability<T: Real, S: QuantumState<T> + ?Sized>(state: &S, effect: &Effect<T>) -> Result<T> {
    if state.dim() != effect.dim() {
        return Err(Error::DimensionMismatch { expected: effect.dim(), found: state.dim() });
    }
    Ok(effect
        .vectors
        .iter()
        .zip(&effect.weights)
        .fold(T::zero(), |acc, (v, &p)| acc + p * state.weight_along(v)))
}

/// `tr(ρE)` from the matrix form.
pub fn effect_probability_trace<T: Real, S: QuantumState<T> + ?Sized>(state: &S, effect: &Effect<T>) -> Result<T> {
    if state.dim() != effect.dim() {
        return Err(Error::DimensionMismatch { expected: effect.dim(), found: state.dim() });
    }
    Ok((state.density() * effect.matrix()).trace().re)
}

/// `|P(½(E1+E2)) - ½P(E1) - ½P(E2)|`
pub fn mixture_check<T: Real, S: QuantumState<T> + ?Sized>(e1: &Effect<T>, e2: &Effect<T>, state: &S) -> Result<T> {
    let mid = e1.midpoint(e2)?;
    let half = lit::<T>(0.5);
    let lhs = effect_probability(state, &mid)?;
    let rhs = half * effect_probability(state, e1)? + half * effect_probability(state, e2)?;
    Ok((lhs - rhs).abs())
}

#[derive(Debug, Clone)]
pub struct GleasonFit<T: Real> {
    pub recovered: DensityMatrix<T>,
    /// `max_s |P_s - tr(ρ̂ E_s)|` for the projected estimate.
    pub residual: T,
    /// Same deviation for the unconstrained least-squares solution.
    pub raw_residual: T,
    /// Smallest eigenvalue before clipping.
    pub raw_min_eigenvalue: T,
    pub sample_size: usize,
    pub rank: usize,
}

/// Orthonormal basis of the real space of Hermitian `d×d` matrices under
/// `<A, B> = tr(AB)`.
pub fn hermitian_basis<T: Real>(d: usize) -> Vec<CMatrix<T>> {
    let s = T::one() / lit::<T>(2.0).sqrt();
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(j, j)] = re(T::one());
        out.push(m);
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = re(s);
            m[(k, j)] = re(s);
            out.push(m);
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = cplx(T::zero(), -s);
            m[(k, j)] = cplx(T::zero(), s);
            out.push(m);
        }
    }
    out
}

/// Least-squares `ρ̂` with `tr(ρ̂ E_s) ≈ P_s`, then projected onto density
/// matrices by clipping negative eigenvalues and renormalizing the trace.
pub fn gleason_fit<T: Real>(samples: &[(Effect<T>, T)]) -> Result<GleasonFit<T>> {
    let d = samples.first().map(|(e, _)| e.dim()).ok_or(Error::RankDeficient { rank: 0, required: 1 })?;
    if let Some((e, _)) = samples.iter().find(|(e, _)| e.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: e.dim() });
    }
    let basis = hermitian_basis::<T>(d);
    let m = basis.len();
    let design = DMatrix::from_fn(samples.len(), m, |s, j| (&basis[j] * samples[s].0.matrix()).trace().re);
    let target = DVector::from_iterator(samples.len(), samples.iter().map(|(_, p)| *p));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(T::zero(), |acc, &x| acc.max(x));
    let cutoff = smax * lit::<T>(1e-10);
    let rank = svd.singular_values.iter().filter(|&&x| x > cutoff).count();
    if rank < m {
        return Err(Error::RankDeficient { rank, required: m });
    }
    let x = svd.solve(&target, cutoff).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut raw = CMatrix::zeros(d, d);
    for (b, &c) in basis.iter().zip(x.iter()) {
        raw += b * re(c);
    }
    let raw_residual = (&design * &x - &target).amax();

    let (values, vectors) = linalg::hermitian_eigen(&raw);
    let raw_min_eigenvalue = values[0];
    let clipped: Vec<T> = values.iter().map(|&v| v.max(T::zero())).collect();
    let total = clipped.iter().fold(T::zero(), |acc, &v| acc + v);
    if total <= T::zero() {
        return Err(Error::InvalidDensity("least-squares estimate has no positive part".into()));
    }
    let scaled: Vec<T> = clipped.iter().map(|&v| v / total).collect();
    let projected = linalg::from_spectrum(&scaled, &vectors);
    let projected = (&projected + projected.adjoint()) * re(lit::<T>(0.5));
    let recovered = DensityMatrix::new(projected)?;
    let residual = samples.iter().fold(T::zero(), |acc, (e, p)| {
        let q = (recovered.matrix() * e.matrix()).trace().re;
        acc.max((q - *p).abs())
    });
    Ok(GleasonFit {
        recovered,
        residual,
        raw_residual,
        raw_min_eigenvalue,
        sample_size: samples.len(),
        rank,
    })
}

/// `tr(ρE)` for a whole sample; the forward model used by tests and the CLI.
pub fn probabilities<T: Real>(rho: &DensityMatrix<T>, effects: &[Effect<T>]) -> Vec<T> {
    effects
        .iter()
        .map(|e| (rho.matrix() * e.matrix()).trace().re)
        .collect()
}

/// Per-outcome identity check: `Σ_i |<ψ|b,i>|² = 1`.
pub fn completeness_residual<T: Real>(space: &HilbertSpace<'_, T>, psi: &CVector<T>, b: usize) -> T {
    let total = space
        .states(b)
        .iter()
        .fold(T::zero(), |acc, s| acc + linalg::inner(s.vector(), psi).modulus_squared());
    (total - T::one()).abs()
}
