//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{re, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Norm used when comparing matrices against structural identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MatrixNorm {
    /// Largest singular value.
    #[default]
    Operator,
    /// Largest absolute entry.
    MaxEntry,
}

impl MatrixNorm {
    pub fn of<T: Real>(self, m: &CMatrix<T>) -> T {
        match self {
            MatrixNorm::Operator => operator_norm(m),
            MatrixNorm::MaxEntry => max_entry_norm(m),
        }
    }
}

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::identity(n, n)
}

pub fn basis_vector<T: Real>(n: usize, k: usize) -> CVector<T> {
    let mut v = CVector::zeros(n);
    v[k] = re(T::one());
    v
}

/// `|u><v|`
pub fn outer<T: Real>(u: &CVector<T>, v: &CVector<T>) -> CMatrix<T> {
    u * v.adjoint()
}

pub fn projector<T: Real>(v: &CVector<T>) -> CMatrix<T> {
    outer(v, v)
}

/// `<u|v>`, antilinear in the first argument.
pub fn inner<T: Real>(u: &CVector<T>, v: &CVector<T>) -> Complex<T> {
    u.dotc(v)
}

/// `<v|m|v>`
pub fn expectation<T: Real>(m: &CMatrix<T>, v: &CVector<T>) -> Complex<T> {
    v.dotc(&(m * v))
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.trace()
}

pub fn max_entry_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

pub fn operator_norm<T: Real>(m: &CMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(T::zero(), |acc, &s| acc.max(s))
}

pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter()
        .fold(T::zero(), |acc, z| acc + z.modulus_squared())
        .sqrt()
}

/// `max |m - m^dagger|`
pub fn hermitian_residual<T: Real>(m: &CMatrix<T>) -> T {
    max_entry_norm(&(m - m.adjoint()))
}

/// `||m^dagger m - I||` in the requested norm.
pub fn unitarity_residual<T: Real>(m: &CMatrix<T>, norm: MatrixNorm) -> T {
    let n = m.nrows();
    norm.of(&(m.adjoint() * m - identity::<T>(n)))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
///
/// The Hermitian part `(m + m^dagger)/2` is decomposed, so tiny asymmetries from
/// rounding do not leak into complex eigenvalues.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let half = re(nalgebra::convert::<f64, T>(0.5));
    let h = (m + m.adjoint()) * half;
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    hermitian_eigen(m).0
}

/// Rebuilds `sum_k w_k |v_k><v_k|` from eigenvalues and eigenvector columns.
pub fn from_spectrum<T: Real>(values: &[T], vectors: &CMatrix<T>) -> CMatrix<T> {
    let n = vectors.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &w) in values.iter().enumerate() {
        let v = vectors.column(k).into_owned();
        out += projector(&v) * re(w);
    }
    out
}

/// Multiplies `v` by a unit phase so its first coordinate with modulus above
/// `tol` is real and positive.
pub fn apply_phase_convention<T: Real>(v: &CVector<T>, tol: T) -> CVector<T> {
    match v.iter().find(|z| z.modulus() > tol) {
        Some(z) => {
            let phase = z.conj() / re(z.modulus());
            v * phase
        }
        None => v.clone(),
    }
}

pub fn normalize<T: Real>(v: &CVector<T>) -> Option<CVector<T>> {
    let n = v.norm();
    if n > T::zero() {
        Some(v / re(n))
    } else {
        None
    }
}

/// Largest entrywise modulus of `u - v`.
pub fn max_abs_diff<T: Real>(u: &CVector<T>, v: &CVector<T>) -> T {
    u.iter()
        .zip(v.iter())
        .fold(T::zero(), |acc, (a, b)| acc.max((a - b).modulus()))
}

/// Equality up to a global phase: `1 - |<u|v>|` for unit vectors.
pub fn phase_distance<T: Real>(u: &CVector<T>, v: &CVector<T>) -> T {
    let phase_free = T::one() - inner(u, v).modulus();
    phase_free.max(T::zero())
}
