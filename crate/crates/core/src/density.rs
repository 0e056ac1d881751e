//! Density matrices: uncertainty about the answer to an experiment question.

use nalgebra::ComplexField;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::linalg::{self, CMatrix, CVector};
use crate::scalar::{from_usize, lit, re, to_f64, Real};

/// Experiment and weights a density matrix was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    pub experiment: String,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
    provenance: Option<Prior>,
}

const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-12;

impl<T: Real> DensityMatrix<T> {
    /// Checks Hermiticity (1e-12), positivity (min eigenvalue >= -1e-10) and
    /// unit trace (1e-12).
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensity(format!("{}x{} matrix", matrix.nrows(), matrix.ncols())));
        }
        let h = to_f64(linalg::hermitian_residual(&matrix));
        if h > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (residual {h:e})")));
        }
        let tr = linalg::trace(&matrix);
        let dev = to_f64((tr - re(T::one())).modulus());
        if dev > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace deviates from 1 by {dev:e}")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix).first().map_or(0.0, |&x| to_f64(x));
        if min < -PSD_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { matrix, provenance: None })
    }

    pub fn pure(v: &CVector<T>) -> Result<Self> {
        let n = v.norm();
        if (to_f64(n) - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("state vector has norm {}", to_f64(n))));
        }
        Self::new(linalg::projector(v))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let m = linalg::identity::<T>(d) * re(T::one() / from_usize::<T>(d));
        DensityMatrix { matrix: m, provenance: None }
    }

    pub fn with_provenance(mut self, prior: Prior) -> Self {
        self.provenance = Some(prior);
        self
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn provenance(&self) -> Option<&Prior> {
        self.provenance.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> T {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `-Σ μ log μ` over the eigenvalues, in nats.
    pub fn von_neumann_entropy(&self) -> T {
        linalg::hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .filter(|&x| x > T::zero())
            .fold(T::zero(), |acc, x| acc - x * x.ln())
    }

    pub fn min_eigenvalue(&self) -> T {
        linalg::hermitian_eigenvalues(&self.matrix).first().copied().unwrap_or_else(T::zero)
    }

    /// `<v|ρ|v>`
    pub fn weight_along(&self, v: &CVector<T>) -> T {
        linalg::expectation(&self.matrix, v).re
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        linalg::frobenius(&(&self.matrix - &other.matrix))
    }
}

/// `ρ = Σ_k π_k |a,k><a,k|`
pub fn density_from_prior<T: Real>(space: &HilbertSpace<'_, T>, a: usize, prior: &[f64]) -> Result<DensityMatrix<T>> {
    let states = space.states(a);
    if prior.len() != states.len() {
        return Err(Error::BadPrior(format!("{} weights for {} values", prior.len(), states.len())));
    }
    if let Some(w) = prior.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::BadPrior(format!("weight {w} is not a nonnegative number")));
    }
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(Error::BadPrior(format!("weights sum to {total}")));
    }
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for (s, &w) in states.iter().zip(prior) {
        m += linalg::projector(s.vector()) * re(lit::<T>(w));
    }
    let label = states[0].experiment.clone();
    Ok(DensityMatrix::new(m)?.with_provenance(Prior { experiment: label, weights: prior.to_vec() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Tolerances;
    use crate::io::spin3;

    #[test]
    fn purity_of_diagonal_mixture() {
        let m = spin3();
        let space = HilbertSpace::<f64>::build(&m, Tolerances::default()).unwrap();
        let rho = density_from_prior(&space, 0, &[0.7, 0.3]).unwrap();
        // 0.7² + 0.3²
        assert!((rho.purity() - 0.58).abs() < 1e-12);
        assert_eq!(rho.provenance().unwrap().weights, vec![0.7, 0.3]);
    }

    #[test]
    fn uniform_prior_is_maximally_mixed() {
        let m = spin3();
        let space = HilbertSpace::<f64>::build(&m, Tolerances::default()).unwrap();
        for a in 0..3 {
            let rho = density_from_prior(&space, a, &[0.5, 0.5]).unwrap();
            assert!(rho.frobenius_distance(&DensityMatrix::maximally_mixed(2)) < 1e-12);
            assert!((rho.von_neumann_entropy() - 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_priors_are_rejected() {
        let m = spin3();
        let space = HilbertSpace::<f64>::build(&m, Tolerances::default()).unwrap();
        assert!(matches!(density_from_prior(&space, 0, &[0.6, 0.6]), Err(Error::BadPrior(_))));
        assert!(matches!(density_from_prior(&space, 0, &[1.2, -0.2]), Err(Error::BadPrior(_))));
        assert!(matches!(density_from_prior(&space, 0, &[1.0]), Err(Error::BadPrior(_))));
    }

    #[test]
    fn non_psd_matrix_is_rejected() {
        let m = CMatrix::<f64>::from_diagonal(&CVector::from_vec(vec![re(1.5), re(-0.5)]));
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidDensity(_))));
    }
}
