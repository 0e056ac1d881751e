//! Seeded random states, bases and directions.
//!
//! Every stochastic routine takes a `ChaCha8Rng`; independent streams are
//! derived with [`stream`] from `(seed, index)`.

use nalgebra::ComplexField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::born::Effect;
use crate::density::DensityMatrix;
use crate::linalg::{self, CMatrix};
use crate::scalar::{cplx, lit, re, Real};

/// Independent generator for `(seed, index)`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn ginibre<T: Real, R: Rng>(d: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(d, d, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        cplx(lit(x), lit(y))
    })
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary<T: Real, R: Rng>(d: usize, rng: &mut R) -> CMatrix<T> {
    let qr = ginibre::<T, R>(d, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let z = r[(k, k)];
        let m = z.modulus();
        if m > T::zero() {
            let phase = z / re(m);
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    q
}

/// `G G† / tr(G G†)` for a Ginibre `G` (full-rank, Hilbert–Schmidt measure).
pub fn random_density<T: Real, R: Rng>(d: usize, rng: &mut R) -> DensityMatrix<T> {
    let g = ginibre::<T, R>(d, rng);
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    let m = m * re(T::one() / tr);
    // Hermitize to remove rounding asymmetry before validation.
    let m = (&m + m.adjoint()) * re(lit::<T>(0.5));
    DensityMatrix::new(m).expect("Ginibre construction is a density matrix")
}

/// Random pure state `U|0>`.
pub fn random_pure<T: Real, R: Rng>(d: usize, rng: &mut R) -> DensityMatrix<T> {
    let u = random_unitary::<T, R>(d, rng);
    DensityMatrix::pure(&u.column(0).into_owned()).expect("unitary column has unit norm")
}

/// Weights uniform in `[0, 1]`.
pub fn random_weights<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

/// Uniform point on the unit sphere from a normalized Gaussian vector.
pub fn random_unit3<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Effect diagonal in a Haar-random basis with weights uniform in `[0, 1]`.
pub fn random_effect<T: Real, R: Rng>(d: usize, rng: &mut R) -> Effect<T> {
    let u = random_unitary::<T, R>(d, rng);
    let w: Vec<T> = random_weights(d, rng).into_iter().map(lit).collect();
    Effect::from_unitary(&u, &w).expect("unitary columns with weights in [0, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::MatrixNorm;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = stream(7, 0);
        for d in 1..5 {
            let u = random_unitary::<f64, _>(d, &mut rng);
            assert!(linalg::unitarity_residual(&u, MatrixNorm::Operator) < 1e-12);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream(1, 0).gen();
        let b: u64 = stream(1, 0).gen();
        let c: u64 = stream(1, 1).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = stream(3, 0);
        let rho = random_density::<f64, _>(3, &mut rng);
        assert!(rho.min_eigenvalue() > 0.0);
        assert!((rho.purity() - 1.0).abs() > 1e-6);
        let p = random_pure::<f64, _>(2, &mut rng);
        assert!((p.purity() - 1.0).abs() < 1e-12);
    }
}
