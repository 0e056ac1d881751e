//! Finite epistemic models of quantum mechanics: experiments on a parameter
//! space with a group action, the Hilbert space and representation built from
//! them, Born probabilities, measurement simulation, the spin-½ EPR model and
//! orbit reduction.
//!
//! Numerical code is generic over [`scalar::Real`]; the aliases below fix
//! the scalar to `f64`.

pub mod born;
pub mod density;
pub mod error;
pub mod group;
pub mod hilbert;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod model;
pub mod qubit;
pub mod random;
pub mod reduction;
pub mod scalar;
pub mod simulate;
pub mod validate;

pub use error::{Error, Result};
pub use model::ExperimentModel;

pub type HilbertSpace<'m> = hilbert::HilbertSpace<'m, f64>;
pub type Representation = hilbert::Representation<f64>;
pub type StateVector = hilbert::StateVector<f64>;
pub type ObservableOperator = hilbert::ObservableOperator<f64>;
pub type AmplitudeVector = hilbert::AmplitudeVector<f64>;
pub type SubspaceBasis = hilbert::SubspaceBasis<f64>;
pub type GcsSet = hilbert::GcsSet<f64>;
pub type DensityMatrix = density::DensityMatrix<f64>;
pub type TransitionMatrix = born::TransitionMatrix<f64>;
pub type Effect = born::Effect<f64>;
pub type GleasonFit = born::GleasonFit<f64>;
pub type OperatorMeasure = measurement::OperatorMeasure<f64>;
pub type StepSummary = simulate::StepSummary<f64>;
pub type SimulationTrace = simulate::SimulationTrace<f64>;
pub type CVector = linalg::CVector<f64>;
pub type CMatrix = linalg::CMatrix<f64>;
