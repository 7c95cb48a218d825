//! Geometry of the manifold of purifications of a density operator.
//!
//! Given a spectrum λ⃗ on the probability simplex, this crate constructs the
//! family of composite pure states |Γ̄(ξ)⟩ = (U_E(ξ) ⊗ √ρ)|Γ⟩ over a factorized
//! unitary chart U_E(ξ), the Gram metric g_ij = ⟨Γ̄_,i|Γ̄_,j⟩ induced on that
//! family, and the volume ∫ √det g dξ. On top of the volumes it provides the
//! entanglement coarse-graining of the eigenvalue simplex, the SO(N) large-N
//! tail analysis, and fidelity as an optimization over purification families.
//!
//! Modules:
//! - [`spectrum`]: eigenvalue vectors on the simplex and entropy functionals
//! - [`unitary`]: plane-rotation factorization of U(N)/SU(2)/SO(N) charts with
//!   analytic parameter derivatives
//! - [`purification`]: Bell states, purifications, partial traces, Gram metric
//! - [`volume`]: closed-form, quadrature, and Monte Carlo volumes
//! - [`coarse`]: simplex discretization and macrostate binning
//! - [`asymptotics`]: SO(N) marginal-volume curves and tail averages
//! - [`fidelity`]: rotated-basis states and Uhlmann fidelity two ways

use thiserror::Error;

pub mod asymptotics;
pub mod coarse;
pub mod fidelity;
pub mod purification;
pub mod quadrature;
pub mod spectrum;
pub mod stream;
pub mod unitary;
pub mod volume;

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense complex vector used throughout.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spectrum needs at least 2 entries, got {0}")]
    SpectrumTooShort(usize),

    #[error("spectrum entry {index} = {value} lies outside [0, 1]")]
    SpectrumEntryOutOfRange { index: usize, value: f64 },

    #[error("spectrum sums to {0}, which is more than 1e-9 away from 1")]
    SpectrumSum(f64),

    #[error("entropy value {value} exceeds its maximum {max} by more than 1e-9")]
    EntropyAboveMax { value: f64, max: f64 },

    #[error("plane indices must satisfy 1 <= i < j <= N, got ({i}, {j}) with N = {dim}")]
    InvalidPlane { i: usize, j: usize, dim: usize },

    #[error("parameter {name} = {value} lies outside [{lower}, {upper}]")]
    ParameterOutOfRange {
        name: String,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("parameter index {index} out of range; family has {count} parameters")]
    ParameterIndex { index: usize, count: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("composite vector length {len} is not a multiple of the system dimension {dim}")]
    BadCompositeLength { len: usize, dim: usize },

    #[error("environment dimension {target} is smaller than the system dimension {dim}")]
    EmbeddingTooSmall { target: usize, dim: usize },

    #[error("matrix is not unitary: max deviation {0:.3e}")]
    NotUnitary(f64),

    #[error("Gram determinant {0:.6e} is negative beyond tolerance")]
    NegativeDeterminant(f64),

    #[error("Gram determinant has imaginary part {0:.6e}, beyond tolerance")]
    ComplexDeterminant(f64),

    #[error("quadrature supports at most {max} parameters, family has {got}; use Monte Carlo")]
    TooManyParameters { max: usize, got: usize },

    #[error("need at least one sample or node, got 0")]
    EmptyRun,

    #[error("volume curve is not monotone nonincreasing near lambda1 = {0}")]
    NonMonotone(f64),

    #[error("level {level} is not bracketed by the curve on [{lo}, {hi}]")]
    NotBracketed { level: f64, lo: f64, hi: f64 },

    #[error("quadrature failed to reach relative tolerance {tol} after {evals} evaluations")]
    QuadratureDidNotConverge { tol: f64, evals: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of a numeric procedure (as opposed to invalid input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NegativeDeterminant(_)
                | Error::ComplexDeterminant(_)
                | Error::NonMonotone(_)
                | Error::NotBracketed { .. }
                | Error::QuadratureDidNotConverge { .. }
        )
    }
}
