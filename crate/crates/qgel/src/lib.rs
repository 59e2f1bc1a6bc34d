//! # qgel
//!
//! A numerical laboratory for entropic uncertainty relations on compact
//! quantum groups and their discrete duals.
//!
//! The crate works with a closed catalog of concrete models: the torus,
//! finite cyclic groups, the symmetric group S3, duals of free groups,
//! the central algebra of the free orthogonal quantum groups O_N^+, the
//! quantum group O_2^+ and the quantum SU(2) groups. For each model it
//! computes Fourier transforms, noncommutative L^p / ℓ^p norms, Rényi and
//! von Neumann entropies, Donoho–Stark support products, and the
//! theoretical lower/upper bounds these quantities must respect. A
//! projected-gradient optimizer estimates support-restricted infima of the
//! uncertainty functional on the unit sphere of Pol_E(G).
//!
//! Entry points:
//! - [`model`] — model descriptors, irrep tables, primal/dual elements;
//! - [`linalg`] — complex Hermitian spectral calculus and Q-weighted
//!   Schatten norms;
//! - [`primal`] — L^p norms and entropies on the group side;
//! - [`dual`] — Fourier transforms, dual ℓ^p norms and entropies;
//! - [`uncertainty`] — Rényi ratios, entropy reports, bound certificates;
//! - [`optimize`] — sphere-constrained minimization of the uncertainty sum;
//! - [`verify`] — the quantitative verification suites run by `qgel verify`.
//!
//! All entropies are in nats.

pub mod cli;
pub mod dual;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod primal;
pub mod uncertainty;
pub mod verify;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum QgError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("label {0} is outside the model truncation")]
    TruncationExceeded(String),
    #[error("element is not normalized: l2 norm = {0}")]
    NotNormalized(f64),
    #[error("quadrature did not converge: last delta {0:.3e}")]
    QuadratureNonConverged(f64),
    #[error("compression did not stabilize: last drift {last_delta:.3e} at radius {radius}")]
    CompressionNonConverged { last_delta: f64, radius: u32 },
    #[error("matrix dimension {dim} exceeds the supported limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },
    #[error("eigensolver did not converge: off-diagonal residual {0:.3e}")]
    EigNonConverged(f64),
    #[error("eigenvalue {0:.3e} below the PSD clamp")]
    NegativeEigenvalue(f64),
    #[error("integer overflow in {0}")]
    Overflow(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("element spec error in production `{production}`: {detail}")]
    ElementSpec { production: String, detail: String },
    #[error("extrapolation not converging: drift went {0:.3e} -> {1:.3e}")]
    ExtrapolationDiverging(f64, f64),
    #[error("bound certificate violated: {0}")]
    CertificateViolated(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl QgError {
    /// Process exit code this error maps to: 3 for numerical
    /// non-convergence, 2 for usage and spec errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            QgError::QuadratureNonConverged(_)
            | QgError::CompressionNonConverged { .. }
            | QgError::EigNonConverged(_)
            | QgError::ExtrapolationDiverging(_, _) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, QgError>;

/// Numerical support threshold: absolute bound on the max entry modulus
/// below which a dual block counts as zero.
pub const EPS_SUPP: f64 = 1e-12;
