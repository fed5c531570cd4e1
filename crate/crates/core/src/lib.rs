//! Transverse spectral stability of line solitons in the massive Thirring
//! (MTM) and massive Gross–Neveu (GN) models.
//!
//! The pipeline runs from closed-form soliton profiles ([`soliton`]) through
//! a tanh-mapped Chebyshev discretization ([`cheb`]) to dense stability
//! matrices ([`operator`]), whose spectra come from a native complex QR
//! solver ([`eigen`]). [`spectrum`] post-processes eigenvalue clouds into
//! isolated eigenvalues, tracked branches and instability thresholds, and
//! [`analytics`] supplies the small-p slopes and kernel projections they are
//! checked against.
//!
//! ```
//! use dirac_stability::{build_grid, compute_spectrum, slopes, ModelKind};
//!
//! let grid = build_grid(60, 10.0).unwrap();
//! let set = compute_spectrum(ModelKind::MassiveThirring, 0.0, 0.0, &grid).unwrap();
//! assert_eq!(set.len(), 4 * 61);
//! let (lambda_r, _) = slopes(ModelKind::MassiveThirring, 0.0).unwrap();
//! assert!((lambda_r - std::f64::consts::PI.sqrt()).abs() < 1e-12);
//! ```
//!
//! Batch work fans out over rayon when the default `parallel` feature is on.

pub mod analytics;
pub mod cheb;
pub mod eigen;
pub mod error;
pub mod operator;
pub mod par;
pub mod quadrature;
pub mod soliton;
pub mod spectrum;

pub use analytics::{asymptotic_prediction, compute_corrections, slopes, AsymptoticPrediction};
pub use cheb::{build_grid, ChebGrid, DEFAULT_SCALE};
pub use eigen::{eig, eigvals, eigvecs_for, ComplexMatrix, EigenSet};
pub use error::{Error, Result};
pub use operator::{assemble, continuous_bands, symmetry_residual, Form, StabilityOperator};
pub use par::Exec;
pub use soliton::{ModelKind, SolitonProfile};
pub use spectrum::{
    compute_spectrum, isolated_eigs, slope_fit, spurious_metric, track_branches, PointClass,
    SpectralBands, Tracking,
};
