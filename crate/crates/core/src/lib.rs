//! # heatbo
//!
//! Kernels and a Bayesian-optimization pipeline for purely categorical search
//! spaces `X = X_1 × … × X_n`.
//!
//! Every point is a vector of category indices. All kernels here see inputs
//! only through per-dimension Kronecker deltas (or through the Hamming
//! distance), which is what makes them cheap: the heat kernel on the Hamming
//! graph of `X` has an `O(n)` closed form, and the slow numeric route through
//! Laplacian eigendecompositions is kept in [`spectral`] as an oracle.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`space`] | search spaces, points, one-hot, relocations, automorphisms |
//! | [`spectral`] | complete-graph spectra, numeric COMBO Gram, Φ-kernels, counterexamples |
//! | [`kernels`] | heat, CASMOPOLITAN, Hamming profiles, ρ-kernels, additive, invariant wrappers |
//! | [`gp`] | exact GP regression, marginal likelihood, Adam fitting |
//! | [`bo`] | Expected Improvement, genetic acquisition optimizer, Hamming trust region |
//! | [`benchmarks`] | LABS, MaxSAT/WCNF, Contamination, Pest Control, SFU grids |
//!
//! The numeric modules are generic over [`Real`]; `f64` aliases are
//! re-exported at the crate root.

pub mod benchmarks;
pub mod bo;
pub mod error;
pub mod gp;
pub mod kernels;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod space;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;
pub use space::{Automorphism, Point, Relocation, SearchSpace};

/// Kernel specification over `f64`.
pub type KernelSpecF64 = kernels::KernelSpec<f64>;
/// Fitted GP over `f64`.
pub type GpStateF64 = gp::GpState<f64>;
/// BO run over `f64`.
pub type BoRunF64 = bo::BoRun<f64>;
/// Dense `f64` matrix used for Gram matrices.
pub type Gram = nalgebra::DMatrix<f64>;
/// Φ table over `f64`.
pub type PhiSpecF64 = spectral::PhiSpec<f64>;
