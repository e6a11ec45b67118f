//! Entropy-coding and rate-distortion tooling for a learned image codec
//! whose latents follow a Gaussian-Laplacian-Logistic mixture model.
//!
//! The crate covers the math and the byte formats around the coding loop:
//!
//! * [`entropy`] — continuous CDFs and discretized integer-bin
//!   probabilities for the mixture model and the factorized hyper-latent
//!   density;
//! * [`coder`] — fixed-point CDF tables, a deterministic byte-oriented
//!   range coder, and the versioned "GLC1" bitstream container;
//! * [`metrics`] — MS-SSIM, DISTS aggregation over supplied feature maps,
//!   and their weighted combination;
//! * [`rdo`] — rate estimation, bits-per-pixel, the rate-distortion
//!   objective, lambda sweeps, and a synthetic latent generator;
//! * [`model`] — the "GLMP" parameter file shared by the library and the
//!   `glc` command-line tool.

pub mod alphabet;
pub mod coder;
pub mod entropy;
pub mod error;
pub mod latent;
pub mod metrics;
pub mod model;
pub mod rdo;

pub use alphabet::SymbolAlphabet;
pub use error::{Error, Result};
pub use latent::{quantize, LatentTensor};
