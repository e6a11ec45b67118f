//! Probability models for quantized latents: the Gaussian-Laplacian-Logistic
//! mixture for the main latent and the layered factorized density for the
//! hyper latent, plus their discretized integer-bin forms.

mod distribution;
mod factorized;
mod gllmm;

pub use distribution::{DiscreteDistribution, PROB_FLOOR};
pub use factorized::{softplus_unit, ChannelDensity, DensityLayer, FactorizedDensityParams};
pub use gllmm::{
    gaussian_cdf, laplace_cdf, logistic_cdf, GllmmParams, MixtureComponent, MIN_SCALE,
};

use std::fmt;

/// One violated invariant, with where it was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

/// Outcome of parameter validation. Validation never aborts; every violated
/// invariant is listed.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            location: location.into(),
            message: message.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{}: {}", v.location, v.message)?;
        }
        Ok(())
    }
}
