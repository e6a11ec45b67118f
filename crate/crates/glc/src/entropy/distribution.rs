use crate::alphabet::SymbolAlphabet;
use crate::entropy::{FactorizedDensityParams, GllmmParams};
use crate::error::{Error, Result};

/// Minimum probability of any bin after discretization. A zero-frequency
/// symbol would be uncodable, so every bin is floored here and the
/// distribution renormalized.
pub const PROB_FLOOR: f64 = 1.0 / 65536.0;

/// Floored, normalized probabilities over a symbol alphabet. This is the
/// model side the rate estimate uses; the fixed-point `CdfTable` is built
/// from it.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    alphabet: SymbolAlphabet,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn from_probs(alphabet: SymbolAlphabet, raw: Vec<f64>) -> Result<Self> {
        if raw.len() != alphabet.span() {
            return Err(Error::Shape(format!(
                "{} probabilities for alphabet of span {}",
                raw.len(),
                alphabet.span()
            )));
        }
        for (i, p) in raw.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::Parameter(format!(
                    "probability[{i}] = {p} is not a finite non-negative value"
                )));
            }
        }
        Ok(Self {
            alphabet,
            probs: floor_and_renormalize(raw),
        })
    }

    pub fn from_gllmm(params: &GllmmParams, alphabet: SymbolAlphabet) -> Result<Self> {
        Self::from_probs(alphabet, params.bin_probs(alphabet)?)
    }

    pub fn from_factorized(
        params: &FactorizedDensityParams,
        channel: usize,
        alphabet: SymbolAlphabet,
    ) -> Result<Self> {
        Self::from_probs(alphabet, params.bin_probs(channel, alphabet)?)
    }

    pub fn alphabet(&self) -> SymbolAlphabet {
        self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: i32) -> Result<f64> {
        Ok(self.probs[self.alphabet.index_of(symbol)?])
    }

    /// Shannon entropy in bits per symbol.
    pub fn entropy_bits(&self) -> f64 {
        self.probs
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }

    /// Cumulative sums, length span + 1, starting at 0.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.probs.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for p in &self.probs {
            acc += p;
            cum.push(acc);
        }
        cum
    }
}

/// Clamp every bin to at least `PROB_FLOOR` and rescale the rest so the
/// total stays 1. The floored set only grows, so the loop terminates.
fn floor_and_renormalize(mut probs: Vec<f64>) -> Vec<f64> {
    let n = probs.len();
    debug_assert!(n as f64 * PROB_FLOOR <= 1.0 + 1e-12);
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / n as f64; n];
    }
    for p in probs.iter_mut() {
        *p /= total;
    }
    let mut floored = vec![false; n];
    loop {
        let floored_mass = floored.iter().filter(|f| **f).count() as f64 * PROB_FLOOR;
        let free_mass: f64 = probs
            .iter()
            .zip(&floored)
            .filter(|(_, f)| !**f)
            .map(|(p, _)| *p)
            .sum();
        if free_mass <= 0.0 {
            return vec![1.0 / n as f64; n];
        }
        let scale = (1.0 - floored_mass) / free_mass;
        let mut changed = false;
        for (p, f) in probs.iter_mut().zip(&floored) {
            if !*f && *p * scale < PROB_FLOOR {
                changed = true;
            }
        }
        if !changed {
            for (p, f) in probs.iter_mut().zip(floored.iter()) {
                if *f {
                    *p = PROB_FLOOR;
                } else {
                    *p *= scale;
                }
            }
            return probs;
        }
        for (p, f) in probs.iter().zip(floored.iter_mut()) {
            if !*f && *p * scale < PROB_FLOOR {
                *f = true;
            }
        }
    }
}
