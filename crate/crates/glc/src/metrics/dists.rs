//! DISTS-style aggregation over externally supplied feature maps: a
//! texture (mean) and structure (covariance) similarity per stage and
//! channel, combined with per-channel weights that sum to 1.

use crate::error::{Error, Result};

const C1: f64 = 1e-6;
const C2: f64 = 1e-6;
const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>, // channel-major, row-major
}

impl FeatureMap {
    fn channel(&self, c: usize) -> &[f64] {
        let plane = self.height * self.width;
        &self.data[c * plane..(c + 1) * plane]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureStack {
    pub stages: Vec<FeatureMap>,
}

impl FeatureStack {
    pub fn validate(&self) -> Result<()> {
        for (s, m) in self.stages.iter().enumerate() {
            if m.channels == 0 || m.height == 0 || m.width == 0 {
                return Err(Error::Shape(format!("stage {s} has an empty dimension")));
            }
            if m.data.len() != m.channels * m.height * m.width {
                return Err(Error::Shape(format!(
                    "stage {s} holds {} values for shape {}x{}x{}",
                    m.data.len(),
                    m.channels,
                    m.height,
                    m.width
                )));
            }
        }
        Ok(())
    }
}

/// Per-stage, per-channel texture (alpha) and structure (beta) weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DistsWeights {
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
}

impl DistsWeights {
    /// Uniform weights over all (stage, channel, term) slots.
    pub fn uniform(stack: &FeatureStack) -> Self {
        let slots: usize = stack.stages.iter().map(|m| m.channels).sum();
        let w = 1.0 / (2 * slots) as f64;
        let alpha: Vec<Vec<f64>> = stack
            .stages
            .iter()
            .map(|m| vec![w; m.channels])
            .collect();
        DistsWeights {
            beta: alpha.clone(),
            alpha,
        }
    }

    pub fn validate(&self, stack: &FeatureStack) -> Result<()> {
        if self.alpha.len() != stack.stages.len() || self.beta.len() != stack.stages.len() {
            return Err(Error::Shape(format!(
                "weights cover {} stages, stack has {}",
                self.alpha.len(),
                stack.stages.len()
            )));
        }
        let mut sum = 0.0;
        for (s, m) in stack.stages.iter().enumerate() {
            if self.alpha[s].len() != m.channels || self.beta[s].len() != m.channels {
                return Err(Error::Shape(format!(
                    "stage {s} weights do not match {} channels",
                    m.channels
                )));
            }
            for w in self.alpha[s].iter().chain(&self.beta[s]) {
                if !w.is_finite() || *w < 0.0 {
                    return Err(Error::Parameter(format!("bad DISTS weight {w}")));
                }
                sum += w;
            }
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Parameter(format!(
                "DISTS weights must sum to 1 within 1e-9, got {sum}"
            )));
        }
        Ok(())
    }
}

/// Weighted texture/structure dissimilarity; 0 for identical stacks,
/// approaching 1 as every similarity term collapses.
pub fn dists_score(fx: &FeatureStack, fy: &FeatureStack, w: &DistsWeights) -> Result<f64> {
    fx.validate()?;
    fy.validate()?;
    if fx.stages.len() != fy.stages.len() {
        return Err(Error::Shape(format!(
            "stacks have {} vs {} stages",
            fx.stages.len(),
            fy.stages.len()
        )));
    }
    for (s, (mx, my)) in fx.stages.iter().zip(&fy.stages).enumerate() {
        if (mx.channels, mx.height, mx.width) != (my.channels, my.height, my.width) {
            return Err(Error::Shape(format!("stage {s} shapes differ")));
        }
    }
    w.validate(fx)?;

    let mut acc = 0.0;
    for (s, (mx, my)) in fx.stages.iter().zip(&fy.stages).enumerate() {
        for c in 0..mx.channels {
            let (mu_x, var_x) = stats(mx.channel(c));
            let (mu_y, var_y) = stats(my.channel(c));
            let cov = covariance(mx.channel(c), my.channel(c), mu_x, mu_y);
            let texture = (2.0 * mu_x * mu_y + C1) / (mu_x * mu_x + mu_y * mu_y + C1);
            let structure = (2.0 * cov + C2) / (var_x + var_y + C2);
            acc += w.alpha[s][c] * texture + w.beta[s][c] * structure;
        }
    }
    Ok(1.0 - acc)
}

fn stats(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

fn covariance(a: &[f64], b: &[f64], mu_a: f64, mu_b: f64) -> f64 {
    let n = a.len() as f64;
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - mu_a) * (y - mu_b))
        .sum::<f64>()
        / n
}
