use statrs::function::erf::erf;

use crate::alphabet::SymbolAlphabet;
use crate::entropy::ValidationReport;
use crate::error::{Error, Result};

/// Scales below this collapse whole bins under the probability floor and are
/// rejected at validation.
pub const MIN_SCALE: f64 = 1e-6;

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Normal cumulative via the error function. `variance` is the variance, not
/// the standard deviation.
pub fn gaussian_cdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    check_finite(x, mean)?;
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::Parameter(format!(
            "gaussian variance must be positive and finite, got {variance}"
        )));
    }
    let z = (x - mean) / (2.0 * variance).sqrt();
    Ok(0.5 * (1.0 + erf(z)))
}

pub fn laplace_cdf(x: f64, mean: f64, scale: f64) -> Result<f64> {
    check_finite(x, mean)?;
    check_scale("laplace", scale)?;
    let t = (x - mean) / scale;
    Ok(if t < 0.0 {
        0.5 * t.exp()
    } else {
        1.0 - 0.5 * (-t).exp()
    })
}

pub fn logistic_cdf(x: f64, mean: f64, scale: f64) -> Result<f64> {
    check_finite(x, mean)?;
    check_scale("logistic", scale)?;
    let t = (x - mean) / scale;
    // Evaluate through exp of a non-positive argument so large |t| cannot
    // overflow.
    Ok(if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    })
}

fn check_finite(x: f64, mean: f64) -> Result<()> {
    if !x.is_finite() || !mean.is_finite() {
        return Err(Error::Parameter(format!(
            "non-finite cdf argument x={x} mean={mean}"
        )));
    }
    Ok(())
}

fn check_scale(family: &str, scale: f64) -> Result<()> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Parameter(format!(
            "{family} scale must be positive and finite, got {scale}"
        )));
    }
    Ok(())
}

/// One mixture component. For the Gaussian family `scale` holds the
/// variance; for Laplace and Logistic it holds the family's natural scale
/// parameter directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub scale: f64,
}

/// Per-symbol mixture parameters: three family weights and per-family
/// component lists.
#[derive(Debug, Clone, PartialEq)]
pub struct GllmmParams {
    pub family_weights: [f64; 3],
    pub gaussian: Vec<MixtureComponent>,
    pub laplace: Vec<MixtureComponent>,
    pub logistic: Vec<MixtureComponent>,
}

impl GllmmParams {
    /// Mixture cumulative: family-weighted sum of the component CDFs.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let [p_gauss, p_lap, p_log] = self.family_weights;
        let mut acc = 0.0;
        for c in &self.gaussian {
            acc += p_gauss * c.weight * gaussian_cdf(x, c.mean, c.scale)?;
        }
        for c in &self.laplace {
            acc += p_lap * c.weight * laplace_cdf(x, c.mean, c.scale)?;
        }
        for c in &self.logistic {
            acc += p_log * c.weight * logistic_cdf(x, c.mean, c.scale)?;
        }
        Ok(acc)
    }

    /// Mass of integer bin `k`: the CDF difference across its +-1/2 edges.
    /// The boundary bins absorb all tail mass so the alphabet is exhaustive.
    pub fn bin_prob(&self, k: i32, alphabet: SymbolAlphabet) -> Result<f64> {
        alphabet.index_of(k)?;
        let p = if k == alphabet.min() {
            self.cdf(k as f64 + 0.5)?
        } else if k == alphabet.max() {
            1.0 - self.cdf(k as f64 - 0.5)?
        } else {
            self.cdf(k as f64 + 0.5)? - self.cdf(k as f64 - 0.5)?
        };
        Ok(p.max(0.0))
    }

    /// Raw (pre-floor) bin masses over the whole alphabet.
    pub fn bin_probs(&self, alphabet: SymbolAlphabet) -> Result<Vec<f64>> {
        alphabet
            .symbols()
            .map(|k| self.bin_prob(k, alphabet))
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let [p0, p1, p2] = self.family_weights;
        for (i, p) in self.family_weights.iter().enumerate() {
            if !(*p >= 0.0) || !p.is_finite() {
                report.push(
                    format!("family_weights[{i}]"),
                    format!("weight must be finite and >= 0, got {p}"),
                );
            }
        }
        let sum = p0 + p1 + p2;
        if !((sum - 1.0).abs() <= WEIGHT_SUM_TOL) {
            report.push(
                "family_weights",
                format!("weights must sum to 1 within 1e-9, got {sum}"),
            );
        }
        for (family, comps) in [
            ("gaussian", &self.gaussian),
            ("laplace", &self.laplace),
            ("logistic", &self.logistic),
        ] {
            if comps.is_empty() {
                report.push(family, "family must have at least one component");
                continue;
            }
            let mut wsum = 0.0;
            for (i, c) in comps.iter().enumerate() {
                let loc = format!("{family}[{i}]");
                if !(c.weight >= 0.0) || !c.weight.is_finite() {
                    report.push(
                        loc.clone(),
                        format!("component weight must be finite and >= 0, got {}", c.weight),
                    );
                }
                if !c.mean.is_finite() {
                    report.push(loc.clone(), format!("mean must be finite, got {}", c.mean));
                }
                if !(c.scale > 0.0) || !c.scale.is_finite() {
                    report.push(
                        loc.clone(),
                        format!("scale/variance must be positive, got {}", c.scale),
                    );
                } else {
                    // Gaussian stores variance; compare its standard deviation
                    // against the degeneracy threshold.
                    let natural = if family == "gaussian" {
                        c.scale.sqrt()
                    } else {
                        c.scale
                    };
                    if natural < MIN_SCALE {
                        report.push(
                            loc,
                            format!("scale {natural} below degeneracy threshold {MIN_SCALE}"),
                        );
                    }
                }
                wsum += c.weight;
            }
            if !((wsum - 1.0).abs() <= WEIGHT_SUM_TOL) {
                report.push(
                    family,
                    format!("component weights must sum to 1 within 1e-9, got {wsum}"),
                );
            }
        }
        report
    }
}
