use crate::alphabet::SymbolAlphabet;
use crate::entropy::ValidationReport;
use crate::error::{Error, Result};

pub const DEFAULT_LAYERS: usize = 4;
pub const DEFAULT_WIDTH: usize = 3;

/// Raw weight value that softplus maps to exactly 1.
pub fn softplus_unit() -> f64 {
    (std::f64::consts::E - 1.0).ln()
}

fn softplus(x: f64) -> f64 {
    // x.max(0) + ln(1 + exp(-|x|)) is stable for both tails.
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// One monotone layer: an elementwise positive-weight affine map followed by
/// a gated tanh update. Weights are stored raw and passed through softplus;
/// gates through tanh, keeping every lane strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityLayer {
    pub raw_weight: Vec<f64>,
    pub bias: Vec<f64>,
    pub raw_gate: Vec<f64>,
}

impl DensityLayer {
    pub fn identity(width: usize) -> Self {
        Self {
            raw_weight: vec![softplus_unit(); width],
            bias: vec![0.0; width],
            raw_gate: vec![0.0; width],
        }
    }

    pub fn width(&self) -> usize {
        self.raw_weight.len()
    }
}

/// The layered monotone cumulative for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDensity {
    pub layers: Vec<DensityLayer>,
}

impl ChannelDensity {
    pub fn identity() -> Self {
        Self {
            layers: (0..DEFAULT_LAYERS)
                .map(|_| DensityLayer::identity(DEFAULT_WIDTH))
                .collect(),
        }
    }

    /// Evaluate the cumulative at `x`. The scalar is broadcast across the
    /// lanes, each lane is transformed by every layer, and the lane mean is
    /// squashed to (0, 1) by a logistic.
    pub fn cumulative(&self, x: f64) -> f64 {
        let width = self.layers.first().map_or(1, DensityLayer::width);
        let mut lanes = vec![x; width];
        for layer in &self.layers {
            for (i, u) in lanes.iter_mut().enumerate() {
                let v = softplus(layer.raw_weight[i]) * *u + layer.bias[i];
                *u = v + layer.raw_gate[i].tanh() * v.tanh();
            }
        }
        let mean = lanes.iter().sum::<f64>() / lanes.len() as f64;
        sigmoid(mean)
    }

    fn validate_into(&self, channel: usize, report: &mut ValidationReport) {
        let loc = format!("factorized[{channel}]");
        if self.layers.is_empty() {
            report.push(loc, "channel must have at least one layer");
            return;
        }
        let width = self.layers[0].width();
        for (l, layer) in self.layers.iter().enumerate() {
            let lloc = format!("{loc}.layer[{l}]");
            if layer.raw_weight.len() != width
                || layer.bias.len() != width
                || layer.raw_gate.len() != width
            {
                report.push(lloc.clone(), "layer vectors must share one width");
            }
            for v in layer
                .raw_weight
                .iter()
                .chain(&layer.bias)
                .chain(&layer.raw_gate)
            {
                if !v.is_finite() {
                    report.push(lloc.clone(), format!("non-finite layer value {v}"));
                    return;
                }
            }
        }
        // Monotonicity on a sampled grid, and saturation far out.
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=200 {
            let x = -20.0 + 0.2 * i as f64;
            let c = self.cumulative(x);
            if c < prev {
                report.push(
                    loc.clone(),
                    format!("cumulative decreases near x={x:.1}: {c} < {prev}"),
                );
                break;
            }
            prev = c;
        }
        if self.cumulative(-1e4) >= 1e-6 {
            report.push(loc.clone(), "cumulative does not vanish at -1e4");
        }
        if self.cumulative(1e4) <= 1.0 - 1e-6 {
            report.push(loc, "cumulative does not reach 1 at 1e4");
        }
    }
}

/// One univariate density per channel, shared across all spatial positions
/// of that channel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FactorizedDensityParams {
    pub channels: Vec<ChannelDensity>,
}

impl FactorizedDensityParams {
    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    fn channel(&self, index: usize) -> Result<&ChannelDensity> {
        self.channels
            .get(index)
            .ok_or(Error::UnknownChannel(index))
    }

    pub fn cumulative(&self, channel: usize, x: f64) -> Result<f64> {
        Ok(self.channel(channel)?.cumulative(x))
    }

    /// Mass of integer bin `k` for one channel, with the same boundary-bin
    /// tail absorption as the mixture model.
    pub fn bin_prob(&self, channel: usize, k: i32, alphabet: SymbolAlphabet) -> Result<f64> {
        let density = self.channel(channel)?;
        alphabet.index_of(k)?;
        let p = if k == alphabet.min() {
            density.cumulative(k as f64 + 0.5)
        } else if k == alphabet.max() {
            1.0 - density.cumulative(k as f64 - 0.5)
        } else {
            density.cumulative(k as f64 + 0.5) - density.cumulative(k as f64 - 0.5)
        };
        Ok(p.max(0.0))
    }

    pub fn bin_probs(&self, channel: usize, alphabet: SymbolAlphabet) -> Result<Vec<f64>> {
        alphabet
            .symbols()
            .map(|k| self.bin_prob(channel, k, alphabet))
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (i, ch) in self.channels.iter().enumerate() {
            ch.validate_into(i, &mut report);
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::logistic_cdf;

    #[test]
    fn identity_layers_reduce_to_logistic() {
        let d = ChannelDensity::identity();
        for x in [-3.0, -0.5, 0.0, 0.5, 2.0] {
            let expected = logistic_cdf(x, 0.0, 1.0).unwrap();
            assert!((d.cumulative(x) - expected).abs() < 1e-12);
        }
        let p = FactorizedDensityParams {
            channels: vec![ChannelDensity::identity()],
        };
        let alphabet = SymbolAlphabet::new(-16, 16).unwrap();
        // sigma(0.5) - sigma(-0.5)
        assert!((p.bin_prob(0, 0, alphabet).unwrap() - 0.24491866240370913).abs() < 1e-12);
    }

    #[test]
    fn bin_probs_telescope_to_one() {
        let mut d = ChannelDensity::identity();
        d.layers[1].bias = vec![0.4, -0.2, 0.1];
        d.layers[2].raw_gate = vec![0.5, -0.3, 0.8];
        let p = FactorizedDensityParams { channels: vec![d] };
        let alphabet = SymbolAlphabet::new(-32, 32).unwrap();
        let sum: f64 = p.bin_probs(0, alphabet).unwrap().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_channel_is_an_error() {
        let p = FactorizedDensityParams {
            channels: vec![ChannelDensity::identity()],
        };
        let alphabet = SymbolAlphabet::new(-2, 2).unwrap();
        assert!(matches!(
            p.bin_prob(1, 0, alphabet),
            Err(Error::UnknownChannel(1))
        ));
    }

    #[test]
    fn validation_accepts_identity_and_flags_nan() {
        let mut p = FactorizedDensityParams {
            channels: vec![ChannelDensity::identity(), ChannelDensity::identity()],
        };
        assert!(p.validate().is_valid());
        p.channels[1].layers[0].bias[0] = f64::NAN;
        assert!(!p.validate().is_valid());
    }

    #[test]
    fn gated_layers_stay_monotone() {
        let mut d = ChannelDensity::identity();
        for (l, layer) in d.layers.iter_mut().enumerate() {
            layer.raw_gate = vec![0.9 - 0.3 * l as f64, -0.7, 0.4];
            layer.bias = vec![0.1 * l as f64, -0.05, 0.2];
            layer.raw_weight = vec![0.2, 0.8, 1.5];
        }
        let p = FactorizedDensityParams { channels: vec![d] };
        assert!(p.validate().is_valid());
        let mut prev = 0.0;
        for i in 0..400 {
            let c = p.cumulative(0, -10.0 + 0.05 * i as f64).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }
}
