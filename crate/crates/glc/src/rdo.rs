//! Rate estimation and the combined rate-distortion objective, plus the
//! lambda sweep that assembles report rows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::entropy::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::latent::LatentTensor;
use crate::metrics::combined_distortion;

/// The published rate-control points.
pub const DEFAULT_LAMBDAS: [f64; 3] = [2.0, 1.0, 0.5];

/// Model rate of a tensor in bits: the sum of -log2 P(symbol) under the
/// floored real-valued probabilities, one distribution per channel. The
/// floor keeps every term finite.
pub fn rate_bits(tensor: &LatentTensor, dists: &[DiscreteDistribution]) -> Result<f64> {
    if dists.len() != tensor.channels() as usize {
        return Err(Error::Shape(format!(
            "{} distributions for {} channels",
            dists.len(),
            tensor.channels()
        )));
    }
    let mut bits = 0.0;
    for c in 0..tensor.channels() as usize {
        let dist = &dists[c];
        if dist.alphabet() != tensor.alphabet() {
            return Err(Error::Parameter(
                "distribution alphabet does not match tensor".into(),
            ));
        }
        for &v in tensor.channel(c) {
            bits -= dist.prob(v as i32)?.log2();
        }
    }
    Ok(bits)
}

/// Bits per pixel.
pub fn bpp(total_bits: f64, width: u32, height: u32) -> Result<f64> {
    if width == 0 || height == 0 {
        return Err(Error::Parameter("bpp needs positive dimensions".into()));
    }
    Ok(total_bits / (width as f64 * height as f64))
}

/// The objective `distortion + lambda * rate`.
pub fn rd_cost(distortion: f64, rate_bits_total: f64, lambda: f64) -> Result<f64> {
    if !distortion.is_finite() || !rate_bits_total.is_finite() {
        return Err(Error::Input("non-finite rd_cost inputs".into()));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(distortion + lambda * rate_bits_total)
}

/// Draw i.i.d. symbols by inverse-CDF sampling, one distribution per
/// channel, reproducible from the seed.
pub fn synth_latents(
    dists: &[DiscreteDistribution],
    shape: (u16, u32, u32),
    seed: u64,
) -> Result<LatentTensor> {
    let (channels, height, width) = shape;
    if dists.len() != channels as usize {
        return Err(Error::Shape(format!(
            "{} distributions for {channels} channels",
            dists.len()
        )));
    }
    let alphabet = dists
        .first()
        .map(|d| d.alphabet())
        .ok_or_else(|| Error::Parameter("no distributions".into()))?;
    if dists.iter().any(|d| d.alphabet() != alphabet) {
        return Err(Error::Parameter("distributions disagree on alphabet".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let plane = height as usize * width as usize;
    let mut values = Vec::with_capacity(channels as usize * plane);
    for dist in dists {
        let cum = dist.cumulative();
        for _ in 0..plane {
            let u: f64 = rng.gen();
            // First bin whose upper cumulative bound exceeds u.
            let idx = cum[1..cum.len() - 1].partition_point(|c| *c <= u);
            values.push(alphabet.symbol_at(idx) as i16);
        }
    }
    LatentTensor::new(shape, values, alphabet)
}

/// One row of a lambda sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RdRow {
    pub input_id: String,
    pub lambda: f64,
    pub total_bits: f64,
    pub bpp: f64,
    pub ms_ssim: f64,
    pub dists: f64,
    pub combined: f64,
    pub rd_cost: f64,
    pub status: String,
}

/// Sweep report: one row per (input, lambda), CSV-serializable with a fixed
/// header and deterministic 9-significant-digit formatting.
#[derive(Debug, Clone, Default)]
pub struct RdReport {
    pub model_id: String,
    pub rows: Vec<RdRow>,
}

pub const CSV_HEADER: &str = "input,lambda,bits,bpp,ms_ssim,dists,combined,rd_cost,status";

/// Per-input measurements a sweep expands into per-lambda rows.
#[derive(Debug, Clone)]
pub struct SweepMeasurement {
    pub input_id: String,
    pub total_bits: f64,
    /// Pixel count basis for bpp.
    pub width: u32,
    pub height: u32,
    pub ms_ssim: f64,
    pub dists: f64,
    pub status: String,
}

/// Expand per-input measurements into rows, one per lambda. Failed inputs
/// (non-"ok" status) keep their rows with zeroed metrics rather than
/// aborting the sweep.
pub fn rd_sweep(
    measurements: &[SweepMeasurement],
    lambdas: &[f64],
    k_ms: f64,
    k_di: f64,
) -> Result<RdReport> {
    if lambdas.is_empty() {
        return Err(Error::Parameter("lambda list must not be empty".into()));
    }
    let mut report = RdReport::default();
    for m in measurements {
        for &lambda in lambdas {
            if m.status != "ok" {
                report.rows.push(RdRow {
                    input_id: m.input_id.clone(),
                    lambda,
                    total_bits: 0.0,
                    bpp: 0.0,
                    ms_ssim: 0.0,
                    dists: 0.0,
                    combined: 0.0,
                    rd_cost: 0.0,
                    status: m.status.clone(),
                });
                continue;
            }
            let loss = 1.0 - m.ms_ssim;
            let combined = combined_distortion(loss, m.dists, k_ms, k_di)?;
            report.rows.push(RdRow {
                input_id: m.input_id.clone(),
                lambda,
                total_bits: m.total_bits,
                bpp: bpp(m.total_bits, m.width, m.height)?,
                ms_ssim: m.ms_ssim,
                dists: m.dists,
                combined,
                rd_cost: rd_cost(combined, m.total_bits, lambda)?,
                status: "ok".into(),
            });
        }
    }
    Ok(report)
}

impl RdReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.input_id,
                format_sig9(r.lambda),
                format_sig9(r.total_bits),
                format_sig9(r.bpp),
                format_sig9(r.ms_ssim),
                format_sig9(r.dists),
                format_sig9(r.combined),
                format_sig9(r.rd_cost),
                r.status
            ));
        }
        out
    }
}

/// Fixed 9-significant-digit decimal rendering.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (8 - exponent).clamp(0, 30) as usize;
    format!("{x:.decimals$}")
}
