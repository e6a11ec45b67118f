//! The "GLMP" model parameter file: per-channel GLLMM parameters for the
//! main latent and layered factorized densities for the hyper latent, with
//! binary and textual forms plus a synthetic generator.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::alphabet::SymbolAlphabet;
use crate::entropy::{
    ChannelDensity, DensityLayer, DiscreteDistribution, FactorizedDensityParams, GllmmParams,
    MixtureComponent, ValidationReport,
};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: [u8; 4] = *b"GLMP";
pub const MODEL_VERSION: u16 = 1;
const TEXT_HEADER: &str = "glmp-text v1";

/// Default component counts per family.
pub const DEFAULT_COMPONENTS: (usize, usize, usize) = (3, 3, 3);

/// Full parameter set of the codec: one GLLMM per main-latent channel and
/// one factorized density per hyper-latent channel.
#[derive(Debug, Clone, PartialEq)]
pub struct CodecModel {
    pub gllmm: Vec<GllmmParams>,
    pub factorized: FactorizedDensityParams,
}

impl CodecModel {
    pub fn main_channels(&self) -> usize {
        self.gllmm.len()
    }

    pub fn hyper_channels(&self) -> usize {
        self.factorized.channel_count()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.gllmm.is_empty() {
            report.push("gllmm", "model must have at least one channel");
        }
        for (i, params) in self.gllmm.iter().enumerate() {
            for v in params.validate().violations() {
                report.push(format!("gllmm[{i}].{}", v.location), v.message.clone());
            }
        }
        report.merge(self.factorized.validate());
        report
    }

    /// One floored distribution per main-latent channel.
    pub fn main_distributions(&self, alphabet: SymbolAlphabet) -> Result<Vec<DiscreteDistribution>> {
        self.gllmm
            .iter()
            .map(|p| DiscreteDistribution::from_gllmm(p, alphabet))
            .collect()
    }

    /// One floored distribution per hyper-latent channel.
    pub fn hyper_distributions(&self, alphabet: SymbolAlphabet) -> Result<Vec<DiscreteDistribution>> {
        (0..self.hyper_channels())
            .map(|c| DiscreteDistribution::from_factorized(&self.factorized, c, alphabet))
            .collect()
    }

    /// 64-bit FNV-1a over the canonical binary serialization; stored in
    /// container headers so a decoder can detect a mismatched model file.
    pub fn model_id(&self) -> [u8; 8] {
        let mut hash = 0xcbf29ce484222325u64;
        for b in self.to_bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        hash.to_le_bytes()
    }
}

// --- binary form ---

impl CodecModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&MODEL_MAGIC);
        out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.gllmm.len() as u16).to_le_bytes());
        for p in &self.gllmm {
            out.extend_from_slice(&(p.gaussian.len() as u16).to_le_bytes());
            out.extend_from_slice(&(p.laplace.len() as u16).to_le_bytes());
            out.extend_from_slice(&(p.logistic.len() as u16).to_le_bytes());
        }
        for p in &self.gllmm {
            for w in p.family_weights {
                out.extend_from_slice(&w.to_le_bytes());
            }
            for family in [&p.gaussian, &p.laplace, &p.logistic] {
                for c in family {
                    out.extend_from_slice(&c.weight.to_le_bytes());
                    out.extend_from_slice(&c.mean.to_le_bytes());
                    out.extend_from_slice(&c.scale.to_le_bytes());
                }
            }
        }
        let z = &self.factorized.channels;
        let layers = z.first().map_or(0, |c| c.layers.len());
        let width = z
            .first()
            .and_then(|c| c.layers.first())
            .map_or(0, DensityLayer::width);
        out.extend_from_slice(&(z.len() as u16).to_le_bytes());
        out.extend_from_slice(&(layers as u16).to_le_bytes());
        out.extend_from_slice(&(width as u16).to_le_bytes());
        for ch in z {
            for layer in &ch.layers {
                for block in [&layer.raw_weight, &layer.bias, &layer.raw_gate] {
                    for v in block {
                        out.extend_from_slice(&v.to_le_bytes());
                    }
                }
            }
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = Reader::new(data);
        if r.take(4)? != MODEL_MAGIC {
            return Err(Error::Format("bad GLMP magic".into()));
        }
        let version = r.u16()?;
        if version != MODEL_VERSION {
            return Err(Error::Format(format!("unsupported GLMP version {version}")));
        }
        let channels = r.u16()? as usize;
        let mut counts = Vec::with_capacity(channels);
        for _ in 0..channels {
            counts.push((r.u16()? as usize, r.u16()? as usize, r.u16()? as usize));
        }
        let mut gllmm = Vec::with_capacity(channels);
        for &(k, m, n) in &counts {
            let family_weights = [r.f64()?, r.f64()?, r.f64()?];
            let mut families = Vec::new();
            for count in [k, m, n] {
                let mut comps = Vec::with_capacity(count);
                for _ in 0..count {
                    comps.push(MixtureComponent {
                        weight: r.f64()?,
                        mean: r.f64()?,
                        scale: r.f64()?,
                    });
                }
                families.push(comps);
            }
            let logistic = families.pop().unwrap();
            let laplace = families.pop().unwrap();
            let gaussian = families.pop().unwrap();
            gllmm.push(GllmmParams {
                family_weights,
                gaussian,
                laplace,
                logistic,
            });
        }
        let z_channels = r.u16()? as usize;
        let layers = r.u16()? as usize;
        let width = r.u16()? as usize;
        let mut z = Vec::with_capacity(z_channels);
        for _ in 0..z_channels {
            let mut ch = ChannelDensity { layers: Vec::with_capacity(layers) };
            for _ in 0..layers {
                let mut blocks = Vec::new();
                for _ in 0..3 {
                    let mut block = Vec::with_capacity(width);
                    for _ in 0..width {
                        block.push(r.f64()?);
                    }
                    blocks.push(block);
                }
                let raw_gate = blocks.pop().unwrap();
                let bias = blocks.pop().unwrap();
                let raw_weight = blocks.pop().unwrap();
                ch.layers.push(DensityLayer {
                    raw_weight,
                    bias,
                    raw_gate,
                });
            }
            z.push(ch);
        }
        r.finish()?;
        Ok(Self {
            gllmm,
            factorized: FactorizedDensityParams { channels: z },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    /// Load a model file, accepting either the binary or the textual form.
    pub fn load(path: &Path) -> Result<Self> {
        let data = std::fs::read(path)?;
        if data.starts_with(&MODEL_MAGIC) {
            Self::from_bytes(&data)
        } else {
            let text = String::from_utf8(data)
                .map_err(|_| Error::Format("model file is neither GLMP nor text".into()))?;
            Self::from_text(&text)
        }
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.data.len() < self.pos + n {
            return Err(Error::Format("GLMP file truncated".into()));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes in GLMP file",
                self.data.len() - self.pos
            )));
        }
        Ok(())
    }
}

// --- textual form (debugging dump of the same content) ---

impl CodecModel {
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        writeln!(s, "{TEXT_HEADER}").unwrap();
        writeln!(s, "channels {}", self.gllmm.len()).unwrap();
        for (i, p) in self.gllmm.iter().enumerate() {
            writeln!(
                s,
                "channel {i} k {} m {} n {}",
                p.gaussian.len(),
                p.laplace.len(),
                p.logistic.len()
            )
            .unwrap();
            writeln!(
                s,
                "family_weights {} {} {}",
                p.family_weights[0], p.family_weights[1], p.family_weights[2]
            )
            .unwrap();
            for (name, family) in [
                ("gaussian", &p.gaussian),
                ("laplace", &p.laplace),
                ("logistic", &p.logistic),
            ] {
                for c in family {
                    writeln!(s, "{name} {} {} {}", c.weight, c.mean, c.scale).unwrap();
                }
            }
        }
        let z = &self.factorized.channels;
        let layers = z.first().map_or(0, |c| c.layers.len());
        let width = z
            .first()
            .and_then(|c| c.layers.first())
            .map_or(0, DensityLayer::width);
        writeln!(s, "hyper_channels {} layers {layers} width {width}", z.len()).unwrap();
        for (c, ch) in z.iter().enumerate() {
            for (l, layer) in ch.layers.iter().enumerate() {
                for (name, block) in [
                    ("weight", &layer.raw_weight),
                    ("bias", &layer.bias),
                    ("gate", &layer.raw_gate),
                ] {
                    write!(s, "hyper {c} layer {l} {name}").unwrap();
                    for v in block {
                        write!(s, " {v}").unwrap();
                    }
                    writeln!(s).unwrap();
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |msg: &str| Error::Format(format!("model text: {msg}"));
        if lines.next().map(str::trim) != Some(TEXT_HEADER) {
            return Err(bad("missing header line"));
        }

        fn fields(line: &str) -> Vec<&str> {
            line.split_whitespace().collect()
        }
        fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse()
                .map_err(|_| Error::Format(format!("model text: bad number {s}")))
        }

        let head = fields(lines.next().ok_or_else(|| bad("missing channels line"))?);
        if head.len() != 2 || head[0] != "channels" {
            return Err(bad("expected `channels N`"));
        }
        let channels: usize = parse(head[1])?;
        let mut gllmm = Vec::with_capacity(channels);
        for _ in 0..channels {
            let h = fields(lines.next().ok_or_else(|| bad("missing channel line"))?);
            if h.len() != 8 || h[0] != "channel" {
                return Err(bad("expected `channel I k K m M n N`"));
            }
            let (k, m, n): (usize, usize, usize) = (parse(h[3])?, parse(h[5])?, parse(h[7])?);
            let fw = fields(lines.next().ok_or_else(|| bad("missing family_weights"))?);
            if fw.len() != 4 || fw[0] != "family_weights" {
                return Err(bad("expected family_weights line"));
            }
            let family_weights = [parse(fw[1])?, parse(fw[2])?, parse(fw[3])?];
            let mut read_family = |name: &str, count: usize| -> Result<Vec<MixtureComponent>> {
                let mut comps = Vec::with_capacity(count);
                for _ in 0..count {
                    let f = fields(lines.next().ok_or_else(|| bad("missing component"))?);
                    if f.len() != 4 || f[0] != name {
                        return Err(bad(&format!("expected {name} component line")));
                    }
                    comps.push(MixtureComponent {
                        weight: parse(f[1])?,
                        mean: parse(f[2])?,
                        scale: parse(f[3])?,
                    });
                }
                Ok(comps)
            };
            let gaussian = read_family("gaussian", k)?;
            let laplace = read_family("laplace", m)?;
            let logistic = read_family("logistic", n)?;
            gllmm.push(GllmmParams {
                family_weights,
                gaussian,
                laplace,
                logistic,
            });
        }
        let h = fields(lines.next().ok_or_else(|| bad("missing hyper_channels"))?);
        if h.len() != 6 || h[0] != "hyper_channels" {
            return Err(bad("expected hyper_channels line"));
        }
        let (zc, layers, width): (usize, usize, usize) = (parse(h[1])?, parse(h[3])?, parse(h[5])?);
        let mut z = Vec::with_capacity(zc);
        for _ in 0..zc {
            let mut ch = ChannelDensity { layers: Vec::with_capacity(layers) };
            for _ in 0..layers {
                let mut blocks: Vec<Vec<f64>> = Vec::new();
                for name in ["weight", "bias", "gate"] {
                    let f = fields(lines.next().ok_or_else(|| bad("missing hyper line"))?);
                    if f.len() != 5 + width || f[0] != "hyper" || f[4] != name {
                        return Err(bad(&format!("expected hyper {name} line")));
                    }
                    let mut block = Vec::with_capacity(width);
                    for s in &f[5..] {
                        block.push(parse(s)?);
                    }
                    blocks.push(block);
                }
                let raw_gate = blocks.pop().unwrap();
                let bias = blocks.pop().unwrap();
                let raw_weight = blocks.pop().unwrap();
                ch.layers.push(DensityLayer {
                    raw_weight,
                    bias,
                    raw_gate,
                });
            }
            z.push(ch);
        }
        if lines.next().is_some() {
            return Err(bad("trailing lines"));
        }
        Ok(Self {
            gllmm,
            factorized: FactorizedDensityParams { channels: z },
        })
    }
}

// --- synthetic generation ---

/// Generate a random valid model, reproducible from the seed.
pub fn generate_model(
    channels: usize,
    components: (usize, usize, usize),
    hyper_channels: usize,
    seed: u64,
) -> Result<CodecModel> {
    if channels == 0 || channels > u16::MAX as usize {
        return Err(Error::Parameter(format!("bad channel count {channels}")));
    }
    let (k, m, n) = components;
    if k == 0 || m == 0 || n == 0 || k.max(m).max(n) > u16::MAX as usize {
        return Err(Error::Parameter(format!(
            "component counts must be positive, got {k}/{m}/{n}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut gllmm = Vec::with_capacity(channels);
    for _ in 0..channels {
        gllmm.push(random_gllmm(&mut rng, k, m, n));
    }
    let mut z = Vec::with_capacity(hyper_channels);
    for _ in 0..hyper_channels {
        z.push(random_density(&mut rng));
    }
    Ok(CodecModel {
        gllmm,
        factorized: FactorizedDensityParams { channels: z },
    })
}

fn normalized(rng: &mut ChaCha12Rng, count: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.2..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let mut out: Vec<f64> = raw.iter().map(|w| w / sum).collect();
    // Force an exact sum so the 1e-9 invariant holds regardless of rounding.
    let head: f64 = out[..count - 1].iter().sum();
    out[count - 1] = 1.0 - head;
    out
}

fn random_gllmm(rng: &mut ChaCha12Rng, k: usize, m: usize, n: usize) -> GllmmParams {
    let fw = normalized(rng, 3);
    let mut family = |count: usize, gaussian: bool| {
        let weights = normalized(rng, count);
        (0..count)
            .map(|i| MixtureComponent {
                weight: weights[i],
                mean: rng.gen_range(-2.0..2.0),
                scale: if gaussian {
                    rng.gen_range(0.25..4.0)
                } else {
                    rng.gen_range(0.3..2.0)
                },
            })
            .collect::<Vec<_>>()
    };
    GllmmParams {
        family_weights: [fw[0], fw[1], fw[2]],
        gaussian: family(k, true),
        laplace: family(m, false),
        logistic: family(n, false),
    }
}

fn random_density(rng: &mut ChaCha12Rng) -> ChannelDensity {
    use crate::entropy::softplus_unit;
    let mut ch = ChannelDensity::identity();
    for layer in ch.layers.iter_mut() {
        for i in 0..layer.width() {
            layer.raw_weight[i] = softplus_unit() + rng.gen_range(-0.4..0.4);
            layer.bias[i] = rng.gen_range(-0.3..0.3);
            layer.raw_gate[i] = rng.gen_range(-0.7..0.7);
        }
    }
    ch
}
