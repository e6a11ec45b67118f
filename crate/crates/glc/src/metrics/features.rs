//! The "DFTR" feature file: one feature stack plus its DISTS weights.
//! Feature samples travel as little-endian f32; the alpha/beta weights as
//! f64 so their normalization survives the round trip.

use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::dists::{DistsWeights, FeatureMap, FeatureStack};

pub const FEATURE_MAGIC: [u8; 4] = *b"DFTR";
pub const FEATURE_VERSION: u16 = 1;

pub fn feature_file_bytes(stack: &FeatureStack, weights: &DistsWeights) -> Result<Vec<u8>> {
    stack.validate()?;
    weights.validate(stack)?;
    let mut out = Vec::new();
    out.extend_from_slice(&FEATURE_MAGIC);
    out.extend_from_slice(&FEATURE_VERSION.to_le_bytes());
    out.extend_from_slice(&(stack.stages.len() as u16).to_le_bytes());
    for m in &stack.stages {
        out.extend_from_slice(&(m.channels as u16).to_le_bytes());
        out.extend_from_slice(&(m.height as u32).to_le_bytes());
        out.extend_from_slice(&(m.width as u32).to_le_bytes());
    }
    for m in &stack.stages {
        for v in &m.data {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
    }
    for block in [&weights.alpha, &weights.beta] {
        for stage in block {
            for w in stage {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
    }
    Ok(out)
}

fn take<'a>(data: &'a [u8], pos: &mut usize, n: usize) -> Result<&'a [u8]> {
    if data.len() < *pos + n {
        return Err(Error::Format("DFTR file truncated".into()));
    }
    let s = &data[*pos..*pos + n];
    *pos += n;
    Ok(s)
}

pub fn parse_feature_file(data: &[u8]) -> Result<(FeatureStack, DistsWeights)> {
    let mut pos = 0usize;
    if take(data, &mut pos, 4)? != FEATURE_MAGIC {
        return Err(Error::Format("bad DFTR magic".into()));
    }
    let version = u16::from_le_bytes(take(data, &mut pos, 2)?.try_into().unwrap());
    if version != FEATURE_VERSION {
        return Err(Error::Format(format!("unsupported DFTR version {version}")));
    }
    let stages = u16::from_le_bytes(take(data, &mut pos, 2)?.try_into().unwrap()) as usize;
    let mut shapes = Vec::with_capacity(stages);
    for _ in 0..stages {
        let c = u16::from_le_bytes(take(data, &mut pos, 2)?.try_into().unwrap()) as usize;
        let h = u32::from_le_bytes(take(data, &mut pos, 4)?.try_into().unwrap()) as usize;
        let w = u32::from_le_bytes(take(data, &mut pos, 4)?.try_into().unwrap()) as usize;
        shapes.push((c, h, w));
    }
    let mut stack = FeatureStack::default();
    for &(c, h, w) in &shapes {
        let count = c * h * w;
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            values.push(f32::from_le_bytes(take(data, &mut pos, 4)?.try_into().unwrap()) as f64);
        }
        stack.stages.push(FeatureMap {
            channels: c,
            height: h,
            width: w,
            data: values,
        });
    }
    let read_weights = |pos: &mut usize| -> Result<Vec<Vec<f64>>> {
        let mut block = Vec::with_capacity(stages);
        for &(c, _, _) in &shapes {
            let mut stage = Vec::with_capacity(c);
            for _ in 0..c {
                stage.push(f64::from_le_bytes(take(data, pos, 8)?.try_into().unwrap()));
            }
            block.push(stage);
        }
        Ok(block)
    };
    let alpha = read_weights(&mut pos)?;
    let beta = read_weights(&mut pos)?;
    if pos != data.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes in DFTR file",
            data.len() - pos
        )));
    }
    let weights = DistsWeights { alpha, beta };
    stack.validate()?;
    weights.validate(&stack)?;
    Ok((stack, weights))
}

pub fn save_feature_file(
    path: &Path,
    stack: &FeatureStack,
    weights: &DistsWeights,
) -> Result<()> {
    std::fs::write(path, feature_file_bytes(stack, weights)?)?;
    Ok(())
}

pub fn load_feature_file(path: &Path) -> Result<(FeatureStack, DistsWeights)> {
    parse_feature_file(&std::fs::read(path)?)
}
