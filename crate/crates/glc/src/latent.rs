//! Integer latent tensors and their on-disk "GLTN" form.

use std::path::Path;

use crate::alphabet::SymbolAlphabet;
use crate::error::{Error, Result};

const GLTN_MAGIC: [u8; 4] = *b"GLTN";
const GLTN_VERSION: u16 = 1;

/// Quantized latent grid in (channels, height, width) raster order,
/// channel-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatentTensor {
    channels: u16,
    height: u32,
    width: u32,
    alphabet: SymbolAlphabet,
    values: Vec<i16>,
}

impl LatentTensor {
    pub fn new(
        shape: (u16, u32, u32),
        values: Vec<i16>,
        alphabet: SymbolAlphabet,
    ) -> Result<Self> {
        let (channels, height, width) = shape;
        let expected = channels as usize * height as usize * width as usize;
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "value count {} does not match shape {}x{}x{}",
                values.len(),
                channels,
                height,
                width
            )));
        }
        for &v in &values {
            if !alphabet.contains(v as i32) {
                return Err(Error::OutOfAlphabet {
                    symbol: v as i32,
                    min: alphabet.min(),
                    max: alphabet.max(),
                });
            }
        }
        Ok(Self {
            channels,
            height,
            width,
            alphabet,
            values,
        })
    }

    pub fn shape(&self) -> (u16, u32, u32) {
        (self.channels, self.height, self.width)
    }

    pub fn channels(&self) -> u16 {
        self.channels
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn alphabet(&self) -> SymbolAlphabet {
        self.alphabet
    }

    pub fn values(&self) -> &[i16] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values of one channel plane, raster order.
    pub fn channel(&self, c: usize) -> &[i16] {
        let plane = self.height as usize * self.width as usize;
        &self.values[c * plane..(c + 1) * plane]
    }
}

/// Round half away from zero, then clamp into the alphabet.
pub fn quantize(
    shape: (u16, u32, u32),
    values: &[f64],
    alphabet: SymbolAlphabet,
) -> Result<LatentTensor> {
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Input(format!("non-finite value {bad} in input")));
    }
    let quantized = values
        .iter()
        .map(|&v| alphabet.clamp(v.round() as i32) as i16)
        .collect();
    LatentTensor::new(shape, quantized, alphabet)
}

impl LatentTensor {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(20 + self.values.len() * 2);
        out.extend_from_slice(&GLTN_MAGIC);
        out.extend_from_slice(&GLTN_VERSION.to_le_bytes());
        out.extend_from_slice(&self.channels.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&(self.alphabet.min() as i16).to_le_bytes());
        out.extend_from_slice(&(self.alphabet.max() as i16).to_le_bytes());
        for &v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        if data.len() < 18 {
            return Err(Error::Format("GLTN file shorter than header".into()));
        }
        if data[0..4] != GLTN_MAGIC {
            return Err(Error::Format("bad GLTN magic".into()));
        }
        let version = u16::from_le_bytes([data[4], data[5]]);
        if version != GLTN_VERSION {
            return Err(Error::Format(format!("unsupported GLTN version {version}")));
        }
        let channels = u16::from_le_bytes([data[6], data[7]]);
        let height = u32::from_le_bytes([data[8], data[9], data[10], data[11]]);
        let width = u32::from_le_bytes([data[12], data[13], data[14], data[15]]);
        let amin = i16::from_le_bytes([data[16], data[17]]) as i32;
        let amax = i16::from_le_bytes([data[18], data[19]]) as i32;
        let alphabet = SymbolAlphabet::new(amin, amax)?;
        let count = channels as usize * height as usize * width as usize;
        let body = &data[20..];
        if body.len() != count * 2 {
            return Err(Error::Format(format!(
                "GLTN body has {} bytes, expected {}",
                body.len(),
                count * 2
            )));
        }
        let values = body
            .chunks_exact(2)
            .map(|b| i16::from_le_bytes([b[0], b[1]]))
            .collect();
        LatentTensor::new((channels, height, width), values, alphabet)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
