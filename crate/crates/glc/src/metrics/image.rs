//! 8-bit RGB rasters with binary PPM (P6, maxval 255) input/output.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRaster {
    width: usize,
    height: usize,
    samples: Vec<u8>, // RGB interleaved
}

impl ImageRaster {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Input("image dimensions must be at least 1".into()));
        }
        if samples.len() != width * height * 3 {
            return Err(Error::Shape(format!(
                "{} samples for {width}x{height} RGB image",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    /// One color plane as f64 values on the 0..255 range.
    pub fn plane(&self, channel: usize) -> Vec<f64> {
        debug_assert!(channel < 3);
        self.samples[channel..]
            .iter()
            .step_by(3)
            .map(|&v| v as f64)
            .collect()
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.samples);
        out
    }

    pub fn from_ppm(data: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let mut token = || -> Result<String> {
            // Skip whitespace and `#` comments between header tokens.
            loop {
                match data.get(pos) {
                    Some(b) if b.is_ascii_whitespace() => pos += 1,
                    Some(b'#') => {
                        while pos < data.len() && data[pos] != b'\n' {
                            pos += 1;
                        }
                    }
                    Some(_) => break,
                    None => return Err(Error::Format("truncated PPM header".into())),
                }
            }
            let start = pos;
            while pos < data.len() && !data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
        };
        if token()? != "P6" {
            return Err(Error::Format("not a binary PPM (P6) file".into()));
        }
        let width: usize = token()?
            .parse()
            .map_err(|_| Error::Format("bad PPM width".into()))?;
        let height: usize = token()?
            .parse()
            .map_err(|_| Error::Format("bad PPM height".into()))?;
        let maxval: usize = token()?
            .parse()
            .map_err(|_| Error::Format("bad PPM maxval".into()))?;
        if maxval != 255 {
            return Err(Error::Format(format!(
                "unsupported PPM maxval {maxval}, expected 255"
            )));
        }
        // Exactly one whitespace byte separates the header from the samples.
        pos += 1;
        let body = data
            .get(pos..)
            .ok_or_else(|| Error::Format("truncated PPM body".into()))?;
        if body.len() != width * height * 3 {
            return Err(Error::Format(format!(
                "PPM body has {} bytes, expected {}",
                body.len(),
                width * height * 3
            )));
        }
        Self::new(width, height, body.to_vec())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_ppm())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_ppm(&std::fs::read(path)?)
    }
}
