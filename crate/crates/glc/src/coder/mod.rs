//! Fixed-point CDF tables, the range coder, and the bitstream container.

mod codec;
mod container;
mod range;
mod table;

pub use codec::{compress, decompress, hyper_shape, HYPER_DOWNSAMPLE};
pub use container::{crc32, Container, ContainerHeader, CONTAINER_MAGIC, CONTAINER_VERSION, FLAG_HAS_HYPER};
pub use range::{RangeDecoder, RangeEncoder};
pub use table::{CdfTable, DEFAULT_PRECISION_BITS, MAX_PRECISION_BITS, MIN_PRECISION_BITS};

use crate::alphabet::SymbolAlphabet;
use crate::error::{Error, Result};
use crate::latent::LatentTensor;

/// Entropy-code a tensor with one table per channel, raster order
/// channel-major. An empty tensor yields an empty payload.
pub fn encode_tensor(tensor: &LatentTensor, tables: &[CdfTable]) -> Result<Vec<u8>> {
    check_tables(tensor.channels() as usize, tensor.alphabet(), tables)?;
    if tensor.is_empty() {
        return Ok(Vec::new());
    }
    let mut enc = RangeEncoder::new();
    for c in 0..tensor.channels() as usize {
        let table = &tables[c];
        for &v in tensor.channel(c) {
            enc.encode(table, v as i32)?;
        }
    }
    Ok(enc.finish())
}

/// Inverse of [`encode_tensor`]; the caller supplies the shape from the
/// container header and must regenerate the encoder's tables bit-exactly.
pub fn decode_tensor(
    payload: &[u8],
    shape: (u16, u32, u32),
    alphabet: SymbolAlphabet,
    tables: &[CdfTable],
) -> Result<LatentTensor> {
    check_tables(shape.0 as usize, alphabet, tables)?;
    let count = shape.0 as usize * shape.1 as usize * shape.2 as usize;
    if count == 0 {
        return LatentTensor::new(shape, Vec::new(), alphabet);
    }
    let plane = shape.1 as usize * shape.2 as usize;
    let mut dec = RangeDecoder::new(payload);
    let mut values = Vec::with_capacity(count);
    for c in 0..shape.0 as usize {
        let table = &tables[c];
        for _ in 0..plane {
            values.push(dec.decode(table)? as i16);
        }
    }
    LatentTensor::new(shape, values, alphabet)
}

fn check_tables(channels: usize, alphabet: SymbolAlphabet, tables: &[CdfTable]) -> Result<()> {
    if tables.len() != channels {
        return Err(Error::Shape(format!(
            "{} tables for {channels} channels",
            tables.len()
        )));
    }
    for t in tables {
        if t.alphabet() != alphabet {
            return Err(Error::Parameter(
                "table alphabet does not match tensor alphabet".into(),
            ));
        }
    }
    Ok(())
}
