use crate::error::{Error, Result};

/// Inclusive integer range of codable symbols.
///
/// Quantized latents are clamped into this range before coding, so the
/// alphabet is exhaustive by construction. The bounds must fit in `i16`
/// because that is how they travel in file headers, which also caps the
/// span at 2^16 symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolAlphabet {
    min: i32,
    max: i32,
}

impl SymbolAlphabet {
    pub const MAX_SPAN: usize = 1 << 16;

    pub fn new(min: i32, max: i32) -> Result<Self> {
        if min >= max {
            return Err(Error::Parameter(format!(
                "alphabet min {min} must be below max {max}"
            )));
        }
        if min < i16::MIN as i32 || max > i16::MAX as i32 {
            return Err(Error::Parameter(format!(
                "alphabet [{min}, {max}] does not fit in i16 bounds"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> i32 {
        self.min
    }

    pub fn max(&self) -> i32 {
        self.max
    }

    /// Number of symbols in the alphabet.
    pub fn span(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn contains(&self, symbol: i32) -> bool {
        symbol >= self.min && symbol <= self.max
    }

    pub fn index_of(&self, symbol: i32) -> Result<usize> {
        if !self.contains(symbol) {
            return Err(Error::OutOfAlphabet {
                symbol,
                min: self.min,
                max: self.max,
            });
        }
        Ok((symbol - self.min) as usize)
    }

    pub fn symbol_at(&self, index: usize) -> i32 {
        debug_assert!(index < self.span());
        self.min + index as i32
    }

    pub fn symbols(&self) -> impl Iterator<Item = i32> {
        self.min..=self.max
    }

    pub fn clamp(&self, symbol: i32) -> i32 {
        symbol.clamp(self.min, self.max)
    }
}
