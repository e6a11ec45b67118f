//! Byte-oriented range coder with 64-bit state. One output byte is
//! renormalized whenever the range drops below 2^56; carries are resolved
//! through a cached byte and a pending-0xFF counter, so emitted bytes are
//! never rewritten. Identical inputs produce identical bytes.

use crate::coder::table::CdfTable;
use crate::error::Result;

const TOP: u64 = 1 << 56;
const LOW_MASK: u128 = (1u128 << 56) - 1;

pub struct RangeEncoder {
    low: u128,
    range: u64,
    cache: u8,
    cache_valid: bool,
    pending_ff: u64,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        Self {
            low: 0,
            range: u64::MAX,
            cache: 0,
            cache_valid: false,
            pending_ff: 0,
            out: Vec::new(),
        }
    }

    pub fn encode(&mut self, table: &CdfTable, symbol: i32) -> Result<()> {
        let index = table.alphabet().index_of(symbol)?;
        let (lo, hi) = table.bounds(index);
        let total = table.total() as u64;
        let step = self.range / total;
        self.low += (lo as u64 as u128) * (step as u128);
        // The last symbol absorbs the division slack so no code space is
        // wasted.
        self.range = if hi as u64 == total {
            self.range - lo as u64 * step
        } else {
            (hi - lo) as u64 * step
        };
        while self.range < TOP {
            self.shift_low();
            self.range <<= 8;
        }
        Ok(())
    }

    fn shift_low(&mut self) {
        let carry = (self.low >> 64) as u8;
        let top_byte = ((self.low >> 56) & 0xFF) as u8;
        if carry == 1 || top_byte != 0xFF {
            if self.cache_valid {
                self.out.push(self.cache.wrapping_add(carry));
            }
            for _ in 0..self.pending_ff {
                self.out.push(0xFFu8.wrapping_add(carry));
            }
            self.pending_ff = 0;
            self.cache = top_byte;
            self.cache_valid = true;
        } else {
            self.pending_ff += 1;
        }
        self.low = (self.low & LOW_MASK) << 8;
    }

    /// Flush the final state. The emitted tail is the top byte of the lowest
    /// multiple of 2^56 inside the final interval; the decoder zero-pads
    /// beyond the stream end.
    pub fn finish(mut self) -> Vec<u8> {
        debug_assert!(self.range >= TOP);
        let top = TOP as u128;
        self.low = (self.low + top - 1) & !(top - 1);
        self.shift_low();
        self.shift_low();
        self.out
    }
}

pub struct RangeDecoder<'a> {
    data: &'a [u8],
    pos: usize,
    low: u64,
    range: u64,
    code: u64,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        let mut dec = Self {
            data,
            pos: 0,
            low: 0,
            range: u64::MAX,
            code: 0,
        };
        for _ in 0..8 {
            dec.code = (dec.code << 8) | dec.next_byte() as u64;
        }
        dec
    }

    fn next_byte(&mut self) -> u8 {
        let b = self.data.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b
    }

    pub fn decode(&mut self, table: &CdfTable) -> Result<i32> {
        let total = table.total() as u64;
        let step = self.range / total;
        let offset = (self.code.wrapping_sub(self.low) / step).min(total - 1);
        let index = table.index_for(offset as u32);
        let (lo, hi) = table.bounds(index);
        self.low = self.low.wrapping_add(lo as u64 * step);
        self.range = if hi as u64 == total {
            self.range - lo as u64 * step
        } else {
            (hi - lo) as u64 * step
        };
        while self.range < TOP {
            self.code = (self.code << 8) | self.next_byte() as u64;
            self.low <<= 8;
            self.range <<= 8;
        }
        Ok(table.alphabet().symbol_at(index))
    }
}
