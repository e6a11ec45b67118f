use crate::alphabet::SymbolAlphabet;
use crate::entropy::DiscreteDistribution;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u8 = 16;
pub const MIN_PRECISION_BITS: u8 = 8;
pub const MAX_PRECISION_BITS: u8 = 16;

/// Fixed-point cumulative frequency table, the coder's normative interface.
/// Frequencies sum exactly to 2^precision_bits and every symbol keeps a
/// frequency of at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdfTable {
    alphabet: SymbolAlphabet,
    cumulative: Vec<u32>,
    precision_bits: u8,
}

impl CdfTable {
    /// Apportion `2^precision_bits` frequency units proportionally to the
    /// distribution via largest remainders, ties broken toward the lower
    /// symbol index.
    pub fn build(dist: &DiscreteDistribution, precision_bits: u8) -> Result<Self> {
        if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&precision_bits) {
            return Err(Error::Parameter(format!(
                "precision_bits must be in [{MIN_PRECISION_BITS}, {MAX_PRECISION_BITS}], got {precision_bits}"
            )));
        }
        let alphabet = dist.alphabet();
        let span = alphabet.span();
        let total: u64 = 1 << precision_bits;
        if span as u64 >= total {
            return Err(Error::Capacity {
                span,
                precision: precision_bits,
            });
        }

        let probs = dist.probs();
        let mut freqs: Vec<u64> = Vec::with_capacity(span);
        let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(span);
        let mut assigned: u64 = 0;
        for (i, p) in probs.iter().enumerate() {
            let ideal = p * total as f64;
            let base = ideal.floor() as u64;
            freqs.push(base);
            assigned += base;
            remainders.push((ideal - base as f64, i));
        }
        // Hand out the leftover units by descending remainder; equal
        // remainders go to the lower index first.
        let mut leftover = total as i64 - assigned as i64;
        remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let mut r = 0;
        while leftover > 0 {
            freqs[remainders[r % span].1] += 1;
            leftover -= 1;
            r += 1;
        }
        // Rounding up can overshoot; take units back from the largest bins.
        while leftover < 0 {
            let (j, _) = freqs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .unwrap();
            debug_assert!(freqs[j] > 1);
            freqs[j] -= 1;
            leftover += 1;
        }
        // Lift zero-frequency bins to 1, stealing from the largest bin.
        for i in 0..span {
            while freqs[i] == 0 {
                let (j, _) = freqs
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .unwrap();
                freqs[j] -= 1;
                freqs[i] += 1;
            }
        }

        let mut cumulative = Vec::with_capacity(span + 1);
        let mut acc: u64 = 0;
        cumulative.push(0);
        for f in &freqs {
            acc += f;
            cumulative.push(acc as u32);
        }
        debug_assert_eq!(acc, total);
        Ok(Self {
            alphabet,
            cumulative,
            precision_bits,
        })
    }

    pub fn alphabet(&self) -> SymbolAlphabet {
        self.alphabet
    }

    pub fn precision_bits(&self) -> u8 {
        self.precision_bits
    }

    pub fn total(&self) -> u32 {
        1 << self.precision_bits
    }

    /// Cumulative bounds (low, high) of the symbol at `index`.
    pub fn bounds(&self, index: usize) -> (u32, u32) {
        (self.cumulative[index], self.cumulative[index + 1])
    }

    pub fn freq(&self, index: usize) -> u32 {
        self.cumulative[index + 1] - self.cumulative[index]
    }

    /// Index of the symbol whose cumulative interval contains `value`.
    pub fn index_for(&self, value: u32) -> usize {
        debug_assert!(value < self.total());
        // First index whose upper bound exceeds value.
        self.cumulative[1..].partition_point(|&c| c <= value)
    }

    /// Fixed-point code length of the symbol at `index`, in bits.
    pub fn bits(&self, index: usize) -> f64 {
        -(self.freq(index) as f64 / self.total() as f64).log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(probs: Vec<f64>) -> DiscreteDistribution {
        let alphabet = SymbolAlphabet::new(0, probs.len() as i32 - 1).unwrap();
        DiscreteDistribution::from_probs(alphabet, probs).unwrap()
    }

    #[test]
    fn uniform_divides_exactly() {
        let t = CdfTable::build(&dist(vec![0.25; 4]), 8).unwrap();
        for i in 0..4 {
            assert_eq!(t.freq(i), 64);
        }
        assert_eq!(t.total(), 256);
    }

    #[test]
    fn tiny_probability_keeps_frequency_one() {
        let t = CdfTable::build(&dist(vec![0.5, 0.5, 1e-12]), 8).unwrap();
        assert!(t.freq(2) >= 1);
        assert_eq!(t.freq(0) + t.freq(1) + t.freq(2), 256);
    }

    #[test]
    fn capacity_error_when_span_too_large() {
        let alphabet = SymbolAlphabet::new(0, 255).unwrap();
        let d = DiscreteDistribution::from_probs(alphabet, vec![1.0; 256]).unwrap();
        assert!(matches!(
            CdfTable::build(&d, 8),
            Err(Error::Capacity { .. })
        ));
        assert!(CdfTable::build(&d, 9).is_ok());
    }

    #[test]
    fn precision_domain_is_enforced() {
        let d = dist(vec![0.5, 0.5]);
        assert!(CdfTable::build(&d, 7).is_err());
        assert!(CdfTable::build(&d, 17).is_err());
    }

    #[test]
    fn index_lookup_matches_bounds() {
        let t = CdfTable::build(&dist(vec![0.1, 0.6, 0.3]), 12).unwrap();
        for i in 0..3 {
            let (lo, hi) = t.bounds(i);
            assert_eq!(t.index_for(lo), i);
            assert_eq!(t.index_for(hi - 1), i);
        }
    }

    #[test]
    fn ties_go_to_the_lower_symbol() {
        // Four bins of 0.25 at 9 bits: 512/4 divides exactly; perturb so two
        // equal remainders compete for one leftover unit.
        let t = CdfTable::build(&dist(vec![0.3, 0.3, 0.2, 0.2]), 8).unwrap();
        // ideals: 76.8, 76.8, 51.2, 51.2 -> bases 76,76,51,51 = 254, two left
        // over; both go to the 0.8 remainders, lower indices first.
        assert_eq!(t.freq(0), 77);
        assert_eq!(t.freq(1), 77);
        assert_eq!(t.freq(2), 51);
        assert_eq!(t.freq(3), 51);
    }

    #[test]
    fn apportionment_error_bound_small_alphabets() {
        // Exhaustive-ish sweep of random distributions; the largest-remainder
        // deviation bound is |freq/T - p| <= (span + 1) / T.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for span in 2..=9 {
            for _ in 0..200 {
                let raw: Vec<f64> = (0..span).map(|_| next() + 1e-9).collect();
                let d = dist(raw);
                let t = CdfTable::build(&d, 10).unwrap();
                let total = t.total() as f64;
                for i in 0..span as usize {
                    let err = (t.freq(i) as f64 / total - d.probs()[i]).abs();
                    assert!(err <= (span as f64 + 1.0) / total);
                }
            }
        }
    }
}
