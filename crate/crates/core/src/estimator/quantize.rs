//! Fixed-point storage of coefficients with precision growing in the sample size.

use serde::{Deserialize, Serialize};

/// How many fractional bits are kept after observation `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FractionBits {
    /// `ceil(factor * log2(max(i, 2)))`.
    LogScaled {
        factor: f64,
    },
    Fixed(u32),
}

impl Default for FractionBits {
    fn default() -> Self {
        FractionBits::LogScaled { factor: 3.0 }
    }
}

impl FractionBits {
    pub fn at(self, i: u64) -> u32 {
        match self {
            FractionBits::LogScaled { factor } => (factor * (i.max(2) as f64).log2()).ceil() as u32,
            FractionBits::Fixed(bits) => bits,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantization {
    #[serde(default)]
    pub fraction_bits: FractionBits,
    /// Sign and integer-part bits charged per stored coefficient.
    #[serde(default = "default_header_bits")]
    pub header_bits: u32,
}

fn default_header_bits() -> u32 {
    16
}

impl Default for Quantization {
    fn default() -> Self {
        Quantization {
            fraction_bits: FractionBits::default(),
            header_bits: default_header_bits(),
        }
    }
}

impl Quantization {
    /// Bits needed to hold `coefficients` values at the precision used after observation `i`.
    pub fn storage_bits(&self, coefficients: usize, i: u64) -> u64 {
        coefficients as u64 * u64::from(self.fraction_bits.at(i) + self.header_bits)
    }
}

/// `ceil(3 log2(max(i, 2)))`, which keeps per-step round-off at most `i^-3`.
pub fn fraction_bits(i: u64) -> u32 {
    FractionBits::default().at(i)
}

/// Nearest multiple of `2^-bits`, ties to even.
pub fn quantize_value(value: f64, bits: u32) -> f64 {
    let scale = (bits as f64).exp2();
    (value * scale).round_ties_even() / scale
}
