//! Gray-mapped QPSK, nearest-neighbour detection and maximum ratio combining.

use crate::error::{invalid, Error, Result};
use crate::rng::SimRng;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;

/// One of the four QPSK points, encoded as the bit pair `b0 b1`.
///
/// `b0` selects the sign of the quadrature part, `b1` the sign of the
/// in-phase part: `00 → (+1+j)/√2`, `01 → (−1+j)/√2`, `11 → (−1−j)/√2`,
/// `10 → (+1−j)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QpskPoint(u8);

impl QpskPoint {
    pub fn from_bits(b0: u8, b1: u8) -> Result<Self> {
        if b0 > 1 || b1 > 1 {
            return Err(invalid("bits must be 0 or 1"));
        }
        Ok(Self((b0 << 1) | b1))
    }

    pub fn bits(self) -> [u8; 2] {
        [self.0 >> 1, self.0 & 1]
    }

    pub fn symbol(self) -> Complex64 {
        let [b0, b1] = self.bits();
        let re = if b1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
        let im = if b0 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
        Complex64::new(re, im)
    }

    pub fn all() -> [QpskPoint; 4] {
        [QpskPoint(0), QpskPoint(1), QpskPoint(2), QpskPoint(3)]
    }
}

/// A modulated frame: the payload bits and their unit-energy symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    bits: Vec<u8>,
    points: Vec<QpskPoint>,
    symbols: Vec<Complex64>,
}

impl SymbolFrame {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn points(&self) -> &[QpskPoint] {
        &self.points
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    /// Uniform random payload of `len` symbols.
    pub fn random(len: usize, rng: &mut SimRng) -> Self {
        let bits: Vec<u8> = (0..2 * len).map(|_| rng.random_range(0..2u8)).collect();
        qpsk_modulate(&bits).expect("even bit count by construction")
    }
}

pub fn qpsk_modulate(bits: &[u8]) -> Result<SymbolFrame> {
    if !bits.len().is_multiple_of(2) {
        return Err(invalid(format!("QPSK needs an even bit count, got {}", bits.len())));
    }
    let points = bits
        .chunks_exact(2)
        .map(|c| QpskPoint::from_bits(c[0], c[1]))
        .collect::<Result<Vec<_>>>()?;
    let symbols = points.iter().map(|p| p.symbol()).collect();
    Ok(SymbolFrame {
        bits: bits.to_vec(),
        points,
        symbols,
    })
}

/// Nearest constellation point; zero components resolve to the positive side.
pub fn qpsk_demodulate(y: Complex64) -> QpskPoint {
    let b1 = u8::from(y.re < 0.0);
    let b0 = u8::from(y.im < 0.0);
    QpskPoint((b0 << 1) | b1)
}

/// Maximum ratio combining `H^† Y / ‖H‖`.
pub fn mrc_combine(weights: &[Complex64], observations: &[Complex64]) -> Result<Complex64> {
    if weights.is_empty() || weights.len() != observations.len() {
        return Err(Error::LengthMismatch {
            expected: weights.len().max(1),
            actual: observations.len(),
        });
    }
    let norm = weights.iter().map(|h| h.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(invalid("MRC weights are all zero"));
    }
    let acc: Complex64 = weights
        .iter()
        .zip(observations)
        .map(|(h, y)| h.conj() * y)
        .sum();
    Ok(acc / norm)
}

pub fn count_symbol_errors(tx: &SymbolFrame, decisions: &[QpskPoint]) -> Result<usize> {
    if tx.len() != decisions.len() {
        return Err(Error::LengthMismatch {
            expected: tx.len(),
            actual: decisions.len(),
        });
    }
    Ok(tx.points.iter().zip(decisions).filter(|(a, b)| a != b).count())
}

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// QPSK symbol error rate over AWGN at `Eb/No` (linear).
pub fn qpsk_ser_awgn(ebno: f64) -> f64 {
    let q = q_function((2.0 * ebno).sqrt());
    2.0 * q - q * q
}

/// QPSK symbol error rate averaged over Rayleigh fading with unit mean
/// power at average `Eb/No` (linear).
pub fn qpsk_ser_rayleigh(ebno: f64) -> f64 {
    let mu = (ebno / (1.0 + ebno)).sqrt();
    0.75 - 0.5 * mu - mu * mu.atan() / std::f64::consts::PI
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
