use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::keyed_stream;

/// m = ⌊n·h − 2·log₂(1/ε)⌋, floored at zero (leftover hash lemma).
pub fn output_length(n_bits: usize, h_min_per_bit: f64, epsilon: f64) -> usize {
    let m = n_bits as f64 * h_min_per_bit - 2.0 * (1.0 / epsilon).log2();
    if m <= 0.0 {
        0
    } else {
        m.floor() as usize
    }
}

/// Block extractor parameters: each `n`-bit input block yields `m` bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractorConfig {
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    /// n + m − 1 bits defining the Toeplitz matrix.
    pub seed: Vec<u8>,
}

impl ExtractorConfig {
    pub fn new(n: usize, m: usize, epsilon: f64, seed: Vec<u8>) -> Result<Self> {
        let cfg = Self { n, m, epsilon, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Seed bits drawn from a counter-based stream keyed by `seed_key`.
    pub fn from_key(n: usize, m: usize, epsilon: f64, seed_key: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Config(format!("extractor needs 0 < m <= n, got n={n}, m={m}")));
        }
        let mut rng = keyed_stream(seed_key, 0);
        let seed = (0..n + m - 1).map(|_| rng.gen::<bool>() as u8).collect();
        Self::new(n, m, epsilon, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0 < self.m && self.m <= self.n) {
            return Err(Error::Config(format!(
                "extractor needs 0 < m <= n, got n={}, m={}",
                self.n, self.m
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.seed.len() != self.n + self.m - 1 {
            return Err(Error::LengthMismatch {
                what: "extractor seed bits",
                expected: self.n + self.m - 1,
                actual: self.seed.len(),
            });
        }
        if self.seed.iter().any(|&b| b > 1) {
            return Err(Error::Config("extractor seed must contain only 0/1".into()));
        }
        Ok(())
    }
}

fn check_lengths(input: &[u8], seed: &[u8], m: usize) -> Result<()> {
    let n = input.len();
    if m == 0 || n == 0 {
        return Err(Error::Config(format!("extractor needs n, m > 0, got n={n}, m={m}")));
    }
    if seed.len() != n + m - 1 {
        return Err(Error::LengthMismatch {
            what: "extractor seed bits",
            expected: n + m - 1,
            actual: seed.len(),
        });
    }
    Ok(())
}

/// Reference product T·x over GF(2) with T[i][j] = seed[m − 1 − i + j]:
/// first column seed[m−1], …, seed[0] and first row seed[m−1 … n+m−2].
pub fn toeplitz_extract_naive(input: &[u8], seed: &[u8], m: usize) -> Result<Vec<u8>> {
    check_lengths(input, seed, m)?;
    Ok((0..m)
        .map(|i| {
            input
                .iter()
                .enumerate()
                .fold(0u8, |acc, (j, &x)| acc ^ (seed[m - 1 - i + j] & x & 1))
        })
        .collect())
}

fn pack_words(bits: &[u8], extra_words: usize) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64) + extra_words];
    for (i, &b) in bits.iter().enumerate() {
        words[i / 64] |= ((b & 1) as u64) << (i % 64);
    }
    words
}

/// Word-parallel T·x: row i is the seed window starting at m − 1 − i,
/// so each output bit is the parity of (window AND x).
pub fn toeplitz_extract(input: &[u8], seed: &[u8], m: usize) -> Result<Vec<u8>> {
    check_lengths(input, seed, m)?;
    let x = pack_words(input, 0);
    let s = pack_words(seed, 1);
    Ok((0..m)
        .map(|i| {
            let start = m - 1 - i;
            let (w0, sh) = (start / 64, start % 64);
            let mut acc = 0u64;
            for (k, &xk) in x.iter().enumerate() {
                let lo = s[w0 + k] >> sh;
                let win = if sh == 0 { lo } else { lo | (s[w0 + k + 1] << (64 - sh)) };
                acc ^= win & xk;
            }
            (acc.count_ones() & 1) as u8
        })
        .collect())
}

/// Extracts every complete n-bit block of `bits` with the same seed; a
/// trailing partial block is dropped. Output order follows input order.
pub fn extract_blocks(bits: &[u8], config: &ExtractorConfig) -> Result<Vec<u8>> {
    config.validate()?;
    let blocks: Vec<Vec<u8>> = bits
        .par_chunks_exact(config.n)
        .map(|block| toeplitz_extract(block, &config.seed, config.m))
        .collect::<Result<_>>()?;
    Ok(blocks.concat())
}
