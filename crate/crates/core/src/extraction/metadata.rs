use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::bits::pack_bits;
use super::toeplitz::ExtractorConfig;
use crate::error::{Error, Result};

/// SHA-256 of the packed seed bits, hex encoded.
pub fn seed_fingerprint(seed: &[u8]) -> String {
    let digest = Sha256::digest(pack_bits(seed));
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Sidecar record written next to an extracted bitstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionMetadata {
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub bits_per_sample: u32,
    pub min_entropy_per_sample: f64,
    pub min_entropy_per_bit: f64,
    pub calibration_samples: usize,
    pub input_samples: usize,
    pub blocks: usize,
    pub output_bits: usize,
    pub bit_order: String,
    pub seed_sha256: String,
}

impl ExtractionMetadata {
    pub fn describe(
        config: &ExtractorConfig,
        bits_per_sample: u32,
        min_entropy_per_sample: f64,
        calibration_samples: usize,
        input_samples: usize,
        output_bits: usize,
    ) -> Self {
        Self {
            n: config.n,
            m: config.m,
            epsilon: config.epsilon,
            bits_per_sample,
            min_entropy_per_sample,
            min_entropy_per_bit: min_entropy_per_sample / bits_per_sample as f64,
            calibration_samples,
            input_samples,
            blocks: output_bits / config.m,
            output_bits,
            bit_order: "lsb-first".into(),
            seed_sha256: seed_fingerprint(&config.seed),
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_is_sha256_of_packed_seed() {
        // SHA-256 of the single byte 0x05
        assert_eq!(
            seed_fingerprint(&[1, 0, 1]),
            "e77b9a9ae9e30b0dbdb6f510a264ef9de781501d7b6b92ae89eb059c5ab743db"
        );
    }

    #[test]
    fn json_round_trip() {
        let cfg = ExtractorConfig::from_key(64, 32, 1e-6, 9).unwrap();
        let md = ExtractionMetadata::describe(&cfg, 8, 4.6, 1000, 4000, 3200);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        md.write_json(&p).unwrap();
        assert_eq!(ExtractionMetadata::read_json(&p).unwrap(), md);
        assert_eq!(md.blocks, 100);
    }
}
