//! End-to-end bit generation: simulate, digitize, estimate the min-entropy on
//! a calibration split, then hash the rest with a Toeplitz extractor.

use std::path::Path;

use serde::Serialize;

use qes_core::analysis::{code_histogram, min_entropy};
use qes_core::detection::write_packed_codes;
use qes_core::extraction::{codes_to_bits, extract_blocks, output_length, pack_bits, ExtractionMetadata, ExtractorConfig};
use qes_core::pipeline::run_pulses;
use qes_core::rng::derive_seed;
use qes_core::{Error, Result};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generated {
    pub metadata: ExtractionMetadata,
    /// Extracted bits, one per byte.
    #[serde(skip)]
    pub bits: Vec<u8>,
    #[serde(skip)]
    pub codes: Vec<u16>,
}

pub fn run_generate(cfg: &ExperimentConfig) -> Result<Generated> {
    let g = &cfg.generate;
    let mut sim = cfg.sim.clone();
    sim.grid.seed = cfg.experiment_seed();
    let out = run_pulses(&sim, &cfg.pipeline, g.pulses)?;
    let bits_per_sample = cfg.pipeline.detection.digitizer.bits;
    let codes = out.codes();
    let (calibration, input) = codes.split_at(g.calibration_pulses);

    let h = min_entropy(&code_histogram(calibration, bits_per_sample), bits_per_sample)?;
    if h < g.min_entropy_floor {
        return Err(Error::LowEntropy {
            estimated: h,
            floor: g.min_entropy_floor,
        });
    }
    let h_per_bit = h / f64::from(bits_per_sample);
    let m = output_length(g.block_bits, h_per_bit, g.epsilon);
    if m == 0 {
        return Err(Error::Config(format!(
            "a {}-bit block at {h_per_bit:.4} bits of min-entropy per bit leaves no output at epsilon = {:e}",
            g.block_bits, g.epsilon
        )));
    }
    let extractor = ExtractorConfig::from_key(
        g.block_bits,
        m,
        g.epsilon,
        derive_seed(cfg.experiment_seed(), "extractor", 0),
    )?;
    let raw = codes_to_bits(input, bits_per_sample);
    let bits = extract_blocks(&raw, &extractor)?;
    let metadata = ExtractionMetadata::describe(&extractor, bits_per_sample, h, calibration.len(), input.len(), bits.len());
    Ok(Generated {
        metadata,
        bits,
        codes: codes.to_vec(),
    })
}

pub fn write_generated(gen: &Generated, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::write(dir.join("random.bin"), pack_bits(&gen.bits))?;
    gen.metadata.write_json(&dir.join("random.json"))?;
    if cfg.generate.write_codes {
        write_packed_codes(&dir.join("codes.qesc"), cfg.pipeline.detection.digitizer.bits, &gen.codes)?;
    }
    Ok(())
}
