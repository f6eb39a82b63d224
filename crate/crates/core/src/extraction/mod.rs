//! Seeded Toeplitz-hash randomness extraction.

mod bits;
mod metadata;
mod toeplitz;

pub use bits::{codes_to_bits, pack_bits, unpack_bits};
pub use metadata::{seed_fingerprint, ExtractionMetadata};
pub use toeplitz::{
    extract_blocks, output_length, toeplitz_extract, toeplitz_extract_naive, ExtractorConfig,
};
