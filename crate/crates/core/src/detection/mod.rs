//! Detection chain: MMI combiner, photodiode and scope bandwidth, RF
//! amplifier, digitizer and per-pulse sampling.

mod amplifier;
mod beat;
mod chain;
mod digitizer;
mod filter;
mod io;
mod sampler;
mod trace;

pub use amplifier::{amplify, AmplifierSpec};
pub use beat::{estimate_nzd, instantaneous_beat_frequency, FrequencyPoint};
pub use chain::{DetectionChain, DetectionConfig, Port};
pub use digitizer::{digitize, resample, DigitizedTrace, DigitizerSpec, Quantizer};
pub use filter::{apply_filter, FilterCascade, FilterKind, FilterSpec};
pub use io::{read_packed_codes, write_packed_codes, write_sample_csv, PackedCodes};
pub use sampler::{sample_at, sample_per_pulse, Interpolation, SampleBatch, SamplingPolicy};
pub use trace::{beat_intensity_model, mmi_combine, trace_from_trajectory, AnalogTrace};
