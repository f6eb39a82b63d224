//! Repeated batches from one configuration: per-batch digitized histograms
//! and pairwise two-sample KS distances.

use std::path::Path;

use serde::Serialize;

use qes_core::analysis::{arcsine_ks, circular_stats, code_histogram, ks_two_sample, min_entropy, KsResult};
use qes_core::pipeline::{run_pulses, PipelineConfig};
use qes_core::rng::derive_seed;
use qes_core::Result;

use crate::config::ExperimentConfig;
use crate::output::{write_gnuplot, CsvWriter, Field};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub seed: u64,
    pub pulses: usize,
    pub arcsine_distance: f64,
    pub arcsine_p_value: f64,
    pub circular_variance: Option<f64>,
    pub min_entropy: f64,
    #[serde(skip)]
    pub counts: Vec<u64>,
    #[serde(skip)]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseKs {
    pub a: usize,
    pub b: usize,
    pub result: KsResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramStability {
    pub bits: u32,
    /// Digitizer range shared by all batches (set by the first one unless
    /// configured).
    pub full_scale: [f64; 2],
    pub batches: Vec<BatchSummary>,
    pub pairwise: Vec<PairwiseKs>,
}

impl HistogramStability {
    pub fn min_pairwise_p(&self) -> f64 {
        self.pairwise.iter().map(|p| p.result.p_value).fold(1.0, f64::min)
    }
}

pub fn run_histogram_stability(cfg: &ExperimentConfig) -> Result<HistogramStability> {
    let hs = &cfg.histogram_stability;
    let mut pipe: PipelineConfig = cfg.pipeline.clone();
    let bits = pipe.detection.digitizer.bits;
    let mut batches = Vec::with_capacity(hs.batches);
    let mut full_scale = pipe.detection.digitizer.full_scale;
    for b in 0..hs.batches {
        let mut sim = cfg.sim.clone();
        sim.grid.seed = derive_seed(cfg.experiment_seed(), "batch", b as u64);
        let out = run_pulses(&sim, &pipe, hs.batch_pulses)?;
        if full_scale.is_none() {
            let fs = [out.quantizer.v_min, out.quantizer.v_max];
            full_scale = Some(fs);
            pipe.detection.digitizer.full_scale = Some(fs);
        }
        let fit = arcsine_ks(&out.in_pulse.values)?;
        let counts = code_histogram(out.codes(), bits);
        batches.push(BatchSummary {
            seed: sim.grid.seed,
            pulses: out.in_pulse.len(),
            arcsine_distance: fit.distance,
            arcsine_p_value: fit.p_value,
            circular_variance: out.phases().map(|p| circular_stats(&p)).transpose()?.map(|c| c.variance),
            min_entropy: min_entropy(&counts, bits)?,
            counts,
            values: out.in_pulse.values,
        });
    }
    let mut pairwise = Vec::new();
    for a in 0..batches.len() {
        for b in a + 1..batches.len() {
            pairwise.push(PairwiseKs {
                a,
                b,
                result: ks_two_sample(&batches[a].values, &batches[b].values)?,
            });
        }
    }
    Ok(HistogramStability {
        bits,
        full_scale: full_scale.expect("set by the first batch"),
        batches,
        pairwise,
    })
}

pub fn write_histogram_stability(hs: &HistogramStability, dir: &Path, plot: bool) -> Result<()> {
    let mut header = vec!["code".to_string(), "level_low_au".to_string(), "level_high_au".to_string()];
    header.extend((0..hs.batches.len()).map(|b| format!("batch_{b}_count")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = CsvWriter::create(&dir.join("histograms.csv"), &header_refs)?;
    let levels = 1usize << hs.bits;
    let step = (hs.full_scale[1] - hs.full_scale[0]) / levels as f64;
    for code in 0..levels {
        let mut row = vec![
            Field::U(code as u64),
            Field::F(hs.full_scale[0] + step * code as f64),
            Field::F(hs.full_scale[0] + step * (code + 1) as f64),
        ];
        row.extend(hs.batches.iter().map(|b| Field::U(b.counts[code])));
        w.row(&row)?;
    }
    w.finish()?;

    let mut w = CsvWriter::create(
        &dir.join("batches.csv"),
        &[
            "batch",
            "seed",
            "pulses",
            "arcsine_ks_distance",
            "arcsine_ks_p_value",
            "circular_variance",
            "min_entropy_bits_per_sample",
        ],
    )?;
    for (i, b) in hs.batches.iter().enumerate() {
        w.row(&[
            Field::U(i as u64),
            Field::U(b.seed),
            Field::U(b.pulses as u64),
            Field::F(b.arcsine_distance),
            Field::F(b.arcsine_p_value),
            Field::Opt(b.circular_variance),
            Field::F(b.min_entropy),
        ])?;
    }
    w.finish()?;

    let mut w = CsvWriter::create(&dir.join("pairwise_ks.csv"), &["batch_a", "batch_b", "ks_distance", "p_value"])?;
    for p in &hs.pairwise {
        w.row(&[
            Field::U(p.a as u64),
            Field::U(p.b as u64),
            Field::F(p.result.distance),
            Field::F(p.result.p_value),
        ])?;
    }
    w.finish()?;

    if plot {
        let series: Vec<(usize, usize, String)> =
            (0..hs.batches.len()).map(|b| (1, 4 + b, format!("batch {b}"))).collect();
        let refs: Vec<(usize, usize, &str)> = series.iter().map(|(x, y, t)| (*x, *y, t.as_str())).collect();
        write_gnuplot(&dir.join("histograms.gp"), "histograms.csv", "code", "counts", &refs, "steps")?;
    }
    Ok(())
}
