use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::wrap_phase;

/// Per-cycle relative phases, wrapped to [−π, π).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PhaseBatch {
    phases: Vec<f64>,
}

impl PhaseBatch {
    pub fn new(phases: impl IntoIterator<Item = f64>) -> Self {
        Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
        }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircularStats {
    /// R̄ = |⟨exp(iφ)⟩|.
    pub mean_resultant_length: f64,
    /// 1 − R̄.
    pub variance: f64,
    pub mean_direction: f64,
}

pub fn circular_stats(batch: &PhaseBatch) -> Result<CircularStats> {
    let n = batch.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "circular statistics need at least 2 phases, got {n}"
        )));
    }
    let (s, c) = batch
        .phases()
        .iter()
        .fold((0.0, 0.0), |(s, c), p| (s + p.sin(), c + p.cos()));
    let (s, c) = (s / n as f64, c / n as f64);
    let r = s.hypot(c).min(1.0);
    Ok(CircularStats {
        mean_resultant_length: r,
        variance: 1.0 - r,
        mean_direction: s.atan2(c),
    })
}
