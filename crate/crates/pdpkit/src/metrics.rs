//! Delay-domain statistics over a power delay profile.
//!
//! Three statistics are computed on the post-threshold tap set: RMS delay
//! spread (square root of the second central moment of tap delays), mean
//! excess delay (first moment), and effective maximum delay (span of the
//! taps within a power threshold of the peak).
//!
//! Two mean conventions are exposed. `PowerWeighted` is the textbook
//! definition, weighting each delay by its linear tap power; `Unweighted` is
//! the plain arithmetic mean of tap delays, which is the convention that
//! reproduces the published TDL summary figures (e.g. 240 ns x 2.52815 =
//! 606.76 ns for TDL-A). The weighting applies to both the mean and the RMS
//! spread.

use crate::error::{Error, Result};
use crate::profile::{db_to_linear, PowerDelayProfile, PowerFrame, Tap};

/// Weighting convention for the delay moments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMode {
    /// Delays weighted by linear tap power (textbook definition).
    #[default]
    PowerWeighted,
    /// Plain arithmetic mean of tap delays.
    Unweighted,
}

impl std::str::FromStr for MeanMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "power_weighted" | "weighted" => Ok(MeanMode::PowerWeighted),
            "unweighted" => Ok(MeanMode::Unweighted),
            other => Err(format!(
                "unknown mean mode '{other}' (expected power-weighted or unweighted)"
            )),
        }
    }
}

/// Bundle of delay statistics for one profile.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DelayMetrics {
    pub rms_ds_ns: f64,
    pub mean_excess_ns: f64,
    pub mean_mode: MeanMode,
    pub eff_max_ns: f64,
    pub threshold_db: f64,
    pub tap_count: usize,
}

fn moments(taps: &[Tap], mode: MeanMode) -> (f64, f64) {
    // Weights are normalized before accumulation so a single-tap profile
    // yields exactly (delay, 0).
    let weights: Vec<f64> = match mode {
        MeanMode::PowerWeighted => taps.iter().map(|t| db_to_linear(t.power_db)).collect(),
        MeanMode::Unweighted => vec![1.0; taps.len()],
    };
    let total: f64 = weights.iter().sum();
    let mean: f64 = taps
        .iter()
        .zip(&weights)
        .map(|(t, w)| (w / total) * t.excess_delay_ns)
        .sum();
    let variance: f64 = taps
        .iter()
        .zip(&weights)
        .map(|(t, w)| {
            let d = t.excess_delay_ns - mean;
            (w / total) * d * d
        })
        .sum();
    (mean, variance.sqrt())
}

/// First moment of the tap delays under the given weighting.
pub fn mean_excess_delay(pdp: &PowerDelayProfile, mode: MeanMode) -> f64 {
    moments(pdp.taps(), mode).0
}

/// Square root of the second central moment of the tap delays about the
/// corresponding mean.
pub fn rms_delay_spread(pdp: &PowerDelayProfile, mode: MeanMode) -> f64 {
    moments(pdp.taps(), mode).1
}

/// Span of the taps whose power is at or above `threshold_db`, measured from
/// the earliest such tap to the latest.
pub fn effective_max_delay(pdp: &PowerDelayProfile, threshold_db: f64) -> Result<f64> {
    if !threshold_db.is_finite() || threshold_db >= 0.0 {
        return Err(Error::InvalidThreshold(threshold_db));
    }
    if pdp.frame() != PowerFrame::PeakRelativeDb {
        return Err(Error::NotNormalized);
    }
    let mut first = f64::INFINITY;
    let mut last = f64::NEG_INFINITY;
    for tap in pdp.taps().iter().filter(|t| t.power_db >= threshold_db) {
        first = first.min(tap.excess_delay_ns);
        last = last.max(tap.excess_delay_ns);
    }
    // The 0 dB peak always survives a negative threshold.
    Ok(last - first)
}

/// Run the canonical chain on a peak-relative profile and report all
/// statistics from the same surviving tap set: threshold, re-zero delays,
/// then compute the moments and the effective maximum delay.
pub fn summarize(
    pdp: &PowerDelayProfile,
    threshold_db: f64,
    mean_mode: MeanMode,
) -> Result<DelayMetrics> {
    let surviving = pdp.apply_threshold(threshold_db)?.rezero_delays();
    let (mean_excess_ns, rms_ds_ns) = moments(surviving.taps(), mean_mode);
    let eff_max_ns = effective_max_delay(&surviving, threshold_db)?;
    Ok(DelayMetrics {
        rms_ds_ns,
        mean_excess_ns,
        mean_mode,
        eff_max_ns,
        threshold_db,
        tap_count: surviving.len(),
    })
}
