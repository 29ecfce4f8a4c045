//! Power delay profiles and the processing chain applied to ray-tracing
//! path exports.
//!
//! A [`PowerDelayProfile`] is an ordered set of (excess delay, power) taps.
//! Profiles are built from raw [`MultipathRecord`]s by excess-delay binning,
//! then typically pass through [`PowerDelayProfile::normalize_to_peak`],
//! [`PowerDelayProfile::apply_threshold`], and
//! [`PowerDelayProfile::rezero_delays`] before any statistics are computed.
//! All operations are pure: they take `&self` and return new values, so
//! profiles can be shared and processed in parallel freely.

use crate::error::{Error, Result};

/// Convert a dB (or dBm) quantity to linear power.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert linear power to dB.
#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// One resolved propagation path as reported by a ray tracer: absolute time
/// of arrival, received power, and phase.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathRecord {
    pub path_id: u32,
    /// Absolute time of arrival in seconds.
    pub toa_s: f64,
    /// Received power in dBm.
    pub power_dbm: f64,
    /// Phase in degrees, stored normalized to [0, 360).
    pub phase_deg: f64,
}

impl MultipathRecord {
    pub fn new(path_id: u32, toa_s: f64, power_dbm: f64, phase_deg: f64) -> Result<Self> {
        if !toa_s.is_finite() || toa_s < 0.0 {
            return Err(Error::InvalidToa(toa_s));
        }
        if !power_dbm.is_finite() {
            return Err(Error::InvalidPower(power_dbm));
        }
        if !phase_deg.is_finite() {
            return Err(Error::InvalidPhase(phase_deg));
        }
        Ok(Self {
            path_id,
            toa_s,
            power_dbm,
            phase_deg: phase_deg.rem_euclid(360.0),
        })
    }

    /// Received power as linear milliwatts.
    #[inline]
    pub fn linear_power(&self) -> f64 {
        db_to_linear(self.power_dbm)
    }
}

/// One discrete multipath component of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// Delay in nanoseconds relative to the profile's delay origin.
    pub excess_delay_ns: f64,
    /// Power in dB; the interpretation is given by the owning profile's frame.
    pub power_db: f64,
}

/// Power reference frame of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerFrame {
    /// Tap powers are absolute received powers in dBm.
    AbsoluteDbm,
    /// Tap powers are relative to the strongest tap, which sits at 0 dB.
    PeakRelativeDb,
}

impl PowerFrame {
    pub fn as_str(&self) -> &'static str {
        match self {
            PowerFrame::AbsoluteDbm => "absolute_dbm",
            PowerFrame::PeakRelativeDb => "peak_relative_db",
        }
    }
}

/// How records falling into the same delay bin are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineMode {
    /// Sum linear powers. This is the default: a PDP is a power profile.
    Noncoherent,
    /// Sum complex amplitudes (magnitude from power, angle from phase) and
    /// take the squared magnitude. Bins that fully cancel are dropped.
    Coherent,
}

/// An ordered power delay profile.
///
/// Invariants maintained by all constructors and operations:
/// - at least one tap, delays strictly ascending, all values finite;
/// - in the peak-relative frame the strongest tap is exactly 0 dB;
/// - when a threshold is recorded, every tap power is at or above it.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    taps: Vec<Tap>,
    frame: PowerFrame,
    threshold_db: Option<f64>,
    source_id: String,
}

impl PowerDelayProfile {
    /// Build a profile directly from taps, validating every invariant.
    pub fn new(
        taps: Vec<Tap>,
        frame: PowerFrame,
        threshold_db: Option<f64>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for tap in &taps {
            if !tap.excess_delay_ns.is_finite() || tap.excess_delay_ns < 0.0 {
                return Err(Error::InvalidProfile(format!(
                    "tap delay {} ns is not finite and non-negative",
                    tap.excess_delay_ns
                )));
            }
            if !tap.power_db.is_finite() {
                return Err(Error::InvalidProfile(format!(
                    "tap power {} dB is not finite",
                    tap.power_db
                )));
            }
        }
        if taps
            .windows(2)
            .any(|w| w[1].excess_delay_ns <= w[0].excess_delay_ns)
        {
            return Err(Error::InvalidProfile(
                "tap delays must be strictly ascending".into(),
            ));
        }
        if frame == PowerFrame::PeakRelativeDb {
            let peak = taps.iter().map(|t| t.power_db).fold(f64::MIN, f64::max);
            if peak != 0.0 {
                return Err(Error::InvalidProfile(format!(
                    "peak-relative profile must peak at 0 dB, found {peak} dB"
                )));
            }
        }
        if let Some(threshold) = threshold_db {
            if !threshold.is_finite() || threshold >= 0.0 {
                return Err(Error::InvalidThreshold(threshold));
            }
            if frame != PowerFrame::PeakRelativeDb {
                return Err(Error::InvalidProfile(
                    "threshold recorded on a profile that is not peak-relative".into(),
                ));
            }
            if taps.iter().any(|t| t.power_db < threshold) {
                return Err(Error::InvalidProfile(format!(
                    "tap below the recorded {threshold} dB threshold"
                )));
            }
        }
        Ok(Self {
            taps,
            frame,
            threshold_db,
            source_id: source_id.into(),
        })
    }

    /// Bin raw path records into a profile.
    ///
    /// Each record's excess delay is its TOA minus the earliest TOA in the
    /// set, converted to nanoseconds. Records are assigned to bins of
    /// `bin_width_ns` anchored at zero; every non-empty bin becomes one tap
    /// placed at the bin's power-weighted mean delay, so first/last arrival
    /// timing survives coarse binning. In noncoherent mode the total linear
    /// power of the profile equals the total linear power of the records.
    ///
    /// In coherent mode a bin whose resultant is driven to zero by phase
    /// cancellation is dropped with a warning; if every bin cancels the
    /// result is an `EmptyProfile` error.
    pub fn from_records(
        records: &[MultipathRecord],
        bin_width_ns: f64,
        combine: CombineMode,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !bin_width_ns.is_finite() || bin_width_ns <= 0.0 {
            return Err(Error::InvalidBinWidth(bin_width_ns));
        }

        let first_toa = records
            .iter()
            .map(|r| r.toa_s)
            .fold(f64::INFINITY, f64::min);

        #[derive(Default)]
        struct Bin {
            linear_sum: f64,
            re: f64,
            im: f64,
            delay_weight_sum: f64,
            weight_sum: f64,
        }

        let mut bins: std::collections::BTreeMap<u64, Bin> = std::collections::BTreeMap::new();
        for record in records {
            let excess_ns = (record.toa_s - first_toa) * 1e9;
            let index = (excess_ns / bin_width_ns).floor() as u64;
            let power = record.linear_power();
            let amplitude = power.sqrt();
            let phase_rad = record.phase_deg.to_radians();
            let bin = bins.entry(index).or_default();
            bin.linear_sum += power;
            bin.re += amplitude * phase_rad.cos();
            bin.im += amplitude * phase_rad.sin();
            bin.delay_weight_sum += power * excess_ns;
            bin.weight_sum += power;
        }

        let mut taps = Vec::with_capacity(bins.len());
        for (index, bin) in bins {
            let linear = match combine {
                CombineMode::Noncoherent => bin.linear_sum,
                CombineMode::Coherent => bin.re * bin.re + bin.im * bin.im,
            };
            // A coherent resultant ~30 orders of magnitude below the
            // incoherent sum is numerically complete cancellation.
            if linear <= bin.linear_sum * 1e-30 {
                log::warn!(
                    "coherent cancellation in bin {index} (~{:.3} ns); tap dropped",
                    bin.delay_weight_sum / bin.weight_sum
                );
                continue;
            }
            taps.push(Tap {
                excess_delay_ns: bin.delay_weight_sum / bin.weight_sum,
                power_db: linear_to_db(linear),
            });
        }

        Self::new(taps, PowerFrame::AbsoluteDbm, None, source_id)
    }

    /// Shift all tap powers so the strongest tap sits at exactly 0 dB.
    ///
    /// Delays are unchanged and the operation is idempotent.
    pub fn normalize_to_peak(&self) -> Self {
        let peak = self.peak_power_db();
        let taps = self
            .taps
            .iter()
            .map(|t| Tap {
                excess_delay_ns: t.excess_delay_ns,
                power_db: t.power_db - peak,
            })
            .collect();
        Self {
            taps,
            frame: PowerFrame::PeakRelativeDb,
            threshold_db: self.threshold_db,
            source_id: self.source_id.clone(),
        }
    }

    /// Remove every tap weaker than `threshold_db` (peak-relative).
    ///
    /// Taps exactly at the threshold survive. The peak tap always survives,
    /// so the result is never empty, and re-applying the same threshold is a
    /// no-op. Delays are not re-referenced here; see
    /// [`PowerDelayProfile::rezero_delays`].
    pub fn apply_threshold(&self, threshold_db: f64) -> Result<Self> {
        if !threshold_db.is_finite() || threshold_db >= 0.0 {
            return Err(Error::InvalidThreshold(threshold_db));
        }
        if self.frame != PowerFrame::PeakRelativeDb {
            return Err(Error::NotNormalized);
        }
        let taps: Vec<Tap> = self
            .taps
            .iter()
            .copied()
            .filter(|t| t.power_db >= threshold_db)
            .collect();
        Ok(Self {
            taps,
            frame: self.frame,
            threshold_db: Some(threshold_db),
            source_id: self.source_id.clone(),
        })
    }

    /// Shift all delays so the earliest tap sits at 0 ns.
    ///
    /// Applied after thresholding, this re-references excess delay to the
    /// first *retained* arrival. Pairwise delay differences are preserved.
    pub fn rezero_delays(&self) -> Self {
        let origin = self.taps[0].excess_delay_ns;
        let taps = self
            .taps
            .iter()
            .map(|t| Tap {
                excess_delay_ns: t.excess_delay_ns - origin,
                power_db: t.power_db,
            })
            .collect();
        Self {
            taps,
            frame: self.frame,
            threshold_db: self.threshold_db,
            source_id: self.source_id.clone(),
        }
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn frame(&self) -> PowerFrame {
        self.frame
    }

    pub fn threshold_db(&self) -> Option<f64> {
        self.threshold_db
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    /// Rename the profile; used when deriving reference profiles.
    pub fn with_source_id(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Strongest tap power in the profile's frame.
    pub fn peak_power_db(&self) -> f64 {
        self.taps
            .iter()
            .map(|t| t.power_db)
            .fold(f64::MIN, f64::max)
    }

    /// Sum of tap powers in linear units.
    pub fn total_linear_power(&self) -> f64 {
        self.taps.iter().map(|t| db_to_linear(t.power_db)).sum()
    }

    pub fn min_delay_ns(&self) -> f64 {
        self.taps[0].excess_delay_ns
    }

    pub fn max_delay_ns(&self) -> f64 {
        self.taps[self.taps.len() - 1].excess_delay_ns
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(toa_s: f64, power_dbm: f64, phase_deg: f64) -> MultipathRecord {
        MultipathRecord::new(0, toa_s, power_dbm, phase_deg).unwrap()
    }

    fn profile(taps: &[(f64, f64)], frame: PowerFrame) -> PowerDelayProfile {
        let taps = taps
            .iter()
            .map(|&(d, p)| Tap {
                excess_delay_ns: d,
                power_db: p,
            })
            .collect();
        PowerDelayProfile::new(taps, frame, None, "test").unwrap()
    }

    #[test]
    fn single_record_becomes_zero_delay_tap() {
        let pdp = PowerDelayProfile::from_records(
            &[record(1e-7, -80.0, 30.0)],
            1.0,
            CombineMode::Noncoherent,
            "rx",
        )
        .unwrap();
        assert_eq!(pdp.len(), 1);
        assert_eq!(pdp.taps()[0].excess_delay_ns, 0.0);
        assert!((pdp.taps()[0].power_db - (-80.0)).abs() < 1e-12);
        assert_eq!(pdp.frame(), PowerFrame::AbsoluteDbm);
    }

    #[test]
    fn noncoherent_sum_of_equal_records_gains_3db() {
        let pdp = PowerDelayProfile::from_records(
            &[record(1e-7, -80.0, 0.0), record(1.0002e-7, -80.0, 90.0)],
            1.0,
            CombineMode::Noncoherent,
            "rx",
        )
        .unwrap();
        assert_eq!(pdp.len(), 1);
        // 10*log10(2) above a single -80 dBm path
        assert!((pdp.taps()[0].power_db - (-76.98970004336019)).abs() < 1e-9);
    }

    #[test]
    fn coherent_opposite_phases_cancel() {
        let records = [record(1e-7, -80.0, 0.0), record(1.0002e-7, -80.0, 180.0)];
        let err = PowerDelayProfile::from_records(&records, 1.0, CombineMode::Coherent, "rx")
            .unwrap_err();
        assert!(matches!(err, Error::EmptyProfile));

        // With a surviving path in another bin, only the cancelled bin drops.
        let mut with_extra = records.to_vec();
        with_extra.push(record(1.5e-7, -90.0, 45.0));
        let pdp =
            PowerDelayProfile::from_records(&with_extra, 1.0, CombineMode::Coherent, "rx").unwrap();
        assert_eq!(pdp.len(), 1);
        assert!((pdp.taps()[0].excess_delay_ns - 50.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_in_phase_records_add_amplitudes() {
        let pdp = PowerDelayProfile::from_records(
            &[record(0.0, -80.0, 30.0), record(1e-10, -80.0, 30.0)],
            1.0,
            CombineMode::Coherent,
            "rx",
        )
        .unwrap();
        // equal in-phase amplitudes: power quadruples (+6.02 dB)
        assert!((pdp.taps()[0].power_db - (-80.0 + 20.0 * 2f64.log10())).abs() < 1e-9);
    }

    #[test]
    fn noncoherent_build_conserves_power() {
        let records: Vec<MultipathRecord> = (0..60)
            .map(|i| {
                record(
                    1e-7 + i as f64 * 3.7e-10,
                    -80.0 - (i % 13) as f64,
                    i as f64 * 11.0,
                )
            })
            .collect();
        let pdp =
            PowerDelayProfile::from_records(&records, 2.0, CombineMode::Noncoherent, "rx").unwrap();
        let total_in: f64 = records.iter().map(|r| r.linear_power()).sum();
        let total_out = pdp.total_linear_power();
        assert!(((total_out - total_in) / total_in).abs() < 1e-9);
    }

    #[test]
    fn empty_and_invalid_build_inputs_error() {
        assert!(matches!(
            PowerDelayProfile::from_records(&[], 1.0, CombineMode::Noncoherent, "rx"),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            PowerDelayProfile::from_records(
                &[record(0.0, -80.0, 0.0)],
                0.0,
                CombineMode::Noncoherent,
                "rx"
            ),
            Err(Error::InvalidBinWidth(_))
        ));
    }

    #[test]
    fn normalize_shifts_peak_to_zero() {
        let pdp = profile(&[(0.0, -90.0), (50.0, -93.0)], PowerFrame::AbsoluteDbm);
        let norm = pdp.normalize_to_peak();
        assert_eq!(norm.frame(), PowerFrame::PeakRelativeDb);
        assert_eq!(norm.taps()[0].power_db, 0.0);
        assert_eq!(norm.taps()[1].power_db, -3.0);
        assert_eq!(norm.taps()[0].excess_delay_ns, 0.0);
        assert_eq!(norm.taps()[1].excess_delay_ns, 50.0);
    }

    #[test]
    fn normalize_is_idempotent() {
        let pdp = profile(&[(0.0, -84.0), (10.0, -99.5)], PowerFrame::AbsoluteDbm);
        let once = pdp.normalize_to_peak();
        assert_eq!(once, once.normalize_to_peak());
    }

    #[test]
    fn normalize_single_tap() {
        let pdp = profile(&[(12.0, -117.25)], PowerFrame::AbsoluteDbm);
        let norm = pdp.normalize_to_peak();
        assert_eq!(norm.taps()[0].power_db, 0.0);
        assert_eq!(norm.taps()[0].excess_delay_ns, 12.0);
    }

    #[test]
    fn threshold_drops_weak_taps_and_keeps_boundary() {
        let pdp = profile(
            &[(0.0, 0.0), (100.0, -29.7), (200.0, -31.0)],
            PowerFrame::PeakRelativeDb,
        );
        let out = pdp.apply_threshold(-30.0).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.taps()[1].excess_delay_ns, 100.0);
        assert_eq!(out.threshold_db(), Some(-30.0));
        // idempotent for the same threshold
        assert_eq!(out, out.apply_threshold(-30.0).unwrap());
    }

    #[test]
    fn threshold_noop_when_all_taps_strong() {
        let pdp = profile(&[(0.0, 0.0), (10.0, -5.0)], PowerFrame::PeakRelativeDb);
        let out = pdp.apply_threshold(-30.0).unwrap();
        assert_eq!(out.taps(), pdp.taps());
    }

    #[test]
    fn threshold_single_tap_survives() {
        let pdp = profile(&[(70.0, 0.0)], PowerFrame::PeakRelativeDb);
        let out = pdp.apply_threshold(-30.0).unwrap();
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn threshold_rejects_bad_inputs() {
        let pdp = profile(&[(0.0, 0.0)], PowerFrame::PeakRelativeDb);
        assert!(matches!(
            pdp.apply_threshold(0.0),
            Err(Error::InvalidThreshold(_))
        ));
        assert!(matches!(
            pdp.apply_threshold(3.0),
            Err(Error::InvalidThreshold(_))
        ));
        let absolute = profile(&[(0.0, -80.0)], PowerFrame::AbsoluteDbm);
        assert!(matches!(
            absolute.apply_threshold(-30.0),
            Err(Error::NotNormalized)
        ));
    }

    #[test]
    fn rezero_shifts_by_minimum_delay() {
        let pdp = profile(&[(40.0, 0.0), (90.0, -3.0)], PowerFrame::PeakRelativeDb);
        let out = pdp.rezero_delays();
        assert_eq!(out.taps()[0].excess_delay_ns, 0.0);
        assert_eq!(out.taps()[1].excess_delay_ns, 50.0);

        let already = profile(&[(0.0, 0.0), (5.0, -1.0)], PowerFrame::PeakRelativeDb);
        assert_eq!(already, already.rezero_delays());

        let single = profile(&[(70.0, 0.0)], PowerFrame::PeakRelativeDb);
        assert_eq!(single.rezero_delays().taps()[0].excess_delay_ns, 0.0);
    }

    #[test]
    fn constructor_enforces_invariants() {
        assert!(matches!(
            PowerDelayProfile::new(vec![], PowerFrame::AbsoluteDbm, None, "x"),
            Err(Error::EmptyProfile)
        ));
        let unsorted = vec![
            Tap {
                excess_delay_ns: 10.0,
                power_db: 0.0,
            },
            Tap {
                excess_delay_ns: 5.0,
                power_db: -1.0,
            },
        ];
        assert!(PowerDelayProfile::new(unsorted, PowerFrame::AbsoluteDbm, None, "x").is_err());
        let off_peak = vec![Tap {
            excess_delay_ns: 0.0,
            power_db: -1.0,
        }];
        assert!(PowerDelayProfile::new(off_peak, PowerFrame::PeakRelativeDb, None, "x").is_err());
    }

    #[test]
    fn record_validation_and_phase_wrapping() {
        assert!(matches!(
            MultipathRecord::new(0, -1e-9, -80.0, 0.0),
            Err(Error::InvalidToa(_))
        ));
        assert!(matches!(
            MultipathRecord::new(0, 0.0, f64::NAN, 0.0),
            Err(Error::InvalidPower(_))
        ));
        let wrapped = MultipathRecord::new(0, 0.0, -80.0, -30.0).unwrap();
        assert!((wrapped.phase_deg - 330.0).abs() < 1e-12);
        let full_turn = MultipathRecord::new(0, 0.0, -80.0, 360.0).unwrap();
        assert_eq!(full_turn.phase_deg, 0.0);
    }
}
