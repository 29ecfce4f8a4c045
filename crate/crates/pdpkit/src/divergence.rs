//! KL divergence between power delay profiles.
//!
//! Two profiles are compared by resampling both onto a shared delay grid,
//! linearizing powers, converting to probability mass with an epsilon floor
//! (so disjoint supports yield a finite value), and evaluating
//! `D(P || Q) = sum_i p_i * log2(p_i / q_i)` in bits, with the site-specific
//! profile as the reference `P`.
//!
//! `BinAccumulate` assigns each tap's full linear power to its nearest grid
//! bin; it conserves mass and makes `D(P || P) = 0` exact. `LinearInterp`
//! evaluates a piecewise-linear interpolant of the linear powers at bin
//! centers instead, which spreads mass across gaps and is renormalized
//! downstream.

use crate::error::{Error, Result};
use crate::profile::{db_to_linear, PowerDelayProfile, PowerFrame};

/// Uniform delay grid; bin `i` is centered at `start_ns + i * step_ns`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DelayGrid {
    pub start_ns: f64,
    pub step_ns: f64,
    pub n_bins: usize,
}

impl DelayGrid {
    pub fn new(start_ns: f64, step_ns: f64, n_bins: usize) -> Result<Self> {
        if !start_ns.is_finite() {
            return Err(Error::InvalidGrid(format!("non-finite start {start_ns}")));
        }
        if !step_ns.is_finite() || step_ns <= 0.0 {
            return Err(Error::InvalidGrid(format!("non-positive step {step_ns}")));
        }
        if n_bins < 2 {
            return Err(Error::InvalidGrid(format!("{n_bins} bins (need >= 2)")));
        }
        Ok(Self {
            start_ns,
            step_ns,
            n_bins,
        })
    }

    /// Smallest grid with the given step whose centers span the union of the
    /// two profiles' delay supports.
    pub fn covering(a: &PowerDelayProfile, b: &PowerDelayProfile, step_ns: f64) -> Result<Self> {
        let start = a.min_delay_ns().min(b.min_delay_ns());
        let end = a.max_delay_ns().max(b.max_delay_ns());
        if !step_ns.is_finite() || step_ns <= 0.0 {
            return Err(Error::InvalidGrid(format!("non-positive step {step_ns}")));
        }
        let n = ((end - start) / step_ns).ceil() as usize + 1;
        Self::new(start, step_ns, n.max(2))
    }

    /// Center of bin `i` in nanoseconds.
    pub fn center(&self, i: usize) -> f64 {
        self.start_ns + i as f64 * self.step_ns
    }

    /// Center of the last bin.
    pub fn end_ns(&self) -> f64 {
        self.center(self.n_bins - 1)
    }

    fn nearest_bin(&self, delay_ns: f64) -> Option<usize> {
        let idx = ((delay_ns - self.start_ns) / self.step_ns).round();
        if idx < 0.0 || idx > (self.n_bins - 1) as f64 {
            None
        } else {
            Some(idx as usize)
        }
    }
}

/// How tap powers are mapped onto the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMethod {
    /// Nearest-bin accumulation of linear tap powers (mass preserving).
    BinAccumulate,
    /// Piecewise-linear interpolation of linear power at bin centers.
    LinearInterp,
}

impl std::str::FromStr for ResampleMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "bin_accumulate" | "accumulate" => Ok(ResampleMethod::BinAccumulate),
            "linear_interp" | "interp" => Ok(ResampleMethod::LinearInterp),
            other => Err(format!(
                "unknown resample method '{other}' (expected bin-accumulate or linear-interp)"
            )),
        }
    }
}

/// Linearize a profile's tap powers and lay them out on `grid`.
pub fn resample(
    pdp: &PowerDelayProfile,
    grid: &DelayGrid,
    method: ResampleMethod,
) -> Result<Vec<f64>> {
    let (lo, hi) = (pdp.min_delay_ns(), pdp.max_delay_ns());
    if lo < grid.start_ns || hi > grid.end_ns() {
        let outside = if lo < grid.start_ns { lo } else { hi };
        return Err(Error::GridTooSmall {
            delay_ns: outside,
            start_ns: grid.start_ns,
            end_ns: grid.end_ns(),
        });
    }

    let mut values = vec![0.0; grid.n_bins];
    match method {
        ResampleMethod::BinAccumulate => {
            for tap in pdp.taps() {
                let idx = grid
                    .nearest_bin(tap.excess_delay_ns)
                    .expect("coverage checked above");
                values[idx] += db_to_linear(tap.power_db);
            }
        }
        ResampleMethod::LinearInterp => {
            let taps = pdp.taps();
            for (i, value) in values.iter_mut().enumerate() {
                let x = grid.center(i);
                if x < lo || x > hi {
                    continue;
                }
                // first tap at or beyond x
                let right = taps.partition_point(|t| t.excess_delay_ns < x);
                if right < taps.len() && taps[right].excess_delay_ns == x {
                    *value = db_to_linear(taps[right].power_db);
                } else {
                    let a = &taps[right - 1];
                    let b = &taps[right];
                    let frac = (x - a.excess_delay_ns) / (b.excess_delay_ns - a.excess_delay_ns);
                    let pa = db_to_linear(a.power_db);
                    let pb = db_to_linear(b.power_db);
                    *value = pa + frac * (pb - pa);
                }
            }
        }
    }
    Ok(values)
}

/// A floored, normalized probability mass function over grid bins.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMass {
    masses: Vec<f64>,
    epsilon: f64,
}

impl ProbabilityMass {
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

/// Floor each value at `epsilon` times the total, then renormalize to sum 1.
///
/// Flooring before renormalization keeps every mass strictly positive, so a
/// downstream KL evaluation is always finite; the exact post-normalization
/// lower bound is `epsilon / (1 + n * epsilon)`.
pub fn to_probability(values: &[f64], epsilon: f64) -> Result<ProbabilityMass> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidProfile(
            "resampled values must be finite and non-negative".into(),
        ));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let floor = epsilon * total;
    let floored: Vec<f64> = values.iter().map(|v| v.max(floor)).collect();
    let new_total: f64 = floored.iter().sum();
    Ok(ProbabilityMass {
        masses: floored.into_iter().map(|v| v / new_total).collect(),
        epsilon,
    })
}

/// `sum_i p_i * log2(p_i / q_i)`; requires both masses on the same grid.
pub fn kl_bits(p: &ProbabilityMass, q: &ProbabilityMass) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::IncompatibleSupports(p.len(), q.len()));
    }
    Ok(p.masses
        .iter()
        .zip(&q.masses)
        .map(|(&pi, &qi)| pi * (pi / qi).log2())
        .sum())
}

/// Options for a profile-to-profile comparison.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct CompareOptions {
    pub step_ns: f64,
    pub epsilon: f64,
    pub method: ResampleMethod,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            step_ns: 1.0,
            epsilon: 1e-10,
            method: ResampleMethod::BinAccumulate,
        }
    }
}

/// Divergence result with the grid and flooring that produced it, so batch
/// rows are self-describing.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KlResult {
    pub bits: f64,
    pub grid: DelayGrid,
    pub epsilon: f64,
    pub reference_id: String,
    pub approx_id: String,
}

/// Compare two peak-relative profiles: build the union grid, resample both,
/// convert to probabilities, and return `D(reference || approx)` in bits.
pub fn compare(
    reference: &PowerDelayProfile,
    approx: &PowerDelayProfile,
    options: &CompareOptions,
) -> Result<KlResult> {
    if reference.frame() != PowerFrame::PeakRelativeDb
        || approx.frame() != PowerFrame::PeakRelativeDb
    {
        return Err(Error::NotNormalized);
    }
    let grid = DelayGrid::covering(reference, approx, options.step_ns)?;
    let p = to_probability(
        &resample(reference, &grid, options.method)?,
        options.epsilon,
    )?;
    let q = to_probability(&resample(approx, &grid, options.method)?, options.epsilon)?;
    let bits = kl_bits(&p, &q)?;
    Ok(KlResult {
        // KL is non-negative; clamp the sub-ulp negatives fp summation can
        // produce for near-identical inputs.
        bits: bits.max(0.0),
        grid,
        epsilon: options.epsilon,
        reference_id: reference.source_id().to_string(),
        approx_id: approx.source_id().to_string(),
    })
}
