//! Batch runner and report emission.
//!
//! A batch run turns canonical path CSV files into one report per
//! transmitter, mirroring the receiver-table layout of the comparison
//! study: per receiver, the delay statistics of the thresholded
//! site-specific profile plus its KL divergence against each selected TDL
//! model at the scenario's preset delay spread.
//!
//! Data files are a pure function of inputs and configuration; the only
//! file carrying run metadata (timestamp, tool version) is the
//! `run_metadata.json` sidecar, so repeated runs produce byte-identical
//! reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::divergence::{compare, CompareOptions};
use crate::error::{Error, Result};
use crate::ingest::{parse_paths_csv, PathDataset};
use crate::metrics::{effective_max_delay, mean_excess_delay, rms_delay_spread, MeanMode};
use crate::profile::{CombineMode, PowerDelayProfile};
use crate::tdl::{preset_ds, scaled_profile, Scenario, TdlModel};

/// Batch configuration, loaded from a TOML file.
///
/// ```toml
/// inputs = ["o2i_tx1.csv", "i2i_tx.csv"]
/// output_dir = "reports"
/// threshold_db = -30.0        # default
/// bin_width_ns = 1.0          # default
/// mean_mode = "power_weighted"
/// models = ["A", "B", "C"]
///
/// [scenarios]                 # one entry per transmitter id
/// O2I_Tx1 = "umi_o2i"
/// I2I_Tx = "i2i"
///
/// [kl]
/// step_ns = 1.0
/// epsilon = 1e-10
/// method = "bin_accumulate"
/// ```
#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    #[serde(default = "default_threshold_db")]
    pub threshold_db: f64,
    #[serde(default = "default_bin_width_ns")]
    pub bin_width_ns: f64,
    #[serde(default)]
    pub mean_mode: MeanMode,
    #[serde(default = "default_models")]
    pub models: Vec<TdlModel>,
    pub scenarios: BTreeMap<String, Scenario>,
    #[serde(default)]
    pub kl: CompareOptions,
}

fn default_threshold_db() -> f64 {
    -30.0
}

fn default_bin_width_ns() -> f64 {
    1.0
}

fn default_models() -> Vec<TdlModel> {
    TdlModel::ALL.to_vec()
}

impl BatchConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: BatchConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Config("inputs must not be empty".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("models must not be empty".into()));
        }
        if !self.threshold_db.is_finite() || self.threshold_db >= 0.0 {
            return Err(Error::Config(format!(
                "threshold_db {} must be negative",
                self.threshold_db
            )));
        }
        if !self.bin_width_ns.is_finite() || self.bin_width_ns <= 0.0 {
            return Err(Error::Config(format!(
                "bin_width_ns {} must be positive",
                self.bin_width_ns
            )));
        }
        if !self.kl.step_ns.is_finite() || self.kl.step_ns <= 0.0 {
            return Err(Error::Config(format!(
                "kl.step_ns {} must be positive",
                self.kl.step_ns
            )));
        }
        if !self.kl.epsilon.is_finite() || self.kl.epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "kl.epsilon {} must be positive",
                self.kl.epsilon
            )));
        }
        Ok(())
    }
}

/// One report row: delay statistics in ns, KL divergences in bits, and the
/// grid/flooring provenance that produced the KL values.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ReportRow {
    pub rx_id: u32,
    pub rms_ns: f64,
    pub mean_weighted_ns: f64,
    pub mean_unweighted_ns: f64,
    pub max_ns: f64,
    pub kl_tdl_a_bits: Option<f64>,
    pub kl_tdl_b_bits: Option<f64>,
    pub kl_tdl_c_bits: Option<f64>,
    pub grid_step_ns: f64,
    pub epsilon: f64,
}

pub const REPORT_CSV_HEADER: &str = "rx_id,rms_ns,mean_weighted_ns,mean_unweighted_ns,max_ns,kl_tdl_a_bits,kl_tdl_b_bits,kl_tdl_c_bits,grid_step_ns,epsilon";

/// A receiver (or whole input file) that could not be processed.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SkippedItem {
    pub transmitter_id: String,
    pub receiver_id: Option<u32>,
    pub reason: String,
}

/// Result of a batch run.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    pub report_paths: Vec<PathBuf>,
    pub rows_written: usize,
    pub skipped: Vec<SkippedItem>,
}

impl BatchOutcome {
    /// True when every parsed receiver produced a row.
    pub fn is_complete(&self) -> bool {
        self.skipped.is_empty()
    }
}

/// Format with 5 significant digits in plain decimal notation, matching the
/// precision of the published comparison tables.
pub fn format_sig5(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0000".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (4 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn option_sig5(x: Option<f64>) -> String {
    x.map(format_sig5).unwrap_or_default()
}

/// Run the full pipeline for one receiver.
fn receiver_row(
    dataset: &PathDataset,
    scenario: Scenario,
    config: &BatchConfig,
) -> Result<ReportRow> {
    let source = format!("{}/rx{}", dataset.transmitter_id, dataset.receiver_id);
    let site = PowerDelayProfile::from_records(
        &dataset.records,
        config.bin_width_ns,
        CombineMode::Noncoherent,
        source,
    )?
    .normalize_to_peak()
    .apply_threshold(config.threshold_db)?
    .rezero_delays();

    let mut kl = [None, None, None];
    for model in &config.models {
        let reference_ds = preset_ds(scenario, *model);
        let tdl = scaled_profile(*model, reference_ds)?;
        let result = compare(&site, &tdl, &config.kl)?;
        kl[match model {
            TdlModel::A => 0,
            TdlModel::B => 1,
            TdlModel::C => 2,
        }] = Some(result.bits);
    }

    Ok(ReportRow {
        rx_id: dataset.receiver_id,
        rms_ns: rms_delay_spread(&site, config.mean_mode),
        mean_weighted_ns: mean_excess_delay(&site, MeanMode::PowerWeighted),
        mean_unweighted_ns: mean_excess_delay(&site, MeanMode::Unweighted),
        max_ns: effective_max_delay(&site, config.threshold_db)?,
        kl_tdl_a_bits: kl[0],
        kl_tdl_b_bits: kl[1],
        kl_tdl_c_bits: kl[2],
        grid_step_ns: config.kl.step_ns,
        epsilon: config.kl.epsilon,
    })
}

fn write_report_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    writeln!(writer, "{REPORT_CSV_HEADER}")?;
    for row in rows {
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{},{:e}",
            row.rx_id,
            format_sig5(row.rms_ns),
            format_sig5(row.mean_weighted_ns),
            format_sig5(row.mean_unweighted_ns),
            format_sig5(row.max_ns),
            option_sig5(row.kl_tdl_a_bits),
            option_sig5(row.kl_tdl_b_bits),
            option_sig5(row.kl_tdl_c_bits),
            row.grid_step_ns,
            row.epsilon,
        )?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, serde::Serialize)]
struct ColumnSummary {
    min: f64,
    median: f64,
    max: f64,
}

fn summarize_column(values: Vec<f64>) -> Option<ColumnSummary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values;
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite metric values"));
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Some(ColumnSummary {
        min: sorted[0],
        median,
        max: sorted[n - 1],
    })
}

#[derive(serde::Serialize)]
struct TransmitterReport<'a> {
    transmitter_id: &'a str,
    scenario: Scenario,
    threshold_db: f64,
    bin_width_ns: f64,
    mean_mode: MeanMode,
    rows: &'a [ReportRow],
    summary: BTreeMap<&'static str, ColumnSummary>,
}

fn write_report_json(
    path: &Path,
    transmitter_id: &str,
    scenario: Scenario,
    config: &BatchConfig,
    rows: &[ReportRow],
) -> Result<()> {
    let mut summary = BTreeMap::new();
    let mut add = |name: &'static str, values: Vec<f64>| {
        if let Some(column) = summarize_column(values) {
            summary.insert(name, column);
        }
    };
    add("rms_ns", rows.iter().map(|r| r.rms_ns).collect());
    add(
        "mean_weighted_ns",
        rows.iter().map(|r| r.mean_weighted_ns).collect(),
    );
    add(
        "mean_unweighted_ns",
        rows.iter().map(|r| r.mean_unweighted_ns).collect(),
    );
    add("max_ns", rows.iter().map(|r| r.max_ns).collect());
    add(
        "kl_tdl_a_bits",
        rows.iter().filter_map(|r| r.kl_tdl_a_bits).collect(),
    );
    add(
        "kl_tdl_b_bits",
        rows.iter().filter_map(|r| r.kl_tdl_b_bits).collect(),
    );
    add(
        "kl_tdl_c_bits",
        rows.iter().filter_map(|r| r.kl_tdl_c_bits).collect(),
    );
    let report = TransmitterReport {
        transmitter_id,
        scenario,
        threshold_db: config.threshold_db,
        bin_width_ns: config.bin_width_ns,
        mean_mode: config.mean_mode,
        rows,
        summary,
    };
    let mut writer = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut writer, &report)
        .map_err(|e| Error::Config(format!("serializing report: {e}")))?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

fn sanitize_for_filename(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[derive(serde::Serialize)]
struct RunMetadata<'a> {
    tool_version: &'static str,
    generated_unix_epoch_s: u64,
    inputs: &'a [PathBuf],
    rows_written: usize,
    skipped: &'a [SkippedItem],
}

/// Execute a batch run: parse every input, process receivers in parallel,
/// and write one CSV and one JSON report per transmitter plus a
/// `run_metadata.json` sidecar.
///
/// Receivers with malformed rows (and inputs that fail to open or parse)
/// are skipped and reported in the outcome rather than aborting the run.
pub fn run_batch(config: &BatchConfig) -> Result<BatchOutcome> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir)?;

    let mut skipped: Vec<SkippedItem> = Vec::new();
    let mut datasets: Vec<PathDataset> = Vec::new();

    for input in &config.inputs {
        let label = input.display().to_string();
        let parsed = File::open(input)
            .map_err(Error::from)
            .and_then(|f| parse_paths_csv(std::io::BufReader::new(f)));
        match parsed {
            Ok(parsed) => {
                let mut failed: BTreeSet<(String, u32)> = BTreeSet::new();
                for reject in &parsed.rejects {
                    skipped.push(SkippedItem {
                        transmitter_id: reject
                            .transmitter_id
                            .clone()
                            .unwrap_or_else(|| label.clone()),
                        receiver_id: reject.receiver_id,
                        reason: reject.message.clone(),
                    });
                    if let (Some(tx), Some(rx)) = (&reject.transmitter_id, reject.receiver_id) {
                        failed.insert((tx.clone(), rx));
                    }
                }
                // a receiver with any malformed row would be reported from a
                // partial record set; drop it rather than bias its metrics
                for dataset in parsed.datasets {
                    let key = (dataset.transmitter_id.clone(), dataset.receiver_id);
                    if !failed.contains(&key) {
                        datasets.push(dataset);
                    }
                }
            }
            Err(e) => skipped.push(SkippedItem {
                transmitter_id: label,
                receiver_id: None,
                reason: e.to_string(),
            }),
        }
    }

    let mut by_transmitter: BTreeMap<String, Vec<PathDataset>> = BTreeMap::new();
    for dataset in datasets {
        by_transmitter
            .entry(dataset.transmitter_id.clone())
            .or_default()
            .push(dataset);
    }

    // every transmitter must have a scenario before any work starts
    for transmitter in by_transmitter.keys() {
        if !config.scenarios.contains_key(transmitter) {
            return Err(Error::Config(format!(
                "no scenario configured for transmitter '{transmitter}'"
            )));
        }
    }

    let mut report_paths = Vec::new();
    let mut rows_written = 0;

    for (transmitter, mut group) in by_transmitter {
        let scenario = config.scenarios[&transmitter];
        group.sort_by_key(|d| d.receiver_id);

        let results: Vec<(u32, Result<ReportRow>)> = group
            .par_iter()
            .map(|dataset| (dataset.receiver_id, receiver_row(dataset, scenario, config)))
            .collect();

        let mut rows = Vec::with_capacity(results.len());
        for (rx_id, result) in results {
            match result {
                Ok(row) => rows.push(row),
                Err(e) => {
                    log::warn!("skipping {transmitter}/rx{rx_id}: {e}");
                    skipped.push(SkippedItem {
                        transmitter_id: transmitter.clone(),
                        receiver_id: Some(rx_id),
                        reason: e.to_string(),
                    });
                }
            }
        }

        let stem = sanitize_for_filename(&transmitter);
        let csv_path = config.output_dir.join(format!("report_{stem}.csv"));
        let json_path = config.output_dir.join(format!("report_{stem}.json"));
        write_report_csv(&csv_path, &rows)?;
        write_report_json(&json_path, &transmitter, scenario, config, &rows)?;
        rows_written += rows.len();
        report_paths.push(csv_path);
        report_paths.push(json_path);
    }

    let metadata = RunMetadata {
        tool_version: env!("CARGO_PKG_VERSION"),
        generated_unix_epoch_s: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        inputs: &config.inputs,
        rows_written,
        skipped: &skipped,
    };
    let sidecar = config.output_dir.join("run_metadata.json");
    let mut writer = BufWriter::new(File::create(&sidecar)?);
    serde_json::to_writer_pretty(&mut writer, &metadata)
        .map_err(|e| Error::Config(format!("serializing metadata: {e}")))?;
    writer.write_all(b"\n")?;
    writer.flush()?;

    Ok(BatchOutcome {
        report_paths,
        rows_written,
        skipped,
    })
}

/// Emit stem-plot data for one or more profiles: `delay_ns,rel_power_db,series`
/// triples over the union delay extent. Profiles in the absolute frame are
/// peak-normalized first so every emitted power is <= 0 dB.
pub fn write_plot_data<W: Write + ?Sized>(
    profiles: &[PowerDelayProfile],
    writer: &mut W,
) -> std::io::Result<()> {
    writeln!(writer, "delay_ns,rel_power_db,series")?;
    for pdp in profiles {
        let normalized = pdp.normalize_to_peak();
        let series = normalized.source_id().replace([',', '\n', '\r'], " ");
        for tap in normalized.taps() {
            writeln!(
                writer,
                "{},{},{}",
                tap.excess_delay_ns, tap.power_db, series
            )?;
        }
    }
    Ok(())
}
