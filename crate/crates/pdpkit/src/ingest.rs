//! Ray-tracer path export parsing and synthetic dataset generation.
//!
//! Two input layouts are supported:
//!
//! * The canonical path CSV defined by this project:
//!   header `tx_id,rx_id,path_id,toa_s,power_dbm,phase_deg`, one path per
//!   row, UTF-8, LF line endings, `.` decimals, scientific notation allowed
//!   for `toa_s`.
//! * A best-effort reader for whitespace-delimited ray-tracer exports
//!   ([`parse_insite_cir`]). Lines starting with `#` are comments; a
//!   mapping line such as `# columns: path toa_s power_dbm phase_deg`
//!   declares the column layout (extra names and extra trailing data
//!   columns are ignored), and optional `# tx <id>` / `# rx <id>` comments
//!   label the following rows. Times are in seconds, powers in dBm, phases
//!   in degrees. Field order and units in real exports vary by tool
//!   version, so the mapping line is required rather than guessed.
//!
//! Malformed data rows are never silently dropped: each one is reported as
//! a [`RejectedRow`] with its line number, and rows in = records out +
//! rejects.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::profile::MultipathRecord;

/// All paths for one (transmitter, receiver) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PathDataset {
    pub transmitter_id: String,
    pub receiver_id: u32,
    pub records: Vec<MultipathRecord>,
}

/// A data row that failed to parse, with enough context to skip its
/// receiver in batch runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRow {
    pub line: usize,
    pub transmitter_id: Option<String>,
    pub receiver_id: Option<u32>,
    pub message: String,
}

/// Parse outcome: clean records grouped per (tx, rx), plus every reject.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedPaths {
    pub datasets: Vec<PathDataset>,
    pub rejects: Vec<RejectedRow>,
}

pub const PATHS_CSV_HEADER: &str = "tx_id,rx_id,path_id,toa_s,power_dbm,phase_deg";

type Groups = BTreeMap<(String, u32), Vec<MultipathRecord>>;

fn groups_into_datasets(groups: Groups) -> Vec<PathDataset> {
    groups
        .into_iter()
        .map(|((transmitter_id, receiver_id), records)| PathDataset {
            transmitter_id,
            receiver_id,
            records,
        })
        .collect()
}

fn field<T: std::str::FromStr>(raw: &str, name: &str, line: usize) -> Result<T> {
    raw.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {name} '{}'", raw.trim()),
    })
}

fn build_record(
    path_id: u32,
    toa_s: f64,
    power_dbm: f64,
    phase_deg: f64,
    line: usize,
) -> Result<MultipathRecord> {
    MultipathRecord::new(path_id, toa_s, power_dbm, phase_deg).map_err(|e| match e {
        Error::InvalidToa(v) => Error::Parse {
            line,
            message: format!("invalid TOA {v}"),
        },
        other => Error::Parse {
            line,
            message: other.to_string(),
        },
    })
}

/// Parse the canonical path CSV.
///
/// A missing or wrong header is a hard error; malformed rows are collected
/// as rejects while the rest of the file is processed.
pub fn parse_paths_csv<R: BufRead>(reader: R) -> Result<ParsedPaths> {
    let mut groups: Groups = BTreeMap::new();
    let mut rejects = Vec::new();
    let mut saw_header = false;

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line.trim() != PATHS_CSV_HEADER {
                return Err(Error::BadHeader(format!(
                    "expected '{PATHS_CSV_HEADER}', found '{}'",
                    line.trim()
                )));
            }
            saw_header = true;
            continue;
        }

        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            rejects.push(RejectedRow {
                line: line_no,
                transmitter_id: None,
                receiver_id: None,
                message: format!(
                    "parse error at line {line_no}: expected 6 fields, found {}",
                    fields.len()
                ),
            });
            continue;
        }
        let tx_id = fields[0].trim().to_string();
        let rx_id: Option<u32> = fields[1].trim().parse().ok();
        let parsed = (|| -> Result<MultipathRecord> {
            if tx_id.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "empty tx_id".into(),
                });
            }
            let rx: u32 = field(fields[1], "rx_id", line_no)?;
            debug_assert_eq!(Some(rx), rx_id);
            let path_id: u32 = field(fields[2], "path_id", line_no)?;
            let toa_s: f64 = field(fields[3], "toa_s", line_no)?;
            let power_dbm: f64 = field(fields[4], "power_dbm", line_no)?;
            let phase_deg: f64 = field(fields[5], "phase_deg", line_no)?;
            build_record(path_id, toa_s, power_dbm, phase_deg, line_no)
        })();
        match parsed {
            Ok(record) => groups
                .entry((tx_id, rx_id.expect("rx parsed with record")))
                .or_default()
                .push(record),
            Err(e) => rejects.push(RejectedRow {
                line: line_no,
                transmitter_id: Some(tx_id).filter(|t| !t.is_empty()),
                receiver_id: rx_id,
                message: e.to_string(),
            }),
        }
    }

    if !saw_header {
        return Err(Error::BadHeader("empty input".into()));
    }
    Ok(ParsedPaths {
        datasets: groups_into_datasets(groups),
        rejects,
    })
}

/// Serialize datasets back to the canonical CSV. Floats are written with
/// shortest round-trip formatting, so parse -> write -> parse is lossless.
pub fn write_paths_csv<W: Write>(datasets: &[PathDataset], writer: &mut W) -> std::io::Result<()> {
    writeln!(writer, "{PATHS_CSV_HEADER}")?;
    for dataset in datasets {
        for r in &dataset.records {
            writeln!(
                writer,
                "{},{},{},{},{},{}",
                dataset.transmitter_id,
                dataset.receiver_id,
                r.path_id,
                r.toa_s,
                r.power_dbm,
                r.phase_deg
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct ColumnMap {
    path: usize,
    toa: usize,
    power: usize,
    phase: usize,
}

fn parse_column_mapping(tokens: &[&str], line: usize) -> Result<ColumnMap> {
    let mut path = None;
    let mut toa = None;
    let mut power = None;
    let mut phase = None;
    for (idx, token) in tokens.iter().enumerate() {
        match token.to_ascii_lowercase().as_str() {
            "path" | "path_id" => path = Some(idx),
            "toa" | "toa_s" => toa = Some(idx),
            "power" | "power_dbm" => power = Some(idx),
            "phase" | "phase_deg" => phase = Some(idx),
            _ => {} // unknown column names are ignored
        }
    }
    match (path, toa, power, phase) {
        (Some(path), Some(toa), Some(power), Some(phase)) => Ok(ColumnMap {
            path,
            toa,
            power,
            phase,
        }),
        _ => Err(Error::UnknownLayout(format!(
            "mapping line {line} must name path, toa_s, power_dbm, and phase_deg columns"
        ))),
    }
}

/// Best-effort reader for whitespace-delimited ray-tracer path exports.
pub fn parse_insite_cir<R: BufRead>(reader: R) -> Result<ParsedPaths> {
    let mut groups: Groups = BTreeMap::new();
    let mut rejects = Vec::new();
    let mut columns: Option<ColumnMap> = None;
    let mut tx_id = String::from("insite");
    let mut rx_id: u32 = 0;

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let tokens: Vec<&str> = comment.split_whitespace().collect();
            match tokens.first().map(|t| t.to_ascii_lowercase()).as_deref() {
                Some("columns:") => columns = Some(parse_column_mapping(&tokens[1..], line_no)?),
                Some("tx") if tokens.len() >= 2 => tx_id = tokens[1..].join(" "),
                Some("rx") if tokens.len() >= 2 => {
                    rx_id = tokens[1].parse().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("invalid rx id '{}'", tokens[1]),
                    })?;
                }
                _ => {} // plain comment
            }
            continue;
        }

        let map = columns.ok_or_else(|| {
            Error::UnknownLayout(format!(
                "data at line {line_no} before any '# columns:' mapping line"
            ))
        })?;
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let needed = map.path.max(map.toa).max(map.power).max(map.phase) + 1;
        let parsed = (|| -> Result<MultipathRecord> {
            if fields.len() < needed {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected at least {needed} columns, found {}", fields.len()),
                });
            }
            let path_id: u32 = field(fields[map.path], "path index", line_no)?;
            let toa_s: f64 = field(fields[map.toa], "toa_s", line_no)?;
            let power_dbm: f64 = field(fields[map.power], "power_dbm", line_no)?;
            let phase_deg: f64 = field(fields[map.phase], "phase_deg", line_no)?;
            build_record(path_id, toa_s, power_dbm, phase_deg, line_no)
        })();
        match parsed {
            Ok(record) => groups
                .entry((tx_id.clone(), rx_id))
                .or_default()
                .push(record),
            Err(e) => rejects.push(RejectedRow {
                line: line_no,
                transmitter_id: Some(tx_id.clone()),
                receiver_id: Some(rx_id),
                message: e.to_string(),
            }),
        }
    }

    Ok(ParsedPaths {
        datasets: groups_into_datasets(groups),
        rejects,
    })
}

/// Recipe for a deterministic synthetic dataset.
///
/// Tap powers follow an exponential decay in excess delay
/// (`base_power_dbm - 10 * (delay / decay_constant_ns) * log10(e)` dB, i.e.
/// linear power proportional to `exp(-delay / decay_constant_ns)`) plus a
/// bounded ripple; delays are uniform on `[0, max_excess_ns]` with the
/// first path pinned at zero. The same spec always produces the identical
/// dataset, on every platform.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SyntheticSpec {
    pub n_paths: usize,
    pub decay_constant_ns: f64,
    pub max_excess_ns: f64,
    pub base_power_dbm: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::InvalidSpec("n_paths must be >= 1".into()));
        }
        if !self.decay_constant_ns.is_finite() || self.decay_constant_ns <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "decay_constant_ns {} must be positive",
                self.decay_constant_ns
            )));
        }
        if !self.max_excess_ns.is_finite() || self.max_excess_ns <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "max_excess_ns {} must be positive",
                self.max_excess_ns
            )));
        }
        if !self.base_power_dbm.is_finite() {
            return Err(Error::InvalidSpec("base_power_dbm must be finite".into()));
        }
        Ok(())
    }
}

const RIPPLE_DB: f64 = 1.5;

// Uniform in [0, 1) from the top 53 bits; pinned here rather than relying
// on a distribution crate so streams are stable across dependency bumps.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Generate one synthetic receiver dataset (`tx_id = "synthetic"`,
/// `rx_id = 0`; relabel the public fields as needed).
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<PathDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut records = Vec::with_capacity(spec.n_paths);

    // Anchor path: excess delay 0 at exactly the base power.
    let phase = uniform(&mut rng) * 360.0;
    records.push(MultipathRecord::new(0, 0.0, spec.base_power_dbm, phase)?);

    for path_id in 1..spec.n_paths as u32 {
        let delay_ns = uniform(&mut rng) * spec.max_excess_ns;
        let decay_db = 10.0 * (delay_ns / spec.decay_constant_ns) * std::f64::consts::E.log10();
        let ripple = (uniform(&mut rng) * 2.0 - 1.0) * RIPPLE_DB;
        let phase = uniform(&mut rng) * 360.0;
        records.push(MultipathRecord::new(
            path_id,
            delay_ns * 1e-9,
            spec.base_power_dbm - decay_db + ripple,
            phase,
        )?);
    }

    Ok(PathDataset {
        transmitter_id: "synthetic".into(),
        receiver_id: 0,
        records,
    })
}
