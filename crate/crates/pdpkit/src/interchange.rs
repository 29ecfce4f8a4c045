//! Text interchange format for power delay profiles.
//!
//! One file per profile: a header line followed by one `delay_ns,power_db`
//! pair per line, delays ascending, `.` decimals, LF line endings.
//!
//! ```text
//! # frame=peak_relative_db threshold_db=-30 source=O2I_Tx1/rx564
//! 0,0
//! 12.5,-7.25
//! 610.25,-29.5
//! ```
//!
//! Floats are written with shortest round-trip formatting, so a
//! write/read cycle reproduces the profile exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::profile::{PowerDelayProfile, PowerFrame, Tap};

/// Write a profile in the interchange format.
pub fn write_pdp<W: Write + ?Sized>(
    pdp: &PowerDelayProfile,
    writer: &mut W,
) -> std::io::Result<()> {
    let threshold = match pdp.threshold_db() {
        Some(t) => t.to_string(),
        None => "none".to_string(),
    };
    // the source id is free text but must stay on the header line
    let source = pdp.source_id().replace(['\n', '\r'], " ");
    writeln!(
        writer,
        "# frame={} threshold_db={} source={}",
        pdp.frame().as_str(),
        threshold,
        source
    )?;
    for tap in pdp.taps() {
        writeln!(writer, "{},{}", tap.excess_delay_ns, tap.power_db)?;
    }
    Ok(())
}

/// Read a profile from the interchange format.
pub fn read_pdp<R: BufRead>(reader: R) -> Result<PowerDelayProfile> {
    let mut lines = reader.lines().enumerate();

    let header = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                break line;
            }
            None => return Err(Error::BadHeader("empty input".into())),
        }
    };
    let header = header
        .trim_end_matches('\r')
        .strip_prefix('#')
        .ok_or_else(|| Error::BadHeader("missing '#' header line".into()))?
        .trim_start();

    let frame_raw = header
        .strip_prefix("frame=")
        .ok_or_else(|| Error::BadHeader("missing frame field".into()))?;
    let (frame_value, rest) = frame_raw
        .split_once(char::is_whitespace)
        .ok_or_else(|| Error::BadHeader("missing threshold_db field".into()))?;
    let frame = match frame_value {
        "absolute_dbm" => PowerFrame::AbsoluteDbm,
        "peak_relative_db" => PowerFrame::PeakRelativeDb,
        other => return Err(Error::BadHeader(format!("unknown frame '{other}'"))),
    };

    let threshold_raw = rest
        .trim_start()
        .strip_prefix("threshold_db=")
        .ok_or_else(|| Error::BadHeader("missing threshold_db field".into()))?;
    let (threshold_value, rest) = threshold_raw
        .split_once(char::is_whitespace)
        .ok_or_else(|| Error::BadHeader("missing source field".into()))?;
    let threshold_db = match threshold_value {
        "none" => None,
        value => Some(
            value
                .parse::<f64>()
                .map_err(|_| Error::BadHeader(format!("invalid threshold_db '{value}'")))?,
        ),
    };

    let source = rest
        .trim_start()
        .strip_prefix("source=")
        .ok_or_else(|| Error::BadHeader("missing source field".into()))?
        .to_string();

    let mut taps = Vec::new();
    for (line_no, line) in lines {
        let line_no = line_no + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (delay_raw, power_raw) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected 'delay_ns,power_db', found '{line}'"),
        })?;
        let excess_delay_ns: f64 = delay_raw.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid delay '{}'", delay_raw.trim()),
        })?;
        let power_db: f64 = power_raw.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid power '{}'", power_raw.trim()),
        })?;
        taps.push(Tap {
            excess_delay_ns,
            power_db,
        });
    }

    PowerDelayProfile::new(taps, frame, threshold_db, source)
}

/// Write a profile to a file.
pub fn save_pdp(pdp: &PowerDelayProfile, path: &Path) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    write_pdp(pdp, &mut writer)?;
    writer.flush()?;
    Ok(())
}

/// Read a profile from a file.
pub fn load_pdp(path: &Path) -> Result<PowerDelayProfile> {
    read_pdp(BufReader::new(File::open(path)?))
}
