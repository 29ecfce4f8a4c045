//! Parse both supported path-export layouts: the canonical CSV and the
//! whitespace-delimited best-effort format, including how malformed rows
//! are reported rather than silently dropped.
//!
//! Run with: cargo run --example parse_ray_exports

use pdpkit::ingest::{parse_insite_cir, parse_paths_csv};

const CANONICAL_CSV: &str = "\
tx_id,rx_id,path_id,toa_s,power_dbm,phase_deg
O2I_Tx1,564,0,2.30e-7,-84.1,12.0
O2I_Tx1,564,1,2.55e-7,-88.4,97.0
O2I_Tx1,594,0,2.41e-7,-85.7,301.0
O2I_Tx1,594,1,broken,-90.2,15.0
I2I_Tx,32,0,0.31e-7,-61.3,120.0
";

const INSITE_STYLE: &str = "\
# Wireless InSite-style export, one block per receiver
# tx O2I_Tx1
# columns: path toa_s power_dbm phase_deg interactions
# rx 564
1 2.30e-7 -84.1 12.0 3
2 2.55e-7 -88.4 97.0 4
# rx 594
1 2.41e-7 -85.7 301.0 2
";

fn main() {
    println!("canonical CSV:");
    let parsed = parse_paths_csv(std::io::Cursor::new(CANONICAL_CSV)).unwrap();
    for dataset in &parsed.datasets {
        println!(
            "  {} / rx {}: {} paths",
            dataset.transmitter_id,
            dataset.receiver_id,
            dataset.records.len()
        );
    }
    for reject in &parsed.rejects {
        println!("  rejected: {}", reject.message);
    }

    println!("\nwhitespace export with a column mapping line:");
    let parsed = parse_insite_cir(std::io::Cursor::new(INSITE_STYLE)).unwrap();
    for dataset in &parsed.datasets {
        let first = &dataset.records[0];
        println!(
            "  {} / rx {}: {} paths, first arrival {:.1} ns at {} dBm",
            dataset.transmitter_id,
            dataset.receiver_id,
            dataset.records.len(),
            first.toa_s * 1e9,
            first.power_dbm
        );
    }
}
