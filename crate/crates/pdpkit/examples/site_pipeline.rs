//! The canonical processing chain for a site-specific profile, stage by
//! stage: bin raw paths into a PDP, normalize to the peak tap, apply the
//! -30 dB threshold, re-zero delays, then compute delay statistics.
//!
//! Run with: cargo run --example site_pipeline

use pdpkit::metrics::{summarize, MeanMode};
use pdpkit::profile::{CombineMode, MultipathRecord, PowerDelayProfile};

fn main() {
    // A handful of paths as a ray tracer would report them: absolute TOA in
    // seconds, received power in dBm, phase in degrees.
    let paths = [
        (2.30e-7, -84.1, 12.0),
        (2.31e-7, -86.9, 201.5), // same 1 ns bin as the first arrival
        (2.55e-7, -88.4, 97.0),
        (2.90e-7, -93.0, 310.2),
        (3.40e-7, -101.7, 44.8),
        (4.85e-7, -118.9, 230.1), // 48 dB below the peak: thresholded away
    ];
    let records: Vec<MultipathRecord> = paths
        .iter()
        .enumerate()
        .map(|(i, &(toa_s, power_dbm, phase_deg))| {
            MultipathRecord::new(i as u32, toa_s, power_dbm, phase_deg).unwrap()
        })
        .collect();

    let built =
        PowerDelayProfile::from_records(&records, 1.0, CombineMode::Noncoherent, "demo/rx0")
            .unwrap();
    println!(
        "built ({} records -> {} taps, frame {:?}):",
        records.len(),
        built.len(),
        built.frame()
    );
    print_taps(&built);

    let normalized = built.normalize_to_peak();
    println!("\nnormalized to peak:");
    print_taps(&normalized);

    let thresholded = normalized.apply_threshold(-30.0).unwrap();
    println!(
        "\nafter -30 dB threshold ({} taps survive):",
        thresholded.len()
    );
    print_taps(&thresholded);

    let site = thresholded.rezero_delays();
    println!("\nre-zeroed to the first surviving arrival:");
    print_taps(&site);

    for mode in [MeanMode::PowerWeighted, MeanMode::Unweighted] {
        let m = summarize(&site, -30.0, mode).unwrap();
        println!(
            "\n{mode:?}: rms = {:.3} ns, mean = {:.3} ns, max = {:.3} ns ({} taps)",
            m.rms_ds_ns, m.mean_excess_ns, m.eff_max_ns, m.tap_count
        );
    }
}

fn print_taps(pdp: &pdpkit::PowerDelayProfile) {
    for tap in pdp.taps() {
        println!(
            "  {:>8.3} ns  {:>8.3} dB",
            tap.excess_delay_ns, tap.power_db
        );
    }
}
