//! Generate the six scenario presets of the TR 38.901 NLOS TDL models and
//! print their delay statistics, using the unweighted mean convention that
//! matches the published summary figures.
//!
//! Run with: cargo run --example tdl_profiles

use pdpkit::metrics::{rms_delay_spread, summarize, MeanMode};
use pdpkit::tdl::{model_table, scaled_profile, PRESETS};

fn main() {
    println!("scenario  model  label   ds_ns    rms_w    mean_u     max     taps");
    for preset in &PRESETS {
        let profile = scaled_profile(preset.model, preset.ds_ns).unwrap();
        let metrics = summarize(&profile, -30.0, MeanMode::Unweighted).unwrap();
        let rms_weighted = rms_delay_spread(&profile, MeanMode::PowerWeighted);
        println!(
            "{:<9} {:<6} {:<7} {:>5}  {:>8.3} {:>8.3} {:>8.2}  {:>5}",
            preset.scenario.to_string(),
            preset.model.to_string(),
            format!("{:?}", preset.profile_label),
            preset.ds_ns,
            rms_weighted,
            metrics.mean_excess_ns,
            metrics.eff_max_ns,
            metrics.tap_count,
        );
    }

    println!();
    for model in pdpkit::TdlModel::ALL {
        let table = model_table(model);
        println!(
            "{model}: {} taps, weakest {} dB, normalized tap RMS {:.4} ({})",
            table.taps.len(),
            table
                .taps
                .iter()
                .map(|t| t.power_db)
                .fold(f64::MAX, f64::min),
            pdpkit::tdl::normalization_check(model),
            table.fading_tag,
        );
    }
}
