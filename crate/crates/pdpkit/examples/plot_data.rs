//! Emit stem-plot data comparing a synthetic site profile against two TDL
//! references, in the `delay_ns,rel_power_db,series` layout meant for
//! external plotting tools.
//!
//! Run with: cargo run --example plot_data

use pdpkit::ingest::{generate_synthetic, SyntheticSpec};
use pdpkit::profile::{CombineMode, PowerDelayProfile};
use pdpkit::report::write_plot_data;
use pdpkit::tdl::{preset_ds, scaled_profile, Scenario, TdlModel};

fn main() {
    let dataset = generate_synthetic(&SyntheticSpec {
        n_paths: 30,
        decay_constant_ns: 40.0,
        max_excess_ns: 250.0,
        base_power_dbm: -80.0,
        seed: 564,
    })
    .unwrap();
    let site = PowerDelayProfile::from_records(
        &dataset.records,
        1.0,
        CombineMode::Noncoherent,
        "site/rx564",
    )
    .unwrap()
    .normalize_to_peak()
    .apply_threshold(-30.0)
    .unwrap()
    .rezero_delays();

    let tdl_a = scaled_profile(TdlModel::A, preset_ds(Scenario::I2i, TdlModel::A)).unwrap();
    let tdl_c = scaled_profile(TdlModel::C, preset_ds(Scenario::I2i, TdlModel::C)).unwrap();

    let stdout = std::io::stdout();
    write_plot_data(&[site, tdl_a, tdl_c], &mut stdout.lock()).unwrap();
}
