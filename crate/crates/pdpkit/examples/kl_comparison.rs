//! KL divergence between delay profiles: pairwise divergences among the
//! indoor TDL presets, the effect of the resampling method, and the
//! asymmetry of the measure.
//!
//! Run with: cargo run --example kl_comparison

use pdpkit::divergence::{compare, CompareOptions, ResampleMethod};
use pdpkit::tdl::{preset_ds, scaled_profile, Scenario, TdlModel};

fn main() {
    let profiles: Vec<_> = TdlModel::ALL
        .iter()
        .map(|&model| scaled_profile(model, preset_ds(Scenario::I2i, model)).unwrap())
        .collect();

    let options = CompareOptions::default();
    println!("pairwise D(row || column) in bits, indoor presets, bin accumulation:");
    print!("{:>10}", "");
    for model in TdlModel::ALL {
        print!("{:>10}", model.to_string());
    }
    println!();
    for (i, reference) in profiles.iter().enumerate() {
        print!("{:>10}", TdlModel::ALL[i].to_string());
        for approx in &profiles {
            let result = compare(reference, approx, &options).unwrap();
            print!("{:>10.4}", result.bits);
        }
        println!();
    }

    let a = &profiles[0];
    let b = &profiles[1];
    let forward = compare(a, b, &options).unwrap();
    let backward = compare(b, a, &options).unwrap();
    println!(
        "\nasymmetry: D({} || {}) = {:.4} bits, swapped = {:.4} bits",
        forward.reference_id, forward.approx_id, forward.bits, backward.bits
    );

    let interp = CompareOptions {
        method: ResampleMethod::LinearInterp,
        ..options
    };
    let smoothed = compare(a, b, &interp).unwrap();
    println!(
        "resampling choice matters: bin_accumulate {:.4} bits vs linear_interp {:.4} bits",
        forward.bits, smoothed.bits
    );
    println!(
        "grid: {} bins x {} ns starting at {} ns, epsilon {:e}",
        forward.grid.n_bins, forward.grid.step_ns, forward.grid.start_ns, forward.epsilon
    );
}
