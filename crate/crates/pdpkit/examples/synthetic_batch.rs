//! End-to-end batch run on generated data: write a canonical CSV of
//! synthetic receivers and a TOML config, run the batch pipeline, and show
//! the per-receiver report rows it produced.
//!
//! Run with: cargo run --example synthetic_batch

use pdpkit::ingest::{generate_synthetic, write_paths_csv, SyntheticSpec};
use pdpkit::report::{run_batch, BatchConfig};

fn main() {
    let dir = tempfile::tempdir().unwrap();

    // Eight receivers with different seeds, written as one canonical CSV.
    let mut datasets = Vec::new();
    for rx in 0..8u32 {
        let mut dataset = generate_synthetic(&SyntheticSpec {
            n_paths: 60,
            decay_constant_ns: 45.0,
            max_excess_ns: 400.0,
            base_power_dbm: -82.0,
            seed: 7100 + rx as u64,
        })
        .unwrap();
        dataset.transmitter_id = "DemoTx".into();
        dataset.receiver_id = 500 + rx;
        datasets.push(dataset);
    }
    let csv_path = dir.path().join("demo.csv");
    let mut buffer = Vec::new();
    write_paths_csv(&datasets, &mut buffer).unwrap();
    std::fs::write(&csv_path, buffer).unwrap();

    let config = BatchConfig::from_toml_str(&format!(
        r#"
        inputs = ["{}"]
        output_dir = "{}"
        threshold_db = -30.0
        models = ["A", "B", "C"]

        [scenarios]
        DemoTx = "i2i"
        "#,
        csv_path.display(),
        dir.path().join("reports").display(),
    ))
    .unwrap();

    let outcome = run_batch(&config).unwrap();
    println!(
        "wrote {} rows, {} files, {} skipped",
        outcome.rows_written,
        outcome.report_paths.len(),
        outcome.skipped.len()
    );

    let report = std::fs::read_to_string(dir.path().join("reports/report_DemoTx.csv")).unwrap();
    println!("\nreport_DemoTx.csv:");
    print!("{report}");
}
