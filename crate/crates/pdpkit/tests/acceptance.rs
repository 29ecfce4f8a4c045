//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Oracles used here are written independently of the library code paths
//! they check: delay moments via the raw-moment route (E[t^2] - mu^2)
//! instead of the central-moment accumulation, and KL via natural
//! logarithms instead of log2.

use std::time::Instant;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdpkit::divergence::{compare, kl_bits, to_probability, CompareOptions};
use pdpkit::ingest::{generate_synthetic, write_paths_csv, SyntheticSpec};
use pdpkit::metrics::{effective_max_delay, summarize, MeanMode};
use pdpkit::profile::{CombineMode, PowerDelayProfile, PowerFrame, Tap};
use pdpkit::report::{format_sig5, run_batch, BatchConfig, REPORT_CSV_HEADER};
use pdpkit::tdl::{normalization_check, scaled_profile, TdlModel};

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Delay-scaled TDL profile taken through the -30 dB pipeline.
fn tdl_pipeline(model: TdlModel, ds_ns: f64) -> PowerDelayProfile {
    scaled_profile(model, ds_ns)
        .unwrap()
        .apply_threshold(-30.0)
        .unwrap()
        .rezero_delays()
}

#[test]
fn criterion_1_tdl_reference_values() {
    let started = Instant::now();
    // (model, ds, expected unweighted mean, expected max within the -30 dB
    // threshold). Maxima for the 240/616 ns presets are intentionally not
    // asserted: the corresponding published round figures (2000/1000/5000 ns,
    // and the 2000 ns TDL-C mean) are not products of the tap tables.
    let cases = [
        (TdlModel::A, 240.0, 606.76, None),
        (TdlModel::B, 240.0, 356.87, None),
        (TdlModel::A, 36.0, 91.013, Some(347.71)),
        (TdlModel::B, 36.0, 53.530, Some(172.20)),
        (TdlModel::C, 57.0, 147.35, Some(493.18)),
    ];
    for (model, ds, expected_mean, expected_max) in cases {
        let metrics = summarize(
            &scaled_profile(model, ds).unwrap(),
            -30.0,
            MeanMode::Unweighted,
        )
        .unwrap();
        assert!(
            (metrics.mean_excess_ns - expected_mean).abs() <= 0.02,
            "{model} ds={ds}: mean {} != {expected_mean} +- 0.02",
            metrics.mean_excess_ns
        );
        if let Some(expected_max) = expected_max {
            assert!(
                (metrics.eff_max_ns - expected_max).abs() <= 0.02,
                "{model} ds={ds}: max {} != {expected_max} +- 0.02",
                metrics.eff_max_ns
            );
        }
    }
    println!(
        "criterion 1 (TDL reference means/maxima at -30 dB, unweighted): PASS ({:?})",
        started.elapsed()
    );
}

#[test]
fn criterion_2_unit_normalization() {
    let mut failures = Vec::new();
    for model in TdlModel::ALL {
        let rms = normalization_check(model);
        let line = format!("  {model} normalized tap-table RMS = {rms:.4}");
        if (0.98..=1.02).contains(&rms) {
            println!("{line} (within [0.98, 1.02])");
        } else {
            println!("{line} (OUTSIDE [0.98, 1.02])");
            failures.push(format!("{model} table RMS {rms:.4} outside [0.98, 1.02]"));
        }
    }
    for preset in &pdpkit::tdl::PRESETS {
        let profile = tdl_pipeline(preset.model, preset.ds_ns);
        let rms = pdpkit::metrics::rms_delay_spread(&profile, MeanMode::PowerWeighted);
        let relative = (rms - preset.ds_ns).abs() / preset.ds_ns;
        let line = format!(
            "  {} {} ds={} ns: scaled power-weighted RMS = {rms:.3} ns ({:+.2}%)",
            preset.scenario,
            preset.model,
            preset.ds_ns,
            100.0 * (rms / preset.ds_ns - 1.0),
        );
        if relative <= 0.02 {
            println!("{line}");
        } else {
            println!("{line} (outside 2%)");
            failures.push(format!(
                "{} {} scaled RMS {rms:.3} ns deviates {:.1}% from ds {}",
                preset.scenario,
                preset.model,
                100.0 * relative,
                preset.ds_ns
            ));
        }
    }
    if failures.is_empty() {
        println!("criterion 2 (unit normalization of tap tables and scaled profiles): PASS");
    } else {
        println!("criterion 2 (unit normalization of tap tables and scaled profiles): FAIL");
    }
    assert!(failures.is_empty(), "{}", failures.join("; "));
}

#[test]
fn criterion_3_kl_divergence_properties() {
    let started = Instant::now();

    // identity
    let p = to_probability(&[0.5, 0.5], 1e-10).unwrap();
    assert!(kl_bits(&p, &p).unwrap().abs() <= 1e-12);

    // closed-form asymmetry witness
    let q = to_probability(&[0.25, 0.75], 1e-10).unwrap();
    let forward = kl_bits(&p, &q).unwrap();
    let backward = kl_bits(&q, &p).unwrap();
    assert!(
        (forward - 0.207519).abs() <= 1e-6,
        "D(p||q) = {forward}, expected 0.207519"
    );
    assert!(
        (backward - 0.188722).abs() <= 1e-6,
        "D(q||p) = {backward}, expected 0.188722"
    );

    // non-negativity over 1000 randomized floored pairs
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let n = 2 + (rng.next_u64() % 63) as usize;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    // mix of zeros and positive mass
                    if rng.next_u64().is_multiple_of(4) {
                        0.0
                    } else {
                        uniform(rng)
                    }
                })
                .collect()
        };
        let mut a = draw(&mut rng);
        let b = draw(&mut rng);
        if a.iter().sum::<f64>() == 0.0 {
            a[0] = 1.0;
        }
        let pa = to_probability(&a, 1e-10).unwrap();
        let pb = match to_probability(&b, 1e-10) {
            Ok(pb) => pb,
            Err(_) => continue, // all-zero draw
        };
        let bits = kl_bits(&pa, &pb).unwrap();
        assert!(bits >= -1e-12, "negative divergence {bits}");
        assert!(kl_bits(&pa, &pa).unwrap().abs() <= 1e-12);
    }

    // oracle equivalence on small supports: natural-log route
    let kl_oracle = |p: &[f64], q: &[f64]| -> f64 {
        let mut sum = 0.0;
        for i in 0..p.len() {
            sum += p[i] * (p[i] / q[i]).ln();
        }
        sum / std::f64::consts::LN_2
    };
    for n in 2..=16 {
        for _ in 0..60 {
            let a: Vec<f64> = (0..n).map(|_| uniform(&mut rng) + 1e-6).collect();
            let b: Vec<f64> = (0..n).map(|_| uniform(&mut rng) + 1e-6).collect();
            let pa = to_probability(&a, 1e-10).unwrap();
            let pb = to_probability(&b, 1e-10).unwrap();
            let bits = kl_bits(&pa, &pb).unwrap();
            let expected = kl_oracle(pa.masses(), pb.masses());
            assert!(
                (bits - expected).abs() <= 1e-12,
                "n={n}: {bits} vs oracle {expected}"
            );
        }
    }

    println!(
        "criterion 3 (KL identity, non-negativity x1000, asymmetry witness, <=16-bin oracle): PASS ({:?})",
        started.elapsed()
    );
}

/// Independent brute-force pipeline for criterion 4: peak-normalize,
/// threshold, re-zero, then raw-moment statistics, all in one pass of plain
/// loops.
fn oracle_metrics(
    taps: &[(f64, f64)],
    threshold_db: f64,
    unweighted: bool,
) -> (f64, f64, f64, usize) {
    let mut peak = f64::NEG_INFINITY;
    for &(_, p) in taps {
        if p > peak {
            peak = p;
        }
    }
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for &(d, p) in taps {
        if p - peak >= threshold_db {
            kept.push((d, p - peak));
        }
    }
    let mut origin = f64::INFINITY;
    for &(d, _) in &kept {
        if d < origin {
            origin = d;
        }
    }
    let mut sum_w = 0.0;
    let mut sum_wd = 0.0;
    let mut sum_wd2 = 0.0;
    let mut max_d = 0.0f64;
    for &(d, p) in &kept {
        let d = d - origin;
        let w = if unweighted {
            1.0
        } else {
            10f64.powf(p / 10.0)
        };
        sum_w += w;
        sum_wd += w * d;
        sum_wd2 += w * d * d;
        if d > max_d {
            max_d = d;
        }
    }
    let mean = sum_wd / sum_w;
    let variance = (sum_wd2 / sum_w - mean * mean).max(0.0);
    (mean, variance.sqrt(), max_d, kept.len())
}

#[test]
fn criterion_4_exhaustive_metric_oracle() {
    let started = Instant::now();
    let delays = [0.0, 25.0, 50.0, 100.0];
    let powers = [0.0, -3.0, -10.0, -29.0, -31.0];
    let mut cases = 0usize;

    // every non-empty delay subset x every power assignment
    for subset in 1u32..(1 << delays.len()) {
        let selected: Vec<f64> = delays
            .iter()
            .enumerate()
            .filter(|(i, _)| subset & (1 << i) != 0)
            .map(|(_, &d)| d)
            .collect();
        let k = selected.len();
        let mut assignment = vec![0usize; k];
        loop {
            let taps: Vec<(f64, f64)> = selected
                .iter()
                .zip(&assignment)
                .map(|(&d, &pi)| (d, powers[pi]))
                .collect();

            let peak = taps.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
            let profile = PowerDelayProfile::new(
                taps.iter()
                    .map(|&(d, p)| Tap {
                        excess_delay_ns: d,
                        power_db: p - peak,
                    })
                    .collect(),
                PowerFrame::PeakRelativeDb,
                None,
                "lattice",
            )
            .unwrap();

            for (mode, unweighted) in [
                (MeanMode::PowerWeighted, false),
                (MeanMode::Unweighted, true),
            ] {
                let metrics = summarize(&profile, -30.0, mode).unwrap();
                let (mean, rms, max, count) = oracle_metrics(&taps, -30.0, unweighted);
                let close = |a: f64, b: f64| {
                    let scale = a.abs().max(b.abs()).max(1.0);
                    (a - b).abs() / scale <= 1e-12
                };
                assert!(
                    close(metrics.mean_excess_ns, mean),
                    "mean {taps:?} {mode:?}: {} vs {mean}",
                    metrics.mean_excess_ns
                );
                assert!(
                    close(metrics.rms_ds_ns, rms),
                    "rms {taps:?} {mode:?}: {} vs {rms}",
                    metrics.rms_ds_ns
                );
                assert!(
                    close(metrics.eff_max_ns, max),
                    "max {taps:?} {mode:?}: {} vs {max}",
                    metrics.eff_max_ns
                );
                assert_eq!(metrics.tap_count, count, "taps {taps:?}");
            }
            cases += 1;

            // next base-5 assignment
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                assignment[i] += 1;
                if assignment[i] < powers.len() {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }

    // threshold boundary at -30 dB with the peak at 0: -29 survives, -31 is removed
    let boundary = PowerDelayProfile::new(
        vec![
            Tap {
                excess_delay_ns: 0.0,
                power_db: 0.0,
            },
            Tap {
                excess_delay_ns: 25.0,
                power_db: -29.0,
            },
            Tap {
                excess_delay_ns: 50.0,
                power_db: -31.0,
            },
        ],
        PowerFrame::PeakRelativeDb,
        None,
        "boundary",
    )
    .unwrap();
    let metrics = summarize(&boundary, -30.0, MeanMode::PowerWeighted).unwrap();
    assert_eq!(metrics.tap_count, 2);
    assert_eq!(metrics.eff_max_ns, 25.0);

    println!(
        "criterion 4 (exhaustive <=4-delay x 5-power lattice vs brute force, {cases} profiles x 2 modes): PASS ({:?})",
        started.elapsed()
    );
}

#[test]
fn criterion_5_synthetic_pipeline_properties() {
    let started = Instant::now();
    let reference = scaled_profile(TdlModel::A, 36.0).unwrap();
    let options = CompareOptions::default();

    for receiver in 0..1000u64 {
        let spec = SyntheticSpec {
            n_paths: 60,
            decay_constant_ns: 45.0,
            max_excess_ns: 400.0,
            base_power_dbm: -82.0,
            seed: 5000 + receiver,
        };
        let dataset = generate_synthetic(&spec).unwrap();

        // power conservation through noncoherent binning
        let pdp =
            PowerDelayProfile::from_records(&dataset.records, 1.0, CombineMode::Noncoherent, "syn")
                .unwrap();
        let input: f64 = dataset.records.iter().map(|r| r.linear_power()).sum();
        let output = pdp.total_linear_power();
        assert!(
            ((output - input) / input).abs() < 1e-9,
            "rx {receiver}: {output} vs {input}"
        );

        // effective max delay is non-increasing as the threshold rises
        let normalized = pdp.normalize_to_peak();
        let mut previous = f64::INFINITY;
        for threshold in [-40.0, -30.0, -20.0, -10.0] {
            let span = effective_max_delay(&normalized, threshold).unwrap();
            assert!(
                span <= previous,
                "rx {receiver}: span grew from {previous} to {span} at {threshold} dB"
            );
            previous = span;
        }

        // homogeneity: doubling all delays doubles every delay metric, and
        // the KL against a fixed reference stays finite and non-negative on
        // the rescaled union grid
        let site = normalized.apply_threshold(-30.0).unwrap().rezero_delays();
        let doubled = PowerDelayProfile::new(
            site.taps()
                .iter()
                .map(|t| Tap {
                    excess_delay_ns: 2.0 * t.excess_delay_ns,
                    power_db: t.power_db,
                })
                .collect(),
            PowerFrame::PeakRelativeDb,
            site.threshold_db(),
            "syn x2",
        )
        .unwrap();
        let m1 = summarize(&site, -30.0, MeanMode::PowerWeighted).unwrap();
        let m2 = summarize(&doubled, -30.0, MeanMode::PowerWeighted).unwrap();
        assert_eq!(m2.mean_excess_ns, 2.0 * m1.mean_excess_ns, "rx {receiver}");
        assert_eq!(m2.rms_ds_ns, 2.0 * m1.rms_ds_ns, "rx {receiver}");
        assert_eq!(m2.eff_max_ns, 2.0 * m1.eff_max_ns, "rx {receiver}");

        let kl = compare(&doubled, &reference, &options).unwrap();
        assert!(
            kl.bits.is_finite() && kl.bits >= 0.0,
            "rx {receiver}: {}",
            kl.bits
        );
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 10,
        "1000-receiver sweep took {elapsed:?} (budget 10 s)"
    );
    println!("criterion 5 (1000 seeded receivers: conservation, threshold monotonicity, homogeneity, finite KL): PASS ({elapsed:?})");
}

fn synthetic_batch_fixture(dir: &std::path::Path, receivers: u32) -> std::path::PathBuf {
    let mut datasets = Vec::new();
    for rx in 0..receivers {
        let mut dataset = generate_synthetic(&SyntheticSpec {
            n_paths: 50,
            decay_constant_ns: 40.0,
            max_excess_ns: 350.0,
            base_power_dbm: -83.0,
            seed: 9_600 + rx as u64,
        })
        .unwrap();
        dataset.transmitter_id = "AcceptTx".into();
        dataset.receiver_id = 100 + rx;
        datasets.push(dataset);
    }
    let path = dir.join("accept.csv");
    let mut buffer = Vec::new();
    write_paths_csv(&datasets, &mut buffer).unwrap();
    std::fs::write(&path, buffer).unwrap();
    path
}

fn batch_config(input: &std::path::Path, out: &std::path::Path) -> BatchConfig {
    BatchConfig::from_toml_str(&format!(
        r#"
        inputs = ["{}"]
        output_dir = "{}"
        [scenarios]
        AcceptTx = "umi_o2i"
        "#,
        input.display(),
        out.display(),
    ))
    .unwrap()
}

#[test]
fn criterion_6_batch_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let input = synthetic_batch_fixture(dir.path(), 12);

    let first = batch_config(&input, &dir.path().join("run1"));
    let second = batch_config(&input, &dir.path().join("run2"));
    let outcome1 = run_batch(&first).unwrap();
    let outcome2 = run_batch(&second).unwrap();
    assert!(outcome1.is_complete() && outcome2.is_complete());

    let csv1 = std::fs::read(dir.path().join("run1/report_AcceptTx.csv")).unwrap();
    let csv2 = std::fs::read(dir.path().join("run2/report_AcceptTx.csv")).unwrap();
    assert_eq!(csv1, csv2, "CSV reports differ between identical runs");
    let json1 = std::fs::read(dir.path().join("run1/report_AcceptTx.json")).unwrap();
    let json2 = std::fs::read(dir.path().join("run2/report_AcceptTx.json")).unwrap();
    assert_eq!(json1, json2, "JSON reports differ between identical runs");

    println!("criterion 6 (byte-identical batch reports across runs): PASS");
}

#[test]
fn criterion_7_report_schema_conformance() {
    let dir = tempfile::tempdir().unwrap();
    let input = synthetic_batch_fixture(dir.path(), 5);
    let config = batch_config(&input, &dir.path().join("out"));
    let outcome = run_batch(&config).unwrap();
    assert_eq!(outcome.rows_written, 5);

    let csv = std::fs::read_to_string(dir.path().join("out/report_AcceptTx.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        REPORT_CSV_HEADER,
        "column set must match the receiver-table layout"
    );

    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 10);
        // metric cells are formatted at 5 significant digits: re-formatting
        // the parsed value reproduces the cell, and KL values are
        // non-negative
        for cell in &cells[1..8] {
            let value: f64 = cell.parse().unwrap();
            assert_eq!(&format_sig5(value), cell);
        }
        for kl_cell in &cells[5..8] {
            assert!(kl_cell.parse::<f64>().unwrap() >= 0.0);
        }
        // provenance columns carry the KL grid and flooring settings
        assert_eq!(cells[8].parse::<f64>().unwrap(), config.kl.step_ns);
        assert_eq!(cells[9].parse::<f64>().unwrap(), config.kl.epsilon);
    }

    // Site-specific receiver-table values are intentionally NOT asserted
    // anywhere in this suite: the ray-tracing exports behind them are
    // proprietary and unavailable, so they are covered by the schema check
    // above plus criteria 3-6.
    println!("criterion 7 (report schema + 5-significant-digit formatting; site values declared non-reproducible): PASS");
}
