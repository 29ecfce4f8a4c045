//! Thin command-line front end over the pdpkit library.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pdpkit::divergence::{compare, CompareOptions, ResampleMethod};
use pdpkit::interchange::{load_pdp, save_pdp, write_pdp};
use pdpkit::metrics::{summarize, MeanMode};
use pdpkit::profile::{PowerDelayProfile, PowerFrame};
use pdpkit::report::{run_batch, write_plot_data, BatchConfig};
use pdpkit::tdl::{preset_ds, scaled_profile, Scenario, TdlModel};

#[derive(Parser)]
#[command(name = "pdpkit", version, about = "Power delay profile toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a scaled TDL reference profile in the PDP interchange format
    Tdl(TdlArgs),
    /// Compute delay statistics for a profile file
    Metrics(MetricsArgs),
    /// KL divergence between a reference profile and an approximation
    Compare(CompareArgs),
    /// Run the batch pipeline described by a TOML config
    Batch(BatchArgs),
    /// Emit stem-plot data for one or more profile files
    PlotData(PlotDataArgs),
}

#[derive(Args)]
struct TdlArgs {
    /// TDL model: A, B, or C
    #[arg(long)]
    model: TdlModel,
    /// Desired RMS delay spread in ns
    #[arg(long, allow_negative_numbers = true, conflicts_with = "scenario")]
    ds: Option<f64>,
    /// Use the preset delay spread for a scenario (umi-o2i or i2i)
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Output file (stdout when omitted)
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Profile in the PDP interchange format
    profile: PathBuf,
    /// Peak-relative power threshold in dB
    #[arg(long, default_value_t = -30.0, allow_negative_numbers = true)]
    threshold_db: f64,
    /// Delay weighting: power-weighted or unweighted
    #[arg(long, default_value = "power-weighted")]
    mean_mode: MeanMode,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Reference profile (the distribution P)
    reference: PathBuf,
    /// Approximating profile file (the distribution Q)
    #[arg(long, conflicts_with_all = ["model", "ds", "scenario"])]
    approx: Option<PathBuf>,
    /// Approximate with a TDL model instead of a file
    #[arg(long)]
    model: Option<TdlModel>,
    /// Delay spread for --model, in ns
    #[arg(long, allow_negative_numbers = true, conflicts_with = "scenario")]
    ds: Option<f64>,
    /// Preset delay spread for --model (umi-o2i or i2i)
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Resampling grid step in ns
    #[arg(long, default_value_t = 1.0)]
    step_ns: f64,
    /// Probability floor as a fraction of total mass
    #[arg(long, default_value_t = 1e-10)]
    epsilon: f64,
    /// Resampling method: bin-accumulate or linear-interp
    #[arg(long, default_value = "bin-accumulate")]
    method: ResampleMethod,
    /// Apply this peak-relative threshold to both profiles first
    #[arg(long, allow_negative_numbers = true)]
    threshold_db: Option<f64>,
    /// Swap the roles: report D(approx || reference)
    #[arg(long)]
    swap: bool,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BatchArgs {
    /// TOML batch configuration
    #[arg(long, short = 'c')]
    config: PathBuf,
}

#[derive(Args)]
struct PlotDataArgs {
    /// Profiles in the PDP interchange format
    #[arg(required = true)]
    profiles: Vec<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

fn write_output(
    output: Option<&PathBuf>,
    body: impl FnOnce(&mut dyn Write) -> pdpkit::Result<()>,
) -> pdpkit::Result<()> {
    match output {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            body(&mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
        }
    }
    Ok(())
}

/// Load a profile and bring it into the peak-relative frame.
fn load_normalized(path: &Path) -> pdpkit::Result<PowerDelayProfile> {
    let pdp = load_pdp(path)?;
    Ok(match pdp.frame() {
        PowerFrame::PeakRelativeDb => pdp,
        PowerFrame::AbsoluteDbm => pdp.normalize_to_peak(),
    })
}

fn cmd_tdl(args: &TdlArgs) -> pdpkit::Result<()> {
    let ds = match (args.ds, args.scenario) {
        (Some(ds), None) => ds,
        (None, Some(scenario)) => preset_ds(scenario, args.model),
        _ => {
            return Err(pdpkit::Error::Config(
                "exactly one of --ds or --scenario is required".into(),
            ))
        }
    };
    let profile = scaled_profile(args.model, ds)?;
    match &args.output {
        Some(path) => save_pdp(&profile, path)?,
        None => write_output(None, |w| Ok(write_pdp(&profile, w)?))?,
    }
    Ok(())
}

fn cmd_metrics(args: &MetricsArgs) -> pdpkit::Result<()> {
    let pdp = load_normalized(&args.profile)?;
    let metrics = summarize(&pdp, args.threshold_db, args.mean_mode)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&metrics).expect("metrics serialize")
        );
    } else {
        println!("source:          {}", pdp.source_id());
        println!("taps:            {}", metrics.tap_count);
        println!("threshold_db:    {}", metrics.threshold_db);
        println!("rms_ds_ns:       {:.4}", metrics.rms_ds_ns);
        println!(
            "mean_excess_ns:  {:.4} ({:?})",
            metrics.mean_excess_ns, metrics.mean_mode
        );
        println!("eff_max_ns:      {:.4}", metrics.eff_max_ns);
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> pdpkit::Result<()> {
    let mut reference = load_normalized(&args.reference)?;
    let mut approx = match (&args.approx, args.model) {
        (Some(path), None) => load_normalized(path)?,
        (None, Some(model)) => {
            let ds = match (args.ds, args.scenario) {
                (Some(ds), None) => ds,
                (None, Some(scenario)) => preset_ds(scenario, model),
                _ => {
                    return Err(pdpkit::Error::Config(
                        "--model needs exactly one of --ds or --scenario".into(),
                    ))
                }
            };
            scaled_profile(model, ds)?
        }
        _ => {
            return Err(pdpkit::Error::Config(
                "exactly one of --approx or --model is required".into(),
            ))
        }
    };
    if let Some(threshold) = args.threshold_db {
        reference = reference.apply_threshold(threshold)?;
        approx = approx.apply_threshold(threshold)?;
    }
    if args.swap {
        std::mem::swap(&mut reference, &mut approx);
    }
    let options = CompareOptions {
        step_ns: args.step_ns,
        epsilon: args.epsilon,
        method: args.method,
    };
    let result = compare(&reference, &approx, &options)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&result).expect("result serialize")
        );
    } else {
        println!(
            "D({} || {}) = {:.5} bits  [grid {} bins x {} ns from {} ns, epsilon {:e}]",
            result.reference_id,
            result.approx_id,
            result.bits,
            result.grid.n_bins,
            result.grid.step_ns,
            result.grid.start_ns,
            result.epsilon,
        );
    }
    Ok(())
}

fn cmd_batch(args: &BatchArgs) -> pdpkit::Result<bool> {
    let mut config = BatchConfig::load(&args.config)?;
    if let Ok(dir) = std::env::var("PDPKIT_OUTPUT_DIR") {
        config.output_dir = PathBuf::from(dir);
    }
    let outcome = run_batch(&config)?;
    println!(
        "wrote {} rows across {} report files to {}",
        outcome.rows_written,
        outcome.report_paths.len(),
        config.output_dir.display()
    );
    for skipped in &outcome.skipped {
        eprintln!(
            "skipped {}{}: {}",
            skipped.transmitter_id,
            skipped
                .receiver_id
                .map(|rx| format!("/rx{rx}"))
                .unwrap_or_default(),
            skipped.reason
        );
    }
    Ok(outcome.is_complete())
}

fn cmd_plot_data(args: &PlotDataArgs) -> pdpkit::Result<()> {
    let profiles = args
        .profiles
        .iter()
        .map(|p| load_pdp(p))
        .collect::<pdpkit::Result<Vec<_>>>()?;
    write_output(args.output.as_ref(), |w| Ok(write_plot_data(&profiles, w)?))
}

fn run(cli: Cli) -> pdpkit::Result<ExitCode> {
    match cli.command {
        Command::Tdl(args) => cmd_tdl(&args).map(|()| ExitCode::SUCCESS),
        Command::Metrics(args) => cmd_metrics(&args).map(|()| ExitCode::SUCCESS),
        Command::Compare(args) => cmd_compare(&args).map(|()| ExitCode::SUCCESS),
        Command::Batch(args) => cmd_batch(&args).map(|complete| {
            if complete {
                ExitCode::SUCCESS
            } else {
                // partial data failure
                ExitCode::from(2)
            }
        }),
        Command::PlotData(args) => cmd_plot_data(&args).map(|()| ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
