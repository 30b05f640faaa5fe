//! `swingflow` command-line driver.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swingflow::kinematics::SweetSpotMethod;
use swingflow::rbf::WidthHeuristic;
use swingflow::SourceConvention;

use config::{parse_kebab, RunConfig};
use error::CliResult;

#[derive(Parser, Debug)]
#[command(name = "swingflow", version, about = "Racquet swing assessment from motion capture")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalArgs {
    /// TOML or JSON run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    hidden_units: Option<usize>,
    /// Repeated LOO runs.
    #[arg(long, global = true)]
    repeats: Option<usize>,
    /// Label criterion (for sweep, restricts to this one).
    #[arg(long, global = true)]
    criterion: Option<String>,
    /// Abort with exit 1 on any per-swing failure instead of skipping it.
    #[arg(long, global = true)]
    strict: bool,
    /// canonical, rh-xyz-zup or lh-xzy.
    #[arg(long, global = true, value_parser = parse_kebab::<SourceConvention>)]
    source_convention: Option<SourceConvention>,
    /// nearest-center or global.
    #[arg(long, global = true, value_parser = parse_kebab::<WidthHeuristic>)]
    width_heuristic: Option<WidthHeuristic>,
    /// circumcenter or centroid.
    #[arg(long, global = true, value_parser = parse_kebab::<SweetSpotMethod>)]
    sweet_spot: Option<SweetSpotMethod>,
    /// Multiplier from file units to metres.
    #[arg(long, global = true)]
    scale: Option<f64>,
    #[arg(long, global = true)]
    sample_rate: Option<f64>,
    /// Log progress to stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clips + ROIs to a `swing_id,f0..f11` feature CSV.
    Extract {
        #[arg(long)]
        clips: Option<PathBuf>,
        #[arg(long)]
        rois: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trains an RBF model on features and one label criterion.
    Train {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scores features with a trained model into a prediction CSV.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
        /// Adds an `actual` column and prints accuracy.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated leave-one-out cross-validation for one criterion.
    Loocv {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Report JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rendered report text.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Repeated LOO over hidden-unit counts and criteria.
    Sweep {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Hidden-unit counts, comma separated.
        #[arg(long, value_delimiter = ',')]
        h_values: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Writes a labelled synthetic dataset.
    Synth {
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON list of `{"archetype": {...}, "count": n}`; default is the 14-swing preset.
        #[arg(long)]
        archetypes: Option<PathBuf>,
    },
    /// Human-readable run report: config, reduction table, optional sweep/LOO results.
    Report {
        /// ROI durations for the reduction table.
        #[arg(long, value_delimiter = ',', default_values_t = [13usize, 10, 7])]
        durations: Vec<usize>,
        #[arg(long, default_value_t = 22)]
        markers: usize,
        /// Sweep JSON from `sweep --out`.
        #[arg(long)]
        sweep: Option<PathBuf>,
        /// Report JSON from `loocv --out`.
        #[arg(long)]
        loocv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes one viewer JSON bundle per ROI.
    ExportViewer {
        #[arg(long)]
        clips: Option<PathBuf>,
        #[arg(long)]
        rois: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Only this clip.
        #[arg(long)]
        clip: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Extract { .. } => "extract",
            Command::Train { .. } => "train",
            Command::Evaluate { .. } => "evaluate",
            Command::Loocv { .. } => "loocv",
            Command::Sweep { .. } => "sweep",
            Command::Synth { .. } => "synth",
            Command::Report { .. } => "report",
            Command::ExportViewer { .. } => "export-viewer",
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_path(slot: &mut Option<PathBuf>, value: &Option<PathBuf>) {
    if value.is_some() {
        slot.clone_from(value);
    }
}

fn resolve(global: &GlobalArgs, command: &Command) -> CliResult<RunConfig> {
    let mut cfg = match &global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.seed, global.seed);
    set(&mut cfg.train.hidden_units, global.hidden_units);
    set(&mut cfg.repeats, global.repeats);
    set(&mut cfg.source_convention, global.source_convention);
    set(&mut cfg.train.width_heuristic, global.width_heuristic);
    set(&mut cfg.sweet_spot, global.sweet_spot);
    set(&mut cfg.scale, global.scale);
    set(&mut cfg.sample_rate_hz, global.sample_rate);
    if global.criterion.is_some() {
        cfg.criterion.clone_from(&global.criterion);
    }
    cfg.strict |= global.strict;
    match command {
        Command::Extract { clips, rois, out } => {
            set_path(&mut cfg.clips_dir, clips);
            set_path(&mut cfg.roi_file, rois);
            set_path(&mut cfg.output, out);
        }
        Command::Train { features, labels, out } => {
            set_path(&mut cfg.features_file, features);
            set_path(&mut cfg.labels_file, labels);
            set_path(&mut cfg.output, out);
        }
        Command::Evaluate {
            model,
            features,
            labels,
            out,
        } => {
            set_path(&mut cfg.model_file, model);
            set_path(&mut cfg.features_file, features);
            set_path(&mut cfg.labels_file, labels);
            set_path(&mut cfg.output, out);
        }
        Command::Loocv {
            features,
            labels,
            out,
            ..
        } => {
            set_path(&mut cfg.features_file, features);
            set_path(&mut cfg.labels_file, labels);
            set_path(&mut cfg.output, out);
        }
        Command::Sweep {
            features,
            labels,
            h_values,
            out,
            ..
        } => {
            set_path(&mut cfg.features_file, features);
            set_path(&mut cfg.labels_file, labels);
            set(&mut cfg.hidden_units_sweep, h_values.clone());
            set_path(&mut cfg.output, out);
        }
        Command::Synth { out, .. } | Command::Report { out, .. } => {
            set_path(&mut cfg.output, out);
        }
        Command::ExportViewer {
            clips,
            rois,
            labels,
            out,
            ..
        } => {
            set_path(&mut cfg.clips_dir, clips);
            set_path(&mut cfg.roi_file, rois);
            set_path(&mut cfg.labels_file, labels);
            set_path(&mut cfg.output, out);
        }
    }
    if cfg.repeats == 0 {
        return Err(error::CliError::usage("--repeats must be at least 1"));
    }
    if !(cfg.scale.is_finite() && cfg.scale > 0.0) {
        return Err(error::CliError::usage("--scale must be positive"));
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = resolve(&cli.global, &cli.command)?;
    let ctx = commands::Context::new(cli.command.name(), cfg);
    match &cli.command {
        Command::Extract { .. } => commands::extract(&ctx),
        Command::Train { .. } => commands::train(&ctx),
        Command::Evaluate { .. } => commands::evaluate(&ctx),
        Command::Loocv { table, .. } => commands::loocv(&ctx, table.as_deref()),
        Command::Sweep { table, .. } => commands::sweep(&ctx, table.as_deref()),
        Command::Synth { archetypes, .. } => commands::synth(&ctx, archetypes.as_deref()),
        Command::Report {
            durations,
            markers,
            sweep,
            loocv,
            ..
        } => commands::report(&ctx, durations, *markers, sweep.as_deref(), loocv.as_deref()),
        Command::ExportViewer { clip, .. } => commands::export_viewer(&ctx, clip.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
