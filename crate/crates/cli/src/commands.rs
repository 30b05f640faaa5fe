use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use swingflow::eval::{
    majority_baseline, repeat_loocv, round1, sweep_hidden_units, Dataset, LoocvReport, SweepTable,
};
use swingflow::features::{load_features, reduction_report, write_features, FeatureVector};
use swingflow::fsutil::write_atomic;
use swingflow::mocap::{
    criteria, labels_for, load_labels, load_rois, parse_clip, LabelRecord, ParseOptions, RoiSpec,
};
use swingflow::pipeline::{extract_swing, PipelineError};
use swingflow::rbf::{self, RbfModel, TrainConfig};
use swingflow::synth::{default_preset, generate_dataset, SwingArchetype, SynthError};
use swingflow::viewer::build_bundle;
use swingflow::Label;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult, Classify, Failure};

pub struct Context {
    pub command: &'static str,
    pub cfg: RunConfig,
}

impl Context {
    pub fn new(command: &'static str, cfg: RunConfig) -> Self {
        Context { command, cfg }
    }

    /// Resolved config and seed, embedded in every artifact.
    fn provenance(&self) -> Value {
        json!({
            "tool": "swingflow",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.cfg.seed,
            "config": self.cfg,
        })
    }

    fn provenance_with(&self, key: &str, value: Value) -> Value {
        let mut p = self.provenance();
        p[key] = value;
        p
    }

    fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            convention: self.cfg.source_convention,
            scale: self.cfg.scale,
            sample_rate_hz: self.cfg.sample_rate_hz,
        }
    }

    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            rng_seed: self.cfg.seed,
            ..self.cfg.train.clone()
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    write_atomic(path, bytes)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
        .io()
}

fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value).pipeline()?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
        .io()
}

/// `<path>.provenance.json`, for artifacts that cannot embed it.
fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".provenance.json");
    PathBuf::from(s)
}

#[derive(Debug, Serialize)]
struct SwingFailure {
    clip_id: String,
    error: String,
}

/// Logs a per-swing failure, or aborts under `--strict`.
fn swing_failed(ctx: &Context, failures: &mut Vec<SwingFailure>, clip_id: &str, error: String) -> CliResult<()> {
    eprintln!("skipped {clip_id}: {error}");
    failures.push(SwingFailure {
        clip_id: clip_id.to_owned(),
        error,
    });
    if ctx.cfg.strict {
        return Err(CliError::new(
            Failure::Strict,
            anyhow::anyhow!("--strict: swing {clip_id} failed; no output written"),
        ));
    }
    Ok(())
}

fn load_roi_list(path: &Path, only: Option<&str>) -> CliResult<Vec<RoiSpec>> {
    let mut rois = load_rois(path).input()?;
    if rois.is_empty() {
        return Err(CliError::usage(format!("{} lists no regions of interest", path.display())));
    }
    rois.sort_by(|a, b| a.clip_id.cmp(&b.clip_id));
    if let Some(w) = rois.windows(2).find(|w| w[0].clip_id == w[1].clip_id) {
        return Err(CliError::new(
            Failure::Input,
            anyhow::anyhow!("{}: more than one ROI for clip {}", path.display(), w[0].clip_id),
        ));
    }
    if let Some(id) = only {
        rois.retain(|r| r.clip_id == id);
        if rois.is_empty() {
            return Err(CliError::usage(format!("no ROI for clip {id}")));
        }
    }
    Ok(rois)
}

fn clip_path(dir: &Path, clip_id: &str) -> PathBuf {
    dir.join(format!("{clip_id}.csv"))
}

pub fn extract(ctx: &Context) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let clips = RunConfig::require(&cfg.clips_dir, "--clips")?;
    let roi_file = RunConfig::require(&cfg.roi_file, "--rois")?;
    let out = RunConfig::require(&cfg.output, "--out")?;
    let rois = load_roi_list(roi_file, None)?;
    let opts = ctx.parse_options();

    let mut features: Vec<FeatureVector> = Vec::new();
    let mut failures = Vec::new();
    for roi in &rois {
        let result = parse_clip(&clip_path(clips, &roi.clip_id), &opts)
            .map_err(PipelineError::from)
            .and_then(|clip| extract_swing(&clip, roi, cfg.sweet_spot));
        match result {
            Ok(k) => features.push(k.features),
            Err(e) => swing_failed(ctx, &mut failures, &roi.clip_id, e.to_string())?,
        }
    }
    if features.is_empty() {
        return Err(CliError::new(
            Failure::Pipeline,
            anyhow::anyhow!("no swing could be extracted"),
        ));
    }
    let mut csv = Vec::new();
    write_features(&features, &mut csv).pipeline()?;
    write_file(out, &csv)?;
    let side = json!({
        "provenance": ctx.provenance(),
        "extracted": features.len(),
        "skipped": failures,
    });
    write_file(&sidecar(out), &to_json(&side)?)?;
    log::info!("{} swings extracted, {} skipped", features.len(), failures.len());
    Ok(())
}

fn resolve_criterion(cfg: &RunConfig, records: &[LabelRecord]) -> CliResult<String> {
    let all = criteria(records);
    match &cfg.criterion {
        Some(c) if all.contains(c) => Ok(c.clone()),
        Some(c) => Err(CliError::new(
            Failure::Input,
            anyhow::anyhow!("criterion `{c}` not in labels (have: {})", all.join(", ")),
        )),
        None if all.len() == 1 => Ok(all[0].clone()),
        None => Err(CliError::usage(format!(
            "--criterion is required; labels have: {}",
            all.join(", ")
        ))),
    }
}

fn load_inputs(cfg: &RunConfig) -> CliResult<(Vec<FeatureVector>, Vec<LabelRecord>)> {
    let features = load_features(RunConfig::require(&cfg.features_file, "--features")?).input()?;
    let labels = load_labels(RunConfig::require(&cfg.labels_file, "--labels")?).input()?;
    Ok((features, labels))
}

fn dataset(features: &[FeatureVector], records: &[LabelRecord], criterion: &str) -> CliResult<Dataset> {
    Dataset::from_features(features, &labels_for(records, criterion))
        .map_err(|e| anyhow::anyhow!("criterion {criterion}: {e}"))
        .input()
}

pub fn train(ctx: &Context) -> CliResult<()> {
    let out = RunConfig::require(&ctx.cfg.output, "--out")?;
    let (features, records) = load_inputs(&ctx.cfg)?;
    let criterion = resolve_criterion(&ctx.cfg, &records)?;
    let data = dataset(&features, &records, &criterion)?;
    let rows: Vec<&[f64]> = data.samples().iter().map(|s| s.values.as_slice()).collect();
    let labels: Vec<Label> = data.samples().iter().map(|s| s.label).collect();
    let mut model = rbf::train(&rows, &labels, &ctx.train_config()).pipeline()?;
    model.provenance = Some(ctx.provenance_with("criterion", json!(criterion)));
    write_file(out, model.to_json().pipeline()?.as_bytes())?;
    println!(
        "trained {} hidden units on {} swings ({criterion}); training accuracy {:.1}%",
        model.hidden_units,
        data.len(),
        model.diagnostics.training_accuracy
    );
    Ok(())
}

pub fn evaluate(ctx: &Context) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let out = RunConfig::require(&cfg.output, "--out")?;
    let model_path = RunConfig::require(&cfg.model_file, "--model")?;
    let model = RbfModel::from_json(&read_text(model_path)?)
        .map_err(|e| anyhow::anyhow!("{}: {e}", model_path.display()))
        .input()?;
    let features = load_features(RunConfig::require(&cfg.features_file, "--features")?).input()?;
    let actual = match &cfg.labels_file {
        Some(p) => {
            let records = load_labels(p).input()?;
            let mut c = cfg.clone();
            if c.criterion.is_none() {
                c.criterion = model
                    .provenance
                    .as_ref()
                    .and_then(|p| p.get("criterion"))
                    .and_then(Value::as_str)
                    .map(str::to_owned);
            }
            let criterion = resolve_criterion(&c, &records)?;
            Some(labels_for(&records, &criterion))
        }
        None => None,
    };

    let mut w = csv_writer();
    let mut header = vec!["swing_id", "score", "predicted"];
    if actual.is_some() {
        header.push("actual");
    }
    w.write_record(&header).pipeline()?;
    let mut errors = Vec::new();
    for f in &features {
        let p = model
            .predict(&f.values)
            .map_err(|e| anyhow::anyhow!("{}: {e}", f.swing_id))
            .input()?;
        let mut row = vec![f.swing_id.clone(), p.score.to_string(), p.label.to_string()];
        if let Some(labels) = &actual {
            let truth = labels.get(&f.swing_id).ok_or_else(|| {
                CliError::new(Failure::Input, anyhow::anyhow!("no label for swing {}", f.swing_id))
            })?;
            errors.push(*truth != p.label);
            row.push(truth.to_string());
        }
        w.write_record(&row).pipeline()?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}")).pipeline()?;
    write_file(out, &bytes)?;
    write_file(&sidecar(out), &to_json(&json!({ "provenance": ctx.provenance() }))?)?;
    if !errors.is_empty() {
        let acc = swingflow::eval::accuracy(&errors).pipeline()?;
        println!("accuracy {:.1}% over {} swings", acc, errors.len());
    }
    Ok(())
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LoocvFile {
    pub provenance: Value,
    pub majority_baseline: f64,
    pub report: LoocvReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepFile {
    pub provenance: Value,
    pub table: SweepTable,
}

pub fn loocv(ctx: &Context, table: Option<&Path>) -> CliResult<()> {
    let (features, records) = load_inputs(&ctx.cfg)?;
    let criterion = resolve_criterion(&ctx.cfg, &records)?;
    let data = dataset(&features, &records, &criterion)?;
    let report = repeat_loocv(&data, &criterion, &ctx.cfg.train, ctx.cfg.repeats, ctx.cfg.seed).pipeline()?;
    let baseline = majority_baseline(&data).pipeline()?.accuracy;
    let mut text = report.render();
    let _ = writeln!(text, "majority-class baseline {:.1}%", round1(baseline));
    print!("{text}");
    if let Some(out) = &ctx.cfg.output {
        let file = LoocvFile {
            provenance: ctx.provenance(),
            majority_baseline: baseline,
            report,
        };
        write_file(out, &to_json(&file)?)?;
    }
    if let Some(t) = table {
        write_file(t, text.as_bytes())?;
    }
    Ok(())
}

pub fn sweep(ctx: &Context, table: Option<&Path>) -> CliResult<()> {
    let (features, records) = load_inputs(&ctx.cfg)?;
    let names = match &ctx.cfg.criterion {
        Some(_) => vec![resolve_criterion(&ctx.cfg, &records)?],
        None => criteria(&records),
    };
    if names.is_empty() {
        return Err(CliError::new(Failure::Input, anyhow::anyhow!("labels file has no records")));
    }
    if ctx.cfg.hidden_units_sweep.is_empty() {
        return Err(CliError::usage("no hidden-unit counts to sweep"));
    }
    let datasets = names
        .iter()
        .map(|c| Ok((c.clone(), dataset(&features, &records, c)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let result = sweep_hidden_units(
        &datasets,
        &ctx.cfg.hidden_units_sweep,
        ctx.cfg.repeats,
        &ctx.cfg.train,
        ctx.cfg.seed,
    )
    .pipeline()?;
    let text = result.render();
    print!("{text}");
    if let Some(out) = &ctx.cfg.output {
        let file = SweepFile {
            provenance: ctx.provenance(),
            table: result,
        };
        write_file(out, &to_json(&file)?)?;
    }
    if let Some(t) = table {
        write_file(t, text.as_bytes())?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct SpecEntry {
    archetype: SwingArchetype,
    count: usize,
}

pub fn synth(ctx: &Context, archetypes: Option<&Path>) -> CliResult<()> {
    let out = RunConfig::require(&ctx.cfg.output, "--out")?;
    let spec: Vec<(SwingArchetype, usize)> = match archetypes {
        Some(p) => serde_json::from_str::<Vec<SpecEntry>>(&read_text(p)?)
            .map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))
            .input()?
            .into_iter()
            .map(|e| (e.archetype, e.count))
            .collect(),
        None => default_preset(),
    };
    let mut ds = generate_dataset(&spec, ctx.cfg.seed).input()?;
    ds.manifest.provenance = Some(ctx.provenance());
    ds.write(out).map_err(|e| {
        let kind = match e {
            SynthError::Io { .. } => Failure::Io,
            _ => Failure::Pipeline,
        };
        CliError::new(kind, e)
    })?;
    let labels = ds.labels();
    let crits: BTreeSet<&str> = labels.iter().map(|l| l.criterion.as_str()).collect();
    println!(
        "wrote {} swings ({} criteria) to {}",
        ds.swings.len(),
        crits.len(),
        out.display()
    );
    Ok(())
}

pub fn report(
    ctx: &Context,
    durations: &[usize],
    markers: usize,
    sweep: Option<&Path>,
    loocv: Option<&Path>,
) -> CliResult<()> {
    if durations.is_empty() || durations.contains(&0) || markers == 0 {
        return Err(CliError::usage("durations and marker count must be positive"));
    }
    let mut s = String::new();
    let _ = writeln!(s, "swingflow run report");
    let _ = writeln!(s, "version {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "master seed {}", ctx.cfg.seed);
    let _ = writeln!(s);
    let _ = writeln!(s, "resolved config:");
    let cfg = String::from_utf8(to_json(&ctx.cfg)?).pipeline()?;
    let _ = write!(s, "{cfg}");
    let _ = writeln!(s);
    let _ = writeln!(s, "Spatial feature reduction");
    let _ = writeln!(s, "{:<12}{:<9}{:<11}{:<12}reduction", "ROI frames", "markers", "input dim", "output dim");
    for &d in durations {
        let r = reduction_report(d, markers);
        let _ = writeln!(
            s,
            "{:<12}{:<9}{:<11}{:<12}{}",
            r.roi_duration,
            r.marker_count,
            r.input_dim,
            r.output_dim,
            r.reduction_label()
        );
    }
    if let Some(p) = loocv {
        let file: LoocvFile = serde_json::from_str(&read_text(p)?)
            .map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))
            .input()?;
        let _ = writeln!(s);
        let _ = write!(s, "{}", file.report.render());
        let _ = writeln!(s, "majority-class baseline {:.1}%", round1(file.majority_baseline));
    }
    if let Some(p) = sweep {
        let file: SweepFile = serde_json::from_str(&read_text(p)?)
            .map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))
            .input()?;
        let _ = writeln!(s);
        let _ = write!(s, "{}", file.table.render());
        if let Some(r) = file.table.reports.first() {
            let seeds: Vec<String> = r.seeds.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "repeat seeds: {}", seeds.join(", "));
        }
    }
    match &ctx.cfg.output {
        Some(out) => write_file(out, s.as_bytes()),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

pub fn export_viewer(ctx: &Context, only: Option<&str>) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let clips = RunConfig::require(&cfg.clips_dir, "--clips")?;
    let roi_file = RunConfig::require(&cfg.roi_file, "--rois")?;
    let out = RunConfig::require(&cfg.output, "--out")?;
    let rois = load_roi_list(roi_file, only)?;
    let labels = match &cfg.labels_file {
        Some(p) => load_labels(p).input()?,
        None => Vec::new(),
    };
    let opts = ctx.parse_options();
    let mut failures = Vec::new();
    let mut pending = Vec::new();
    for roi in &rois {
        let clip = match parse_clip(&clip_path(clips, &roi.clip_id), &opts) {
            Ok(c) => c,
            Err(e) => {
                swing_failed(ctx, &mut failures, &roi.clip_id, e.to_string())?;
                continue;
            }
        };
        let kin = match extract_swing(&clip, roi, cfg.sweet_spot) {
            Ok(k) => Some(k),
            Err(e) => {
                if cfg.strict {
                    swing_failed(ctx, &mut failures, &roi.clip_id, e.to_string())?;
                }
                log::warn!("{}: no overlay ({e})", roi.clip_id);
                None
            }
        };
        let mut bundle = build_bundle(&clip, Some(roi), kin.as_ref(), &labels).pipeline()?;
        bundle.provenance = Some(ctx.provenance());
        pending.push((out.join(format!("{}.json", roi.clip_id)), bundle.to_json().pipeline()?));
    }
    if pending.is_empty() {
        return Err(CliError::new(Failure::Pipeline, anyhow::anyhow!("no bundle could be built")));
    }
    for (path, text) in &pending {
        write_file(path, text.as_bytes())?;
    }
    println!("wrote {} viewer bundles to {}", pending.len(), out.display());
    Ok(())
}
