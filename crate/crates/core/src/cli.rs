//! Batch command-line front end: `preprocess`, `synth`, `grid`, `report`,
//! `meta`, `fit` and `predict`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::data::{
    self, load_csv, preprocess, read_dataset, synth_classification, write_dataset, Dataset, LoadOptions, SynthSpec,
};
use crate::error::Error;
use crate::experiment::{
    self, analyze, br_curves, format_histogram, format_winners_table, read_grid_csv, read_grid_rows,
    read_winners_csv, render_curves_svg, run_grid_missing, write_grid_rows, write_winners_csv, GridResult, GridRow,
    GridSpec, WinnerReport, DEFAULT_BR_VALUES,
};
use crate::forest::{fit_forest, load_model, named_config, named_configs, save_model, ForestConfig, SavedModel};
use crate::meta::{
    self, best_rate_targets, correlation_table, dataset_kl, meta_evaluate, read_kl_csv, regime_labels, write_kl_csv,
    FeaturePool, KLStats, MetaFeatureMatrix, MetaGrid,
};

/// Rates above this trigger a warning; nothing is capped.
const BR_WARN_ABOVE: f64 = 10.0;

#[derive(Debug, Parser)]
#[command(name = "brforest", version, about = "Random forests with an unrestricted bootstrap rate")]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean and encode a raw CSV into a dataset manifest plus numeric CSV.
    Preprocess(PreprocessArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// Run the (configuration x bootstrap rate) repeated two-fold CV grid.
    Grid(GridArgs),
    /// Winner tables, winning-rate histograms and BR curve plots.
    Report(ReportArgs),
    /// k_l meta-features, correlation table and the regime classifier.
    Meta(MetaArgs),
    /// Fit one forest on a whole dataset and save it.
    Fit(FitArgs),
    /// Predict rows of a CSV with a saved forest.
    Predict(PredictArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Raw CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the class column.
    #[arg(long)]
    pub target: String,
    /// Dataset name (default: input file stem).
    #[arg(long)]
    pub name: Option<String>,
    /// Output directory for `<stem>.json` and `<stem>.csv`.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Columns to treat as categorical even if numeric.
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Columns to drop (identifiers and the like).
    #[arg(long, value_delimiter = ',')]
    pub drop: Vec<String>,
    /// The file has no header; columns are named c0, c1, ...
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Generator {
    Hypercube,
    Twonorm,
    Threenorm,
    Ringnorm,
    Waveform,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value = "hypercube")]
    pub generator: Generator,
    #[arg(long, default_value_t = 300)]
    pub samples: usize,
    /// Hypercube generator only.
    #[arg(long, default_value_t = 2)]
    pub features: usize,
    /// Hypercube generator only.
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    /// Hypercube generator only.
    #[arg(long, default_value_t = 1)]
    pub clusters_per_class: usize,
    /// Hypercube generator only.
    #[arg(long, default_value_t = 1.0)]
    pub class_sep: f64,
    #[arg(long, env = "BRFOREST_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Dataset manifests written by `preprocess` or `synth`.
    #[arg(long = "dataset", num_args = 1..)]
    pub datasets: Vec<PathBuf>,
    /// JSON run manifest; command-line flags override its fields.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Repeats of two-fold CV (default 20).
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Use 200 repeats.
    #[arg(long = "paper-scale")]
    pub full_scale: bool,
    /// Configuration names, e.g. `base,nt_500` (default: all eighteen).
    #[arg(long, value_delimiter = ',')]
    pub configs: Vec<String>,
    /// Bootstrap rates (default 0.2,0.4,0.6,0.8,1.0,1.2,2.0,3.0,4.0,5.0).
    #[arg(long, value_delimiter = ',')]
    pub br: Vec<f64>,
    /// Override the tree count of every configuration.
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long, env = "BRFOREST_SEED")]
    pub seed: Option<u64>,
    /// Discard existing results that were produced with a different grid.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Grid CSVs written by `grid`.
    #[arg(long = "grid", num_args = 1.., required = true)]
    pub grids: Vec<PathBuf>,
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PoolArg {
    /// The 65 k_l values only.
    Base,
    /// Base values plus pairwise interactions.
    Interactions,
    /// Base values plus class-scaled values.
    Scaled,
    /// Base, class-scaled and interactions.
    All,
}

impl From<PoolArg> for FeaturePool {
    fn from(p: PoolArg) -> Self {
        match p {
            PoolArg::Base => FeaturePool::BASE,
            PoolArg::Interactions => FeaturePool::default(),
            PoolArg::Scaled => FeaturePool {
                class_scaled: true,
                interactions: false,
            },
            PoolArg::All => FeaturePool::ALL,
        }
    }
}

#[derive(Debug, Args)]
pub struct MetaArgs {
    /// Dataset manifests to compute k_l statistics from.
    #[arg(long = "dataset", num_args = 1..)]
    pub datasets: Vec<PathBuf>,
    /// Precomputed k_l CSV (instead of, or in addition to, --dataset).
    #[arg(long)]
    pub kl: Option<PathBuf>,
    /// Grid CSVs; their winners give the regime labels and correlation targets.
    #[arg(long = "grid", num_args = 1..)]
    pub grids: Vec<PathBuf>,
    /// Winners CSV to take labels from instead of grids.
    #[arg(long)]
    pub winners: Option<PathBuf>,
    /// Keep only datasets whose max p-value is at most this for the classifier.
    #[arg(long)]
    pub p_threshold: Option<f64>,
    #[arg(long, value_enum, default_value = "interactions")]
    pub pool: PoolArg,
    /// Evaluate all eighteen configurations instead of RF(base) only.
    #[arg(long = "paper-scale")]
    pub full_scale: bool,
    #[arg(long, default_value_t = 10)]
    pub max_features: usize,
    /// Skip the classifier; only write k_l statistics and correlations.
    #[arg(long)]
    pub no_classifier: bool,
    #[arg(long, env = "BRFOREST_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "meta")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "RF(base)")]
    pub config: String,
    #[arg(long, default_value_t = 1.0)]
    pub br: f64,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long, env = "BRFOREST_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Use hard (majority) voting instead of soft voting.
    #[arg(long)]
    pub hard_voting: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CSV of encoded features with a header; columns are matched by
    /// feature name when possible, otherwise taken in order.
    #[arg(long)]
    pub input: PathBuf,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Desk,
    Full,
}

/// JSON run description for `grid --manifest`. Relative paths resolve
/// against the manifest's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub datasets: Vec<PathBuf>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default)]
    pub configs: Option<Vec<String>>,
    #[serde(default)]
    pub br_values: Option<Vec<f64>>,
    #[serde(default)]
    pub repeats: Option<usize>,
    #[serde(default)]
    pub n_trees: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Error raised by a subcommand, carrying its exit code class.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(Error),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Data(e) => write!(f, "{e}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => CliError::Usage(m),
            Error::EmptyNode => CliError::Internal(e.to_string()),
            other => CliError::Data(other),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Data(Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Parses `args` (including the program name), runs the command, and writes
/// human-readable output to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> CliResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = write!(out, "{e}");
            return Ok(());
        }
        Err(e) => return Err(usage(e.to_string().trim_end().trim_start_matches("error: ").to_owned())),
    };
    match cli.threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Internal(e.to_string()))?;
            // `out` need not be Send, so the pool writes into a buffer
            let mut buf = Vec::new();
            let result = pool.install(|| execute(cli.command, &mut buf));
            out.write_all(&buf).map_err(|e| CliError::Internal(e.to_string()))?;
            result
        }
        None => execute(cli.command, out),
    }
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    match run(std::env::args_os(), &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("brforest: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Preprocess(a) => cmd_preprocess(a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Grid(a) => cmd_grid(a, out),
        Command::Report(a) => cmd_report(a, out),
        Command::Meta(a) => cmd_meta(a, out),
        Command::Fit(a) => cmd_fit(a, out),
        Command::Predict(a) => cmd_predict(a, out),
    }
}

fn say(out: &mut dyn Write, text: impl AsRef<str>) -> CliResult {
    writeln!(out, "{}", text.as_ref()).map_err(|e| CliError::Internal(e.to_string()))
}

/// File-name-safe version of a dataset name.
pub fn file_stem(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    let s = s.trim_matches('_').to_owned();
    if s.is_empty() {
        "dataset".to_owned()
    } else {
        s
    }
}

fn cmd_preprocess(a: PreprocessArgs, out: &mut dyn Write) -> CliResult {
    if !a.delimiter.is_ascii() {
        return Err(usage("--delimiter must be a single ASCII character"));
    }
    let opts = LoadOptions {
        delimiter: a.delimiter as u8,
        categorical: a.categorical.into_iter().collect(),
        drop: a.drop.into_iter().collect(),
        no_header: a.no_header,
        ..LoadOptions::default()
    };
    if fs::metadata(&a.input).map_err(io_err(&a.input))?.len() == 0 {
        return Err(usage(format!("{} is empty", a.input.display())));
    }
    let raw = load_csv(&a.input, &a.target, &opts)?;
    if raw.n_rows() == 0 {
        return Err(usage(format!("{}: no data rows", a.input.display())));
    }
    let name = a.name.unwrap_or_else(|| {
        a.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });
    let ds = preprocess(&raw, &name)?;
    let path = write_dataset(&ds, &a.out, &file_stem(&name))?;
    let (manifest, _) = read_dataset(&path)?;
    say(out, manifest.summary_line())?;
    if raw.n_rows() != ds.n_rows() {
        say(out, format!("{} of {} rows kept", ds.n_rows(), raw.n_rows()))?;
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs, out: &mut dyn Write) -> CliResult {
    let ds = match a.generator {
        Generator::Hypercube => synth_classification(&SynthSpec {
            n_samples: a.samples,
            n_features: a.features,
            n_classes: a.classes,
            n_clusters_per_class: a.clusters_per_class,
            class_sep: a.class_sep,
            seed: a.seed,
        })?,
        Generator::Twonorm => data::twonorm(a.samples, a.seed)?,
        Generator::Threenorm => data::threenorm(a.samples, a.seed)?,
        Generator::Ringnorm => data::ringnorm(a.samples, a.seed)?,
        Generator::Waveform => data::waveform(a.samples, a.seed)?,
    };
    let mut ds = ds;
    if let Some(n) = a.name {
        ds.set_name(n);
    }
    let path = write_dataset(&ds, &a.out, &file_stem(ds.name()))?;
    let (manifest, _) = read_dataset(&path)?;
    say(out, manifest.summary_line())?;
    say(out, format!("wrote {}", path.display()))
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_owned()
    } else {
        base.join(p)
    }
}

fn parse_configs(names: &[String]) -> CliResult<Vec<ForestConfig>> {
    names
        .iter()
        .map(|n| named_config(n).ok_or_else(|| usage(format!("unknown configuration `{n}`"))))
        .collect()
}

struct GridPlan {
    datasets: Vec<PathBuf>,
    out_dir: PathBuf,
    spec: GridSpec,
}

fn plan_grid(a: &GridArgs) -> CliResult<GridPlan> {
    let (manifest, base) = match &a.manifest {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            let m: RunManifest = serde_json::from_str(&text).map_err(|e| CliError::Data(e.into()))?;
            (m, p.parent().unwrap_or(Path::new(".")).to_owned())
        }
        None => (RunManifest::default(), PathBuf::from(".")),
    };
    let mut datasets: Vec<PathBuf> = manifest.datasets.iter().map(|d| resolve(&base, d)).collect();
    datasets.extend(a.datasets.iter().cloned());
    if datasets.is_empty() {
        return Err(usage("grid needs --dataset or a manifest listing datasets"));
    }
    let out_dir = a
        .out
        .clone()
        .or_else(|| manifest.output_dir.as_ref().map(|o| resolve(&base, o)))
        .unwrap_or_else(|| PathBuf::from("grid"));
    let full = a.full_scale || manifest.scale == Scale::Full;
    let repeats = a.repeats.or(manifest.repeats).unwrap_or(if full {
        experiment::FULL_REPEATS
    } else {
        experiment::DESK_REPEATS
    });
    let mut configs = if !a.configs.is_empty() {
        parse_configs(&a.configs)?
    } else if let Some(names) = &manifest.configs {
        parse_configs(names)?
    } else {
        named_configs()
    };
    if let Some(nt) = a.trees.or(manifest.n_trees) {
        configs.iter_mut().for_each(|c| c.n_trees = nt);
    }
    let br_values = if !a.br.is_empty() {
        a.br.clone()
    } else {
        manifest.br_values.clone().unwrap_or_else(|| DEFAULT_BR_VALUES.to_vec())
    };
    let spec = GridSpec {
        configs,
        br_values,
        repeats,
        seed: a.seed.or(manifest.seed).unwrap_or(0),
    };
    spec.validate()?;
    Ok(GridPlan {
        datasets,
        out_dir,
        spec,
    })
}

fn warn_high_rates(rates: &[f64]) {
    if let Some(br) = rates.iter().find(|&&b| b > BR_WARN_ABOVE) {
        eprintln!("brforest: warning: bootstrap rate {br} is above {BR_WARN_ABOVE}; fitting cost grows linearly with it");
    }
}

type CellKey = (String, u64, usize, u8);

fn key(r: &GridRow) -> CellKey {
    (r.config.clone(), r.br.to_bits(), r.repeat, r.fold)
}

fn cmd_grid(a: GridArgs, out: &mut dyn Write) -> CliResult {
    let plan = plan_grid(&a)?;
    warn_high_rates(&plan.spec.br_values);
    fs::create_dir_all(&plan.out_dir).map_err(io_err(&plan.out_dir))?;
    let spec_text = serde_json::to_string_pretty(&plan.spec).map_err(|e| CliError::Data(e.into()))? + "\n";

    for manifest_path in &plan.datasets {
        let (_, ds) = read_dataset(manifest_path)?;
        let stem = file_stem(ds.name());
        let csv_path = plan.out_dir.join(format!("{stem}.grid.csv"));
        let spec_path = plan.out_dir.join(format!("{stem}.grid.json"));

        let mut existing: Vec<GridRow> = Vec::new();
        if csv_path.exists() {
            let previous_spec = fs::read_to_string(&spec_path).ok();
            if previous_spec.as_deref() != Some(spec_text.as_str()) {
                if !a.force {
                    return Err(usage(format!(
                        "{} holds results of a different grid; rerun with --force to discard them",
                        csv_path.display()
                    )));
                }
            } else {
                existing = read_grid_rows(open(&csv_path)?)?;
            }
        }
        let mut seen: HashMap<CellKey, f64> = HashMap::with_capacity(existing.len());
        for r in &existing {
            if r.dataset != ds.name() {
                return Err(CliError::Data(Error::data(format!(
                    "{} contains rows for dataset `{}`",
                    csv_path.display(),
                    r.dataset
                ))));
            }
            if let Some(prev) = seen.insert(key(r), r.accuracy) {
                if prev != r.accuracy && !a.force {
                    return Err(usage(format!(
                        "{}: conflicting values for {} br={} repeat={} fold={}; rerun with --force",
                        csv_path.display(),
                        r.config,
                        r.br,
                        r.repeat,
                        r.fold
                    )));
                }
            }
        }
        let done: HashSet<(String, u64, usize)> = seen
            .keys()
            .filter(|(c, b, r, f)| *f == 0 && seen.contains_key(&(c.clone(), *b, *r, 1)))
            .map(|(c, b, r, _)| (c.clone(), *b, *r))
            .collect();
        let complete = plan.spec.configs.iter().all(|c| {
            plan.spec
                .br_values
                .iter()
                .all(|b| (0..plan.spec.repeats).all(|r| done.contains(&(c.name.clone(), b.to_bits(), r))))
        });

        if !complete {
            if existing.is_empty() {
                write_text(&spec_path, &spec_text)?;
                let w = create(&csv_path)?;
                write_grid_rows(std::iter::empty(), w, true)?;
            }
            // one configuration at a time, appended as it finishes
            for config in &plan.spec.configs {
                let single = GridSpec {
                    configs: vec![config.clone()],
                    ..plan.spec.clone()
                };
                let rows = run_grid_missing(&ds, &single, |c, b, r| done.contains(&(c.to_owned(), b.to_bits(), r)))?;
                if rows.is_empty() {
                    continue;
                }
                let file = OpenOptions::new().append(true).open(&csv_path).map_err(io_err(&csv_path))?;
                write_grid_rows(rows.iter().cloned(), BufWriter::new(file), false)?;
                for r in rows {
                    seen.insert(key(&r), r.accuracy);
                }
            }
        }

        // rewrite in canonical grid order so the file only depends on the grid
        let mut rows = Vec::with_capacity(seen.len());
        for c in &plan.spec.configs {
            for &b in &plan.spec.br_values {
                for r in 0..plan.spec.repeats {
                    for f in 0..2u8 {
                        let accuracy = seen[&(c.name.clone(), b.to_bits(), r, f)];
                        rows.push(GridRow {
                            dataset: ds.name().to_owned(),
                            config: c.name.clone(),
                            br: b,
                            repeat: r,
                            fold: f,
                            accuracy,
                        });
                    }
                }
            }
        }
        let extra = seen.len() - rows.len();
        let gr = GridResult::from_rows(&rows)?;
        let tmp = csv_path.with_extension("csv.tmp");
        write_grid_rows(rows, create(&tmp)?, true)?;
        fs::rename(&tmp, &csv_path).map_err(io_err(&csv_path))?;
        write_text(&spec_path, &spec_text)?;

        // the significance test needs rates on both sides of 1
        let w = experiment::select_winner(&gr);
        let p = match experiment::significance_analysis(&gr, &w) {
            Ok(p) => format!("{p:.3e}"),
            Err(_) => "n/a".to_owned(),
        };
        say(
            out,
            format!(
                "{}: {} cells{}; best {} br={} acc={:.3}% max p={p}",
                ds.name(),
                gr.rows().count(),
                if complete { " (already complete)" } else { "" },
                w.best_config,
                w.best_br,
                100.0 * w.mean_accuracy,
            ),
        )?;
        if extra > 0 {
            say(out, format!("{extra} cells outside the current grid were dropped"))?;
        }
    }
    Ok(())
}

fn load_grids(paths: &[PathBuf]) -> CliResult<Vec<GridResult>> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(read_grid_csv(open(p)?)?);
    }
    if out.is_empty() {
        return Err(usage("no grid results found"));
    }
    Ok(out)
}

fn cmd_report(a: ReportArgs, out: &mut dyn Write) -> CliResult {
    let grids = load_grids(&a.grids)?;
    fs::create_dir_all(&a.out).map_err(io_err(&a.out))?;
    let winners: Vec<WinnerReport> = grids.iter().map(analyze).collect::<Result<_, _>>()?;

    let table = format_winners_table(&winners);
    write_text(&a.out.join("winners.txt"), &table)?;
    write_winners_csv(&winners, create(&a.out.join("winners.csv"))?)?;

    let br_grid: Vec<f64> = {
        let mut v: Vec<f64> = grids.iter().flat_map(|g| g.br_values.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let mut hist_text = String::from("overall\n");
    let overall = experiment::winning_br_histogram(&winners, None, &br_grid);
    hist_text += &format_histogram(&overall);
    let mut hist_csv = csv::Writer::from_writer(create(&a.out.join("histogram.csv"))?);
    hist_csv.write_record(["config", "br", "count"]).map_err(Error::from)?;
    for &(br, n) in &overall {
        hist_csv
            .write_record(["all".to_owned(), format!("{br:?}"), n.to_string()])
            .map_err(Error::from)?;
    }
    let per_config: Vec<Vec<WinnerReport>> = grids.iter().map(experiment::per_config_winners).collect();
    let config_names: Vec<String> = grids[0].config_names.clone();
    for name in &config_names {
        let reports: Vec<WinnerReport> = per_config.iter().flatten().filter(|r| r.best_config == *name).cloned().collect();
        let h = experiment::winning_br_histogram(&reports, Some(name), &br_grid);
        hist_text += &format!("\n{name}\n{}", format_histogram(&h));
        for &(br, n) in &h {
            hist_csv
                .write_record([name.clone(), format!("{br:?}"), n.to_string()])
                .map_err(Error::from)?;
        }
    }
    hist_csv.flush().map_err(|e| CliError::Data(Error::Csv(e.into())))?;
    write_text(&a.out.join("histogram.txt"), &hist_text)?;

    let curves_dir = a.out.join("curves");
    fs::create_dir_all(&curves_dir).map_err(io_err(&curves_dir))?;
    let mut curves_csv = csv::Writer::from_writer(create(&a.out.join("curves.csv"))?);
    curves_csv
        .write_record(["dataset", "config", "br", "mean_accuracy"])
        .map_err(Error::from)?;
    for g in &grids {
        let curves = br_curves(g);
        for c in &curves {
            for &(br, acc) in &c.points {
                curves_csv
                    .write_record([c.dataset.clone(), c.config.clone(), format!("{br:?}"), format!("{acc:?}")])
                    .map_err(Error::from)?;
            }
        }
        let svg = render_curves_svg(&g.dataset, &curves);
        write_text(&curves_dir.join(format!("{}.svg", file_stem(&g.dataset))), &svg)?;
    }
    curves_csv.flush().map_err(|e| CliError::Data(Error::Csv(e.into())))?;

    say(out, table.trim_end())?;
    let high = winners.iter().filter(|w| w.prefers_high_rate()).count();
    say(out, format!("BR > 1 wins on {high} of {} datasets", winners.len()))?;
    say(out, format!("wrote {}", a.out.display()))
}

fn cmd_meta(a: MetaArgs, out: &mut dyn Write) -> CliResult {
    let mut stats: Vec<KLStats> = match &a.kl {
        Some(p) => read_kl_csv(open(p)?)?,
        None => Vec::new(),
    };
    for m in &a.datasets {
        let (_, ds): (_, Dataset) = read_dataset(m)?;
        stats.push(dataset_kl(&ds)?);
    }
    if stats.is_empty() {
        return Err(usage("meta needs --dataset manifests or a --kl file"));
    }
    fs::create_dir_all(&a.out).map_err(io_err(&a.out))?;
    write_kl_csv(&stats, create(&a.out.join("kl.csv"))?)?;

    let grids = if a.grids.is_empty() { Vec::new() } else { load_grids(&a.grids)? };
    let winners: Vec<WinnerReport> = match (&a.winners, grids.is_empty()) {
        (Some(p), _) => read_winners_csv(open(p)?)?,
        (None, false) => grids.iter().map(analyze).collect::<Result<_, _>>()?,
        (None, true) => {
            say(out, format!("k_l statistics of {} datasets written; no labels given", stats.len()))?;
            return Ok(());
        }
    };
    let by_name: HashMap<&str, &KLStats> = stats.iter().map(|s| (s.dataset.as_str(), s)).collect();
    let labeled: Vec<&WinnerReport> = winners.iter().filter(|w| by_name.contains_key(w.dataset.as_str())).collect();
    if labeled.len() < winners.len() {
        let missing: Vec<&str> = winners
            .iter()
            .filter(|w| !by_name.contains_key(w.dataset.as_str()))
            .map(|w| w.dataset.as_str())
            .collect();
        say(out, format!("no k_l statistics for: {}", missing.join("; ")))?;
    }
    let pool = FeaturePool::from(a.pool);
    let ordered: Vec<KLStats> = labeled.iter().map(|w| by_name[w.dataset.as_str()].clone()).collect();
    let matrix = MetaFeatureMatrix::build(&ordered, pool);

    let targets = if grids.is_empty() || a.winners.is_some() {
        vec![("best".to_owned(), labeled.iter().map(|w| w.best_br).collect())]
    } else {
        best_rate_targets(&grids)?
    };
    if matrix.n_datasets() >= meta::MIN_PAIRS {
        let table = correlation_table(&matrix, &targets)?;
        table.write_csv(create(&a.out.join("correlations.csv"))?)?;
        let top: Vec<String> = table
            .ranked(0)
            .into_iter()
            .take(5)
            .map(|(f, r)| format!("{f} ({:.3})", r.unwrap_or(f64::NAN)))
            .collect();
        say(out, format!("most correlated with best BR: {}", top.join(", ")))?;
    }
    if a.no_classifier {
        return Ok(());
    }

    let labels = regime_labels(&labeled.iter().map(|w| (*w).clone()).collect::<Vec<_>>(), a.p_threshold);
    let names: Vec<String> = labels.iter().map(|(n, _)| n.clone()).collect();
    let regimes: Vec<meta::RegimeLabel> = labels.iter().map(|(_, l)| *l).collect();
    let n_gt = regimes.iter().filter(|&&l| l == meta::RegimeLabel::GT1).count();
    say(
        out,
        format!(
            "{} datasets labeled ({} GT1, {} LE1)",
            regimes.len(),
            n_gt,
            regimes.len() - n_gt
        ),
    )?;
    let sub = matrix.select_datasets(&names)?;
    let grid = MetaGrid {
        max_features: a.max_features,
        seed: a.seed,
        ..if a.full_scale { MetaGrid::full() } else { MetaGrid::default() }
    };
    let report = meta_evaluate(&sub, &regimes, &grid)?;
    report.write_csv(create(&a.out.join("meta_cells.csv"))?)?;
    let summary = report.summary();
    write_text(&a.out.join("meta_summary.txt"), &summary)?;
    say(out, summary.trim_end())
}

fn cmd_fit(a: FitArgs, out: &mut dyn Write) -> CliResult {
    let (_, ds) = read_dataset(&a.dataset)?;
    let mut cfg = named_config(&a.config)
        .ok_or_else(|| usage(format!("unknown configuration `{}`", a.config)))?
        .with_rate(a.br)
        .with_seed(a.seed);
    if let Some(nt) = a.trees {
        cfg.n_trees = nt;
    }
    if a.hard_voting {
        cfg.voting = crate::forest::Voting::Hard;
    }
    warn_high_rates(&[a.br]);
    let rf = fit_forest(&ds, &cfg)?;
    let rows: Vec<usize> = (0..ds.n_rows()).collect();
    let acc = rf.accuracy(ds.view(), &rows);
    save_model(
        &SavedModel {
            forest: rf,
            class_names: ds.class_names().to_vec(),
            feature_names: ds.feature_names().to_vec(),
        },
        &a.out,
    )?;
    say(
        out,
        format!(
            "{} on {}: {} trees, br={}, training accuracy {:.3}%",
            cfg.name,
            ds.name(),
            cfg.n_trees,
            cfg.bootstrap_rate,
            100.0 * acc
        ),
    )
}

fn cmd_predict(a: PredictArgs, out: &mut dyn Write) -> CliResult {
    let model = load_model(&a.model)?;
    let mut rdr = csv::Reader::from_reader(open(&a.input)?);
    let headers = rdr.headers().map_err(Error::from)?.clone();
    let d = model.forest.n_features;
    let by_name: Option<Vec<usize>> = model
        .feature_names
        .iter()
        .map(|f| headers.iter().position(|h| h == f))
        .collect::<Option<Vec<_>>>()
        .filter(|v| v.len() == d);
    let columns: Vec<usize> = match by_name {
        Some(cols) => cols,
        None if headers.len() >= d => (0..d).collect(),
        None => {
            return Err(CliError::Data(Error::Dimension {
                expected: d,
                found: headers.len(),
            }))
        }
    };
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(Error::from)?;
        let x = columns
            .iter()
            .map(|&c| {
                rec.get(c)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| CliError::Data(Error::data(format!("row {}: column {c} is not a number", i + 1))))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(x);
    }
    let preds = model.forest.predict_batch(&rows)?;
    let class_name = |k: usize| model.class_names.get(k).cloned().unwrap_or_else(|| k.to_string());

    let sink: Box<dyn Write + '_> = match &a.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(&mut *out),
    };
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec!["row".to_owned(), "label".to_owned()];
    header.extend((0..model.forest.n_classes).map(|k| format!("p_{}", class_name(k))));
    w.write_record(&header).map_err(Error::from)?;
    for (i, p) in preds.iter().enumerate() {
        let mut rec = vec![i.to_string(), class_name(p.label)];
        rec.extend(p.proba.iter().map(|v| format!("{v:?}")));
        w.write_record(&rec).map_err(Error::from)?;
    }
    w.flush().map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(())
}
