//! Command-line driver for the link-prediction pipeline.
//!
//! Every subcommand reads one optional JSON config file plus a handful of
//! flags, runs deterministically under a mandatory seed, and writes its
//! artifacts into an output directory. The binary in `main.rs` is a thin
//! dispatcher over the `cmd_*` functions here so that integration tests can
//! call the same code paths directly.
//!
//! Error handling is two-phase: everything wrong with the *request* (bad
//! JSON, missing seed, nonexistent dataset, out-of-range values) is a
//! [`CliError::Config`] and exits with code 2 before any artifact is touched;
//! everything that fails *while running* is a [`CliError::Runtime`], exits
//! with code 3, and leaves a `FAILED` marker file next to whatever partial
//! outputs were already written.

use std::fs;
use std::path::{Path, PathBuf};

use ffd_core::community::{detect_communities, save_communities};
use ffd_core::embed::embed_nodes;
use ffd_core::eval::{
    evaluate_model, save_results_csv, HeuristicIndex, HeuristicParams, HeuristicScorer, ResultRow,
};
use ffd_core::features::save_feature_matrix;
use ffd_core::graph::{load_edge_list_report, DirectedGraph};
use ffd_core::model::{save_checkpoint, save_train_report, HyperParams};
use ffd_core::pipeline::{run_experiment, ExperimentConfig, FeatureConfig, PipelineContext};
use ffd_core::sbm::{
    g_monotonicity_check, g_value, generate_sbm, monte_carlo_theorem, MonotonicityReport,
    PredictorModel, SbmSpec,
};
use ffd_core::split::{save_split, split as split_edges, SplitFile, SplitSpec};
use serde::{Deserialize, Serialize};

/// What went wrong, split by whose fault it is.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The request itself is invalid; nothing was run.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// The request was valid but execution failed partway.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Tags a runtime failure with the pipeline stage it happened in.
fn stage<T>(name: &str, result: ffd_core::Result<T>) -> Result<T, CliError> {
    result.map_err(|e| CliError::Runtime(format!("{name}: {e}")))
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

/// Where the input graph comes from: an edge-list file or a sampled
/// stochastic block model. Exactly one of the two fields must be set.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetBlock {
    pub path: Option<PathBuf>,
    pub sbm: Option<SbmSpec>,
}

/// `features` section; any omitted key keeps the library default.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureBlock {
    pub hops: usize,
    pub max_nodes: usize,
    pub label_cap: u32,
    pub embed_dim: usize,
    pub use_path: bool,
    pub use_community: bool,
    pub use_embedding: bool,
}

impl Default for FeatureBlock {
    fn default() -> Self {
        FeatureConfig::default().into()
    }
}

impl From<FeatureConfig> for FeatureBlock {
    fn from(c: FeatureConfig) -> Self {
        Self {
            hops: c.hops,
            max_nodes: c.max_nodes,
            label_cap: c.label_cap,
            embed_dim: c.embed_dim,
            use_path: c.use_path,
            use_community: c.use_community,
            use_embedding: c.use_embedding,
        }
    }
}

impl From<FeatureBlock> for FeatureConfig {
    fn from(b: FeatureBlock) -> Self {
        Self {
            hops: b.hops,
            max_nodes: b.max_nodes,
            label_cap: b.label_cap,
            embed_dim: b.embed_dim,
            use_path: b.use_path,
            use_community: b.use_community,
            use_embedding: b.use_embedding,
        }
    }
}

/// `model` section; any omitted key keeps the library default. The seed is
/// deliberately not part of this block — the root `seed` (or `--seed`)
/// governs every random choice in a run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelBlock {
    pub num_gcn_layers: usize,
    pub hidden_width: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for ModelBlock {
    fn default() -> Self {
        let h = HyperParams::default();
        Self {
            num_gcn_layers: h.num_gcn_layers,
            hidden_width: h.hidden_width,
            learning_rate: h.learning_rate,
            batch_size: h.batch_size,
            epochs: h.epochs,
        }
    }
}

impl ModelBlock {
    fn to_hyper(self, seed: u64) -> HyperParams {
        HyperParams {
            num_gcn_layers: self.num_gcn_layers,
            hidden_width: self.hidden_width,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            epochs: self.epochs,
            seed,
        }
    }
}

/// `theorem` section: parameters of the advantage-condition check.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheoremBlock {
    /// Block-model parameters the condition and the simulation are evaluated
    /// at (`community_size` only matters for graph sampling, not here, but a
    /// full spec keeps the config shape uniform).
    pub sbm: SbmSpec,
    pub predictor: PredictorModel,
    /// Monte-Carlo trial count (≥ 1000).
    pub trials: u64,
    /// `K` values swept by the grid CSV and the monotonicity check.
    pub grid_ks: Vec<usize>,
    /// Interior grid points per axis: `p` and `q` range over
    /// `i / (grid_resolution + 1)` for `i = 1..=grid_resolution`.
    pub grid_resolution: usize,
}

impl Default for TheoremBlock {
    fn default() -> Self {
        Self {
            sbm: SbmSpec::new(4, 100, 0.2, 0.02),
            predictor: PredictorModel::balanced(0.6),
            trials: 100_000,
            grid_ks: vec![2, 5, 10, 15, 20],
            grid_resolution: 19,
        }
    }
}

/// Root of the JSON config file. Every key is optional; command-line flags
/// override file values; anything still unset falls back to the library
/// defaults — except `seed` and `out`, which must be given explicitly.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub dataset: Option<DatasetBlock>,
    pub train_fraction: Option<f64>,
    pub negative_ratio: Option<f64>,
    pub features: Option<FeatureBlock>,
    pub model: Option<ModelBlock>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub theorem: Option<TheoremBlock>,
}

/// Command-line flag values; `None` means "defer to the config file".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub train_fraction: Option<f64>,
}

// ---------------------------------------------------------------------------
// Resolution: config file + flags -> validated settings
// ---------------------------------------------------------------------------

/// A resolved input graph source.
#[derive(Debug, Clone)]
pub enum DataSource {
    Path(PathBuf),
    Sbm(SbmSpec),
}

impl DataSource {
    /// Short name used in result tables.
    pub fn name(&self) -> String {
        match self {
            DataSource::Path(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".to_string()),
            DataSource::Sbm(spec) => format!("sbm-k{}", spec.k),
        }
    }
}

fn load_config_file(ov: &Overrides) -> Result<ConfigFile, CliError> {
    match &ov.config {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| config_err(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| config_err(format!("config {}: {e}", p.display())))
        }
    }
}

/// Settings every subcommand needs: the parsed file, the seed, and the
/// output directory. Both of the latter are mandatory (flag or file); a run
/// never falls back to wall-clock seeding.
#[derive(Debug)]
struct Common {
    file: ConfigFile,
    seed: u64,
    out: PathBuf,
}

fn resolve_common(ov: &Overrides) -> Result<Common, CliError> {
    let file = load_config_file(ov)?;
    let seed = ov
        .seed
        .or(file.seed)
        .ok_or_else(|| config_err("a seed is required: pass --seed or set \"seed\" in the config"))?;
    let out = ov
        .out
        .clone()
        .or_else(|| file.out.clone())
        .ok_or_else(|| {
            config_err("an output directory is required: pass --out or set \"out\" in the config")
        })?;
    Ok(Common { file, seed, out })
}

fn resolve_dataset(file: &ConfigFile, ov: &Overrides) -> Result<DataSource, CliError> {
    let source = if let Some(p) = &ov.dataset {
        DataSource::Path(p.clone())
    } else {
        match &file.dataset {
            Some(DatasetBlock {
                path: Some(p),
                sbm: None,
            }) => DataSource::Path(p.clone()),
            Some(DatasetBlock {
                path: None,
                sbm: Some(spec),
            }) => DataSource::Sbm(*spec),
            Some(_) => {
                return Err(config_err(
                    "dataset must set exactly one of \"path\" and \"sbm\"",
                ))
            }
            None => {
                return Err(config_err(
                    "a dataset is required: pass --dataset or set \"dataset\" in the config",
                ))
            }
        }
    };
    match &source {
        DataSource::Path(p) => {
            if !p.is_file() {
                return Err(config_err(format!(
                    "dataset file not found: {}",
                    p.display()
                )));
            }
        }
        DataSource::Sbm(spec) => {
            spec.validate()
                .map_err(|e| config_err(format!("dataset sbm: {e}")))?;
        }
    }
    Ok(source)
}

fn resolve_experiment(
    file: &ConfigFile,
    ov: &Overrides,
    seed: u64,
) -> Result<ExperimentConfig, CliError> {
    let train_fraction = ov.train_fraction.or(file.train_fraction).unwrap_or(0.5);
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(config_err(format!(
            "train_fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let negative_ratio = file.negative_ratio.unwrap_or(1.0);
    if !(negative_ratio.is_finite() && negative_ratio > 0.0) {
        return Err(config_err(format!(
            "negative_ratio must be a positive number, got {negative_ratio}"
        )));
    }
    let features: FeatureConfig = file.features.unwrap_or_default().into();
    features
        .validate()
        .map_err(|e| config_err(format!("features: {e}")))?;
    let hyper = file.model.unwrap_or_default().to_hyper(seed);
    hyper
        .validate()
        .map_err(|e| config_err(format!("model: {e}")))?;
    Ok(ExperimentConfig {
        train_fraction,
        negative_ratio,
        features,
        hyper,
        seed,
    })
}

// ---------------------------------------------------------------------------
// Artifact helpers
// ---------------------------------------------------------------------------

/// Final test metrics of a run, as stored in `metrics.json`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricsFile {
    pub auc: f64,
    pub ap: f64,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string(value)
        .map_err(|e| CliError::Runtime(format!("serialize {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("write {}: {e}", path.display())))
}

fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| {
        CliError::Runtime(format!("create output directory {}: {e}", out.display()))
    })
}

/// Runs `body`, clearing any stale `FAILED` marker first and writing a fresh
/// one (containing the error) if `body` fails after producing partial output.
fn run_guarded<T>(
    out: &Path,
    body: impl FnOnce() -> Result<T, CliError>,
) -> Result<T, CliError> {
    let marker = out.join("FAILED");
    let _ = fs::remove_file(&marker);
    match body() {
        Ok(v) => Ok(v),
        Err(e) => {
            let _ = fs::write(&marker, format!("{e}\n"));
            Err(e)
        }
    }
}

/// Loads or samples the input graph. For file datasets with non-dense node
/// ids, the dense-id-to-original-id table goes to `idmap.json` so results can
/// be translated back.
fn load_graph(source: &DataSource, seed: u64, out: &Path) -> Result<DirectedGraph, CliError> {
    match source {
        DataSource::Path(p) => {
            let report = stage("load dataset", load_edge_list_report(p))?;
            if let Some(map) = &report.id_map {
                write_json(&out.join("idmap.json"), map)?;
            }
            Ok(report.graph)
        }
        DataSource::Sbm(spec) => {
            Ok(stage("sample dataset", generate_sbm(spec, seed))?.0)
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

/// Trains the full model on one dataset and writes every run artifact:
/// `split.json`, the global feature matrices, `train_report.csv`,
/// `metrics.json`, `checkpoint.json`, and `communities.json`.
pub fn cmd_run(ov: &Overrides) -> Result<(), CliError> {
    let common = resolve_common(ov)?;
    let source = resolve_dataset(&common.file, ov)?;
    let experiment = resolve_experiment(&common.file, ov, common.seed)?;
    let out = common.out;
    ensure_out_dir(&out)?;
    run_guarded(&out, || {
        let graph = load_graph(&source, common.seed, &out)?;
        println!(
            "dataset {}: {} nodes, {} edges",
            source.name(),
            graph.num_nodes(),
            graph.num_edges()
        );
        let output = stage("run experiment", run_experiment(&graph, &experiment))?;
        stage(
            "write split",
            save_split(&SplitFile::from_split(&output.split), out.join("split.json")),
        )?;
        stage(
            "write train report",
            save_train_report(&output.report, out.join("train_report.csv")),
        )?;
        let metrics = MetricsFile {
            auc: output.metrics.auc,
            ap: output.metrics.ap,
        };
        write_json(&out.join("metrics.json"), &metrics)?;
        stage(
            "write checkpoint",
            save_checkpoint(&output.params, out.join("checkpoint.json")),
        )?;
        if let Some(c) = &output.communities {
            stage(
                "write communities",
                save_communities(c, out.join("communities.json")),
            )?;
        }
        // The training context is rebuilt (deterministically, same seed) to
        // recover the global feature matrices, which the experiment itself
        // does not return.
        let ctx = stage(
            "build features",
            PipelineContext::new(output.split.observed.clone(), experiment.features, common.seed),
        )?;
        if let Some(m) = ctx.community_features() {
            stage(
                "write community features",
                save_feature_matrix(m, out.join("community_features.txt")),
            )?;
        }
        if let Some(m) = ctx.embedding() {
            stage(
                "write embedding",
                save_feature_matrix(m, out.join("embedding.txt")),
            )?;
        }
        println!(
            "kept epoch {} of {}: test auc {:.4}, ap {:.4}",
            output.report.best_epoch,
            experiment.hyper.epochs,
            metrics.auc,
            metrics.ap
        );
        println!("artifacts written to {}", out.display());
        Ok(())
    })
}

/// Splits a dataset into an observed graph plus labeled train/test pairs and
/// writes `split.json`.
pub fn cmd_split(ov: &Overrides) -> Result<(), CliError> {
    let common = resolve_common(ov)?;
    let source = resolve_dataset(&common.file, ov)?;
    let experiment = resolve_experiment(&common.file, ov, common.seed)?;
    let out = common.out;
    ensure_out_dir(&out)?;
    run_guarded(&out, || {
        let graph = load_graph(&source, common.seed, &out)?;
        let spec = SplitSpec {
            train_fraction: experiment.train_fraction,
            seed: common.seed,
            negative_ratio: experiment.negative_ratio,
        };
        let split = stage("split edges", split_edges(&graph, &spec))?;
        stage(
            "write split",
            save_split(&SplitFile::from_split(&split), out.join("split.json")),
        )?;
        println!(
            "split {}: {} train pairs, {} test pairs, observed graph keeps {} of {} edges",
            source.name(),
            split.train.len(),
            split.test.len(),
            split.observed.num_edges(),
            graph.num_edges()
        );
        Ok(())
    })
}

/// Detects communities on the full input graph and writes `communities.json`.
pub fn cmd_communities(ov: &Overrides) -> Result<(), CliError> {
    let common = resolve_common(ov)?;
    let source = resolve_dataset(&common.file, ov)?;
    let out = common.out;
    ensure_out_dir(&out)?;
    run_guarded(&out, || {
        let graph = load_graph(&source, common.seed, &out)?;
        let assignment = detect_communities(&graph);
        stage(
            "write communities",
            save_communities(&assignment, out.join("communities.json")),
        )?;
        println!(
            "{}: {} communities, modularity {:.4}",
            source.name(),
            assignment.num_communities(),
            assignment.modularity
        );
        Ok(())
    })
}

/// Computes the spectral node embedding of the full input graph and writes
/// `embedding.txt`.
pub fn cmd_embed(ov: &Overrides) -> Result<(), CliError> {
    let common = resolve_common(ov)?;
    let source = resolve_dataset(&common.file, ov)?;
    let experiment = resolve_experiment(&common.file, ov, common.seed)?;
    let out = common.out;
    ensure_out_dir(&out)?;
    run_guarded(&out, || {
        let graph = load_graph(&source, common.seed, &out)?;
        let dim = experiment.features.embed_dim;
        let matrix = stage("embed nodes", embed_nodes(&graph, dim, common.seed))?;
        stage(
            "write embedding",
            save_feature_matrix(&matrix, out.join("embedding.txt")),
        )?;
        println!(
            "{}: embedded {} nodes into {} dimensions",
            source.name(),
            graph.num_nodes(),
            dim
        );
        Ok(())
    })
}

/// Scores every heuristic index on one split and writes `baselines.csv`
/// (`method,dataset,split,auc,ap`).
pub fn cmd_baselines(ov: &Overrides) -> Result<(), CliError> {
    let common = resolve_common(ov)?;
    let source = resolve_dataset(&common.file, ov)?;
    let experiment = resolve_experiment(&common.file, ov, common.seed)?;
    let out = common.out;
    ensure_out_dir(&out)?;
    run_guarded(&out, || {
        let graph = load_graph(&source, common.seed, &out)?;
        let spec = SplitSpec {
            train_fraction: experiment.train_fraction,
            seed: common.seed,
            negative_ratio: experiment.negative_ratio,
        };
        let split = stage("split edges", split_edges(&graph, &spec))?;
        let scorer = HeuristicScorer::new(&split.observed, HeuristicParams::default());
        let dataset = source.name();
        let split_label = ((experiment.train_fraction * 100.0).round() as u32).to_string();
        let mut rows = Vec::with_capacity(HeuristicIndex::ALL.len());
        for &index in HeuristicIndex::ALL.iter() {
            let metrics = stage(
                "score heuristic",
                evaluate_model(|x, y| scorer.score(index, x, y), &split.test),
            )?;
            println!(
                "{:<8} auc {:.4}  ap {:.4}",
                index.as_str(),
                metrics.auc,
                metrics.ap
            );
            rows.push(ResultRow {
                method: index.as_str().to_string(),
                dataset: dataset.clone(),
                split: split_label.clone(),
                auc: metrics.auc,
                ap: metrics.ap,
            });
        }
        stage(
            "write results",
            save_results_csv(&rows, out.join("baselines.csv")),
        )?;
        println!("baselines written to {}", out.display());
        Ok(())
    })
}

/// Feature-block combinations exercised by `cmd_ablate`, in run order.
const ABLATION_VARIANTS: [(&str, bool, bool); 3] = [
    ("path", false, false),
    ("path+community", true, false),
    ("path+community+embedding", true, true),
];

/// Trains the model once per feature-block combination (path labels only,
/// plus community one-hots, plus the embedding) and writes one
/// `variant,auc,ap` row per configuration to `ablation.csv`.
pub fn cmd_ablate(ov: &Overrides) -> Result<(), CliError> {
    let common = resolve_common(ov)?;
    let source = resolve_dataset(&common.file, ov)?;
    let base = resolve_experiment(&common.file, ov, common.seed)?;
    let out = common.out;
    ensure_out_dir(&out)?;
    run_guarded(&out, || {
        let graph = load_graph(&source, common.seed, &out)?;
        let mut csv = String::from("variant,auc,ap\n");
        for (name, use_community, use_embedding) in ABLATION_VARIANTS {
            let mut experiment = base;
            experiment.features.use_path = true;
            experiment.features.use_community = use_community;
            experiment.features.use_embedding = use_embedding;
            let output = stage(name, run_experiment(&graph, &experiment))?;
            println!(
                "{name}: auc {:.4}  ap {:.4}",
                output.metrics.auc, output.metrics.ap
            );
            csv.push_str(&format!(
                "{name},{},{}\n",
                output.metrics.auc, output.metrics.ap
            ));
        }
        let path = out.join("ablation.csv");
        fs::write(&path, csv)
            .map_err(|e| CliError::Runtime(format!("write ablation table: {e}")))?;
        println!("ablation written to {}", path.display());
        Ok(())
    })
}

/// Evaluates the community-advantage condition three ways and writes:
/// `g_grid.csv` (`p,q,k,g_value` over an interior grid, one block per `K`),
/// `monotonicity.json` (finite-difference slope checks of `g`), and
/// `theorem_report.json` (closed-form condition plus Monte-Carlo accuracies
/// at the configured operating point).
pub fn cmd_theorem(ov: &Overrides) -> Result<(), CliError> {
    let common = resolve_common(ov)?;
    let block = common.file.theorem.clone().unwrap_or_default();
    block
        .sbm
        .validate()
        .map_err(|e| config_err(format!("theorem sbm: {e}")))?;
    if block.trials < 1000 {
        return Err(config_err(format!(
            "theorem trials must be ≥ 1000, got {}",
            block.trials
        )));
    }
    if block.grid_ks.is_empty() || block.grid_ks.iter().any(|&k| k < 2) {
        return Err(config_err("theorem grid_ks must be a nonempty list of K ≥ 2"));
    }
    if block.grid_resolution < 1 {
        return Err(config_err("theorem grid_resolution must be ≥ 1"));
    }
    let out = common.out;
    ensure_out_dir(&out)?;
    run_guarded(&out, || {
        let denom = (block.grid_resolution + 1) as f64;
        let mut csv = String::from("p,q,k,g_value\n");
        for &k in &block.grid_ks {
            for i in 1..=block.grid_resolution {
                for j in 1..=block.grid_resolution {
                    let p = i as f64 / denom;
                    let q = j as f64 / denom;
                    let spec = SbmSpec::new(k, block.sbm.community_size, p, q);
                    if let Ok(g) = g_value(&spec) {
                        csv.push_str(&format!("{p},{q},{k},{g}\n"));
                    }
                }
            }
        }
        fs::write(out.join("g_grid.csv"), csv)
            .map_err(|e| CliError::Runtime(format!("write g grid: {e}")))?;

        let checks: Vec<MonotonicityReport> = block
            .grid_ks
            .iter()
            .map(|&k| g_monotonicity_check(k, block.grid_resolution))
            .collect();
        let violations: usize = checks.iter().map(|c| c.violations.len()).sum();
        write_json(&out.join("monotonicity.json"), &checks)?;

        let report = stage(
            "simulate condition",
            monte_carlo_theorem(&block.sbm, &block.predictor, block.trials, common.seed),
        )?;
        write_json(&out.join("theorem_report.json"), &report)?;
        println!(
            "g = {:.6} at p={}, q={}, K={}; condition {}",
            report.g_value,
            block.sbm.p,
            block.sbm.q,
            block.sbm.k,
            if report.condition_holds { "holds" } else { "does not hold" }
        );
        println!(
            "simulated accuracy over {} trials: hybrid {:.4}, community-agnostic {:.4}",
            report.mc_trials, report.mc_acc_hybrid, report.mc_acc_noncommunity
        );
        println!(
            "monotonicity: {} grid points checked, {} violations",
            checks.iter().map(|c| c.points_checked).sum::<usize>(),
            violations
        );
        println!("theorem artifacts written to {}", out.display());
        Ok(())
    })
}
