//! End-to-end experiment assembly: split, global feature construction,
//! per-sample hybrid features, training, and ablation variants.
//!
//! Per candidate pair the context extracts the enclosing subgraph, computes
//! path labels locally, gathers the rows of the global community and
//! embedding matrices for the subgraph's nodes, fuses the enabled blocks
//! into the hybrid matrix, and builds the line graph. Nothing is cached
//! between samples; repeated materialization of the same pair is
//! deterministic in the run seed.

use ndarray::Axis;
use serde::{Deserialize, Serialize};

use crate::community::{self, CommunityAssignment};
use crate::drnl;
use crate::embed;
use crate::eval::Metrics;
use crate::features::{self, FeatureKind, FeatureMatrix};
use crate::graph::{DirectedGraph, NodeId};
use crate::linegraph::{self, EnclosingSubgraph, LineGraph};
use crate::model::{self, HyperParams, ModelParams, SampleMaterializer, TrainReport};
use crate::split::{self, Split, SplitSpec};
use crate::{Error, Result};

/// Which feature blocks to build and the knobs of each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Hop budget of the enclosing subgraph.
    pub hops: usize,
    /// Node cap of the enclosing subgraph.
    pub max_nodes: usize,
    /// Path labels at or above this value share one bucket; the one-hot
    /// block is `label_cap + 1` wide.
    pub label_cap: u32,
    /// Width of the spectral embedding block.
    pub embed_dim: usize,
    pub use_path: bool,
    pub use_community: bool,
    pub use_embedding: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            hops: 1,
            max_nodes: 100,
            label_cap: 50,
            embed_dim: 32,
            use_path: true,
            use_community: true,
            use_embedding: true,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.use_path || self.use_community || self.use_embedding) {
            return Err(Error::invalid("all feature blocks are disabled"));
        }
        if self.hops < 1 {
            return Err(Error::invalid("hop budget must be ≥ 1"));
        }
        if self.max_nodes < 2 {
            return Err(Error::invalid("max_nodes must admit at least the target pair"));
        }
        if self.use_path && self.label_cap < 1 {
            return Err(Error::invalid("label cap must be ≥ 1"));
        }
        if self.use_embedding && self.embed_dim < 1 {
            return Err(Error::invalid("embedding width must be ≥ 1"));
        }
        Ok(())
    }

    /// Short name of the enabled-block combination, e.g. `path+community`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if self.use_path {
            parts.push("path");
        }
        if self.use_community {
            parts.push("community");
        }
        if self.use_embedding {
            parts.push("embedding");
        }
        parts.join("+")
    }
}

/// Global state shared by all samples of one run: the observed graph and
/// the node-level feature matrices computed on it.
pub struct PipelineContext {
    observed: DirectedGraph,
    config: FeatureConfig,
    seed: u64,
    communities: Option<CommunityAssignment>,
    community_features: Option<FeatureMatrix>,
    embedding: Option<FeatureMatrix>,
}

impl PipelineContext {
    /// Detects communities and computes the embedding on the observed graph
    /// (each once, globally), as configured.
    pub fn new(observed: DirectedGraph, config: FeatureConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let (communities, community_features) = if config.use_community {
            let assignment = community::detect_communities(&observed);
            let onehot = features::community_onehot(&assignment);
            (Some(assignment), Some(onehot))
        } else {
            (None, None)
        };
        let embedding = if config.use_embedding {
            Some(embed::embed_nodes(&observed, config.embed_dim, seed)?)
        } else {
            None
        };
        Ok(Self {
            observed,
            config,
            seed,
            communities,
            community_features,
            embedding,
        })
    }

    pub fn observed(&self) -> &DirectedGraph {
        &self.observed
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn communities(&self) -> Option<&CommunityAssignment> {
        self.communities.as_ref()
    }

    pub fn embedding(&self) -> Option<&FeatureMatrix> {
        self.embedding.as_ref()
    }

    pub fn community_features(&self) -> Option<&FeatureMatrix> {
        self.community_features.as_ref()
    }

    /// Width of the per-node hybrid feature vector (the line graph's rows
    /// are twice this wide).
    pub fn feature_width(&self) -> usize {
        let mut width = 0;
        if self.config.use_path {
            width += self.config.label_cap as usize + 1;
        }
        if let Some(c) = &self.community_features {
            width += c.cols();
        }
        if let Some(e) = &self.embedding {
            width += e.cols();
        }
        width
    }

    fn gather(global: &FeatureMatrix, nodes: &[NodeId]) -> FeatureMatrix {
        FeatureMatrix {
            data: global.data.select(Axis(0), nodes),
            kind: global.kind,
        }
    }

    /// The hybrid feature matrix of one subgraph, row-aligned to its nodes.
    pub fn hybrid_features(&self, sub: &EnclosingSubgraph) -> Result<FeatureMatrix> {
        let mut blocks: Vec<FeatureMatrix> = Vec::new();
        if self.config.use_path {
            let labels = drnl::drnl_label(&sub.to_graph(), sub.target.0, sub.target.1)?;
            blocks.push(features::onehot_labels(&labels, self.config.label_cap)?);
        }
        if let Some(global) = &self.community_features {
            blocks.push(Self::gather(global, &sub.nodes));
        }
        if let Some(global) = &self.embedding {
            blocks.push(Self::gather(global, &sub.nodes));
        }
        let refs: Vec<&FeatureMatrix> = blocks.iter().collect();
        let mut fused = features::fuse_blocks(&refs)?;
        fused.kind = FeatureKind::Hybrid;
        Ok(fused)
    }

    /// Extracts the enclosing subgraph of one pair.
    pub fn subgraph(&self, x: NodeId, y: NodeId) -> Result<EnclosingSubgraph> {
        linegraph::extract_subgraph(
            &self.observed,
            x,
            y,
            self.config.hops,
            self.config.max_nodes,
            self.seed,
        )
    }
}

impl SampleMaterializer for PipelineContext {
    fn line_graph(&self, x: NodeId, y: NodeId) -> Result<LineGraph> {
        let sub = self.subgraph(x, y)?;
        let features = self.hybrid_features(&sub)?;
        linegraph::to_line_graph(&sub, &features)
    }
}

/// Everything one training run needs beyond the input graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub train_fraction: f64,
    pub negative_ratio: f64,
    pub features: FeatureConfig,
    pub hyper: HyperParams,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            train_fraction: 0.5,
            negative_ratio: 1.0,
            features: FeatureConfig::default(),
            hyper: HyperParams {
                seed,
                ..HyperParams::default()
            },
            seed,
        }
    }
}

/// Artifacts of one full run.
pub struct ExperimentOutput {
    pub split: Split,
    pub report: TrainReport,
    /// Test metrics of the kept (best-AUC) parameters.
    pub metrics: Metrics,
    pub params: ModelParams,
    pub communities: Option<CommunityAssignment>,
}

/// Runs the whole pipeline on one graph: split edges, build global features
/// on the observed part, train with per-epoch evaluation, and report the
/// best checkpoint's metrics.
pub fn run_experiment(g: &DirectedGraph, config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let spec = SplitSpec {
        train_fraction: config.train_fraction,
        seed: config.seed,
        negative_ratio: config.negative_ratio,
    };
    let split = split::split(g, &spec)?;
    let mut hyper = config.hyper;
    hyper.seed = config.seed;
    let ctx = PipelineContext::new(split.observed.clone(), config.features, config.seed)?;
    let mut params = ModelParams::init(2 * ctx.feature_width(), hyper)?;
    let report = model::train(&mut params, &split.train, &split.test, &ctx)?;
    let metrics = Metrics {
        auc: report.records[report.best_epoch - 1].test_auc,
        ap: report.records[report.best_epoch - 1].test_ap,
    };
    let communities = ctx.communities.clone();
    Ok(ExperimentOutput {
        split,
        report,
        metrics,
        params,
        communities,
    })
}
