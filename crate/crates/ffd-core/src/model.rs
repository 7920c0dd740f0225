//! Graph convolution on the directed line graph, the logistic prediction
//! head, cross-entropy loss with exact reverse-mode gradients, and the
//! mini-batch SGD training loop.
//!
//! Propagation uses the row-normalized symmetrized line adjacency with
//! self-loops: direction information survives in the asymmetric feature rule
//! and in which ordered pairs exist as line nodes, while symmetrized
//! propagation lets information flow both along and against edge direction.
//! The readout concatenates the target line node's hidden state across all
//! convolution layers (dense skip) and feeds one tanh hidden layer plus a
//! logistic scalar.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::eval::{self, ScoredPair};
use crate::graph::NodeId;
use crate::linegraph::LineGraph;
use crate::split::LabeledPair;
use crate::{rng, Error, Result};

/// Width of the head's hidden layer.
const HEAD_WIDTH: usize = 64;
/// Predicted probabilities are clamped to this range before logs.
const PROB_FLOOR: f64 = 1e-7;
const CHECKPOINT_VERSION: u32 = 1;

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub num_gcn_layers: usize,
    pub hidden_width: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            num_gcn_layers: 3,
            hidden_width: 32,
            learning_rate: 0.005,
            batch_size: 50,
            epochs: 50,
            seed: 0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_gcn_layers < 1 {
            return Err(Error::invalid("need at least one convolution layer"));
        }
        if self.hidden_width < 1 {
            return Err(Error::invalid("hidden width must be ≥ 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::invalid("learning rate must be finite and ≥ 0"));
        }
        if self.batch_size < 1 || self.epochs < 1 {
            return Err(Error::invalid("batch size and epochs must be ≥ 1"));
        }
        Ok(())
    }
}

/// All trainable tensors plus the hyperparameter block.
///
/// Tensor indexing (used by gradients, SGD, and checkpoints) is: the
/// convolution weights in layer order, then head hidden weights, head hidden
/// bias, head output weights, head output bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub hyper: HyperParams,
    input_width: usize,
    layer_weights: Vec<Array2<f64>>,
    head_w1: Array2<f64>,
    head_b1: Array2<f64>,
    head_w2: Array2<f64>,
    head_b2: Array2<f64>,
}

impl ModelParams {
    fn shaped(input_width: usize, hyper: HyperParams) -> Result<Self> {
        hyper.validate()?;
        if input_width < 1 {
            return Err(Error::invalid("input width must be ≥ 1"));
        }
        let w = hyper.hidden_width;
        let mut layer_weights = vec![Array2::zeros((input_width, w))];
        for _ in 1..hyper.num_gcn_layers {
            layer_weights.push(Array2::zeros((w, w)));
        }
        let readout = hyper.num_gcn_layers * w;
        Ok(Self {
            hyper,
            input_width,
            layer_weights,
            head_w1: Array2::zeros((readout, HEAD_WIDTH)),
            head_b1: Array2::zeros((1, HEAD_WIDTH)),
            head_w2: Array2::zeros((HEAD_WIDTH, 1)),
            head_b2: Array2::zeros((1, 1)),
        })
    }

    /// All-zero parameters (predicts exactly 0.5 everywhere).
    pub fn zeros(input_width: usize, hyper: HyperParams) -> Result<Self> {
        Self::shaped(input_width, hyper)
    }

    /// Seeded uniform initialization in ±sqrt(6/(fan_in+fan_out)).
    pub fn init(input_width: usize, hyper: HyperParams) -> Result<Self> {
        let mut params = Self::shaped(input_width, hyper)?;
        let mut stream = rng::stream(hyper.seed, "model-init");
        for i in 0..params.tensor_count() {
            let t = params.tensor_mut(i);
            let scale = (6.0 / (t.nrows() + t.ncols()) as f64).sqrt();
            for v in t.iter_mut() {
                *v = stream.gen_range(-scale..scale);
            }
        }
        Ok(params)
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn tensor_count(&self) -> usize {
        self.layer_weights.len() + 4
    }

    pub fn tensor(&self, i: usize) -> &Array2<f64> {
        let l = self.layer_weights.len();
        match i {
            _ if i < l => &self.layer_weights[i],
            _ if i == l => &self.head_w1,
            _ if i == l + 1 => &self.head_b1,
            _ if i == l + 2 => &self.head_w2,
            _ if i == l + 3 => &self.head_b2,
            _ => panic!("tensor index {i} out of range"),
        }
    }

    pub fn tensor_mut(&mut self, i: usize) -> &mut Array2<f64> {
        let l = self.layer_weights.len();
        match i {
            _ if i < l => &mut self.layer_weights[i],
            _ if i == l => &mut self.head_w1,
            _ if i == l + 1 => &mut self.head_b1,
            _ if i == l + 2 => &mut self.head_w2,
            _ if i == l + 3 => &mut self.head_b2,
            _ => panic!("tensor index {i} out of range"),
        }
    }

    fn validate_shapes(&self) -> Result<()> {
        self.hyper.validate()?;
        let w = self.hyper.hidden_width;
        if self.layer_weights.len() != self.hyper.num_gcn_layers {
            return Err(Error::Checkpoint("layer count mismatch".into()));
        }
        let mut expected_in = self.input_width;
        for (l, weights) in self.layer_weights.iter().enumerate() {
            if weights.dim() != (expected_in, w) {
                return Err(Error::Checkpoint(format!(
                    "layer {l} weights have shape {:?}, expected ({expected_in}, {w})",
                    weights.dim()
                )));
            }
            expected_in = w;
        }
        let readout = self.hyper.num_gcn_layers * w;
        for (name, tensor, shape) in [
            ("head hidden weights", &self.head_w1, (readout, HEAD_WIDTH)),
            ("head hidden bias", &self.head_b1, (1, HEAD_WIDTH)),
            ("head output weights", &self.head_w2, (HEAD_WIDTH, 1)),
            ("head output bias", &self.head_b2, (1, 1)),
        ] {
            if tensor.dim() != shape {
                return Err(Error::Checkpoint(format!(
                    "{name} have shape {:?}, expected {shape:?}",
                    tensor.dim()
                )));
            }
        }
        for i in 0..self.tensor_count() {
            if self.tensor(i).iter().any(|v| !v.is_finite()) {
                return Err(Error::Checkpoint(format!("tensor {i} contains non-finite values")));
            }
        }
        Ok(())
    }

    /// One SGD step: `w ← w − lr · g`.
    pub fn apply_step(&mut self, grads: &Gradients, learning_rate: f64) {
        for (i, g) in grads.tensors.iter().enumerate() {
            self.tensor_mut(i).scaled_add(-learning_rate, g);
        }
    }
}

/// Parameter-shaped gradient accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub tensors: Vec<Array2<f64>>,
}

impl Gradients {
    fn zeros_like(params: &ModelParams) -> Self {
        Self {
            tensors: (0..params.tensor_count())
                .map(|i| Array2::zeros(params.tensor(i).dim()))
                .collect(),
        }
    }
}

/// Row-normalized symmetrized line adjacency with self-loops, stored as
/// per-row sparse entries.
pub(crate) struct Propagation {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Propagation {
    pub(crate) fn new(num_line_nodes: usize, line_edges: &[(usize, usize)]) -> Self {
        let mut neighbors: Vec<BTreeSet<usize>> = (0..num_line_nodes)
            .map(|i| BTreeSet::from([i]))
            .collect();
        for &(a, b) in line_edges {
            neighbors[a].insert(b);
            neighbors[b].insert(a);
        }
        let rows = neighbors
            .into_iter()
            .map(|set| {
                let weight = 1.0 / set.len() as f64;
                set.into_iter().map(|j| (j, weight)).collect()
            })
            .collect();
        Self { rows }
    }

    pub(crate) fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros(x.raw_dim());
        for (i, entries) in self.rows.iter().enumerate() {
            for &(j, w) in entries {
                out.row_mut(i).scaled_add(w, &x.row(j));
            }
        }
        out
    }

    fn apply_transpose(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros(x.raw_dim());
        for (i, entries) in self.rows.iter().enumerate() {
            for &(j, w) in entries {
                out.row_mut(j).scaled_add(w, &x.row(i));
            }
        }
        out
    }

    #[cfg(test)]
    fn row_sums(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(_, w)| w).sum())
            .collect()
    }
}

/// `A · W` that skips `A`'s zero entries. The first convolution layer's
/// aggregated input inherits the one-hot blocks' sparsity (a few nonzeros
/// per row out of hundreds of columns), where skipping wins an order of
/// magnitude; dense inputs only pay the scan.
fn sparse_lhs_dot(a: &Array2<f64>, w: &Array2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros((a.nrows(), w.ncols()));
    for (i, row) in a.rows().into_iter().enumerate() {
        let mut out_row = out.row_mut(i);
        for (k, &v) in row.iter().enumerate() {
            if v != 0.0 {
                out_row.scaled_add(v, &w.row(k));
            }
        }
    }
    out
}

/// `Aᵀ · z` with the same zero-skipping over `A`.
fn sparse_lhs_transpose_dot(a: &Array2<f64>, z: &Array2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros((a.ncols(), z.ncols()));
    for (i, row) in a.rows().into_iter().enumerate() {
        let z_row = z.row(i);
        for (k, &v) in row.iter().enumerate() {
            if v != 0.0 {
                out.row_mut(k).scaled_add(v, &z_row);
            }
        }
    }
    out
}

struct ForwardTrace {
    prop: Propagation,
    /// `hidden[l]` is the output of convolution layer l (0-based).
    hidden: Vec<Array2<f64>>,
    /// `aggregated[l]` is N̂ · (input of layer l).
    aggregated: Vec<Array2<f64>>,
    readout: Array1<f64>,
    head_hidden: Array1<f64>,
    prob: f64,
}

fn forward_trace(params: &ModelParams, lg: &LineGraph) -> Result<ForwardTrace> {
    if lg.features.ncols() != params.input_width {
        return Err(Error::invalid(format!(
            "line-graph features have width {}, model expects {}",
            lg.features.ncols(),
            params.input_width
        )));
    }
    if lg.target_index >= lg.features.nrows() {
        return Err(Error::invalid("target index out of range"));
    }
    let prop = Propagation::new(lg.features.nrows(), &lg.line_edges);
    let mut hidden = Vec::with_capacity(params.layer_weights.len());
    let mut aggregated = Vec::with_capacity(params.layer_weights.len());
    let mut current = lg.features.clone();
    for (l, weights) in params.layer_weights.iter().enumerate() {
        let agg = prop.apply(&current);
        // Layer 0 consumes the raw one-hot-heavy features.
        let pre = if l == 0 {
            sparse_lhs_dot(&agg, weights)
        } else {
            agg.dot(weights)
        };
        if pre.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite activation in convolution layer {l}"
            )));
        }
        current = pre.mapv(f64::tanh);
        aggregated.push(agg);
        hidden.push(current.clone());
    }

    let w = params.hyper.hidden_width;
    let mut readout = Array1::zeros(params.layer_weights.len() * w);
    for (l, h) in hidden.iter().enumerate() {
        readout
            .slice_mut(ndarray::s![l * w..(l + 1) * w])
            .assign(&h.row(lg.target_index));
    }
    let pre_hidden = readout.dot(&params.head_w1) + params.head_b1.row(0);
    let head_hidden = pre_hidden.mapv(f64::tanh);
    let score = head_hidden.dot(&params.head_w2.column(0)) + params.head_b2[(0, 0)];
    if !score.is_finite() {
        return Err(Error::Numeric("non-finite activation in head".into()));
    }
    let prob = 1.0 / (1.0 + (-score).exp());
    Ok(ForwardTrace {
        prop,
        hidden,
        aggregated,
        readout,
        head_hidden,
        prob,
    })
}

/// Predicted probability that the target line node is a true edge.
pub fn forward(params: &ModelParams, lg: &LineGraph) -> Result<f64> {
    Ok(forward_trace(params, lg)?.prob)
}

/// Mean cross-entropy over the batch and its exact gradient.
///
/// Probabilities are clamped to `[1e−7, 1−1e−7]` before logs; a binding
/// clamp contributes zero gradient. Samples are reduced in batch order, so
/// the result is bit-reproducible.
pub fn loss_and_grads(
    params: &ModelParams,
    batch: &[(LineGraph, u8)],
) -> Result<(f64, Gradients)> {
    if batch.is_empty() {
        return Err(Error::invalid("batch is empty"));
    }
    if batch.iter().any(|&(_, label)| label > 1) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    let scale = 1.0 / batch.len() as f64;
    let mut grads = Gradients::zeros_like(params);
    let mut loss = 0.0;
    let layers = params.layer_weights.len();
    let w = params.hyper.hidden_width;

    for (lg, label) in batch {
        let trace = forward_trace(params, lg)?;
        let truth = f64::from(*label);
        let clamped = trace.prob.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
        loss += scale * -(truth * clamped.ln() + (1.0 - truth) * (1.0 - clamped).ln());

        // d loss / d score; zero when the clamp is binding.
        let d_score = if trace.prob == clamped {
            scale * (trace.prob - truth)
        } else {
            0.0
        };

        // Head output layer.
        let u = &trace.head_hidden;
        for k in 0..HEAD_WIDTH {
            grads.tensors[layers + 2][(k, 0)] += u[k] * d_score;
        }
        grads.tensors[layers + 3][(0, 0)] += d_score;

        // Head hidden layer.
        let d_hidden_pre: Array1<f64> = (0..HEAD_WIDTH)
            .map(|k| params.head_w2[(k, 0)] * d_score * (1.0 - u[k] * u[k]))
            .collect();
        for (r, &rv) in trace.readout.iter().enumerate() {
            for (k, &dk) in d_hidden_pre.iter().enumerate() {
                grads.tensors[layers][(r, k)] += rv * dk;
            }
        }
        grads.tensors[layers + 1]
            .row_mut(0)
            .scaled_add(1.0, &d_hidden_pre);
        let d_readout = params.head_w1.dot(&d_hidden_pre);

        // Skip-readout scatters into every convolution layer's output.
        let mut d_hidden: Vec<Array2<f64>> = trace
            .hidden
            .iter()
            .map(|h| Array2::zeros(h.raw_dim()))
            .collect();
        for l in 0..layers {
            d_hidden[l]
                .row_mut(lg.target_index)
                .scaled_add(1.0, &d_readout.slice(ndarray::s![l * w..(l + 1) * w]));
        }

        // Reverse through the convolutions.
        for l in (0..layers).rev() {
            let h = &trace.hidden[l];
            let d_pre = &d_hidden[l] * &h.mapv(|v| 1.0 - v * v);
            if l == 0 {
                grads.tensors[l]
                    .scaled_add(1.0, &sparse_lhs_transpose_dot(&trace.aggregated[l], &d_pre));
            } else {
                grads.tensors[l].scaled_add(1.0, &trace.aggregated[l].t().dot(&d_pre));
            }
            if l > 0 {
                let back = trace
                    .prop
                    .apply_transpose(&d_pre.dot(&params.layer_weights[l].t()));
                d_hidden[l - 1].scaled_add(1.0, &back);
            }
        }
    }
    Ok((loss, grads))
}

/// Anything that can turn a candidate pair into its line graph; the training
/// loop and `predict` are generic over it so they stay decoupled from
/// feature assembly.
pub trait SampleMaterializer {
    fn line_graph(&self, x: NodeId, y: NodeId) -> Result<LineGraph>;
}

/// Full pipeline for one pair: materialize the line graph and run the model.
pub fn predict(
    params: &ModelParams,
    x: NodeId,
    y: NodeId,
    ctx: &impl SampleMaterializer,
) -> Result<f64> {
    forward(params, &ctx.line_graph(x, y)?)
}

/// One epoch's log line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub mean_loss: f64,
    pub test_auc: f64,
    pub test_ap: f64,
}

/// Per-epoch history plus which epoch's parameters were kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub records: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_auc: f64,
}

/// Plain SGD: shuffle each epoch under the run seed, step batch by batch,
/// log test AUC/AP each epoch, and keep the best-AUC parameters.
pub fn train(
    params: &mut ModelParams,
    train_pairs: &[LabeledPair],
    test_pairs: &[LabeledPair],
    ctx: &impl SampleMaterializer,
) -> Result<TrainReport> {
    if train_pairs.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if test_pairs.iter().all(|p| p.label == 1) || test_pairs.iter().all(|p| p.label == 0) {
        return Err(Error::invalid("test set needs both classes"));
    }
    let hyper = params.hyper;
    let mut records = Vec::with_capacity(hyper.epochs);
    let mut best: Option<(usize, f64, ModelParams)> = None;

    for epoch in 1..=hyper.epochs {
        let mut order: Vec<usize> = (0..train_pairs.len()).collect();
        let mut shuffler = rng::stream_salted(hyper.seed, "epoch-shuffle", epoch as u64);
        use rand::seq::SliceRandom;
        order.shuffle(&mut shuffler);

        let mut loss_sum = 0.0;
        for (batch_index, chunk) in order.chunks(hyper.batch_size).enumerate() {
            let mut batch = Vec::with_capacity(chunk.len());
            for &i in chunk {
                let pair = &train_pairs[i];
                batch.push((ctx.line_graph(pair.src, pair.dst)?, pair.label));
            }
            let (loss, grads) = loss_and_grads(params, &batch)?;
            if !loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "loss diverged at epoch {epoch}, batch {batch_index}"
                )));
            }
            params.apply_step(&grads, hyper.learning_rate);
            loss_sum += loss * chunk.len() as f64;
        }
        let mean_loss = loss_sum / train_pairs.len() as f64;

        let mut scored = Vec::with_capacity(test_pairs.len());
        for pair in test_pairs {
            scored.push(ScoredPair {
                src: pair.src,
                dst: pair.dst,
                score: predict(params, pair.src, pair.dst, ctx)?,
                label: pair.label,
            });
        }
        let test_auc = eval::auc(&scored)?;
        let test_ap = eval::average_precision(&scored)?;
        records.push(EpochRecord {
            epoch,
            mean_loss,
            test_auc,
            test_ap,
        });
        if best.as_ref().map_or(true, |&(_, auc, _)| test_auc > auc) {
            best = Some((epoch, test_auc, params.clone()));
        }
    }

    let (best_epoch, best_auc, best_params) = best.expect("epochs ≥ 1");
    *params = best_params;
    Ok(TrainReport {
        records,
        best_epoch,
        best_auc,
    })
}

/// Writes the per-epoch history as CSV `epoch,loss,auc,ap`.
pub fn save_train_report(report: &TrainReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let mut emit = |line: String| {
        out.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))
    };
    emit("epoch,loss,auc,ap\n".to_string())?;
    for r in &report.records {
        emit(format!(
            "{},{},{},{}\n",
            r.epoch, r.mean_loss, r.test_auc, r.test_ap
        ))?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct TensorBlock {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    hyper: HyperParams,
    input_width: usize,
    tensors: Vec<TensorBlock>,
}

/// Writes a versioned JSON checkpoint: hyper block plus flat parameter
/// arrays in tensor-index order.
pub fn save_checkpoint(params: &ModelParams, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let tensors = (0..params.tensor_count())
        .map(|i| {
            let t = params.tensor(i);
            TensorBlock {
                rows: t.nrows(),
                cols: t.ncols(),
                data: t.iter().copied().collect(),
            }
        })
        .collect();
    let file = CheckpointFile {
        version: CHECKPOINT_VERSION,
        hyper: params.hyper,
        input_width: params.input_width,
        tensors,
    };
    let text = serde_json::to_string(&file).map_err(|e| Error::json(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Loads and fully validates a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<ModelParams> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: CheckpointFile = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
    if file.version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported version {} (expected {CHECKPOINT_VERSION})",
            file.version
        )));
    }
    let mut params = ModelParams::shaped(file.input_width, file.hyper)?;
    if file.tensors.len() != params.tensor_count() {
        return Err(Error::Checkpoint(format!(
            "expected {} tensors, found {}",
            params.tensor_count(),
            file.tensors.len()
        )));
    }
    for (i, block) in file.tensors.iter().enumerate() {
        if block.data.len() != block.rows * block.cols {
            return Err(Error::Checkpoint(format!(
                "tensor {i} claims {}x{} but carries {} values",
                block.rows,
                block.cols,
                block.data.len()
            )));
        }
        let shaped = Array2::from_shape_vec((block.rows, block.cols), block.data.clone())
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
        if shaped.dim() != params.tensor(i).dim() {
            return Err(Error::Checkpoint(format!(
                "tensor {i} has shape {:?}, expected {:?}",
                shaped.dim(),
                params.tensor(i).dim()
            )));
        }
        *params.tensor_mut(i) = shaped;
    }
    params.validate_shapes()?;
    Ok(params)
}
