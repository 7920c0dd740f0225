//! Node feature matrices: path-label one-hots, community one-hots, spectral
//! embeddings, and their fused concatenation.
//!
//! The hybrid representation of a node is the row-wise concatenation
//! `[path one-hot | community one-hot | embedding]`; downstream models index
//! rows by node id and never reinterpret the blocks.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{concatenate, Array2, Axis};

use crate::community::CommunityAssignment;
use crate::{Error, Result};

/// What a feature matrix's rows encode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    PathOnehot,
    CommunityOnehot,
    Embedding,
    Hybrid,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::PathOnehot => "path_onehot",
            FeatureKind::CommunityOnehot => "community_onehot",
            FeatureKind::Embedding => "embedding",
            FeatureKind::Hybrid => "hybrid",
        }
    }

    fn parse(text: &str) -> Option<Self> {
        match text {
            "path_onehot" => Some(FeatureKind::PathOnehot),
            "community_onehot" => Some(FeatureKind::CommunityOnehot),
            "embedding" => Some(FeatureKind::Embedding),
            "hybrid" => Some(FeatureKind::Hybrid),
            _ => None,
        }
    }
}

/// A dense per-node feature matrix (rows = nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub data: Array2<f64>,
    pub kind: FeatureKind,
}

impl FeatureMatrix {
    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }
}

/// One-hot encodes per-node integer labels into a `path_onehot` matrix.
///
/// Column 0 is reserved for label 0 ("unreachable"); labels at or above `cap`
/// land in column `cap`, so the width is `cap + 1`.
pub fn onehot_labels(labels: &[u32], cap: u32) -> Result<FeatureMatrix> {
    if cap < 1 {
        return Err(Error::invalid("label cap must be ≥ 1"));
    }
    let width = cap as usize + 1;
    let mut data = Array2::zeros((labels.len(), width));
    for (row, &label) in labels.iter().enumerate() {
        data[(row, label.min(cap) as usize)] = 1.0;
    }
    Ok(FeatureMatrix {
        data,
        kind: FeatureKind::PathOnehot,
    })
}

/// One-hot encodes a community assignment (width = number of communities).
pub fn community_onehot(assign: &CommunityAssignment) -> FeatureMatrix {
    let width = assign.num_communities();
    let mut data = Array2::zeros((assign.node_to_community.len(), width));
    for (row, &c) in assign.node_to_community.iter().enumerate() {
        data[(row, c)] = 1.0;
    }
    FeatureMatrix {
        data,
        kind: FeatureKind::CommunityOnehot,
    }
}

/// Concatenates the three feature blocks row-wise into the hybrid matrix
/// `[path | community | embedding]`.
pub fn fuse(o_p: &FeatureMatrix, o_c: &FeatureMatrix, o_e: &FeatureMatrix) -> Result<FeatureMatrix> {
    fuse_blocks(&[o_p, o_c, o_e])
}

/// Concatenates any nonempty selection of feature blocks (ablated variants
/// drop blocks, shrinking the hybrid width).
pub fn fuse_blocks(blocks: &[&FeatureMatrix]) -> Result<FeatureMatrix> {
    let Some(first) = blocks.first() else {
        return Err(Error::invalid("cannot fuse zero feature blocks"));
    };
    let rows = first.rows();
    if blocks.iter().any(|b| b.rows() != rows) {
        let counts: Vec<String> = blocks.iter().map(|b| b.rows().to_string()).collect();
        return Err(Error::invalid(format!(
            "feature blocks disagree on row count: {}",
            counts.join(" / ")
        )));
    }
    let views: Vec<_> = blocks.iter().map(|b| b.data.view()).collect();
    let data = concatenate(Axis(1), &views)
        .map_err(|e| Error::invalid(format!("feature concatenation failed: {e}")))?;
    Ok(FeatureMatrix {
        data,
        kind: FeatureKind::Hybrid,
    })
}

/// Writes a matrix as text: header `N D kind`, then one row per line of
/// space-separated values (integral values print without a decimal point,
/// so one-hots serialize as 0/1).
pub fn save_feature_matrix(m: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(writer, "{} {} {}", m.rows(), m.cols(), m.kind.as_str()).map_err(io_err)?;
    for row in m.data.rows() {
        let mut first = true;
        for &value in row {
            if !first {
                write!(writer, " ").map_err(io_err)?;
            }
            write!(writer, "{value}").map_err(io_err)?;
            first = false;
        }
        writeln!(writer).map_err(io_err)?;
    }
    writer.flush().map_err(io_err)
}

/// Reads a matrix written by [`save_feature_matrix`].
pub fn load_feature_matrix(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(path, e))?
        .ok_or_else(|| Error::parse(path, 1, "missing header"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let [n, d, kind] = parts.as_slice() else {
        return Err(Error::parse(path, 1, "header must be `N D kind`"));
    };
    let n: usize = n
        .parse()
        .map_err(|_| Error::parse(path, 1, format!("invalid row count {n:?}")))?;
    let d: usize = d
        .parse()
        .map_err(|_| Error::parse(path, 1, format!("invalid column count {d:?}")))?;
    let kind = FeatureKind::parse(kind)
        .ok_or_else(|| Error::parse(path, 1, format!("unknown feature kind {kind:?}")))?;

    let mut data = Array2::zeros((n, d));
    for row in 0..n {
        let line_no = row + 2;
        let line = lines
            .next()
            .transpose()
            .map_err(|e| Error::io(path, e))?
            .ok_or_else(|| Error::parse(path, line_no, "fewer rows than header declares"))?;
        let mut count = 0;
        for (col, token) in line.split_whitespace().enumerate() {
            if col >= d {
                return Err(Error::parse(path, line_no, "more columns than header declares"));
            }
            let value: f64 = token
                .parse()
                .map_err(|_| Error::parse(path, line_no, format!("invalid value {token:?}")))?;
            if !value.is_finite() {
                return Err(Error::parse(path, line_no, "non-finite value"));
            }
            data[(row, col)] = value;
            count += 1;
        }
        if count != d {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {d} columns, got {count}"),
            ));
        }
    }
    Ok(FeatureMatrix { data, kind })
}
