//! Coding-unit syntax tree and its serialisation.

use std::fmt;

use crate::bits::BitSink;
use crate::error::Result;
use crate::syntax::{encode_levels, encode_line_index, encode_mode, LineSet};

/// Smallest CU; the only size where NxN partitioning is allowed.
pub const MIN_CU: usize = 8;
pub const MAX_TU: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartMode {
    /// One prediction block covering the CU.
    Whole,
    /// Four 4x4 prediction blocks (8x8 CUs only).
    Quad,
}

impl fmt::Display for PartMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartMode::Whole => "2Nx2N",
            PartMode::Quad => "NxN",
        })
    }
}

impl PartMode {
    pub fn prediction_blocks(self, size: usize) -> Vec<(usize, usize, usize)> {
        match self {
            PartMode::Whole => vec![(0, 0, size)],
            PartMode::Quad => {
                let h = size / 2;
                vec![(0, 0, h), (h, 0, h), (0, h, h), (h, h, h)]
            }
        }
    }
}

/// Luma transform blocks of a CU as `(dx, dy, size)` in coding order.
pub fn luma_tu_layout(size: usize, part: PartMode) -> Vec<(usize, usize, usize)> {
    match part {
        PartMode::Quad => part.prediction_blocks(size),
        PartMode::Whole if size > MAX_TU => {
            let mut v = Vec::new();
            for dy in (0..size).step_by(MAX_TU) {
                for dx in (0..size).step_by(MAX_TU) {
                    v.push((dx, dy, MAX_TU));
                }
            }
            v
        }
        PartMode::Whole => vec![(0, 0, size)],
    }
}

/// Everything signalled for one leaf CU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafSyntax {
    pub x: usize,
    pub y: usize,
    pub size: usize,
    pub line: usize,
    pub part: PartMode,
    pub modes: Vec<u8>,
    pub mpms: Vec<[u8; 3]>,
    pub luma: Vec<Vec<i32>>,
    pub chroma: [Vec<i32>; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CuNode {
    Split(Vec<CuNode>),
    Leaf(Box<LeafSyntax>),
}

impl CuNode {
    pub fn leaves(&self) -> Vec<&LeafSyntax> {
        match self {
            CuNode::Leaf(l) => vec![l],
            CuNode::Split(children) => children.iter().flat_map(|c| c.leaves()).collect(),
        }
    }
}

/// Line index, partition, modes, then luma and chroma levels.
pub fn write_leaf<S: BitSink>(sink: &mut S, leaf: &LeafSyntax, lines: LineSet) -> Result<()> {
    encode_line_index(sink, leaf.line, lines)?;
    if leaf.size == MIN_CU {
        sink.put_bit(leaf.part == PartMode::Quad);
    }
    for (mode, mpm) in leaf.modes.iter().zip(&leaf.mpms) {
        encode_mode(sink, *mode, mpm)?;
    }
    for (levels, (_, _, tu)) in leaf.luma.iter().zip(luma_tu_layout(leaf.size, leaf.part)) {
        encode_levels(sink, levels, tu);
    }
    for levels in &leaf.chroma {
        encode_levels(sink, levels, leaf.size / 2);
    }
    Ok(())
}

/// A split flag precedes every CU larger than the minimum size.
pub fn write_cu<S: BitSink>(sink: &mut S, node: &CuNode, size: usize, lines: LineSet) -> Result<()> {
    match node {
        CuNode::Split(children) => {
            sink.put_bit(true);
            for c in children {
                write_cu(sink, c, size / 2, lines)?;
            }
        }
        CuNode::Leaf(leaf) => {
            if size > MIN_CU {
                sink.put_bit(false);
            }
            write_leaf(sink, leaf, lines)?;
        }
    }
    Ok(())
}
