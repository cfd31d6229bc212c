//! Best reference line per block, chosen by SATD over all modes and lines.

use super::{check_grid, compressed_reference, grid};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::par::{self, Parallelism};
use crate::pipeline::{satd, BlockPredictor, PredictionTools};
use crate::predict::NUM_MODES;
use crate::reference::RasterGrid;
use crate::syntax::MAX_LINES;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceSource {
    Original,
    Compressed { qp: u8 },
}

#[derive(Debug, Clone, Copy)]
pub struct CensusConfig {
    pub block_size: usize,
    pub source: ReferenceSource,
    pub line_count: usize,
    pub parallelism: Parallelism,
}

impl CensusConfig {
    pub fn new(block_size: usize, source: ReferenceSource) -> Self {
        CensusConfig {
            block_size,
            source,
            line_count: MAX_LINES,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockChoice {
    pub x: usize,
    pub y: usize,
    pub line: usize,
    pub mode: u8,
    pub satd: u64,
    pub satd_l0: u64,
}

#[derive(Debug, Clone, Default)]
pub struct Census {
    pub blocks: Vec<BlockChoice>,
    /// Blocks whose best cost exceeds their best L0 cost (must stay 0).
    pub superset_violations: u64,
    pub line_count: usize,
}

impl Census {
    pub fn counts(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.line_count];
        for b in &self.blocks {
            c[b.line] += 1;
        }
        c
    }

    pub fn percentages(&self) -> Vec<f64> {
        let total = self.blocks.len().max(1) as f64;
        self.counts().iter().map(|&c| 100.0 * c as f64 / total).collect()
    }

    /// Fraction (0..1) of blocks choosing a line other than L0.
    pub fn further_share(&self) -> f64 {
        let further = self.blocks.iter().filter(|b| b.line > 0).count();
        further as f64 / self.blocks.len().max(1) as f64
    }

    pub fn merge(&mut self, other: Census) {
        self.line_count = self.line_count.max(other.line_count);
        self.blocks.extend(other.blocks);
        self.superset_violations += other.superset_violations;
    }

    /// `line,count,percent`, one row per line.
    pub fn csv(&self) -> String {
        let mut out = String::from("line,count,percent\n");
        for (l, (c, p)) in self.counts().iter().zip(self.percentages()).enumerate() {
            out.push_str(&format!("L{l},{c},{p:.3}\n"));
        }
        out
    }
}

/// Raw line prediction only: no residue compensation, no blending.
const LINE_ONLY: PredictionTools = PredictionTools {
    compensation: false,
    blending: false,
    range: crate::compensate::HorizontalRange::To29,
};

pub fn line_usage_census(frame: &Frame, cfg: &CensusConfig) -> Result<Census> {
    check_grid(frame, cfg.block_size)?;
    if !(1..=MAX_LINES).contains(&cfg.line_count) {
        return Err(Error::Config(format!("line count {} not in 1..=4", cfg.line_count)));
    }
    let reference = match cfg.source {
        ReferenceSource::Original => frame.clone(),
        ReferenceSource::Compressed { qp } => compressed_reference(frame, qp, cfg.parallelism)?,
    };
    let n = cfg.block_size;
    let plane = &reference.planes[0];
    let positions = grid(frame, n);
    let results = par::map(cfg.parallelism, &positions, |&(x, y)| -> Result<(BlockChoice, bool)> {
        let avail = RasterGrid {
            width: frame.width,
            height: frame.height,
            block: n,
            x0: x,
            y0: y,
        };
        let bp = BlockPredictor::new(plane, &avail, x, y, n, cfg.line_count - 1, true, frame.bit_depth, LINE_ONLY);
        let orig = frame.planes[0].copy_block(x, y, n, n);
        let mut best = (u64::MAX, 0usize, 0u8);
        let mut best_l0 = u64::MAX;
        for line in 0..cfg.line_count {
            for mode in 0..NUM_MODES {
                let pred = bp.predict(line, mode)?;
                let diff: Vec<i32> = orig.iter().zip(&pred.samples).map(|(&o, &p)| o as i32 - p).collect();
                let cost = satd(&diff, n);
                if (cost, line, mode) < best {
                    best = (cost, line, mode);
                }
                if line == 0 {
                    best_l0 = best_l0.min(cost);
                }
            }
        }
        let choice = BlockChoice {
            x,
            y,
            line: best.1,
            mode: best.2,
            satd: best.0,
            satd_l0: best_l0,
        };
        Ok((choice, best.0 > best_l0))
    });
    let mut census = Census {
        line_count: cfg.line_count,
        ..Default::default()
    };
    for r in results {
        let (choice, violated) = r?;
        census.superset_violations += violated as u64;
        census.blocks.push(choice);
    }
    Ok(census)
}
