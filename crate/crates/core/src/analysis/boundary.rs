//! Prediction error on the first block lines, with and without residue
//! compensation.

use super::{check_grid, compressed_reference, grid};
use crate::compensate::HorizontalRange;
use crate::error::Result;
use crate::frame::Frame;
use crate::par::{self, Parallelism};
use crate::pipeline::{satd, BlockPredictor, PredictionTools};
use crate::predict::NUM_MODES;
use crate::reference::RasterGrid;
use crate::syntax::MAX_LINES;

/// Block lines reported; compensation never reaches further in.
pub const BLOCK_LINES: usize = 3;

/// Squared-error sums and sample counts per block line; index 0 is
/// compensation off, index 1 on.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundaryMse {
    pub block_size: usize,
    pub sse: [[u64; BLOCK_LINES]; 2],
    pub samples: [[u64; BLOCK_LINES]; 2],
}

impl BoundaryMse {
    pub fn mse(&self, compensated: bool, k: usize) -> f64 {
        let i = compensated as usize;
        self.sse[i][k] as f64 / self.samples[i][k].max(1) as f64
    }

    pub fn merge(&mut self, other: &BoundaryMse) {
        for i in 0..2 {
            for k in 0..BLOCK_LINES {
                self.sse[i][k] += other.sse[i][k];
                self.samples[i][k] += other.samples[i][k];
            }
        }
    }

    /// `block_line,mse_off,mse_on`.
    pub fn csv(&self) -> String {
        let mut out = String::from("block_line,mse_off,mse_on\n");
        for k in 0..BLOCK_LINES {
            out.push_str(&format!("{k},{:.4},{:.4}\n", self.mse(false, k), self.mse(true, k)));
        }
        out
    }
}

/// Block line `k` is row `k` from column `k` on plus column `k` below row `k`.
fn block_line_of(x: usize, y: usize) -> usize {
    x.min(y)
}

fn tools(compensation: bool) -> PredictionTools {
    PredictionTools {
        compensation,
        blending: false,
        range: HorizontalRange::To29,
    }
}

/// Predicts each grid block of `frame` from a compressed reconstruction at
/// `qp`, picking the best (line, mode) by SATD separately for each arm.
pub fn boundary_mse_report(frame: &Frame, qp: u8, block_size: usize, par: Parallelism) -> Result<BoundaryMse> {
    check_grid(frame, block_size)?;
    let reference = compressed_reference(frame, qp, par)?;
    boundary_mse_against(frame, &reference, block_size, par)
}

/// As [`boundary_mse_report`], with an explicit reference picture.
pub fn boundary_mse_against(frame: &Frame, reference: &Frame, block_size: usize, par: Parallelism) -> Result<BoundaryMse> {
    check_grid(frame, block_size)?;
    let n = block_size;
    let plane = &reference.planes[0];
    let positions = grid(frame, n);
    let per_block = par::map(par, &positions, |&(x, y)| -> Result<BoundaryMse> {
        let avail = RasterGrid {
            width: frame.width,
            height: frame.height,
            block: n,
            x0: x,
            y0: y,
        };
        let bp = BlockPredictor::new(plane, &avail, x, y, n, MAX_LINES - 1, true, frame.bit_depth, tools(true));
        let orig = frame.planes[0].copy_block(x, y, n, n);
        let mut out = BoundaryMse {
            block_size: n,
            ..Default::default()
        };
        for arm in 0..2 {
            let t = tools(arm == 1);
            let mut best: Option<(u64, Vec<i32>)> = None;
            for line in 0..MAX_LINES {
                for mode in 0..NUM_MODES {
                    let pred = bp.predict_with(line, mode, t)?.samples;
                    let diff: Vec<i32> = orig.iter().zip(&pred).map(|(&o, &p)| o as i32 - p).collect();
                    let cost = satd(&diff, n);
                    if best.as_ref().is_none_or(|b| cost < b.0) {
                        best = Some((cost, pred));
                    }
                }
            }
            let pred = best.expect("at least one candidate").1;
            for yy in 0..n {
                for xx in 0..n {
                    let k = block_line_of(xx, yy);
                    if k < BLOCK_LINES {
                        let e = orig[yy * n + xx] as i64 - pred[yy * n + xx] as i64;
                        out.sse[arm][k] += (e * e) as u64;
                        out.samples[arm][k] += 1;
                    }
                }
            }
        }
        Ok(out)
    });
    let mut total = BoundaryMse {
        block_size: n,
        ..Default::default()
    };
    for b in per_block {
        total.merge(&b?);
    }
    Ok(total)
}
