//! Statistical experiments over the codec: best-line census, quantization
//! error variance, boundary prediction error with and without residue
//! compensation, line subset sweeps and RD curve comparison.

pub mod bdrate;
pub mod boundary;
pub mod census;
pub mod sweep;
pub mod variance;

use crate::encoder::{encode_frame, EncoderConfig};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::syntax::LineSet;

fn check_grid(frame: &Frame, block: usize) -> Result<()> {
    if !matches!(block, 4 | 8 | 16 | 32 | 64) {
        return Err(Error::Config(format!("block size {block} not in 4..64")));
    }
    if !frame.width.is_multiple_of(block) || !frame.height.is_multiple_of(block) {
        return Err(Error::Config(format!(
            "block size {block} does not tile a {}x{} frame",
            frame.width, frame.height
        )));
    }
    Ok(())
}

/// Single-line reconstruction of `frame` at `qp`.
pub fn compressed_reference(frame: &Frame, qp: u8, par: crate::par::Parallelism) -> Result<Frame> {
    let cfg = EncoderConfig {
        parallelism: par,
        ..EncoderConfig::new(qp, LineSet::SINGLE)
    };
    Ok(encode_frame(frame, &cfg)?.1)
}

/// Top-left corners of a non-overlapping grid, in raster order.
fn grid(frame: &Frame, block: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for y in (0..frame.height).step_by(block) {
        for x in (0..frame.width).step_by(block) {
            v.push((x, y));
        }
    }
    v
}
