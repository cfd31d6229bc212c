//! Block prediction as both encoder and decoder run it, plus the residual
//! path shared by the two.

use crate::compensate::{blend_with_nearest, compensate, compute_interval_residue, ring_prediction, HorizontalRange};
use crate::error::Result;
use crate::frame::Plane;
use crate::predict::{predict, PredBlock};
use crate::reference::{gather_reference_line, smooth_reference, smoothing_applies, Availability, RefLine};
use crate::transform::{forward_transform, quantize, reconstruct_residual, CoeffBlock};

/// Which further-line tools run after the raw line prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictionTools {
    pub compensation: bool,
    pub blending: bool,
    pub range: HorizontalRange,
}

impl Default for PredictionTools {
    fn default() -> Self {
        PredictionTools {
            compensation: true,
            blending: true,
            range: HorizontalRange::To29,
        }
    }
}

/// Chroma line used for a luma line index: L0/L1 map to L0, L2/L3 to L1.
pub fn chroma_line(luma_line: usize) -> usize {
    luma_line / 2
}

/// Reference lines of one block, gathered once and reused across modes.
pub struct BlockPredictor<'a, A: Availability> {
    plane: &'a Plane,
    avail: &'a A,
    x0: usize,
    y0: usize,
    size: usize,
    luma: bool,
    bit_depth: u8,
    tools: PredictionTools,
    raw: Vec<RefLine>,
    smoothed: Vec<Option<RefLine>>,
}

impl<'a, A: Availability> BlockPredictor<'a, A> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        plane: &'a Plane,
        avail: &'a A,
        x0: usize,
        y0: usize,
        size: usize,
        max_line: usize,
        luma: bool,
        bit_depth: u8,
        tools: PredictionTools,
    ) -> Self {
        let raw: Vec<RefLine> = (0..=max_line)
            .map(|l| gather_reference_line(plane, avail, x0, y0, size, l, bit_depth))
            .collect();
        // Planar always qualifies when any mode does, so it stands in for
        // the smoothed variant of each line.
        let smoothed = raw
            .iter()
            .map(|r| (luma && smoothing_applies(size, 0)).then(|| smooth_reference(r, 0)))
            .collect();
        BlockPredictor {
            plane,
            avail,
            x0,
            y0,
            size,
            luma,
            bit_depth,
            tools,
            raw,
            smoothed,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn refs(&self, line: usize, mode: u8) -> &RefLine {
        match &self.smoothed[line] {
            Some(s) if smoothing_applies(self.size, mode) => s,
            _ => &self.raw[line],
        }
    }

    /// Raw prediction from one line with no further-line tools applied.
    pub fn predict_line_only(&self, line: usize, mode: u8) -> Result<PredBlock> {
        predict(self.refs(line, mode), mode, self.luma, self.bit_depth)
    }

    /// Full prediction: line prediction, then residue compensation and
    /// blending with the nearest line when `line > 0`.
    pub fn predict(&self, line: usize, mode: u8) -> Result<PredBlock> {
        self.predict_with(line, mode, self.tools)
    }

    pub fn predict_with(&self, line: usize, mode: u8, tools: PredictionTools) -> Result<PredBlock> {
        let refs = self.refs(line, mode);
        let mut p = predict(refs, mode, self.luma, self.bit_depth)?;
        if line == 0 {
            return Ok(p);
        }
        if tools.compensation {
            let ring = ring_prediction(refs, mode)?;
            let residue = compute_interval_residue(self.plane, self.avail, self.x0, self.y0, &ring);
            p = compensate(&p, &residue, mode, tools.range, self.bit_depth);
        }
        if tools.blending {
            let nearest = predict(self.refs(0, mode), mode, self.luma, self.bit_depth)?;
            p = blend_with_nearest(&p, &nearest)?;
        }
        Ok(p)
    }
}

/// Hadamard SATD of `diff` (row-major, `size` wide), over 8x8 tiles or a
/// single 4x4 tile for 4x4 blocks.
pub fn satd(diff: &[i32], size: usize) -> u64 {
    let tile = if size == 4 { 4 } else { 8 };
    let mut total = 0u64;
    let mut buf = [0i32; 64];
    for ty in (0..size).step_by(tile) {
        for tx in (0..size).step_by(tile) {
            for y in 0..tile {
                for x in 0..tile {
                    buf[y * tile + x] = diff[(ty + y) * size + tx + x];
                }
            }
            total += hadamard_abs_sum(&mut buf[..tile * tile], tile);
        }
    }
    total
}

fn hadamard_abs_sum(m: &mut [i32], n: usize) -> u64 {
    let butterfly = |v: &mut [i32], stride: usize| {
        let mut h = 1;
        while h < n {
            for i in (0..n).step_by(2 * h) {
                for j in i..i + h {
                    let (a, b) = (v[j * stride], v[(j + h) * stride]);
                    v[j * stride] = a + b;
                    v[(j + h) * stride] = a - b;
                }
            }
            h *= 2;
        }
    };
    for r in 0..n {
        butterfly(&mut m[r * n..(r + 1) * n], 1);
    }
    for c in 0..n {
        butterfly(&mut m[c..], n);
    }
    let sum: u64 = m.iter().map(|v| v.unsigned_abs() as u64).sum();
    // Normalisation so a 4x4 and an 8x8 tile weigh samples alike.
    if n == 4 {
        (sum + 1) >> 1
    } else {
        (sum + 2) >> 2
    }
}

/// Residual coding parameters of one transform block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TuParams {
    pub size: usize,
    pub qp: u8,
    pub dst: bool,
    pub lossless: bool,
    pub bit_depth: u8,
}

/// Adds the decoded residual of `levels` to `pred` and clips.
pub fn reconstruct_tu(pred: &[i32], levels: &[i32], p: TuParams) -> Result<Vec<u16>> {
    let residual = if p.lossless {
        levels.to_vec()
    } else {
        reconstruct_residual(
            &CoeffBlock {
                size: p.size,
                qp: p.qp,
                is_dst: p.dst,
                levels: levels.to_vec(),
            },
            p.bit_depth,
        )?
    };
    let max = (1i32 << p.bit_depth) - 1;
    Ok(pred
        .iter()
        .zip(&residual)
        .map(|(&a, &r)| (a + r).clamp(0, max) as u16)
        .collect())
}

/// Encoder side: levels for `orig - pred` and the matching reconstruction.
pub fn code_tu(orig: &[u16], pred: &[i32], p: TuParams) -> Result<(Vec<i32>, Vec<u16>)> {
    let residual: Vec<i32> = orig.iter().zip(pred).map(|(&o, &q)| o as i32 - q).collect();
    let levels = if p.lossless {
        residual
    } else {
        let coeffs = forward_transform(&residual, p.size, p.dst, p.bit_depth)?;
        quantize(&coeffs, p.size, p.qp, p.dst, p.bit_depth).levels
    };
    let recon = reconstruct_tu(pred, &levels, p)?;
    Ok((levels, recon))
}

pub fn sse(a: &[u16], b: &[u16]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum()
}

/// Extracts the `sub`x`sub` window at (`x`,`y`) of a row-major `size`-wide block.
pub fn sub_block<T: Copy>(block: &[T], size: usize, x: usize, y: usize, sub: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(sub * sub);
    for r in y..y + sub {
        out.extend_from_slice(&block[r * size + x..r * size + x + sub]);
    }
    out
}
