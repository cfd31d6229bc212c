//! HEVC integer core transforms (DCT-II approximation for 4..32, DST-VII
//! for 4x4 luma intra) and the flat-matrix scalar quantizer.

use crate::error::{Error, Result};

/// Values of the 32-point matrix along the first quarter wave:
/// `DCT_WAVE[j]` approximates `64 * sqrt(2) * cos(j * pi / 64)`.
const DCT_WAVE: [i32; 33] = [
    64, 90, 90, 90, 89, 88, 87, 85, 83, 82, 80, 78, 75, 73, 70, 67, 64, 61, 57, 54, 50, 46, 43, 38,
    36, 31, 25, 22, 18, 13, 9, 4, 0,
];

const DST4: [[i32; 4]; 4] = [
    [29, 55, 74, 84],
    [74, 74, 0, -74],
    [84, -29, -74, 55],
    [55, -84, 74, -29],
];

fn wave(j: usize) -> i32 {
    match j % 128 {
        j @ 0..=32 => DCT_WAVE[j],
        j @ 33..=64 => -DCT_WAVE[64 - j],
        j @ 65..=96 => -DCT_WAVE[j - 64],
        j => DCT_WAVE[128 - j],
    }
}

/// Row-major `size`x`size` integer DCT matrix (`m[k * size + n]`).
pub fn dct_matrix(size: usize) -> Vec<i32> {
    let step = 32 / size;
    let mut m = vec![0i32; size * size];
    for k in 0..size {
        for n in 0..size {
            let row = k * step;
            m[k * size + n] = if row == 0 { 64 } else { wave((2 * n + 1) * row) };
        }
    }
    m
}

fn matrix(size: usize, use_dst: bool) -> Vec<i32> {
    if use_dst {
        DST4.iter().flatten().copied().collect()
    } else {
        dct_matrix(size)
    }
}

fn log2(size: usize) -> u32 {
    size.trailing_zeros()
}

fn check(size: usize, use_dst: bool) -> Result<()> {
    if !matches!(size, 4 | 8 | 16 | 32) {
        return Err(Error::Config(format!("transform size {size} not in 4..32")));
    }
    if use_dst && size != 4 {
        return Err(Error::Config("DST is only defined for 4x4".into()));
    }
    Ok(())
}

#[inline]
fn round_shift(v: i64, shift: u32) -> i64 {
    if shift == 0 {
        v
    } else {
        (v + (1 << (shift - 1))) >> shift
    }
}

/// Residual block (row-major) to transform coefficients.
pub fn forward_transform(residual: &[i32], size: usize, use_dst: bool, bit_depth: u8) -> Result<Vec<i32>> {
    check(size, use_dst)?;
    let m = matrix(size, use_dst);
    let shift1 = log2(size) + bit_depth as u32 - 9;
    let shift2 = log2(size) + 6;
    // Rows first.
    let mut tmp = vec![0i64; size * size];
    for r in 0..size {
        for k in 0..size {
            let s: i64 = (0..size).map(|n| m[k * size + n] as i64 * residual[r * size + n] as i64).sum();
            tmp[r * size + k] = round_shift(s, shift1);
        }
    }
    let mut out = vec![0i32; size * size];
    for k in 0..size {
        for u in 0..size {
            let s: i64 = (0..size).map(|r| m[u * size + r] as i64 * tmp[r * size + k]).sum();
            out[u * size + k] = round_shift(s, shift2) as i32;
        }
    }
    Ok(out)
}

/// Coefficients back to a residual block.
pub fn inverse_transform(coeffs: &[i32], size: usize, use_dst: bool, bit_depth: u8) -> Result<Vec<i32>> {
    check(size, use_dst)?;
    let m = matrix(size, use_dst);
    let shift2 = 20 - bit_depth as u32;
    let mut tmp = vec![0i64; size * size];
    for k in 0..size {
        for r in 0..size {
            let s: i64 = (0..size).map(|u| m[u * size + r] as i64 * coeffs[u * size + k] as i64).sum();
            tmp[r * size + k] = round_shift(s, 7).clamp(-32768, 32767);
        }
    }
    let mut out = vec![0i32; size * size];
    for r in 0..size {
        for n in 0..size {
            let s: i64 = (0..size).map(|k| m[k * size + n] as i64 * tmp[r * size + k]).sum();
            out[r * size + n] = round_shift(s, shift2) as i32;
        }
    }
    Ok(out)
}

const QUANT_SCALES: [i64; 6] = [26214, 23302, 20560, 18396, 16384, 14564];
const DEQUANT_SCALES: [i64; 6] = [40, 45, 51, 57, 64, 72];
/// Intra dead-zone rounding offset, in 1/512 of a step.
pub const INTRA_ROUNDING: i64 = 171;
pub const MAX_QP: u8 = 51;

/// Quantized transform block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffBlock {
    pub size: usize,
    pub qp: u8,
    pub is_dst: bool,
    pub levels: Vec<i32>,
}

impl CoeffBlock {
    pub fn zeros(size: usize, qp: u8, is_dst: bool) -> Self {
        CoeffBlock {
            size,
            qp,
            is_dst,
            levels: vec![0; size * size],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|&l| l == 0)
    }
}

fn quant_shift(qp: u8, size: usize, bit_depth: u8) -> u32 {
    let transform_shift = 15 - bit_depth as i32 - log2(size) as i32;
    (14 + qp as i32 / 6 + transform_shift) as u32
}

/// Quantizer step in coefficient units.
pub fn quant_step(qp: u8, size: usize, bit_depth: u8) -> f64 {
    (1u64 << quant_shift(qp, size, bit_depth)) as f64 / QUANT_SCALES[qp as usize % 6] as f64
}

pub fn quantize(coeffs: &[i32], size: usize, qp: u8, is_dst: bool, bit_depth: u8) -> CoeffBlock {
    let qbits = quant_shift(qp, size, bit_depth);
    let scale = QUANT_SCALES[qp as usize % 6];
    let add = INTRA_ROUNDING << (qbits - 9);
    let levels = coeffs
        .iter()
        .map(|&c| {
            let mag = ((c.unsigned_abs() as i64 * scale + add) >> qbits).min(32767) as i32;
            if c < 0 {
                -mag
            } else {
                mag
            }
        })
        .collect();
    CoeffBlock {
        size,
        qp,
        is_dst,
        levels,
    }
}

pub fn dequantize(block: &CoeffBlock, bit_depth: u8) -> Vec<i32> {
    let shift = bit_depth as u32 + log2(block.size) - 9;
    let scale = DEQUANT_SCALES[block.qp as usize % 6] << (block.qp / 6);
    block
        .levels
        .iter()
        .map(|&l| round_shift(l as i64 * scale, shift).clamp(-32768, 32767) as i32)
        .collect()
}

/// Dequantize and inverse transform.
pub fn reconstruct_residual(block: &CoeffBlock, bit_depth: u8) -> Result<Vec<i32>> {
    if block.is_zero() {
        return Ok(vec![0; block.size * block.size]);
    }
    inverse_transform(&dequantize(block, bit_depth), block.size, block.is_dst, bit_depth)
}

/// Chroma QP from the luma QP (4:2:0 mapping table).
pub fn chroma_qp(qp: u8) -> u8 {
    const TABLE: [u8; 14] = [29, 30, 31, 32, 33, 33, 34, 34, 35, 35, 36, 36, 37, 37];
    match qp {
        0..=29 => qp,
        30..=43 => TABLE[qp as usize - 30],
        _ => qp - 6,
    }
}
