//! Residue compensation for further-line predictions, and blending with the
//! nearest-line prediction.
//!
//! When a block is predicted from line `L_M` with `M >= 1`, the samples of
//! line `L_0` lie between the reference and the block. They are already
//! reconstructed, so predicting them from `L_M` as well yields a residue
//! `r - p` along the block boundary. That residue is added back, weighted,
//! to the first rows/columns of the prediction in a mode-dependent pattern.

use crate::error::{Error, Result};
use crate::frame::Plane;
use crate::predict::{
    angle_of_mode, angular_with_geometry, dc_value, inverse_angle, is_vertical_family, planar_sample,
    projection, PredBlock, UnifiedRef, DC, HOR, PLANAR, VER,
};
use crate::reference::{Availability, RefLine};

/// Rows/columns touched by the multi-line compensation types.
pub const COMPENSATED_LINES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompensationType {
    /// First row, for modes around pure horizontal.
    Vertical,
    /// First column, for modes around pure vertical.
    Horizontal,
    /// Three rows and three columns, for DC and planar.
    BothSide,
    /// Three boundary lines along the prediction direction.
    Parallel,
    /// Both ends of the 45-degree diagonals (modes 2 and 34).
    BiDirectional,
    None,
}

/// Upper end of the horizontal-type mode range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HorizontalRange {
    /// Modes 23..=29.
    #[default]
    To29,
    /// Modes 23..=30.
    To30,
}

pub fn compensation_type_for_mode(mode: u8, range: HorizontalRange) -> CompensationType {
    let hor_end = match range {
        HorizontalRange::To29 => 29,
        HorizontalRange::To30 => 30,
    };
    match mode {
        PLANAR | DC => CompensationType::BothSide,
        7..=13 => CompensationType::Vertical,
        14..=22 => CompensationType::Parallel,
        2 | 34 => CompensationType::BiDirectional,
        m if (23..=hor_end).contains(&m) => CompensationType::Horizontal,
        _ => CompensationType::None,
    }
}

/// Fixed-point numerator over 64 of the single-line weight:
/// `(14 - |dir - anchor|) * 3`, anchor being HOR or VER.
pub fn single_line_weight(mode: u8, anchor: u8) -> i32 {
    (14 - (mode as i32 - anchor as i32).abs()) * 3
}

/// Numerator over 4 of the weight for boundary line `k`: `3 - k`.
pub fn multi_line_weight(k: usize) -> i32 {
    3 - k as i32
}

/// The (N+1)x(N+1) prediction anchored one sample up-left of the block,
/// generated from the same line (which is line `M-1` of the larger block).
pub fn extended_prediction(refs: &RefLine, mode: u8) -> Result<PredBlock> {
    if refs.line == 0 {
        return Err(Error::Config("extended prediction needs a line index of at least 1".into()));
    }
    let (size, line) = (refs.size + 1, refs.line - 1);
    let samples = match mode {
        DC => vec![dc_value(refs); size * size],
        PLANAR => {
            let mut v = Vec::with_capacity(size * size);
            for y in 0..size as isize {
                for x in 0..size as isize {
                    v.push(planar_sample(refs, size, line, x, y));
                }
            }
            v
        }
        _ => {
            angle_of_mode(mode)?;
            angular_with_geometry(refs, size, line, mode)
        }
    };
    Ok(PredBlock {
        size,
        mode,
        line: refs.line,
        samples,
    })
}

/// Predicted values on the nearest line: row `-1` and column `-1`, for
/// coordinates `-1 ..= span-1`. `span` is `2N` for modes 2 and 34 (their
/// bi-directional compensation reads past the block) and `N` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingPrediction {
    pub size: usize,
    /// `top[k]` is the prediction at `(k-1, -1)`.
    pub top: Vec<i32>,
    /// `left[k]` is the prediction at `(-1, k-1)`.
    pub left: Vec<i32>,
}

pub fn ring_prediction(refs: &RefLine, mode: u8) -> Result<RingPrediction> {
    let ext = extended_prediction(refs, mode)?;
    let n = refs.size;
    let mut top: Vec<i32> = (0..=n).map(|k| ext.get(k, 0)).collect();
    let mut left: Vec<i32> = (0..=n).map(|k| ext.get(0, k)).collect();
    if matches!(mode, 2 | 34) {
        // Past the enlarged block; |d| = 32 keeps every projection integral
        // and inside the arm.
        let d = angle_of_mode(mode)?;
        let vertical = is_vertical_family(mode);
        let (main, side) = if vertical { (&refs.top, &refs.left) } else { (&refs.left, &refs.top) };
        let line = refs.line - 1;
        let unified = UnifiedRef::build(main, side, n + 1, line, d);
        let sample = |i: isize, j: isize| {
            let (c, z) = projection(j, line, d);
            unified.interp(i + c + line as isize + 1, z)
        };
        for k in n + 1..=2 * n {
            // Enlarged coordinates: (k, 0) on the row, (0, k) on the column.
            let (row, col) = if vertical {
                (sample(k as isize, 0), sample(0, k as isize))
            } else {
                (sample(0, k as isize), sample(k as isize, 0))
            };
            top.push(row);
            left.push(col);
        }
    }
    Ok(RingPrediction { size: n, top, left })
}

/// Reconstruction, prediction and availability on the nearest line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueLine {
    pub size: usize,
    /// Index `k` is coordinate `k - 1` along row `-1`.
    pub top_rec: Vec<i32>,
    pub top_pred: Vec<i32>,
    pub top_ok: Vec<bool>,
    /// Index `k` is coordinate `k - 1` down column `-1`.
    pub left_rec: Vec<i32>,
    pub left_pred: Vec<i32>,
    pub left_ok: Vec<bool>,
}

impl ResidueLine {
    /// A residue line that is zero everywhere.
    pub fn zero(size: usize) -> Self {
        let n = 2 * size + 1;
        ResidueLine {
            size,
            top_rec: vec![0; n],
            top_pred: vec![0; n],
            top_ok: vec![true; n],
            left_rec: vec![0; n],
            left_pred: vec![0; n],
            left_ok: vec![true; n],
        }
    }

    #[inline]
    fn residue(rec: &[i32], pred: &[i32], ok: &[bool], c: isize) -> i32 {
        let k = c + 1;
        if k < 0 || k as usize >= ok.len() || !ok[k as usize] {
            return 0;
        }
        rec[k as usize] - pred[k as usize]
    }

    /// Residue at integer row coordinate `x`; zero where unavailable.
    pub fn top(&self, x: isize) -> i32 {
        Self::residue(&self.top_rec, &self.top_pred, &self.top_ok, x)
    }

    pub fn left(&self, y: isize) -> i32 {
        Self::residue(&self.left_rec, &self.left_pred, &self.left_ok, y)
    }

    fn fractional(rec: &[i32], pred: &[i32], ok: &[bool], c: isize, z: i32) -> i32 {
        if z == 0 {
            return Self::residue(rec, pred, ok, c);
        }
        let (a, b) = ((c + 1) as usize, (c + 2) as usize);
        if b >= ok.len() || !ok[a] || !ok[b] {
            return 0;
        }
        let r = ((32 - z) * rec[a] + z * rec[b] + 16) >> 5;
        let p = ((32 - z) * pred[a] + z * pred[b] + 16) >> 5;
        r - p
    }

    fn top_frac(&self, x: isize, z: i32) -> i32 {
        Self::fractional(&self.top_rec, &self.top_pred, &self.top_ok, x, z)
    }

    fn left_frac(&self, y: isize, z: i32) -> i32 {
        Self::fractional(&self.left_rec, &self.left_pred, &self.left_ok, y, z)
    }

    pub fn is_zero(&self) -> bool {
        let n = self.top_ok.len() as isize;
        (-1..n - 1).all(|c| self.top(c) == 0 && self.left(c) == 0)
    }
}

/// Pairs the nearest-line reconstruction around the block at (`x0`,`y0`)
/// with its further-line prediction. Unreconstructed positions are marked
/// unavailable and contribute a zero residue.
pub fn compute_interval_residue(
    plane: &Plane,
    avail: &impl Availability,
    x0: usize,
    y0: usize,
    ring: &RingPrediction,
) -> ResidueLine {
    let (bx, by) = (x0 as isize, y0 as isize);
    let fetch = |x: isize, y: isize| {
        if avail.available(x, y) {
            (plane.get(x as usize, y as usize) as i32, true)
        } else {
            (0, false)
        }
    };
    let (top_rec, top_ok): (Vec<i32>, Vec<bool>) =
        (0..ring.top.len()).map(|k| fetch(bx + k as isize - 1, by - 1)).unzip();
    let (left_rec, left_ok): (Vec<i32>, Vec<bool>) =
        (0..ring.left.len()).map(|k| fetch(bx - 1, by + k as isize - 1)).unzip();
    ResidueLine {
        size: ring.size,
        top_rec,
        top_pred: ring.top.clone(),
        top_ok,
        left_rec,
        left_pred: ring.left.clone(),
        left_ok,
    }
}

#[inline]
fn weighted(k: usize, residue: i32) -> i32 {
    (multi_line_weight(k) * residue + 2) >> 2
}

/// Applies the compensation pattern selected for `mode`; type `None` returns
/// the prediction unchanged. Results are clamped to the sample range.
pub fn compensate(
    pred: &PredBlock,
    residue: &ResidueLine,
    mode: u8,
    range: HorizontalRange,
    bit_depth: u8,
) -> PredBlock {
    let n = pred.size;
    let kk = COMPENSATED_LINES.min(n);
    let mut out = pred.clone();
    let add = |out: &mut PredBlock, x: usize, y: usize, delta: i32| {
        let v = out.get(x, y) + delta;
        out.set(x, y, v);
    };
    match compensation_type_for_mode(mode, range) {
        CompensationType::None => return out,
        CompensationType::Vertical => {
            let w = single_line_weight(mode, HOR);
            for x in 0..n {
                add(&mut out, x, 0, (w * residue.top(x as isize) + 32) >> 6);
            }
        }
        CompensationType::Horizontal => {
            let w = single_line_weight(mode, VER);
            for y in 0..n {
                add(&mut out, 0, y, (w * residue.left(y as isize) + 32) >> 6);
            }
        }
        CompensationType::BothSide => {
            for y in 0..kk {
                for x in 0..n {
                    add(&mut out, x, y, weighted(y, residue.top(x as isize)));
                }
            }
            for y in 0..n {
                for x in 0..kk {
                    add(&mut out, x, y, weighted(x, residue.left(y as isize)));
                }
            }
        }
        CompensationType::BiDirectional => {
            for y in 0..kk {
                for x in 0..n {
                    add(&mut out, x, y, weighted(y, residue.top((x + y + 1) as isize)));
                }
            }
            for y in 0..n {
                for x in 0..kk {
                    add(&mut out, x, y, weighted(x, residue.left((x + y + 1) as isize)));
                }
            }
        }
        CompensationType::Parallel => {
            let d = angle_of_mode(mode).expect("parallel type is angular");
            let inv = inverse_angle(d);
            let vertical = is_vertical_family(mode);
            for y in 0..n {
                for x in 0..n {
                    if x >= kk && y >= kk {
                        continue;
                    }
                    // Work in the main-direction frame: `a` along the main
                    // reference, `b` across it.
                    let (a, b) = if vertical { (x, y) } else { (y, x) };
                    let pos = ((a as i32) << 5) + (b as i32 + 1) * d;
                    let r = if pos >= -32 {
                        let (c, z) = ((pos >> 5) as isize, pos & 31);
                        if vertical { residue.top_frac(c, z) } else { residue.left_frac(c, z) }
                    } else {
                        let side = (((b as i32) << 5) - (((a as i32 + 1) * inv + 4) >> 3)).max(-32);
                        let (c, z) = ((side >> 5) as isize, side & 31);
                        if vertical { residue.left_frac(c, z) } else { residue.top_frac(c, z) }
                    };
                    add(&mut out, x, y, weighted(x.min(y), r));
                }
            }
        }
    }
    let max = (1i32 << bit_depth) - 1;
    out.samples.iter_mut().for_each(|s| *s = (*s).clamp(0, max));
    out
}

/// `(3 * further + nearest + 2) >> 2`.
pub fn blend_with_nearest(further: &PredBlock, nearest: &PredBlock) -> Result<PredBlock> {
    if further.size != nearest.size || further.mode != nearest.mode {
        return Err(Error::Mismatch(format!(
            "cannot blend {}x{} mode {} with {}x{} mode {}",
            further.size, further.size, further.mode, nearest.size, nearest.size, nearest.mode
        )));
    }
    let samples = further
        .samples
        .iter()
        .zip(&nearest.samples)
        .map(|(&m, &z)| (3 * m + z + 2) >> 2)
        .collect();
    Ok(PredBlock {
        size: further.size,
        mode: further.mode,
        line: further.line,
        samples,
    })
}
