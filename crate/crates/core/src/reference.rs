//! Reference line assembly: gathering, substitution padding and [1 2 1]
//! smoothing for a line at any distance from the block.
//!
//! A line `L_M` around an NxN block consists of a row at `y = -M-1` covering
//! `x = -M-1 ..= 2N+M-1` and a column at `x = -M-1` covering
//! `y = -M ..= 2N+M-1`, for `4(N+M)+1` samples in total. Both arrays here are
//! indexed from the shared corner sample, which is stored at index 0 of each.

use crate::frame::Plane;
use crate::predict::{DC, PLANAR};

/// Decides which picture samples may be used as references.
pub trait Availability {
    fn available(&self, x: isize, y: isize) -> bool;
}

/// Every sample inside the picture is usable.
#[derive(Debug, Clone, Copy)]
pub struct WholePicture {
    pub width: usize,
    pub height: usize,
}

impl Availability for WholePicture {
    fn available(&self, x: isize, y: isize) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }
}

/// Availability for blocks of a fixed grid visited in raster order: samples
/// in earlier grid rows, or earlier columns of the current row, are usable.
#[derive(Debug, Clone, Copy)]
pub struct RasterGrid {
    pub width: usize,
    pub height: usize,
    pub block: usize,
    pub x0: usize,
    pub y0: usize,
}

impl Availability for RasterGrid {
    fn available(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return false;
        }
        let (bx, by) = (x as usize / self.block, y as usize / self.block);
        let (cx, cy) = (self.x0 / self.block, self.y0 / self.block);
        by < cy || (by == cy && bx < cx)
    }
}

/// Unified reference array for one line around one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefLine {
    pub size: usize,
    pub line: usize,
    /// `top[k]` is the sample at `(k - line - 1, -line - 1)`.
    pub top: Vec<i32>,
    /// `left[k]` is the sample at `(-line - 1, k - line - 1)`; `left[0] == top[0]`.
    pub left: Vec<i32>,
    pub avail_top: Vec<bool>,
    pub avail_left: Vec<bool>,
    pub smoothed: bool,
}

impl RefLine {
    /// Length of each corner-indexed array.
    pub fn arm_len(size: usize, line: usize) -> usize {
        2 * (size + line) + 1
    }

    /// Distinct samples held: `4(N+M)+1`.
    pub fn sample_count(&self) -> usize {
        self.top.len() + self.left.len() - 1
    }

    /// Builds a line directly from sample values (everything marked available).
    pub fn from_arrays(size: usize, line: usize, top: Vec<i32>, left: Vec<i32>) -> Self {
        let n = Self::arm_len(size, line);
        assert_eq!(top.len(), n, "top arm length");
        assert_eq!(left.len(), n, "left arm length");
        assert_eq!(top[0], left[0], "corner must be shared");
        RefLine {
            size,
            line,
            top,
            left,
            avail_top: vec![true; n],
            avail_left: vec![true; n],
            smoothed: false,
        }
    }

    /// A line where every sample holds `v`.
    pub fn constant(size: usize, line: usize, v: i32) -> Self {
        let n = Self::arm_len(size, line);
        Self::from_arrays(size, line, vec![v; n], vec![v; n])
    }

    /// Row sample at block coordinate `x` (row `-line-1`).
    #[inline]
    pub fn top_at(&self, x: isize) -> i32 {
        self.top[(x + self.line as isize + 1) as usize]
    }

    /// Column sample at block coordinate `y` (column `-line-1`).
    #[inline]
    pub fn left_at(&self, y: isize) -> i32 {
        self.left[(y + self.line as isize + 1) as usize]
    }

    /// Samples in substitution order: bottom of the column up to the corner,
    /// then the row from the corner rightward.
    fn scan_order(&self) -> Vec<i32> {
        let mut seq: Vec<i32> = self.left[1..].iter().rev().copied().collect();
        seq.extend_from_slice(&self.top);
        seq
    }

    fn load_scan(&mut self, seq: &[i32]) {
        let n = self.left.len();
        for k in 1..n {
            self.left[k] = seq[n - 1 - k];
        }
        self.top.copy_from_slice(&seq[n - 1..]);
        self.left[0] = self.top[0];
    }
}

/// Gathers line `line` around the `size`x`size` block at (`x0`,`y0`).
///
/// Unavailable samples are substituted by scanning from the bottom of the
/// column to the right end of the row, each taking its predecessor's value;
/// a leading run takes the first available value. With nothing available
/// every sample is `2^(bit_depth-1)`.
pub fn gather_reference_line(
    plane: &Plane,
    avail: &impl Availability,
    x0: usize,
    y0: usize,
    size: usize,
    line: usize,
    bit_depth: u8,
) -> RefLine {
    let n = RefLine::arm_len(size, line);
    let off = line as isize + 1;
    let (bx, by) = (x0 as isize, y0 as isize);
    let mut top = vec![0i32; n];
    let mut left = vec![0i32; n];
    let mut avail_top = vec![false; n];
    let mut avail_left = vec![false; n];
    for k in 0..n {
        let (x, y) = (bx + k as isize - off, by - off);
        if avail.available(x, y) {
            avail_top[k] = true;
            top[k] = plane.get(x as usize, y as usize) as i32;
        }
        let (x, y) = (bx - off, by + k as isize - off);
        if avail.available(x, y) {
            avail_left[k] = true;
            left[k] = plane.get(x as usize, y as usize) as i32;
        }
    }
    let mut refs = RefLine {
        size,
        line,
        top,
        left,
        avail_top,
        avail_left,
        smoothed: false,
    };
    pad(&mut refs, bit_depth);
    refs
}

fn pad(refs: &mut RefLine, bit_depth: u8) {
    let mut flags: Vec<bool> = refs.avail_left[1..].iter().rev().copied().collect();
    flags.extend_from_slice(&refs.avail_top);
    let mut seq = refs.scan_order();
    match flags.iter().position(|&a| a) {
        None => seq.iter_mut().for_each(|s| *s = 1 << (bit_depth - 1)),
        Some(first) => {
            let v = seq[first];
            seq[..first].iter_mut().for_each(|s| *s = v);
            for i in first + 1..seq.len() {
                if !flags[i] {
                    seq[i] = seq[i - 1];
                }
            }
        }
    }
    refs.load_scan(&seq);
}

/// Whether the [1 2 1] reference filter applies to a luma block of `size`
/// predicted with `mode`. Never for DC or 4x4; otherwise when the mode's
/// distance from both pure horizontal and pure vertical exceeds a threshold
/// that shrinks with block size.
pub fn smoothing_applies(size: usize, mode: u8) -> bool {
    if mode == DC || size <= 4 {
        return false;
    }
    let threshold = match size {
        8 => 7,
        16 => 1,
        _ => 0,
    };
    let m = mode as i32;
    let dist = (m - 26).abs().min((m - 10).abs());
    mode == PLANAR || dist > threshold
}

/// Applies [1 2 1]/4 smoothing along the scan order when the size/mode
/// condition holds; the two ends are copied.
pub fn smooth_reference(refs: &RefLine, mode: u8) -> RefLine {
    let mut out = refs.clone();
    if !smoothing_applies(refs.size, mode) {
        out.smoothed = false;
        return out;
    }
    let seq = refs.scan_order();
    let mut filtered = seq.clone();
    for i in 1..seq.len() - 1 {
        filtered[i] = (seq[i - 1] + 2 * seq[i] + seq[i + 1] + 2) >> 2;
    }
    out.load_scan(&filtered);
    out.smoothed = true;
    out
}
