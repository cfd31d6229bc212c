//! 35-mode intra prediction from an arbitrary reference line.
//!
//! Angular modes project each sample onto row (or column) `-M-1` with 1/32
//! sample accuracy. Negative angles extend the main reference by projecting
//! the side arm through the inverse angle, measured from the line's corner.

use crate::error::{Error, Result};
use crate::reference::RefLine;

pub const PLANAR: u8 = 0;
pub const DC: u8 = 1;
pub const HOR: u8 = 10;
pub const VER: u8 = 26;
pub const NUM_MODES: u8 = 35;

const ANGLES: [i32; 33] = [
    32, 26, 21, 17, 13, 9, 5, 2, 0, -2, -5, -9, -13, -17, -21, -26, // 2..17
    -32, -26, -21, -17, -13, -9, -5, -2, 0, 2, 5, 9, 13, 17, 21, 26, 32, // 18..34
];

/// Projection displacement in 1/32 sample units for angular modes 2..=34.
pub fn angle_of_mode(mode: u8) -> Result<i32> {
    if (2..NUM_MODES).contains(&mode) {
        Ok(ANGLES[mode as usize - 2])
    } else {
        Err(Error::InvalidMode(mode))
    }
}

/// 256 * 32 / |d|, rounded as in the HEVC inverse angle table.
pub fn inverse_angle(d: i32) -> i32 {
    match d.abs() {
        2 => 4096,
        5 => 1638,
        9 => 910,
        13 => 630,
        17 => 482,
        21 => 390,
        26 => 315,
        32 => 256,
        _ => 0,
    }
}

/// Modes 18..=34 predict from the row; 2..=17 from the column.
pub fn is_vertical_family(mode: u8) -> bool {
    mode >= 18
}

/// Per-row angular projection: `(c_y, z_y)` for displacement `d`
/// at row `y` of a block predicted from line `line`.
#[inline]
pub fn projection(y: isize, line: usize, d: i32) -> (isize, i32) {
    let t = (y as i32 + line as i32 + 1) * d;
    ((t >> 5) as isize, t & 31)
}

/// A predicted square block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredBlock {
    pub size: usize,
    pub mode: u8,
    pub line: usize,
    pub samples: Vec<i32>,
}

impl PredBlock {
    pub fn filled(size: usize, mode: u8, line: usize, v: i32) -> Self {
        PredBlock {
            size,
            mode,
            line,
            samples: vec![v; size * size],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> i32 {
        self.samples[y * self.size + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: i32) {
        self.samples[y * self.size + x] = v;
    }

    pub fn transposed(&self) -> PredBlock {
        let mut out = self.clone();
        for y in 0..self.size {
            for x in 0..self.size {
                out.set(x, y, self.get(y, x));
            }
        }
        out
    }
}

/// Main reference of an angular mode, addressable from the most negative
/// projected index up to the end of the main arm.
pub(crate) struct UnifiedRef {
    data: Vec<i32>,
    origin: isize,
}

impl UnifiedRef {
    /// `main`/`side` are corner-indexed arms; `size`/`line` describe the
    /// block geometry the projection is evaluated for.
    pub(crate) fn build(main: &[i32], side: &[i32], size: usize, line: usize, d: i32) -> Self {
        let reach = ((size + line) as i32 * d) >> 5;
        let k_min = if d < 0 { (reach + line as i32 + 1).min(0) as isize } else { 0 };
        let inv = inverse_angle(d);
        let mut data = Vec::with_capacity(main.len() + (-k_min) as usize);
        for k in k_min..0 {
            let idx = ((k as i32 * -inv + 128) >> 8) as usize;
            data.push(side[idx]);
        }
        data.extend_from_slice(main);
        UnifiedRef { data, origin: k_min }
    }

    #[inline]
    pub(crate) fn at(&self, k: isize) -> i32 {
        self.data[(k - self.origin) as usize]
    }

    /// Two-tap 1/32 interpolation at integer index `k` plus fraction `z`.
    #[inline]
    pub(crate) fn interp(&self, k: isize, z: i32) -> i32 {
        if z == 0 {
            self.at(k)
        } else {
            ((32 - z) * self.at(k) + z * self.at(k + 1) + 16) >> 5
        }
    }
}

/// Angular prediction for a `size`x`size` block from `refs` treated as line
/// `line` of that geometry (the arrays are shared with the caller's block;
/// only the projection distances change).
pub(crate) fn angular_with_geometry(refs: &RefLine, size: usize, line: usize, mode: u8) -> Vec<i32> {
    let d = ANGLES[mode as usize - 2];
    let vertical = is_vertical_family(mode);
    let (main, side) = if vertical { (&refs.top, &refs.left) } else { (&refs.left, &refs.top) };
    let unified = UnifiedRef::build(main, side, size, line, d);
    let mut out = vec![0i32; size * size];
    let off = line as isize + 1;
    for j in 0..size {
        // j runs across rows for vertical modes, across columns otherwise.
        let (c, z) = projection(j as isize, line, d);
        for i in 0..size {
            let v = unified.interp(i as isize + c + off, z);
            if vertical {
                out[j * size + i] = v;
            } else {
                out[i * size + j] = v;
            }
        }
    }
    out
}

/// Angular prediction for modes 2..=34.
pub fn predict_angular(refs: &RefLine, mode: u8) -> Result<PredBlock> {
    angle_of_mode(mode)?;
    Ok(PredBlock {
        size: refs.size,
        mode,
        line: refs.line,
        samples: angular_with_geometry(refs, refs.size, refs.line, mode),
    })
}

/// Rounded mean of the 2N row samples `x = 0..2N` and the 2N column samples
/// `y = 0..2N` of the line.
pub fn dc_value(refs: &RefLine) -> i32 {
    let n = refs.size;
    let sum: i32 = (0..2 * n as isize).map(|i| refs.top_at(i) + refs.left_at(i)).sum();
    let count = 4 * n as i32;
    (sum + count / 2) / count
}

pub fn predict_dc(refs: &RefLine) -> PredBlock {
    PredBlock::filled(refs.size, DC, refs.line, dc_value(refs))
}

/// Planar value at (`x`,`y`) for a block of `size` using `refs` as line
/// `line` of that geometry.
#[inline]
pub(crate) fn planar_sample(refs: &RefLine, size: usize, line: usize, x: isize, y: isize) -> i32 {
    let (n, m) = (size as isize, line as isize);
    let off = m + 1;
    let top = |xx: isize| refs.top[(xx + off) as usize];
    let left = |yy: isize| refs.left[(yy + off) as usize];
    let pv = (n - y - 1) as i32 * top(x) + (y + m + 1) as i32 * left(n);
    let ph = (n - x - 1) as i32 * left(y) + (x + m + 1) as i32 * top(n);
    (pv + ph + (n + m) as i32) / (2 * (n + m) as i32)
}

/// Planar prediction from line `M`, corners at distance `N + M`.
pub fn predict_planar(refs: &RefLine) -> PredBlock {
    let n = refs.size;
    let mut p = PredBlock::filled(n, PLANAR, refs.line, 0);
    for y in 0..n {
        for x in 0..n {
            p.set(x, y, planar_sample(refs, n, refs.line, x as isize, y as isize));
        }
    }
    p
}

/// Dispatches to the planar, DC and angular generators. On the nearest
/// line the DC and pure horizontal/vertical boundary filters are applied to
/// luma blocks smaller than 32x32.
pub fn predict(refs: &RefLine, mode: u8, luma: bool, bit_depth: u8) -> Result<PredBlock> {
    let mut p = match mode {
        PLANAR => predict_planar(refs),
        DC => predict_dc(refs),
        2..=34 => predict_angular(refs, mode)?,
        _ => return Err(Error::InvalidMode(mode)),
    };
    if refs.line == 0 && luma && refs.size < 32 {
        boundary_filters(&mut p, refs, bit_depth);
    }
    Ok(p)
}

fn boundary_filters(p: &mut PredBlock, refs: &RefLine, bit_depth: u8) {
    let n = p.size;
    let max = (1i32 << bit_depth) - 1;
    let corner = refs.top[0];
    match p.mode {
        DC => {
            let dc = p.get(0, 0);
            p.set(0, 0, (refs.left_at(0) + 2 * dc + refs.top_at(0) + 2) >> 2);
            for x in 1..n {
                p.set(x, 0, (refs.top_at(x as isize) + 3 * dc + 2) >> 2);
            }
            for y in 1..n {
                p.set(0, y, (refs.left_at(y as isize) + 3 * dc + 2) >> 2);
            }
        }
        VER => {
            for y in 0..n {
                let v = refs.top_at(0) + ((refs.left_at(y as isize) - corner) >> 1);
                p.set(0, y, v.clamp(0, max));
            }
        }
        HOR => {
            for x in 0..n {
                let v = refs.left_at(0) + ((refs.top_at(x as isize) - corner) >> 1);
                p.set(x, 0, v.clamp(0, max));
            }
        }
        _ => {}
    }
}
