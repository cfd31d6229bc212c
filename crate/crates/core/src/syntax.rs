//! Bitstream syntax: header, reference line index, intra mode with MPMs,
//! and the coefficient level coder.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::bits::{exp_golomb_len, BitReader, BitSink};
use crate::compensate::HorizontalRange;
use crate::error::{Error, Result};
use crate::pipeline::PredictionTools;
use crate::predict::{DC, NUM_MODES, PLANAR, VER};

pub const MAX_LINES: usize = 4;

/// Set of reference lines an encoder may choose from. L0 is always present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LineSet(u8);

impl LineSet {
    pub const SINGLE: LineSet = LineSet(0b0001);
    pub const FULL4: LineSet = LineSet(0b1111);
    pub const FAST3: LineSet = LineSet(0b1011);

    pub fn from_mask(mask: u8) -> Result<Self> {
        if mask & 1 == 0 || mask >> MAX_LINES != 0 {
            return Err(Error::Config(format!("invalid line mask {mask:#06b}")));
        }
        Ok(LineSet(mask))
    }

    pub fn from_lines(lines: &[usize]) -> Result<Self> {
        let mut mask = 0u8;
        for &l in lines {
            if l >= MAX_LINES {
                return Err(Error::Config(format!("line L{l} out of range")));
            }
            mask |= 1 << l;
        }
        Self::from_mask(mask)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn contains(self, line: usize) -> bool {
        line < MAX_LINES && self.0 >> line & 1 == 1
    }

    /// Lines in ascending order; the position in this list is the code index.
    pub fn lines(self) -> Vec<usize> {
        (0..MAX_LINES).filter(|&l| self.contains(l)).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for LineSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LineSet::SINGLE => write!(f, "single"),
            LineSet::FULL4 => write!(f, "full4"),
            LineSet::FAST3 => write!(f, "fast3"),
            s => {
                for l in s.lines() {
                    write!(f, "L{l}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for LineSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(LineSet::SINGLE),
            "full4" => Ok(LineSet::FULL4),
            "fast3" => Ok(LineSet::FAST3),
            _ => {
                let lines = s
                    .split(['L', ',', '+'])
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>().map_err(|_| Error::Config(format!("bad line set {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Self::from_lines(&lines)
            }
        }
    }
}

/// Truncated unary code of the line's position within the set.
pub fn encode_line_index<S: BitSink>(sink: &mut S, line: usize, set: LineSet) -> Result<()> {
    let lines = set.lines();
    let idx = lines.iter().position(|&l| l == line).ok_or(Error::LineOutOfAlphabet {
        line,
        alphabet: set.to_string(),
    })?;
    let last = lines.len() - 1;
    for _ in 0..idx {
        sink.put_bit(true);
    }
    if idx < last {
        sink.put_bit(false);
    }
    Ok(())
}

pub fn decode_line_index(reader: &mut BitReader, set: LineSet) -> Result<usize> {
    let lines = set.lines();
    let mut idx = 0;
    while idx + 1 < lines.len() && reader.read_bit()? {
        idx += 1;
    }
    Ok(lines[idx])
}

pub fn line_index_bits(line: usize, set: LineSet) -> u32 {
    let idx = set.lines().iter().position(|&l| l == line).unwrap_or(0);
    (idx + 1).min(set.len() - 1) as u32
}

/// Three most probable modes from the left and above neighbours
/// (`None` when unavailable, which counts as DC).
pub fn derive_mpm(left: Option<u8>, above: Option<u8>) -> [u8; 3] {
    let a = left.unwrap_or(DC);
    let b = above.unwrap_or(DC);
    if a == b {
        if a < 2 {
            [PLANAR, DC, VER]
        } else {
            [a, 2 + ((a + 29) % 32), 2 + ((a - 2 + 1) % 32)]
        }
    } else {
        let third = if a != PLANAR && b != PLANAR {
            PLANAR
        } else if a != DC && b != DC {
            DC
        } else {
            VER
        };
        [a, b, third]
    }
}

pub fn encode_mode<S: BitSink>(sink: &mut S, mode: u8, mpm: &[u8; 3]) -> Result<()> {
    if mode >= NUM_MODES {
        return Err(Error::InvalidMode(mode));
    }
    if let Some(i) = mpm.iter().position(|&m| m == mode) {
        sink.put_bit(true);
        match i {
            0 => sink.put_bit(false),
            1 => sink.put_bits(0b10, 2),
            _ => sink.put_bits(0b11, 2),
        }
    } else {
        sink.put_bit(false);
        let below = mpm.iter().filter(|&&m| m < mode).count() as u8;
        sink.put_bits((mode - below) as u64, 5);
    }
    Ok(())
}

pub fn decode_mode(reader: &mut BitReader, mpm: &[u8; 3]) -> Result<u8> {
    if reader.read_bit()? {
        let i = if !reader.read_bit()? {
            0
        } else if !reader.read_bit()? {
            1
        } else {
            2
        };
        Ok(mpm[i])
    } else {
        let mut mode = reader.read_bits(5)? as u8;
        let mut sorted = *mpm;
        sorted.sort_unstable();
        for m in sorted {
            if m <= mode {
                mode += 1;
            }
        }
        Ok(mode)
    }
}

pub fn mode_bits(mode: u8, mpm: &[u8; 3]) -> u32 {
    match mpm.iter().position(|&m| m == mode) {
        Some(0) => 2,
        Some(_) => 3,
        None => 6,
    }
}

/// Up-right diagonal scan starting at DC: raster indices in coding order.
pub fn diagonal_scan(size: usize) -> &'static [usize] {
    static SCANS: [OnceLock<Vec<usize>>; 5] = [const { OnceLock::new() }; 5];
    let slot = size.trailing_zeros() as usize - 2;
    SCANS[slot].get_or_init(|| {
        let mut order = Vec::with_capacity(size * size);
        for d in 0..2 * size - 1 {
            for y in (0..size).rev() {
                if d >= y && d - y < size {
                    order.push(y * size + d - y);
                }
            }
        }
        order
    })
}

const MAX_RICE: u32 = 3;

fn best_k(levels: &[i32]) -> u32 {
    (0..=MAX_RICE)
        .min_by_key(|&k| {
            levels
                .iter()
                .filter(|&&l| l != 0)
                .map(|&l| exp_golomb_len(l.unsigned_abs() - 1, k) as u64)
                .sum::<u64>()
        })
        .unwrap_or(0)
}

/// Coded-block flag, then (k, count, and per nonzero level: zero run,
/// magnitude, sign) in diagonal scan order.
pub fn encode_levels<S: BitSink>(sink: &mut S, levels: &[i32], size: usize) {
    let scan = diagonal_scan(size);
    let nnz = levels.iter().filter(|&&l| l != 0).count();
    if nnz == 0 {
        sink.put_bit(false);
        return;
    }
    sink.put_bit(true);
    let k = best_k(levels);
    sink.put_bits(k as u64, 2);
    sink.put_exp_golomb(nnz as u32 - 1, 0);
    let mut run = 0u32;
    for &pos in scan {
        let l = levels[pos];
        if l == 0 {
            run += 1;
            continue;
        }
        sink.put_exp_golomb(run, 0);
        sink.put_exp_golomb(l.unsigned_abs() - 1, k);
        sink.put_bit(l < 0);
        run = 0;
    }
}

pub fn decode_levels(reader: &mut BitReader, size: usize) -> Result<Vec<i32>> {
    let scan = diagonal_scan(size);
    let mut levels = vec![0i32; size * size];
    if !reader.read_bit()? {
        return Ok(levels);
    }
    let k = reader.read_bits(2)? as u32;
    let nnz = reader.read_exp_golomb(0)? as usize + 1;
    if nnz > size * size {
        return Err(reader.error(format!("{nnz} nonzero levels in a {size}x{size} block")));
    }
    let mut at = 0usize;
    for _ in 0..nnz {
        at += reader.read_exp_golomb(0)? as usize;
        if at >= scan.len() {
            return Err(reader.error("zero run past end of block"));
        }
        let mag = reader.read_exp_golomb(k)? as i64 + 1;
        if mag > 1 << 16 {
            return Err(reader.error("level magnitude out of range"));
        }
        let neg = reader.read_bit()?;
        levels[scan[at]] = if neg { -mag } else { mag } as i32;
        at += 1;
    }
    Ok(levels)
}

pub const HEADER_BYTES: usize = 32;
pub const MAGIC: &[u8; 4] = b"MRLI";
pub const VERSION: u16 = 1;
const FLAG_RANGE_TO_30: u8 = 1;
const FLAG_NO_COMPENSATION: u8 = 2;
const FLAG_NO_BLENDING: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub width: u32,
    pub height: u32,
    pub bit_depth: u8,
    pub qp: u8,
    pub lossless: bool,
    pub lines: LineSet,
    pub frame_count: u32,
    pub tools: PredictionTools,
}

impl StreamHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_BYTES] {
        let mut b = [0u8; HEADER_BYTES];
        b[0..4].copy_from_slice(MAGIC);
        b[4..6].copy_from_slice(&VERSION.to_le_bytes());
        b[6..10].copy_from_slice(&self.width.to_le_bytes());
        b[10..14].copy_from_slice(&self.height.to_le_bytes());
        b[14] = self.bit_depth;
        b[15] = self.qp;
        b[16] = self.lossless as u8;
        b[17] = self.lines.mask();
        b[18..22].copy_from_slice(&self.frame_count.to_le_bytes());
        let mut flags = 0;
        if self.tools.range == HorizontalRange::To30 {
            flags |= FLAG_RANGE_TO_30;
        }
        if !self.tools.compensation {
            flags |= FLAG_NO_COMPENSATION;
        }
        if !self.tools.blending {
            flags |= FLAG_NO_BLENDING;
        }
        b[22] = flags;
        b
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let bad = |what: &str| Error::Bitstream {
            bit: 0,
            reason: format!("header: {what}"),
        };
        if b.len() < HEADER_BYTES {
            return Err(bad("shorter than 32 bytes"));
        }
        if &b[0..4] != MAGIC {
            return Err(bad("bad magic"));
        }
        let version = u16::from_le_bytes([b[4], b[5]]);
        if version != VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let u32_at = |i: usize| u32::from_le_bytes([b[i], b[i + 1], b[i + 2], b[i + 3]]);
        let header = StreamHeader {
            width: u32_at(6),
            height: u32_at(10),
            bit_depth: b[14],
            qp: b[15],
            lossless: match b[16] {
                0 => false,
                1 => true,
                _ => return Err(bad("lossless flag")),
            },
            lines: LineSet::from_mask(b[17]).map_err(|_| bad("line mask"))?,
            frame_count: u32_at(18),
            tools: PredictionTools {
                compensation: b[22] & FLAG_NO_COMPENSATION == 0,
                blending: b[22] & FLAG_NO_BLENDING == 0,
                range: if b[22] & FLAG_RANGE_TO_30 != 0 {
                    HorizontalRange::To30
                } else {
                    HorizontalRange::To29
                },
            },
        };
        if b[22] & !(FLAG_RANGE_TO_30 | FLAG_NO_COMPENSATION | FLAG_NO_BLENDING) != 0 {
            return Err(bad("unknown flags"));
        }
        if header.width == 0 || header.height == 0 || !header.width.is_multiple_of(2) || !header.height.is_multiple_of(2) {
            return Err(bad("dimensions"));
        }
        if !matches!(header.bit_depth, 8 | 10) || header.qp > crate::transform::MAX_QP {
            return Err(bad("bit depth or qp"));
        }
        Ok(header)
    }
}
