//! Sample containers, block addressing and raw planar YUV 4:2:0 I/O.

use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaneId {
    Y = 0,
    Cb = 1,
    Cr = 2,
}

impl PlaneId {
    pub const ALL: [PlaneId; 3] = [PlaneId::Y, PlaneId::Cb, PlaneId::Cr];

    pub fn is_luma(self) -> bool {
        self == PlaneId::Y
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A single raster of samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u16>,
}

impl Plane {
    pub fn new(width: usize, height: usize, fill: u16) -> Self {
        Plane {
            width,
            height,
            data: vec![fill; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u16) {
        self.data[y * self.width + x] = v;
    }

    pub fn row(&self, y: usize) -> &[u16] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Copies a `w`x`h` window starting at (`x`,`y`) into a new buffer.
    pub fn copy_block(&self, x: usize, y: usize, w: usize, h: usize) -> Vec<u16> {
        let mut out = Vec::with_capacity(w * h);
        for yy in y..y + h {
            out.extend_from_slice(&self.data[yy * self.width + x..yy * self.width + x + w]);
        }
        out
    }

    pub fn write_block(&mut self, x: usize, y: usize, w: usize, h: usize, src: &[u16]) {
        for (r, yy) in (y..y + h).enumerate() {
            self.data[yy * self.width + x..yy * self.width + x + w]
                .copy_from_slice(&src[r * w..(r + 1) * w]);
        }
    }

    /// Returns the plane with rows and columns exchanged.
    pub fn transposed(&self) -> Plane {
        let mut out = Plane::new(self.height, self.width, 0);
        for y in 0..self.height {
            for x in 0..self.width {
                out.set(y, x, self.get(x, y));
            }
        }
        out
    }
}

/// One picture: luma plus two half-resolution chroma planes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    pub planes: [Plane; 3],
}

pub fn check_bit_depth(bit_depth: u8) -> Result<()> {
    match bit_depth {
        8 | 10 => Ok(()),
        other => Err(Error::Config(format!("bit depth {other} is not supported (8 or 10)"))),
    }
}

impl Frame {
    /// A frame filled with mid-gray.
    pub fn new(width: usize, height: usize, bit_depth: u8) -> Result<Self> {
        check_bit_depth(bit_depth)?;
        if width == 0 || height == 0 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "4:2:0 frames need non-zero even dimensions, got {width}x{height}"
            )));
        }
        let mid = 1u16 << (bit_depth - 1);
        Ok(Frame {
            width,
            height,
            bit_depth,
            planes: [
                Plane::new(width, height, mid),
                Plane::new(width / 2, height / 2, mid),
                Plane::new(width / 2, height / 2, mid),
            ],
        })
    }

    pub fn plane(&self, id: PlaneId) -> &Plane {
        &self.planes[id.index()]
    }

    pub fn plane_mut(&mut self, id: PlaneId) -> &mut Plane {
        &mut self.planes[id.index()]
    }

    pub fn max_value(&self) -> u16 {
        ((1u32 << self.bit_depth) - 1) as u16
    }

    /// Bytes occupied by one frame in the raw planar layout.
    pub fn byte_size(width: usize, height: usize, bit_depth: u8) -> u64 {
        let samples = (width * height + 2 * (width / 2) * (height / 2)) as u64;
        if bit_depth > 8 {
            samples * 2
        } else {
            samples
        }
    }

    /// Parses one frame from raw planar bytes.
    pub fn from_bytes(bytes: &[u8], width: usize, height: usize, bit_depth: u8) -> Result<Self> {
        let mut frame = Frame::new(width, height, bit_depth)?;
        let needed = Frame::byte_size(width, height, bit_depth);
        if (bytes.len() as u64) < needed {
            return Err(Error::Truncated {
                frame: 0,
                needed,
                available: bytes.len() as u64,
            });
        }
        let wide = bit_depth > 8;
        let max = frame.max_value();
        let mut pos = 0usize;
        for plane in frame.planes.iter_mut() {
            for s in plane.data.iter_mut() {
                let v = if wide {
                    let v = u16::from_le_bytes([bytes[pos], bytes[pos + 1]]);
                    pos += 2;
                    v
                } else {
                    let v = bytes[pos] as u16;
                    pos += 1;
                    v
                };
                if v > max {
                    return Err(Error::Config(format!(
                        "sample value {v} exceeds {bit_depth}-bit range"
                    )));
                }
                *s = v;
            }
        }
        Ok(frame)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let wide = self.bit_depth > 8;
        let mut out = Vec::with_capacity(Frame::byte_size(self.width, self.height, self.bit_depth) as usize);
        for plane in &self.planes {
            for &s in &plane.data {
                if wide {
                    out.extend_from_slice(&s.to_le_bytes());
                } else {
                    out.push(s as u8);
                }
            }
        }
        out
    }

    /// Extends the frame to multiples of `multiple` by edge replication.
    pub fn padded(&self, multiple: usize) -> Frame {
        let w = self.width.div_ceil(multiple) * multiple;
        let h = self.height.div_ceil(multiple) * multiple;
        if w == self.width && h == self.height {
            return self.clone();
        }
        let mut out = Frame::new(w, h, self.bit_depth).expect("padded dimensions are valid");
        for (src, dst) in self.planes.iter().zip(out.planes.iter_mut()) {
            for y in 0..dst.height {
                let sy = y.min(src.height - 1);
                for x in 0..dst.width {
                    dst.set(x, y, src.get(x.min(src.width - 1), sy));
                }
            }
        }
        out
    }

    /// Crops to the top-left `width`x`height` window.
    pub fn cropped(&self, width: usize, height: usize) -> Frame {
        let mut out = Frame::new(width, height, self.bit_depth).expect("crop dimensions are valid");
        for (src, dst) in self.planes.iter().zip(out.planes.iter_mut()) {
            let (w, h) = (dst.width, dst.height);
            dst.data = src.copy_block(0, 0, w, h);
        }
        out
    }

    /// Frame with rows and columns exchanged in every plane.
    pub fn transposed(&self) -> Frame {
        Frame {
            width: self.height,
            height: self.width,
            bit_depth: self.bit_depth,
            planes: [
                self.planes[0].transposed(),
                self.planes[1].transposed(),
                self.planes[2].transposed(),
            ],
        }
    }

    /// Sum of squared differences per plane.
    pub fn sse(&self, other: &Frame) -> [u64; 3] {
        let mut out = [0u64; 3];
        for (i, (a, b)) in self.planes.iter().zip(other.planes.iter()).enumerate() {
            out[i] = a
                .data
                .iter()
                .zip(&b.data)
                .map(|(&p, &q)| {
                    let d = p as i64 - q as i64;
                    (d * d) as u64
                })
                .sum();
        }
        out
    }

    pub fn sample_count(&self) -> usize {
        self.planes.iter().map(|p| p.data.len()).sum()
    }
}

/// Reads frame `frame_index` from a headerless planar 4:2:0 file.
///
/// 10-bit content is stored as little-endian 16-bit words.
pub fn load_yuv(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    bit_depth: u8,
    frame_index: usize,
) -> Result<Frame> {
    check_bit_depth(bit_depth)?;
    Frame::new(width, height, bit_depth)?;
    let frame_bytes = Frame::byte_size(width, height, bit_depth);
    let mut file = File::open(path)?;
    let available = file.metadata()?.len();
    let needed = frame_bytes * (frame_index as u64 + 1);
    if available < needed {
        return Err(Error::Truncated {
            frame: frame_index,
            needed,
            available,
        });
    }
    file.seek(SeekFrom::Start(frame_bytes * frame_index as u64))?;
    let mut buf = vec![0u8; frame_bytes as usize];
    file.read_exact(&mut buf)?;
    Frame::from_bytes(&buf, width, height, bit_depth)
}

/// Number of whole frames a raw file holds for the given geometry.
pub fn count_frames(path: impl AsRef<Path>, width: usize, height: usize, bit_depth: u8) -> Result<usize> {
    let len = std::fs::metadata(path)?.len();
    Ok((len / Frame::byte_size(width, height, bit_depth)) as usize)
}

/// Writes `frame` as planar bytes, creating/truncating or appending.
pub fn write_yuv(frame: &Frame, path: impl AsRef<Path>, append: bool) -> Result<()> {
    let mut file = if append {
        OpenOptions::new().create(true).append(true).open(path)?
    } else {
        File::create(path)?
    };
    file.write_all(&frame.to_bytes())?;
    Ok(())
}

/// A square block inside one plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRegion {
    pub plane: PlaneId,
    pub x: usize,
    pub y: usize,
    pub size: usize,
}

impl BlockRegion {
    pub fn new(plane: PlaneId, x: usize, y: usize, size: usize) -> Self {
        BlockRegion { plane, x, y, size }
    }

    pub fn check(&self, plane: &Plane) -> Result<()> {
        let bad_size = !matches!(self.size, 4 | 8 | 16 | 32 | 64);
        if bad_size
            || !self.x.is_multiple_of(4)
            || !self.y.is_multiple_of(4)
            || self.x + self.size > plane.width
            || self.y + self.size > plane.height
        {
            return Err(Error::OutOfBounds {
                x: self.x,
                y: self.y,
                size: self.size,
                width: plane.width,
                height: plane.height,
            });
        }
        Ok(())
    }
}

/// Read-only accessor over an NxN block with (0,0) at the region origin.
#[derive(Debug, Clone, Copy)]
pub struct BlockView<'a> {
    plane: &'a Plane,
    region: BlockRegion,
}

impl<'a> BlockView<'a> {
    pub fn get(&self, x: usize, y: usize) -> u16 {
        assert!(x < self.region.size && y < self.region.size);
        self.plane.get(self.region.x + x, self.region.y + y)
    }

    pub fn size(&self) -> usize {
        self.region.size
    }

    pub fn to_vec(&self) -> Vec<u16> {
        self.plane
            .copy_block(self.region.x, self.region.y, self.region.size, self.region.size)
    }
}

pub fn block_view<'a>(frame: &'a Frame, region: BlockRegion) -> Result<BlockView<'a>> {
    let plane = frame.plane(region.plane);
    region.check(plane)?;
    Ok(BlockView { plane, region })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_frame() -> Frame {
        let mut f = Frame::new(16, 16, 8).unwrap();
        for y in 0..16 {
            for x in 0..16 {
                f.planes[0].set(x, y, (x + 16 * y) as u16);
            }
        }
        f
    }

    #[test]
    fn zero_file_loads_as_zero_frame() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("zero.yuv");
        std::fs::write(&path, [0u8; 6]).unwrap();
        let f = load_yuv(&path, 2, 2, 8, 0).unwrap();
        assert!(f.planes.iter().all(|p| p.data.iter().all(|&s| s == 0)));
    }

    #[test]
    fn short_file_is_truncation_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("short.yuv");
        std::fs::write(&path, [0u8; 5]).unwrap();
        match load_yuv(&path, 2, 2, 8, 0) {
            Err(Error::Truncated { needed, available, .. }) => {
                assert_eq!((needed, available), (6, 5));
            }
            other => panic!("expected truncation, got {other:?}"),
        }
        assert!(matches!(load_yuv(&path, 2, 2, 9, 0), Err(Error::Config(_))));
    }

    #[test]
    fn gray_frame_writes_96_bytes_and_appends() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gray.yuv");
        let f = Frame::new(8, 8, 8).unwrap();
        write_yuv(&f, &path, false).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 96);
        assert!(bytes.iter().all(|&b| b == 0x80));
        write_yuv(&f, &path, true).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 192);
        assert_eq!(count_frames(&path, 8, 8, 8).unwrap(), 2);
        assert_eq!(load_yuv(&path, 8, 8, 8, 1).unwrap(), f);
    }

    #[test]
    fn ten_bit_is_little_endian() {
        let mut f = Frame::new(2, 2, 10).unwrap();
        f.planes[0].set(0, 0, 0x3ff);
        let bytes = f.to_bytes();
        assert_eq!(&bytes[..2], &[0xff, 0x03]);
        assert_eq!(Frame::from_bytes(&bytes, 2, 2, 10).unwrap(), f);
    }

    #[test]
    fn block_view_translates_and_checks_bounds() {
        let f = ramp_frame();
        let v = block_view(&f, BlockRegion::new(PlaneId::Y, 0, 0, 4)).unwrap();
        assert_eq!(v.get(3, 2), 35);
        let v = block_view(&f, BlockRegion::new(PlaneId::Y, 8, 4, 8)).unwrap();
        assert_eq!(v.get(1, 1), f.planes[0].get(9, 5));
        assert!(block_view(&f, BlockRegion::new(PlaneId::Y, 12, 0, 8)).is_err());
        let gray = Frame::new(16, 16, 8).unwrap();
        let v = block_view(&gray, BlockRegion::new(PlaneId::Cb, 0, 0, 8)).unwrap();
        assert!(v.to_vec().iter().all(|&s| s == 128));
    }

    #[test]
    fn pad_then_crop_is_identity() {
        let f = ramp_frame().cropped(10, 6);
        let p = f.padded(8);
        assert_eq!((p.width, p.height), (16, 8));
        assert_eq!(p.planes[0].get(15, 7), f.planes[0].get(9, 5));
        assert_eq!(p.cropped(10, 6), f);
    }
}
