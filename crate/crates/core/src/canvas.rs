//! Reconstruction state shared by the encoder loop and the decoder:
//! reconstructed planes plus which 4x4 luma units are coded, their intra
//! modes and prediction block sizes.

use crate::frame::{Frame, PlaneId};
use crate::reference::Availability;

pub const CTU_SIZE: usize = 64;
const UNIT: usize = 4;
const NO_MODE: u8 = u8::MAX;

#[derive(Debug, Clone)]
pub struct Canvas {
    pub recon: Frame,
    units_w: usize,
    units_h: usize,
    coded: Vec<bool>,
    modes: Vec<u8>,
    pu_sizes: Vec<u8>,
}

/// Saved state of one square luma region (and its chroma).
#[derive(Debug, Clone)]
pub struct Snapshot {
    x: usize,
    y: usize,
    size: usize,
    planes: [Vec<u16>; 3],
    coded: Vec<bool>,
    modes: Vec<u8>,
    pu_sizes: Vec<u8>,
}

impl Canvas {
    /// `width`/`height` must be multiples of the CTU size.
    pub fn new(width: usize, height: usize, bit_depth: u8) -> crate::Result<Self> {
        let recon = Frame::new(width, height, bit_depth)?;
        let (units_w, units_h) = (width / UNIT, height / UNIT);
        Ok(Canvas {
            recon,
            units_w,
            units_h,
            coded: vec![false; units_w * units_h],
            modes: vec![NO_MODE; units_w * units_h],
            pu_sizes: vec![0; units_w * units_h],
        })
    }

    fn unit(&self, x: usize, y: usize) -> usize {
        (y / UNIT) * self.units_w + x / UNIT
    }

    fn for_units(&mut self, x: usize, y: usize, size: usize, mut f: impl FnMut(&mut Self, usize)) {
        for uy in y / UNIT..(y + size).div_ceil(UNIT) {
            for ux in x / UNIT..(x + size).div_ceil(UNIT) {
                f(self, uy * self.units_w + ux);
            }
        }
    }

    /// Records the intra mode and PU size for a luma region.
    pub fn set_mode(&mut self, x: usize, y: usize, size: usize, mode: u8) {
        self.for_units(x, y, size, |c, u| {
            c.modes[u] = mode;
            c.pu_sizes[u] = size as u8;
        });
    }

    /// Marks a luma region as reconstructed.
    pub fn mark_coded(&mut self, x: usize, y: usize, size: usize) {
        self.for_units(x, y, size, |c, u| c.coded[u] = true);
    }

    fn in_picture(&self, x: isize, y: isize) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.recon.width && (y as usize) < self.recon.height
    }

    pub fn mode_at(&self, x: isize, y: isize) -> Option<u8> {
        if !self.in_picture(x, y) {
            return None;
        }
        let m = self.modes[self.unit(x as usize, y as usize)];
        (m != NO_MODE).then_some(m)
    }

    pub fn pu_size_at(&self, x: isize, y: isize) -> Option<usize> {
        if !self.in_picture(x, y) {
            return None;
        }
        let s = self.pu_sizes[self.unit(x as usize, y as usize)];
        (s != 0).then_some(s as usize)
    }

    /// Left and above neighbour modes for a PU at (`x`,`y`); the above
    /// neighbour only counts inside the current CTU row.
    pub fn neighbour_modes(&self, x: usize, y: usize) -> (Option<u8>, Option<u8>) {
        let left = self.mode_at(x as isize - 1, y as isize);
        let above = if y.is_multiple_of(CTU_SIZE) {
            None
        } else {
            self.mode_at(x as isize, y as isize - 1)
        };
        (left, above)
    }

    pub fn availability(&self, plane: PlaneId) -> CodedAvailability<'_> {
        let scale = if plane.is_luma() { 1 } else { 2 };
        CodedAvailability {
            canvas: self,
            scale,
            width: self.recon.width / scale,
            height: self.recon.height / scale,
        }
    }

    pub fn write_block(&mut self, plane: PlaneId, x: usize, y: usize, size: usize, samples: &[u16]) {
        self.recon.plane_mut(plane).write_block(x, y, size, size, samples);
    }

    pub fn snapshot(&self, x: usize, y: usize, size: usize) -> Snapshot {
        let c = size / 2;
        let mut coded = Vec::new();
        let mut modes = Vec::new();
        let mut pu_sizes = Vec::new();
        for uy in y / UNIT..(y + size) / UNIT {
            for ux in x / UNIT..(x + size) / UNIT {
                let u = uy * self.units_w + ux;
                coded.push(self.coded[u]);
                modes.push(self.modes[u]);
                pu_sizes.push(self.pu_sizes[u]);
            }
        }
        Snapshot {
            x,
            y,
            size,
            planes: [
                self.recon.planes[0].copy_block(x, y, size, size),
                self.recon.planes[1].copy_block(x / 2, y / 2, c, c),
                self.recon.planes[2].copy_block(x / 2, y / 2, c, c),
            ],
            coded,
            modes,
            pu_sizes,
        }
    }

    pub fn restore(&mut self, s: &Snapshot) {
        let (x, y, size, c) = (s.x, s.y, s.size, s.size / 2);
        self.recon.planes[0].write_block(x, y, size, size, &s.planes[0]);
        self.recon.planes[1].write_block(x / 2, y / 2, c, c, &s.planes[1]);
        self.recon.planes[2].write_block(x / 2, y / 2, c, c, &s.planes[2]);
        let mut i = 0;
        for uy in y / UNIT..(y + size) / UNIT {
            for ux in x / UNIT..(x + size) / UNIT {
                let u = uy * self.units_w + ux;
                self.coded[u] = s.coded[i];
                self.modes[u] = s.modes[i];
                self.pu_sizes[u] = s.pu_sizes[i];
                i += 1;
            }
        }
    }

    pub fn units(&self) -> (usize, usize) {
        (self.units_w, self.units_h)
    }
}

/// Reference availability from the coded-unit map, for one plane.
#[derive(Clone, Copy)]
pub struct CodedAvailability<'a> {
    canvas: &'a Canvas,
    scale: usize,
    width: usize,
    height: usize,
}

impl Availability for CodedAvailability<'_> {
    fn available(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return false;
        }
        let (lx, ly) = (x as usize * self.scale, y as usize * self.scale);
        self.canvas.coded[self.canvas.unit(lx, ly)]
    }
}
