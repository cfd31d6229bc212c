//! Bitstream parser and reconstruction, sharing prediction and residual
//! code with the encoder.

use crate::bits::BitReader;
use crate::canvas::{Canvas, CTU_SIZE};
use crate::cu::{luma_tu_layout, PartMode, MIN_CU};
use crate::error::{Error, Result};
use crate::frame::{Frame, PlaneId};
use crate::pipeline::{chroma_line, reconstruct_tu, sub_block, BlockPredictor, PredictionTools, TuParams};
use crate::syntax::{decode_levels, decode_line_index, decode_mode, derive_mpm, StreamHeader, HEADER_BYTES};
use crate::transform::chroma_qp;

/// Parsed description of one leaf CU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuInfo {
    pub frame: usize,
    pub x: usize,
    pub y: usize,
    pub size: usize,
    pub part: PartMode,
    pub line: usize,
    pub modes: Vec<u8>,
}

pub const CU_INFO_CSV_HEADER: &str = "frame,x,y,size,part,line,modes";

impl CuInfo {
    pub fn csv_row(&self) -> String {
        let modes: Vec<String> = self.modes.iter().map(|m| m.to_string()).collect();
        format!(
            "{},{},{},{},{},{},{}",
            self.frame,
            self.x,
            self.y,
            self.size,
            self.part,
            self.line,
            modes.join(" ")
        )
    }
}

#[derive(Debug, Clone)]
pub struct Decoded {
    pub header: StreamHeader,
    pub frames: Vec<Frame>,
    pub cus: Vec<CuInfo>,
}

/// Decodes every frame of a stream.
pub fn decode_stream(bytes: &[u8]) -> Result<Decoded> {
    run(bytes, true)
}

/// Decodes the first frame of a stream.
pub fn decode_frame(bytes: &[u8]) -> Result<Frame> {
    let mut d = decode_stream(bytes)?;
    if d.frames.is_empty() {
        return Err(Error::Config("stream holds no frames".into()));
    }
    Ok(d.frames.remove(0))
}

/// Parses the stream without reconstructing samples.
pub fn extract_stream_stats(bytes: &[u8]) -> Result<Vec<CuInfo>> {
    Ok(run(bytes, false)?.cus)
}

fn run(bytes: &[u8], reconstruct: bool) -> Result<Decoded> {
    let header = StreamHeader::from_bytes(bytes)?;
    let (w, h) = (header.width as usize, header.height as usize);
    let (pw, ph) = (w.div_ceil(CTU_SIZE) * CTU_SIZE, h.div_ceil(CTU_SIZE) * CTU_SIZE);
    let mut reader = BitReader::new(&bytes[HEADER_BYTES..]);
    let mut frames = Vec::new();
    let mut cus = Vec::new();
    for index in 0..header.frame_count as usize {
        let mut dec = FrameDecoder {
            header,
            canvas: Canvas::new(pw, ph, header.bit_depth)?,
            tools: header.tools,
            reconstruct,
            index,
            cus: Vec::new(),
        };
        for y in (0..ph).step_by(CTU_SIZE) {
            for x in (0..pw).step_by(CTU_SIZE) {
                dec.decode_cu(&mut reader, x, y, CTU_SIZE)?;
            }
        }
        reader.align();
        cus.append(&mut dec.cus);
        if reconstruct {
            frames.push(dec.canvas.recon.cropped(w, h));
        }
    }
    Ok(Decoded { header, frames, cus })
}

struct FrameDecoder {
    header: StreamHeader,
    canvas: Canvas,
    tools: PredictionTools,
    reconstruct: bool,
    index: usize,
    cus: Vec<CuInfo>,
}

impl FrameDecoder {
    fn at(&self, x: usize, y: usize, size: usize) -> impl FnOnce(Error) -> Error {
        let frame = self.index;
        move |e| Error::Parse {
            frame,
            x,
            y,
            size,
            source: Box::new(e),
        }
    }

    fn decode_cu(&mut self, r: &mut BitReader, x: usize, y: usize, size: usize) -> Result<()> {
        let split = size > MIN_CU && r.read_bit().map_err(self.at(x, y, size))?;
        if split {
            let half = size / 2;
            for (dx, dy) in [(0, 0), (half, 0), (0, half), (half, half)] {
                self.decode_cu(r, x + dx, y + dy, half)?;
            }
            Ok(())
        } else {
            self.decode_leaf(r, x, y, size).map_err(self.at(x, y, size))
        }
    }

    fn tu_params(&self, size: usize, dst: bool, luma: bool) -> TuParams {
        let qp = self.header.qp;
        TuParams {
            size,
            qp: if luma { qp } else { chroma_qp(qp) },
            dst,
            lossless: self.header.lossless,
            bit_depth: self.header.bit_depth,
        }
    }

    fn decode_leaf(&mut self, r: &mut BitReader, x: usize, y: usize, size: usize) -> Result<()> {
        let line = decode_line_index(r, self.header.lines)?;
        let part = if size == MIN_CU && r.read_bit()? {
            PartMode::Quad
        } else {
            PartMode::Whole
        };
        let pus = part.prediction_blocks(size);
        let mut modes = Vec::with_capacity(pus.len());
        for &(dx, dy, pu) in &pus {
            let (l, a) = self.canvas.neighbour_modes(x + dx, y + dy);
            let mode = decode_mode(r, &derive_mpm(l, a))?;
            self.canvas.set_mode(x + dx, y + dy, pu, mode);
            modes.push(mode);
        }
        let bit_depth = self.header.bit_depth;
        match part {
            PartMode::Whole => {
                let pred = self.predict_luma(x, y, size, line, modes[0])?;
                for (dx, dy, tu) in luma_tu_layout(size, part) {
                    let levels = decode_levels(r, tu)?;
                    if self.reconstruct {
                        let p = sub_block(&pred, size, dx, dy, tu);
                        let rec = reconstruct_tu(&p, &levels, self.tu_params(tu, false, true))?;
                        self.canvas.write_block(PlaneId::Y, x + dx, y + dy, tu, &rec);
                    }
                }
                self.canvas.mark_coded(x, y, size);
            }
            PartMode::Quad => {
                for (&(dx, dy, pu), &mode) in pus.iter().zip(&modes) {
                    let levels = decode_levels(r, pu)?;
                    if self.reconstruct {
                        let pred = self.predict_luma(x + dx, y + dy, pu, line, mode)?;
                        let rec = reconstruct_tu(&pred, &levels, self.tu_params(pu, true, true))?;
                        self.canvas.write_block(PlaneId::Y, x + dx, y + dy, pu, &rec);
                    }
                    self.canvas.mark_coded(x + dx, y + dy, pu);
                }
            }
        }
        let (cx, cy, cs) = (x / 2, y / 2, size / 2);
        let cl = chroma_line(line);
        for id in [PlaneId::Cb, PlaneId::Cr] {
            let levels = decode_levels(r, cs)?;
            if self.reconstruct {
                let rec = {
                    let avail = self.canvas.availability(id);
                    let plane = self.canvas.recon.plane(id);
                    let bp = BlockPredictor::new(plane, &avail, cx, cy, cs, cl, false, bit_depth, self.tools);
                    let pred = bp.predict(cl, modes[0])?;
                    reconstruct_tu(&pred.samples, &levels, self.tu_params(cs, false, false))?
                };
                self.canvas.write_block(id, cx, cy, cs, &rec);
            }
        }
        self.cus.push(CuInfo {
            frame: self.index,
            x,
            y,
            size,
            part,
            line,
            modes,
        });
        Ok(())
    }

    fn predict_luma(&self, x: usize, y: usize, size: usize, line: usize, mode: u8) -> Result<Vec<i32>> {
        if !self.reconstruct {
            return Ok(Vec::new());
        }
        let avail = self.canvas.availability(PlaneId::Y);
        let plane = &self.canvas.recon.planes[0];
        let bp = BlockPredictor::new(plane, &avail, x, y, size, line, true, self.header.bit_depth, self.tools);
        Ok(bp.predict(line, mode)?.samples)
    }
}
