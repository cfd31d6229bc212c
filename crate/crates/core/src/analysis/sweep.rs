//! Encodes one frame per reference line subset.

use crate::encoder::{encode_frame, psnr, EncoderConfig, SearchMode};
use crate::error::Result;
use crate::frame::Frame;
use crate::par::Parallelism;
use crate::syntax::LineSet;

/// The multi-line subsets compared by the sweep, plus full4.
pub const STANDARD_SUBSETS: [u8; 7] = [0b0011, 0b0101, 0b1001, 0b0111, 0b1011, 0b1101, 0b1111];

pub fn standard_subsets() -> Vec<LineSet> {
    STANDARD_SUBSETS
        .iter()
        .map(|&m| LineSet::from_mask(m).expect("valid mask"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lines: LineSet,
    pub bits: u64,
    pub sse: u64,
    pub psnr_y: f64,
    pub cost: f64,
    pub rd_candidates: u64,
}

/// Full-search encode of `frame` at `qp` for each subset.
pub fn subset_sweep(frame: &Frame, qp: u8, subsets: &[LineSet], par: Parallelism) -> Result<Vec<SweepRow>> {
    subsets
        .iter()
        .map(|&lines| {
            let cfg = EncoderConfig {
                search: SearchMode::Full,
                parallelism: par,
                ..EncoderConfig::new(qp, lines)
            };
            let (_, _, stats) = encode_frame(frame, &cfg)?;
            Ok(SweepRow {
                lines,
                bits: stats.bits,
                sse: stats.sse.iter().sum(),
                psnr_y: psnr(stats.sse[0], frame.width * frame.height, frame.bit_depth),
                cost: stats.rd_cost(qp),
                rd_candidates: stats.rd_candidates,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("lines,bits,sse,psnr_y,rd_cost,rd_candidates\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.4},{:.1},{}\n",
            r.lines, r.bits, r.sse, r.psnr_y, r.cost, r.rd_candidates
        ));
    }
    out
}
