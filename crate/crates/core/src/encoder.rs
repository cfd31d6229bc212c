//! Quadtree RD encoder with rough mode decision, per-CU reference line
//! search and the fast-search gates.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::bits::{BitCounter, BitSink, BitWriter};
use crate::canvas::{Canvas, Snapshot, CTU_SIZE};
use crate::cu::{luma_tu_layout, write_cu, write_leaf, CuNode, LeafSyntax, PartMode, MIN_CU};
use crate::error::{Error, Result};
use crate::frame::{Frame, PlaneId};
use crate::par::{self, Parallelism};
use crate::pipeline::{chroma_line, code_tu, satd, sse, sub_block, BlockPredictor, PredictionTools, TuParams};
use crate::reference::Availability;
use crate::syntax::{derive_mpm, encode_levels, encode_line_index, encode_mode, mode_bits, LineSet, StreamHeader};
use crate::transform::{chroma_qp, MAX_QP};

/// Thresholds and switches of the fast line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastSearchParams {
    /// Skip L3 when the L1 cost exceeds `f1` times the L0 cost.
    pub f1: f64,
    /// Skip further lines for NxN when its L0 cost exceeds `f2` times the
    /// best 2Nx2N cost.
    pub f2: f64,
    pub skip_64: bool,
    pub gate_32_neighbor_threshold: usize,
    pub rmd_halved: bool,
}

impl Default for FastSearchParams {
    fn default() -> Self {
        FastSearchParams {
            f1: 1.1,
            f2: 1.2,
            skip_64: true,
            gate_32_neighbor_threshold: 16,
            rmd_halved: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchMode {
    Full,
    Fast(FastSearchParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderConfig {
    pub qp: u8,
    pub lossless: bool,
    pub lines: LineSet,
    pub search: SearchMode,
    pub tools: PredictionTools,
    pub parallelism: Parallelism,
    /// Forces every CU to this size (analysis runs only).
    pub fixed_cu_size: Option<usize>,
}

impl EncoderConfig {
    /// Fast search is enabled for the fast3 alphabet and full search otherwise.
    pub fn new(qp: u8, lines: LineSet) -> Self {
        let search = if lines == LineSet::FAST3 {
            SearchMode::Fast(FastSearchParams::default())
        } else {
            SearchMode::Full
        };
        EncoderConfig {
            qp,
            lossless: false,
            lines,
            search,
            tools: PredictionTools::default(),
            parallelism: Parallelism::default(),
            fixed_cu_size: None,
        }
    }

    pub fn lossless(lines: LineSet) -> Self {
        EncoderConfig {
            lossless: true,
            ..Self::new(0, lines)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qp > MAX_QP {
            return Err(Error::Config(format!("qp {} outside 0..={MAX_QP}", self.qp)));
        }
        if let SearchMode::Fast(p) = self.search {
            if !(p.f1 > 1.0 && p.f2 > 1.0) {
                return Err(Error::Config(format!(
                    "fast thresholds must exceed 1 (f1 {}, f2 {})",
                    p.f1, p.f2
                )));
            }
        }
        if let Some(s) = self.fixed_cu_size {
            if !matches!(s, 8 | 16 | 32 | 64) {
                return Err(Error::Config(format!("fixed CU size {s} not in 8..64")));
            }
        }
        Ok(())
    }

    fn fast(&self) -> Option<FastSearchParams> {
        match self.search {
            SearchMode::Fast(p) => Some(p),
            SearchMode::Full => None,
        }
    }
}

/// Lagrangian multiplier `0.57 * 2^((qp-12)/3)`, computed from exact
/// powers of two and fixed cube-root constants so it is reproducible.
pub fn lambda(qp: u8) -> f64 {
    const CBRT2: [f64; 3] = [1.0, 1.259_921_049_894_873_2, 1.587_401_051_968_199_4];
    let e = qp as i32 - 12;
    0.57 * 2f64.powi(e.div_euclid(3)) * CBRT2[e.rem_euclid(3) as usize]
}

pub fn rd_cost(distortion: u64, bits: u64, lambda: f64) -> f64 {
    distortion as f64 + lambda * bits as f64
}

/// Number of RMD survivors for a block size; halved (rounding up) for
/// further lines when `halved` is set.
pub fn rmd_count(size: usize, line: usize, halved: bool) -> usize {
    let base: usize = if size <= 8 { 8 } else { 3 };
    if halved && line > 0 {
        base.div_ceil(2)
    } else {
        base
    }
}

/// Whether further lines may be tried for a CU of `cu_size` whose left and
/// above neighbours have PU sizes `left`/`above` (0 when unavailable).
pub fn gate_block_size(cu_size: usize, left: usize, above: usize, p: &FastSearchParams) -> bool {
    if cu_size == 64 && p.skip_64 {
        return false;
    }
    let t = p.gate_32_neighbor_threshold;
    !(cu_size == 32 && left != 0 && above != 0 && left < t && above < t)
}

/// Further lines for NxN are tried unless its L0 cost exceeds `f2` times
/// the best 2Nx2N cost.
pub fn gate_nxn(c_nxn_l0: f64, c_2nx2n_best: f64, f2: f64) -> bool {
    c_nxn_l0 <= f2 * c_2nx2n_best
}

/// L3 is tried unless the L1 cost exceeds `f1` times the L0 cost.
pub fn gate_far_line(c_l1: f64, c_l0: f64, f1: f64) -> bool {
    c_l1 <= f1 * c_l0
}

/// SATD ranking of all 35 modes for `line`: SATD plus `sqrt(lambda)` times
/// the mode's signalling bits. Ties keep the lower mode. Returns the best
/// `count` as `(mode, cost)` with nondecreasing cost.
pub fn rough_mode_decision<A: Availability + Sync>(
    orig: &[u16],
    predictor: &BlockPredictor<'_, A>,
    line: usize,
    mpm: &[u8; 3],
    lambda: f64,
    count: usize,
    par: Parallelism,
) -> Result<Vec<(u8, f64)>> {
    let size = predictor.size();
    let sqrt_lambda = lambda.sqrt();
    let costs = par::map_range(par, 35, |m| -> Result<(u8, f64)> {
        let mode = m as u8;
        let pred = predictor.predict(line, mode)?;
        let diff: Vec<i32> = orig.iter().zip(&pred.samples).map(|(&o, &p)| o as i32 - p).collect();
        Ok((mode, satd(&diff, size) as f64 + sqrt_lambda * mode_bits(mode, mpm) as f64))
    });
    let mut costs = costs.into_iter().collect::<Result<Vec<_>>>()?;
    costs.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    costs.truncate(count.max(1));
    Ok(costs)
}

/// A fast-search decision that removed candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// 64x64 CU: further lines not tried.
    Size64,
    /// 32x32 CU with small neighbours: further lines not tried.
    Neighbors32,
    /// L1 much worse than L0: L3 not tried.
    FarLine,
    /// NxN at L0 much worse than 2Nx2N: further lines not tried for NxN.
    NxN,
}

impl Gate {
    pub fn name(self) -> &'static str {
        match self {
            Gate::Size64 => "size64",
            Gate::Neighbors32 => "neighbors32",
            Gate::FarLine => "far_line",
            Gate::NxN => "nxn",
        }
    }
}

/// Cost of one evaluated (partition, line) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineTrial {
    pub part: PartMode,
    pub line: usize,
    pub cost: f64,
}

/// Decision log entry for one coded leaf CU.
#[derive(Debug, Clone, PartialEq)]
pub struct CuRecord {
    pub frame: usize,
    pub x: usize,
    pub y: usize,
    pub size: usize,
    pub part: PartMode,
    pub line: usize,
    pub modes: Vec<u8>,
    pub distortion: u64,
    pub bits: u64,
    pub cost: f64,
    pub gates: Vec<Gate>,
    pub trials: Vec<LineTrial>,
    /// Full RD evaluations (line x mode) spent on this CU.
    pub rd_candidates: u64,
}

pub const CU_CSV_HEADER: &str = "frame,x,y,size,part,line,modes,distortion,bits,cost,gates,trials,rd_candidates";

impl CuRecord {
    pub fn csv_row(&self) -> String {
        let modes: Vec<String> = self.modes.iter().map(|m| m.to_string()).collect();
        let gates: Vec<&str> = self.gates.iter().map(|g| g.name()).collect();
        let mut trials = String::new();
        for (i, t) in self.trials.iter().enumerate() {
            if i > 0 {
                trials.push(' ');
            }
            let _ = write!(trials, "{}:L{}={:.3}", t.part, t.line, t.cost);
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{:.3},{},{},{}",
            self.frame,
            self.x,
            self.y,
            self.size,
            self.part,
            self.line,
            modes.join(" "),
            self.distortion,
            self.bits,
            self.cost,
            gates.join(" "),
            trials,
            self.rd_candidates
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct EncodeStats {
    pub records: Vec<CuRecord>,
    /// Full RD evaluations in the frame, discarded quadtree branches included.
    pub rd_candidates: u64,
    /// Payload bits of the frame, before byte alignment.
    pub bits: u64,
    /// Per-plane squared error of the cropped reconstruction.
    pub sse: [u64; 3],
    pub elapsed: Duration,
}

impl EncodeStats {
    /// Squared error over all planes plus lambda times bits.
    pub fn rd_cost(&self, qp: u8) -> f64 {
        rd_cost(self.sse.iter().sum(), self.bits, lambda(qp))
    }
}

pub fn psnr(sse: u64, samples: usize, bit_depth: u8) -> f64 {
    let max = ((1u32 << bit_depth) - 1) as f64;
    if sse == 0 {
        return f64::INFINITY;
    }
    10.0 * (max * max * samples as f64 / sse as f64).log10()
}

pub fn stats_csv(records: &[CuRecord]) -> String {
    let mut out = String::from(CU_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Result of encoding a sequence.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub stream: Vec<u8>,
    pub recon: Vec<Frame>,
    pub stats: Vec<EncodeStats>,
}

pub fn header_for(frame: &Frame, cfg: &EncoderConfig, frame_count: usize) -> StreamHeader {
    StreamHeader {
        width: frame.width as u32,
        height: frame.height as u32,
        bit_depth: frame.bit_depth,
        qp: if cfg.lossless { 0 } else { cfg.qp },
        lossless: cfg.lossless,
        lines: cfg.lines,
        frame_count: frame_count as u32,
        tools: cfg.tools,
    }
}

/// Encodes one frame into a complete single-frame stream.
pub fn encode_frame(frame: &Frame, cfg: &EncoderConfig) -> Result<(Vec<u8>, Frame, EncodeStats)> {
    let mut out = encode_sequence(std::slice::from_ref(frame), cfg)?;
    Ok((out.stream, out.recon.remove(0), out.stats.remove(0)))
}

pub fn encode_sequence(frames: &[Frame], cfg: &EncoderConfig) -> Result<Encoded> {
    cfg.validate()?;
    let first = frames.first().ok_or_else(|| Error::Config("no frames to encode".into()))?;
    let mut stream = header_for(first, cfg, frames.len()).to_bytes().to_vec();
    let mut recon = Vec::with_capacity(frames.len());
    let mut stats = Vec::with_capacity(frames.len());
    for (i, f) in frames.iter().enumerate() {
        if (f.width, f.height, f.bit_depth) != (first.width, first.height, first.bit_depth) {
            return Err(Error::Config(format!("frame {i} differs in size or bit depth from frame 0")));
        }
        let (payload, r, s) = encode_payload(f, cfg, i)?;
        stream.extend_from_slice(&payload);
        recon.push(r);
        stats.push(s);
    }
    Ok(Encoded { stream, recon, stats })
}

fn encode_payload(frame: &Frame, cfg: &EncoderConfig, index: usize) -> Result<(Vec<u8>, Frame, EncodeStats)> {
    let start = Instant::now();
    let orig = frame.padded(CTU_SIZE);
    let mut enc = FrameEncoder {
        canvas: Canvas::new(orig.width, orig.height, orig.bit_depth)?,
        orig,
        cfg: *cfg,
        lambda: lambda(cfg.qp),
        frame_index: index,
        candidates: 0,
    };
    let mut writer = BitWriter::new();
    let mut records = Vec::new();
    for y in (0..enc.orig.height).step_by(CTU_SIZE) {
        for x in (0..enc.orig.width).step_by(CTU_SIZE) {
            let (node, _, recs) = enc.encode_cu(x, y, CTU_SIZE)?;
            write_cu(&mut writer, &node, CTU_SIZE, cfg.lines)?;
            records.extend(recs);
        }
    }
    let bits = writer.bits_written();
    let payload = writer.finish();
    let recon = enc.canvas.recon.cropped(frame.width, frame.height);
    let sse = frame.sse(&recon);
    let stats = EncodeStats {
        rd_candidates: enc.candidates,
        records,
        bits,
        sse,
        elapsed: start.elapsed(),
    };
    Ok((payload, recon, stats))
}

struct FrameEncoder {
    orig: Frame,
    canvas: Canvas,
    cfg: EncoderConfig,
    lambda: f64,
    frame_index: usize,
    /// RD candidates over every evaluated leaf, kept or not.
    candidates: u64,
}

struct LeafOutcome {
    leaf: LeafSyntax,
    distortion: u64,
    bits: u64,
    cost: f64,
    candidates: u64,
}

struct LumaChoice {
    mode: u8,
    levels: Vec<Vec<i32>>,
    recon: Vec<u16>,
    cost: f64,
}

type CuResult = (CuNode, f64, Vec<CuRecord>);

impl FrameEncoder {
    fn tu_params(&self, size: usize, dst: bool, luma: bool) -> TuParams {
        TuParams {
            size,
            qp: if luma { self.cfg.qp } else { chroma_qp(self.cfg.qp) },
            dst,
            lossless: self.cfg.lossless,
            bit_depth: self.orig.bit_depth,
        }
    }

    /// Codes the CU at (`x`,`y`) and, when allowed, its four quadrants;
    /// keeps the cheaper of the two in the canvas.
    fn encode_cu(&mut self, x: usize, y: usize, size: usize) -> Result<CuResult> {
        let split_bits = u64::from(size > MIN_CU);
        let (may_leaf, may_split) = match self.cfg.fixed_cu_size {
            Some(f) => (size == f, size > f),
            None => (true, size > MIN_CU),
        };
        let before = self.canvas.snapshot(x, y, size);
        let mut leaf_result: Option<(CuResult, Snapshot)> = None;
        if may_leaf {
            let (node, cost, rec) = self.code_leaf(x, y, size)?;
            if !may_split {
                return Ok((node, cost, vec![rec]));
            }
            leaf_result = Some(((node, cost, vec![rec]), self.canvas.snapshot(x, y, size)));
            self.canvas.restore(&before);
        }
        let half = size / 2;
        let mut children = Vec::with_capacity(4);
        let mut split_cost = self.lambda * split_bits as f64;
        let mut split_records = Vec::new();
        for (dx, dy) in [(0, 0), (half, 0), (0, half), (half, half)] {
            let (node, cost, recs) = self.encode_cu(x + dx, y + dy, half)?;
            children.push(node);
            split_cost += cost;
            split_records.extend(recs);
        }
        match leaf_result {
            Some((leaf, state)) if leaf.1 <= split_cost => {
                self.canvas.restore(&state);
                Ok(leaf)
            }
            _ => Ok((CuNode::Split(children), split_cost, split_records)),
        }
    }

    fn neighbour_pu_sizes(&self, x: usize, y: usize) -> (usize, usize) {
        let left = self.canvas.pu_size_at(x as isize - 1, y as isize).unwrap_or(0);
        let above = self.canvas.pu_size_at(x as isize, y as isize - 1).unwrap_or(0);
        (left, above)
    }

    /// Tries every allowed (partition, line) pair for a leaf CU and leaves
    /// the best one in the canvas.
    fn code_leaf(&mut self, x: usize, y: usize, size: usize) -> Result<(CuNode, f64, CuRecord)> {
        let fast = self.cfg.fast();
        let base = self.canvas.snapshot(x, y, size);
        let (left, above) = self.neighbour_pu_sizes(x, y);
        let size_gate = fast.is_none_or(|p| gate_block_size(size, left, above, &p));
        let lines = self.cfg.lines.lines();
        let parts: &[PartMode] = if size == MIN_CU {
            &[PartMode::Whole, PartMode::Quad]
        } else {
            &[PartMode::Whole]
        };
        let mut gates = Vec::new();
        let mut trials = Vec::new();
        let mut candidates = 0u64;
        let mut best: Option<(LeafOutcome, Snapshot)> = None;
        let mut best_whole = f64::INFINITY;
        for &part in parts {
            let mut part_costs: Vec<(usize, f64)> = Vec::new();
            for &line in &lines {
                if let (true, Some(p)) = (line > 0, fast) {
                    if !size_gate {
                        gates.push(if size == 64 { Gate::Size64 } else { Gate::Neighbors32 });
                        break;
                    }
                    if part == PartMode::Quad && !gate_nxn(part_costs[0].1, best_whole, p.f2) {
                        gates.push(Gate::NxN);
                        break;
                    }
                    if line == 3 {
                        let cost_of = |l: usize| part_costs.iter().find(|c| c.0 == l).map(|c| c.1);
                        if let (Some(c1), Some(c0)) = (cost_of(1), cost_of(0)) {
                            if !gate_far_line(c1, c0, p.f1) {
                                gates.push(Gate::FarLine);
                                break;
                            }
                        }
                    }
                }
                let outcome = self.trial(x, y, size, part, line)?;
                candidates += outcome.candidates;
                trials.push(LineTrial {
                    part,
                    line,
                    cost: outcome.cost,
                });
                part_costs.push((line, outcome.cost));
                if part == PartMode::Whole {
                    best_whole = best_whole.min(outcome.cost);
                }
                let better = match &best {
                    None => true,
                    Some((b, _)) => outcome.cost < b.cost || (outcome.cost == b.cost && line < b.leaf.line),
                };
                if better {
                    best = Some((outcome, self.canvas.snapshot(x, y, size)));
                }
                self.canvas.restore(&base);
            }
        }
        self.candidates += candidates;
        let (outcome, state) = best.expect("L0 is always evaluated");
        self.canvas.restore(&state);
        let record = CuRecord {
            frame: self.frame_index,
            x,
            y,
            size,
            part: outcome.leaf.part,
            line: outcome.leaf.line,
            modes: outcome.leaf.modes.clone(),
            distortion: outcome.distortion,
            bits: outcome.bits,
            cost: outcome.cost,
            gates,
            trials,
            rd_candidates: candidates,
        };
        Ok((CuNode::Leaf(Box::new(outcome.leaf)), outcome.cost, record))
    }

    fn rmd_survivors(&self, size: usize, line: usize) -> usize {
        let halved = self.cfg.fast().is_some_and(|p| p.rmd_halved);
        rmd_count(size, line, halved)
    }

    /// Codes the CU with one partition and line; the canvas holds the
    /// result afterwards.
    fn trial(&mut self, x: usize, y: usize, size: usize, part: PartMode, line: usize) -> Result<LeafOutcome> {
        let mut candidates = 0u64;
        let mut modes = Vec::new();
        let mut mpms = Vec::new();
        let mut luma_levels = Vec::new();
        let mut luma_d = 0u64;
        let mut head = BitCounter::default();
        encode_line_index(&mut head, line, self.cfg.lines)?;
        let head_bits = head.bits + u64::from(size == MIN_CU);
        for (dx, dy, pu) in part.prediction_blocks(size) {
            let (px, py) = (x + dx, y + dy);
            let (l, a) = self.canvas.neighbour_modes(px, py);
            let mpm = derive_mpm(l, a);
            let layout = match part {
                PartMode::Whole => luma_tu_layout(size, part),
                PartMode::Quad => vec![(0, 0, pu)],
            };
            let (choice, n) = self.choose_luma_mode(px, py, pu, line, &mpm, &layout, head_bits)?;
            candidates += n;
            let orig = self.orig.planes[0].copy_block(px, py, pu, pu);
            luma_d += sse(&orig, &choice.recon);
            self.canvas.write_block(PlaneId::Y, px, py, pu, &choice.recon);
            self.canvas.mark_coded(px, py, pu);
            self.canvas.set_mode(px, py, pu, choice.mode);
            modes.push(choice.mode);
            mpms.push(mpm);
            luma_levels.extend(choice.levels);
        }
        let (chroma, chroma_d) = self.code_chroma(x, y, size, line, modes[0])?;
        let leaf = LeafSyntax {
            x,
            y,
            size,
            line,
            part,
            modes,
            mpms,
            luma: luma_levels,
            chroma,
        };
        let mut counter = BitCounter::default();
        write_leaf(&mut counter, &leaf, self.cfg.lines)?;
        let bits = counter.bits + u64::from(size > MIN_CU);
        let distortion = luma_d + chroma_d;
        Ok(LeafOutcome {
            leaf,
            distortion,
            bits,
            cost: rd_cost(distortion, bits, self.lambda),
            candidates,
        })
    }

    /// RMD then full RD over the survivors for one luma prediction block.
    #[allow(clippy::too_many_arguments)]
    fn choose_luma_mode(
        &self,
        x: usize,
        y: usize,
        size: usize,
        line: usize,
        mpm: &[u8; 3],
        layout: &[(usize, usize, usize)],
        head_bits: u64,
    ) -> Result<(LumaChoice, u64)> {
        let avail = self.canvas.availability(PlaneId::Y);
        let plane = &self.canvas.recon.planes[0];
        let bit_depth = self.orig.bit_depth;
        let predictor = BlockPredictor::new(plane, &avail, x, y, size, line, true, bit_depth, self.cfg.tools);
        let orig = self.orig.planes[0].copy_block(x, y, size, size);
        let count = self.rmd_survivors(size, line);
        let ranked = rough_mode_decision(&orig, &predictor, line, mpm, self.lambda, count, self.cfg.parallelism)?;
        let dst = size == 4;
        let evaluated = par::map(self.cfg.parallelism, &ranked, |&(mode, _)| -> Result<LumaChoice> {
            let pred = predictor.predict(line, mode)?;
            let mut recon = vec![0u16; size * size];
            let mut levels = Vec::with_capacity(layout.len());
            let mut counter = BitCounter { bits: head_bits };
            encode_mode(&mut counter, mode, mpm)?;
            for &(dx, dy, tu) in layout {
                let o = sub_block(&orig, size, dx, dy, tu);
                let p = sub_block(&pred.samples, size, dx, dy, tu);
                let (lv, rec) = code_tu(&o, &p, self.tu_params(tu, dst, true))?;
                encode_levels(&mut counter, &lv, tu);
                for r in 0..tu {
                    let at = (dy + r) * size + dx;
                    recon[at..at + tu].copy_from_slice(&rec[r * tu..(r + 1) * tu]);
                }
                levels.push(lv);
            }
            let cost = rd_cost(sse(&orig, &recon), counter.bits, self.lambda);
            Ok(LumaChoice {
                mode,
                levels,
                recon,
                cost,
            })
        });
        let n = evaluated.len() as u64;
        let best = evaluated
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min_by(|a, b| a.cost.total_cmp(&b.cost).then(a.mode.cmp(&b.mode)))
            .expect("at least one RMD survivor");
        Ok((best, n))
    }

    fn code_chroma(&mut self, x: usize, y: usize, size: usize, line: usize, mode: u8) -> Result<([Vec<i32>; 2], u64)> {
        let (cx, cy, cs) = (x / 2, y / 2, size / 2);
        let cl = chroma_line(line);
        let mut levels: [Vec<i32>; 2] = Default::default();
        let mut d = 0;
        for (i, id) in [PlaneId::Cb, PlaneId::Cr].into_iter().enumerate() {
            let (lv, recon) = {
                let avail = self.canvas.availability(id);
                let plane = self.canvas.recon.plane(id);
                let predictor =
                    BlockPredictor::new(plane, &avail, cx, cy, cs, cl, false, self.orig.bit_depth, self.cfg.tools);
                let pred = predictor.predict(cl, mode)?;
                let orig = self.orig.plane(id).copy_block(cx, cy, cs, cs);
                let (lv, recon) = code_tu(&orig, &pred.samples, self.tu_params(cs, false, false))?;
                d += sse(&orig, &recon);
                (lv, recon)
            };
            self.canvas.write_block(id, cx, cy, cs, &recon);
            levels[i] = lv;
        }
        Ok((levels, d))
    }
}
