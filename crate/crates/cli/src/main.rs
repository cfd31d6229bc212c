//! `mrli`: encode, decode and analyse raw 4:2:0 video with the multi-line
//! intra codec.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mrl_core::analysis::boundary::{boundary_mse_report, BoundaryMse};
use mrl_core::analysis::census::{line_usage_census, Census, CensusConfig, ReferenceSource};
use mrl_core::analysis::sweep::{standard_subsets, subset_sweep, sweep_csv};
use mrl_core::analysis::variance::quant_error_variance_map;
use mrl_core::corpus;
use mrl_core::decoder::{decode_stream, extract_stream_stats, CU_INFO_CSV_HEADER};
use mrl_core::encoder::{encode_sequence, psnr, stats_csv, EncoderConfig};
use mrl_core::frame::{count_frames, load_yuv, write_yuv, Frame};
use mrl_core::par::Parallelism;
use mrl_core::syntax::LineSet;
use mrl_core::transform::MAX_QP;

#[derive(Parser)]
#[command(name = "mrli", version, about = "Multi-reference-line intra codec and analysis tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a raw YUV file into a stream.
    Encode(EncodeArgs),
    /// Decode a stream into raw YUV.
    Decode(DecodeArgs),
    /// Best-line census per block (CSV: line,count,percent).
    Census(CensusArgs),
    /// Per-position quantization error variance (CSV: y,x,variance).
    Variance(AnalysisArgs),
    /// Boundary prediction MSE with and without residue compensation.
    BoundaryMse(AnalysisArgs),
    /// Encode once per reference line subset.
    SubsetSweep(SweepArgs),
    /// Per-CU decisions parsed from a stream.
    StreamStats(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusSet {
    Natural,
    NoisyGratings,
    Smooth,
    Synthetic,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefSource {
    Original,
    Compressed,
}

#[derive(Args)]
struct Source {
    /// Raw planar 4:2:0 input.
    #[arg(long, required_unless_present = "seed_corpus")]
    input: Option<PathBuf>,
    #[arg(long, required_unless_present = "seed_corpus")]
    width: Option<usize>,
    #[arg(long, required_unless_present = "seed_corpus")]
    height: Option<usize>,
    #[arg(long, default_value_t = 8)]
    bit_depth: u8,
    /// Number of frames to read (default: all).
    #[arg(long)]
    frames: Option<usize>,
    /// Use a built-in corpus instead of --input.
    #[arg(long, value_enum, conflicts_with = "input")]
    seed_corpus: Option<CorpusSet>,
}

impl Source {
    fn load(&self) -> Result<Vec<Frame>> {
        if let Some(set) = self.seed_corpus {
            let items = match set {
                CorpusSet::Natural => corpus::natural(),
                CorpusSet::NoisyGratings => corpus::noisy_gratings(),
                CorpusSet::Smooth => corpus::smooth_set(),
                CorpusSet::Synthetic => corpus::synthetic(),
                CorpusSet::All => [corpus::natural(), corpus::noisy_gratings(), corpus::smooth_set(), corpus::synthetic()].concat(),
            };
            let n = self.frames.unwrap_or(items.len()).min(items.len());
            return Ok(items.into_iter().take(n).map(|i| i.frame).collect());
        }
        let (Some(path), Some(w), Some(h)) = (&self.input, self.width, self.height) else {
            bail!("--input, --width and --height are required without --seed-corpus");
        };
        let available = count_frames(path, w, h, self.bit_depth).with_context(|| format!("reading {}", path.display()))?;
        let n = self.frames.unwrap_or(available);
        if n == 0 {
            bail!("{} holds no complete {w}x{h} frame", path.display());
        }
        (0..n)
            .map(|i| load_yuv(path, w, h, self.bit_depth, i).with_context(|| format!("loading frame {i}")))
            .collect()
    }
}

fn check_qp(qp: u8) -> Result<u8> {
    if qp > MAX_QP {
        bail!("qp {qp} outside 0..={MAX_QP}");
    }
    Ok(qp)
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 32)]
    qp: u8,
    #[arg(long)]
    lossless: bool,
    /// single, full4, fast3, or an explicit set such as L0L1L3.
    #[arg(long, default_value = "full4")]
    line_mode: LineSet,
    /// Per-CU decision log.
    #[arg(long)]
    stats_csv: Option<PathBuf>,
    /// Also write the encoder reconstruction.
    #[arg(long)]
    recon: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    stats_csv: Option<PathBuf>,
}

#[derive(Args)]
struct CensusArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 8)]
    block_size: usize,
    #[arg(long, value_enum, default_value = "original")]
    reference_source: RefSource,
    /// QP of the compressed reference.
    #[arg(long, default_value_t = 37)]
    qp: u8,
    /// CSV destination (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-block choices.
    #[arg(long)]
    stats_csv: Option<PathBuf>,
}

#[derive(Args)]
struct AnalysisArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 8)]
    block_size: usize,
    #[arg(long, default_value_t = 37)]
    qp: u8,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 32)]
    qp: u8,
    /// Subsets to compare (default: the seven multi-line subsets).
    #[arg(long = "line-mode", value_delimiter = ',')]
    line_modes: Vec<LineSet>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Per-CU CSV destination (default: stdout).
    #[arg(long)]
    stats_csv: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn encode(a: &EncodeArgs) -> Result<()> {
    let frames = a.source.load()?;
    let cfg = if a.lossless {
        EncoderConfig::lossless(a.line_mode)
    } else {
        EncoderConfig::new(check_qp(a.qp)?, a.line_mode)
    };
    let enc = encode_sequence(&frames, &cfg)?;
    fs::write(&a.output, &enc.stream).with_context(|| format!("writing {}", a.output.display()))?;
    if let Some(p) = &a.recon {
        for (i, f) in enc.recon.iter().enumerate() {
            write_yuv(f, p, i > 0)?;
        }
    }
    if let Some(p) = &a.stats_csv {
        let records: Vec<_> = enc.stats.iter().flat_map(|s| s.records.iter().cloned()).collect();
        fs::write(p, stats_csv(&records))?;
    }
    for (i, s) in enc.stats.iter().enumerate() {
        let f = &frames[i];
        eprintln!(
            "frame {i}: {} bits, PSNR-Y {:.2} dB, {} RD candidates, {:.3} s",
            s.bits,
            psnr(s.sse[0], f.width * f.height, f.bit_depth),
            s.rd_candidates,
            s.elapsed.as_secs_f64()
        );
    }
    eprintln!("wrote {} bytes", enc.stream.len());
    Ok(())
}

fn decode(a: &DecodeArgs) -> Result<()> {
    let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let d = decode_stream(&bytes)?;
    for (i, f) in d.frames.iter().enumerate() {
        write_yuv(f, &a.output, i > 0)?;
    }
    if let Some(p) = &a.stats_csv {
        fs::write(p, cu_csv(&d.cus))?;
    }
    eprintln!("decoded {} frame(s) of {}x{}", d.frames.len(), d.header.width, d.header.height);
    Ok(())
}

fn cu_csv(cus: &[mrl_core::decoder::CuInfo]) -> String {
    let mut s = format!("{CU_INFO_CSV_HEADER}\n");
    for c in cus {
        s.push_str(&c.csv_row());
        s.push('\n');
    }
    s
}

fn census(a: &CensusArgs) -> Result<()> {
    let source = match a.reference_source {
        RefSource::Original => ReferenceSource::Original,
        RefSource::Compressed => ReferenceSource::Compressed { qp: check_qp(a.qp)? },
    };
    let cfg = CensusConfig::new(a.block_size, source);
    let mut total = Census::default();
    for f in a.source.load()? {
        total.merge(line_usage_census(&f, &cfg)?);
    }
    if let Some(p) = &a.stats_csv {
        let mut s = String::from("x,y,line,mode,satd,satd_l0\n");
        for b in &total.blocks {
            s.push_str(&format!("{},{},{},{},{},{}\n", b.x, b.y, b.line, b.mode, b.satd, b.satd_l0));
        }
        fs::write(p, s)?;
    }
    emit(a.output.as_deref(), &total.csv())
}

fn variance(a: &AnalysisArgs) -> Result<()> {
    let frames = a.source.load()?;
    let m = quant_error_variance_map(&frames, &EncoderConfig::new(check_qp(a.qp)?, LineSet::SINGLE), a.block_size)?;
    eprintln!(
        "{} blocks, border mean {:.4}, interior mean {:.4}",
        m.blocks,
        m.border_mean(),
        m.interior_mean()
    );
    emit(a.output.as_deref(), &m.csv())
}

fn boundary(a: &AnalysisArgs) -> Result<()> {
    let qp = check_qp(a.qp)?;
    let mut total: Option<BoundaryMse> = None;
    for f in a.source.load()? {
        let r = boundary_mse_report(&f, qp, a.block_size, Parallelism::default())?;
        match total.as_mut() {
            Some(t) => t.merge(&r),
            None => total = Some(r),
        }
    }
    emit(a.output.as_deref(), &total.context("no frames")?.csv())
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let qp = check_qp(a.qp)?;
    let subsets = if a.line_modes.is_empty() {
        standard_subsets()
    } else {
        a.line_modes.clone()
    };
    let mut rows = Vec::new();
    for f in a.source.load()? {
        rows.extend(subset_sweep(&f, qp, &subsets, Parallelism::default())?);
    }
    emit(a.output.as_deref(), &sweep_csv(&rows))
}

fn stream_stats(a: &StatsArgs) -> Result<()> {
    let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let cus = extract_stream_stats(&bytes)?;
    let mut lines = [0usize; 4];
    for c in &cus {
        lines[c.line] += 1;
    }
    let total = cus.len().max(1) as f64;
    eprintln!(
        "{} CUs; line share L0..L3: {}",
        cus.len(),
        lines.iter().map(|&n| format!("{:.1}%", 100.0 * n as f64 / total)).collect::<Vec<_>>().join(" ")
    );
    emit(a.stats_csv.as_deref(), &cu_csv(&cus))
}

fn configure_threads() -> Result<()> {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("MRLI_THREADS") {
        let n: usize = v.parse().with_context(|| format!("MRLI_THREADS={v} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Census(a) => census(a),
        Command::Variance(a) => variance(a),
        Command::BoundaryMse(a) => boundary(a),
        Command::SubsetSweep(a) => sweep(a),
        Command::StreamStats(a) => stream_stats(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
