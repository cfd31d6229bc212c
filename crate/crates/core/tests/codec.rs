use proptest::prelude::*;

use mrl_core::compensate::HorizontalRange;
use mrl_core::corpus;
use mrl_core::decoder::{decode_frame, decode_stream, extract_stream_stats};
use mrl_core::encoder::{encode_frame, encode_sequence, EncoderConfig, SearchMode};
use mrl_core::frame::Frame;
use mrl_core::par::Parallelism;
use mrl_core::pipeline::PredictionTools;
use mrl_core::syntax::LineSet;
use mrl_core::Error;

fn noise_frame(w: usize, h: usize, seed: u64, sigma: i64) -> Frame {
    corpus::noisy_grating(w, h, 1 + (seed % 3) as i64, 2, 12 + (seed % 20) as i64, 140, sigma, seed)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn decoder_matches_encoder_reconstruction(
        w in (4usize..=40).prop_map(|v| v * 2),
        h in (4usize..=36).prop_map(|v| v * 2),
        seed in 0u64..1000,
        sigma in 0i64..20,
        qp in 0u8..=51,
        mask in 1u8..16,
        compensation: bool,
        blending: bool,
        to30: bool,
        fast: bool,
    ) {
        prop_assume!(mask & 1 == 1);
        let frame = noise_frame(w, h, seed, sigma);
        let lines = LineSet::from_mask(mask).unwrap();
        let mut cfg = EncoderConfig::new(qp, lines);
        cfg.tools = PredictionTools {
            compensation,
            blending,
            range: if to30 { HorizontalRange::To30 } else { HorizontalRange::To29 },
        };
        if !fast {
            cfg.search = SearchMode::Full;
        }
        let (stream, recon, _) = encode_frame(&frame, &cfg).unwrap();
        prop_assert_eq!(decode_frame(&stream).unwrap(), recon);
    }

    #[test]
    fn lossless_reproduces_input(
        w in (4usize..=24).prop_map(|v| v * 2),
        h in (4usize..=24).prop_map(|v| v * 2),
        seed in 0u64..1000,
        mask in prop::sample::select(vec![LineSet::SINGLE.mask(), LineSet::FULL4.mask(), LineSet::FAST3.mask()]),
    ) {
        let frame = noise_frame(w, h, seed, 15);
        let (stream, recon, _) = encode_frame(&frame, &EncoderConfig::lossless(LineSet::from_mask(mask).unwrap())).unwrap();
        prop_assert_eq!(&recon, &frame);
        prop_assert_eq!(decode_frame(&stream).unwrap(), frame);
    }
}

#[test]
fn ten_bit_content_round_trips() {
    let items = corpus::natural();
    let eight = &items[0].frame;
    let mut frame = Frame::new(eight.width, eight.height, 10).unwrap();
    for (p, q) in frame.planes.iter_mut().zip(&eight.planes) {
        for (d, &s) in p.data.iter_mut().zip(&q.data) {
            *d = s * 4 + (s & 3);
        }
    }
    for lines in [LineSet::SINGLE, LineSet::FULL4] {
        let (stream, recon, _) = encode_frame(&frame, &EncoderConfig::new(30, lines)).unwrap();
        assert_eq!(decode_frame(&stream).unwrap(), recon);
    }
}

#[test]
fn stream_stats_match_encoder_decisions() {
    let items = corpus::natural();
    let frame = &items[1].frame;
    for lines in [LineSet::FULL4, LineSet::FAST3] {
        let (stream, _, stats) = encode_frame(frame, &EncoderConfig::new(27, lines)).unwrap();
        let cus = extract_stream_stats(&stream).unwrap();
        assert_eq!(cus.len(), stats.records.len());
        for (c, r) in cus.iter().zip(&stats.records) {
            assert_eq!((c.x, c.y, c.size, c.part, c.line), (r.x, r.y, r.size, r.part, r.line));
            assert_eq!(c.modes, r.modes);
        }
        assert_eq!(decode_stream(&stream).unwrap().cus, cus);
    }
}

#[test]
fn fast3_never_uses_l2() {
    for it in corpus::natural().iter().take(4) {
        let (stream, _, stats) = encode_frame(&it.frame, &EncoderConfig::new(32, LineSet::FAST3)).unwrap();
        assert!(extract_stream_stats(&stream).unwrap().iter().all(|c| c.line != 2));
        for r in &stats.records {
            assert!(r.trials.iter().all(|t| t.line != 2));
            if r.size == 64 {
                assert!(r.trials.iter().all(|t| t.line == 0), "64x64 CU tried further lines");
            }
        }
    }
}

#[test]
fn truncated_stream_names_the_cu() {
    let items = corpus::natural();
    let frame = &items[2].frame;
    let (stream, _, _) = encode_frame(frame, &EncoderConfig::new(32, LineSet::FULL4)).unwrap();
    let cut = &stream[..stream.len() * 2 / 3];
    match decode_stream(cut) {
        Err(e @ Error::Parse { .. }) => {
            let Error::Parse { frame, x, y, size, .. } = &e else { unreachable!() };
            assert_eq!(*frame, 0);
            assert!(*x < 128 && *y < 64 && (8..=64).contains(size));
            assert!(e.to_string().contains(&format!("CU at ({x},{y}) size {size}")));
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
    // A header alone is rejected as well.
    assert!(decode_stream(&stream[..32]).is_err());
    assert!(decode_stream(&stream[..10]).is_err());
}

#[test]
fn multi_frame_sequence_round_trips() {
    let frames: Vec<Frame> = corpus::natural().into_iter().take(3).map(|i| i.frame).collect();
    let enc = encode_sequence(&frames, &EncoderConfig::new(32, LineSet::FAST3)).unwrap();
    let dec = decode_stream(&enc.stream).unwrap();
    assert_eq!(dec.header.frame_count, 3);
    assert_eq!(dec.frames, enc.recon);
    assert_eq!(dec.cus.iter().filter(|c| c.frame == 2).count(), enc.stats[2].records.len());
}

#[test]
fn sequential_and_parallel_streams_are_identical() {
    let frame = noise_frame(96, 64, 9, 6);
    for lines in [LineSet::SINGLE, LineSet::FULL4, LineSet::FAST3] {
        let mut cfg = EncoderConfig::new(30, lines);
        cfg.parallelism = Parallelism::Sequential;
        let a = encode_frame(&frame, &cfg).unwrap();
        cfg.parallelism = Parallelism::Rayon;
        let b = encode_frame(&frame, &cfg).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert_eq!(a.2.rd_candidates, b.2.rd_candidates);
    }
}

#[test]
fn quantization_error_grows_with_qp() {
    for it in corpus::natural().iter().take(3) {
        let sse: Vec<u64> = [22u8, 27, 32, 37]
            .iter()
            .map(|&qp| encode_frame(&it.frame, &EncoderConfig::new(qp, LineSet::SINGLE)).unwrap().2.sse.iter().sum())
            .collect();
        assert!(sse.windows(2).all(|w| w[0] < w[1]), "{}: {sse:?}", it.name);
    }
}

#[test]
fn single_line_streams_spend_no_index_bits() {
    let items = corpus::natural();
    let frame = &items[3].frame;
    let (_, _, stats) = encode_frame(frame, &EncoderConfig::new(32, LineSet::SINGLE)).unwrap();
    assert!(stats.records.iter().all(|r| r.line == 0 && r.trials.iter().all(|t| t.line == 0)));
}

#[test]
fn invalid_configurations_are_rejected() {
    let frame = noise_frame(16, 16, 1, 1);
    assert!(matches!(encode_frame(&frame, &EncoderConfig::new(52, LineSet::FULL4)), Err(Error::Config(_))));
    let mut cfg = EncoderConfig::new(30, LineSet::FULL4);
    cfg.fixed_cu_size = Some(12);
    assert!(encode_frame(&frame, &cfg).is_err());
}
