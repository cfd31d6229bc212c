//! Self-contained test content: ten natural 128x64 crops and
//! procedurally generated gratings, ramps and noise.
//!
//! Generators use integer arithmetic and a seeded ChaCha stream only, so
//! every platform produces identical samples.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frame::Frame;

pub const WIDTH: usize = 128;
pub const HEIGHT: usize = 64;

const NATURAL: [(&str, &[u8]); 10] = [
    ("chelsea", include_bytes!("../corpus/chelsea_128x64.yuv")),
    ("coffee", include_bytes!("../corpus/coffee_128x64.yuv")),
    ("astronaut", include_bytes!("../corpus/astronaut_128x64.yuv")),
    ("camera", include_bytes!("../corpus/camera_128x64.yuv")),
    ("rocket", include_bytes!("../corpus/rocket_128x64.yuv")),
    ("coins", include_bytes!("../corpus/coins_128x64.yuv")),
    ("moon", include_bytes!("../corpus/moon_128x64.yuv")),
    ("ihc", include_bytes!("../corpus/ihc_128x64.yuv")),
    ("brick", include_bytes!("../corpus/brick_128x64.yuv")),
    ("clock", include_bytes!("../corpus/clock_128x64.yuv")),
];

/// A named frame.
#[derive(Debug, Clone)]
pub struct Item {
    pub name: String,
    pub frame: Frame,
}

fn item(name: impl Into<String>, frame: Frame) -> Item {
    Item {
        name: name.into(),
        frame,
    }
}

/// The committed 8-bit natural images.
pub fn natural() -> Vec<Item> {
    NATURAL
        .iter()
        .map(|(name, bytes)| item(*name, Frame::from_bytes(bytes, WIDTH, HEIGHT, 8).expect("embedded corpus frame")))
        .collect()
}

/// Triangle wave over `period`, ranging over `0..=amplitude`.
fn triangle(t: i64, period: i64, amplitude: i64) -> i64 {
    let u = t.rem_euclid(period);
    amplitude * (2 * u - period).abs() / period
}

/// Approximately Gaussian integer noise with standard deviation `sigma`
/// (sum of twelve uniforms, each spanning `sigma`).
pub struct Noise {
    rng: ChaCha8Rng,
}

impl Noise {
    pub fn new(seed: u64) -> Self {
        Noise {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn sample(&mut self, sigma: i64) -> i64 {
        let mut s = 0i64;
        for _ in 0..12 {
            s += (self.rng.next_u32() & 0xffff) as i64;
        }
        // Twelve uniforms on [0, 65536) have mean 6*65536 and variance
        // 65536^2, so this is (approximately) N(0, sigma^2).
        ((s - 6 * 65536) * sigma + 32768).div_euclid(65536)
    }
}

fn from_fn(width: usize, height: usize, luma: impl Fn(i64, i64) -> i64, chroma: impl Fn(i64, i64, usize) -> i64) -> Frame {
    let mut f = Frame::new(width, height, 8).expect("corpus dimensions are valid");
    for y in 0..height {
        for x in 0..width {
            f.planes[0].set(x, y, luma(x as i64, y as i64).clamp(0, 255) as u16);
        }
    }
    for c in 1..3 {
        for y in 0..height / 2 {
            for x in 0..width / 2 {
                f.planes[c].set(x, y, chroma(x as i64, y as i64, c).clamp(0, 255) as u16);
            }
        }
    }
    f
}

/// Straight grating with phase `(a*x + b*y) / period`.
pub fn grating(width: usize, height: usize, a: i64, b: i64, period: i64, amplitude: i64) -> Frame {
    from_fn(
        width,
        height,
        |x, y| 128 - amplitude / 2 + triangle(a * x + b * y, period, amplitude),
        |x, y, c| 128 + (c as i64 * 2 - 3) * triangle(a * 2 * x + b * 2 * y, period, amplitude / 4),
    )
}

/// Grating plus Gaussian-like noise of standard deviation `sigma`.
#[allow(clippy::too_many_arguments)]
pub fn noisy_grating(width: usize, height: usize, a: i64, b: i64, period: i64, amplitude: i64, sigma: i64, seed: u64) -> Frame {
    let mut f = grating(width, height, a, b, period, amplitude);
    let mut noise = Noise::new(seed);
    for p in f.planes.iter_mut() {
        let s = if p.width == width { sigma } else { sigma / 2 };
        for v in p.data.iter_mut() {
            *v = (*v as i64 + noise.sample(s)).clamp(0, 255) as u16;
        }
    }
    f
}

/// Linear ramp `base + (gx*x + gy*y) / 16`.
pub fn ramp(width: usize, height: usize, base: i64, gx: i64, gy: i64) -> Frame {
    from_fn(
        width,
        height,
        |x, y| base + (gx * x + gy * y) / 16,
        |x, y, c| 128 + (c as i64 * 2 - 3) * (gx * x - gy * y) / 32,
    )
}

/// Smooth content: a ramp with a slow grating and weak noise on top.
pub fn smooth(width: usize, height: usize, variant: u64) -> Frame {
    let v = variant as i64;
    let base = ramp(width, height, 60 + 10 * v, 5 + v, 9 - v);
    let wave = grating(width, height, 1 + v % 3, 2 - v % 2, 96 + 16 * v, 40);
    let mut noise = Noise::new(1000 + variant);
    let mut f = base.clone();
    for (i, p) in f.planes.iter_mut().enumerate() {
        let s = if i == 0 { 2 } else { 1 };
        for (k, v) in p.data.iter_mut().enumerate() {
            let w = wave.planes[i].data[k] as i64 - 128;
            *v = (*v as i64 + w + noise.sample(s)).clamp(0, 255) as u16;
        }
    }
    f
}

/// Noisy directional gratings at several angles.
pub fn noisy_gratings() -> Vec<Item> {
    [(1, 0, 24, 0), (1, 1, 32, 1), (2, 1, 40, 2), (1, 3, 36, 3)]
        .into_iter()
        .map(|(a, b, p, s)| {
            item(
                format!("noisy_grating_{a}_{b}_{p}"),
                noisy_grating(WIDTH, HEIGHT, a, b, p, 120, 12, 77 + s),
            )
        })
        .collect()
}

/// Smooth-dominated content.
pub fn smooth_set() -> Vec<Item> {
    (0..3).map(|v| item(format!("smooth_{v}"), smooth(WIDTH, HEIGHT, v))).collect()
}

/// Clean gratings and ramps.
pub fn synthetic() -> Vec<Item> {
    vec![
        item("grating_1_2_20", grating(WIDTH, HEIGHT, 1, 2, 20, 160)),
        item("grating_3_1_28", grating(WIDTH, HEIGHT, 3, 1, 28, 160)),
        item("ramp", ramp(WIDTH, HEIGHT, 40, 20, 11)),
    ]
}
