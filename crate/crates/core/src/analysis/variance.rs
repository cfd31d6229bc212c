//! Per-position variance of the spatial quantization error inside
//! transform blocks of one size.

use crate::cu::PartMode;
use crate::encoder::{encode_frame, EncoderConfig};
use crate::error::{Error, Result};
use crate::frame::Frame;

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceMap {
    pub size: usize,
    /// Row-major `size`x`size` variances.
    pub variance: Vec<f64>,
    pub blocks: u64,
}

impl VarianceMap {
    fn is_border(&self, x: usize, y: usize) -> bool {
        x == 0 || y == 0 || x + 1 == self.size || y + 1 == self.size
    }

    fn mean_where(&self, border: bool) -> f64 {
        let vals: Vec<f64> = (0..self.size * self.size)
            .filter(|&i| self.is_border(i % self.size, i / self.size) == border)
            .map(|i| self.variance[i])
            .collect();
        vals.iter().sum::<f64>() / vals.len().max(1) as f64
    }

    pub fn border_mean(&self) -> f64 {
        self.mean_where(true)
    }

    pub fn interior_mean(&self) -> f64 {
        self.mean_where(false)
    }

    pub fn transposed(&self) -> VarianceMap {
        let n = self.size;
        let mut v = vec![0.0; n * n];
        for y in 0..n {
            for x in 0..n {
                v[x * n + y] = self.variance[y * n + x];
            }
        }
        VarianceMap {
            size: n,
            variance: v,
            blocks: self.blocks,
        }
    }

    /// `y,x,variance` per position.
    pub fn csv(&self) -> String {
        let mut out = String::from("y,x,variance\n");
        for y in 0..self.size {
            for x in 0..self.size {
                out.push_str(&format!("{y},{x},{:.6}\n", self.variance[y * self.size + x]));
            }
        }
        out
    }
}

/// Encodes each frame with every CU forced to `block_size` and collects
/// `recon - orig` over the luma transform blocks of that size.
pub fn quant_error_variance_map(frames: &[Frame], base: &EncoderConfig, block_size: usize) -> Result<VarianceMap> {
    if !matches!(block_size, 8 | 16 | 32) {
        return Err(Error::Config(format!("variance block size {block_size} not in 8, 16, 32")));
    }
    let n = block_size;
    let cfg = EncoderConfig {
        fixed_cu_size: Some(n),
        ..*base
    };
    let mut sum = vec![0f64; n * n];
    let mut sum_sq = vec![0f64; n * n];
    let mut blocks = 0u64;
    for frame in frames {
        let (_, recon, stats) = encode_frame(frame, &cfg)?;
        for r in &stats.records {
            if r.part != PartMode::Whole || r.size != n || r.x + n > frame.width || r.y + n > frame.height {
                continue;
            }
            blocks += 1;
            for y in 0..n {
                for x in 0..n {
                    let e = recon.planes[0].get(r.x + x, r.y + y) as f64 - frame.planes[0].get(r.x + x, r.y + y) as f64;
                    sum[y * n + x] += e;
                    sum_sq[y * n + x] += e * e;
                }
            }
        }
    }
    let count = blocks.max(1) as f64;
    let variance = sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s, &q)| (q / count - (s / count).powi(2)).max(0.0))
        .collect();
    Ok(VarianceMap {
        size: n,
        variance,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::LineSet;

    #[test]
    fn lossless_grid_is_zero() {
        let f = crate::corpus::noisy_grating(64, 64, 1, 1, 16, 100, 8, 2);
        let m = quant_error_variance_map(&[f], &EncoderConfig::lossless(LineSet::SINGLE), 8).unwrap();
        assert!(m.blocks > 0);
        assert!(m.variance.iter().all(|&v| v == 0.0));
        assert_eq!(m.csv().lines().count(), 65);
    }

    #[test]
    fn rejects_unsupported_sizes() {
        let f = Frame::new(64, 64, 8).unwrap();
        assert!(quant_error_variance_map(&[f], &EncoderConfig::new(37, LineSet::SINGLE), 4).is_err());
    }

    #[test]
    fn border_and_interior_partition() {
        let mut m = VarianceMap {
            size: 8,
            variance: vec![1.0; 64],
            blocks: 1,
        };
        m.variance[0] = 29.0;
        // 28 border positions, 36 interior.
        assert!((m.border_mean() - 2.0).abs() < 1e-12);
        assert_eq!(m.interior_mean(), 1.0);
        assert_eq!(m.transposed().transposed(), m);
    }
}
