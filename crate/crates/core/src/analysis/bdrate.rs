//! Average bit-rate difference between two RD curves at equal quality.

use crate::error::{Error, Result};

/// One operating point: total bits and quality in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub bits: f64,
    pub psnr: f64,
}

/// Coefficients (ascending) of the polynomial through `pts` (Lagrange form
/// expanded into the monomial basis).
fn interpolate(pts: &[(f64, f64)]) -> Vec<f64> {
    let n = pts.len();
    let mut coef = vec![0.0; n];
    for (i, &(xi, yi)) in pts.iter().enumerate() {
        let mut basis = vec![1.0];
        let mut denom = 1.0;
        for (j, &(xj, _)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![0.0; basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k] -= b * xj;
                next[k + 1] += b;
            }
            basis = next;
            denom *= xi - xj;
        }
        for (k, b) in basis.iter().enumerate() {
            coef[k] += yi * b / denom;
        }
    }
    coef
}

fn integral(coef: &[f64], lo: f64, hi: f64) -> f64 {
    let prim = |x: f64| coef.iter().enumerate().map(|(k, c)| c * x.powi(k as i32 + 1) / (k + 1) as f64).sum::<f64>();
    prim(hi) - prim(lo)
}

/// Percentage change in rate of `test` against `anchor` over the shared
/// quality range; negative means `test` needs fewer bits.
pub fn bd_rate(anchor: &[RdPoint], test: &[RdPoint]) -> Result<f64> {
    if anchor.len() < 2 || anchor.len() != test.len() {
        return Err(Error::Config("RD curves need the same number (>= 2) of points".into()));
    }
    let prep = |c: &[RdPoint]| -> Result<Vec<(f64, f64)>> {
        let mut v: Vec<(f64, f64)> = c.iter().map(|p| (p.psnr, p.bits.ln())).collect();
        if v.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::Config("RD point with non-finite rate or quality".into()));
        }
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        if v.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Config("RD curve has repeated quality values".into()));
        }
        Ok(v)
    };
    let (a, t) = (prep(anchor)?, prep(test)?);
    let lo = a[0].0.max(t[0].0);
    let hi = a[a.len() - 1].0.min(t[t.len() - 1].0);
    if hi <= lo {
        return Err(Error::Config("RD curves do not overlap in quality".into()));
    }
    let diff = (integral(&interpolate(&t), lo, hi) - integral(&interpolate(&a), lo, hi)) / (hi - lo);
    Ok((diff.exp() - 1.0) * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(scale: f64) -> Vec<RdPoint> {
        [(1000.0, 30.0), (2000.0, 33.0), (4000.0, 36.5), (8000.0, 40.0)]
            .iter()
            .map(|&(b, q)| RdPoint { bits: b * scale, psnr: q })
            .collect()
    }

    #[test]
    fn identical_curves_give_zero() {
        assert!(bd_rate(&curve(1.0), &curve(1.0)).unwrap().abs() < 1e-9);
    }

    #[test]
    fn uniform_rate_scale_is_recovered() {
        assert!((bd_rate(&curve(1.0), &curve(0.9)).unwrap() + 10.0).abs() < 1e-6);
        assert!((bd_rate(&curve(1.0), &curve(1.25)).unwrap() - 25.0).abs() < 1e-6);
    }

    #[test]
    fn interpolation_passes_through_points() {
        let pts = [(1.0, 2.0), (2.0, -1.0), (4.0, 5.0), (5.0, 0.5)];
        let c = interpolate(&pts);
        for (x, y) in pts {
            let v: f64 = c.iter().enumerate().map(|(k, a)| a * x.powi(k as i32)).sum();
            assert!((v - y).abs() < 1e-9);
        }
    }

    #[test]
    fn disjoint_curves_are_rejected() {
        let far: Vec<RdPoint> = curve(1.0).iter().map(|p| RdPoint { psnr: p.psnr + 20.0, ..*p }).collect();
        assert!(bd_rate(&curve(1.0), &far).is_err());
        assert!(bd_rate(&curve(1.0), &curve(1.0)[..3]).is_err());
    }
}
