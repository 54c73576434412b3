use std::f64::consts::LN_2;

use super::xlogx;
use crate::{Error, Result};

/// Binary entropy `H(q) = -q ln q - (1-q) ln(1-q)`.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::OutOfRange(format!("binary entropy argument {q}")));
    }
    Ok(-xlogx(q) - xlogx(1.0 - q))
}

/// The envelope `2 ln 2 · sqrt(p(1-p))`, which dominates [`binary_entropy`]
/// on `[0, 1]` and touches it at `p = 1/2`.
pub fn entropy_upper_bound(p: f64) -> f64 {
    2.0 * LN_2 * (p * (1.0 - p)).max(0.0).sqrt()
}

/// `q(α) = -½ ln(1 - e^{-α})`, the per-dimension cost of log-normal weight
/// noise with variance parameter `α`. Strictly positive and strictly
/// decreasing on `α > 0`.
pub fn q_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange(format!("alpha must be positive, got {alpha}")));
    }
    let log_one_minus = if alpha > LN_2 {
        (-(-alpha).exp()).ln_1p()
    } else {
        (-(-alpha).exp_m1()).ln()
    };
    Ok(-0.5 * log_one_minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_entropy_reference_values() {
        assert!((binary_entropy(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // -0.9 ln 0.9 - 0.1 ln 0.1
        assert!((binary_entropy(0.9).unwrap() - 0.325_082_973_391_448_2).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn entropy_envelope_dominates_on_grid() {
        for i in 0..=10_000 {
            let p = i as f64 / 10_000.0;
            let h = binary_entropy(p).unwrap();
            assert!(h <= entropy_upper_bound(p) + 1e-15, "p = {p}");
        }
        assert!((entropy_upper_bound(0.5) - binary_entropy(0.5).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn q_alpha_reference_values() {
        assert!((q_alpha(LN_2).unwrap() - 0.5 * LN_2).abs() < 1e-15);
        // 30-digit evaluation of -½ ln(1 - e^{-0.1})
        assert!((q_alpha(0.1).unwrap() - 1.176_084_230_522_045_4).abs() < 1e-12);
        assert!(q_alpha(50.0).unwrap() > 0.0);
        assert!(q_alpha(50.0).unwrap() < 1e-20);
        assert!(q_alpha(0.0).is_err());
        assert!(q_alpha(-1.0).is_err());
    }

    #[test]
    fn q_alpha_strictly_decreasing() {
        let grid: Vec<f64> = (1..400).map(|i| i as f64 * 0.05).collect();
        for w in grid.windows(2) {
            assert!(q_alpha(w[0]).unwrap() > q_alpha(w[1]).unwrap());
        }
    }
}
