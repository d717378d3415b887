//! Age rescaling: each score becomes a z-score against the nodes of similar
//! age.
//!
//! For node `i` in date order the window holds nodes `i - W/2 ..= i + W/2`,
//! truncated at both ends of the network, so interior windows have `W + 1`
//! nodes and the first and last nodes see `W/2 + 1`. Mean and population
//! standard deviation come from double-double prefix sums, which keeps the
//! cost linear in `N` for any `W` while matching a direct two-pass evaluation
//! to ~1e-15 relative error.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::metrics::ScoreVector;
use crate::network::CitationNetwork;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RescaleError {
    #[error("rescaling window must be an even number of at least 2, got {0}")]
    InvalidWindow(usize),
    #[error("rescaling window {window} must be smaller than the node count {nodes}")]
    WindowTooLarge { window: usize, nodes: usize },
    #[error("score vector has {scores} entries but the network has {nodes} nodes")]
    LengthMismatch { scores: usize, nodes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RescaleConfig {
    /// Neighbors per window: `W/2` older and `W/2` younger nodes.
    pub window: usize,
}

impl RescaleConfig {
    pub fn new(window: usize) -> Self {
        Self { window }
    }

    /// Window proportional to the network size; see [`default_window`].
    pub fn for_network(net: &CitationNetwork) -> Self {
        Self { window: default_window(net.len()) }
    }

    pub fn validate(&self, nodes: usize) -> Result<(), RescaleError> {
        if self.window < 2 || self.window % 2 != 0 {
            return Err(RescaleError::InvalidWindow(self.window));
        }
        if self.window >= nodes {
            return Err(RescaleError::WindowTooLarge { window: self.window, nodes });
        }
        Ok(())
    }
}

/// `N / 600` rounded to the nearest even number, clamped to `[100, 20_000]`.
pub fn default_window(nodes: usize) -> usize {
    let half = libm::round(nodes as f64 / 1200.0) as usize;
    (2 * half).clamp(100, 20_000)
}

/// Largest valid window not above `preferred` for a network of `nodes`
/// nodes, or `None` when the network is too small (fewer than 3 nodes).
pub fn fit_window(preferred: usize, nodes: usize) -> Option<usize> {
    let cap = nodes.checked_sub(1)? & !1;
    let w = preferred.min(cap) & !1;
    (w >= 2).then_some(w)
}

/// Rescaled scores `R(m_i) = (m_i - mu_i) / sigma_i`; zero when the window
/// has no spread. The label gains an `R` prefix.
pub fn rescale(scores: &ScoreVector, net: &CitationNetwork, cfg: &RescaleConfig) -> Result<ScoreVector, RescaleError> {
    if scores.len() != net.len() {
        return Err(RescaleError::LengthMismatch { scores: scores.len(), nodes: net.len() });
    }
    let values = rescale_values(scores.scores(), cfg)?;
    let mut label = String::from("R");
    label.push_str(scores.label());
    Ok(ScoreVector::new(label, values))
}

/// [`rescale`] on a bare slice in date order.
pub fn rescale_values(values: &[f64], cfg: &RescaleConfig) -> Result<Vec<f64>, RescaleError> {
    let n = values.len();
    cfg.validate(n)?;
    let half = cfg.window / 2;
    let mut sum = Vec::with_capacity(n + 1);
    let mut sum_sq = Vec::with_capacity(n + 1);
    sum.push(Dd::ZERO);
    sum_sq.push(Dd::ZERO);
    for (k, &x) in values.iter().enumerate() {
        sum.push(sum[k].add(Dd::from(x)));
        sum_sq.push(sum_sq[k].add(Dd::square(x)));
    }
    let out = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let count = (hi - lo + 1) as f64;
            let mean = sum[hi + 1].sub(sum[lo]).div(count);
            let var = sum_sq[hi + 1].sub(sum_sq[lo]).div(count).sub(mean.mul(mean)).hi;
            // Anything below ~1e-14 relative spread is prefix-sum rounding of a
            // constant window.
            if var <= 1e-28 * mean.hi * mean.hi || var <= 0.0 {
                return 0.0;
            }
            Dd::from(values[i]).sub(mean).hi / libm::sqrt(var)
        })
        .collect();
    Ok(out)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn square(x: f64) -> Self {
        let p = x * x;
        Dd { hi: p, lo: libm::fma(x, x, -p) }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn quick(a: f64, b: f64) -> Self {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn add(self, o: Dd) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let r = Self::quick(s.hi, s.lo + t.hi);
        Self::quick(r.hi, r.lo + t.lo)
    }

    fn sub(self, o: Dd) -> Self {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    fn mul(self, o: Dd) -> Self {
        let p = self.hi * o.hi;
        let err = libm::fma(self.hi, o.hi, -p);
        Self::quick(p, err + self.hi * o.lo + self.lo * o.hi)
    }

    fn div(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = q1 * d;
        let p_err = libm::fma(q1, d, -p);
        let r = self.sub(Dd { hi: p, lo: p_err });
        Self::quick(q1, r.hi / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::indexed;
    use alloc::vec;

    fn naive(values: &[f64], window: usize, i: usize) -> f64 {
        let half = window / 2;
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(values.len() - 1);
        let w = &values[lo..=hi];
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let var = w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / w.len() as f64;
        if var == 0.0 {
            0.0
        } else {
            (values[i] - mean) / libm::sqrt(var)
        }
    }

    #[test]
    fn window_defaults() {
        assert_eq!(default_window(595_287), 992);
        assert_eq!(default_window(6_000), 100);
        assert_eq!(default_window(6_237_625), 10_396);
        assert_eq!(default_window(10_000_000), 16_666);
        assert_eq!(default_window(30_000_000), 20_000);
    }

    #[test]
    fn fit_window_respects_size() {
        assert_eq!(fit_window(100, 1000), Some(100));
        assert_eq!(fit_window(100, 50), Some(48));
        assert_eq!(fit_window(100, 51), Some(50));
        assert_eq!(fit_window(100, 3), Some(2));
        assert_eq!(fit_window(100, 2), None);
    }

    #[test]
    fn constant_scores_rescale_to_zero() {
        for c in [0.0, 1.0, 0.1, 123456.789, 1e-7] {
            let out = rescale_values(&vec![c; 50], &RescaleConfig::new(10)).unwrap();
            assert!(out.iter().all(|&r| r == 0.0), "constant {c}");
        }
    }

    #[test]
    fn value_at_window_mean_rescales_to_zero() {
        let out = rescale_values(&[1.0, 2.0, 3.0, 4.0, 5.0], &RescaleConfig::new(2)).unwrap();
        assert_eq!(out[2], 0.0);
        assert_eq!(out[1], 0.0);
    }

    #[test]
    fn matches_two_pass_windows() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let values: Vec<f64> = (0..400)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                1000.0 + (state % 10_000) as f64 / 7.0
            })
            .collect();
        for window in [2, 10, 64] {
            let out = rescale_values(&values, &RescaleConfig::new(window)).unwrap();
            for i in 0..values.len() {
                assert!((out[i] - naive(&values, window, i)).abs() < 1e-12, "w={window} i={i}");
            }
        }
    }

    #[test]
    fn parameter_errors() {
        let v = [1.0, 2.0, 3.0];
        assert_eq!(rescale_values(&v, &RescaleConfig::new(3)), Err(RescaleError::InvalidWindow(3)));
        assert_eq!(rescale_values(&v, &RescaleConfig::new(0)), Err(RescaleError::InvalidWindow(0)));
        assert_eq!(
            rescale_values(&v, &RescaleConfig::new(4)),
            Err(RescaleError::WindowTooLarge { window: 4, nodes: 3 })
        );
        let net = indexed(3, &[]);
        let sv = ScoreVector::new("C", vec![1.0, 2.0]);
        assert!(matches!(rescale(&sv, &net, &RescaleConfig::new(2)), Err(RescaleError::LengthMismatch { .. })));
    }

    #[test]
    fn label_prefix() {
        let net = indexed(5, &[]);
        let sv = ScoreVector::new("P", vec![1.0, 2.0, 3.0, 2.0, 1.0]);
        assert_eq!(rescale(&sv, &net, &RescaleConfig::new(2)).unwrap().label(), "RP");
    }
}
