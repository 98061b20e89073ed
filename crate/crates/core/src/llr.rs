//! Log-likelihood ratios.
//!
//! Sign convention everywhere: a positive LLR favours bit `0`, a negative LLR
//! favours bit `1`.
//!
//! Three forms are provided:
//!
//! * [`llr_bpsk_exact`] evaluates the ratio of Gaussian likelihoods literally,
//!   through exponentials. At high SNR the exponentials under/overflow and the
//!   result becomes `±inf` or `NaN`; that failure is kept observable.
//! * [`llr_bpsk_approx`] is the closed form `2 b sqrt(E) / sigma2`.
//! * [`llr_channel_proposed`] is the channel-measurement LLR: the probability
//!   that Alice's component is positive given Bob's component `f`, with the
//!   measurement difference `e - f` modelled as zero-mean Gaussian noise.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Decoder-input saturation used unless configured otherwise.
pub const DEFAULT_SATURATION: f64 = 50.0;

/// Real-valued LLRs with an optional saturation bound.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector {
    pub values: Vec<f64>,
    /// `Some(b)` once [`saturate`] has clamped every value to `[-b, b]`.
    pub saturation: Option<f64>,
}

impl LlrVector {
    pub fn unbounded(values: Vec<f64>) -> Self {
        Self {
            values,
            saturation: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Hard decisions, with an exact zero resolving to bit `1`.
    pub fn hard_decisions(&self) -> Vec<u8> {
        self.values.iter().map(|&l| hard_decision(l)).collect()
    }
}

#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    if llr > 0.0 {
        0
    } else {
        1
    }
}

/// Clamps to `[-max_abs, max_abs]`; `NaN` becomes `0`.
pub fn saturate_value(llr: f64, max_abs: f64) -> f64 {
    if llr.is_nan() {
        0.0
    } else {
        llr.clamp(-max_abs, max_abs)
    }
}

/// Clamps every value to `[-max_abs, max_abs]` and records the bound.
///
/// `+inf`/`-inf` map to the bound; `NaN` carries no information and maps to 0.
pub fn saturate(llrs: LlrVector, max_abs: f64) -> LlrVector {
    assert!(max_abs > 0.0, "saturation bound must be positive");
    let bound = match llrs.saturation {
        Some(b) => b.min(max_abs),
        None => max_abs,
    };
    LlrVector {
        values: llrs.values.into_iter().map(|l| saturate_value(l, max_abs)).collect(),
        saturation: Some(bound),
    }
}

/// BPSK LLR through explicit exponentials and a logarithm.
///
/// May return `±inf` or `NaN` once either exponent leaves the double range.
pub fn llr_bpsk_exact(b: f64, energy: f64, sigma2: f64) -> f64 {
    let amp = energy.sqrt();
    let p0 = (-(b - amp).powi(2) / (2.0 * sigma2)).exp();
    let p1 = (-(b + amp).powi(2) / (2.0 * sigma2)).exp();
    (p0 / p1).ln()
}

/// BPSK LLR in closed form, `2 b sqrt(E) / sigma2`.
pub fn llr_bpsk_approx(b: f64, energy: f64, sigma2: f64) -> f64 {
    2.0 * b * energy.sqrt() / sigma2
}

/// Gaussian tail probability `P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

const TAIL_SWITCH: f64 = 6.0;
const MILLS_DEPTH: u32 = 80;

/// Mills ratio `Q(x) / phi(x)` by backward evaluation of its continued
/// fraction `1 / (x + 1/(x + 2/(x + 3/(x + ...))))`. Valid for `x >= 6`.
fn mills_ratio(x: f64) -> f64 {
    let mut f = x;
    for k in (1..=MILLS_DEPTH).rev() {
        f = x + k as f64 / f;
    }
    1.0 / f
}

/// `ln Q(x)` for `x >= 0`, finite for every finite `x`.
fn ln_q_nonneg(x: f64) -> f64 {
    if x <= TAIL_SWITCH {
        q_function(x).ln()
    } else {
        -0.5 * x * x - 0.5 * (2.0 * PI).ln() + mills_ratio(x).ln()
    }
}

/// `ln[Phi(x) / Phi(-x)]` for `x >= 0`.
fn ln_cdf_ratio_nonneg(x: f64) -> f64 {
    let ln_q = ln_q_nonneg(x);
    (-ln_q.exp()).ln_1p() - ln_q
}

/// Channel-measurement LLR for Bob's component `f`.
///
/// `ln[ Q(-f/s) / (1 - Q(-f/s)) ]` with `s = sqrt(sigma2_prime)`, evaluated as
/// a log-CDF difference so it stays finite and odd in `f`.
pub fn llr_channel_proposed(f: f64, sigma2_prime: f64) -> f64 {
    let x = f / sigma2_prime.sqrt();
    if x == 0.0 {
        return 0.0;
    }
    let mag = ln_cdf_ratio_nonneg(x.abs());
    if x > 0.0 {
        mag
    } else {
        -mag
    }
}

/// How Bob turns one channel component into an LLR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LlrMethod {
    Proposed,
    BpskApprox,
    BpskExact,
}

impl LlrMethod {
    pub const ALL: [LlrMethod; 3] = [LlrMethod::Proposed, LlrMethod::BpskApprox, LlrMethod::BpskExact];

    pub fn name(&self) -> &'static str {
        match self {
            LlrMethod::Proposed => "proposed",
            LlrMethod::BpskApprox => "bpsk_approx",
            LlrMethod::BpskExact => "bpsk_exact",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

impl std::fmt::Display for LlrMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Variance assumed for the measurement difference `w' = e - f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DifferenceVariance {
    /// `2 sigma2_w`, the variance of the difference of two independent noises.
    #[default]
    Doubled,
    /// `sigma2_w` as written in the original derivation.
    Literal,
}

impl DifferenceVariance {
    pub fn variance(&self, sigma2_w: f64) -> f64 {
        match self {
            DifferenceVariance::Doubled => 2.0 * sigma2_w,
            DifferenceVariance::Literal => sigma2_w,
        }
    }
}

/// Parameters Bob uses to compute channel LLRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelLlrParams {
    pub method: LlrMethod,
    /// Per-component noise variance at each receiver.
    pub sigma2_w: f64,
    /// BPSK symbol energy assumed by the BPSK forms.
    pub energy: f64,
    pub difference_variance: DifferenceVariance,
}

impl ChannelLlrParams {
    /// Unsaturated LLR of one component.
    pub fn llr(&self, f: f64) -> f64 {
        match self.method {
            LlrMethod::Proposed => llr_channel_proposed(f, self.difference_variance.variance(self.sigma2_w)),
            LlrMethod::BpskApprox => llr_bpsk_approx(f, self.energy, self.sigma2_w),
            LlrMethod::BpskExact => llr_bpsk_exact(f, self.energy, self.sigma2_w),
        }
    }

    /// LLRs of the selected components, saturated to `max_abs`.
    pub fn llrs_at(&self, components: &[f64], indices: &[usize], max_abs: f64) -> LlrVector {
        let raw = LlrVector::unbounded(indices.iter().map(|&i| self.llr(components[i])).collect());
        saturate(raw, max_abs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Reference tail values computed at 40 digits.
    const Q_REF: [(f64, f64); 8] = [
        (1.0, 0.158_655_253_931_457_05),
        (2.0, 0.022_750_131_948_179_21),
        (3.0, 0.001_349_898_031_630_094_5),
        (5.0, 2.866_515_718_791_939e-7),
        (6.0, 9.865_876_450_376_98e-10),
        (7.0, 1.279_812_543_885_835e-12),
        (8.0, 6.220_960_574_271_784e-16),
        (-1.0, 0.841_344_746_068_542_9),
    ];

    const LLR_REF: [(f64, f64); 10] = [
        (1.0, 1.668_267_865_985_813_6),
        (2.0, 3.760_171_424_353_068_5),
        (5.0, 15.064_998_107_337_113),
        (6.0, 20.736_768_948_988_118),
        (6.5, 23.938_149_495_121_679),
        (8.0, 35.013_437_159_914_55),
        (10.0, 53.231_285_150_512_47),
        (20.0, 203.917_155_371_097_26),
        (30.0, 454.321_243_956_343_2),
        (40.0, 804.608_442_013_753_8),
    ];

    /// Composite Simpson integration of the standard normal density over
    /// `[x, x + 40]`.
    fn q_by_quadrature(x: f64) -> f64 {
        let n = 200_000;
        let h = 40.0 / n as f64;
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        let mut s = pdf(x) + pdf(x + 40.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * pdf(x + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn q_function_values() {
        assert_eq!(q_function(0.0), 0.5);
        assert!(q_function(-8.0) > 1.0 - 1e-15);
        assert!((q_function(1.0) - q_by_quadrature(1.0)).abs() < 1e-10);
        assert!((q_function(1.0) - 0.158_655).abs() < 1e-6);
        for (x, q) in Q_REF {
            let rel = ((q_function(x) - q) / q).abs();
            assert!(rel <= 1e-12, "Q({x}) relative error {rel}");
        }
    }

    #[test]
    fn mills_tail_matches_erfc_at_switch() {
        for &x in &[6.0, 6.5, 7.0, 8.0] {
            let direct = q_function(x).ln();
            let tail = -0.5 * x * x - 0.5 * (2.0 * PI).ln() + mills_ratio(x).ln();
            assert!((direct - tail).abs() < 1e-12, "x = {x}: {direct} vs {tail}");
        }
    }

    #[test]
    fn proposed_llr_reference_values() {
        assert_eq!(llr_channel_proposed(0.0, 0.3), 0.0);
        let v: f64 = 0.04;
        assert!((llr_channel_proposed(v.sqrt(), v) - 1.6681).abs() < 1e-3);
        assert!((llr_channel_proposed(-v.sqrt(), v) + 1.6681).abs() < 1e-3);
        for (x, expect) in LLR_REF {
            let got = llr_channel_proposed(x, 1.0);
            assert!(((got - expect) / expect).abs() < 1e-12, "x = {x}: {got} vs {expect}");
        }
        assert!(llr_channel_proposed(1e3, 1e-6).is_finite());
        assert!(llr_channel_proposed(-1e100, 1e-100).is_finite());
        assert_eq!(saturate_value(llr_channel_proposed(-1e150, 1e-300), 50.0), -50.0);
    }

    #[test]
    fn bpsk_forms() {
        assert_eq!(llr_bpsk_exact(0.0, 1.0, 0.5), 0.0);
        assert_eq!(llr_bpsk_approx(0.0, 1.0, 0.5), 0.0);
        assert!((llr_bpsk_exact(1.0, 1.0, 0.5) - 4.0).abs() < 1e-12);
        assert_eq!(llr_bpsk_approx(1.0, 1.0, 0.5), 4.0);
        assert!((llr_bpsk_approx(-0.25, 1.0, 0.1) + 5.0).abs() < 1e-12);
        // exp(-1000) underflows to zero in the denominator.
        assert_eq!(llr_bpsk_exact(1.0, 1.0, 0.002), f64::INFINITY);
        assert!(llr_bpsk_approx(1.0, 1.0, 0.002).is_finite());
        assert!(llr_bpsk_exact(40.0, 1.0, 0.002).is_nan());
    }

    #[test]
    fn saturation() {
        let v = LlrVector::unbounded(vec![f64::INFINITY, -3.0, 0.5, f64::NEG_INFINITY, f64::NAN]);
        let s = saturate(v, 20.0);
        assert_eq!(s.values, vec![20.0, -3.0, 0.5, -20.0, 0.0]);
        assert_eq!(s.saturation, Some(20.0));
        let inside = LlrVector::unbounded(vec![1.0, -2.0]);
        assert_eq!(saturate(inside.clone(), 5.0).values, inside.values);
    }

    #[test]
    fn hard_decision_tie_is_one() {
        let v = LlrVector::unbounded(vec![1.0, -1.0, 0.0]);
        assert_eq!(v.hard_decisions(), vec![0, 1, 1]);
    }

    proptest! {
        #[test]
        fn proposed_is_odd(x in -8.0f64..8.0, v in 1e-4f64..10.0) {
            let f = x * v.sqrt();
            prop_assert!((llr_channel_proposed(-f, v) + llr_channel_proposed(f, v)).abs() <= 1e-10);
        }

        #[test]
        fn proposed_is_increasing(x in -30.0f64..30.0, dx in 1e-6f64..1.0) {
            prop_assert!(llr_channel_proposed(x + dx, 1.0) > llr_channel_proposed(x, 1.0));
        }

        #[test]
        fn proposed_sign_matches_hard_decision(f in -5.0f64..5.0, v in 1e-3f64..4.0) {
            prop_assume!(f != 0.0);
            let l = llr_channel_proposed(f, v);
            prop_assert_eq!(hard_decision(l), crate::quantize::quantize_bit(f).unwrap());
        }

        #[test]
        fn saturated_values_are_bounded(xs in prop::collection::vec(prop::num::f64::ANY, 0..50), b in 0.1f64..100.0) {
            let s = saturate(LlrVector::unbounded(xs), b);
            prop_assert!(s.values.iter().all(|v| v.is_finite() && v.abs() <= b));
        }
    }
}
