//! Discrete signal plus additive noise, followed by a quantizer or pointwise map.
//!
//! For uniform noise every quantity has a closed form (the density of `X` is
//! piecewise constant); Gaussian noise goes through adaptive quadrature.
//! [`grid`] discretizes `(S, N)` and evaluates losses with the exact discrete
//! measures, which also covers maps without a closed form.

mod grid;
mod integrate;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::info::{binary_entropy, mutual_information, JointDistribution};

pub use grid::{
    grid_loss_report, ChannelGrid, GridEstimate, GridMap, Relevance, CONVERGENCE_TOLERANCE,
};
pub use integrate::adaptive_simpson;

/// Gaussian noise support is truncated at this many standard deviations.
pub const GAUSSIAN_TRUNCATION: f64 = 8.0;

/// Additive noise law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseDensity {
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
    /// Zero-mean Gaussian.
    Gaussian { std_dev: f64 },
}

impl NoiseDensity {
    pub fn pdf(&self, n: f64) -> f64 {
        match *self {
            NoiseDensity::Uniform { half_width: a } => {
                if n.abs() <= a {
                    0.5 / a
                } else {
                    0.0
                }
            }
            NoiseDensity::Gaussian { std_dev: s } => {
                (-0.5 * (n / s).powi(2)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
            }
        }
    }

    pub fn cdf(&self, n: f64) -> f64 {
        match *self {
            NoiseDensity::Uniform { half_width: a } => ((n + a) / (2.0 * a)).clamp(0.0, 1.0),
            NoiseDensity::Gaussian { std_dev: s } => {
                0.5 * erfc(-n / (s * std::f64::consts::SQRT_2))
            }
        }
    }

    /// Interval carrying (essentially) all of the mass.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            NoiseDensity::Uniform { half_width: a } => (-a, a),
            NoiseDensity::Gaussian { std_dev: s } => {
                (-GAUSSIAN_TRUNCATION * s, GAUSSIAN_TRUNCATION * s)
            }
        }
    }

    /// h(N) in bits.
    pub fn differential_entropy(&self) -> f64 {
        match *self {
            NoiseDensity::Uniform { half_width: a } => (2.0 * a).log2(),
            NoiseDensity::Gaussian { std_dev: s } => {
                0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * s * s).log2()
            }
        }
    }
}

/// `X = S + N` with `S` discrete and `N` independent of `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelDocument", into = "ChannelDocument")]
pub struct AdditiveChannel {
    signal: Vec<f64>,
    priors: Vec<f64>,
    noise: NoiseDensity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDocument {
    #[serde(default = "antipodal_values")]
    signal_values: Vec<f64>,
    #[serde(default)]
    priors: Option<Vec<f64>>,
    noise: NoiseDensity,
}

fn antipodal_values() -> Vec<f64> {
    vec![-1.0, 1.0]
}

impl TryFrom<ChannelDocument> for AdditiveChannel {
    type Error = Error;

    fn try_from(doc: ChannelDocument) -> Result<Self> {
        let n = doc.signal_values.len();
        let priors = doc.priors.unwrap_or_else(|| vec![1.0 / n as f64; n]);
        AdditiveChannel::new(doc.signal_values, priors, doc.noise)
    }
}

impl From<AdditiveChannel> for ChannelDocument {
    fn from(ch: AdditiveChannel) -> Self {
        ChannelDocument {
            signal_values: ch.signal,
            priors: Some(ch.priors),
            noise: ch.noise,
        }
    }
}

impl AdditiveChannel {
    pub fn new(signal: Vec<f64>, priors: Vec<f64>, noise: NoiseDensity) -> Result<Self> {
        if signal.is_empty() || signal.len() != priors.len() {
            return Err(Error::InvalidParameter(format!(
                "{} signal values with {} priors",
                signal.len(),
                priors.len()
            )));
        }
        if signal.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(
                "signal values must be finite".into(),
            ));
        }
        let mut sorted = signal.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(
                "signal values must be distinct".into(),
            ));
        }
        if priors.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidMass("negative prior".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMass(format!("priors sum to {total}")));
        }
        match noise {
            NoiseDensity::Uniform { half_width }
                if !(half_width > 1.0 && half_width.is_finite()) =>
            {
                return Err(Error::InvalidParameter(format!(
                    "uniform noise half-width must exceed 1, got {half_width}"
                )))
            }
            NoiseDensity::Gaussian { std_dev } if !(std_dev > 0.0 && std_dev.is_finite()) => {
                return Err(Error::InvalidParameter(format!(
                    "noise standard deviation must be positive, got {std_dev}"
                )))
            }
            _ => {}
        }
        Ok(AdditiveChannel {
            signal,
            priors,
            noise,
        })
    }

    /// Equiprobable `S ∈ {−1, +1}`.
    pub fn antipodal(noise: NoiseDensity) -> Result<Self> {
        AdditiveChannel::new(antipodal_values(), vec![0.5, 0.5], noise)
    }

    /// Antipodal signal with uniform noise on `[-a, a]`.
    pub fn uniform(a: f64) -> Result<Self> {
        AdditiveChannel::antipodal(NoiseDensity::Uniform { half_width: a })
    }

    /// Antipodal signal with Gaussian noise.
    pub fn gaussian(std_dev: f64) -> Result<Self> {
        AdditiveChannel::antipodal(NoiseDensity::Gaussian { std_dev })
    }

    pub fn signal_values(&self) -> &[f64] {
        &self.signal
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn noise(&self) -> NoiseDensity {
        self.noise
    }

    /// Interval outside of which `X` has (essentially) no mass.
    pub fn support_bounds(&self) -> (f64, f64) {
        let (nlo, nhi) = self.noise.support();
        let smin = self.signal.iter().copied().fold(f64::INFINITY, f64::min);
        let smax = self
            .signal
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (smin + nlo, smax + nhi)
    }

    fn output_density(&self, x: f64) -> f64 {
        self.signal
            .iter()
            .zip(&self.priors)
            .map(|(s, p)| p * self.noise.pdf(x - s))
            .sum()
    }
}

/// Strictly increasing decision thresholds; `k` thresholds give `k + 1` cells.
///
/// A value equal to a threshold belongs to the cell above it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Quantizer {
    thresholds: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Quantizer {
    type Error = Error;

    fn try_from(thresholds: Vec<f64>) -> Result<Self> {
        Quantizer::new(thresholds)
    }
}

impl From<Quantizer> for Vec<f64> {
    fn from(q: Quantizer) -> Self {
        q.thresholds
    }
}

impl Quantizer {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("thresholds must be finite".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "thresholds must be strictly increasing: {thresholds:?}"
            )));
        }
        Ok(Quantizer { thresholds })
    }

    /// The sign detector, a single threshold at zero.
    pub fn sign() -> Self {
        Quantizer {
            thresholds: vec![0.0],
        }
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn cells(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Output cell of `x` (ties go up).
    pub fn cell(&self, x: f64) -> usize {
        self.thresholds.partition_point(|&t| t <= x)
    }

    /// A copy with one more threshold.
    pub fn refined(&self, threshold: f64) -> Result<Quantizer> {
        let mut t = self.thresholds.clone();
        let at = t.partition_point(|&v| v < threshold);
        t.insert(at, threshold);
        Quantizer::new(t)
    }
}

/// I(X;S) in bits.
pub fn input_mutual_information(ch: &AdditiveChannel) -> Result<f64> {
    let info = match ch.noise {
        NoiseDensity::Uniform { half_width } => uniform_input_information(ch, half_width),
        NoiseDensity::Gaussian { std_dev } => gaussian_input_information(ch, std_dev),
    };
    Ok(info.max(0.0))
}

// Piecewise-constant densities: integrate interval by interval.
fn uniform_input_information(ch: &AdditiveChannel, a: f64) -> f64 {
    let mut breaks: Vec<f64> = ch.signal.iter().flat_map(|s| [s - a, s + a]).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let cond = 0.5 / a;
    breaks
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let fx = ch.output_density(mid);
            let inner: f64 = ch
                .signal
                .iter()
                .zip(&ch.priors)
                .filter(|(s, p)| (mid - **s).abs() < a && **p > 0.0)
                .map(|(_, p)| p * cond * (cond / fx).log2())
                .sum();
            (w[1] - w[0]) * inner
        })
        .sum()
}

fn gaussian_input_information(ch: &AdditiveChannel, sigma: f64) -> f64 {
    let (lo, hi) = ch.support_bounds();
    let (lo, hi) = (lo - 2.0 * sigma, hi + 2.0 * sigma);
    let integrand = |x: f64| -> f64 {
        // log-densities up to the common Gaussian normalizer
        let logs: Vec<f64> = ch
            .signal
            .iter()
            .map(|s| -0.5 * ((x - s) / sigma).powi(2))
            .collect();
        let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mix: f64 = logs
            .iter()
            .zip(&ch.priors)
            .map(|(l, p)| p * (l - peak).exp())
            .sum();
        let log_mix = peak + mix.ln();
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        logs.iter()
            .zip(&ch.priors)
            .filter(|(_, p)| **p > 0.0)
            .map(|(l, p)| p * norm * l.exp() * (l - log_mix))
            .sum::<f64>()
            / std::f64::consts::LN_2
    };
    let panels = ((hi - lo) / sigma).ceil().max(8.0) as usize;
    adaptive_simpson(integrand, lo, hi, 1e-11, panels)
}

/// Row-stochastic `P(Y = cell | S = s)`; rows follow the signal values.
pub fn quantizer_transition_matrix(ch: &AdditiveChannel, q: &Quantizer) -> Vec<Vec<f64>> {
    ch.signal
        .iter()
        .map(|&s| {
            let mut row = Vec::with_capacity(q.cells());
            let mut below = 0.0;
            for &t in q.thresholds() {
                let upto = ch.noise.cdf(t - s);
                row.push((upto - below).max(0.0));
                below = upto;
            }
            row.push((1.0 - below).max(0.0));
            row
        })
        .collect()
}

/// I(S;Y) for a quantized output.
pub fn output_mutual_information(ch: &AdditiveChannel, q: &Quantizer) -> Result<f64> {
    let rows = quantizer_transition_matrix(ch, q);
    let cells = q.cells();
    let joint = JointDistribution::from_fn([("S", ch.signal.len()), ("Y", cells)], |i| {
        ch.priors[i[0]] * rows[i[0]][i[1]]
    })?;
    mutual_information(&joint)
}

/// L_S(X→Y) = I(X;S) − I(Y;S), bits.
pub fn quantizer_relevant_loss(ch: &AdditiveChannel, q: &Quantizer) -> Result<f64> {
    Ok(input_mutual_information(ch)? - output_mutual_information(ch, q)?)
}

/// Closed-form values for antipodal signalling in uniform noise on `[-a, a]` (bits).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformClosedForms {
    /// I(X;S) = 1/a
    pub input_mi: f64,
    /// Relevant loss of the sign detector, H₂((a−1)/2a) − (a−1)/a
    pub sign_loss: f64,
    /// Erasure probability (a−1)/a of the thresholds ±(a−1)
    pub bec_erasure: f64,
    /// Y = |X|: relevant loss 1/a
    pub magnitude_relevant: f64,
    /// Y = |X|: irrelevant loss (a−1)/a
    pub magnitude_irrelevant: f64,
    /// Y = |X|: total loss H(X|Y) = 1
    pub magnitude_total: f64,
    /// Y = sgn(X): H(X|Y,N) = (a−1)/a
    pub sign_x_given_noise: f64,
}

pub fn uniform_closed_forms(a: f64) -> Result<UniformClosedForms> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("need a > 1, got {a}")));
    }
    let erasure = (a - 1.0) / a;
    Ok(UniformClosedForms {
        input_mi: 1.0 / a,
        sign_loss: binary_entropy((a - 1.0) / (2.0 * a))? - erasure,
        bec_erasure: erasure,
        magnitude_relevant: 1.0 / a,
        magnitude_irrelevant: erasure,
        magnitude_total: 1.0,
        sign_x_given_noise: erasure,
    })
}

/// Exact loss (bits) of the sign or magnitude map for uniform noise, `∞` where
/// the loss diverges; `None` for quantizer maps.
pub fn uniform_table_value(
    closed: &UniformClosedForms,
    map: &GridMap,
    relevance: Relevance,
) -> Option<f64> {
    let v = match (map, relevance) {
        (GridMap::Sign, Relevance::Signal) => closed.sign_loss,
        (GridMap::Sign, Relevance::XGivenNoise) => closed.sign_x_given_noise,
        (GridMap::Sign, _) => f64::INFINITY,
        (GridMap::Magnitude, Relevance::Signal) => closed.magnitude_relevant,
        (GridMap::Magnitude, Relevance::XGivenSignal) => closed.magnitude_irrelevant,
        (GridMap::Magnitude, Relevance::Total | Relevance::Noise) => closed.magnitude_total,
        (GridMap::Magnitude, Relevance::XGivenNoise) => 0.0,
        (GridMap::Quantizer { .. }, _) => return None,
    };
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_entries() {
        let c = uniform_closed_forms(2.0).unwrap();
        assert_eq!(
            uniform_table_value(&c, &GridMap::Magnitude, Relevance::Noise),
            Some(1.0)
        );
        assert_eq!(
            uniform_table_value(&c, &GridMap::Magnitude, Relevance::XGivenSignal),
            Some(0.5)
        );
        assert_eq!(
            uniform_table_value(&c, &GridMap::Sign, Relevance::Total),
            Some(f64::INFINITY)
        );
        assert_eq!(
            uniform_table_value(&c, &GridMap::Sign, Relevance::XGivenNoise),
            Some(0.5)
        );
        let q = GridMap::Quantizer {
            thresholds: Quantizer::sign(),
        };
        assert_eq!(uniform_table_value(&c, &q, Relevance::Signal), None);
    }

    #[test]
    fn input_information_uniform() {
        let ch = AdditiveChannel::uniform(2.0).unwrap();
        assert!((input_mutual_information(&ch).unwrap() - 0.5).abs() < 1e-15);
        let wide = AdditiveChannel::uniform(1e6).unwrap();
        assert!(input_mutual_information(&wide).unwrap() <= 2e-6);
        for a in [1.1, 1.5, 3.0, 7.25] {
            let ch = AdditiveChannel::uniform(a).unwrap();
            assert!((input_mutual_information(&ch).unwrap() - 1.0 / a).abs() < 1e-14);
        }
    }

    #[test]
    fn input_information_gaussian_matches_trapezoid() {
        let ch = AdditiveChannel::gaussian(1.0).unwrap();
        let got = input_mutual_information(&ch).unwrap();
        // Trapezoid oracle on I = h(X) − h(X|S).
        let (lo, hi, n) = (-14.0, 14.0, 280_000);
        let dx = (hi - lo) / n as f64;
        let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut hx = 0.0;
        for k in 0..=n {
            let x = lo + k as f64 * dx;
            let f = 0.5 * phi(x - 1.0) + 0.5 * phi(x + 1.0);
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            if f > 0.0 {
                hx -= w * f * f.log2() * dx;
            }
        }
        let oracle = hx - 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).log2();
        assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
    }

    #[test]
    fn noise_densities_normalize() {
        for noise in [
            NoiseDensity::Uniform { half_width: 2.5 },
            NoiseDensity::Gaussian { std_dev: 0.7 },
        ] {
            let (lo, hi) = noise.support();
            let total = adaptive_simpson(|n| noise.pdf(n), lo, hi, 1e-12, 64);
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn transition_matrix_examples() {
        let ch = AdditiveChannel::uniform(2.0).unwrap();
        let bsc = quantizer_transition_matrix(&ch, &Quantizer::sign());
        assert!((bsc[0][1] - 0.25).abs() < 1e-15);
        assert!((bsc[1][0] - 0.25).abs() < 1e-15);

        let bec = quantizer_transition_matrix(&ch, &Quantizer::new(vec![-1.0, 1.0]).unwrap());
        assert_eq!(bec[0], vec![0.5, 0.5, 0.0]);
        assert_eq!(bec[1], vec![0.0, 0.5, 0.5]);

        let eps = 1e-6;
        let a = 1.0 + eps;
        let near =
            quantizer_transition_matrix(&AdditiveChannel::uniform(a).unwrap(), &Quantizer::sign());
        assert!((near[0][1] - (a - 1.0) / (2.0 * a)).abs() < 1e-15);
        assert!(near[0][1] <= 5e-7);

        let gauss = AdditiveChannel::gaussian(0.8).unwrap();
        let q = Quantizer::new(vec![-0.4, 0.1, 0.9]).unwrap();
        for row in quantizer_transition_matrix(&gauss, &q) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn relevant_loss_examples() {
        let ch = AdditiveChannel::uniform(2.0).unwrap();
        let sign = quantizer_relevant_loss(&ch, &Quantizer::sign()).unwrap();
        assert!((sign - 0.3112781244591328).abs() < 1e-12);
        let bec = quantizer_relevant_loss(&ch, &Quantizer::new(vec![-1.0, 1.0]).unwrap()).unwrap();
        assert!(bec.abs() < 1e-12);
        let none = quantizer_relevant_loss(&ch, &Quantizer::new(vec![]).unwrap()).unwrap();
        assert!((none - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_forms() {
        let c = uniform_closed_forms(2.0).unwrap();
        assert_eq!(c.input_mi, 0.5);
        assert!((c.sign_loss - 0.3112781244591328).abs() < 1e-12);
        assert_eq!(c.bec_erasure, 0.5);
        assert_eq!(
            (
                c.magnitude_relevant,
                c.magnitude_irrelevant,
                c.magnitude_total
            ),
            (0.5, 0.5, 1.0)
        );
        assert!(uniform_closed_forms(1.001).unwrap().sign_loss <= 6e-3);
        assert!(uniform_closed_forms(1.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(AdditiveChannel::uniform(1.0).is_err());
        assert!(AdditiveChannel::gaussian(0.0).is_err());
        assert!(AdditiveChannel::new(
            vec![1.0, 1.0],
            vec![0.5, 0.5],
            NoiseDensity::Gaussian { std_dev: 1.0 }
        )
        .is_err());
        assert!(AdditiveChannel::new(
            vec![-1.0, 1.0],
            vec![0.6, 0.6],
            NoiseDensity::Gaussian { std_dev: 1.0 }
        )
        .is_err());
        assert!(Quantizer::new(vec![0.0, 0.0]).is_err());
        assert_eq!(Quantizer::sign().cell(0.0), 1);
        assert_eq!(Quantizer::sign().cell(-1e-300), 0);
    }

    #[test]
    fn channel_json() {
        let ch: AdditiveChannel =
            serde_json::from_str(r#"{"noise": {"family": "uniform", "half_width": 2.0}}"#).unwrap();
        assert_eq!(ch, AdditiveChannel::uniform(2.0).unwrap());
        assert!(serde_json::from_str::<AdditiveChannel>(
            r#"{"noise": {"family": "uniform", "half_width": 0.5}}"#
        )
        .is_err());
    }
}
