//! Grid discretization of `(S, N)` for channels and maps without closed forms.
//!
//! The noise support is cut into `resolution` equal cells and each cell's
//! mass is placed at its midpoint. `X` is binned on cells of the same width
//! over the channel's support, so for antipodal signalling with dyadic cell
//! widths every shifted noise midpoint lands on an `X` midpoint and the
//! discrete losses match the continuous ones up to cell-boundary effects.

use serde::{Deserialize, Serialize};

use super::{AdditiveChannel, NoiseDensity, Quantizer};
use crate::error::{Error, Result};
use crate::info::{DeterministicMap, JointDistribution, SparseJoint};

/// Smallest accepted number of noise cells.
pub const MIN_RESOLUTION: usize = 16;

/// Change (bits) under resolution doubling below which an estimate counts as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-3;

/// Pointwise map applied to the channel output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridMap {
    Sign,
    Magnitude,
    Quantizer { thresholds: Quantizer },
}

/// Which loss to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relevance {
    /// L_S = I(X;S|Y)
    Signal,
    /// L_N = I(X;N|Y)
    Noise,
    /// L_{X|S} = H(X|Y,S)
    XGivenSignal,
    /// L_{X|N} = H(X|Y,N)
    XGivenNoise,
    /// L = H(X|Y)
    Total,
}

impl Relevance {
    pub const ALL: [Relevance; 5] = [
        Relevance::Total,
        Relevance::Signal,
        Relevance::XGivenSignal,
        Relevance::Noise,
        Relevance::XGivenNoise,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Relevance::Signal => "L_S",
            Relevance::Noise => "L_N",
            Relevance::XGivenSignal => "L_X|S",
            Relevance::XGivenNoise => "L_X|N",
            Relevance::Total => "L",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridCell {
    signal: usize,
    noise: usize,
    x: usize,
    mass: f64,
}

/// Discretized `(S, N, X)` for one channel at one resolution.
#[derive(Debug, Clone)]
pub struct ChannelGrid {
    resolution: usize,
    width: f64,
    x_lo: f64,
    x_cells: usize,
    signal_count: usize,
    cells: Vec<GridCell>,
}

const S: usize = 0;
const N: usize = 1;
const X: usize = 2;
const Y: usize = 3;

impl ChannelGrid {
    pub fn build(ch: &AdditiveChannel, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {resolution} below minimum {MIN_RESOLUTION}"
            )));
        }
        let noise = ch.noise();
        let (n_lo, n_hi) = noise.support();
        let width = (n_hi - n_lo) / resolution as f64;
        let noise_mass: Vec<f64> = match noise {
            NoiseDensity::Uniform { .. } => vec![1.0 / resolution as f64; resolution],
            NoiseDensity::Gaussian { .. } => {
                let edges: Vec<f64> = (0..=resolution)
                    .map(|j| noise.cdf(n_lo + j as f64 * width))
                    .collect();
                let kept = edges[resolution] - edges[0];
                edges.windows(2).map(|e| (e[1] - e[0]) / kept).collect()
            }
        };
        let (x_lo, x_hi) = ch.support_bounds();
        let x_cells = ((x_hi - x_lo) / width - 1e-9).ceil() as usize;
        let mut cells = Vec::with_capacity(ch.signal_values().len() * resolution);
        for (si, (&s, &ps)) in ch.signal_values().iter().zip(ch.priors()).enumerate() {
            for (nj, &pn) in noise_mass.iter().enumerate() {
                let x = s + n_lo + (nj as f64 + 0.5) * width;
                let k = (((x - x_lo) / width).floor().max(0.0) as usize).min(x_cells - 1);
                let mass = ps * pn;
                if mass > 0.0 {
                    cells.push(GridCell {
                        signal: si,
                        noise: nj,
                        x: k,
                        mass,
                    });
                }
            }
        }
        Ok(ChannelGrid {
            resolution,
            width,
            x_lo,
            x_cells,
            signal_count: ch.signal_values().len(),
            cells,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn x_cells(&self) -> usize {
        self.x_cells
    }

    pub fn cell_width(&self) -> f64 {
        self.width
    }

    pub fn x_midpoint(&self, k: usize) -> f64 {
        self.x_lo + (k as f64 + 0.5) * self.width
    }

    /// Output symbol of `X` cell `k`, as an ordered key.
    fn output_key(&self, map: &GridMap, k: usize) -> u64 {
        let x = self.x_midpoint(k);
        match map {
            GridMap::Sign => u64::from(x >= 0.0),
            GridMap::Quantizer { thresholds } => thresholds.cell(x) as u64,
            // half-cell units, so mirrored midpoints share a key
            GridMap::Magnitude => (2.0 * x.abs() / self.width).round() as u64,
        }
    }

    /// Sparse joint over `(S, N, X, Y)`.
    pub fn joint(&self, map: &GridMap) -> SparseJoint {
        let keys: Vec<u64> = (0..self.x_cells).map(|k| self.output_key(map, k)).collect();
        let mut joint = SparseJoint::new(4);
        for c in &self.cells {
            joint.push(
                &[c.signal as u64, c.noise as u64, c.x as u64, keys[c.x]],
                c.mass,
            );
        }
        joint
    }

    /// Dense joint over `(S, X)`.
    pub fn joint_sx(&self) -> Result<JointDistribution> {
        let mut mass = vec![0.0; self.signal_count * self.x_cells];
        for c in &self.cells {
            mass[c.signal * self.x_cells + c.x] += c.mass;
        }
        JointDistribution::from_weights([("S", self.signal_count), ("X", self.x_cells)], mass)
    }

    /// The map on `X` cells, with outputs relabelled `0..k` in key order.
    pub fn x_map(&self, map: &GridMap) -> Result<DeterministicMap> {
        let keys: Vec<u64> = (0..self.x_cells).map(|k| self.output_key(map, k)).collect();
        let mut distinct = keys.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let image = keys
            .iter()
            .map(|k| distinct.binary_search(k).expect("key present"))
            .collect();
        DeterministicMap::new(image, distinct.len())
    }

    /// Discrete loss (bits) at this resolution.
    pub fn loss(&self, map: &GridMap, relevance: Relevance) -> Result<f64> {
        let j = self.joint(map);
        match relevance {
            Relevance::Signal => j.conditional_mutual_information(&[X], &[S], &[Y]),
            Relevance::Noise => j.conditional_mutual_information(&[X], &[N], &[Y]),
            Relevance::XGivenSignal => j.conditional_entropy(&[X], &[Y, S]),
            Relevance::XGivenNoise => j.conditional_entropy(&[X], &[Y, N]),
            Relevance::Total => j.conditional_entropy(&[X], &[Y]),
        }
    }
}

/// A grid estimate with its resolution-doubling check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridEstimate {
    pub resolution: usize,
    /// Loss at `resolution` (bits).
    pub estimate: f64,
    /// Loss at `2 * resolution`.
    pub refined_estimate: f64,
    /// Doubling moved the estimate by less than [`CONVERGENCE_TOLERANCE`].
    /// Cleared for diverging (infinite) losses.
    pub converged: bool,
}

impl GridEstimate {
    pub fn growth(&self) -> f64 {
        self.refined_estimate - self.estimate
    }
}

pub fn grid_loss_report(
    ch: &AdditiveChannel,
    map: &GridMap,
    resolution: usize,
    relevance: Relevance,
) -> Result<GridEstimate> {
    let coarse = ChannelGrid::build(ch, resolution)?.loss(map, relevance)?;
    let fine = ChannelGrid::build(ch, 2 * resolution)?.loss(map, relevance)?;
    Ok(GridEstimate {
        resolution,
        estimate: coarse,
        refined_estimate: fine,
        converged: (fine - coarse).abs() < CONVERGENCE_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{quantizer_relevant_loss, uniform_closed_forms};

    fn a2() -> AdditiveChannel {
        AdditiveChannel::uniform(2.0).unwrap()
    }

    #[test]
    fn magnitude_rows() {
        let closed = uniform_closed_forms(2.0).unwrap();
        let s = grid_loss_report(&a2(), &GridMap::Magnitude, 256, Relevance::Signal).unwrap();
        assert!((s.estimate - closed.magnitude_relevant).abs() < 0.01 && s.converged);
        let n = grid_loss_report(&a2(), &GridMap::Magnitude, 256, Relevance::Noise).unwrap();
        assert!((n.estimate - 1.0).abs() < 0.01 && n.converged);
        let xs =
            grid_loss_report(&a2(), &GridMap::Magnitude, 256, Relevance::XGivenSignal).unwrap();
        assert!((xs.estimate - closed.magnitude_irrelevant).abs() < 0.01);
        let xn = grid_loss_report(&a2(), &GridMap::Magnitude, 256, Relevance::XGivenNoise).unwrap();
        assert!(xn.estimate.abs() < 0.01);
        let total = grid_loss_report(&a2(), &GridMap::Magnitude, 256, Relevance::Total).unwrap();
        assert!((total.estimate - 1.0).abs() < 0.01);
        // noise and irrelevant information differ
        assert!(n.estimate - xs.estimate >= 0.4);
    }

    #[test]
    fn sign_rows() {
        let closed = uniform_closed_forms(2.0).unwrap();
        let s = grid_loss_report(&a2(), &GridMap::Sign, 256, Relevance::Signal).unwrap();
        assert!((s.estimate - closed.sign_loss).abs() < 0.01 && s.converged);
        let xn = grid_loss_report(&a2(), &GridMap::Sign, 256, Relevance::XGivenNoise).unwrap();
        assert!((xn.estimate - closed.sign_x_given_noise).abs() < 0.01 && xn.converged);
        for r in [Relevance::Total, Relevance::XGivenSignal, Relevance::Noise] {
            let e = grid_loss_report(&a2(), &GridMap::Sign, 256, r).unwrap();
            assert!(!e.converged, "{r:?} should diverge");
            assert!(e.growth() >= 0.5, "{r:?} grew {}", e.growth());
        }
    }

    #[test]
    fn quantizer_map_matches_closed_form() {
        for a in [1.5, 2.0, 3.0] {
            let ch = AdditiveChannel::uniform(a).unwrap();
            for t in [vec![0.0], vec![-0.3, 0.6], vec![1.0 - a, a - 1.0]] {
                let q = Quantizer::new(t).unwrap();
                let exact = quantizer_relevant_loss(&ch, &q).unwrap();
                let map = GridMap::Quantizer { thresholds: q };
                let g = grid_loss_report(&ch, &map, 1024, Relevance::Signal).unwrap();
                assert!(
                    (g.estimate - exact).abs() < 0.01,
                    "a={a}: {} vs {exact}",
                    g.estimate
                );
            }
        }
    }

    #[test]
    fn gaussian_grid_matches_quadrature() {
        let ch = AdditiveChannel::gaussian(0.9).unwrap();
        let q = Quantizer::sign();
        let exact = quantizer_relevant_loss(&ch, &q).unwrap();
        let est = grid_loss_report(
            &ch,
            &GridMap::Quantizer { thresholds: q },
            1024,
            Relevance::Signal,
        )
        .unwrap();
        assert!(
            (est.estimate - exact).abs() < 0.01,
            "{} vs {exact}",
            est.estimate
        );
    }

    #[test]
    fn resolution_floor_and_determinism() {
        assert!(grid_loss_report(&a2(), &GridMap::Sign, 8, Relevance::Signal).is_err());
        let a = grid_loss_report(&a2(), &GridMap::Magnitude, 64, Relevance::Noise).unwrap();
        let b = grid_loss_report(&a2(), &GridMap::Magnitude, 64, Relevance::Noise).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    }

    #[test]
    fn x_map_is_function_of_cells() {
        let grid = ChannelGrid::build(&a2(), 64).unwrap();
        let m = grid.x_map(&GridMap::Magnitude).unwrap();
        assert_eq!(m.domain_size(), grid.x_cells());
        assert_eq!(m.codomain_size(), grid.x_cells() / 2);
        assert!(m.is_surjective());
    }
}
