use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::seeded;

/// `n` points of dimension `dim`, stored row-major, with the seed that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    data: Vec<f64>,
    seed: u64,
}

impl SampleSet {
    pub fn new(dim: usize, data: Vec<f64>, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("sample dimension must be positive".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::Shape(format!(
                "{} values do not split into points of dimension {dim}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateSamples("non-finite coordinate".into()));
        }
        Ok(SampleSet { dim, data, seed })
    }

    pub fn from_points(points: &[Vec<f64>], seed: u64) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Shape("points of differing dimension".into()));
        }
        SampleSet::new(dim, points.concat(), seed)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// The coordinates `dims` of every point, in the given order.
    pub fn select(&self, dims: &[usize]) -> Result<SampleSet> {
        if dims.is_empty() || dims.iter().any(|&d| d >= self.dim) {
            return Err(Error::Shape(format!(
                "coordinates {dims:?} out of range for dimension {}",
                self.dim
            )));
        }
        let data = self
            .points()
            .flat_map(|p| dims.iter().map(move |&d| p[d]))
            .collect();
        Ok(SampleSet {
            dim: dims.len(),
            data,
            seed: self.seed,
        })
    }

    /// Every point mapped through `x ↦ A x + b`.
    pub fn affine(&self, a: &DMatrix<f64>, b: &[f64]) -> Result<SampleSet> {
        if a.ncols() != self.dim || a.nrows() != b.len() {
            return Err(Error::Shape(format!(
                "{}x{} map with offset of length {} for dimension {}",
                a.nrows(),
                a.ncols(),
                b.len(),
                self.dim
            )));
        }
        let mut data = Vec::with_capacity(self.len() * a.nrows());
        for p in self.points() {
            let y = a * DVector::from_column_slice(p);
            data.extend(y.iter().zip(b).map(|(v, o)| v + o));
        }
        SampleSet::new(a.nrows(), data, self.seed)
    }

    /// Coordinate-wise sum with another set of equal shape.
    pub fn add(&self, other: &SampleSet) -> Result<SampleSet> {
        if self.dim != other.dim || self.len() != other.len() {
            return Err(Error::Shape("sample sets of different shape".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SampleSet {
            dim: self.dim,
            data,
            seed: self.seed,
        })
    }

    pub fn mean(&self) -> DVector<f64> {
        let mut m = DVector::zeros(self.dim);
        for p in self.points() {
            for (acc, v) in m.iter_mut().zip(p) {
                *acc += v;
            }
        }
        m / self.len() as f64
    }

    /// Unbiased sample covariance.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mean = self.mean();
        let mut c = DMatrix::zeros(self.dim, self.dim);
        for p in self.points() {
            for i in 0..self.dim {
                let di = p[i] - mean[i];
                for j in i..self.dim {
                    c[(i, j)] += di * (p[j] - mean[j]);
                }
            }
        }
        for i in 0..self.dim {
            for j in 0..i {
                c[(i, j)] = c[(j, i)];
            }
        }
        c / (self.len() as f64 - 1.0)
    }

    /// One point per row, no header, shortest round-trip decimal form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Shape of the iid unit-variance, zero-mean coordinates of a random vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SourceFamily {
    Gaussian,
    Uniform,
    Laplace,
    /// Standardized after mixing, so only the shape of the mixture matters.
    GaussianMixture {
        weights: Vec<f64>,
        means: Vec<f64>,
        std_devs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    #[serde(flatten)]
    pub family: SourceFamily,
    pub dim: usize,
}

impl SourceSpec {
    pub fn new(family: SourceFamily, dim: usize) -> Result<Self> {
        let spec = SourceSpec { family, dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gaussian(dim: usize) -> Self {
        SourceSpec {
            family: SourceFamily::Gaussian,
            dim,
        }
    }

    pub fn uniform(dim: usize) -> Self {
        SourceSpec {
            family: SourceFamily::Uniform,
            dim,
        }
    }

    /// Equal-weight mixture of `N(±separation, 1)`.
    pub fn bimodal(dim: usize, separation: f64) -> Self {
        SourceSpec {
            family: SourceFamily::GaussianMixture {
                weights: vec![0.5, 0.5],
                means: vec![-separation, separation],
                std_devs: vec![1.0, 1.0],
            },
            dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter(
                "source dimension must be positive".into(),
            ));
        }
        if let SourceFamily::GaussianMixture {
            weights,
            means,
            std_devs,
        } = &self.family
        {
            if weights.is_empty() || weights.len() != means.len() || weights.len() != std_devs.len()
            {
                return Err(Error::InvalidParameter(
                    "mixture needs equally many weights, means and standard deviations".into(),
                ));
            }
            if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(Error::InvalidMass(
                    "mixture weights must be non-negative".into(),
                ));
            }
            let total: f64 = weights.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidMass(format!(
                    "mixture weights sum to {total}"
                )));
            }
            if std_devs.iter().any(|s| !s.is_finite() || *s <= 0.0)
                || means.iter().any(|m| !m.is_finite())
            {
                return Err(Error::InvalidParameter(
                    "mixture components need finite means and positive spread".into(),
                ));
            }
        }
        Ok(())
    }

    /// `n` iid draws of the standardized vector.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleSet> {
        self.validate()?;
        let mut rng = seeded(seed);
        let mut data = Vec::with_capacity(n * self.dim);
        match &self.family {
            SourceFamily::Gaussian => {
                data.extend((0..n * self.dim).map(|_| -> f64 { StandardNormal.sample(&mut rng) }));
            }
            SourceFamily::Uniform => {
                let half = 3f64.sqrt();
                data.extend((0..n * self.dim).map(|_| rng.random_range(-half..half)));
            }
            SourceFamily::Laplace => {
                let scale = std::f64::consts::FRAC_1_SQRT_2;
                data.extend((0..n * self.dim).map(|_| {
                    let e: f64 = Exp1.sample(&mut rng);
                    if rng.random::<bool>() {
                        scale * e
                    } else {
                        -scale * e
                    }
                }));
            }
            SourceFamily::GaussianMixture {
                weights,
                means,
                std_devs,
            } => {
                let mean: f64 = weights.iter().zip(means).map(|(w, m)| w * m).sum();
                let second: f64 = weights
                    .iter()
                    .zip(means.iter().zip(std_devs))
                    .map(|(w, (m, s))| w * (s * s + m * m))
                    .sum();
                let sd = (second - mean * mean).sqrt();
                data.extend((0..n * self.dim).map(|_| {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    let mut c = weights.len() - 1;
                    for (i, w) in weights.iter().enumerate() {
                        acc += w;
                        if u < acc {
                            c = i;
                            break;
                        }
                    }
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (means[c] + std_devs[c] * z - mean) / sd
                }));
            }
        }
        SampleSet::new(self.dim, data, seed)
    }
}

/// `A` with `A Aᵀ = cov`, from the eigendecomposition (valid for singular `cov`).
pub fn covariance_factor(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = crate::pca::symmetric_eigen(cov)?;
    let roots = DVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|v| v.max(0.0).sqrt()),
    );
    Ok(&eig.vectors * DMatrix::from_diagonal(&roots))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_standardized() {
        let mix = SourceSpec::new(
            SourceFamily::GaussianMixture {
                weights: vec![0.3, 0.7],
                means: vec![-2.0, 5.0],
                std_devs: vec![0.5, 1.5],
            },
            2,
        )
        .unwrap();
        for spec in [
            SourceSpec::gaussian(2),
            SourceSpec::uniform(2),
            SourceSpec {
                family: SourceFamily::Laplace,
                dim: 2,
            },
            mix,
        ] {
            let s = spec.sample(40_000, 3).unwrap();
            let m = s.mean();
            let c = s.covariance();
            assert!(m.amax() < 0.03, "{spec:?} mean {m}");
            assert!((c - DMatrix::identity(2, 2)).amax() < 0.04, "{spec:?}");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = SourceSpec::bimodal(3, 2.0).sample(100, 9).unwrap();
        let b = SourceSpec::bimodal(3, 2.0).sample(100, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, SourceSpec::bimodal(3, 2.0).sample(100, 10).unwrap());
    }

    #[test]
    fn rejects_bad_mixture() {
        let bad = SourceFamily::GaussianMixture {
            weights: vec![0.6, 0.6],
            means: vec![0.0, 1.0],
            std_devs: vec![1.0, 1.0],
        };
        assert!(SourceSpec::new(bad, 1).is_err());
    }

    #[test]
    fn covariance_factor_reproduces() {
        let c = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 1.0]);
        let a = covariance_factor(&c).unwrap();
        assert!((&a * a.transpose() - c).amax() < 1e-12);
    }

    #[test]
    fn csv_and_select() {
        let s = SampleSet::from_points(&[vec![1.0, 2.5], vec![-0.125, 3.0]], 0).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1,2.5\n-0.125,3\n");
        assert_eq!(s.select(&[1]).unwrap().data(), &[2.5, 3.0]);
        assert!(SampleSet::new(2, vec![1.0; 3], 0).is_err());
    }

    #[test]
    fn spec_json() {
        let spec: SourceSpec = serde_json::from_str(
            r#"{"family":"gaussian-mixture","weights":[0.5,0.5],"means":[-3,3],"std_devs":[1,1],"dim":2}"#,
        )
        .unwrap();
        assert_eq!(spec, SourceSpec::bimodal(2, 3.0));
        let u: SourceSpec = serde_json::from_str(r#"{"family":"uniform","dim":3}"#).unwrap();
        assert_eq!(u, SourceSpec::uniform(3));
    }
}
