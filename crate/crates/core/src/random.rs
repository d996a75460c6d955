//! Seeded random instances for property checks and benchmarks.
//!
//! Joint masses are Dirichlet(1, …, 1) draws on the full tensor; Markov
//! chains are built from a prior and stochastic matrices so the conditional
//! independence holds exactly.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::info::{DeterministicMap, JointDistribution};

/// The RNG used everywhere a seed is recorded.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniform draw from the probability simplex of dimension `n`.
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

/// Alphabet size drawn uniformly from `2..=max`.
pub fn alphabet_size<R: Rng + ?Sized>(rng: &mut R, max: usize) -> usize {
    rng.random_range(2..=max.max(2))
}

pub fn random_joint<R: Rng + ?Sized>(
    rng: &mut R,
    names: &[&str],
    sizes: &[usize],
) -> JointDistribution {
    let cells = sizes.iter().product();
    JointDistribution::from_weights(
        names.iter().copied().zip(sizes.iter().copied()),
        dirichlet(rng, cells),
    )
    .expect("dirichlet draw is a valid mass")
}

/// A uniformly random function `domain -> codomain` (not necessarily onto).
pub fn random_map<R: Rng + ?Sized>(
    rng: &mut R,
    domain: usize,
    codomain: usize,
) -> DeterministicMap {
    let image = (0..domain).map(|_| rng.random_range(0..codomain)).collect();
    DeterministicMap::new(image, codomain).expect("image within codomain")
}

/// Row-stochastic matrix with Dirichlet rows.
pub fn stochastic_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| dirichlet(rng, cols)).collect()
}

/// Joint over `(V, W, X)` forming the chain V − W − X.
pub fn markov_chain<R: Rng + ?Sized>(rng: &mut R, sizes: [usize; 3]) -> JointDistribution {
    let pv = dirichlet(rng, sizes[0]);
    let w_given_v = stochastic_matrix(rng, sizes[0], sizes[1]);
    let x_given_w = stochastic_matrix(rng, sizes[1], sizes[2]);
    JointDistribution::from_fn([("V", sizes[0]), ("W", sizes[1]), ("X", sizes[2])], |i| {
        pv[i[0]] * w_given_v[i[0]][i[1]] * x_given_w[i[1]][i[2]]
    })
    .expect("chain mass is valid")
}

/// Gaussian matrix with iid standard normal entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `A Aᵀ` with `A` of shape `n × rank`: PSD with rank `rank` almost surely.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> DMatrix<f64> {
    let a = gaussian_matrix(rng, n, rank);
    let m = &a * a.transpose();
    symmetrize(m)
}

/// Positive definite with eigenvalues bounded below by `floor`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> DMatrix<f64> {
    let mut m = random_psd(rng, n, n);
    for i in 0..n {
        m[(i, i)] += floor;
    }
    m
}

/// Haar-ish random orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}
