//! Seeded property suite over random instances, shared by the command-line
//! `selftest` mode and the test suites.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::channel::{quantizer_relevant_loss, uniform_closed_forms, AdditiveChannel, Quantizer};
use crate::error::Result;
use crate::ib::{agglomerative_enhance, ClusteringState};
use crate::info::{
    conditional_entropy, conditional_mutual_information, entropy, loss_report, mutual_information,
    push_map, DeterministicMap, JointDistribution, SparseJoint,
};
use crate::pca::{
    eigen_bound, gaussian_relevant_loss, iid_gaussian_bound, spectra, LinearGaussianModel,
};
use crate::random::{
    alphabet_size, dirichlet, markov_chain, random_joint, random_map, random_orthogonal,
    random_psd, random_spd, seeded, stochastic_matrix,
};

pub const DISCRETE_TOLERANCE: f64 = 1e-9;
pub const GAUSSIAN_TOLERANCE: f64 = 1e-9;
pub const VANISHING_TOLERANCE: f64 = 1e-8;

/// Worst deviation of one property over a batch of instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub instances: usize,
    /// Largest amount by which the property failed (0 when it held exactly).
    pub worst_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    instances: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tally {
            name,
            tolerance,
            instances: 0,
            worst: 0.0,
        }
    }

    /// Records `amount > 0` as a violation; NaN counts as infinite.
    fn record(&mut self, amount: f64) {
        self.instances += 1;
        let amount = if amount.is_nan() {
            f64::INFINITY
        } else {
            amount
        };
        self.worst = self.worst.max(amount);
    }

    fn upper(&mut self, value: f64, bound: f64) {
        self.record(value - bound);
    }

    fn equal(&mut self, a: f64, b: f64) {
        self.record((a - b).abs());
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            instances: self.instances,
            worst_violation: self.worst,
            tolerance: self.tolerance,
            passed: self.worst <= self.tolerance,
        }
    }
}

fn to_sparse(joint: &JointDistribution) -> SparseJoint {
    let mut sparse = SparseJoint::new(joint.arity());
    joint.for_each_cell(|idx, p| {
        if p > 0.0 {
            let key: Vec<u64> = idx.iter().map(|&i| i as u64).collect();
            sparse.push(&key, p);
        }
    });
    sparse
}

/// Identities and inequalities of the discrete relevant loss on `instances`
/// random joints with alphabets of at most five symbols.
pub fn discrete_properties(seed: u64, instances: usize) -> Result<Vec<CheckOutcome>> {
    let mut rng = seeded(seed);
    let mut nonneg = Tally::new("relevant_loss_nonnegative", 1e-12);
    let mut below_input = Tally::new("relevant_loss_below_input_information", DISCRETE_TOLERANCE);
    let mut below_entropy = Tally::new(
        "input_information_below_relevant_entropy",
        DISCRETE_TOLERANCE,
    );
    let mut output_zero = Tally::new("output_relevant_loss_zero", DISCRETE_TOLERANCE);
    let mut below_total = Tally::new("relevant_loss_below_total_loss", DISCRETE_TOLERANCE);
    let mut total_if_determined = Tally::new(
        "relevant_equals_total_when_input_determined",
        DISCRETE_TOLERANCE,
    );
    let mut cond_entropy = Tally::new(
        "relevant_equals_conditional_entropy_when_relevant_determined",
        DISCRETE_TOLERANCE,
    );
    let mut chain = Tally::new("markov_chain_ordering", DISCRETE_TOLERANCE);
    let mut coarsened = Tally::new("coarsened_relevant_ordering", DISCRETE_TOLERANCE);
    let mut coarsened_eq = Tally::new(
        "coarsened_relevant_equality_when_sufficient",
        DISCRETE_TOLERANCE,
    );
    let mut split = Tally::new("relevant_irrelevant_split", DISCRETE_TOLERANCE);
    let mut cascade = Tally::new("cascade_additivity", DISCRETE_TOLERANCE);
    let mut cmi = Tally::new("conditional_information_dense_vs_sparse", 1e-12);

    for _ in 0..instances {
        let (ns, nx, ny, nz) = (
            alphabet_size(&mut rng, 5),
            alphabet_size(&mut rng, 5),
            alphabet_size(&mut rng, 5),
            alphabet_size(&mut rng, 5),
        );
        let joint = random_joint(&mut rng, &["S", "X"], &[ns, nx]);
        let g = random_map(&mut rng, nx, ny);
        let report = loss_report(&joint, &g)?;
        let isx = mutual_information(&joint)?;
        let hs = entropy(&joint.marginal(&[0])?)?;

        nonneg.record(-report.relevant_loss);
        below_input.upper(report.relevant_loss, isx);
        below_entropy.upper(isx, hs);
        below_total.upper(report.relevant_loss, report.total_loss);

        // Y as the relevant variable
        let sxy = joint.with_mapped(1, &g, "Y")?;
        let yx = sxy.marginal(&[2, 1])?;
        output_zero.record(loss_report(&yx, &g)?.relevant_loss.abs());

        // X = f(S)
        let ps = dirichlet(&mut rng, ns);
        let f = random_map(&mut rng, ns, nx);
        let xs_det = JointDistribution::from_fn([("S", ns), ("X", nx)], |i| {
            if f.apply(i[0]) == i[1] {
                ps[i[0]]
            } else {
                0.0
            }
        })?;
        let r = loss_report(&xs_det, &g)?;
        total_if_determined.equal(r.relevant_loss, r.total_loss);

        // S = f(X)
        let px = dirichlet(&mut rng, nx);
        let f = random_map(&mut rng, nx, ns);
        let sx_det = JointDistribution::from_fn([("S", ns), ("X", nx)], |i| {
            if f.apply(i[1]) == i[0] {
                px[i[1]]
            } else {
                0.0
            }
        })?;
        let r = loss_report(&sx_det, &g)?;
        let hs_given_y = conditional_entropy(&sx_det.with_mapped(1, &g, "Y")?, &[0], &[2])?;
        cond_entropy.equal(r.relevant_loss, hs_given_y);

        // V − W − X
        let nw = alphabet_size(&mut rng, 5);
        let vwx = markov_chain(&mut rng, [ns, nw, nx]);
        let loss_w = loss_report(&vwx.marginal(&[1, 2])?, &g)?.relevant_loss;
        let loss_v = loss_report(&vwx.marginal(&[0, 2])?, &g)?.relevant_loss;
        chain.upper(loss_v, loss_w);

        // f(S) versus S
        let nt = alphabet_size(&mut rng, 5);
        let fs = random_map(&mut rng, ns, nt);
        let coarse = push_map(&joint, 0, &fs)?;
        coarsened.upper(
            loss_report(&coarse, &g)?.relevant_loss,
            report.relevant_loss,
        );
        // S − f(S) − X: X depends on S only through f(S)
        let x_given_t = stochastic_matrix(&mut rng, fs.codomain_size(), nx);
        let sufficient = JointDistribution::from_fn([("S", ns), ("X", nx)], |i| {
            ps[i[0]] * x_given_t[fs.apply(i[0])][i[1]]
        })?;
        coarsened_eq.equal(
            loss_report(&sufficient, &g)?.relevant_loss,
            loss_report(&push_map(&sufficient, 0, &fs)?, &g)?.relevant_loss,
        );

        // total from entropies, irrelevant as H(X|Y,S)
        let h_x = sxy.entropy_of(&[1])?;
        let h_y = sxy.entropy_of(&[2])?;
        let h_x_given_ys = sxy.entropy_of(&[0, 1, 2])? - sxy.entropy_of(&[0, 2])?;
        split.equal(h_x - h_y, report.relevant_loss + h_x_given_ys);

        let h = random_map(&mut rng, ny, nz);
        let whole = loss_report(&joint, &g.then(&h)?)?.relevant_loss;
        let second = loss_report(&push_map(&joint, 1, &g)?, &h)?.relevant_loss;
        cascade.equal(whole, report.relevant_loss + second);

        let dense = conditional_mutual_information(&sxy, 0, 1, 2)?;
        let sparse = to_sparse(&sxy).conditional_mutual_information(&[0], &[1], &[2])?;
        cmi.equal(dense, sparse);
    }

    Ok([
        nonneg,
        below_input,
        below_entropy,
        output_zero,
        below_total,
        total_if_determined,
        cond_entropy,
        chain,
        coarsened,
        coarsened_eq,
        split,
        cascade,
        cmi,
    ]
    .into_iter()
    .map(Tally::finish)
    .collect())
}

fn random_dims<R: Rng>(rng: &mut R) -> (usize, usize) {
    let n = rng.random_range(2..=8);
    (n, rng.random_range(1..n))
}

/// Linear-Gaussian PCA loss properties on `models` random models per check,
/// dimension at most eight.
pub fn gaussian_properties(seed: u64, models: usize) -> Result<Vec<CheckOutcome>> {
    let mut rng = seeded(seed);
    let mut vanishing = Tally::new(
        "spherical_noise_low_rank_signal_lossless",
        VANISHING_TOLERANCE,
    );
    let mut nonneg = Tally::new("gaussian_loss_nonnegative", 1e-10);
    let mut iid = Tally::new("loss_below_spherical_noise_bound", GAUSSIAN_TOLERANCE);
    let mut eigen = Tally::new("loss_below_noise_eigenvalue_bound", GAUSSIAN_TOLERANCE);
    let mut interlacing = Tally::new("kept_noise_block_interlacing", GAUSSIAN_TOLERANCE);
    let mut weyl = Tally::new("observation_eigenvalue_weyl_bound", GAUSSIAN_TOLERANCE);
    let mut monotone = Tally::new("loss_nonincreasing_in_kept_dimension", GAUSSIAN_TOLERANCE);
    let mut rotation = Tally::new("loss_rotation_invariant", GAUSSIAN_TOLERANCE);

    for _ in 0..models {
        let (n, m) = random_dims(&mut rng);

        let sigma2 = rng.random_range(0.1..4.0);
        let rank = rng.random_range(1..=m);
        let low_rank = LinearGaussianModel::new(
            random_psd(&mut rng, n, rank),
            DMatrix::identity(n, n) * sigma2,
        )?;
        vanishing.record(gaussian_relevant_loss(&low_rank, m)?.abs());

        let spherical =
            LinearGaussianModel::new(random_psd(&mut rng, n, n), DMatrix::identity(n, n) * sigma2)?;
        iid.upper(
            gaussian_relevant_loss(&spherical, m)?,
            iid_gaussian_bound(&spherical, m)?,
        );

        let colored =
            LinearGaussianModel::new(random_psd(&mut rng, n, rank), random_spd(&mut rng, n, 0.1))?;
        eigen.upper(
            gaussian_relevant_loss(&colored, m)?,
            eigen_bound(&colored, m)?,
        );

        let full =
            LinearGaussianModel::new(random_spd(&mut rng, n, 0.1), random_spd(&mut rng, n, 0.1))?;
        let sp = spectra(&full, m)?;
        interlacing.record(sp.interlacing_violation());
        weyl.record(sp.weyl_violation());

        let losses = (1..n)
            .map(|k| gaussian_relevant_loss(&full, k))
            .collect::<Result<Vec<_>>>()?;
        for l in &losses {
            nonneg.record(-l);
        }
        for w in losses.windows(2) {
            monotone.upper(w[1], w[0]);
        }
        let q = random_orthogonal(&mut rng, n);
        rotation.equal(
            losses[m - 1],
            gaussian_relevant_loss(&full.rotated(&q)?, m)?,
        );
    }

    Ok([
        vanishing,
        nonneg,
        iid,
        eigen,
        interlacing,
        weyl,
        monotone,
        rotation,
    ]
    .into_iter()
    .map(Tally::finish)
    .collect())
}

/// Closed forms of the antipodal channel with uniform noise.
pub fn channel_properties() -> Result<Vec<CheckOutcome>> {
    let mut sign = Tally::new("uniform_noise_sign_detector_closed_form", 1e-9);
    let mut erasure = Tally::new("uniform_noise_erasure_detector_lossless", 1e-9);
    for a in [1.25, 1.5, 2.0, 3.0, 5.0, 10.0] {
        let ch = AdditiveChannel::uniform(a)?;
        let closed = uniform_closed_forms(a)?;
        sign.equal(
            quantizer_relevant_loss(&ch, &Quantizer::sign())?,
            closed.sign_loss,
        );
        let ternary = Quantizer::new(vec![-(a - 1.0), a - 1.0])?;
        erasure.record(quantizer_relevant_loss(&ch, &ternary)?.abs());
    }
    Ok(vec![sign.finish(), erasure.finish()])
}

/// Greedy clustering: monotone trace, budget respected, each committed merge
/// as cheap as any other available merge.
pub fn clustering_properties(seed: u64, instances: usize) -> Result<Vec<CheckOutcome>> {
    let mut rng = seeded(seed);
    let mut monotone = Tally::new("merge_trace_nondecreasing", DISCRETE_TOLERANCE);
    let mut budget = Tally::new("merge_budget_respected", DISCRETE_TOLERANCE);
    let mut greedy = Tally::new("merge_step_is_cheapest", DISCRETE_TOLERANCE);

    for _ in 0..instances {
        let ns = alphabet_size(&mut rng, 4);
        let nx = rng.random_range(2..=6);
        let joint = random_joint(&mut rng, &["S", "X"], &[ns, nx]);
        let isx = mutual_information(&joint)?;
        let c = rng.random_range(0.0..=1.0) * isx;
        let result = agglomerative_enhance(&joint, c)?;
        let final_loss = loss_report(&joint, result.clustering.labels())?.relevant_loss;
        budget.upper(final_loss, c);

        let mut previous = 0.0;
        let mut labels: Vec<usize> = (0..nx).collect();
        for step in &result.trace {
            monotone.upper(previous, step.cumulative);
            let clusters = labels.iter().max().map_or(0, |m| m + 1);
            let mut cheapest = f64::INFINITY;
            for i in 0..clusters {
                for j in (i + 1)..clusters {
                    let merged = merge_labels(&labels, i, j);
                    let map = DeterministicMap::new(merged, clusters - 1)?;
                    cheapest = cheapest.min(loss_report(&joint, &map)?.relevant_loss);
                }
            }
            labels = merge_labels(&labels, step.merged.0, step.merged.1);
            let committed = loss_report(
                &joint,
                &DeterministicMap::new(labels.clone(), clusters - 1)?,
            )?
            .relevant_loss;
            greedy.upper(committed, cheapest);
            previous = step.cumulative;
        }
        let replayed = ClusteringState::new(DeterministicMap::new(
            labels,
            result.clustering.num_clusters(),
        )?)?;
        greedy.equal(
            if replayed == result.clustering {
                0.0
            } else {
                1.0
            },
            0.0,
        );
    }
    Ok(vec![monotone.finish(), budget.finish(), greedy.finish()])
}

/// Labels after merging cluster `j` into `i < j`, ids above `j` shifted down.
fn merge_labels(labels: &[usize], i: usize, j: usize) -> Vec<usize> {
    labels
        .iter()
        .map(|&l| match l {
            l if l == j => i,
            l if l > j => l - 1,
            l => l,
        })
        .collect()
}

/// The whole suite with the instance counts used by the command line.
pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = discrete_properties(seed, 500)?;
    out.extend(gaussian_properties(seed.wrapping_add(1), 100)?);
    out.extend(channel_properties()?);
    out.extend(clustering_properties(seed.wrapping_add(2), 50)?);
    Ok(out)
}
