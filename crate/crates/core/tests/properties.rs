use nalgebra::DMatrix;
use proptest::prelude::*;

use relinfo::estimators::{knn_entropy, SampleSet};
use relinfo::ib::agglomerative_enhance;
use relinfo::info::{
    conditional_entropy, loss_report, mutual_information, push_map, DeterministicMap,
    JointDistribution,
};
use relinfo::pca::{gaussian_relevant_loss, LinearGaussianModel};
use relinfo::random::{random_orthogonal, random_psd, random_spd, seeded};

const TOL: f64 = 1e-9;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// A joint over `(S, X)` with strictly positive weights on some cells.
fn joint_sx() -> impl Strategy<Value = JointDistribution> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(ns, nx)| {
            (
                Just((ns, nx)),
                prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], ns * nx),
            )
        })
        .prop_filter("some mass", |(_, w)| w.iter().any(|&v| v > 0.0))
        .prop_map(|((ns, nx), w)| {
            JointDistribution::from_weights([("S", ns), ("X", nx)], w).unwrap()
        })
}

/// A joint with a map on X into at most `nx` symbols.
fn joint_and_map() -> impl Strategy<Value = (JointDistribution, DeterministicMap)> {
    joint_sx().prop_flat_map(|j| {
        let nx = j.sizes()[1];
        let image = prop::collection::vec(0..nx, nx);
        (Just(j), image).prop_map(|(j, image)| (j, DeterministicMap::from_image(image).unwrap()))
    })
}

fn joint_and_two_maps(
) -> impl Strategy<Value = (JointDistribution, DeterministicMap, DeterministicMap)> {
    joint_and_map().prop_flat_map(|(j, g)| {
        let ny = g.codomain_size();
        let image = prop::collection::vec(0..ny, ny);
        (Just(j), Just(g), image)
            .prop_map(|(j, g, image)| (j, g, DeterministicMap::from_image(image).unwrap()))
    })
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn relevant_loss_is_bounded((joint, g) in joint_and_map()) {
        let r = loss_report(&joint, &g).unwrap();
        let isx = mutual_information(&joint).unwrap();
        prop_assert!(r.relevant_loss >= -1e-12);
        prop_assert!(r.relevant_loss <= isx + TOL);
        prop_assert!(r.relevant_loss <= r.total_loss + TOL);
        prop_assert!(r.split_residual() <= TOL);
    }

    #[test]
    fn cascade_losses_add((joint, g, h) in joint_and_two_maps()) {
        let first = loss_report(&joint, &g).unwrap();
        let intermediate = push_map(&joint, 1, &g).unwrap();
        let second = loss_report(&intermediate, &h).unwrap();
        let whole = loss_report(&joint, &g.then(&h).unwrap()).unwrap();
        prop_assert!((whole.relevant_loss - first.relevant_loss - second.relevant_loss).abs() <= TOL);
        prop_assert!((whole.total_loss - first.total_loss - second.total_loss).abs() <= TOL);
    }

    #[test]
    fn relabeling_output_changes_nothing((joint, g) in joint_and_map(), shift in 0usize..5) {
        let k = g.codomain_size();
        let perm: Vec<usize> = (0..k).map(|y| (y + shift) % k).collect();
        let relabeled = g.then(&DeterministicMap::new(perm, k).unwrap()).unwrap();
        let a = loss_report(&joint, &g).unwrap();
        let b = loss_report(&joint, &relabeled).unwrap();
        prop_assert!((a.relevant_loss - b.relevant_loss).abs() <= 1e-12);
        prop_assert!((a.total_loss - b.total_loss).abs() <= 1e-12);
    }

    #[test]
    fn total_loss_is_conditional_entropy((joint, g) in joint_and_map()) {
        let sxy = joint.with_mapped(1, &g, "Y").unwrap();
        let h = conditional_entropy(&sxy, &[1], &[2]).unwrap();
        prop_assert!((loss_report(&joint, &g).unwrap().total_loss - h).abs() <= 1e-12);
    }

    #[test]
    fn joint_json_round_trip(joint in joint_sx()) {
        let text = serde_json::to_string(&joint).unwrap();
        let back: JointDistribution = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, joint);
    }

    #[test]
    fn greedy_trace_respects_budget(joint in joint_sx(), fraction in 0.0f64..=1.0) {
        let budget = fraction * mutual_information(&joint).unwrap().max(0.0);
        let result = agglomerative_enhance(&joint, budget).unwrap();
        let mut previous = 0.0;
        for step in &result.trace {
            prop_assert!(step.increment >= 0.0);
            prop_assert!(step.cumulative + TOL >= previous);
            previous = step.cumulative;
        }
        let final_loss = loss_report(&joint, result.clustering.labels()).unwrap().relevant_loss;
        prop_assert!(final_loss <= budget + TOL);
        prop_assert!((final_loss - result.relevant_loss()).abs() <= TOL);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn gaussian_loss_rotation_invariant(seed in any::<u64>(), n in 2usize..=6, m_frac in 0.0f64..1.0) {
        let mut rng = seeded(seed);
        let m = 1 + ((n - 1) as f64 * m_frac) as usize;
        let model = LinearGaussianModel::new(random_psd(&mut rng, n, n), random_spd(&mut rng, n, 0.1)).unwrap();
        let q = random_orthogonal(&mut rng, n);
        let loss = gaussian_relevant_loss(&model, m).unwrap();
        let rotated = gaussian_relevant_loss(&model.rotated(&q).unwrap(), m).unwrap();
        prop_assert!(loss >= -1e-10);
        prop_assert!((loss - rotated).abs() <= 1e-8 * loss.abs().max(1.0));
    }

    #[test]
    fn knn_entropy_translation_and_scaling(seed in any::<u64>(), shift in -50.0f64..50.0, scale in 0.1f64..10.0) {
        let mut rng = seeded(seed);
        let raw = relinfo::random::gaussian_matrix(&mut rng, 300, 2);
        let points: Vec<Vec<f64>> = raw.row_iter().map(|r| r.iter().copied().collect()).collect();
        let base = SampleSet::from_points(&points, seed).unwrap();
        let h = knn_entropy(&base, 4).unwrap();

        let moved = base.affine(&DMatrix::identity(2, 2), &[shift, -shift]).unwrap();
        prop_assert!((knn_entropy(&moved, 4).unwrap() - h).abs() <= 1e-9);
        let scaled = base.affine(&(DMatrix::identity(2, 2) * scale), &[0.0, 0.0]).unwrap();
        prop_assert!((knn_entropy(&scaled, 4).unwrap() - h - 2.0 * scale.ln()).abs() <= 1e-9);
        prop_assert_eq!(knn_entropy(&base, 4).unwrap(), h);
    }
}
