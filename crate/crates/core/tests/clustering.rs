use rand::Rng;
use relinfo::ib::{
    agglomerative_enhance, enhancement_objectives, ClusteringState, ObjectiveParams,
};
use relinfo::info::JointDistribution;
use relinfo::random::{alphabet_size, random_joint, seeded};

/// All set partitions of `0..n` as restricted-growth label vectors.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut labels = vec![0; n];
    fn grow(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == labels.len() {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            grow(i + 1, max.max(l), labels, out);
        }
    }
    if n > 0 {
        grow(1, 0, &mut labels, &mut out);
    }
    out
}

fn h(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Raw entropies `(H(S), H(X), H(S,X), H(Y), H(S,Y))` for `Y = labels(X)`.
fn raw_entropies(joint: &JointDistribution, labels: &[usize]) -> [f64; 5] {
    let (ns, nx) = (joint.sizes()[0], joint.sizes()[1]);
    let ny = labels.iter().max().unwrap() + 1;
    let m = joint.mass();
    let ps = (0..ns).map(|s| (0..nx).map(|x| m[s * nx + x]).sum::<f64>());
    let px = (0..nx).map(|x| (0..ns).map(|s| m[s * nx + x]).sum::<f64>());
    let mut psy = vec![0.0; ns * ny];
    for s in 0..ns {
        for x in 0..nx {
            psy[s * ny + labels[x]] += m[s * nx + x];
        }
    }
    let py: Vec<f64> = (0..ny)
        .map(|y| (0..ns).map(|s| psy[s * ny + y]).sum())
        .collect();
    [
        h(ps),
        h(px),
        h(m.iter().copied()),
        h(py),
        h(psy.iter().copied()),
    ]
}

#[test]
fn partition_enumeration_counts() {
    let bell = [1, 1, 2, 5, 15, 52];
    for (n, &b) in bell.iter().enumerate().skip(1) {
        assert_eq!(set_partitions(n).len(), b);
    }
}

#[test]
fn objectives_match_raw_entropies() {
    let joint = JointDistribution::from_weights(
        [("S", 3), ("X", 4)],
        vec![
            0.12, 0.05, 0.08, 0.10, 0.02, 0.15, 0.07, 0.03, 0.09, 0.04, 0.11, 0.14,
        ],
    )
    .unwrap();
    let clustering = ClusteringState::from_labels(&[0, 1, 1, 0]).unwrap();
    let params = ObjectiveParams {
        beta: 2.0,
        gamma: 1.0,
        alpha: 1.0,
        budget: 0.0,
    };
    let got = enhancement_objectives(&joint, &clustering, &params).unwrap();

    let [hs, hx, hsx, hy, hsy] = raw_entropies(&joint, &[0, 1, 1, 0]);
    // H(X|Y) = H(X) − H(Y) and H(X|Y,S) = H(S,X) − H(S,Y) since Y is a function of X.
    let total = hx - hy;
    let irrelevant = hsx - hsy;
    let relevant = (hs + hx - hsx) - (hs + hy - hsy);
    assert!((total - relevant - irrelevant).abs() < 1e-12);
    assert!((got.relevant_loss - relevant).abs() < 1e-12);
    assert!((got.irrelevant_loss - irrelevant).abs() < 1e-12);
    assert!((got.ib - (relevant - irrelevant)).abs() < 1e-12);
    assert!((got.ibsi - (relevant - 3.0 * irrelevant)).abs() < 1e-12);
    assert!((got.delta_p - (irrelevant - relevant)).abs() < 1e-12);
}

#[test]
fn single_cluster_minimizes_ib_below_unit_beta() {
    let mut rng = seeded(41);
    for _ in 0..40 {
        let ns = alphabet_size(&mut rng, 4);
        let nx = rng.random_range(2..=5);
        let joint = random_joint(&mut rng, &["S", "X"], &[ns, nx]);
        let params = ObjectiveParams {
            beta: rng.random_range(0.0..1.0),
            ..ObjectiveParams::default()
        };
        let single = enhancement_objectives(&joint, &ClusteringState::single(nx), &params)
            .unwrap()
            .ib;
        for labels in set_partitions(nx) {
            let c = ClusteringState::from_labels(&labels).unwrap();
            let ib = enhancement_objectives(&joint, &c, &params).unwrap().ib;
            assert!(single <= ib + 1e-12, "{labels:?}: {ib} < {single}");
        }
    }
}

#[test]
fn delta_p_identity_on_every_clustering() {
    let mut rng = seeded(42);
    let joint = random_joint(&mut rng, &["S", "X"], &[3, 5]);
    let params = ObjectiveParams {
        alpha: 0.7,
        ..ObjectiveParams::default()
    };
    let identity = enhancement_objectives(&joint, &ClusteringState::identity(5), &params).unwrap();
    assert!(identity.delta_p.abs() < 1e-12);
    for labels in set_partitions(5) {
        let c = ClusteringState::from_labels(&labels).unwrap();
        let o = enhancement_objectives(&joint, &c, &params).unwrap();
        let [_, hx, hsx, hy, hsy] = raw_entropies(&joint, &labels);
        let irrelevant = hsx - hsy;
        let relevant = (hx - hy) - irrelevant;
        assert!((o.delta_p - (irrelevant - 0.7 * relevant)).abs() < 1e-12);
    }
}

#[test]
fn unbounded_budget_steps_are_cheapest() {
    let mut rng = seeded(43);
    for _ in 0..30 {
        let ns = alphabet_size(&mut rng, 4);
        let nx = rng.random_range(2..=6);
        let joint = random_joint(&mut rng, &["S", "X"], &[ns, nx]);
        let result = agglomerative_enhance(&joint, f64::INFINITY).unwrap();
        assert_eq!(result.clustering.num_clusters(), 1);
        assert_eq!(result.trace.len(), nx - 1);

        let loss = |labels: &[usize]| {
            let [hs, hx, hsx, hy, hsy] = raw_entropies(&joint, labels);
            (hs + hx - hsx) - (hs + hy - hsy)
        };
        let mut labels: Vec<usize> = (0..nx).collect();
        let mut previous = 0.0;
        for step in &result.trace {
            let k = labels.iter().max().unwrap() + 1;
            let best = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .map(|(i, j)| loss(&merge(&labels, i, j)) - loss(&labels))
                .fold(f64::INFINITY, f64::min);
            assert!((step.increment - best).abs() < 1e-9);
            assert!(step.cumulative + 1e-9 >= previous);
            labels = merge(&labels, step.merged.0, step.merged.1);
            assert!((step.cumulative - loss(&labels)).abs() < 1e-9);
            previous = step.cumulative;
        }
    }
}

fn merge(labels: &[usize], i: usize, j: usize) -> Vec<usize> {
    labels
        .iter()
        .map(|&l| match l {
            l if l == j => i,
            l if l > j => l - 1,
            l => l,
        })
        .collect()
}
