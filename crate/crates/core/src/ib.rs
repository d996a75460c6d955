//! Signal enhancement by hard clustering of a discrete observation.
//!
//! A clustering `Y = g(X)` is scored by its relevant loss `L_S = I(X;S|Y)`
//! and irrelevant loss `L_{X|S} = H(X|Y,S)` (bits), combined into the
//! information-bottleneck objectives. The agglomerative procedure merges
//! clusters pairwise, cheapest relevant loss first, while the cumulative
//! relevant loss stays within a budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{loss_report, DeterministicMap, JointDistribution};

/// Increments closer than this are ties, resolved by pair order.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Slack on the relevant-loss budget.
pub const BUDGET_TOLERANCE: f64 = 1e-12;

/// A surjective labeling of the `X` alphabet by cluster ids `0..num_clusters`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DeterministicMap", into = "DeterministicMap")]
pub struct ClusteringState {
    labels: DeterministicMap,
}

impl ClusteringState {
    pub fn new(labels: DeterministicMap) -> Result<Self> {
        if !labels.is_surjective() {
            return Err(Error::InvalidMap("cluster labels must use every id".into()));
        }
        Ok(ClusteringState { labels })
    }

    /// Relabels arbitrary ids to `0..` in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let codomain = labels.iter().max().map_or(0, |m| m + 1);
        Ok(ClusteringState {
            labels: DeterministicMap::new(labels.to_vec(), codomain)?.compacted(),
        })
    }

    pub fn identity(n: usize) -> Self {
        ClusteringState {
            labels: DeterministicMap::identity(n),
        }
    }

    pub fn single(n: usize) -> Self {
        ClusteringState {
            labels: DeterministicMap::constant(n),
        }
    }

    pub fn input_size(&self) -> usize {
        self.labels.domain_size()
    }

    pub fn num_clusters(&self) -> usize {
        self.labels.codomain_size()
    }

    pub fn labels(&self) -> &DeterministicMap {
        &self.labels
    }

    pub fn cluster_of(&self, x: usize) -> usize {
        self.labels.apply(x)
    }
}

impl TryFrom<DeterministicMap> for ClusteringState {
    type Error = Error;

    fn try_from(labels: DeterministicMap) -> Result<Self> {
        ClusteringState::new(labels)
    }
}

impl From<ClusteringState> for DeterministicMap {
    fn from(c: ClusteringState) -> Self {
        c.labels
    }
}

/// Trade-off weights and the relevant-loss budget (bits).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams {
    pub beta: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub budget: f64,
}

impl Default for ObjectiveParams {
    fn default() -> Self {
        ObjectiveParams {
            beta: 1.0,
            gamma: 0.0,
            alpha: 1.0,
            budget: 0.0,
        }
    }
}

impl ObjectiveParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.beta.is_finite()
            && self.beta >= 0.0
            && self.gamma.is_finite()
            && self.gamma >= 0.0
            && self.alpha.is_finite()
            && self.alpha > 0.0
            && self.budget.is_finite()
            && self.budget >= 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "objective parameters out of range: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Losses of a clustering and the three scalarized objectives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    /// `(β−1) L_S − L_{X|S}`, minimized.
    pub ib: f64,
    /// `(β−1) L_S − (βγ+1) L_{X|S}`, minimized.
    pub ibsi: f64,
    /// `L_{X|S} − α L_S`, maximized.
    pub delta_p: f64,
    pub relevant_loss: f64,
    pub irrelevant_loss: f64,
}

pub fn enhancement_objectives(
    joint_sx: &JointDistribution,
    clustering: &ClusteringState,
    params: &ObjectiveParams,
) -> Result<Objectives> {
    params.validate()?;
    let report = loss_report(joint_sx, clustering.labels())?;
    let (ls, lxs) = (report.relevant_loss, report.irrelevant_loss);
    let ObjectiveParams {
        beta, gamma, alpha, ..
    } = *params;
    Ok(Objectives {
        ib: (beta - 1.0) * ls - lxs,
        ibsi: (beta - 1.0) * ls - (beta * gamma + 1.0) * lxs,
        delta_p: lxs - alpha * ls,
        relevant_loss: ls,
        irrelevant_loss: lxs,
    })
}

/// One committed merge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    /// Cluster ids merged, numbered at the time of the merge (smaller first).
    pub merged: (usize, usize),
    /// Relevant loss added by the merge (bits).
    pub increment: f64,
    /// Relevant loss of the clustering after the merge (bits).
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enhancement {
    pub clustering: ClusteringState,
    pub trace: Vec<MergeStep>,
}

impl Enhancement {
    pub fn relevant_loss(&self) -> f64 {
        self.trace.last().map_or(0.0, |s| s.cumulative)
    }
}

struct Cluster {
    members: Vec<usize>,
    /// p(s, cluster) over s
    row: Vec<f64>,
    mass: f64,
}

/// `p(c) H(S|c)` in bits.
fn weighted_entropy(row: &[f64], mass: f64) -> f64 {
    if mass <= 0.0 {
        return 0.0;
    }
    -row.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * (p / mass).log2())
        .sum::<f64>()
}

/// Relevant loss of merging two clusters: `I(S;Y) − I(S;Y')`.
fn merge_cost(a: &Cluster, b: &Cluster) -> f64 {
    let row: Vec<f64> = a.row.iter().zip(&b.row).map(|(x, y)| x + y).collect();
    let cost = weighted_entropy(&row, a.mass + b.mass)
        - weighted_entropy(&a.row, a.mass)
        - weighted_entropy(&b.row, b.mass);
    cost.max(0.0)
}

/// Greedy pairwise merging starting from `Y = X`.
///
/// Each step takes the pair with the smallest relevant-loss increment
/// (lexicographically first among ties) and commits it only if the resulting
/// cumulative relevant loss stays within `budget`; otherwise it stops.
pub fn agglomerative_enhance(joint_sx: &JointDistribution, budget: f64) -> Result<Enhancement> {
    if joint_sx.arity() != 2 {
        return Err(Error::Arity {
            expected: 2,
            found: joint_sx.arity(),
        });
    }
    if budget.is_nan() || budget < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "budget {budget} must be non-negative"
        )));
    }
    let (s_size, x_size) = (joint_sx.sizes()[0], joint_sx.sizes()[1]);
    let mut clusters: Vec<Cluster> = (0..x_size)
        .map(|x| {
            let row: Vec<f64> = (0..s_size).map(|s| joint_sx.prob(&[s, x])).collect();
            Cluster {
                members: vec![x],
                mass: row.iter().sum(),
                row,
            }
        })
        .collect();

    let mut trace = Vec::new();
    let mut cumulative = 0.0;
    while clusters.len() > 1 {
        let mut best: Option<((usize, usize), f64)> = None;
        for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let cost = merge_cost(&clusters[i], &clusters[j]);
                if best.is_none_or(|(_, b)| cost < b - TIE_TOLERANCE) {
                    best = Some(((i, j), cost));
                }
            }
        }
        let ((i, j), cost) = best.expect("at least one pair");
        if cumulative + cost > budget + BUDGET_TOLERANCE {
            break;
        }
        cumulative += cost;
        let absorbed = clusters.remove(j);
        let target = &mut clusters[i];
        target.members.extend(absorbed.members);
        target.members.sort_unstable();
        target
            .row
            .iter_mut()
            .zip(&absorbed.row)
            .for_each(|(a, b)| *a += b);
        target.mass += absorbed.mass;
        trace.push(MergeStep {
            merged: (i, j),
            increment: cost,
            cumulative,
        });
    }

    let mut labels = vec![0; x_size];
    for (id, c) in clusters.iter().enumerate() {
        for &x in &c.members {
            labels[x] = id;
        }
    }
    Ok(Enhancement {
        clustering: ClusteringState::new(DeterministicMap::new(labels, clusters.len())?)?,
        trace,
    })
}
