use std::path::Path;

use anyhow::{bail, Result};
use relinfo::channel::{
    grid_loss_report, input_mutual_information, quantizer_relevant_loss, uniform_closed_forms,
    uniform_table_value, AdditiveChannel, GridMap, NoiseDensity, Quantizer, Relevance,
    CONVERGENCE_TOLERANCE,
};
use relinfo::estimators::{
    conditional_divergence_j_with, knn_entropy, refined_partition_loss, thm1_hypothesis_check,
    SampleSet, SourceFamily, REPLICATES,
};
use relinfo::ib::{agglomerative_enhance, enhancement_objectives, ObjectiveParams};
use relinfo::pca::{
    best_coordinate_subset, eigen_bound, gaussian_relevant_loss, iid_gaussian_bound,
    matrix_from_rows, spectra, LinearGaussianModel, MAX_SUBSET_DIM,
};
use relinfo::selftest;

use crate::config::{AnalysisConfig, ChannelBlock, EstimateBlock, IbBlock, PcaBlock};
use crate::report::{index_list, num, opt_num, Table};

/// A property or hypothesis check failed; maps to the numerical exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure(pub String);

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailure {}

/// Files produced by one run. `failure` is reported after everything is written.
#[derive(Default)]
pub struct Outputs {
    pub tables: Vec<Table>,
    pub samples: Vec<(String, SampleSet)>,
    pub failure: Option<CheckFailure>,
}

impl Outputs {
    fn tables(tables: Vec<Table>) -> Self {
        Outputs {
            tables,
            ..Outputs::default()
        }
    }
}

pub fn run_config(config: &AnalysisConfig, base: &Path) -> Result<Outputs> {
    config.validate()?;
    if let Some(b) = &config.channel {
        return run_channel(b).map(Outputs::tables);
    }
    if let Some(b) = &config.pca {
        return run_pca(b).map(Outputs::tables);
    }
    if let Some(b) = &config.ib {
        return run_ib(b, base).map(Outputs::tables);
    }
    if let Some(b) = &config.estimate {
        return run_estimate(b, config.seed.expect("validated"));
    }
    run_selftest(config.seed.unwrap_or(0))
}

fn is_antipodal_uniform(ch: &AdditiveChannel) -> Option<f64> {
    match ch.noise() {
        NoiseDensity::Uniform { half_width }
            if ch.signal_values() == [-1.0, 1.0] && ch.priors() == [0.5, 0.5] =>
        {
            Some(half_width)
        }
        _ => None,
    }
}

const CHANNEL_HEADER: &[&str] = &[
    "quantity",
    "analytic_value",
    "grid_estimate",
    "resolution",
    "converged",
    "refined_estimate",
    "convergence_tolerance",
];

fn run_channel(b: &ChannelBlock) -> Result<Vec<Table>> {
    let ch = b.channel()?;
    let q = Quantizer::new(b.thresholds.clone())?;
    let mut table = Table::new("report.csv", CHANNEL_HEADER);
    let mut row =
        |quantity: String, analytic: Option<f64>, map: &GridMap, rel: Relevance| -> Result<()> {
            let est = grid_loss_report(&ch, map, b.resolution, rel)?;
            table.push(vec![
                quantity,
                opt_num(analytic),
                num(est.estimate),
                est.resolution.to_string(),
                est.converged.to_string(),
                num(est.refined_estimate),
                num(CONVERGENCE_TOLERANCE),
            ]);
            Ok(())
        };

    // a single-cell quantizer loses everything, so its relevant loss is I(X;S)
    let constant = GridMap::Quantizer {
        thresholds: Quantizer::new(Vec::new())?,
    };
    row(
        "input_information".into(),
        Some(input_mutual_information(&ch)?),
        &constant,
        Relevance::Signal,
    )?;
    row(
        "quantizer:L_S".into(),
        Some(quantizer_relevant_loss(&ch, &q)?),
        &GridMap::Quantizer { thresholds: q },
        Relevance::Signal,
    )?;

    let uniform = is_antipodal_uniform(&ch);
    if b.table.unwrap_or(uniform.is_some()) {
        let closed = uniform.map(uniform_closed_forms).transpose()?;
        for (name, map) in [("sign", GridMap::Sign), ("magnitude", GridMap::Magnitude)] {
            for rel in Relevance::ALL {
                let analytic = closed
                    .as_ref()
                    .and_then(|c| uniform_table_value(c, &map, rel));
                row(format!("{name}:{}", rel.label()), analytic, &map, rel)?;
            }
        }
    }
    Ok(vec![table])
}

/// `Some` on success, `None` when the bound's hypothesis fails.
fn bound(result: relinfo::Result<f64>) -> Result<Option<f64>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(relinfo::Error::Hypothesis(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn run_pca(b: &PcaBlock) -> Result<Vec<Table>> {
    let model = LinearGaussianModel::new(
        matrix_from_rows(&b.signal_cov)?,
        matrix_from_rows(&b.noise_cov)?,
    )?;
    let n = model.dim();
    let kept = b.kept.clone().unwrap_or_else(|| (1..n).collect());
    let rank = model.signal_rank()?;
    let spherical = model.spherical_noise_variance().is_some();

    let mut report = Table::new(
        "report.csv",
        &[
            "M",
            "loss_nats",
            "thm1_bound",
            "thm2_bound",
            "best_subset",
            "best_subset_loss",
            "signal_rank",
            "spherical_noise",
        ],
    );
    for &m in &kept {
        let loss = gaussian_relevant_loss(&model, m)?;
        let thm1 = bound(iid_gaussian_bound(&model, m))?;
        let thm2 = bound(eigen_bound(&model, m))?;
        let (subset, subset_loss) = if n <= MAX_SUBSET_DIM {
            let (s, l) = best_coordinate_subset(&model, m)?;
            (index_list(&s), num(l))
        } else {
            (String::new(), String::new())
        };
        report.push(vec![
            m.to_string(),
            num(loss),
            opt_num(thm1),
            opt_num(thm2),
            subset,
            subset_loss,
            rank.to_string(),
            spherical.to_string(),
        ]);
    }

    let mut eig = Table::new(
        "spectra.csv",
        &["M", "index", "observation", "noise", "signal", "kept_noise"],
    );
    for &m in &kept {
        let sp = spectra(&model, m)?;
        for i in 0..n {
            eig.push(vec![
                m.to_string(),
                i.to_string(),
                num(sp.observation[i]),
                num(sp.noise[i]),
                num(sp.signal[i]),
                sp.kept_noise.get(i).map(|v| num(*v)).unwrap_or_default(),
            ]);
        }
    }
    Ok(vec![report, eig])
}

fn run_ib(b: &IbBlock, base: &Path) -> Result<Vec<Table>> {
    let joint = b.joint.load(base)?;
    let params = ObjectiveParams {
        beta: b.beta,
        gamma: b.gamma,
        alpha: b.alpha,
        budget: b.budget,
    };
    params.validate()?;
    let result = agglomerative_enhance(&joint, b.budget)?;

    let mut clustering = Table::new("clustering.csv", &["x_symbol", "cluster_id"]);
    for x in 0..result.clustering.input_size() {
        clustering.push(vec![
            x.to_string(),
            result.clustering.cluster_of(x).to_string(),
        ]);
    }
    let mut trace = Table::new(
        "trace.csv",
        &[
            "step",
            "merged_a",
            "merged_b",
            "increment",
            "cumulative",
            "budget",
        ],
    );
    for (i, s) in result.trace.iter().enumerate() {
        trace.push(vec![
            (i + 1).to_string(),
            s.merged.0.to_string(),
            s.merged.1.to_string(),
            num(s.increment),
            num(s.cumulative),
            num(b.budget),
        ]);
    }
    let obj = enhancement_objectives(&joint, &result.clustering, &params)?;
    let mut report = Table::new("report.csv", &["quantity", "value"]);
    for (q, v) in [
        ("num_clusters", result.clustering.num_clusters().to_string()),
        ("relevant_loss", num(obj.relevant_loss)),
        ("irrelevant_loss", num(obj.irrelevant_loss)),
        ("ib", num(obj.ib)),
        ("ibsi", num(obj.ibsi)),
        ("delta_p", num(obj.delta_p)),
        ("budget", num(b.budget)),
        ("beta", num(b.beta)),
        ("gamma", num(b.gamma)),
        ("alpha", num(b.alpha)),
    ] {
        report.push(vec![q.to_string(), v]);
    }
    Ok(vec![clustering, trace, report])
}

/// Differential entropy (nats) of one standardized coordinate, when known in closed form.
fn coordinate_entropy(family: &SourceFamily) -> Option<f64> {
    match family {
        SourceFamily::Gaussian => Some(gaussian_coordinate_entropy()),
        SourceFamily::Uniform => Some(0.5 * 12f64.ln()),
        SourceFamily::Laplace => Some(1.0 + 0.5 * 2f64.ln()),
        SourceFamily::GaussianMixture { .. } => None,
    }
}

fn gaussian_coordinate_entropy() -> f64 {
    0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln()
}

const ESTIMATE_HEADER: &[&str] = &["quantity", "value", "reference", "n", "k", "seed"];

fn run_estimate(b: &EstimateBlock, seed: u64) -> Result<Outputs> {
    let mut out = Outputs::default();
    match b {
        EstimateBlock::Entropy {
            source,
            n,
            k,
            dump_samples,
        } => {
            let samples = source.sample(*n, seed)?;
            let h = knn_entropy(&samples, *k)?;
            let reference = coordinate_entropy(&source.family).map(|c| c * source.dim as f64);
            let mut t = Table::new("report.csv", ESTIMATE_HEADER);
            t.push(vec![
                "knn_entropy_nats".into(),
                num(h),
                opt_num(reference),
                n.to_string(),
                k.to_string(),
                seed.to_string(),
            ]);
            out.tables.push(t);
            if *dump_samples {
                out.samples.push(("samples.csv".into(), samples));
            }
        }
        EstimateBlock::Divergence {
            source,
            n,
            x_dims,
            k,
            dump_samples,
        } => {
            let samples = source.sample(*n, seed)?;
            let j = conditional_divergence_j_with(&samples, *x_dims, *k)?;
            // coordinates are independent, so only the leading block contributes
            let reference = coordinate_entropy(&source.family)
                .map(|c| *x_dims as f64 * (gaussian_coordinate_entropy() - c));
            let mut t = Table::new("report.csv", ESTIMATE_HEADER);
            t.push(vec![
                "conditional_divergence_nats".into(),
                num(j),
                opt_num(reference),
                n.to_string(),
                k.to_string(),
                seed.to_string(),
            ]);
            out.tables.push(t);
            if *dump_samples {
                out.samples.push(("samples.csv".into(), samples));
            }
        }
        EstimateBlock::Hypothesis {
            signal_cov,
            noise_cov,
            source,
            noise,
            kept,
            n,
        } => {
            let model = LinearGaussianModel::new(
                matrix_from_rows(signal_cov)?,
                matrix_from_rows(noise_cov)?,
            )?;
            let r = thm1_hypothesis_check(&model, source, noise, *kept, *n, seed)?;
            let mut t = Table::new(
                "report.csv",
                &[
                    "M",
                    "n",
                    "seed",
                    "replicates",
                    "j_noise",
                    "j_output",
                    "std_error",
                    "verdict",
                    "satisfied",
                ],
            );
            t.push(vec![
                kept.to_string(),
                n.to_string(),
                seed.to_string(),
                REPLICATES.to_string(),
                num(r.j_noise),
                num(r.j_output),
                num(r.std_error),
                serde_json::to_value(r.verdict)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
                r.satisfied.to_string(),
            ]);
            out.tables.push(t);
        }
        EstimateBlock::Partition {
            a,
            map,
            resolutions,
            grid_resolution,
        } => {
            let ch = AdditiveChannel::uniform(*a)?;
            let grid = relinfo::channel::ChannelGrid::build(&ch, *grid_resolution)?;
            let seq = refined_partition_loss(&grid.joint_sx()?, &grid.x_map(map)?, resolutions)?;
            let limit = match map {
                GridMap::Quantizer { thresholds } => {
                    Some(quantizer_relevant_loss(&ch, thresholds)?)
                }
                other => uniform_table_value(&uniform_closed_forms(*a)?, other, Relevance::Signal),
            };
            let mut t = Table::new(
                "report.csv",
                &["partitions", "loss_bits", "limit_bits", "grid_resolution"],
            );
            for (k, v) in resolutions.iter().zip(seq) {
                t.push(vec![
                    k.to_string(),
                    num(v),
                    opt_num(limit),
                    grid_resolution.to_string(),
                ]);
            }
            out.tables.push(t);
        }
    }
    Ok(out)
}

fn run_selftest(seed: u64) -> Result<Outputs> {
    let checks = selftest::run_all(seed)?;
    let mut t = Table::new(
        "report.csv",
        &[
            "check",
            "instances",
            "worst_violation",
            "tolerance",
            "passed",
        ],
    );
    for c in &checks {
        t.push(vec![
            c.name.to_string(),
            c.instances.to_string(),
            num(c.worst_violation),
            num(c.tolerance),
            c.passed.to_string(),
        ]);
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    Ok(Outputs {
        tables: vec![t],
        samples: Vec::new(),
        failure: (!failed.is_empty())
            .then(|| CheckFailure(format!("failed checks: {}", failed.join(", ")))),
    })
}

/// Rejects a mode alias that disagrees with the config file.
pub fn check_alias(alias: Option<crate::config::Mode>, config: &AnalysisConfig) -> Result<()> {
    if let Some(m) = alias {
        if m != config.mode {
            bail!(crate::config::ConfigError(format!(
                "command `{}` given for a `{}` config",
                m.name(),
                config.mode.name()
            )));
        }
    }
    Ok(())
}
