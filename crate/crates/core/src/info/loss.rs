use serde::{Deserialize, Serialize};

use super::measures::{conditional_entropy, conditional_mutual_information};
use super::{DeterministicMap, JointDistribution};
use crate::error::{Error, Result};

/// Tolerance for identities among exactly computed quantities.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Information lost by a deterministic map, split by relevance (bits).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    /// H(X|Y)
    pub total_loss: f64,
    /// I(X;S|Y)
    pub relevant_loss: f64,
    /// H(X|Y,S)
    pub irrelevant_loss: f64,
}

impl LossReport {
    /// |total − relevant − irrelevant|.
    pub fn split_residual(&self) -> f64 {
        (self.total_loss - self.relevant_loss - self.irrelevant_loss).abs()
    }
}

/// Loss of `Y = g(X)` for a joint over `(S, X)` (variable 0 is S, variable 1 is X).
///
/// The irrelevant part is evaluated as H(X|Y,S) and checked against
/// `total − relevant`; a mismatch beyond [`IDENTITY_TOLERANCE`] is an error.
pub fn loss_report(joint_sx: &JointDistribution, g: &DeterministicMap) -> Result<LossReport> {
    if joint_sx.arity() != 2 {
        return Err(Error::Arity {
            expected: 2,
            found: joint_sx.arity(),
        });
    }
    let sxy = joint_sx.with_mapped(1, g, "Y")?;
    let (s, x, y) = (0, 1, 2);
    let total_loss = conditional_entropy(&sxy, &[x], &[y])?;
    let relevant_loss = conditional_mutual_information(&sxy, x, s, y)?;
    let irrelevant_loss = conditional_entropy(&sxy, &[x], &[y, s])?;
    let report = LossReport {
        total_loss,
        relevant_loss,
        irrelevant_loss,
    };
    if report.split_residual() > IDENTITY_TOLERANCE {
        return Err(Error::CrossCheck(format!(
            "total {total_loss} != relevant {relevant_loss} + irrelevant {irrelevant_loss}"
        )));
    }
    Ok(report)
}

/// Replaces variable `var` by `g(var)`, summing mass over preimages.
pub fn push_map(
    joint: &JointDistribution,
    var: usize,
    g: &DeterministicMap,
) -> Result<JointDistribution> {
    joint.check_vars(&[var])?;
    if g.domain_size() != joint.sizes()[var] {
        return Err(Error::MapMismatch {
            map: g.domain_size(),
            alphabet: joint.sizes()[var],
        });
    }
    let mut sizes = joint.sizes().to_vec();
    sizes[var] = g.codomain_size();
    let mut mass = vec![0.0; sizes.iter().product()];
    joint.for_each_cell(|idx, p| {
        let flat = idx.iter().enumerate().fold(0, |acc, (v, &i)| {
            let i = if v == var { g.apply(i) } else { i };
            acc * sizes[v] + i
        });
        mass[flat] += p;
    });
    Ok(JointDistribution::from_parts_unchecked(
        joint.names().to_vec(),
        sizes,
        mass,
    ))
}
