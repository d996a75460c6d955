use crate::error::{Error, Result};
use crate::info::{loss_report, DeterministicMap, JointDistribution};

/// Equal-mass cell of each `S` symbol at `k` cells: `⌊k F(s⁻)⌋` with `F(s⁻)`
/// the mass strictly below `s`.
pub fn equal_mass_cells(probs: &[f64], k: usize) -> Vec<usize> {
    let mut below = 0.0;
    probs
        .iter()
        .map(|p| {
            let cell = ((k as f64 * below + 1e-9).floor() as usize).min(k - 1);
            below += p;
            cell
        })
        .collect()
}

/// `I(Ŝ;X) − I(Ŝ;Y)` in bits for equal-mass partitions `Ŝ` of variable 0 of
/// `joint_sx` at each resolution, with `Y = g(X)` on variable 1.
///
/// Each resolution must be at least 2 and divide the next, so the partitions
/// are nested and the sequence is non-decreasing.
pub fn refined_partition_loss(
    joint_sx: &JointDistribution,
    g: &DeterministicMap,
    resolutions: &[usize],
) -> Result<Vec<f64>> {
    if joint_sx.arity() != 2 {
        return Err(Error::Arity {
            expected: 2,
            found: joint_sx.arity(),
        });
    }
    let finest = *resolutions
        .last()
        .ok_or_else(|| Error::InvalidParameter("resolution list is empty".into()))?;
    if resolutions[0] < 2 {
        return Err(Error::InvalidParameter(format!(
            "resolution {} is below 2",
            resolutions[0]
        )));
    }
    for w in resolutions.windows(2) {
        if w[1] <= w[0] || w[1] % w[0] != 0 {
            return Err(Error::InvalidParameter(format!(
                "resolution {} does not refine {}",
                w[1], w[0]
            )));
        }
    }
    let x_size = joint_sx.sizes()[1];
    let s_probs = joint_sx.marginal(&[0])?.mass().to_vec();
    let fine = equal_mass_cells(&s_probs, finest);

    resolutions
        .iter()
        .map(|&k| {
            let ratio = finest / k;
            let mut mass = vec![0.0; k * x_size];
            for (s, &f) in fine.iter().enumerate() {
                let cell = f / ratio;
                for x in 0..x_size {
                    mass[cell * x_size + x] += joint_sx.prob(&[s, x]);
                }
            }
            let coarse = JointDistribution::from_weights(
                joint_sx.names().iter().cloned().zip([k, x_size]),
                mass,
            )?;
            Ok(loss_report(&coarse, g)?.relevant_loss)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{AdditiveChannel, ChannelGrid, GridMap};

    #[test]
    fn equal_mass_cells_nest() {
        let probs = vec![0.1, 0.2, 0.3, 0.15, 0.25];
        assert_eq!(equal_mass_cells(&probs, 2), vec![0, 0, 0, 1, 1]);
        assert_eq!(equal_mass_cells(&probs, 4), vec![0, 0, 1, 2, 3]);
        assert_eq!(equal_mass_cells(&[0.5, 0.5], 8), vec![0, 4]);
    }

    #[test]
    fn antipodal_sign_map() {
        let grid = ChannelGrid::build(&AdditiveChannel::uniform(2.0).unwrap(), 512).unwrap();
        let joint = grid.joint_sx().unwrap();
        let g = grid.x_map(&GridMap::Sign).unwrap();
        let seq = refined_partition_loss(&joint, &g, &[2, 4, 8]).unwrap();
        for v in &seq {
            assert!((v - 0.311_278_1).abs() < 0.01, "{seq:?}");
        }
        let constant =
            refined_partition_loss(&joint, &DeterministicMap::constant(grid.x_cells()), &[2, 4])
                .unwrap();
        assert!((constant[1] - 0.5).abs() < 0.01);
        let identity = refined_partition_loss(
            &joint,
            &DeterministicMap::identity(grid.x_cells()),
            &[2, 4, 8],
        )
        .unwrap();
        assert!(identity.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_resolutions() {
        let joint = JointDistribution::from_weights([("s", 2), ("x", 2)], vec![1.0; 4]).unwrap();
        let g = DeterministicMap::identity(2);
        assert!(refined_partition_loss(&joint, &g, &[]).is_err());
        assert!(refined_partition_loss(&joint, &g, &[1, 2]).is_err());
        assert!(refined_partition_loss(&joint, &g, &[4, 6]).is_err());
        assert!(refined_partition_loss(&joint, &g, &[4, 4]).is_err());
    }
}
