//! Shannon measures on finite distributions, in bits.

use std::f64::consts::LN_2;

use super::joint::entropy_bits;
use super::JointDistribution;
use crate::error::{Error, Result};

pub fn bits_to_nats(bits: f64) -> f64 {
    bits * LN_2
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}

fn expect_arity(dist: &JointDistribution, expected: usize) -> Result<()> {
    if dist.arity() != expected {
        return Err(Error::Arity {
            expected,
            found: dist.arity(),
        });
    }
    Ok(())
}

/// Entropy of a single-variable distribution.
pub fn entropy(dist: &JointDistribution) -> Result<f64> {
    expect_arity(dist, 1)?;
    Ok(entropy_bits(dist.mass()))
}

/// H₂(p) = −p log₂ p − (1−p) log₂(1−p).
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(entropy_bits(&[p, 1.0 - p]))
}

/// I(A;B) for a two-variable joint.
pub fn mutual_information(joint: &JointDistribution) -> Result<f64> {
    expect_arity(joint, 2)?;
    let h = |v: &[usize]| joint.entropy_of(v);
    Ok(h(&[0])? + h(&[1])? - h(&[0, 1])?)
}

/// I(A;B|C) for a three-variable joint; `a`, `b`, `given` index its variables.
pub fn conditional_mutual_information(
    joint: &JointDistribution,
    a: usize,
    b: usize,
    given: usize,
) -> Result<f64> {
    expect_arity(joint, 3)?;
    joint.check_vars(&[a, b, given])?;
    let h = |v: &[usize]| joint.entropy_of(v);
    Ok(h(&[a, given])? + h(&[b, given])? - h(&[a, b, given])? - h(&[given])?)
}

/// H(of | given) on any joint.
pub fn conditional_entropy(
    joint: &JointDistribution,
    of: &[usize],
    given: &[usize],
) -> Result<f64> {
    let all: Vec<usize> = of.iter().chain(given).copied().collect();
    Ok(joint.entropy_of(&all)? - joint.entropy_of(given)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        let uniform = JointDistribution::univariate("X", vec![0.25; 4]).unwrap();
        assert!(close(entropy(&uniform).unwrap(), 2.0, 1e-15));
        let point = JointDistribution::univariate("X", vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(entropy(&point).unwrap(), 0.0);
        let skew = JointDistribution::univariate("X", vec![0.5, 0.25, 0.25]).unwrap();
        assert!(close(entropy(&skew).unwrap(), 1.5, 1e-15));
    }

    #[test]
    fn entropy_rejects_joint() {
        let joint = JointDistribution::from_weights([("A", 2), ("B", 2)], vec![1.; 4]).unwrap();
        assert_eq!(
            entropy(&joint).unwrap_err(),
            Error::Arity {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(close(
            binary_entropy(0.25).unwrap(),
            0.8112781244591328,
            1e-12
        ));
        assert!(close(
            binary_entropy(0.3).unwrap(),
            binary_entropy(0.7).unwrap(),
            1e-15
        ));
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.0 + 1e-9).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let product = JointDistribution::from_fn([("A", 2), ("B", 3)], |i| {
            [0.3, 0.7][i[0]] * [0.2, 0.5, 0.3][i[1]]
        })
        .unwrap();
        assert!(mutual_information(&product).unwrap().abs() < 1e-12);

        let identity =
            JointDistribution::from_fn([("A", 2), ("B", 2)], |i| f64::from(i[0] == i[1]))
                .unwrap();
        assert!(close(mutual_information(&identity).unwrap(), 1.0, 1e-15));

        let bsc = JointDistribution::from_fn([("S", 2), ("Y", 2)], |i| {
            0.5 * if i[0] == i[1] { 0.75 } else { 0.25 }
        })
        .unwrap();
        let expected = 1.0 - binary_entropy(0.25).unwrap();
        assert!(close(mutual_information(&bsc).unwrap(), expected, 1e-15));
        assert!(close(expected, 0.1887218755408672, 1e-12));
    }

    #[test]
    fn cmi_edge_cases() {
        // C is a copy of B
        let copy = JointDistribution::from_fn([("A", 2), ("B", 3), ("C", 3)], |i| {
            if i[1] == i[2] {
                [[0.1, 0.2, 0.05], [0.3, 0.15, 0.2]][i[0]][i[1]]
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(
            conditional_mutual_information(&copy, 0, 1, 2)
                .unwrap()
                .abs()
                < 1e-14
        );

        // constant C
        let ab = [[0.1, 0.2, 0.05], [0.3, 0.15, 0.2]];
        let vacuous =
            JointDistribution::from_fn([("A", 2), ("B", 3), ("C", 1)], |i| ab[i[0]][i[1]]).unwrap();
        let plain = JointDistribution::from_fn([("A", 2), ("B", 3)], |i| ab[i[0]][i[1]]).unwrap();
        assert!(close(
            conditional_mutual_information(&vacuous, 0, 1, 2).unwrap(),
            mutual_information(&plain).unwrap(),
            1e-14
        ));
        assert!(conditional_mutual_information(&plain, 0, 1, 0).is_err());
        assert!(conditional_mutual_information(&vacuous, 0, 0, 2).is_err());
    }

    #[test]
    fn unit_conversion() {
        assert!(close(bits_to_nats(1.0), LN_2, 0.0));
        assert!(close(nats_to_bits(bits_to_nats(0.37)), 0.37, 1e-16));
    }
}
