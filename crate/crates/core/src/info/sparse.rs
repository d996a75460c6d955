//! Sparse joint distributions for large but mostly empty outcome spaces.
//!
//! Grid discretizations of continuous channels produce a few thousand
//! populated cells inside product spaces with billions of outcomes; this type
//! stores only the populated cells and evaluates marginal entropies by sorting.

use super::joint::entropy_bits;
use crate::error::{Error, Result};

/// A list of `(outcome, mass)` cells over `arity` discrete variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseJoint {
    arity: usize,
    keys: Vec<u64>,
    mass: Vec<f64>,
}

impl SparseJoint {
    pub fn new(arity: usize) -> Self {
        SparseJoint {
            arity,
            keys: Vec::new(),
            mass: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Adds mass to an outcome. Repeated outcomes are merged when marginalizing.
    pub fn push(&mut self, outcome: &[u64], mass: f64) {
        debug_assert_eq!(outcome.len(), self.arity);
        if mass > 0.0 {
            self.keys.extend_from_slice(outcome);
            self.mass.push(mass);
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Rescales the cells to unit total mass.
    pub fn normalize(&mut self) -> Result<()> {
        let total = self.total_mass();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidMass(format!("total mass {total}")));
        }
        self.mass.iter_mut().for_each(|m| *m /= total);
        Ok(())
    }

    /// Entropy (bits) of the marginal over `vars`.
    ///
    /// Cells are merged after a stable sort on the projected key, so the
    /// summation order, and hence the result, is independent of insertion
    /// order of distinct outcomes.
    pub fn entropy_of(&self, vars: &[usize]) -> Result<f64> {
        if let Some(&v) = vars.iter().find(|&&v| v >= self.arity) {
            return Err(Error::Shape(format!(
                "variable index {v} out of range for {} variables",
                self.arity
            )));
        }
        if vars.is_empty() {
            return Ok(0.0);
        }
        let mut projected: Vec<(Vec<u64>, f64)> = self
            .mass
            .iter()
            .enumerate()
            .map(|(c, &m)| {
                let key = &self.keys[c * self.arity..(c + 1) * self.arity];
                (vars.iter().map(|&v| key[v]).collect(), m)
            })
            .collect();
        projected.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged = Vec::with_capacity(projected.len());
        let mut iter = projected.into_iter();
        if let Some((mut key, mut acc)) = iter.next() {
            for (k, m) in iter {
                if k == key {
                    acc += m;
                } else {
                    merged.push(acc);
                    key = k;
                    acc = m;
                }
            }
            merged.push(acc);
        }
        Ok(entropy_bits(&merged))
    }

    /// H(of | given).
    pub fn conditional_entropy(&self, of: &[usize], given: &[usize]) -> Result<f64> {
        let all: Vec<usize> = of.iter().chain(given).copied().collect();
        Ok(self.entropy_of(&all)? - self.entropy_of(given)?)
    }

    /// I(A;B|C) for variable sets.
    pub fn conditional_mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        given: &[usize],
    ) -> Result<f64> {
        let join =
            |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
        let abc = join(&join(a, b), given);
        Ok(
            self.entropy_of(&join(a, given))? + self.entropy_of(&join(b, given))?
                - self.entropy_of(&abc)?
                - self.entropy_of(given)?,
        )
    }
}
