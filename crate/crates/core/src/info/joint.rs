use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finite joint probability tensor over named discrete variables.
///
/// Mass is stored row-major: the last variable varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointDocument", into = "JointDocument")]
pub struct JointDistribution {
    names: Vec<String>,
    sizes: Vec<usize>,
    mass: Vec<f64>,
}

/// A variable descriptor as it appears in the JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub size: usize,
}

/// On-disk layout: `{"variables": [{"name", "size"}...], "mass": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointDocument {
    variables: Vec<VariableSpec>,
    mass: Vec<f64>,
}

impl TryFrom<JointDocument> for JointDistribution {
    type Error = Error;

    fn try_from(doc: JointDocument) -> Result<Self> {
        let (names, sizes) = doc.variables.into_iter().map(|v| (v.name, v.size)).unzip();
        JointDistribution::new(names, sizes, doc.mass)
    }
}

impl From<JointDistribution> for JointDocument {
    fn from(joint: JointDistribution) -> Self {
        JointDocument {
            variables: joint
                .names
                .into_iter()
                .zip(joint.sizes)
                .map(|(name, size)| VariableSpec { name, size })
                .collect(),
            mass: joint.mass,
        }
    }
}

impl JointDistribution {
    /// Validates and wraps a mass tensor.
    pub fn new(names: Vec<String>, sizes: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        if names.len() != sizes.len() {
            return Err(Error::Shape(format!(
                "{} names for {} alphabet sizes",
                names.len(),
                sizes.len()
            )));
        }
        if names.is_empty() {
            return Err(Error::Shape("at least one variable is required".into()));
        }
        if let Some(pos) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Shape(format!(
                "variable {} has an empty alphabet",
                names[pos]
            )));
        }
        let cells: usize = sizes.iter().product();
        if cells != mass.len() {
            return Err(Error::Shape(format!(
                "alphabet sizes {:?} need {} cells, got {}",
                sizes,
                cells,
                mass.len()
            )));
        }
        if let Some(&bad) = mass.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidMass(format!(
                "entry {bad} is negative or not finite"
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMass(format!("entries sum to {total}")));
        }
        Ok(JointDistribution { names, sizes, mass })
    }

    /// Builds a distribution from nonnegative weights, normalizing them.
    pub fn from_weights<S: Into<String>>(
        variables: impl IntoIterator<Item = (S, usize)>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let (names, sizes): (Vec<String>, Vec<usize>) =
            variables.into_iter().map(|(n, s)| (n.into(), s)).unzip();
        if let Some(&bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidMass(format!(
                "weight {bad} is negative or not finite"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidMass("weights sum to zero".into()));
        }
        let mass = weights.iter().map(|w| w / total).collect();
        JointDistribution::new(names, sizes, mass)
    }

    /// Builds a distribution by evaluating `weight` on every joint outcome.
    pub fn from_fn<S: Into<String>>(
        variables: impl IntoIterator<Item = (S, usize)>,
        mut weight: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self> {
        let (names, sizes): (Vec<String>, Vec<usize>) =
            variables.into_iter().map(|(n, s)| (n.into(), s)).unzip();
        let cells = sizes.iter().product();
        let mut weights = Vec::with_capacity(cells);
        for_each_index(&sizes, |idx| weights.push(weight(idx)));
        JointDistribution::from_weights(names.into_iter().zip(sizes), weights)
    }

    /// Single-variable distribution from a probability vector.
    pub fn univariate(name: impl Into<String>, probs: Vec<f64>) -> Result<Self> {
        let n = probs.len();
        JointDistribution::new(vec![name.into()], vec![n], probs)
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Probability of one joint outcome.
    pub fn prob(&self, index: &[usize]) -> f64 {
        self.mass[self.flat_index(index)]
    }

    fn flat_index(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.sizes.len());
        index
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&i, &s)| acc * s + i)
    }

    /// Visits every outcome in row-major order with its probability.
    pub fn for_each_cell(&self, mut visit: impl FnMut(&[usize], f64)) {
        let mut flat = 0;
        for_each_index(&self.sizes, |idx| {
            visit(idx, self.mass[flat]);
            flat += 1;
        });
    }

    /// Marginal over `keep`, with variables in the given order.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointDistribution> {
        self.check_vars(keep)?;
        if keep.is_empty() {
            return Err(Error::Shape("marginal needs at least one variable".into()));
        }
        let out_sizes: Vec<usize> = keep.iter().map(|&v| self.sizes[v]).collect();
        let mass = self.marginal_mass(keep);
        Ok(JointDistribution {
            names: keep.iter().map(|&v| self.names[v].clone()).collect(),
            sizes: out_sizes,
            mass,
        })
    }

    fn marginal_mass(&self, keep: &[usize]) -> Vec<f64> {
        let out_len: usize = keep.iter().map(|&v| self.sizes[v]).product();
        let mut out = vec![0.0; out_len];
        self.for_each_cell(|idx, p| {
            let flat = keep.iter().fold(0, |acc, &v| acc * self.sizes[v] + idx[v]);
            out[flat] += p;
        });
        out
    }

    /// Shannon entropy (bits) of the marginal over `vars`; zero for no variables.
    pub fn entropy_of(&self, vars: &[usize]) -> Result<f64> {
        self.check_vars(vars)?;
        if vars.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_bits(&self.marginal_mass(vars)))
    }

    /// Appends a variable `name = g(var)`.
    pub fn with_mapped(
        &self,
        var: usize,
        g: &super::DeterministicMap,
        name: impl Into<String>,
    ) -> Result<JointDistribution> {
        self.check_vars(&[var])?;
        if g.domain_size() != self.sizes[var] {
            return Err(Error::MapMismatch {
                map: g.domain_size(),
                alphabet: self.sizes[var],
            });
        }
        let ny = g.codomain_size();
        let mut mass = vec![0.0; self.mass.len() * ny];
        let mut flat = 0;
        self.for_each_cell(|idx, p| {
            mass[flat * ny + g.apply(idx[var])] = p;
            flat += 1;
        });
        let mut names = self.names.clone();
        names.push(name.into());
        let mut sizes = self.sizes.clone();
        sizes.push(ny);
        Ok(JointDistribution { names, sizes, mass })
    }

    /// Reorders variables.
    pub fn permuted(&self, order: &[usize]) -> Result<JointDistribution> {
        if order.len() != self.arity() {
            return Err(Error::Shape(format!(
                "permutation of length {} for {} variables",
                order.len(),
                self.arity()
            )));
        }
        self.marginal(order)
    }

    pub fn renamed<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() != self.arity() {
            return Err(Error::Shape(format!(
                "{} names for {} variables",
                names.len(),
                self.arity()
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub(crate) fn check_vars(&self, vars: &[usize]) -> Result<()> {
        for (i, &v) in vars.iter().enumerate() {
            if v >= self.arity() {
                return Err(Error::Shape(format!(
                    "variable index {v} out of range for {} variables",
                    self.arity()
                )));
            }
            if vars[..i].contains(&v) {
                return Err(Error::Shape(format!("variable index {v} repeated")));
            }
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(
        names: Vec<String>,
        sizes: Vec<usize>,
        mass: Vec<f64>,
    ) -> JointDistribution {
        JointDistribution { names, sizes, mass }
    }
}

/// Odometer over a mixed-radix index space, last digit fastest.
pub(crate) fn for_each_index(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; sizes.len()];
    loop {
        visit(&idx);
        let mut d = sizes.len();
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < sizes[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// −Σ p log₂ p with 0 log 0 = 0.
pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}
