use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A total function between finite alphabets `{0..domain} -> {0..codomain}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicMap {
    image: Vec<usize>,
    codomain: usize,
}

impl DeterministicMap {
    pub fn new(image: Vec<usize>, codomain: usize) -> Result<Self> {
        if image.is_empty() {
            return Err(Error::InvalidMap("empty domain".into()));
        }
        if let Some((x, &y)) = image.iter().enumerate().find(|(_, &y)| y >= codomain) {
            return Err(Error::InvalidMap(format!(
                "symbol {x} maps to {y}, codomain has {codomain} symbols"
            )));
        }
        Ok(DeterministicMap { image, codomain })
    }

    /// Codomain taken as `max(image) + 1`.
    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let codomain = image.iter().max().map_or(0, |m| m + 1);
        DeterministicMap::new(image, codomain)
    }

    pub fn identity(n: usize) -> Self {
        DeterministicMap {
            image: (0..n).collect(),
            codomain: n,
        }
    }

    pub fn constant(n: usize) -> Self {
        DeterministicMap {
            image: vec![0; n],
            codomain: 1,
        }
    }

    pub fn domain_size(&self) -> usize {
        self.image.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// `then ∘ self`: apply `self` first.
    pub fn then(&self, then: &DeterministicMap) -> Result<DeterministicMap> {
        if then.domain_size() != self.codomain {
            return Err(Error::MapMismatch {
                map: then.domain_size(),
                alphabet: self.codomain,
            });
        }
        Ok(DeterministicMap {
            image: self.image.iter().map(|&y| then.apply(y)).collect(),
            codomain: then.codomain,
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain];
        self.image
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain];
        for &y in &self.image {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Relabels outputs to `0..k` in order of first appearance, dropping unused symbols.
    pub fn compacted(&self) -> DeterministicMap {
        let mut relabel = vec![usize::MAX; self.codomain];
        let mut next = 0;
        let image = self
            .image
            .iter()
            .map(|&y| {
                if relabel[y] == usize::MAX {
                    relabel[y] = next;
                    next += 1;
                }
                relabel[y]
            })
            .collect();
        DeterministicMap {
            image,
            codomain: next,
        }
    }
}
