use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{Rational, RationalMatrix};
use crate::error::{Error, Result};

/// Bijection on {0, .., size-1}. Serialized with 1-based images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationMap {
    images: Vec<usize>,
}

impl PermutationMap {
    pub fn identity(size: usize) -> Self {
        PermutationMap { images: (0..size).collect() }
    }

    /// Builds a permutation from 0-based images.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::DimensionMismatch(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(PermutationMap { images })
    }

    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::DimensionMismatch("1-based images cannot contain 0".into()));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.size()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        PermutationMap { images: inv }
    }

    /// (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &PermutationMap) -> Result<Self> {
        if self.size() != other.size() {
            return Err(Error::DimensionMismatch("composing permutations of different size".into()));
        }
        Ok(PermutationMap { images: other.images.iter().map(|&i| self.images[i]).collect() })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_involution(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| self.images[j] == i)
    }

    /// Matrix whose column j is the unit vector at self(j).
    pub fn to_matrix(&self) -> RationalMatrix {
        let n = self.size();
        let mut entries = vec![Rational::zero(); n * n];
        for (j, &i) in self.images.iter().enumerate() {
            entries[i * n + j] = Rational::one();
        }
        RationalMatrix::from_entries(n, n, entries).expect("square by construction")
    }
}

impl Serialize for PermutationMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PermutationMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        PermutationMap::from_one_based(&v).map_err(de::Error::custom)
    }
}
