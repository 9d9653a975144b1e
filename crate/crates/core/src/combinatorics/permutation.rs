use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `[k]` in one-line notation: `image[i - 1] = π(i)`.
///
/// `(2,3,1,4)` maps 1→2, 2→3, 3→1, 4→4.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let k = image.len();
        if k == 0 {
            return Err(Error::domain("permutation over an empty set"));
        }
        let mut seen = vec![false; k];
        for &v in &image {
            if v == 0 || v > k || seen[v - 1] {
                return Err(Error::domain(format!(
                    "{image:?} is not a permutation of [1,{k}]"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(k: usize) -> Self {
        Permutation {
            image: (1..=k).collect(),
        }
    }

    /// Swaps `a` and `b`, fixing everything else.
    pub fn transposition(k: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || a > k || b > k {
            return Err(Error::domain(format!("transposition ({a} {b}) outside [1,{k}]")));
        }
        let mut image: Vec<usize> = (1..=k).collect();
        image.swap(a - 1, b - 1);
        Ok(Permutation { image })
    }

    pub fn k(&self) -> usize {
        self.image.len()
    }

    /// π(i). Panics when `i` is outside `[1,k]`.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.k()];
        for (i, &v) in self.image.iter().enumerate() {
            image[v - 1] = i + 1;
        }
        Permutation { image }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.k() != other.k() {
            return Err(Error::domain("composing permutations of different arity"));
        }
        Ok(Permutation {
            image: other.image.iter().map(|&v| self.apply(v)).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    pub(crate) fn check_arity(&self, k: usize) -> Result<()> {
        if self.k() != k {
            return Err(Error::domain(format!(
                "permutation {self} acts on [{}], expected [{k}]",
                self.k()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.image
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1, 3]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 4, 2]).is_err());
    }

    #[test]
    fn inverse_and_compose() {
        let p = Permutation::new(vec![2, 3, 1, 4]).unwrap();
        let inv = p.inverse();
        assert_eq!(inv.images(), &[3, 1, 2, 4]);
        assert!(p.compose(&inv).unwrap().is_identity());
        assert_eq!(p.to_string(), "(2,3,1,4)");
    }

    #[test]
    fn serde_as_image_array() {
        let p: Permutation = serde_json::from_str("[4,2,5,1,3]").unwrap();
        assert_eq!(p.apply(1), 4);
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
    }
}
