use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::model::graph::{check_k, PartyId};

/// Shape of an input matrix: `ell` instances of `k` foreheads, `n` bits each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub ell: usize,
    pub k: usize,
    pub n: usize,
}

impl Shape {
    pub fn new(ell: usize, k: usize, n: usize) -> Result<Self> {
        check_k(k)?;
        if ell == 0 {
            return Err(Error::domain("at least one instance is required"));
        }
        if n == 0 || n > BitString::MAX_LEN {
            return Err(Error::domain(format!("input length {n} outside [1,64]")));
        }
        Ok(Shape { ell, k, n })
    }

    pub fn total_bits(&self) -> usize {
        self.ell * self.k * self.n
    }

    /// `2^{k n ell}`.
    pub fn domain_size(&self) -> u128 {
        let bits = self.total_bits();
        if bits >= 128 {
            u128::MAX
        } else {
            1u128 << bits
        }
    }
}

/// The `ell × k` matrix of inputs; entry `(i, j)` is `x_{i,j}`, the input on
/// party `j`'s forehead in instance `i`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputMatrix {
    shape: Shape,
    cells: Vec<BitString>,
}

impl InputMatrix {
    pub fn new(shape: Shape, rows: Vec<Vec<BitString>>) -> Result<Self> {
        if rows.len() != shape.ell {
            return Err(Error::domain(format!(
                "expected {} instances, got {}",
                shape.ell,
                rows.len()
            )));
        }
        let mut cells = Vec::with_capacity(shape.ell * shape.k);
        for row in rows {
            if row.len() != shape.k {
                return Err(Error::domain(format!(
                    "expected {} inputs per instance, got {}",
                    shape.k,
                    row.len()
                )));
            }
            for x in row {
                if x.len() != shape.n {
                    return Err(Error::domain(format!(
                        "input {x} has {} bits, expected {}",
                        x.len(),
                        shape.n
                    )));
                }
                cells.push(x);
            }
        }
        Ok(InputMatrix { shape, cells })
    }

    /// Single instance `(x_1, …, x_k)`.
    pub fn single(inputs: Vec<BitString>) -> Result<Self> {
        let n = inputs.first().map(|x| x.len()).unwrap_or(0);
        let shape = Shape::new(1, inputs.len(), n)?;
        Self::new(shape, vec![inputs])
    }

    /// Parses rows such as `[["01","01","01"]]`.
    pub fn parse(rows: &[&[&str]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| s.parse()).collect::<Result<Vec<BitString>>>())
            .collect::<Result<Vec<_>>>()?;
        let ell = rows.len();
        let k = rows.first().map(|r| r.len()).unwrap_or(0);
        let n = rows.first().and_then(|r| r.first()).map(|x| x.len()).unwrap_or(0);
        Self::new(Shape::new(ell, k, n)?, rows)
    }

    /// The `index`-th matrix of the domain: the concatenation
    /// `x_{1,1} ‖ … ‖ x_{1,k} ‖ x_{2,1} ‖ … ‖ x_{ell,k}` read MSB first.
    pub fn from_index(shape: Shape, index: u128) -> Result<Self> {
        if index >= shape.domain_size() {
            return Err(Error::domain(format!(
                "input index {index} outside a domain of size {}",
                shape.domain_size()
            )));
        }
        let total = shape.total_bits();
        let mask = if shape.n == 64 { u64::MAX } else { (1u64 << shape.n) - 1 };
        let cells = (0..shape.ell * shape.k)
            .map(|c| {
                let shift = total - (c + 1) * shape.n;
                BitString::from_value((index >> shift) as u64 & mask, shape.n)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InputMatrix { shape, cells })
    }

    pub fn index(&self) -> u128 {
        self.cells
            .iter()
            .fold(0u128, |acc, x| (acc << self.shape.n) | x.value() as u128)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn ell(&self) -> usize {
        self.shape.ell
    }

    pub fn k(&self) -> usize {
        self.shape.k
    }

    pub fn n(&self) -> usize {
        self.shape.n
    }

    /// `x_{instance, party}`. Panics on out-of-range indices.
    pub fn get(&self, instance: usize, party: PartyId) -> BitString {
        self.cells[(instance - 1) * self.shape.k + (party - 1)]
    }

    pub fn try_get(&self, instance: usize, party: PartyId) -> Result<BitString> {
        self.check(instance, party)?;
        Ok(self.get(instance, party))
    }

    pub fn set(&mut self, instance: usize, party: PartyId, x: BitString) -> Result<()> {
        self.check(instance, party)?;
        if x.len() != self.shape.n {
            return Err(Error::domain("input length mismatch"));
        }
        self.cells[(instance - 1) * self.shape.k + (party - 1)] = x;
        Ok(())
    }

    pub fn instance(&self, instance: usize) -> &[BitString] {
        let k = self.shape.k;
        &self.cells[(instance - 1) * k..instance * k]
    }

    /// Instance `instance` alone, as a single-instance matrix.
    pub fn project(&self, instance: usize) -> Result<InputMatrix> {
        self.check(instance, 1)?;
        Ok(InputMatrix {
            shape: Shape { ell: 1, ..self.shape },
            cells: self.instance(instance).to_vec(),
        })
    }

    fn check(&self, instance: usize, party: PartyId) -> Result<()> {
        if instance == 0 || instance > self.shape.ell {
            return Err(Error::domain(format!(
                "instance {instance} outside [1,{}]",
                self.shape.ell
            )));
        }
        if party == 0 || party > self.shape.k {
            return Err(Error::domain(format!(
                "party {party} outside [1,{}]",
                self.shape.k
            )));
        }
        Ok(())
    }
}

impl fmt::Display for InputMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for i in 1..=self.ell() {
            if i > 1 {
                f.write_str(",")?;
            }
            f.write_str("(")?;
            for (j, x) in self.instance(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for InputMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InputMatrix{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn index_layout_is_msb_first() {
        let shape = Shape::new(2, 3, 2).unwrap();
        // x_{1,1} occupies the top two bits of a 12-bit index
        let x = InputMatrix::from_index(shape, 0b10_00_00_00_00_01).unwrap();
        assert_eq!(x.get(1, 1).to_string(), "10");
        assert_eq!(x.get(2, 3).to_string(), "01");
        assert_eq!(x.to_string(), "((10,00,00),(00,00,01))");
    }

    #[test]
    fn shape_errors() {
        assert!(InputMatrix::parse(&[&["0", "1"], &["0"]]).is_err());
        assert!(InputMatrix::parse(&[&["0", "11"]]).is_err());
        let x = InputMatrix::parse(&[&["0", "1"]]).unwrap();
        assert!(x.try_get(2, 1).is_err());
        assert!(x.try_get(1, 3).is_err());
    }

    proptest! {
        #[test]
        fn index_roundtrip(ell in 1usize..4, k in 2usize..5, n in 1usize..3, seed in any::<u64>()) {
            let shape = Shape::new(ell, k, n).unwrap();
            let idx = (seed as u128) % shape.domain_size();
            let x = InputMatrix::from_index(shape, idx).unwrap();
            prop_assert_eq!(x.index(), idx);
        }
    }
}
