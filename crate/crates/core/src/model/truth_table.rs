use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::model::graph::check_k;

/// Largest `k * n` for which a table is materialized (2^24 entries).
pub const MAX_TABLE_BITS: usize = 24;

/// Explicit boolean function `f : ({0,1}^n)^k → {0,1}`.
///
/// `values[idx]` is `f(x_1, …, x_k)` where `idx` is `x_1 ‖ … ‖ x_k` read as
/// an unsigned integer, most significant bit first.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TableFile", into = "TableFile")]
pub struct TruthTable {
    k: usize,
    n: usize,
    values: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    k: usize,
    n: usize,
    values: Vec<u8>,
}

/// Which permutations [`TruthTable::is_symmetric`] quantifies over.
#[derive(Clone, Debug)]
pub enum Symmetry {
    Under(Permutation),
    All,
}

impl TruthTable {
    pub fn new(k: usize, n: usize, values: Vec<bool>) -> Result<Self> {
        check_table_size(k, n)?;
        let expected = 1usize << (k * n);
        if values.len() != expected {
            return Err(Error::domain(format!(
                "truth table for k={k}, n={n} needs {expected} values, got {}",
                values.len()
            )));
        }
        Ok(TruthTable { k, n, values })
    }

    pub fn from_fn(k: usize, n: usize, mut f: impl FnMut(&[BitString]) -> bool) -> Result<Self> {
        check_table_size(k, n)?;
        let mut args = vec![BitString::empty(); k];
        let values = (0..1usize << (k * n))
            .map(|idx| {
                decode_args(idx, n, &mut args);
                f(&args)
            })
            .collect();
        Ok(TruthTable { k, n, values })
    }

    /// `EQ_k`: 1 iff all arguments are equal.
    pub fn equality(k: usize, n: usize) -> Result<Self> {
        Self::from_fn(k, n, |xs| xs.iter().all(|x| *x == xs[0]))
    }

    pub fn constant(k: usize, n: usize, value: bool) -> Result<Self> {
        Self::from_fn(k, n, |_| value)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// `f(args)`; arguments must match the table's arity and width.
    pub fn eval(&self, args: &[BitString]) -> Result<bool> {
        if args.len() != self.k {
            return Err(Error::domain(format!(
                "f takes {} arguments, got {}",
                self.k,
                args.len()
            )));
        }
        let mut idx = 0usize;
        for x in args {
            if x.len() != self.n {
                return Err(Error::domain(format!(
                    "argument {x} has {} bits, f expects {}",
                    x.len(),
                    self.n
                )));
            }
            idx = (idx << self.n) | x.value() as usize;
        }
        Ok(self.values[idx])
    }

    pub fn is_symmetric(&self, which: &Symmetry) -> Result<bool> {
        match which {
            Symmetry::Under(pi) => {
                pi.check_arity(self.k)?;
                Ok(self.invariant_under(pi))
            }
            // A transposition and a full cycle generate the symmetric group.
            Symmetry::All => {
                let swap = Permutation::transposition(self.k, 1, 2)?;
                let cycle = Permutation::new((2..=self.k).chain([1]).collect())?;
                Ok(self.invariant_under(&swap) && self.invariant_under(&cycle))
            }
        }
    }

    fn invariant_under(&self, pi: &Permutation) -> bool {
        let mut args = vec![BitString::empty(); self.k];
        (0..self.values.len()).all(|idx| {
            decode_args(idx, self.n, &mut args);
            let permuted = (1..=self.k).fold(0usize, |acc, i| {
                (acc << self.n) | args[pi.apply(i) - 1].value() as usize
            });
            self.values[idx] == self.values[permuted]
        })
    }
}

fn check_table_size(k: usize, n: usize) -> Result<()> {
    check_k(k)?;
    if n == 0 || k * n > MAX_TABLE_BITS {
        return Err(Error::domain(format!(
            "truth table with k*n = {} outside [1,{MAX_TABLE_BITS}]",
            k * n
        )));
    }
    Ok(())
}

fn decode_args(idx: usize, n: usize, args: &mut [BitString]) {
    let k = args.len();
    let mask = (1usize << n) - 1;
    for (j, slot) in args.iter_mut().enumerate() {
        let shift = (k - 1 - j) * n;
        *slot = BitString::from_value(((idx >> shift) & mask) as u64, n).expect("n <= 24");
    }
}

impl TryFrom<TableFile> for TruthTable {
    type Error = Error;

    fn try_from(f: TableFile) -> Result<Self> {
        let values = f
            .values
            .into_iter()
            .map(|v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::domain(format!("truth table value {other} is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        TruthTable::new(f.k, f.n, values)
    }
}

impl From<TruthTable> for TableFile {
    fn from(t: TruthTable) -> Self {
        TableFile {
            k: t.k,
            n: t.n,
            values: t.values.into_iter().map(u8::from).collect(),
        }
    }
}

impl std::fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TruthTable(k={}, n={}, {} entries)", self.k, self.n, self.values.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::random_truth_table;
    use itertools::Itertools;

    fn bits(s: &[&str]) -> Vec<BitString> {
        s.iter().map(|x| x.parse().unwrap()).collect()
    }

    #[test]
    fn equality_table() {
        let eq = TruthTable::equality(3, 2).unwrap();
        assert!(eq.eval(&bits(&["01", "01", "01"])).unwrap());
        assert!(!eq.eval(&bits(&["01", "01", "11"])).unwrap());
        assert!(eq.is_symmetric(&Symmetry::All).unwrap());
    }

    #[test]
    fn first_argument_is_not_symmetric() {
        let f = TruthTable::from_fn(3, 1, |xs| xs[0].get(0)).unwrap();
        let pi = Permutation::new(vec![2, 1, 3]).unwrap();
        assert!(!f.is_symmetric(&Symmetry::Under(pi)).unwrap());
        assert!(!f.is_symmetric(&Symmetry::All).unwrap());
        let fixes_first = Permutation::new(vec![1, 3, 2]).unwrap();
        assert!(f.is_symmetric(&Symmetry::Under(fixes_first)).unwrap());
    }

    #[test]
    fn size_and_arity_errors() {
        assert!(TruthTable::new(3, 1, vec![false; 7]).is_err());
        assert!(TruthTable::equality(5, 5).is_err());
        let eq = TruthTable::equality(3, 1).unwrap();
        assert!(eq.eval(&bits(&["0", "0"])).is_err());
        assert!(eq.eval(&bits(&["0", "0", "00"])).is_err());
    }

    /// Full symmetry against a double loop over all 6 permutations and 8 inputs.
    #[test]
    fn all_symmetry_matches_brute_force() {
        for seed in 0..40 {
            let f = random_truth_table(3, 1, seed).unwrap();
            let mut brute = true;
            for perm in (0..3usize).permutations(3) {
                for idx in 0..8usize {
                    let x: Vec<usize> = (0..3).map(|j| (idx >> (2 - j)) & 1).collect();
                    let y: Vec<usize> = perm.iter().map(|&p| x[p]).collect();
                    let idy = y[0] << 2 | y[1] << 1 | y[2];
                    if f.values()[idx] != f.values()[idy] {
                        brute = false;
                    }
                }
            }
            assert_eq!(f.is_symmetric(&Symmetry::All).unwrap(), brute, "seed {seed}");
        }
        // at least one symmetric example exercised on the true branch
        let maj = TruthTable::from_fn(3, 1, |xs| xs.iter().filter(|x| x.get(0)).count() >= 2).unwrap();
        assert!(maj.is_symmetric(&Symmetry::All).unwrap());
    }

    #[test]
    fn json_flat_values() {
        let t: TruthTable =
            serde_json::from_str(r#"{"k":2,"n":1,"values":[1,0,0,1]}"#).unwrap();
        assert!(t.eval(&bits(&["1", "1"])).unwrap());
        assert!(!t.eval(&bits(&["1", "0"])).unwrap());
        assert!(serde_json::from_str::<TruthTable>(r#"{"k":2,"n":1,"values":[1,0,2,1]}"#).is_err());
    }
}
