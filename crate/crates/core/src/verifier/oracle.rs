use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{InputMatrix, TruthTable, MAX_TABLE_BITS};

/// `f` on every instance of `x`, by direct table lookup.
///
/// Deliberately independent of protocol execution: the row index is rebuilt
/// bit by bit from the input matrix.
pub fn oracle_evaluate(f: &TruthTable, x: &InputMatrix) -> Result<Vec<bool>> {
    if (f.k(), f.n()) != (x.k(), x.n()) {
        return Err(Error::domain(format!(
            "table is for k={}, n={}; input has k={}, n={}",
            f.k(),
            f.n(),
            x.k(),
            x.n()
        )));
    }
    (1..=x.ell())
        .map(|i| {
            let mut row = 0usize;
            for j in 1..=x.k() {
                for bit in x.get(i, j).bits() {
                    row = row * 2 + usize::from(bit);
                }
            }
            Ok(f.values()[row])
        })
        .collect()
}

/// A pseudorandom table from `seed`; the same seed always gives the same
/// table.
pub fn random_truth_table(k: usize, n: usize, seed: u64) -> Result<TruthTable> {
    if k.saturating_mul(n) > MAX_TABLE_BITS {
        return Err(Error::domain(format!(
            "a table over {} input bits exceeds the {MAX_TABLE_BITS}-bit limit",
            k.saturating_mul(n)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..1usize << (k * n)).map(|_| rng.random::<bool>()).collect();
    TruthTable::new(k, n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;

    #[test]
    fn eq3_on_two_instances() {
        let f = TruthTable::equality(3, 1).unwrap();
        let x = InputMatrix::parse(&[&["0", "0", "0"], &["0", "1", "0"]]).unwrap();
        assert_eq!(oracle_evaluate(&f, &x).unwrap(), vec![true, false]);
    }

    #[test]
    fn constant_table() {
        let f = TruthTable::constant(2, 2, true).unwrap();
        let x = InputMatrix::parse(&[&["01", "10"], &["11", "00"], &["00", "00"]]).unwrap();
        assert_eq!(oracle_evaluate(&f, &x).unwrap(), vec![true; 3]);
    }

    #[test]
    fn agrees_with_table_eval() {
        let f = random_truth_table(3, 2, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let row: Vec<BitString> = (0..3)
                .map(|_| BitString::from_value(rng.random_range(0..4), 2).unwrap())
                .collect();
            let x = InputMatrix::single(row.clone()).unwrap();
            assert_eq!(oracle_evaluate(&f, &x).unwrap(), vec![f.eval(&row).unwrap()]);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_truth_table(3, 1, 1).unwrap();
        assert_eq!(a, random_truth_table(3, 1, 1).unwrap());
        assert_ne!(a, random_truth_table(3, 1, 2).unwrap());
        assert_eq!(a.values().len(), 1 << 3);
    }

    #[test]
    fn size_guard() {
        assert!(random_truth_table(5, 5, 0).is_err());
    }

    #[test]
    fn shape_mismatch() {
        let f = TruthTable::equality(3, 1).unwrap();
        let x = InputMatrix::parse(&[&["0", "0"]]).unwrap();
        assert!(oracle_evaluate(&f, &x).is_err());
    }
}
