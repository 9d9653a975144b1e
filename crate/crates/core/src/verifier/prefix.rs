use std::collections::BTreeSet;

use crate::bits::BitString;
use crate::error::Result;
use crate::model::{run_protocol, sweep, Budget, InputMatrix, ProtocolSpec};

/// Every distinct message sent in `round` across the whole input domain.
/// Records of the round are concatenated; a silent round counts as `ε`.
pub fn message_set(spec: &ProtocolSpec, round: usize, budget: Budget) -> Result<BTreeSet<BitString>> {
    let size = budget.admit_shape(spec.shape())?;
    let shape = spec.shape();
    sweep(
        size,
        BTreeSet::new,
        |set: &mut BTreeSet<BitString>, idx| {
            let x = InputMatrix::from_index(shape, idx as u128)?;
            let t = run_protocol(spec, &x)?;
            let mut m = BitString::empty();
            for r in t.records.iter().filter(|r| r.round == round) {
                m = m.concat(&r.payload)?;
            }
            set.insert(m);
            Ok(())
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )
    .map_err(|e| e.failure)
}

/// The first pair `(p, m)` with `p` a proper prefix of `m`, if any.
pub fn prefix_violation(set: &BTreeSet<BitString>) -> Option<(BitString, BitString)> {
    set.iter()
        .flat_map(|p| set.iter().map(move |m| (*p, *m)))
        .find(|(p, m)| p != m && p.is_prefix_of(m))
}

/// Whether the messages a protocol sends at chain position `position`
/// form a prefix-free set.
pub fn check_prefix_free(spec: &ProtocolSpec, position: usize, budget: Budget) -> Result<bool> {
    Ok(prefix_violation(&message_set(spec, position, budget)?).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Permutation;
    use crate::protocols::myopic_eq;

    fn set(words: &[&str]) -> BTreeSet<BitString> {
        words.iter().map(|w| w.parse().unwrap()).collect()
    }

    #[test]
    fn small_sets() {
        assert!(prefix_violation(&set(&[])).is_none());
        assert!(prefix_violation(&set(&["01"])).is_none());
        assert!(prefix_violation(&set(&["0", "1"])).is_none());
        assert_eq!(
            prefix_violation(&set(&["0", "01"])).unwrap(),
            ("0".parse().unwrap(), "01".parse().unwrap())
        );
        assert!(prefix_violation(&set(&["", "1"])).is_some());
    }

    #[test]
    fn myopic_chain_positions() {
        let spec = myopic_eq(5, 1, &Permutation::identity(5)).unwrap();
        assert_eq!(message_set(&spec, 2, Budget::default()).unwrap(), set(&["0", "1"]));
        assert!(check_prefix_free(&spec, 2, Budget::default()).unwrap());
        assert_eq!(message_set(&spec, 1, Budget::default()).unwrap(), set(&[""]));
    }
}
