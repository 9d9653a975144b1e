use std::sync::Arc;

use crate::combinatorics::{MultiplexTriplet, Permutation};
use crate::error::{Error, Result};
use crate::model::{
    CommPattern, Model, OutputContext, Outgoing, PartyContext, PartyId, ProtocolSpec, Recipient,
    RestrictionGraph, Rules, Shape, TruthTable,
};

/// `{(k, 1)} ∪ {(1, i) : 2 ≤ i ≤ k}`: `P_1` sees everyone, `P_k` sees only
/// `P_1`, and nobody else sees anything.
pub fn forwarding_graph(k: usize) -> Result<RestrictionGraph> {
    RestrictionGraph::new(k, std::iter::once((k, 1)).chain((2..=k).map(|i| (1, i))))
}

/// `π_i`: rotates `1, …, k - 1` so that `1 ↦ i`, and fixes `k`.
pub fn forwarding_permutation(k: usize, i: usize) -> Result<Permutation> {
    if k < 3 || i == 0 || i >= k {
        return Err(Error::domain(format!("rotation index {i} outside [1,{}]", k.saturating_sub(1))));
    }
    let image = (1..=k)
        .map(|j| if j == k { k } else { (i - 1 + j - 1) % (k - 1) + 1 })
        .collect();
    Permutation::new(image)
}

/// `{(k, 1, {2, …, k - 1})}`, the multiplexing set that merges all of
/// `P_k`'s messages into one.
pub fn forwarding_multiplexing_set(k: usize) -> Result<Vec<MultiplexTriplet>> {
    Ok(vec![MultiplexTriplet::new(k, 1, 2..k)?])
}

struct SendForehead {
    f: TruthTable,
    k: usize,
    target: PartyId,
}

impl Rules for SendForehead {
    fn messages(&self, ctx: &PartyContext<'_>) -> Result<Vec<Outgoing>> {
        if ctx.round == 1 && ctx.party == self.k {
            return Ok(vec![Outgoing::to_party(self.target, ctx.view.get(self.target)?)]);
        }
        Ok(Vec::new())
    }

    fn output(&self, ctx: &OutputContext<'_>) -> Result<Vec<bool>> {
        let own = ctx
            .history
            .iter()
            .find(|r| r.sender == self.k && r.round == 1)
            .map(|r| r.payload)
            .ok_or_else(|| Error::Model(format!("P{} never received its input", self.target)))?;
        let args = (1..=self.k)
            .map(|j| if j == self.target { Ok(own) } else { ctx.view.get(j) })
            .collect::<Result<Vec<_>>>()?;
        Ok(vec![self.f.eval(&args)?])
    }
}

/// `Q^i`: on `G_{π_i}`, `P_k` sends `x_i` to `P_i`, which evaluates `f`.
/// `Q^1` is the base protocol on [`forwarding_graph`].
pub fn forwarding_variant(f: &TruthTable, k: usize, i: usize) -> Result<ProtocolSpec> {
    if f.k() != k {
        return Err(Error::domain(format!("f has arity {}, expected {k}", f.k())));
    }
    let pi = forwarding_permutation(k, i)?;
    let graph = forwarding_graph(k)?.permuted(&pi)?;
    let n = f.n();
    let pattern = CommPattern::new(1).with(1, k, Recipient::Party(i), n);
    let rules = SendForehead {
        f: f.clone(),
        k,
        target: i,
    };
    let name = if i == 1 { "forward".to_string() } else { format!("forward-q{i}") };
    ProtocolSpec::new(name, Model::Restricted(graph), Shape::new(1, k, n)?, 1, Arc::new(rules))?
        .with_output_party(i)
        .map(|s| s.with_pattern(pattern))
}

/// `f` in `NOF_G` for [`forwarding_graph`]: `P_k` sends `x_1` to `P_1`.
pub fn forwarding(f: &TruthTable, k: usize) -> Result<ProtocolSpec> {
    forwarding_variant(f, k, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{run_protocol, InputMatrix};

    #[test]
    fn rotations() {
        assert_eq!(forwarding_permutation(4, 1).unwrap(), Permutation::identity(4));
        assert_eq!(forwarding_permutation(4, 2).unwrap().images(), &[2, 3, 1, 4]);
        assert_eq!(forwarding_permutation(4, 3).unwrap().images(), &[3, 1, 2, 4]);
        assert!(forwarding_permutation(4, 4).is_err());
    }

    #[test]
    fn base_protocol_sends_n_bits() {
        let f = TruthTable::constant(3, 2, true).unwrap();
        let spec = forwarding(&f, 3).unwrap();
        let x = InputMatrix::parse(&[&["01", "10", "11"]]).unwrap();
        let t = run_protocol(&spec, &x).unwrap();
        assert_eq!(t.total_bits, 2);
        assert_eq!(t.records[0].payload.to_string(), "01");
        assert_eq!(spec.output_party(), Some(1));
    }

    #[test]
    fn variant_targets_rotated_party() {
        let f = TruthTable::from_fn(4, 1, |xs| xs[1].value() == 1).unwrap();
        let spec = forwarding_variant(&f, 4, 2).unwrap();
        let x = InputMatrix::parse(&[&["0", "1", "0", "0"]]).unwrap();
        let t = run_protocol(&spec, &x).unwrap();
        assert_eq!(t.records[0].recipient, Recipient::Party(2));
        assert_eq!(t.outputs, vec![true]);
    }
}
