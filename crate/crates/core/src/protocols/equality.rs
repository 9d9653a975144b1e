use std::sync::Arc;

use crate::bits::BitString;
use crate::combinatorics::{FilteringTriplet, Permutation};
use crate::error::{Error, Result};
use crate::model::{
    board_outputs, CommPattern, Label, Model, OutputContext, Outgoing, PartyContext, PartyId,
    ProtocolSpec, Recipient, RestrictionGraph, Rules, Shape, View,
};

fn all_equal(xs: impl IntoIterator<Item = Result<BitString>>) -> Result<bool> {
    let mut first = None;
    let mut equal = true;
    for x in xs {
        let x = x?;
        match first {
            None => first = Some(x),
            Some(f) => equal &= f == x,
        }
    }
    Ok(equal)
}

/// Whether every input `view` can see on `instance` is the same, skipping
/// `owner`'s own forehead.
fn sees_all_equal(view: &View, instance: usize, owner: PartyId, k: usize) -> Result<bool> {
    all_equal((1..=k).filter(|&j| j != owner).map(|j| view.get_at(instance, j)))
}

fn single_bit(payload: Option<BitString>, what: &str) -> Result<bool> {
    match payload {
        Some(b) if b.len() == 1 => Ok(b.get(0)),
        Some(b) => Err(Error::Model(format!("{what}: expected one bit, got {b}"))),
        None => Err(Error::Model(format!("{what}: message missing"))),
    }
}

struct EqTwoBit {
    k: usize,
}

impl Rules for EqTwoBit {
    fn messages(&self, ctx: &PartyContext<'_>) -> Result<Vec<Outgoing>> {
        let k = self.k;
        match (ctx.round, ctx.party) {
            (1, p) if p == k - 1 => {
                let same = ctx.view.get(k - 2)? == ctx.view.get(k)?;
                Ok(vec![Outgoing::to_board(BitString::bit(same), Label::Plain)])
            }
            (2, p) if p == k => {
                let first = single_bit(ctx.received(k - 1, 1), "EQ check")?;
                let out = first && sees_all_equal(ctx.view, 1, k, k)?;
                Ok(vec![Outgoing::to_board(BitString::bit(out), Label::Output { instance: 1 })])
            }
            _ => Ok(Vec::new()),
        }
    }

    fn output(&self, ctx: &OutputContext<'_>) -> Result<Vec<bool>> {
        board_outputs(ctx.history, 1)
    }
}

/// `EQ_k` on the board with two bits: `P_{k-1}` compares `x_{k-2}` with
/// `x_k`, and `P_k` adds everything it sees.
pub fn eq_two_bit(k: usize, n: usize) -> Result<ProtocolSpec> {
    if k < 3 {
        return Err(Error::domain(format!("the two-bit EQ protocol needs k >= 3, got {k}")));
    }
    let pattern = CommPattern::new(2)
        .with(1, k - 1, Recipient::Board, 1)
        .with(2, k, Recipient::Board, 1);
    Ok(
        ProtocolSpec::new("eq2", Model::Board, Shape::new(1, k, n)?, 2, Arc::new(EqTwoBit { k }))?
            .with_pattern(pattern),
    )
}

struct EqMulti {
    k: usize,
}

impl EqMulti {
    fn ell(&self) -> usize {
        (self.k - 1) / 2
    }

    /// `b_j = [x_{j,2j-1} = x_{j,2j}]`.
    fn pair_bit(view: &View, j: usize) -> Result<bool> {
        Ok(view.get_at(j, 2 * j - 1)? == view.get_at(j, 2 * j)?)
    }
}

impl Rules for EqMulti {
    fn messages(&self, ctx: &PartyContext<'_>) -> Result<Vec<Outgoing>> {
        let ell = self.ell();
        match ctx.round {
            1 if ctx.party == self.k => {
                let mut m = false;
                for j in 1..=ell {
                    m ^= Self::pair_bit(ctx.view, j)?;
                }
                Ok(vec![Outgoing::to_board(BitString::bit(m), Label::Plain)])
            }
            2 if ctx.party.is_multiple_of(2) && ctx.party / 2 <= ell => {
                let j = ctx.party / 2;
                let mut b = single_bit(ctx.received(self.k, 1), "pair XOR")?;
                for other in (1..=ell).filter(|&o| o != j) {
                    b ^= Self::pair_bit(ctx.view, other)?;
                }
                let out = b && sees_all_equal(ctx.view, j, ctx.party, self.k)?;
                Ok(vec![Outgoing::to_board(BitString::bit(out), Label::Output { instance: j })])
            }
            _ => Ok(Vec::new()),
        }
    }

    fn output(&self, ctx: &OutputContext<'_>) -> Result<Vec<bool>> {
        board_outputs(ctx.history, self.ell())
    }
}

/// `EQ_k` on `(k - 1) / 2` instances with `1 + (k - 1) / 2` bits.
///
/// Instance `j` is tied to the pair `(2j - 1, 2j)`: `P_k` writes the XOR of
/// the pair comparisons, and `P_{2j}`, the only party blind to half of pair
/// `j`, recovers its comparison and announces instance `j`.
pub fn eq_multi(k: usize, n: usize) -> Result<ProtocolSpec> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::domain(format!("the multi-instance EQ protocol needs odd k >= 3, got {k}")));
    }
    let ell = (k - 1) / 2;
    let mut pattern = CommPattern::new(2).with(1, k, Recipient::Board, 1);
    for j in 1..=ell {
        pattern.add(2, 2 * j, Recipient::Board, 1);
    }
    Ok(
        ProtocolSpec::new("eq-multi", Model::Board, Shape::new(ell, k, n)?, 2, Arc::new(EqMulti { k }))?
            .with_pattern(pattern),
    )
}

/// The complete graph minus the edges from `k` to `4, …, k - 1`.
pub fn relay_graph(k: usize) -> Result<RestrictionGraph> {
    let edges = (1..=k)
        .flat_map(|i| (1..=k).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && !(i == k && (4..k).contains(&j)));
    RestrictionGraph::new(k, edges)
}

/// `{(k, 2, (4, 6, …, k - 1))}`: an `ell`-filtering set for
/// [`relay_graph`] with `ell = (k - 1) / 2`.
pub fn relay_filtering_set(k: usize) -> Result<Vec<FilteringTriplet>> {
    if k < 5 || k.is_multiple_of(2) {
        return Err(Error::domain(format!("the filtering set needs odd k >= 5, got {k}")));
    }
    Ok(vec![FilteringTriplet::new(k, 2, (4..k).step_by(2).collect())?])
}

struct EqRelay {
    k: usize,
}

impl Rules for EqRelay {
    fn messages(&self, ctx: &PartyContext<'_>) -> Result<Vec<Outgoing>> {
        if ctx.round == 1 && ctx.party == self.k {
            let same = ctx.view.get(1)? == ctx.view.get(2)?;
            return Ok(vec![Outgoing::to_party(2, BitString::bit(same))]);
        }
        Ok(Vec::new())
    }

    fn output(&self, ctx: &OutputContext<'_>) -> Result<Vec<bool>> {
        let first = ctx
            .history
            .iter()
            .find(|r| r.sender == self.k && r.round == 1)
            .map(|r| r.payload);
        let first = single_bit(first, "EQ check")?;
        Ok(vec![first && sees_all_equal(ctx.view, 1, 2, self.k)?])
    }
}

/// `EQ_k` in `NOF_G` for [`relay_graph`]: `P_k` sends `[x_1 = x_2]` to
/// `P_2`, which outputs.
pub fn eq_relay(k: usize, n: usize) -> Result<ProtocolSpec> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::domain(format!("the restricted EQ protocol needs odd k >= 3, got {k}")));
    }
    let graph = relay_graph(k)?;
    let pattern = CommPattern::new(1).with(1, k, Recipient::Party(2), 1);
    ProtocolSpec::new(
        "eq-relay",
        Model::Restricted(graph),
        Shape::new(1, k, n)?,
        1,
        Arc::new(EqRelay { k }),
    )?
    .with_output_party(2)
    .map(|s| s.with_pattern(pattern))
}

struct MyopicEq {
    k: usize,
    order: Permutation,
    position: Vec<usize>,
}

impl Rules for MyopicEq {
    fn messages(&self, ctx: &PartyContext<'_>) -> Result<Vec<Outgoing>> {
        let t = ctx.round;
        if t >= self.k || self.position[ctx.party - 1] != t {
            return Ok(Vec::new());
        }
        let at = |p: usize| self.order.apply(p);
        let next = at(t + 1);
        if t == 1 {
            return Ok(vec![Outgoing::to_party(next, BitString::empty())]);
        }
        let before = if t == 2 {
            true
        } else {
            single_bit(ctx.received(at(t - 1), t - 1), "chain bit")?
        };
        let c = before && ctx.view.get(at(t - 1))? == ctx.view.get(next)?;
        Ok(vec![Outgoing::to_party(next, BitString::bit(c))])
    }

    fn output(&self, ctx: &OutputContext<'_>) -> Result<Vec<bool>> {
        let k = self.k;
        let last = self.order.apply(k - 1);
        let c = ctx
            .history
            .iter()
            .find(|r| r.sender == last && r.round == k - 1)
            .map(|r| r.payload);
        let c = single_bit(c, "chain bit")?;
        let seen = all_equal((1..k).map(|p| ctx.view.get(self.order.apply(p))))?;
        Ok(vec![c && seen])
    }
}

/// `EQ_k` along the myopic chain `order`: position `t` forwards
/// `c_t = c_{t-1} ∧ [x_{π(t-1)} = x_{π(t+1)}]`, and the last party adds the
/// predecessors it sees. `k - 2` bits.
pub fn myopic_eq(k: usize, n: usize, order: &Permutation) -> Result<ProtocolSpec> {
    if k < 4 {
        return Err(Error::domain(format!("the myopic EQ chain needs k >= 4, got {k}")));
    }
    order.check_arity(k)?;
    let mut pattern = CommPattern::new(k - 1);
    for t in 2..k {
        pattern.add(t, order.apply(t), Recipient::Party(order.apply(t + 1)), 1);
    }
    let inverse = order.inverse();
    let rules = MyopicEq {
        k,
        order: order.clone(),
        position: (1..=k).map(|p| inverse.apply(p)).collect(),
    };
    Ok(ProtocolSpec::new(
        "myopic-eq",
        Model::Myopic(order.clone()),
        Shape::new(1, k, n)?,
        k - 1,
        Arc::new(rules),
    )?
    .with_pattern(pattern))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{run_protocol, InputMatrix};

    #[test]
    fn eq2_trace() {
        let spec = eq_two_bit(3, 2).unwrap();
        let x = InputMatrix::parse(&[&["01", "01", "01"]]).unwrap();
        let t = run_protocol(&spec, &x).unwrap();
        let bits: Vec<String> = t.records.iter().map(|r| r.payload.to_string()).collect();
        assert_eq!(bits, vec!["1", "1"]);
        assert_eq!(t.outputs, vec![true]);
    }

    #[test]
    fn eq2_needs_three_parties() {
        assert!(eq_two_bit(2, 1).is_err());
    }

    #[test]
    fn eq_multi_rejects_even_k() {
        assert!(eq_multi(4, 1).is_err());
        assert_eq!(eq_multi(5, 1).unwrap().ell(), 2);
    }

    #[test]
    fn relay_trace() {
        let spec = eq_relay(5, 2).unwrap();
        let x = InputMatrix::parse(&[&["10", "10", "10", "10", "10"]]).unwrap();
        let t = run_protocol(&spec, &x).unwrap();
        assert_eq!(t.total_bits, 1);
        assert_eq!(t.records[0].recipient, Recipient::Party(2));
        assert_eq!(t.outputs, vec![true]);
        let x = InputMatrix::parse(&[&["10", "11", "10", "10", "10"]]).unwrap();
        assert_eq!(run_protocol(&spec, &x).unwrap().outputs, vec![false]);
    }

    #[test]
    fn relay_graph_hides_even_tail_from_k() {
        let g = relay_graph(7).unwrap();
        assert_eq!(g.non_neighbors(7).into_iter().collect::<Vec<_>>(), vec![4, 5, 6, 7]);
        assert!(g.has_edge(2, 7) && g.has_edge(7, 3));
        assert_eq!(relay_filtering_set(7).unwrap()[0].set, vec![4, 6]);
    }

    #[test]
    fn myopic_chain_all_equal() {
        let spec = myopic_eq(5, 1, &Permutation::identity(5)).unwrap();
        let x = InputMatrix::parse(&[&["1", "1", "1", "1", "1"]]).unwrap();
        let t = run_protocol(&spec, &x).unwrap();
        let bits: Vec<String> = t
            .records
            .iter()
            .filter(|r| !r.payload.is_empty())
            .map(|r| r.payload.to_string())
            .collect();
        assert_eq!(bits, vec!["1", "1", "1"]);
        assert_eq!(t.outputs, vec![true]);
        assert_eq!(spec.output_party(), Some(5));
    }
}
