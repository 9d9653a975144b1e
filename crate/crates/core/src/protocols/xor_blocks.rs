use std::sync::Arc;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::model::{
    board_outputs, CommPattern, Label, Model, OutputContext, Outgoing, PartyContext, ProtocolSpec,
    Recipient, Rules, Shape, TruthTable,
};

/// Blocks of `k - 1` instances; block `b` uses rounds `2b - 1` and `2b`.
///
/// In the first round of a block `P_k` writes `M`, the XOR of the diagonal
/// inputs `x_{i,i}`. In the second, each `P_i` strips the diagonal entries
/// it can see from `M`, recovers its own forehead on instance `i`, and
/// writes `f` of that instance.
struct XorBlocks {
    f: TruthTable,
    k: usize,
    blocks: usize,
}

impl XorBlocks {
    fn diagonal(&self, ctx: &PartyContext<'_>, first: usize, skip: usize) -> Result<BitString> {
        let mut m = BitString::zeros(self.f.n())?;
        for i in (1..self.k).filter(|&i| i != skip) {
            m = m.xor_padded(&ctx.view.get_at(first + i, i)?);
        }
        Ok(m)
    }
}

impl Rules for XorBlocks {
    fn messages(&self, ctx: &PartyContext<'_>) -> Result<Vec<Outgoing>> {
        let block = ctx.round.div_ceil(2);
        if block == 0 || block > self.blocks {
            return Ok(Vec::new());
        }
        let first = (block - 1) * (self.k - 1);
        let announcing = ctx.round % 2 == 1;
        if announcing {
            if ctx.party != self.k {
                return Ok(Vec::new());
            }
            let m = self.diagonal(ctx, first, 0)?;
            return Ok(vec![Outgoing::to_board(m, Label::Plain)]);
        }
        if ctx.party == self.k {
            return Ok(Vec::new());
        }
        let i = ctx.party;
        let m = ctx
            .received(self.k, ctx.round - 1)
            .ok_or_else(|| Error::Model(format!("P{i} found no diagonal word in round {}", ctx.round - 1)))?;
        let own = m.xor_padded(&self.diagonal(ctx, first, i)?);
        let instance = first + i;
        let args = (1..=self.k)
            .map(|j| if j == i { Ok(own) } else { ctx.view.get_at(instance, j) })
            .collect::<Result<Vec<_>>>()?;
        let bit = self.f.eval(&args)?;
        Ok(vec![Outgoing::to_board(BitString::bit(bit), Label::Output { instance })])
    }

    fn output(&self, ctx: &OutputContext<'_>) -> Result<Vec<bool>> {
        board_outputs(ctx.history, self.blocks * (self.k - 1))
    }
}

/// `f` on `ell` instances, in `ell / (k - 1)` sequential blocks of
/// [`diagonal_xor`]. Cost `ell * n / (k - 1) + ell`.
pub fn blocked_xor(f: &TruthTable, k: usize, ell: usize) -> Result<ProtocolSpec> {
    if f.k() != k {
        return Err(Error::domain(format!("f has arity {}, expected {k}", f.k())));
    }
    if k < 2 || ell == 0 || !ell.is_multiple_of(k - 1) {
        return Err(Error::domain(format!(
            "{ell} instances cannot be split into blocks of k - 1 = {}",
            k.saturating_sub(1)
        )));
    }
    let n = f.n();
    let blocks = ell / (k - 1);
    let mut pattern = CommPattern::new(2 * blocks);
    for b in 1..=blocks {
        pattern.add(2 * b - 1, k, Recipient::Board, n);
        for i in 1..k {
            pattern.add(2 * b, i, Recipient::Board, 1);
        }
    }
    let rules = XorBlocks {
        f: f.clone(),
        k,
        blocks,
    };
    let name = if blocks == 1 { "diagonal-xor" } else { "blocked-xor" };
    Ok(ProtocolSpec::new(name, Model::Board, Shape::new(ell, k, n)?, 2 * blocks, Arc::new(rules))?
        .with_pattern(pattern))
}

/// `f` on `k - 1` instances with `n + k - 1` bits.
pub fn diagonal_xor(f: &TruthTable, k: usize) -> Result<ProtocolSpec> {
    blocked_xor(f, k, k.saturating_sub(1).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{run_protocol, InputMatrix};

    #[test]
    fn all_zero_inputs_give_zero_word() {
        let f = TruthTable::from_fn(3, 2, |xs| xs[0].value() == 0).unwrap();
        let spec = diagonal_xor(&f, 3).unwrap();
        let x = InputMatrix::parse(&[&["00", "00", "00"], &["00", "00", "00"]]).unwrap();
        let t = run_protocol(&spec, &x).unwrap();
        assert_eq!(t.records[0].payload.to_string(), "00");
        assert_eq!(t.outputs, vec![true, true]);
        assert_eq!(t.total_bits, 4);
    }

    #[test]
    fn one_block_matches_diagonal_xor() {
        let f = TruthTable::equality(3, 1).unwrap();
        let a = diagonal_xor(&f, 3).unwrap();
        let b = blocked_xor(&f, 3, 2).unwrap();
        let x = InputMatrix::parse(&[&["1", "0", "1"], &["0", "0", "0"]]).unwrap();
        assert_eq!(run_protocol(&a, &x).unwrap(), run_protocol(&b, &x).unwrap());
    }

    #[test]
    fn rejects_bad_block_counts_and_arity() {
        let f = TruthTable::equality(3, 1).unwrap();
        assert!(blocked_xor(&f, 3, 3).is_err());
        assert!(blocked_xor(&f, 4, 3).is_err());
    }
}
