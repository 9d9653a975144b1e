use std::collections::BTreeSet;
use std::sync::Arc;

use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::model::{
    CommPattern, MessageRecord, Model, OutputContext, Outgoing, PartyContext, ProtocolSpec,
    Recipient, Rules,
};

/// `π(Q)`: party `i` plays `π⁻¹(i)`'s role on the relabeled input.
struct Permuted {
    inner: Arc<dyn Rules>,
    pi: Permutation,
    inv: Permutation,
}

impl Permuted {
    fn relabel_recipient(pi: &Permutation, r: Recipient) -> Recipient {
        match r {
            Recipient::Party(j) => Recipient::Party(pi.apply(j)),
            Recipient::Board => Recipient::Board,
        }
    }

    /// Records as the inner protocol would have seen them.
    fn inner_history(&self, history: &[MessageRecord]) -> Vec<MessageRecord> {
        history
            .iter()
            .map(|r| MessageRecord {
                sender: self.inv.apply(r.sender),
                recipient: Self::relabel_recipient(&self.inv, r.recipient),
                ..*r
            })
            .collect()
    }
}

impl Rules for Permuted {
    fn messages(&self, ctx: &PartyContext<'_>) -> Result<Vec<Outgoing>> {
        let view = ctx.view.relabeled(&self.pi);
        let history = self.inner_history(ctx.history);
        let out = self.inner.messages(&PartyContext {
            party: self.inv.apply(ctx.party),
            round: ctx.round,
            view: &view,
            history: &history,
        })?;
        Ok(out
            .into_iter()
            .map(|o| Outgoing {
                recipient: Self::relabel_recipient(&self.pi, o.recipient),
                ..o
            })
            .collect())
    }

    fn output(&self, ctx: &OutputContext<'_>) -> Result<Vec<bool>> {
        let view = ctx.view.relabeled(&self.pi);
        let history = self.inner_history(ctx.history);
        self.inner.output(&OutputContext {
            party: ctx.party.map(|p| self.inv.apply(p)),
            view: &view,
            history: &history,
        })
    }
}

/// `π(Q)`, a protocol in `NOF_{G_π}` whose messages on `x` are `Q`'s
/// messages on the relabeled input, with senders and recipients mapped
/// through `π`. Its pattern is `LEN^Q_π`.
pub fn permute_protocol(q: &ProtocolSpec, pi: &Permutation) -> Result<ProtocolSpec> {
    pi.check_arity(q.k())?;
    let model = match q.model() {
        Model::Restricted(g) => Model::Restricted(g.permuted(pi)?),
        Model::Board => Model::Board,
        Model::Myopic(_) => {
            return Err(Error::Model(
                "myopic protocols are combined by chain order, not permuted".into(),
            ))
        }
    };
    let rules = Permuted {
        inner: q.shared_rules(),
        pi: pi.clone(),
        inv: pi.inverse(),
    };
    let name = if pi.is_identity() {
        q.name().to_string()
    } else {
        format!("{pi}({})", q.name())
    };
    let mut spec = ProtocolSpec::new(name, model, q.shape(), q.rounds(), Arc::new(rules))?;
    if let Some(o) = q.output_party() {
        spec = spec.with_output_party(pi.apply(o))?;
    }
    if let Some(p) = q.pattern() {
        spec = spec.with_pattern(p.permuted(pi));
    }
    Ok(spec)
}

fn same_lengths(a: &CommPattern, b: &CommPattern) -> bool {
    let keys: BTreeSet<_> = a.entries().chain(b.entries()).map(|(key, _)| key).collect();
    keys.into_iter().all(|(t, s, r)| a.len(t, s, r) == b.len(t, s, r))
}

/// Whether `q2`'s pattern is `q`'s relabeled by `π`:
/// `LEN^{q2}(t, i, j) = LEN^q(t, π⁻¹(i), π⁻¹(j))`.
pub fn check_pattern_robust(q: &ProtocolSpec, q2: &ProtocolSpec, pi: &Permutation) -> Result<bool> {
    pi.check_arity(q.k())?;
    let need = |s: &ProtocolSpec| {
        s.pattern().cloned().ok_or_else(|| {
            Error::Precondition(format!("{} is not oblivious: no pattern declared", s.name()))
        })
    };
    let (a, b) = (need(q)?, need(q2)?);
    Ok(q.k() == q2.k() && q.rounds() == q2.rounds() && same_lengths(&a.permuted(pi), &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{run_protocol, InputMatrix, TruthTable};
    use crate::protocols::{forwarding, forwarding_permutation, forwarding_variant, eq_relay};
    use crate::verifier::{exhaustive_verify, VerifyOptions};

    #[test]
    fn identity_changes_nothing() {
        let q = eq_relay(5, 1).unwrap();
        let p = permute_protocol(&q, &Permutation::identity(5)).unwrap();
        for idx in 0..32 {
            let x = InputMatrix::from_index(q.shape(), idx).unwrap();
            assert_eq!(run_protocol(&q, &x).unwrap(), run_protocol(&p, &x).unwrap());
        }
    }

    #[test]
    fn permuted_relay_is_correct() {
        let q = eq_relay(5, 1).unwrap();
        let pi = Permutation::new(vec![1, 4, 3, 2, 5]).unwrap();
        let p = permute_protocol(&q, &pi).unwrap();
        assert_eq!(p.output_party(), Some(4));
        let x = InputMatrix::parse(&[&["1", "1", "1", "1", "1"]]).unwrap();
        let t = run_protocol(&p, &x).unwrap();
        assert_eq!((t.records[0].sender, t.records[0].recipient), (5, Recipient::Party(4)));
        let f = TruthTable::equality(5, 1).unwrap();
        let r = exhaustive_verify(&p, &f, VerifyOptions::default()).unwrap();
        assert!(r.correct && r.pattern_checked);
        assert!(check_pattern_robust(&q, &p, &pi).unwrap());
    }

    #[test]
    fn forwarding_variants_are_robust() {
        let f = crate::verifier::random_truth_table(4, 1, 8).unwrap();
        let q = forwarding(&f, 4).unwrap();
        for i in 1..=3 {
            let pi = forwarding_permutation(4, i).unwrap();
            let qi = forwarding_variant(&f, 4, i).unwrap();
            assert!(check_pattern_robust(&q, &qi, &pi).unwrap());
            // π(Q) itself is not correct for asymmetric f, but has the same pattern
            assert!(check_pattern_robust(&q, &permute_protocol(&q, &pi).unwrap(), &pi).unwrap());
        }
    }

    #[test]
    fn extra_bit_breaks_robustness() {
        let q = eq_relay(5, 1).unwrap();
        let pattern = q.pattern().unwrap().clone().with(1, 1, Recipient::Party(3), 1);
        let q2 = q.clone().with_pattern(pattern);
        assert!(!check_pattern_robust(&q, &q2, &Permutation::identity(5)).unwrap());
    }

    #[test]
    fn missing_pattern_is_a_precondition_error() {
        let q = crate::protocols::eq_two_bit(3, 1).unwrap();
        let bare = ProtocolSpec::new("bare", Model::Board, q.shape(), 2, q.shared_rules()).unwrap();
        assert!(matches!(
            check_pattern_robust(&q, &bare, &Permutation::identity(3)),
            Err(Error::Precondition(_))
        ));
    }
}
