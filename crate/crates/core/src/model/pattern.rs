use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::Permutation;
use crate::model::graph::PartyId;
use crate::model::message::{MessageRecord, Recipient};

/// Communication pattern `LEN(t, i, j)` of an oblivious protocol.
///
/// Absent entries have length 0. Several records on the same
/// `(round, sender, recipient)` key (board protocols) are summed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommPattern {
    rounds: usize,
    len: BTreeMap<(usize, PartyId, Recipient), usize>,
}

impl CommPattern {
    pub fn new(rounds: usize) -> Self {
        CommPattern {
            rounds,
            len: BTreeMap::new(),
        }
    }

    pub fn with(mut self, round: usize, sender: PartyId, recipient: Recipient, bits: usize) -> Self {
        self.add(round, sender, recipient, bits);
        self
    }

    pub fn add(&mut self, round: usize, sender: PartyId, recipient: Recipient, bits: usize) {
        if bits > 0 {
            *self.len.entry((round, sender, recipient)).or_insert(0) += bits;
        }
        self.rounds = self.rounds.max(round);
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn len(&self, round: usize, sender: PartyId, recipient: Recipient) -> usize {
        self.len.get(&(round, sender, recipient)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, PartyId, Recipient), usize)> + '_ {
        self.len.iter().map(|(k, v)| (*k, *v))
    }

    pub fn total(&self) -> usize {
        self.len.values().sum()
    }

    /// `W(a, b)`: bits from `a` to `b` over all rounds.
    pub fn channel(&self, a: PartyId, b: Recipient) -> usize {
        self.len
            .iter()
            .filter(|((_, s, r), _)| *s == a && *r == b)
            .map(|(_, v)| v)
            .sum()
    }

    /// `LEN_π(t, i, j) = LEN(t, π⁻¹(i), π⁻¹(j))`.
    pub fn permuted(&self, pi: &Permutation) -> Self {
        let mut out = CommPattern::new(self.rounds);
        for (&(t, s, r), &bits) in &self.len {
            let r = match r {
                Recipient::Party(j) => Recipient::Party(pi.apply(j)),
                Recipient::Board => Recipient::Board,
            };
            out.add(t, pi.apply(s), r, bits);
        }
        out
    }

    /// Realized pattern of one execution.
    pub fn realized(records: &[MessageRecord]) -> Self {
        let mut out = CommPattern::new(0);
        for r in records {
            out.add(r.round, r.sender, r.recipient, r.payload.len());
        }
        out
    }

    /// First `(round, sender, recipient)` whose realized length differs.
    pub fn first_mismatch(&self, records: &[MessageRecord]) -> Option<String> {
        let realized = Self::realized(records);
        let keys = self.len.keys().chain(realized.len.keys());
        for key in keys {
            let want = self.len.get(key).copied().unwrap_or(0);
            let got = realized.len.get(key).copied().unwrap_or(0);
            if want != got {
                let (t, s, r) = key;
                return Some(format!(
                    "LEN({t},{s},{r}) = {want} but {got} bits were sent"
                ));
            }
        }
        None
    }
}
