use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::model::{
    board_outputs, CommPattern, Label, MessageRecord, Model, OutputContext, Outgoing,
    PartyContext, PartyId, ProtocolSpec, Recipient, Rules, View,
};

/// One XOR block: in `round`, `sender` writes the XOR of its messages to
/// each `(protocol, recipient)` member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub round: usize,
    pub sender: PartyId,
    pub members: Vec<(usize, PartyId)>,
}

/// How a recipient trims its own message out of an XOR block.
#[derive(Clone, Debug)]
pub(crate) enum Decoder {
    /// Lengths come from the declared patterns.
    Pattern,
    /// Per `(protocol, round)`, every message the protocol can send then.
    PrefixFree(HashMap<(usize, usize), Vec<BitString>>),
}

/// Runs `ℓ` single-instance point-to-point protocols side by side on a
/// board, instance `u` under protocol `u`, merging grouped messages into
/// XOR blocks. A final round carries one output bit per instance.
pub(crate) struct Engine {
    sources: Vec<ProtocolSpec>,
    groups: Vec<Group>,
    /// `(round, sender, protocol, recipient)` → group.
    member_group: HashMap<(usize, PartyId, usize, PartyId), usize>,
    /// `(round, sender)` → groups it writes.
    sender_groups: HashMap<(usize, PartyId), Vec<usize>>,
    /// `(protocol, recipient)` → rounds in which it receives through a block.
    demuxed_rounds: HashMap<(usize, PartyId), Vec<usize>>,
    rounds: usize,
    decoder: Decoder,
}

impl Engine {
    pub(crate) fn new(sources: Vec<ProtocolSpec>, mut groups: Vec<Group>, decoder: Decoder) -> Result<Self> {
        let first = sources
            .first()
            .ok_or_else(|| Error::domain("nothing to combine: no source protocols"))?;
        let (k, n) = (first.k(), first.n());
        let rounds = sources.iter().map(ProtocolSpec::rounds).max().unwrap_or(0);
        for (i, s) in sources.iter().enumerate() {
            if s.ell() != 1 || s.k() != k || s.n() != n {
                return Err(Error::domain(format!(
                    "source {} has shape {:?}; every source must be one instance with k={k}, n={n}",
                    i + 1,
                    s.shape()
                )));
            }
            if matches!(s.model(), Model::Board) || s.output_party().is_none() {
                return Err(Error::Model(format!(
                    "source {} must be a point-to-point protocol with an output party",
                    i + 1
                )));
            }
        }
        let mut member_group = HashMap::new();
        let mut sender_groups: HashMap<_, Vec<usize>> = HashMap::new();
        let mut demuxed_rounds: HashMap<_, Vec<usize>> = HashMap::new();
        for (g, group) in groups.iter_mut().enumerate() {
            group.members.sort_unstable();
            group.members.dedup();
            if group.members.is_empty() {
                return Err(Error::Internal(format!("group {g} has no members")));
            }
            for &(u, r) in &group.members {
                if u == 0 || u > sources.len() || r == group.sender {
                    return Err(Error::Internal(format!("group {g} has a bad member ({u}, {r})")));
                }
                if member_group.insert((group.round, group.sender, u, r), g).is_some() {
                    return Err(Error::Internal(format!(
                        "message P{}→P{r} of protocol {u} in round {} is in two groups",
                        group.sender, group.round
                    )));
                }
                demuxed_rounds.entry((u, r)).or_default().push(group.round);
            }
            sender_groups.entry((group.round, group.sender)).or_default().push(g);
        }
        Ok(Engine {
            sources,
            groups,
            member_group,
            sender_groups,
            demuxed_rounds,
            rounds,
            decoder,
        })
    }

    pub(crate) fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub(crate) fn rounds(&self) -> usize {
        self.rounds
    }

    /// The compiled pattern, when every source declares one.
    pub(crate) fn pattern(&self) -> Option<CommPattern> {
        let mut out = CommPattern::new(self.rounds + 1);
        for (i, src) in self.sources.iter().enumerate() {
            for ((t, s, r), bits) in src.pattern()?.entries() {
                if let Recipient::Party(r) = r {
                    if !self.member_group.contains_key(&(t, s, i + 1, r)) {
                        out.add(t, s, Recipient::Board, bits);
                    }
                }
            }
        }
        for g in &self.groups {
            let mut block = 0;
            for &(u, r) in &g.members {
                block = block.max(self.sources[u - 1].pattern()?.len(g.round, g.sender, Recipient::Party(r)));
            }
            out.add(g.round, g.sender, Recipient::Board, block);
        }
        for src in &self.sources {
            out.add(self.rounds + 1, src.output_party()?, Recipient::Board, 1);
        }
        Some(out)
    }

    fn source_view(&self, observer: &View, u: usize, owner: PartyId) -> Result<View> {
        View::simulate(observer, self.sources[u - 1].view_graph(), owner, u)
    }

    /// What `party` received in protocol `u`, rebuilt from the board using
    /// only `party`'s own view.
    pub(crate) fn history(
        &self,
        party: PartyId,
        u: usize,
        board: &[MessageRecord],
        view: &View,
    ) -> Result<Vec<MessageRecord>> {
        let mut out = Vec::new();
        for rec in board {
            let payload = match rec.label {
                Label::Routed { protocol, recipient } if protocol == u && recipient == party => rec.payload,
                Label::Multiplexed { group } => {
                    let g = self
                        .groups
                        .get(group)
                        .ok_or_else(|| Error::Internal(format!("unknown group {group}")))?;
                    if !g.members.contains(&(u, party)) {
                        continue;
                    }
                    self.demux(g, rec.payload, u, party, board, view)?
                }
                _ => continue,
            };
            out.push(MessageRecord {
                round: rec.round,
                sender: rec.sender,
                recipient: Recipient::Party(party),
                payload,
                label: Label::Plain,
            });
        }
        Ok(out)
    }

    /// `sender`'s incoming messages in protocol `u` before `round`, which
    /// must all be plain.
    fn plain_history(&self, u: usize, sender: PartyId, round: usize, board: &[MessageRecord]) -> Result<Vec<MessageRecord>> {
        if let Some(rounds) = self.demuxed_rounds.get(&(u, sender)) {
            if let Some(r) = rounds.iter().find(|&&r| r < round) {
                return Err(Error::Soundness(format!(
                    "simulating P{sender} in protocol {u} needs its round-{r} message, which was multiplexed"
                )));
            }
        }
        Ok(board
            .iter()
            .filter(|rec| {
                rec.round < round
                    && matches!(rec.label, Label::Routed { protocol, recipient } if protocol == u && recipient == sender)
            })
            .map(|rec| MessageRecord {
                recipient: Recipient::Party(sender),
                label: Label::Plain,
                ..*rec
            })
            .collect())
    }

    /// Recomputes `sender`'s message to `recipient` in protocol `u` from
    /// what `observer` sees.
    fn simulate_message(
        &self,
        u: usize,
        sender: PartyId,
        recipient: PartyId,
        round: usize,
        board: &[MessageRecord],
        observer: &View,
    ) -> Result<BitString> {
        let history = self.plain_history(u, sender, round, board)?;
        let view = self.source_view(observer, u, sender)?;
        let out = self.sources[u - 1].rules().messages(&PartyContext {
            party: sender,
            round,
            view: &view,
            history: &history,
        })?;
        out.iter()
            .filter(|o| o.recipient == Recipient::Party(recipient))
            .try_fold(BitString::empty(), |acc, o| acc.concat(&o.payload))
    }

    fn demux(
        &self,
        g: &Group,
        block: BitString,
        u: usize,
        party: PartyId,
        board: &[MessageRecord],
        observer: &View,
    ) -> Result<BitString> {
        let mut residual = block;
        for &(u2, r2) in g.members.iter().filter(|&&m| m != (u, party)) {
            let m = self.simulate_message(u2, g.sender, r2, g.round, board, observer)?;
            if m.len() > block.len() {
                return Err(Error::Soundness(format!(
                    "reconstructed message {m} is longer than its block {block}"
                )));
            }
            residual = residual.xor_padded(&m);
        }
        let zero_tail = |keep: usize| residual.prefix(keep).count_ones() == residual.count_ones();
        let own = match &self.decoder {
            Decoder::Pattern => {
                let len = self.sources[u - 1]
                    .pattern()
                    .map(|p| p.len(g.round, g.sender, Recipient::Party(party)))
                    .unwrap_or(0);
                (len <= residual.len() && zero_tail(len)).then(|| residual.prefix(len))
            }
            Decoder::PrefixFree(books) => books
                .get(&(u, g.round))
                .and_then(|book| book.iter().find(|c| c.is_prefix_of(&residual) && zero_tail(c.len())))
                .copied(),
        };
        own.ok_or_else(|| {
            Error::Soundness(format!(
                "P{party} could not decode its protocol-{u} message from block {block} (residual {residual})"
            ))
        })
    }
}

impl Rules for Engine {
    fn messages(&self, ctx: &PartyContext<'_>) -> Result<Vec<Outgoing>> {
        let (p, t) = (ctx.party, ctx.round);
        if t > self.rounds {
            let mut out = Vec::new();
            for (i, src) in self.sources.iter().enumerate() {
                if src.output_party() != Some(p) {
                    continue;
                }
                let u = i + 1;
                let history = self.history(p, u, ctx.history, ctx.view)?;
                let view = self.source_view(ctx.view, u, p)?;
                let bits = src.rules().output(&OutputContext {
                    party: Some(p),
                    view: &view,
                    history: &history,
                })?;
                let [bit] = bits[..] else {
                    return Err(Error::Model(format!("{} gave {} output bits", src.name(), bits.len())));
                };
                out.push(Outgoing::to_board(BitString::bit(bit), Label::Output { instance: u }));
            }
            return Ok(out);
        }

        let mut items: Vec<((usize, PartyId), Outgoing)> = Vec::new();
        let mut grouped: BTreeMap<(usize, PartyId), BitString> = BTreeMap::new();
        for (i, src) in self.sources.iter().enumerate() {
            let u = i + 1;
            if t > src.rounds() {
                continue;
            }
            let history = if t == 1 { Vec::new() } else { self.history(p, u, ctx.history, ctx.view)? };
            let view = self.source_view(ctx.view, u, p)?;
            let outs = src.rules().messages(&PartyContext {
                party: p,
                round: t,
                view: &view,
                history: &history,
            })?;
            for o in outs {
                src.check_outgoing(t, p, &o)?;
                let Recipient::Party(r) = o.recipient else {
                    return Err(Error::Model(format!("{} wrote on a board", src.name())));
                };
                if self.member_group.contains_key(&(t, p, u, r)) {
                    let slot = grouped.entry((u, r)).or_insert_with(BitString::empty);
                    *slot = slot.concat(&o.payload)?;
                } else {
                    let label = Label::Routed { protocol: u, recipient: r };
                    items.push(((u, r), Outgoing::to_board(o.payload, label)));
                }
            }
        }
        for &g in self.sender_groups.get(&(t, p)).map(Vec::as_slice).unwrap_or_default() {
            let members = &self.groups[g].members;
            let block = members.iter().fold(BitString::empty(), |acc, m| {
                acc.xor_padded(grouped.get(m).unwrap_or(&BitString::empty()))
            });
            items.push((members[0], Outgoing::to_board(block, Label::Multiplexed { group: g })));
        }
        items.sort_by_key(|(key, _)| *key);
        Ok(items.into_iter().map(|(_, o)| o).collect())
    }

    fn output(&self, ctx: &OutputContext<'_>) -> Result<Vec<bool>> {
        board_outputs(ctx.history, self.sources.len())
    }
}
