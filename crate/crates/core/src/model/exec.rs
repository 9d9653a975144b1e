use crate::error::{Error, Result};
use crate::model::input::InputMatrix;
use crate::model::message::{MessageRecord, Recipient, Transcript};
use crate::model::protocol::{Model, OutputContext, PartyContext, ProtocolSpec};
use crate::model::view::View;

/// Runs `spec` on `x` round by round.
///
/// Rounds are synchronous: a round-`t` rule sees only rounds `< t`. Within
/// a round, records are ordered by sender and then by the order the
/// sender's rule emitted them.
pub fn run_protocol(spec: &ProtocolSpec, x: &InputMatrix) -> Result<Transcript> {
    if x.shape() != spec.shape() {
        return Err(Error::domain(format!(
            "{} expects inputs of shape {:?}, got {:?}",
            spec.name(),
            spec.shape(),
            x.shape()
        )));
    }
    let k = spec.k();
    let graph = spec.view_graph();
    let views = (1..=k)
        .map(|p| View::compute_all(graph, x, p))
        .collect::<Result<Vec<_>>>()?;
    let board = matches!(spec.model(), Model::Board);
    let rules = spec.rules();

    let mut records: Vec<MessageRecord> = Vec::new();
    let mut inbox: Vec<MessageRecord> = Vec::new();
    for round in 1..=spec.rounds() {
        let before = records.len();
        for party in 1..=k {
            let history: &[MessageRecord] = if board {
                &records[..before]
            } else {
                inbox.clear();
                inbox.extend(
                    records[..before]
                        .iter()
                        .filter(|r| r.recipient == Recipient::Party(party)),
                );
                &inbox
            };
            let ctx = PartyContext {
                party,
                round,
                view: &views[party - 1],
                history,
            };
            let outgoing = rules.messages(&ctx)?;
            for out in outgoing {
                spec.check_outgoing(round, party, &out)?;
                records.push(MessageRecord {
                    round,
                    sender: party,
                    recipient: out.recipient,
                    payload: out.payload,
                    label: out.label,
                });
            }
        }
    }

    let outputs = match spec.output_party() {
        None => {
            let blind = View::blind(k, spec.ell());
            rules.output(&OutputContext {
                party: None,
                view: &blind,
                history: &records,
            })?
        }
        Some(p) => {
            let received: Vec<MessageRecord> = records
                .iter()
                .filter(|r| r.recipient == Recipient::Party(p))
                .copied()
                .collect();
            rules.output(&OutputContext {
                party: Some(p),
                view: &views[p - 1],
                history: &received,
            })?
        }
    };
    if outputs.len() != spec.ell() {
        return Err(Error::Model(format!(
            "{} produced {} output bits for {} instances",
            spec.name(),
            outputs.len(),
            spec.ell()
        )));
    }
    Ok(Transcript::new(records, outputs))
}

/// Runs twice and fails if the two transcripts differ.
pub fn run_protocol_checked(spec: &ProtocolSpec, x: &InputMatrix) -> Result<Transcript> {
    let first = run_protocol(spec, x)?;
    let second = run_protocol(spec, x)?;
    if first != second {
        return Err(Error::Determinism(format!(
            "{} produced different transcripts on replay of input {x}",
            spec.name()
        )));
    }
    Ok(first)
}
