use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::model::{
    measure_cost, run_protocol, run_protocol_checked, sweep, Budget, InputMatrix, MessageRecord,
    Model, OutputContext, Outgoing, PartyContext, ProtocolSpec, Recipient, View,
};

/// What [`legality_fuzz`] exercised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub inputs: u64,
    /// Single-bit flips of hidden inputs replayed against a rule.
    pub flips: u64,
}

/// Exhaustive conformance summary of one protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub protocol: String,
    pub inputs: u128,
    pub worst_case_bits: usize,
    /// A declared pattern matched every run.
    pub pattern_checked: bool,
    pub flips: u64,
}

fn history_at(spec: &ProtocolSpec, records: &[MessageRecord], party: usize, round: usize) -> Vec<MessageRecord> {
    let board = matches!(spec.model(), Model::Board);
    records
        .iter()
        .filter(|r| r.round < round && (board || r.recipient == Recipient::Party(party)))
        .copied()
        .collect()
}

fn flip(x: &InputMatrix, instance: usize, party: usize, bit: usize) -> Result<InputMatrix> {
    let old = x.get(instance, party);
    let mask = 1u64 << (old.len() - 1 - bit);
    let mut y = x.clone();
    y.set(instance, party, BitString::from_value(old.value() ^ mask, old.len())?)?;
    Ok(y)
}

/// Replays every rule invocation of every run with each hidden input bit
/// flipped, rebuilding the view from the flipped input. Any change in a
/// message or output means a rule depended on something outside its view.
pub fn legality_fuzz(spec: &ProtocolSpec, budget: Budget) -> Result<FuzzReport> {
    let size = budget.admit_shape(spec.shape())?;
    let shape = spec.shape();
    let graph = spec.view_graph();
    let rules = spec.rules();
    let messages = |view: &View, party, round, history: &[MessageRecord]| -> Result<Vec<Outgoing>> {
        rules.messages(&PartyContext {
            party,
            round,
            view,
            history,
        })
    };
    sweep(
        size,
        FuzzReport::default,
        |acc: &mut FuzzReport, idx| -> Result<()> {
            let x = InputMatrix::from_index(shape, idx as u128)?;
            let t = run_protocol(spec, &x)?;
            acc.inputs += 1;
            for p in 1..=shape.k {
                let view = View::compute_all(graph, &x, p)?;
                let histories: Vec<Vec<MessageRecord>> =
                    (1..=spec.rounds()).map(|r| history_at(spec, &t.records, p, r)).collect();
                let base = (1..=spec.rounds())
                    .map(|r| messages(&view, p, r, &histories[r - 1]))
                    .collect::<Result<Vec<_>>>()?;
                let outputs_here = spec.output_party() == Some(p);
                let received = history_at(spec, &t.records, p, spec.rounds() + 1);
                for i in 1..=shape.ell {
                    for j in (1..=shape.k).filter(|&j| !graph.has_edge(p, j)) {
                        for b in 0..shape.n {
                            let y = flip(&x, i, j, b)?;
                            let flipped = View::compute_all(graph, &y, p)?;
                            for r in 1..=spec.rounds() {
                                acc.flips += 1;
                                if messages(&flipped, p, r, &histories[r - 1])? != base[r - 1] {
                                    return Err(Error::Legality {
                                        party: p,
                                        instance: i,
                                        input: j,
                                    });
                                }
                            }
                            if outputs_here {
                                let out = rules.output(&OutputContext {
                                    party: Some(p),
                                    view: &flipped,
                                    history: &received,
                                })?;
                                if out != t.outputs {
                                    return Err(Error::Legality {
                                        party: p,
                                        instance: i,
                                        input: j,
                                    });
                                }
                            }
                        }
                    }
                }
            }
            Ok(())
        },
        |a, b| FuzzReport {
            inputs: a.inputs + b.inputs,
            flips: a.flips + b.flips,
        },
    )
    .map_err(|e| e.failure)
}

/// Replays every input twice and fails on any difference.
pub fn determinism_check(spec: &ProtocolSpec, budget: Budget) -> Result<u64> {
    let size = budget.admit_shape(spec.shape())?;
    let shape = spec.shape();
    sweep(
        size,
        || 0u64,
        |n, idx| -> Result<()> {
            run_protocol_checked(spec, &InputMatrix::from_index(shape, idx as u128)?)?;
            *n += 1;
            Ok(())
        },
        |a, b| a + b,
    )
    .map_err(|e| e.failure)
}

/// Pattern conformance, legality fuzzing and replay determinism over the
/// full domain.
pub fn audit(spec: &ProtocolSpec, budget: Budget) -> Result<AuditReport> {
    let cost = measure_cost(spec, budget)?;
    let fuzz = legality_fuzz(spec, budget)?;
    determinism_check(spec, budget)?;
    Ok(AuditReport {
        protocol: spec.name().to_string(),
        inputs: cost.domain_size,
        worst_case_bits: cost.worst_case_bits,
        pattern_checked: cost.pattern_checked,
        flips: fuzz.flips,
    })
}
