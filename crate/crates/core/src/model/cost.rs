use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::exec::run_protocol;
use crate::model::graph::PartyId;
use crate::model::input::{InputMatrix, Shape};
use crate::model::message::{Recipient, Transcript};
use crate::model::protocol::ProtocolSpec;

/// Default cap on protocol runs for exhaustive sweeps.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Upper bound on the number of protocol runs a sweep may perform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_runs: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_runs: DEFAULT_BUDGET,
        }
    }
}

impl Budget {
    pub fn new(max_runs: u64) -> Self {
        Budget { max_runs }
    }

    /// The domain size as a run count, or a budget error.
    pub fn admit(&self, required: u128) -> Result<u64> {
        if required > self.max_runs as u128 {
            return Err(Error::Budget {
                required,
                budget: self.max_runs,
            });
        }
        Ok(required as u64)
    }

    pub fn admit_shape(&self, shape: Shape) -> Result<u64> {
        self.admit(shape.domain_size())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelCost {
    pub from: PartyId,
    pub to: Recipient,
    pub bits: usize,
}

/// Worst-case costs over an input domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub domain_size: u128,
    pub worst_case_bits: usize,
    /// Lowest-index input attaining the worst case.
    pub worst_input: Option<u128>,
    /// `W(a, b)`: per channel, the most bits sent on any single input.
    pub channels: Vec<ChannelCost>,
    /// Per round, the most bits written on any single input.
    pub per_round: Vec<usize>,
    pub pattern_checked: bool,
}

impl CostReport {
    pub fn channel(&self, from: PartyId, to: Recipient) -> usize {
        self.channels
            .iter()
            .find(|c| c.from == from && c.to == to)
            .map(|c| c.bits)
            .unwrap_or(0)
    }
}

/// Associative accumulator behind [`CostReport`].
#[derive(Clone, Debug, Default)]
pub(crate) struct CostAccumulator {
    runs: u128,
    worst: usize,
    worst_input: Option<u128>,
    channels: BTreeMap<(PartyId, Recipient), usize>,
    per_round: Vec<usize>,
}

impl CostAccumulator {
    pub(crate) fn observe(&mut self, index: u128, t: &Transcript) {
        self.runs += 1;
        if t.total_bits > self.worst || self.worst_input.is_none() {
            self.worst = t.total_bits;
            self.worst_input = Some(index);
        } else if t.total_bits == self.worst {
            self.worst_input = self.worst_input.map(|w| w.min(index));
        }
        let mut per_channel: BTreeMap<(PartyId, Recipient), usize> = BTreeMap::new();
        let mut per_round = vec![0usize; t.records.iter().map(|r| r.round).max().unwrap_or(0)];
        for r in &t.records {
            *per_channel.entry((r.sender, r.recipient)).or_insert(0) += r.payload.len();
            per_round[r.round - 1] += r.payload.len();
        }
        for (key, bits) in per_channel {
            let slot = self.channels.entry(key).or_insert(0);
            *slot = (*slot).max(bits);
        }
        merge_max(&mut self.per_round, &per_round);
    }

    pub(crate) fn merge(mut self, other: CostAccumulator) -> CostAccumulator {
        self.runs += other.runs;
        match (self.worst_input, other.worst_input) {
            (_, None) => {}
            (None, Some(_)) => {
                self.worst = other.worst;
                self.worst_input = other.worst_input;
            }
            (Some(a), Some(b)) => {
                if other.worst > self.worst || (other.worst == self.worst && b < a) {
                    self.worst = other.worst;
                    self.worst_input = Some(b);
                }
            }
        }
        for (key, bits) in other.channels {
            let slot = self.channels.entry(key).or_insert(0);
            *slot = (*slot).max(bits);
        }
        merge_max(&mut self.per_round, &other.per_round);
        self
    }

    pub(crate) fn report(&self, pattern_checked: bool) -> CostReport {
        CostReport {
            domain_size: self.runs,
            worst_case_bits: self.worst,
            worst_input: self.worst_input,
            channels: self
                .channels
                .iter()
                .map(|(&(from, to), &bits)| ChannelCost { from, to, bits })
                .collect(),
            per_round: self.per_round.clone(),
            pattern_checked,
        }
    }
}

fn merge_max(into: &mut Vec<usize>, from: &[usize]) {
    if into.len() < from.len() {
        into.resize(from.len(), 0);
    }
    for (a, b) in into.iter_mut().zip(from) {
        *a = (*a).max(*b);
    }
}

/// A failure found during a sweep, tagged with the input index that caused
/// it so merges can keep the lowest one.
pub(crate) struct SweepFailure<F> {
    pub index: u128,
    pub failure: F,
}

/// Folds `step` over `0..size` on the rayon pool. `step` returning an error
/// stops its own chunk; the merged result carries the lowest failing index.
pub(crate) fn sweep<A, F>(
    size: u64,
    init: impl Fn() -> A + Sync + Send,
    step: impl Fn(&mut A, u64) -> std::result::Result<(), F> + Sync + Send,
    merge: impl Fn(A, A) -> A + Sync + Send,
) -> std::result::Result<A, SweepFailure<F>>
where
    A: Send,
    F: Send,
{
    type Acc<A, F> = std::result::Result<A, SweepFailure<F>>;
    (0..size)
        .into_par_iter()
        .fold(
            || -> Acc<A, F> { Ok(init()) },
            |acc, idx| match acc {
                Ok(mut a) => match step(&mut a, idx) {
                    Ok(()) => Ok(a),
                    Err(failure) => Err(SweepFailure {
                        index: idx as u128,
                        failure,
                    }),
                },
                err => err,
            },
        )
        .reduce(
            || Ok(init()),
            |a, b| match (a, b) {
                (Ok(a), Ok(b)) => Ok(merge(a, b)),
                (Err(e), Ok(_)) | (Ok(_), Err(e)) => Err(e),
                (Err(e1), Err(e2)) => Err(if e1.index <= e2.index { e1 } else { e2 }),
            },
        )
}

/// Worst-case cost and per-channel matrix of `spec` over all `2^{knℓ}`
/// inputs. Protocols that declare a pattern are checked against it on
/// every input.
pub fn measure_cost(spec: &ProtocolSpec, budget: Budget) -> Result<CostReport> {
    let shape = spec.shape();
    let size = budget.admit_shape(shape)?;
    let pattern = spec.pattern();
    let acc = sweep(
        size,
        CostAccumulator::default,
        |acc, idx| {
            let x = InputMatrix::from_index(shape, idx as u128)?;
            let t = run_protocol(spec, &x)?;
            if let Some(p) = pattern {
                if let Some(detail) = p.first_mismatch(&t.records) {
                    return Err(Error::Obliviousness {
                        input: x.to_string(),
                        detail,
                    });
                }
            }
            acc.observe(idx as u128, &t);
            Ok(())
        },
        CostAccumulator::merge,
    )
    .map_err(|f| f.failure)?;
    Ok(acc.report(pattern.is_some()))
}
