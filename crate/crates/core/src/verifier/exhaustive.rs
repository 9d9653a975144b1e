use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    run_protocol, sweep, Budget, ChannelCost, CostAccumulator, InputMatrix, ProtocolSpec,
    TruthTable,
};
use crate::verifier::oracle::oracle_evaluate;

/// An input on which a protocol disagreed with the oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: u128,
    pub input: String,
    pub expected: Vec<bool>,
    pub actual: Vec<bool>,
    pub transcript: Vec<String>,
}

/// Outcome of checking a protocol against a truth table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub protocol: String,
    /// `false` for sampled runs, which prove nothing.
    pub exhaustive: bool,
    /// Inputs checked. Equals `2^{knℓ}` after a complete exhaustive run.
    pub domain_size: u128,
    pub budget: u64,
    pub correct: bool,
    pub counterexample: Option<Counterexample>,
    /// `None` when a counterexample cut the sweep short.
    pub measured_worst_case: Option<usize>,
    pub worst_input: Option<String>,
    pub predicted_bound: Option<usize>,
    /// Per-channel worst case `W(a, b)`.
    pub per_channel: Vec<ChannelCost>,
    pub per_round: Vec<usize>,
    /// `ℓ` times the single-instance cost, for comparison.
    pub naive_baseline: Option<usize>,
    pub pattern_checked: bool,
    pub seed: Option<u64>,
}

impl VerificationReport {
    /// Correct, and within the predicted bound when one was supplied.
    pub fn passed(&self) -> bool {
        self.correct
            && match (self.predicted_bound, self.measured_worst_case) {
                (Some(bound), Some(measured)) => measured <= bound,
                _ => true,
            }
    }

    /// Measured cost equals the prediction exactly.
    pub fn tight(&self) -> bool {
        self.predicted_bound.is_some() && self.predicted_bound == self.measured_worst_case
    }
}

/// Extra facts to record alongside the measurement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub budget: Budget,
    pub predicted_bound: Option<usize>,
    pub naive_baseline: Option<usize>,
}

enum Failure {
    Wrong(Box<Counterexample>),
    Fault(Error),
}

fn check_input(
    spec: &ProtocolSpec,
    f: &TruthTable,
    index: u128,
    acc: &mut CostAccumulator,
) -> std::result::Result<(), Failure> {
    let x = InputMatrix::from_index(spec.shape(), index).map_err(Failure::Fault)?;
    let t = run_protocol(spec, &x).map_err(Failure::Fault)?;
    if let Some(detail) = spec.pattern().and_then(|p| p.first_mismatch(&t.records)) {
        return Err(Failure::Fault(Error::Obliviousness {
            input: x.to_string(),
            detail,
        }));
    }
    let expected = oracle_evaluate(f, &x).map_err(Failure::Fault)?;
    if t.outputs != expected {
        return Err(Failure::Wrong(Box::new(Counterexample {
            index,
            input: x.to_string(),
            expected,
            actual: t.outputs,
            transcript: t.records.iter().map(ToString::to_string).collect(),
        })));
    }
    acc.observe(index, &t);
    Ok(())
}

fn check_table(spec: &ProtocolSpec, f: &TruthTable) -> Result<()> {
    if (f.k(), f.n()) != (spec.k(), spec.n()) {
        return Err(Error::domain(format!(
            "{} runs on k={}, n={}; table has k={}, n={}",
            spec.name(),
            spec.k(),
            spec.n(),
            f.k(),
            f.n()
        )));
    }
    Ok(())
}

fn report(
    spec: &ProtocolSpec,
    opts: &VerifyOptions,
    exhaustive: bool,
    seed: Option<u64>,
    outcome: std::result::Result<CostAccumulator, (u128, Counterexample)>,
) -> Result<VerificationReport> {
    let base = VerificationReport {
        protocol: spec.name().to_string(),
        exhaustive,
        domain_size: 0,
        budget: opts.budget.max_runs,
        correct: true,
        counterexample: None,
        measured_worst_case: None,
        worst_input: None,
        predicted_bound: opts.predicted_bound,
        per_channel: Vec::new(),
        per_round: Vec::new(),
        naive_baseline: opts.naive_baseline,
        pattern_checked: spec.pattern().is_some(),
        seed,
    };
    Ok(match outcome {
        Ok(acc) => {
            let cost = acc.report(spec.pattern().is_some());
            let worst_input = cost
                .worst_input
                .map(|i| InputMatrix::from_index(spec.shape(), i).map(|x| x.to_string()))
                .transpose()?;
            VerificationReport {
                domain_size: cost.domain_size,
                measured_worst_case: Some(cost.worst_case_bits),
                worst_input,
                per_channel: cost.channels,
                per_round: cost.per_round,
                ..base
            }
        }
        Err((checked, c)) => VerificationReport {
            domain_size: checked,
            correct: false,
            counterexample: Some(c),
            ..base
        },
    })
}

/// Runs `spec` on every input and compares each output vector with the
/// oracle. Declared patterns are enforced on every run.
pub fn exhaustive_verify(
    spec: &ProtocolSpec,
    f: &TruthTable,
    opts: VerifyOptions,
) -> Result<VerificationReport> {
    check_table(spec, f)?;
    let size = opts.budget.admit_shape(spec.shape())?;
    let outcome = sweep(
        size,
        CostAccumulator::default,
        |acc, idx| check_input(spec, f, idx as u128, acc),
        CostAccumulator::merge,
    );
    let outcome = match outcome {
        Ok(acc) => Ok(acc),
        Err(e) => match e.failure {
            Failure::Wrong(c) => Err((e.index + 1, *c)),
            Failure::Fault(err) => return Err(err),
        },
    };
    report(spec, &opts, true, None, outcome)
}

/// Checks `samples` seeded random inputs. The report is marked
/// non-exhaustive.
pub fn sample_verify(
    spec: &ProtocolSpec,
    f: &TruthTable,
    samples: u64,
    seed: u64,
    opts: VerifyOptions,
) -> Result<VerificationReport> {
    check_table(spec, f)?;
    opts.budget.admit(samples as u128)?;
    let size = spec.shape().domain_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = CostAccumulator::default();
    let mut outcome = Ok(());
    for done in 0..samples {
        let idx = rng.random_range(0..size);
        match check_input(spec, f, idx, &mut acc) {
            Ok(()) => {}
            Err(Failure::Wrong(c)) => {
                outcome = Err((done as u128 + 1, *c));
                break;
            }
            Err(Failure::Fault(err)) => return Err(err),
        }
    }
    report(spec, &opts, false, Some(seed), outcome.map(|()| acc))
}
