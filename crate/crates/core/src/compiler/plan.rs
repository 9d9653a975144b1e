use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    BindingTriplet, FilteringTriplet, MatrixA, MultiplexTriplet, Permutation,
};
use crate::compiler::engine::{Engine, Group};
use crate::error::{Error, Result};
use crate::model::{
    run_protocol, sweep, Budget, CommPattern, InputMatrix, Model, ProtocolSpec, Recipient,
    RestrictionGraph, View,
};

/// Which construction a plan follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompilePath {
    /// `ℓ` pattern-robust `NOF_{G_{π_u}}` protocols and a multiplexing set.
    T1,
    /// One protocol for a symmetric `f` and a filtering set.
    T2,
    /// `ℓ` myopic chains and a repetitive set, bounded input by input.
    T3,
    /// As `T3`, for oblivious chains sharing one positional pattern.
    C2,
}

impl std::str::FromStr for CompilePath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" => Ok(CompilePath::T1),
            "t2" => Ok(CompilePath::T2),
            "t3" => Ok(CompilePath::T3),
            "c2" => Ok(CompilePath::C2),
            other => Err(Error::domain(format!("unknown path {other:?}; use t1, t2, t3 or c2"))),
        }
    }
}

/// The certificate licensing a plan's XOR blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    Multiplexing { triplets: Vec<MultiplexTriplet> },
    /// A filtering set and the multiplexing set derived from it.
    Filtering {
        triplets: Vec<FilteringTriplet>,
        derived: Vec<MultiplexTriplet>,
    },
    Repetitive { triplets: Vec<BindingTriplet> },
}

/// Everything a combiner needs: the sources, their permutations and the
/// certificate.
#[derive(Clone, Debug)]
pub struct CompilationPlan {
    pub path: CompilePath,
    pub perms: Vec<Permutation>,
    pub sources: Vec<ProtocolSpec>,
    pub certificate: Certificate,
}

impl CompilationPlan {
    /// Restricted-view plan: `sources[u]` runs in `NOF_{G_{perms[u]}}`.
    pub fn restricted(
        sources: Vec<ProtocolSpec>,
        perms: Vec<Permutation>,
        triplets: Vec<MultiplexTriplet>,
    ) -> Self {
        CompilationPlan {
            path: CompilePath::T1,
            perms,
            sources,
            certificate: Certificate::Multiplexing { triplets },
        }
    }

    /// Myopic plan; the permutations are the chains' orders.
    pub fn myopic(path: CompilePath, sources: Vec<ProtocolSpec>, triplets: Vec<BindingTriplet>) -> Result<Self> {
        if !matches!(path, CompilePath::T3 | CompilePath::C2) {
            return Err(Error::domain(format!("{path:?} is not a myopic path")));
        }
        let perms = sources
            .iter()
            .map(|s| match s.model() {
                Model::Myopic(order) => Ok(order.clone()),
                _ => Err(Error::Model(format!("{} is not a myopic protocol", s.name()))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompilationPlan {
            path,
            perms,
            sources,
            certificate: Certificate::Repetitive { triplets },
        })
    }

    pub fn ell(&self) -> usize {
        self.sources.len()
    }

    /// The multiplexing set the engine uses on the T1/T2 paths.
    pub fn multiplexing_set(&self) -> Option<&[MultiplexTriplet]> {
        match &self.certificate {
            Certificate::Multiplexing { triplets } => Some(triplets),
            Certificate::Filtering { derived, .. } => Some(derived),
            Certificate::Repetitive { .. } => None,
        }
    }

    fn base_pattern(&self) -> Result<&CommPattern> {
        let q = self
            .sources
            .first()
            .ok_or_else(|| Error::domain("plan has no protocols"))?;
        q.pattern()
            .ok_or_else(|| Error::Precondition(format!("{} is not oblivious: no pattern declared", q.name())))
    }

    /// The message length at chain position `pos` of source `u`.
    fn position_len(&self, u: usize, pos: usize) -> Result<usize> {
        let src = &self.sources[u - 1];
        let pattern = src
            .pattern()
            .ok_or_else(|| Error::Precondition(format!("{} is not oblivious", src.name())))?;
        let order = &self.perms[u - 1];
        Ok(pattern.len(pos, order.apply(pos), Recipient::Party(order.apply(pos + 1))))
    }
}

/// The closed-form cost bound of a plan, including the `ℓ` output bits.
///
/// * T1: `ℓ·cost(Q) + ℓ − Σ |R|·W_Q(a,b)`
/// * T2: `ℓ·cost(Q) + ℓ − Σ |B|·W_Q(a,b)`
/// * T3: the worst case over all inputs of
///   `Σ_u Σ_t Cost_{x,u,t} − Σ (TCost_{x,U,pos} − MCost_{x,U,pos})`, plus `ℓ`
/// * C2: `ℓ·cost(Q₁) + ℓ − Σ (|U| − 1)·W`, where `W` is the shared length of
///   the message at the multiplexed position.
pub fn predicted_bound(plan: &CompilationPlan, budget: Budget) -> Result<usize> {
    let ell = plan.ell();
    match (&plan.path, &plan.certificate) {
        (CompilePath::T1, Certificate::Multiplexing { triplets }) => {
            let q = plan.base_pattern()?;
            let saved: usize = triplets
                .iter()
                .map(|t| t.r.len() * q.channel(t.a, Recipient::Party(t.b)))
                .sum();
            Ok(ell * q.total() + ell - saved)
        }
        (CompilePath::T2, Certificate::Filtering { triplets, .. }) => {
            let q = plan.base_pattern()?;
            let saved: usize = triplets
                .iter()
                .map(|t| t.set.len() * q.channel(t.a, Recipient::Party(t.b)))
                .sum();
            Ok(ell * q.total() + ell - saved)
        }
        (CompilePath::C2, Certificate::Repetitive { triplets }) => {
            let k = plan.base_pattern().map(|_| plan.sources[0].k())?;
            for u in 1..=ell {
                for pos in 1..k {
                    if plan.position_len(u, pos)? != plan.position_len(1, pos)? {
                        return Err(Error::Precondition(format!(
                            "chain {u} sends {} bits at position {pos}, chain 1 sends {}",
                            plan.position_len(u, pos)?,
                            plan.position_len(1, pos)?
                        )));
                    }
                }
                let total = plan.sources[u - 1].pattern().map(CommPattern::total).unwrap_or(0);
                if total != plan.base_pattern()?.total() {
                    return Err(Error::Precondition(format!("chain {u} has a different total length")));
                }
            }
            let mut saved = 0;
            for t in triplets {
                saved += t.set.len().saturating_sub(1) * plan.position_len(1, t.pos)?;
            }
            Ok(ell * plan.base_pattern()?.total() + ell - saved)
        }
        (CompilePath::T3, Certificate::Repetitive { .. }) => {
            let shape = plan
                .sources
                .first()
                .map(|s| crate::model::Shape::new(ell, s.k(), s.n()))
                .ok_or_else(|| Error::domain("plan has no protocols"))??;
            let size = budget.admit_shape(shape)?;
            let worst = sweep(
                size,
                || 0usize,
                |w, idx| -> Result<()> {
                    let x = InputMatrix::from_index(shape, idx as u128)?;
                    *w = (*w).max(myopic_payload(plan, &x)?);
                    Ok(())
                },
                usize::max,
            )
            .map_err(|e| e.failure)?;
            Ok(worst + ell)
        }
        (path, _) => Err(Error::domain(format!("plan certificate does not fit path {path:?}"))),
    }
}

/// `Σ_u Σ_t Cost_{x,u,t} − Σ_{(pos,s,U)} (TCost_{x,U,pos} − MCost_{x,U,pos})`,
/// computed by running every chain on its own instance.
pub fn myopic_payload(plan: &CompilationPlan, x: &InputMatrix) -> Result<usize> {
    let Certificate::Repetitive { triplets } = &plan.certificate else {
        return Err(Error::domain("myopic payload needs a repetitive set"));
    };
    let mut costs = Vec::with_capacity(plan.ell());
    for (i, src) in plan.sources.iter().enumerate() {
        let t = run_protocol(src, &x.project(i + 1)?)?;
        let mut per_round = vec![0usize; src.rounds() + 1];
        for r in &t.records {
            per_round[r.round] += r.payload.len();
        }
        costs.push(per_round);
    }
    let total: usize = costs.iter().flatten().sum();
    let mut saved = 0;
    for t in triplets {
        let at = |u: usize| costs[u - 1].get(t.pos).copied().unwrap_or(0);
        let tcost: usize = t.set.iter().map(|&u| at(u)).sum();
        let mcost = t.set.iter().map(|&u| at(u)).max().unwrap_or(0);
        saved += tcost - mcost;
    }
    Ok(total - saved)
}

/// A compiled `ℓ`-instance board protocol together with its plan.
#[derive(Clone)]
pub struct CompiledProtocol {
    pub(crate) spec: ProtocolSpec,
    pub(crate) plan: CompilationPlan,
    pub(crate) matrix: Option<MatrixA>,
    pub(crate) engine: Arc<Engine>,
}

impl CompiledProtocol {
    pub fn spec(&self) -> &ProtocolSpec {
        &self.spec
    }

    pub fn plan(&self) -> &CompilationPlan {
        &self.plan
    }

    /// The matrix behind a T2 compilation.
    pub fn matrix(&self) -> Option<&MatrixA> {
        self.matrix.as_ref()
    }

    pub fn groups(&self) -> &[Group] {
        self.engine.groups()
    }

    pub fn predicted_bound(&self, budget: Budget) -> Result<usize> {
        predicted_bound(&self.plan, budget)
    }

    /// Runs the compiled protocol and every source side by side on `x`,
    /// and checks that each party's rebuilt history in each source equals
    /// what the source actually delivered, and that outputs agree.
    pub fn check_soundness(&self, x: &InputMatrix) -> Result<()> {
        let t = run_protocol(&self.spec, x)?;
        let complete = RestrictionGraph::complete(x.k())?;
        let views = (1..=x.k())
            .map(|p| View::compute_all(&complete, x, p))
            .collect::<Result<Vec<_>>>()?;
        for (i, src) in self.plan.sources.iter().enumerate() {
            let u = i + 1;
            let direct = run_protocol(src, &x.project(u)?)?;
            for p in 1..=x.k() {
                let rebuilt = self.engine.history(p, u, &t.records, &views[p - 1])?;
                if merged(&rebuilt)? != merged(&direct.received_by(p))? {
                    return Err(Error::Soundness(format!(
                        "P{p} rebuilt a different protocol-{u} history on input {x}"
                    )));
                }
            }
            if t.outputs[i] != direct.outputs[0] {
                return Err(Error::Soundness(format!("instance {u} output differs on input {x}")));
            }
        }
        Ok(())
    }

    /// [`CompiledProtocol::check_soundness`] over the whole domain.
    pub fn verify_soundness(&self, budget: Budget) -> Result<u64> {
        let shape = self.spec.shape();
        let size = budget.admit_shape(shape)?;
        sweep(
            size,
            || 0u64,
            |n, idx| -> Result<()> {
                self.check_soundness(&InputMatrix::from_index(shape, idx as u128)?)?;
                *n += 1;
                Ok(())
            },
            |a, b| a + b,
        )
        .map_err(|e| e.failure)
    }
}

/// `(round, sender, payload)` with same-round messages from one sender
/// concatenated.
fn merged(records: &[crate::model::MessageRecord]) -> Result<Vec<(usize, usize, crate::BitString)>> {
    let mut out: Vec<(usize, usize, crate::BitString)> = Vec::new();
    for r in records {
        match out.last_mut() {
            Some((t, s, m)) if *t == r.round && *s == r.sender => *m = m.concat(&r.payload)?,
            _ => out.push((r.round, r.sender, r.payload)),
        }
    }
    out.sort_by_key(|&(t, s, _)| (t, s));
    Ok(out)
}

impl std::fmt::Debug for CompiledProtocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompiledProtocol")
            .field("spec", &self.spec)
            .field("path", &self.plan.path)
            .field("groups", &self.engine.groups())
            .finish()
    }
}
