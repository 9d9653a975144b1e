use std::collections::HashMap;
use std::sync::Arc;

use crate::combinatorics::{
    build_matrix_a, filtering_to_multiplexing, is_multiplexing_set, is_repetitive_set,
    FilteringTriplet,
};
use crate::compiler::engine::{Decoder, Engine, Group};
use crate::compiler::permute::{check_pattern_robust, permute_protocol};
use crate::compiler::plan::{Certificate, CompilationPlan, CompiledProtocol, CompilePath};
use crate::error::{Error, Result};
use crate::model::{Budget, Model, ProtocolSpec, Shape, Symmetry, TruthTable};
use crate::verifier::{exhaustive_verify, message_set, prefix_violation, VerifyOptions};

fn assemble(name: String, plan: CompilationPlan, groups: Vec<Group>, decoder: Decoder) -> Result<CompiledProtocol> {
    let first = &plan.sources[0];
    let shape = Shape::new(plan.ell(), first.k(), first.n())?;
    let engine = Arc::new(Engine::new(plan.sources.clone(), groups, decoder)?);
    let mut spec = ProtocolSpec::new(name, Model::Board, shape, engine.rounds() + 1, engine.clone())?;
    if let Some(pattern) = engine.pattern() {
        spec = spec.with_pattern(pattern);
    }
    Ok(CompiledProtocol {
        spec,
        plan,
        matrix: None,
        engine,
    })
}

/// Combines `ℓ` pattern-robust `NOF_{G_{π_u}}` protocols into one board
/// protocol for `ℓ` instances.
///
/// For each `(a, b, R)` of the multiplexing set and each round, `P_a`
/// writes one XOR of its message to `b` in protocol 1 and its messages to
/// `π_r(b)` in protocols `r ∈ R`. Each recipient recomputes the other
/// messages of the block from its own view and strips them off.
pub fn multiplex_combine(plan: CompilationPlan) -> Result<CompiledProtocol> {
    if !matches!(plan.path, CompilePath::T1 | CompilePath::T2) {
        return Err(Error::domain(format!("path {:?} is not a multiplexing path", plan.path)));
    }
    let triplets = plan
        .multiplexing_set()
        .ok_or_else(|| Error::domain("multiplexing needs a multiplexing or filtering certificate"))?
        .to_vec();
    let ell = plan.ell();
    if ell == 0 || plan.perms.len() != ell {
        return Err(Error::domain(format!(
            "{ell} protocols but {} permutations",
            plan.perms.len()
        )));
    }
    if !plan.perms[0].is_identity() {
        return Err(Error::domain("the first permutation must be the identity"));
    }
    let q = &plan.sources[0];
    let Model::Restricted(graph) = q.model() else {
        return Err(Error::Model(format!("{} is not a NOF_G protocol", q.name())));
    };
    for (i, (src, pi)) in plan.sources.iter().zip(&plan.perms).enumerate() {
        let expected = graph.permuted(pi)?;
        if src.model() != &Model::Restricted(expected) {
            return Err(Error::Model(format!(
                "protocol {} must run in NOF_G for G permuted by {pi}",
                i + 1
            )));
        }
        if src.shape() != q.shape() || src.rounds() != q.rounds() {
            return Err(Error::domain(format!("protocol {} differs in shape or rounds", i + 1)));
        }
        if !check_pattern_robust(q, src, pi)? {
            return Err(Error::Robustness(format!(
                "protocol {}'s pattern is not protocol 1's relabeled by {pi}",
                i + 1
            )));
        }
    }
    if let Err(v) = is_multiplexing_set(&triplets, &plan.perms, graph)? {
        return Err(Error::Certificate(format!("not a multiplexing set: {v}")));
    }
    let mut groups = Vec::new();
    for t in &triplets {
        for round in 1..=q.rounds() {
            let members = std::iter::once((1, t.b))
                .chain(t.r.iter().map(|&r| (r, plan.perms[r - 1].apply(t.b))))
                .collect();
            groups.push(Group {
                round,
                sender: t.a,
                members,
            });
        }
    }
    let name = format!("mux({})x{ell}", q.name());
    assemble(name, plan, groups, Decoder::Pattern)
}

/// Compiles one `NOF_G` protocol for a symmetric `f` into an `ℓ`-instance
/// board protocol, using the matrix built from an `ℓ`-filtering set.
///
/// `q` is checked against `f` exhaustively when its domain fits `budget`.
pub fn compile_symmetric(
    q: &ProtocolSpec,
    f: &TruthTable,
    filtering: &[FilteringTriplet],
    ell: usize,
    budget: Budget,
) -> Result<CompiledProtocol> {
    if !f.is_symmetric(&Symmetry::All)? {
        return Err(Error::Precondition("f is not symmetric, so permuted protocols need not compute it".into()));
    }
    let Model::Restricted(graph) = q.model() else {
        return Err(Error::Model(format!("{} is not a NOF_G protocol", q.name())));
    };
    if q.pattern().is_none() {
        return Err(Error::Precondition(format!("{} is not oblivious: no pattern declared", q.name())));
    }
    if budget.admit_shape(q.shape()).is_ok() {
        let report = exhaustive_verify(q, f, VerifyOptions { budget, ..Default::default() })?;
        if !report.correct {
            return Err(Error::Precondition(format!("{} does not compute f", q.name())));
        }
    }
    let matrix = build_matrix_a(graph, ell, filtering)?;
    let sources = matrix
        .rows()
        .iter()
        .map(|pi| permute_protocol(q, pi))
        .collect::<Result<Vec<_>>>()?;
    let derived = filtering_to_multiplexing(filtering, &matrix)?;
    let plan = CompilationPlan {
        path: CompilePath::T2,
        perms: matrix.rows().to_vec(),
        sources,
        certificate: Certificate::Filtering {
            triplets: filtering.to_vec(),
            derived,
        },
    };
    let mut compiled = multiplex_combine(plan)?;
    compiled.matrix = Some(matrix);
    Ok(compiled)
}

/// Combines `ℓ` myopic chains into one board protocol.
///
/// For each `(pos, s, U)` of the repetitive set, `P_s` writes the XOR of
/// its position-`pos` messages in the chains of `U`, each padded with zeros
/// on the right. Recipients strip the other messages and decode their own
/// through the prefix-free code of their chain at that position.
pub fn myopic_combine(plan: CompilationPlan, budget: Budget) -> Result<CompiledProtocol> {
    let Certificate::Repetitive { triplets } = &plan.certificate else {
        return Err(Error::domain("myopic combination needs a repetitive set"));
    };
    if !matches!(plan.path, CompilePath::T3 | CompilePath::C2) {
        return Err(Error::domain(format!("path {:?} is not a myopic path", plan.path)));
    }
    let ell = plan.ell();
    if ell == 0 || plan.perms.len() != ell {
        return Err(Error::domain(format!("{ell} chains but {} orders", plan.perms.len())));
    }
    for (i, (src, pi)) in plan.sources.iter().zip(&plan.perms).enumerate() {
        if src.model() != &Model::Myopic(pi.clone()) {
            return Err(Error::Model(format!("chain {} does not run in order {pi}", i + 1)));
        }
    }
    if let Err(v) = is_repetitive_set(triplets, &plan.perms)? {
        return Err(Error::Certificate(format!("not a repetitive set: {v}")));
    }
    let mut books = HashMap::new();
    let mut groups = Vec::new();
    for t in triplets {
        for &u in &t.set {
            if books.contains_key(&(u, t.pos)) {
                continue;
            }
            let set = message_set(&plan.sources[u - 1], t.pos, budget)?;
            if let Some((p, m)) = prefix_violation(&set) {
                return Err(Error::PrefixFree(format!(
                    "chain {u} at position {}: {p} is a prefix of {m}",
                    t.pos
                )));
            }
            books.insert((u, t.pos), set.into_iter().collect());
        }
        groups.push(Group {
            round: t.pos,
            sender: t.sender,
            members: t
                .set
                .iter()
                .map(|&u| (u, plan.perms[u - 1].apply(t.pos + 1)))
                .collect(),
        });
    }
    let name = format!("myopic-mux({})x{ell}", plan.sources[0].name());
    assemble(name, plan, groups, Decoder::PrefixFree(books))
}
