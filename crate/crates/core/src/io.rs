//! JSON file formats: certificates, compilation plans, compiled-protocol
//! descriptors and verification reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    build_matrix_a, filtering_to_multiplexing, is_filtering_set, is_multiplexing_set,
    is_repetitive_set, BindingTriplet, FilteringTriplet, MatrixA, MultiplexTriplet, Permutation,
    Violation,
};
use crate::compiler::{
    compile_symmetric, multiplex_combine, myopic_combine, CompilationPlan, CompiledProtocol, Group,
    CompilePath,
};
use crate::error::{Error, Result};
use crate::model::{measure_cost, Budget, PartyId, Recipient, RestrictionGraph, TruthTable};
use crate::protocols::{self, ProtocolParams};
use crate::verifier::random_truth_table;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// A certificate on disk. Graphs may be left out and supplied separately.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CertificateFile {
    Filtering {
        ell: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        graph: Option<RestrictionGraph>,
        triplets: Vec<FilteringTriplet>,
    },
    Multiplexing {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        graph: Option<RestrictionGraph>,
        permutations: Vec<Permutation>,
        triplets: Vec<MultiplexTriplet>,
    },
    Repetitive {
        permutations: Vec<Permutation>,
        triplets: Vec<BindingTriplet>,
    },
}

impl CertificateFile {
    pub fn kind(&self) -> &'static str {
        match self {
            CertificateFile::Filtering { .. } => "filtering",
            CertificateFile::Multiplexing { .. } => "multiplexing",
            CertificateFile::Repetitive { .. } => "repetitive",
        }
    }

    fn graph(&self, fallback: Option<&RestrictionGraph>) -> Result<RestrictionGraph> {
        let own = match self {
            CertificateFile::Filtering { graph, .. } | CertificateFile::Multiplexing { graph, .. } => {
                graph.as_ref()
            }
            CertificateFile::Repetitive { .. } => None,
        };
        fallback
            .or(own)
            .cloned()
            .ok_or_else(|| Error::domain(format!("the {} certificate needs a graph", self.kind())))
    }
}

/// Verdict of `validate`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub kind: String,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    /// Filtering sets: `R(a)` per sender.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loads: Option<BTreeMap<PartyId, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<usize>,
}

/// Runs the checker matching the certificate's kind. `graph` overrides a
/// graph stored in the file.
pub fn validate_certificate(
    cert: &CertificateFile,
    graph: Option<&RestrictionGraph>,
) -> Result<ValidationOutcome> {
    let mut out = ValidationOutcome {
        kind: cert.kind().to_string(),
        valid: false,
        violation: None,
        loads: None,
        r_max: None,
    };
    let verdict = match cert {
        CertificateFile::Filtering { ell, triplets, .. } => {
            let a = is_filtering_set(triplets, &cert.graph(graph)?, *ell)?;
            out.loads = Some(a.loads);
            out.r_max = Some(a.r_max);
            match a.verdict {
                Ok(()) if !a.ell_filtering => {
                    out.valid = false;
                    return Ok(out);
                }
                v => v,
            }
        }
        CertificateFile::Multiplexing {
            permutations,
            triplets,
            ..
        } => is_multiplexing_set(triplets, permutations, &cert.graph(graph)?)?,
        CertificateFile::Repetitive {
            permutations,
            triplets,
        } => {
            if triplets.is_empty() {
                Ok(())
            } else {
                is_repetitive_set(triplets, permutations)?
            }
        }
    };
    out.valid = verdict.is_ok();
    out.violation = verdict.err();
    Ok(out)
}

/// `matrix` output: rows, which entries are pinned, and the derived
/// multiplexing set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub k: usize,
    pub ell: usize,
    pub rows: Vec<Vec<usize>>,
    pub fixed: Vec<Vec<bool>>,
    /// `row_of[i][j]`: row of the `j`-th element of triplet `i` (1-based).
    pub row_of: Vec<Vec<usize>>,
    pub multiplexing_set: Vec<MultiplexTriplet>,
}

impl MatrixFile {
    pub fn new(matrix: &MatrixA, set: &[FilteringTriplet]) -> Result<Self> {
        let (k, ell) = (matrix.k(), matrix.ell());
        Ok(MatrixFile {
            k,
            ell,
            rows: matrix.rows().iter().map(|r| r.images().to_vec()).collect(),
            fixed: (1..=ell).map(|r| (1..=k).map(|c| matrix.is_fixed(r, c)).collect()).collect(),
            row_of: set
                .iter()
                .enumerate()
                .map(|(i, t)| (1..=t.set.len()).map(|j| matrix.row_of(i + 1, j)).collect())
                .collect(),
            multiplexing_set: filtering_to_multiplexing(set, matrix)?,
        })
    }
}

/// Builds the matrix for a filtering certificate.
pub fn matrix_for(cert: &CertificateFile, graph: Option<&RestrictionGraph>) -> Result<(MatrixA, MatrixFile)> {
    let CertificateFile::Filtering { ell, triplets, .. } = cert else {
        return Err(Error::domain(format!("matrices are built from filtering sets, not {} sets", cert.kind())));
    };
    let matrix = build_matrix_a(&cert.graph(graph)?, *ell, triplets)?;
    let file = MatrixFile::new(&matrix, triplets)?;
    Ok((matrix, file))
}

/// The function a plan computes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FunctionDescriptor {
    Equality,
    Random { seed: u64 },
    Constant { value: bool },
    Table { table: TruthTable },
}

impl FunctionDescriptor {
    pub fn resolve(&self, k: usize, n: usize) -> Result<TruthTable> {
        match self {
            FunctionDescriptor::Equality => TruthTable::equality(k, n),
            FunctionDescriptor::Random { seed } => random_truth_table(k, n, *seed),
            FunctionDescriptor::Constant { value } => TruthTable::constant(k, n, *value),
            FunctionDescriptor::Table { table } => {
                if (table.k(), table.n()) != (k, n) {
                    return Err(Error::domain("inline table does not match the protocol shape"));
                }
                Ok(table.clone())
            }
        }
    }
}

/// A built-in protocol by name and parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolDescriptor {
    pub name: String,
    #[serde(flatten)]
    pub params: ProtocolParams,
}

impl ProtocolDescriptor {
    pub fn build(&self, f: Option<&TruthTable>) -> Result<crate::model::ProtocolSpec> {
        let params = ProtocolParams {
            f: f.cloned(),
            ..self.params.clone()
        };
        protocols::build(&self.name, &params)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CertificateSource {
    Inline(CertificateFile),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PermutationSource {
    Explicit(Vec<Permutation>),
    /// `"from-matrix"`: rows of the matrix built from a filtering set.
    Keyword(String),
}

/// A compilation plan on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub path: CompilePath,
    pub protocols: Vec<ProtocolDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionDescriptor>,
    pub certificate: CertificateSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutations: Option<PermutationSource>,
}

/// A compiled plan and the function it is checked against.
pub struct LoadedPlan {
    pub compiled: CompiledProtocol,
    pub function: TruthTable,
}

/// Builds and compiles a plan. Relative certificate paths resolve against
/// `base`.
pub fn compile_plan(plan: &PlanFile, base: &Path, budget: Budget) -> Result<LoadedPlan> {
    let first = plan
        .protocols
        .first()
        .ok_or_else(|| Error::domain("plan lists no protocols"))?;
    let (k, n) = (first.params.k, first.params.n);
    let f = plan.function.as_ref().map(|d| d.resolve(k, n)).transpose()?;
    let function = match &f {
        Some(f) => f.clone(),
        None => TruthTable::equality(k, n)?,
    };
    let cert = match &plan.certificate {
        CertificateSource::Inline(c) => c.clone(),
        CertificateSource::File(p) => read_json(&base.join(p))?,
    };
    let sources = plan
        .protocols
        .iter()
        .map(|d| d.build(f.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let compiled = match (plan.path, cert) {
        (CompilePath::T1, CertificateFile::Multiplexing { permutations, triplets, .. }) => {
            let perms = match &plan.permutations {
                Some(PermutationSource::Explicit(p)) => p.clone(),
                None => permutations,
                Some(PermutationSource::Keyword(w)) => {
                    return Err(Error::domain(format!("path t1 takes explicit permutations, not {w:?}")))
                }
            };
            multiplex_combine(CompilationPlan::restricted(sources, perms, triplets))?
        }
        (CompilePath::T2, CertificateFile::Filtering { ell, triplets, .. }) => {
            match &plan.permutations {
                None => {}
                Some(PermutationSource::Keyword(w)) if w == "from-matrix" => {}
                Some(_) => return Err(Error::domain("path t2 derives its permutations from the matrix")),
            }
            let [q] = &sources[..] else {
                return Err(Error::domain("path t2 takes exactly one protocol"));
            };
            compile_symmetric(q, &function, &triplets, ell, budget)?
        }
        (path @ (CompilePath::T3 | CompilePath::C2), CertificateFile::Repetitive { triplets, .. }) => {
            myopic_combine(CompilationPlan::myopic(path, sources, triplets)?, budget)?
        }
        (path, cert) => {
            return Err(Error::domain(format!(
                "path {path:?} cannot use a {} certificate",
                cert.kind()
            )))
        }
    };
    Ok(LoadedPlan { compiled, function })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternEntry {
    pub round: usize,
    pub sender: PartyId,
    pub recipient: Recipient,
    pub bits: usize,
}

/// `compile` output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledDescriptor {
    pub name: String,
    pub path: CompilePath,
    pub k: usize,
    pub n: usize,
    pub ell: usize,
    pub rounds: usize,
    pub sources: Vec<String>,
    pub permutations: Vec<Permutation>,
    pub groups: Vec<Group>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<PatternEntry>>,
    pub predicted_bound: usize,
    /// Worst-case cost of the sources plus `ℓ` output bits, without any
    /// multiplexing.
    pub naive_baseline: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<usize>>>,
}

impl CompiledDescriptor {
    pub fn new(compiled: &CompiledProtocol, budget: Budget) -> Result<Self> {
        let spec = compiled.spec();
        let plan = compiled.plan();
        let mut naive = plan.ell();
        for src in &plan.sources {
            naive += match src.pattern() {
                Some(p) => p.total(),
                None => measure_cost(src, budget)?.worst_case_bits,
            };
        }
        Ok(CompiledDescriptor {
            name: spec.name().to_string(),
            path: plan.path,
            k: spec.k(),
            n: spec.n(),
            ell: spec.ell(),
            rounds: spec.rounds(),
            sources: plan.sources.iter().map(|s| s.name().to_string()).collect(),
            permutations: plan.perms.clone(),
            groups: compiled.groups().to_vec(),
            pattern: spec.pattern().map(|p| {
                p.entries()
                    .map(|((round, sender, recipient), bits)| PatternEntry {
                        round,
                        sender,
                        recipient,
                        bits,
                    })
                    .collect()
            }),
            predicted_bound: compiled.predicted_bound(budget)?,
            naive_baseline: naive,
            matrix: compiled
                .matrix()
                .map(|m| m.rows().iter().map(|r| r.images().to_vec()).collect()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SENDERS: &str = r#"{
        "kind": "filtering",
        "ell": 4,
        "graph": {"k": 9, "edges": [[1, 2], [1, 5], [7, 8]]},
        "triplets": [[1, 2, [3, 4]], [1, 5, [6]], [7, 8, [9]]]
    }"#;

    #[test]
    fn filtering_certificate_roundtrip() {
        let cert: CertificateFile = serde_json::from_str(TWO_SENDERS).unwrap();
        let back: CertificateFile = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
        assert_eq!(cert, back);
        let v = validate_certificate(&cert, None).unwrap();
        assert!(v.valid);
        assert_eq!(v.loads.unwrap(), BTreeMap::from([(1, 3), (7, 1)]));
    }

    #[test]
    fn matrix_file() {
        let cert: CertificateFile = serde_json::from_str(TWO_SENDERS).unwrap();
        let (_, file) = matrix_for(&cert, None).unwrap();
        assert_eq!(file.rows[1], vec![1, 3, 2, 4, 5, 6, 7, 9, 8]);
        assert_eq!(file.row_of, vec![vec![2, 3], vec![4], vec![2]]);
    }

    #[test]
    fn empty_repetitive_certificate_is_valid() {
        let cert: CertificateFile =
            serde_json::from_str(r#"{"kind": "repetitive", "permutations": [], "triplets": []}"#).unwrap();
        assert!(validate_certificate(&cert, None).unwrap().valid);
    }

    #[test]
    fn plan_parses() {
        let plan: PlanFile = serde_json::from_str(
            r#"{
                "path": "t2",
                "protocols": [{"name": "eq-relay", "k": 5, "n": 1}],
                "function": {"kind": "equality"},
                "certificate": {"kind": "filtering", "ell": 2, "triplets": [[5, 2, [4]]],
                                "graph": {"k": 5, "edges": []}},
                "permutations": "from-matrix"
            }"#,
        )
        .unwrap();
        assert_eq!(plan.path, CompilePath::T2);
        assert_eq!(plan.protocols[0].params.k, 5);
    }
}
