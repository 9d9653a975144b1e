//! The reference demonstration suite: nine checks over the built-in
//! protocols and compilers, each reporting pass or fail with a short detail.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    build_matrix_a, check_matrix, filtering_to_multiplexing, is_filtering_set, is_multiplexing_set,
    is_repetitive_set, BindingTriplet, FilteringTriplet, Permutation,
};
use crate::compiler::{
    compile_symmetric, multiplex_combine, myopic_combine, myopic_payload, CompilationPlan, CompilePath,
};
use crate::error::{Error, Result};
use crate::model::{measure_cost, Budget, InputMatrix, ProtocolSpec, RestrictionGraph, TruthTable};
use crate::protocols::{
    self, blocked_xor, eq_multi, eq_two_bit, forwarding_multiplexing_set, forwarding_permutation,
    forwarding_variant, eq_relay, relay_filtering_set, diagonal_xor, myopic_eq, ProtocolParams,
};
use crate::verifier::{check_prefix_free, exhaustive_verify, random_truth_table, VerificationReport, VerifyOptions};

/// Seed for every random truth table and property sample of the suite.
pub const DEMO_SEED: u64 = 0x5eed;

/// Largest domain the audit check covers.
pub const AUDIT_DOMAIN_CAP: u128 = 1 << 20;

/// Audit cap in quick mode.
pub const QUICK_AUDIT_DOMAIN_CAP: u128 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoOptions {
    pub seed: u64,
    pub budget: Budget,
    /// Runs the 2^24-input check at `n = 1` and audits only domains up to
    /// [`QUICK_AUDIT_DOMAIN_CAP`].
    pub quick: bool,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            seed: DEMO_SEED,
            budget: Budget::default(),
            quick: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub number: usize,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {}. {}: {}", self.number, self.title, self.detail)
    }
}

type Check = fn(&DemoOptions) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 9] = [
    ("xor of the diagonal, k=3 n=2", check_diagonal),
    ("blocked xor, k=3 n=1 ell=4", check_blocks),
    ("two-bit equality, k=5 n=2", check_eq2),
    ("equality on two instances, k=5", check_eq_pair),
    ("restricted-view multiplexing, k=4 ell=3", check_restricted),
    ("matrix construction from a 4-filtering set", check_matrix_example),
    ("myopic chain multiplexing, k=5 ell=2", check_myopic),
    ("random filtering sets convert to multiplexing sets", check_random_sets),
    ("pattern and legality audit of built-ins", check_audit),
];

/// Runs all checks in order. Errors inside a check count as failures.
pub fn run_demo(opts: &DemoOptions) -> Vec<CriterionOutcome> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, (title, check))| {
            let (passed, detail) = check(opts).unwrap_or_else(|e| (false, format!("error: {e}")));
            CriterionOutcome {
                number: i + 1,
                title: title.to_string(),
                passed,
                detail,
            }
        })
        .collect()
}

/// Runs a single check by number.
pub fn run_criterion(number: usize, opts: &DemoOptions) -> Result<CriterionOutcome> {
    let (title, check) = CHECKS
        .get(number.wrapping_sub(1))
        .ok_or_else(|| Error::domain(format!("no check numbered {number}")))?;
    let (passed, detail) = check(opts).unwrap_or_else(|e| (false, format!("error: {e}")));
    Ok(CriterionOutcome {
        number,
        title: title.to_string(),
        passed,
        detail,
    })
}

fn verify(spec: &ProtocolSpec, f: &TruthTable, opts: &DemoOptions, bound: Option<usize>) -> Result<VerificationReport> {
    exhaustive_verify(
        spec,
        f,
        VerifyOptions {
            budget: opts.budget,
            predicted_bound: bound,
            naive_baseline: None,
        },
    )
}

/// Correct everywhere and exactly `cost` bits on every input.
fn exact(r: &VerificationReport, cost: usize) -> (bool, String) {
    let ok = r.correct && r.measured_worst_case == Some(cost) && r.pattern_checked;
    let detail = format!(
        "{} inputs, correct={}, worst case {:?} bits (want {cost}), oblivious={}",
        r.domain_size, r.correct, r.measured_worst_case, r.pattern_checked
    );
    (ok, detail)
}

fn check_diagonal(o: &DemoOptions) -> Result<(bool, String)> {
    let f = random_truth_table(3, 2, o.seed)?;
    Ok(exact(&verify(&diagonal_xor(&f, 3)?, &f, o, None)?, 2 + 3 - 1))
}

fn check_blocks(o: &DemoOptions) -> Result<(bool, String)> {
    let f = random_truth_table(3, 1, o.seed)?;
    Ok(exact(&verify(&blocked_xor(&f, 3, 4)?, &f, o, None)?, 4 / 2 + 4))
}

fn check_eq2(o: &DemoOptions) -> Result<(bool, String)> {
    let f = TruthTable::equality(5, 2)?;
    let r = verify(&eq_two_bit(5, 2)?, &f, o, None)?;
    let ok = r.correct && r.measured_worst_case == Some(2);
    Ok((ok, format!("{} inputs, correct={}, worst case {:?} bits", r.domain_size, r.correct, r.measured_worst_case)))
}

fn check_eq_pair(o: &DemoOptions) -> Result<(bool, String)> {
    let f = TruthTable::equality(5, 1)?;
    let naive = 2 * measure_cost(&eq_two_bit(5, 1)?, o.budget)?.worst_case_bits;
    let direct = verify(&eq_multi(5, 1)?, &f, o, None)?;
    let compiled = compile_symmetric(&eq_relay(5, 1)?, &f, &relay_filtering_set(5)?, 2, o.budget)?;
    let piped = verify(compiled.spec(), &f, o, Some(compiled.predicted_bound(o.budget)?))?;
    let ok = [&direct, &piped]
        .iter()
        .all(|r| r.correct && r.domain_size == 1024 && r.measured_worst_case == Some(3))
        && 3 < naive;
    Ok((
        ok,
        format!(
            "hand-built {:?} bits, compiled {:?} bits (bound {:?}), naive {naive}",
            direct.measured_worst_case, piped.measured_worst_case, piped.predicted_bound
        ),
    ))
}

fn check_restricted(o: &DemoOptions) -> Result<(bool, String)> {
    let (k, n) = (4, if o.quick { 1 } else { 2 });
    let ell = k - 1;
    let f = random_truth_table(k, n, o.seed)?;
    let sources = (1..=ell).map(|i| forwarding_variant(&f, k, i)).collect::<Result<Vec<_>>>()?;
    let perms = (1..=ell).map(|i| forwarding_permutation(k, i)).collect::<Result<Vec<_>>>()?;
    let compiled = multiplex_combine(CompilationPlan::restricted(sources, perms, forwarding_multiplexing_set(k)?))?;
    let bound = compiled.predicted_bound(o.budget)?;
    let r = verify(compiled.spec(), &f, o, Some(bound))?;
    let (ok, detail) = exact(&r, n + ell);
    Ok((ok && bound == n + ell, format!("n={n}: {detail}, bound {bound}")))
}

/// The filtering set with two senders used by [`check_matrix_example`].
pub fn two_sender_certificate() -> Result<(RestrictionGraph, usize, Vec<FilteringTriplet>)> {
    let g = RestrictionGraph::new(9, [(1, 2), (1, 5), (7, 8)])?;
    let s = vec![
        FilteringTriplet::new(1, 2, vec![3, 4])?,
        FilteringTriplet::new(1, 5, vec![6])?,
        FilteringTriplet::new(7, 8, vec![9])?,
    ];
    Ok((g, 4, s))
}

fn check_matrix_example(_: &DemoOptions) -> Result<(bool, String)> {
    let (g, ell, s) = two_sender_certificate()?;
    let a = build_matrix_a(&g, ell, &s)?;
    let rows_ok = (a.row_of(1, 1), a.row_of(1, 2), a.row_of(2, 1), a.row_of(3, 1)) == (2, 3, 4, 2);
    let fixed_ok = (1..=ell).all(|r| a.entry(r, 1) == 1 && a.is_fixed(r, 1))
        && a.entry(2, 2) == 3
        && a.entry(3, 2) == 4
        && a.entry(4, 5) == 6
        && a.entry(2, 8) == 9;
    check_matrix(&a, &g, &s)?;
    let m = filtering_to_multiplexing(&s, &a)?;
    let valid = is_multiplexing_set(&m, a.rows(), &g)?.is_ok();
    Ok((rows_ok && fixed_ok && valid, format!("rows_ok={rows_ok}, fixed_ok={fixed_ok}, multiplexing={valid}\n{a}")))
}

/// Sources and certificate of the two-chain myopic check.
pub fn myopic_demo_plan(path: CompilePath) -> Result<CompilationPlan> {
    let orders = [Permutation::identity(5), Permutation::new(vec![4, 2, 5, 1, 3])?];
    let sources = orders.iter().map(|o| myopic_eq(5, 1, o)).collect::<Result<Vec<_>>>()?;
    CompilationPlan::myopic(path, sources, vec![BindingTriplet::new(2, 2, [1, 2])])
}

fn check_myopic(o: &DemoOptions) -> Result<(bool, String)> {
    let plan = myopic_demo_plan(CompilePath::T3)?;
    let perms: Vec<Permutation> = plan.perms.clone();
    let repetitive = is_repetitive_set(&[BindingTriplet::new(2, 2, [1, 2])], &perms)?.is_ok();
    let mut prefix_free = true;
    for src in &plan.sources {
        for pos in 1..src.k() {
            prefix_free &= check_prefix_free(src, pos, o.budget)?;
        }
    }
    let compiled = myopic_combine(plan, o.budget)?;
    let shape = compiled.spec().shape();
    let mut payloads = BTreeSet::new();
    for idx in 0..shape.domain_size() {
        payloads.insert(myopic_payload(compiled.plan(), &InputMatrix::from_index(shape, idx)?)?);
    }
    let r = verify(compiled.spec(), &TruthTable::equality(5, 1)?, o, Some(compiled.predicted_bound(o.budget)?))?;
    let ok = repetitive
        && prefix_free
        && payloads == BTreeSet::from([5])
        && r.correct
        && r.domain_size == 1024
        && r.measured_worst_case == Some(7);
    Ok((
        ok,
        format!(
            "payloads {payloads:?}, total {:?}, correct={}, repetitive={repetitive}, prefix-free={prefix_free}",
            r.measured_worst_case, r.correct
        ),
    ))
}

/// A random valid `ell`-filtering set with `3 ≤ k ≤ 9` and `2 ≤ ell ≤ 5`.
pub fn random_filtering_instance(rng: &mut impl Rng) -> Result<(RestrictionGraph, usize, Vec<FilteringTriplet>)> {
    let k = rng.random_range(3..=9);
    let ell = rng.random_range(2..=5);
    let density = rng.random_range(0.0..0.6);
    let edges: Vec<_> = (1..=k)
        .flat_map(|i| (1..=k).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && rng.random_bool(density))
        .collect();
    let g = RestrictionGraph::new(k, edges)?;

    let mut pool: Vec<usize> = (1..=k).collect();
    pool.shuffle(rng);
    let senders: Vec<usize> = pool.drain(..rng.random_range(1..=2.min(k - 2))).collect();
    let mut set = Vec::new();
    for &a in &senders {
        let mut load = 0;
        for _ in 0..rng.random_range(1..=3) {
            if pool.is_empty() {
                break;
            }
            let b = pool.swap_remove(rng.random_range(0..pool.len()));
            let mut unseen: Vec<usize> = pool.iter().copied().filter(|&p| !g.has_edge(a, p)).collect();
            unseen.shuffle(rng);
            let take = rng.random_range(0..=(ell - 1 - load).min(unseen.len()));
            let chosen: Vec<usize> = unseen[..take].to_vec();
            pool.retain(|p| !chosen.contains(p));
            load += take;
            set.push(FilteringTriplet::new(a, b, chosen)?);
        }
    }
    let analysis = is_filtering_set(&set, &g, ell)?;
    if !analysis.ell_filtering {
        return Err(Error::Internal(format!("generated set is not {ell}-filtering: {:?}", analysis.verdict)));
    }
    Ok((g, ell, set))
}

fn check_random_sets(o: &DemoOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut failures = Vec::new();
    let mut nonempty = 0;
    for sample in 0..1000 {
        let (g, ell, s) = random_filtering_instance(&mut rng)?;
        let outcome = build_matrix_a(&g, ell, &s).and_then(|a| {
            check_matrix(&a, &g, &s)?;
            let m = filtering_to_multiplexing(&s, &a)?;
            nonempty += usize::from(!m.is_empty());
            is_multiplexing_set(&m, a.rows(), &g)
        });
        match outcome {
            Ok(Ok(())) => {}
            Ok(Err(v)) => failures.push(format!("sample {sample}: {v}")),
            Err(e) => failures.push(format!("sample {sample}: {e}")),
        }
    }
    let detail = match failures.first() {
        None => format!("1000 samples, {nonempty} with a nonempty multiplexing set, 0 failures"),
        Some(first) => format!("{} failures, first: {first}", failures.len()),
    };
    Ok((failures.is_empty(), detail))
}

/// Every built-in family at `k ≤ 5`, `n ≤ 2` whose exhaustive domain is at
/// most `cap`, with seeded functions where one is needed.
pub fn builtin_catalogue(seed: u64, cap: u128) -> Result<Vec<ProtocolSpec>> {
    let mut out = Vec::new();
    for fam in protocols::FAMILIES {
        for k in 3..=5 {
            for n in 1..=2 {
                let base = ProtocolParams {
                    k,
                    n,
                    f: fam.takes_function.then(|| random_truth_table(k, n, seed)).transpose()?,
                    ..Default::default()
                };
                let mut variants = Vec::new();
                match fam.name {
                    "blocked-xor" => {
                        for ell in [k - 1, 2 * (k - 1)] {
                            variants.push(ProtocolParams { ell: Some(ell), ..base.clone() });
                        }
                    }
                    "eq-multi" | "eq-relay" if k % 2 == 0 => {}
                    "forward" => {
                        for i in 1..k {
                            variants.push(ProtocolParams { variant: Some(i), ..base.clone() });
                        }
                    }
                    "myopic-eq" if k < 4 => {}
                    "myopic-eq" => {
                        let mut reversed: Vec<usize> = (1..=k).collect();
                        reversed.reverse();
                        variants.push(base.clone());
                        variants.push(ProtocolParams {
                            order: Some(Permutation::new(reversed)?),
                            ..base.clone()
                        });
                    }
                    _ => variants.push(base.clone()),
                }
                for p in variants {
                    let spec = protocols::build(fam.name, &p)?;
                    if spec.shape().domain_size() <= cap {
                        out.push(spec);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn check_audit(o: &DemoOptions) -> Result<(bool, String)> {
    let cap = if o.quick { QUICK_AUDIT_DOMAIN_CAP } else { AUDIT_DOMAIN_CAP };
    let specs = builtin_catalogue(o.seed, cap)?;
    let mut flips = 0;
    for spec in &specs {
        let r = crate::verifier::audit(spec, o.budget)?;
        if !r.pattern_checked || r.flips == 0 {
            return Ok((false, format!("{}: pattern_checked={}, flips={}", spec.name(), r.pattern_checked, r.flips)));
        }
        flips += r.flips;
    }
    Ok((true, format!("{} protocols, {flips} hidden-bit flips replayed", specs.len())))
}
