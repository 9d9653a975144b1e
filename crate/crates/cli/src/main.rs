use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nofmux::combinatorics::Permutation;
use nofmux::compiler::CompilePath;
use nofmux::demo::{run_criterion, run_demo, DemoOptions, DEMO_SEED};
use nofmux::io::{
    compile_plan, matrix_for, read_json, validate_certificate, write_json, CertificateFile,
    CompiledDescriptor, PlanFile,
};
use nofmux::model::{Budget, RestrictionGraph, DEFAULT_BUDGET};
use nofmux::protocols::{self, ProtocolParams};
use nofmux::verifier::{exhaustive_verify, random_truth_table, sample_verify, VerifyOptions};
use nofmux::Error;

#[derive(Parser)]
#[command(name = "nofmux", version, about = "Multiplexing compilers and exhaustive checks for NOF protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Write the JSON result here instead of only printing a summary.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum number of protocol runs of an exhaustive sweep.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check a filtering, multiplexing or repetitive certificate.
    Validate {
        certificate: PathBuf,
        /// Restriction graph file, overriding any graph in the certificate.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Build the permutation matrix of a filtering set.
    Matrix {
        certificate: PathBuf,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compile a plan into a multi-instance protocol descriptor.
    Compile {
        plan: PathBuf,
        /// Override the plan's compilation path.
        #[arg(long)]
        path: Option<CompilePath>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a protocol or compiled plan against its truth table.
    Verify(VerifyArgs),
    /// Run the demonstration suite.
    Demo {
        /// Cheaper variant of the two slowest checks.
        #[arg(long)]
        quick: bool,
        /// Run a single check.
        #[arg(long)]
        criterion: Option<usize>,
        #[arg(long, default_value_t = DEMO_SEED)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Compiled plan to verify.
    #[arg(long, conflicts_with = "protocol")]
    plan: Option<PathBuf>,
    #[arg(long)]
    path: Option<CompilePath>,
    /// Built-in protocol family.
    #[arg(long, required_unless_present = "plan", requires_all = ["k", "n"])]
    protocol: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    /// `Q^i` of the restricted-view family.
    #[arg(long)]
    variant: Option<usize>,
    /// Chain order for myopic protocols, e.g. `4,2,5,1,3`.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    /// Seed of the random truth table given to families that take one.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check this many random inputs instead of the whole domain.
    #[arg(long)]
    samples: Option<u64>,
    #[command(flatten)]
    common: Common,
}

/// Failure of a command: bad input (exit 2) or a failed check (exit 1).
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Usage(format!("cannot read or write file: {e}")),
            Error::Json(e) => Failure::Usage(format!("malformed JSON: {e}")),
            e @ Error::Budget { .. } => Failure::Usage(format!("budget exceeded: {e}")),
            e @ Error::Domain(_) => Failure::Usage(e.to_string()),
            e => Failure::Check(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    if let Some(path) = out {
        write_json(path, value)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    read_json(path).map_err(|e| match e {
        Error::Io(e) => Failure::Usage(format!("cannot read {}: {e}", path.display())),
        Error::Json(e) => Failure::Usage(format!("malformed JSON in {}: {e}", path.display())),
        e => e.into(),
    })
}

fn load_graph(path: Option<&PathBuf>) -> Result<Option<RestrictionGraph>, Failure> {
    path.map(|p| load(p)).transpose()
}

fn validate(certificate: &Path, graph: Option<&PathBuf>, common: &Common) -> Outcome {
    let cert: CertificateFile = load(certificate)?;
    let graph = load_graph(graph)?;
    let v = validate_certificate(&cert, graph.as_ref())?;
    println!("{} set: {}", v.kind, if v.valid { "valid" } else { "INVALID" });
    if let Some(loads) = &v.loads {
        let parts: Vec<String> = loads.iter().map(|(a, r)| format!("R({a})={r}")).collect();
        if !parts.is_empty() {
            println!("loads: {}", parts.join(", "));
        }
        if let (CertificateFile::Filtering { ell, .. }, Some(r)) = (&cert, v.r_max) {
            println!("max load {r}, needs ell > {r}, ell = {ell}");
        }
    }
    if let Some(violation) = &v.violation {
        println!("first violation: {violation}");
    }
    emit(common.out.as_deref(), &v)?;
    Ok(v.valid)
}

fn matrix(certificate: &Path, graph: Option<&PathBuf>, common: &Common) -> Outcome {
    let cert: CertificateFile = load(certificate)?;
    let graph = load_graph(graph)?;
    let (matrix, file) = matrix_for(&cert, graph.as_ref())?;
    print!("{matrix}");
    println!("(* marks entries filled in after the pinned ones)");
    for (i, rows) in file.row_of.iter().enumerate() {
        for (j, r) in rows.iter().enumerate() {
            println!("row({}, {}) = {r}", i + 1, j + 1);
        }
    }
    for t in &file.multiplexing_set {
        println!("multiplexing triplet ({}, {}, {:?})", t.a, t.b, t.r);
    }
    emit(common.out.as_deref(), &file)?;
    Ok(true)
}

fn load_plan(path: &Path, over: Option<CompilePath>) -> Result<PlanFile, Failure> {
    let mut plan: PlanFile = load(path)?;
    if let Some(p) = over {
        plan.path = p;
    }
    Ok(plan)
}

fn base_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn compile(plan_path: &Path, over: Option<CompilePath>, common: &Common) -> Outcome {
    let budget = Budget::new(common.budget);
    let plan = load_plan(plan_path, over)?;
    let loaded = compile_plan(&plan, base_dir(plan_path), budget)?;
    let d = CompiledDescriptor::new(&loaded.compiled, budget)?;
    println!("{}: {} rounds, {} groups", d.name, d.rounds, d.groups.len());
    println!("predicted bound {} bits, naive baseline {} bits", d.predicted_bound, d.naive_baseline);
    emit(common.out.as_deref(), &d)?;
    Ok(true)
}

fn verify(args: &VerifyArgs) -> Outcome {
    let budget = Budget::new(args.common.budget);
    let (spec, f, mut opts, seed) = if let Some(plan_path) = &args.plan {
        let plan = load_plan(plan_path, args.path)?;
        let loaded = compile_plan(&plan, base_dir(plan_path), budget)?;
        let d = CompiledDescriptor::new(&loaded.compiled, budget)?;
        let opts = VerifyOptions {
            budget,
            predicted_bound: Some(d.predicted_bound),
            naive_baseline: Some(d.naive_baseline),
        };
        (loaded.compiled.spec().clone(), loaded.function, opts, None)
    } else {
        let name = args.protocol.as_deref().unwrap_or_default();
        let fam = protocols::family(name).ok_or_else(|| Failure::Usage(format!("unknown protocol {name:?}")))?;
        let (k, n) = (args.k.unwrap_or_default(), args.n.unwrap_or_default());
        let order = args.order.clone().map(Permutation::new).transpose()?;
        let params = ProtocolParams {
            k,
            n,
            ell: args.ell,
            f: fam.takes_function.then(|| random_truth_table(k, n, args.seed)).transpose()?,
            variant: args.variant,
            order,
        };
        let spec = protocols::build(name, &params)?;
        let f = protocols::reference_function(name, &params)?;
        let seed = fam.takes_function.then_some(args.seed);
        (spec, f, VerifyOptions { budget, ..Default::default() }, seed)
    };
    let mut report = match args.samples {
        Some(samples) => sample_verify(&spec, &f, samples, args.seed, opts)?,
        None => {
            opts.budget = budget;
            exhaustive_verify(&spec, &f, opts)?
        }
    };
    if report.seed.is_none() {
        report.seed = seed;
    }
    let mode = if report.exhaustive { "exhaustive" } else { "sampled, not a proof" };
    println!("{}: {} inputs ({mode})", report.protocol, report.domain_size);
    println!("correct: {}", report.correct);
    if let Some(w) = report.measured_worst_case {
        match report.predicted_bound {
            Some(b) => println!("worst case {w} bits, predicted {b}"),
            None => println!("worst case {w} bits"),
        }
    }
    if let Some(c) = &report.counterexample {
        println!("counterexample {}: expected {:?}, got {:?}", c.input, c.expected, c.actual);
    }
    emit(args.common.out.as_deref(), &report)?;
    Ok(report.passed())
}

fn demo(quick: bool, criterion: Option<usize>, seed: u64, common: &Common) -> Outcome {
    let opts = DemoOptions {
        seed,
        budget: Budget::new(common.budget),
        quick,
    };
    let outcomes = match criterion {
        Some(c) => vec![run_criterion(c, &opts)?],
        None => run_demo(&opts),
    };
    for o in &outcomes {
        println!("{o}");
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} checks passed", outcomes.len());
    emit(common.out.as_deref(), &outcomes)?;
    Ok(passed == outcomes.len())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate {
            certificate,
            graph,
            common,
        } => validate(certificate, graph.as_ref(), common),
        Command::Matrix {
            certificate,
            graph,
            common,
        } => matrix(certificate, graph.as_ref(), common),
        Command::Compile { plan, path, common } => compile(plan, *path, common),
        Command::Verify(args) => verify(args),
        Command::Demo {
            quick,
            criterion,
            seed,
            common,
        } => demo(*quick, *criterion, *seed, common),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
