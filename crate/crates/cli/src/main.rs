//! Command-line front end.
//!
//! Exit codes: 0 success, 1 inconsistent sample (or a formula that fails
//! the sample under `check`), 2 resource exhaustion or solver timeout,
//! 3 usage and parse errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use ctlsynth::benchgen::{self, MutantSample};
use ctlsynth::bisim;
use ctlsynth::ctl::{self, Fragment};
use ctlsynth::diameter::{coarse_bound, scc_bound, DiameterKind};
use ctlsynth::encoder::{self, EncodeOptions, TemporalSemantics};
use ctlsynth::explicit;
use ctlsynth::kripke::{self, InputInstance, Polarity, Sample};
use ctlsynth::learner::{self, LearnError, LearnerConfig};
use ctlsynth::sat::{self, SolverBackend};

#[derive(Parser)]
#[command(name = "ctlsynth", version, about = "Learn separating CTL formulas from Kripke structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FragmentArg {
    /// Universal operators only (!, &, |, AX, AF, AG, AU)
    CtlUniv,
    /// The full logic
    Ctl,
    /// The fragment {!, |, EX, EG, EU}
    CtlU,
}

impl From<FragmentArg> for Fragment {
    fn from(value: FragmentArg) -> Fragment {
        match value {
            FragmentArg::CtlUniv => Fragment::CtlUniv,
            FragmentArg::Ctl => Fragment::Ctl,
            FragmentArg::CtlU => Fragment::CtlU,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DiameterArg {
    /// Constant bound |Q| - 1
    Coarse,
    /// Condensation-based bound
    Scc,
}

impl From<DiameterArg> for DiameterKind {
    fn from(value: DiameterArg) -> DiameterKind {
        match value {
            DiameterArg::Coarse => DiameterKind::Coarse,
            DiameterArg::Scc => DiameterKind::Scc,
        }
    }
}

#[derive(Args)]
struct EncodingFlags {
    /// Target fragment
    #[arg(long, value_enum, default_value = "ctl")]
    fragment: FragmentArg,
    /// Recurrence-diameter bound driving the encoding size
    #[arg(long, value_enum, default_value = "scc")]
    diameter: DiameterArg,
    /// Embed negations in the DAG nodes instead of spending ! nodes
    #[arg(long)]
    embed_negations: bool,
    /// Drop the redundant rank-monotonicity clauses
    #[arg(long)]
    no_ascent_descent: bool,
}

#[derive(Args)]
struct SolverFlags {
    /// External DIMACS solver command; built-in DPLL when absent
    #[arg(long)]
    solver: Option<String>,
    /// Per-call solver timeout in seconds
    #[arg(long)]
    timeout: Option<f64>,
}

impl SolverFlags {
    fn backend(&self) -> SolverBackend {
        match &self.solver {
            Some(command) => SolverBackend::External { command: command.clone() },
            None => SolverBackend::Builtin,
        }
    }

    fn duration(&self) -> Option<Duration> {
        self.timeout.map(Duration::from_secs_f64)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Learn a minimal separating formula
    Learn {
        #[command(flatten)]
        encoding: EncodingFlags,
        #[command(flatten)]
        solver: SolverFlags,
        /// Cap on the formula size (default: explicit-construction size)
        #[arg(long)]
        max_size: Option<usize>,
        /// Sample file
        sample: PathBuf,
    },
    /// Print the explicit (non-minimal) separating formula
    Explicit {
        /// Sample file
        sample: PathBuf,
    },
    /// Model-check a formula against every instance of a sample
    Check {
        /// Formula text
        #[arg(long, conflicts_with = "formula_file")]
        formula: Option<String>,
        /// File containing the formula
        #[arg(long)]
        formula_file: Option<PathBuf>,
        /// Use the bounded-semantics checker instead of the fixpoint one
        #[arg(long)]
        bounded: bool,
        /// Sample file
        sample: PathBuf,
    },
    /// Mutate the first structure of a file into a benchmark sample
    Mutate {
        /// Number of mutations to apply
        #[arg(long)]
        k: usize,
        /// Generator seed
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Input file (first ks block is the base structure)
        input: PathBuf,
    },
    /// Emit the DIMACS encoding of one size bound
    Encode {
        /// Formula size bound n
        #[arg(long)]
        size: usize,
        #[command(flatten)]
        encoding: EncodingFlags,
        /// Sample file
        sample: PathBuf,
    },
}

enum Failure {
    /// exit 1
    Inconsistent(String),
    /// exit 2
    Resources(String),
    /// exit 3
    Usage(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Inconsistent(_) => 1,
            Failure::Resources(_) => 2,
            Failure::Usage(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Inconsistent(m) | Failure::Resources(m) | Failure::Usage(m) => m,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            std::process::exit(failure.code());
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Learn { encoding, solver, max_size, sample } => {
            learn_cmd(&encoding, &solver, max_size, &sample)
        }
        Command::Explicit { sample } => explicit_cmd(&sample),
        Command::Check { formula, formula_file, bounded, sample } => {
            check_cmd(formula, formula_file, bounded, &sample)
        }
        Command::Mutate { k, seed, input } => mutate_cmd(k, seed, &input),
        Command::Encode { size, encoding, sample } => encode_cmd(size, &encoding, &sample),
    }
}

fn load_instances(path: &PathBuf) -> Result<Vec<InputInstance>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    kripke::parse_instances(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_sample(path: &PathBuf) -> Result<(Vec<InputInstance>, Sample), Failure> {
    let instances = load_instances(path)?;
    let sample = kripke::coalesce(&instances)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok((instances, sample))
}

fn learn_cmd(
    encoding: &EncodingFlags,
    solver: &SolverFlags,
    max_size: Option<usize>,
    path: &PathBuf,
) -> Result<(), Failure> {
    let (instances, sample) = load_sample(path)?;
    let config = LearnerConfig {
        fragment: encoding.fragment.into(),
        diameter: encoding.diameter.into(),
        embed_negations: encoding.embed_negations,
        ascent_descent: !encoding.no_ascent_descent,
        max_size,
        solver: solver.backend(),
        timeout: solver.duration(),
    };
    let outcome = learner::learn(&sample, &config).map_err(|err| match err {
        LearnError::InconsistentSample(v) => Failure::Inconsistent(v.to_string()),
        LearnError::SizeCapExhausted { .. } | LearnError::SolverUnknown { .. } => {
            Failure::Resources(err.to_string())
        }
        other => Failure::Resources(other.to_string()),
    })?;

    let stats = &outcome.stats;
    eprintln!(
        "structure: {} states (minimized to {}), positives {}, negatives {}, degree {}, characteristic {}",
        stats.original_states,
        stats.minimized_states,
        stats.positives,
        stats.negatives,
        stats.degree,
        stats.sample_characteristic,
    );
    eprintln!(
        "options: fragment={} diameter={} negations={} ascent-descent={} solver={}",
        config.fragment.as_str(),
        config.diameter.as_str(),
        if config.embed_negations { "embedded" } else { "plain" },
        if config.ascent_descent { "on" } else { "off" },
        match &config.solver {
            SolverBackend::Builtin => "builtin".to_string(),
            SolverBackend::External { command } => command.clone(),
        },
    );
    eprintln!("size cap: {}", stats.size_cap);
    let mut total = Duration::ZERO;
    for it in &stats.iterations {
        total += it.solver_time;
        eprintln!(
            "n={}: atlas {} vars, cnf {} vars, {} clauses, {}, {:.3}ms",
            it.n,
            it.atlas_vars,
            it.cnf_vars,
            it.cnf_clauses,
            it.status.as_str(),
            it.solver_time.as_secs_f64() * 1e3,
        );
    }
    if outcome.embedded {
        eprintln!(
            "learnt size {} (embedded metric; {} as plain nodes), total solver time {:.3}ms",
            outcome.size,
            outcome.plain_size,
            total.as_secs_f64() * 1e3,
        );
    } else {
        eprintln!(
            "learnt size {} (plain), total solver time {:.3}ms",
            outcome.size,
            total.as_secs_f64() * 1e3,
        );
    }
    println!("{}", outcome.formula.to_text(instances[0].structure.atom_names()));
    Ok(())
}

fn explicit_cmd(path: &PathBuf) -> Result<(), Failure> {
    let (instances, sample) = load_sample(path)?;
    let result = bisim::refine(&sample.structure);
    let characteristic = bisim::check_sample(&result, &sample)
        .map_err(|v| Failure::Inconsistent(v.to_string()))?;
    let formula = explicit::separating_formula(&sample, &result)
        .map_err(|v| Failure::Inconsistent(v.to_string()))?;
    let bound = explicit::tree_size_bound(
        sample.structure.degree(),
        characteristic,
        sample.positives.len(),
        sample.negatives.len(),
    );
    eprintln!(
        "dag size {}, tree size {}, tree bound {}, sample characteristic {}",
        formula.size(),
        formula.tree_size(),
        bound,
        characteristic,
    );
    println!("{}", formula.to_text(instances[0].structure.atom_names()));
    Ok(())
}

fn check_cmd(
    formula: Option<String>,
    formula_file: Option<PathBuf>,
    bounded: bool,
    path: &PathBuf,
) -> Result<(), Failure> {
    let text = match (formula, formula_file) {
        (Some(text), None) => text,
        (None, Some(file)) => std::fs::read_to_string(&file)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?
            .trim()
            .to_string(),
        _ => return Err(Failure::Usage("pass exactly one of --formula/--formula-file".into())),
    };
    let (instances, sample) = load_sample(path)?;
    let atoms = instances[0].structure.atom_names();
    let formula = ctl::parse(&text, atoms)
        .map_err(|e| Failure::Usage(format!("formula: {e}")))?;
    let states = if bounded {
        let bound = scc_bound(&sample.structure);
        ctl::satisfying_states_bounded(&sample.structure, &formula, &bound)
    } else {
        ctl::satisfying_states(&sample.structure, &formula)
    }
    .map_err(|e| Failure::Usage(format!("formula: {e}")))?;

    let offsets = kripke::instance_offsets(&instances);
    let mut consistent = true;
    println!("instance\tpolarity\tsatisfied\tconsistent");
    for (inst, &offset) in instances.iter().zip(&offsets) {
        let holds = states[offset + inst.initial];
        let expected = inst.polarity == Polarity::Positive;
        let ok = holds == expected;
        consistent &= ok;
        println!(
            "{}\t{}\t{}\t{}",
            inst.name,
            inst.polarity.as_str(),
            if holds { "yes" } else { "no" },
            if ok { "yes" } else { "NO" },
        );
    }
    if consistent {
        println!("formula is consistent with the sample");
        Ok(())
    } else {
        println!("formula is NOT consistent with the sample");
        Err(Failure::Inconsistent("formula fails the sample".into()))
    }
}

fn mutate_cmd(k: usize, seed: u64, path: &PathBuf) -> Result<(), Failure> {
    let instances = load_instances(path)?;
    let base = instances
        .first()
        .ok_or_else(|| Failure::Usage("input file declares no structure".into()))?;
    let outcome = benchgen::make_sample(&base.structure, &base.name, k, seed)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    match outcome {
        MutantSample::Consistent { instances, ops, .. } => {
            let mut summary = String::new();
            for op in &ops {
                let _ = write!(summary, " {op:?}");
            }
            eprintln!("applied{summary}");
            print!("{}", kripke::serialize_instances(&instances));
            Ok(())
        }
        MutantSample::Bisimilar { .. } => Err(Failure::Inconsistent(format!(
            "mutant stays bisimilar to the original (k={k}, seed={seed}); nothing emitted"
        ))),
    }
}

fn encode_cmd(size: usize, encoding: &EncodingFlags, path: &PathBuf) -> Result<(), Failure> {
    let (_, sample) = load_sample(path)?;
    let result = bisim::refine(&sample.structure);
    let minimized =
        bisim::minimize(&result, &sample).map_err(|v| Failure::Inconsistent(v.to_string()))?;
    let bound = match DiameterKind::from(encoding.diameter) {
        DiameterKind::Coarse => coarse_bound(&minimized.structure),
        DiameterKind::Scc => scc_bound(&minimized.structure),
    };
    let options = EncodeOptions {
        fragment: encoding.fragment.into(),
        embed_negations: encoding.embed_negations,
        ascent_descent: !encoding.no_ascent_descent,
        semantics: TemporalSemantics::Ranked,
    };
    let ctx = encoder::build(&minimized, size, &bound, &options)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let cnf = ctx.to_cnf();
    print!("c ctlsynth encoding: n={size} atlas={} total={}\n{}", ctx.var_count(), cnf.var_count, sat::emit_dimacs(&cnf));
    Ok(())
}
