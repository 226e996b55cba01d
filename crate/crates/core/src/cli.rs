//! Command-line front end.
//!
//! Exit codes: 0 success (accepts, member, holds), 1 negative answer
//! (rejects, not a member, fails, no witness), 2 usage or format error,
//! 3 budget exhausted.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::automaton::{accepts, build_a_l, multiplicity, parse_automaton, print_automaton, symmetrize, Automaton};
use crate::elements::{check_equations, find_elements, parse_elements, print_elements, ElementsFile, SearchBudget};
use crate::error::{Error, Result};
use crate::pattern::{parse_pattern, Env};
use crate::pebble::{build_pebble_l, default_fuel, pebble_run, Verdict};
use crate::relation::RelationContext;
use crate::separation::{ambiguity_witness, build_t_trees, verify_main_lemma, MainLemmaVerdict};
use crate::tree::{enumerate_trees, in_language_L, random_tree, LabeledTree, Tree};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser, Debug)]
#[command(name = "twa", version, about = "Tree-walking automata toolkit")]
struct Cli {
    /// worker threads for corpus commands
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// seed for randomized steps
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an automaton on a tree.
    Simulate {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        /// also count accepting computations (up to two, or infinite)
        #[arg(long)]
        multiplicity: bool,
    },
    /// Decide membership in L directly.
    CheckL {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Print every tree up to a size, one per line.
    Enumerate {
        #[arg(long)]
        max_nodes: usize,
    },
    /// Compare a recognizer for L against the direct decision procedure.
    Crosscheck {
        which: Recognizer,
        #[arg(long)]
        max_nodes: usize,
        /// additional random trees
        #[arg(long, default_value_t = 0)]
        random: usize,
        /// size of the random trees
        #[arg(long, default_value_t = 201)]
        random_nodes: usize,
    },
    /// Print the run relation of a pattern expression.
    Relation {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        elements: Option<PathBuf>,
    },
    /// Search for idempotent elements and write them to a file.
    FindElements {
        #[arg(long)]
        automaton: PathBuf,
        /// maximum number of generated relation values
        #[arg(long)]
        budget: Option<usize>,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Check the inclusion of the small correct pattern's relation in the
    /// faulty pattern's.
    VerifyMainLemma {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
        /// write a JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write the time-symmetric version of an automaton.
    Symmetrize {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Find a small tree with two accepting computations.
    AmbiguityWitness {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        max_nodes: usize,
    },
    /// Build the four trees T00, T01, T10, T11 and check their membership.
    TTrees {
        #[arg(long)]
        elements: PathBuf,
        #[arg(long)]
        surrogate_m: usize,
        /// length of the small correct pattern
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Recognizer {
    /// the tree-walking automaton for L
    #[value(name = "a-l")]
    AL,
    /// the one-pebble machine for L
    Pebble,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code.
pub fn run_cli<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    match execute(&cli, &pool, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Budget(_) => 3,
                _ => 2,
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> Result<T>) -> Result<T> {
    parse(&read(path)?).map_err(|e| e.in_file(&path.display().to_string()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

fn budget(max_values: Option<usize>) -> SearchBudget {
    let mut b = SearchBudget::from_env();
    if let Some(v) = max_values {
        b.max_values = v;
    }
    b
}

fn execute(cli: &Cli, pool: &rayon::ThreadPool, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Simulate { automaton, tree, multiplicity: count } => {
            let a = load(automaton, parse_automaton)?;
            let t = load(tree, Tree::parse_sexpr)?;
            let ok = accepts(&a, &t).map_err(|e| Error::Usage(format!("{}: {e}", tree.display())))?;
            writeln!(out, "{}", if ok { "ACCEPT" } else { "REJECT" })?;
            if *count {
                writeln!(out, "multiplicity {}", multiplicity(&a, &t))?;
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::CheckL { tree } => {
            let t = load(tree, Tree::parse_sexpr)?;
            let member = in_language_L(&t);
            writeln!(out, "{}", if member { "member" } else { "not member" })?;
            Ok(if member { 0 } else { 1 })
        }
        Command::Enumerate { max_nodes } => {
            for t in enumerate_trees(*max_nodes) {
                writeln!(out, "{t}")?;
            }
            Ok(0)
        }
        Command::Crosscheck { which, max_nodes, random, random_nodes } => {
            let mut trees: Vec<LabeledTree> = enumerate_trees(*max_nodes).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            trees.extend((0..*random).map(|_| {
                let size = rng.gen_range(1..=*random_nodes);
                random_tree(&mut rng, size, 0.5)
            }));
            let summary = pool.install(|| crosscheck(*which, &trees));
            for (k, verdict) in summary.mismatches.iter().take(10) {
                writeln!(out, "mismatch {}: {verdict}", trees[*k])?;
            }
            writeln!(out, "{} trees, {} mismatches", trees.len(), summary.mismatches.len())?;
            Ok(if summary.mismatches.is_empty() { 0 } else { 1 })
        }
        Command::Relation { automaton, pattern, elements } => {
            let a = load(automaton, parse_automaton)?;
            let env = match elements {
                Some(path) => load(path, parse_elements)?.env()?,
                None => Env::new(),
            };
            let e = parse_pattern(pattern).map_err(|e| e.in_file("--pattern"))?;
            let mut ctx = RelationContext::new(&a, &env);
            let r = ctx.eval(&e)?;
            write!(out, "{}", r.dump(a.state_names()))?;
            Ok(0)
        }
        Command::FindElements { automaton, budget: b, output } => {
            let a = load(automaton, parse_automaton)?;
            let env = Env::new();
            let mut ctx = RelationContext::new(&a, &env);
            match find_elements(&mut ctx, &budget(*b)) {
                Ok(t) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let report = check_equations(&mut ctx, &t, 200, &mut rng);
                    write!(out, "{}", report.summary())?;
                    write_file(output, &print_elements(&ElementsFile::from(&t)))?;
                    Ok(if report.passed() { 0 } else { 1 })
                }
                Err(e) => {
                    writeln!(out, "{e}")?;
                    Ok(3)
                }
            }
        }
        Command::VerifyMainLemma { automaton, budget: b, report } => {
            let a = load(automaton, parse_automaton)?;
            let r = verify_main_lemma(&a, &budget(*b))?;
            writeln!(out, "{}", r.verdict_line())?;
            if let Some(path) = report {
                let json = serde_json::to_string_pretty(&r.to_json()).expect("json value");
                write_file(path, &(json + "\n"))?;
            }
            Ok(match r.verdict {
                MainLemmaVerdict::Holds => 0,
                MainLemmaVerdict::Fails { .. } => 1,
                MainLemmaVerdict::ElementsExhausted(_) => 3,
            })
        }
        Command::Symmetrize { automaton, output } => {
            let a = load(automaton, parse_automaton)?;
            write_file(output, &print_automaton(&symmetrize(&a).automaton))?;
            Ok(0)
        }
        Command::AmbiguityWitness { automaton, max_nodes } => {
            let a = load(automaton, parse_automaton)?;
            match ambiguity_witness(&a, *max_nodes) {
                Some(w) => {
                    write!(out, "{}", w.render(&a))?;
                    Ok(0)
                }
                None => {
                    writeln!(out, "no witness up to {max_nodes} nodes")?;
                    Ok(1)
                }
            }
        }
        Command::TTrees { elements, surrogate_m, n, output } => {
            let env = load(elements, parse_elements)?.env()?;
            if *surrogate_m < 1 {
                return Err(Error::Usage("--surrogate-m must be positive".into()));
            }
            let trees = build_t_trees(&env, *n, *surrogate_m, 1 << 24)?;
            std::fs::create_dir_all(output)
                .map_err(|e| Error::Usage(format!("cannot create {}: {e}", output.display())))?;
            let mut ok = true;
            for (name, t, want) in [("T00", &trees[0], false), ("T01", &trees[1], true), ("T10", &trees[2], true), ("T11", &trees[3], true)] {
                write_file(&output.join(format!("{name}.tree")), &format!("{t}\n"))?;
                let member = in_language_L(t);
                ok &= member == want;
                writeln!(out, "{name} {} nodes {}", t.len(), if member { "member" } else { "not member" })?;
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

pub struct CrosscheckSummary {
    /// indices into the input with the recognizer's verdict
    pub mismatches: Vec<(usize, String)>,
}

fn crosscheck(which: Recognizer, trees: &[LabeledTree]) -> CrosscheckSummary {
    let a_l: Automaton = build_a_l();
    let pebble = build_pebble_l();
    let mut mismatches: Vec<(usize, String)> = trees
        .par_iter()
        .enumerate()
        .filter_map(|(k, t)| {
            let want = in_language_L(t);
            let (got, verdict) = match which {
                Recognizer::AL => {
                    let ok = accepts(&a_l, t).expect("alphabet {a, b}");
                    (Some(ok), if ok { "accept" } else { "reject" }.to_string())
                }
                Recognizer::Pebble => match pebble_run(&pebble, t, default_fuel(t)).0 {
                    Verdict::Accept => (Some(true), "accept".into()),
                    Verdict::Reject => (Some(false), "reject".into()),
                    Verdict::FuelExhausted => (None, "fuel exhausted".into()),
                },
            };
            (got != Some(want)).then_some((k, verdict))
        })
        .collect();
    mismatches.sort();
    CrosscheckSummary { mismatches }
}
