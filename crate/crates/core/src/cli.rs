//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage
//! error, 3 budget exhausted.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use clap::{Args, Parser, Subcommand};

use crate::bfstruct::{assemble_from, verify_with, BfStructure};
use crate::builder::{build_with_type_engine, check_chain, henkin_build, BuildBudget, BuildError, BuildErrorKind};
use crate::catalog::{Catalog, TypeRef};
use crate::class::{ClassEnumerator, ClassKind};
use crate::engine::Engine;
use crate::error::Error;
use crate::extlang::{t_alpha, t_alpha_sigma};
use crate::formula::Theory;
use crate::rank::scott_rank_with;
use crate::structure::{format_tuple, parse_tuple, Structure, Tuple};

#[derive(Parser, Debug)]
#[command(name = "bfcalc", version, about = "Back-and-forth calculus on finite relational structures")]
struct Cli {
    /// Cap on game-tree nodes explored by the engine.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ClassArgs {
    /// linord, equiv, graph, or files:a.struct,b.struct
    #[arg(long)]
    class: String,
    #[arg(long)]
    max_size: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare two pairs under ≤ₙ.
    Compare {
        #[arg(long)]
        level: usize,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "")]
        tuple_a: String,
        #[arg(long, default_value = "")]
        tuple_b: String,
    },
    /// bf-type of a pair within a class fragment.
    Type {
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        class: ClassArgs,
        a: PathBuf,
        #[arg(long, default_value = "")]
        tuple: String,
    },
    /// Assemble the bf-structure of a class.
    Structure {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        arity_bound: usize,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Check a bf-structure file against a class.
    Verify {
        bfs: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Scott rank and per-tuple ρ.
    Scott {
        a: PathBuf,
        /// Longest tuple examined (default: the domain size).
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Number of ≡ₙ classes of k-tuples.
    Count {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        arity: usize,
    },
    /// Write T_α, or T_{α,σ} with --sigma.
    Axioms {
        bfs: PathBuf,
        #[arg(long, num_args = 3, value_names = ["LEVEL", "ARITY", "ID"])]
        sigma: Option<Vec<usize>>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Build a model whose constants realize σ.
    Build {
        #[arg(long)]
        bfs: PathBuf,
        #[arg(long, num_args = 3, value_names = ["LEVEL", "ARITY", "ID"])]
        sigma: Vec<usize>,
        #[arg(long)]
        max_stages: usize,
        #[arg(long)]
        max_domain: usize,
        /// Members of the fragment searched (default: all).
        #[arg(long)]
        enumerator_bound: Option<usize>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long)]
        chain: Option<PathBuf>,
    },
    /// Henkin construction for a Π₂ theory.
    Henkin {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        class: String,
        /// Largest class member enumerated.
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        #[arg(long)]
        max_stages: usize,
        /// Largest stage (default: --max-size).
        #[arg(long)]
        max_domain: Option<usize>,
        #[arg(long)]
        enumerator_bound: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: usize,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long)]
        chain: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget(_) => Failure::Budget(e.to_string()),
            e => Failure::Domain(e.to_string()),
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e.kind {
            BuildErrorKind::DomainExceeded { .. } => Failure::Budget(e.to_string()),
            BuildErrorKind::Engine(inner) => inner.into(),
            BuildErrorKind::EnumeratorExhausted { .. } => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (2, m),
                Failure::Domain(m) => (1, m),
                Failure::Budget(m) => (3, m),
            };
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source }.into())
}

fn write_to(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Outcome {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io { path: p.to_path_buf(), source }.into()),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Domain(e.to_string())),
    }
}

fn structure(path: &Path) -> std::result::Result<Structure, Failure> {
    Ok(Structure::parse(&read(path)?)?)
}

fn tuple(flag: &str, text: &str) -> std::result::Result<Tuple, Failure> {
    parse_tuple(text).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn class(spec: &str, max_size: usize) -> std::result::Result<ClassEnumerator, Failure> {
    let kind: ClassKind = spec.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    if max_size == 0 {
        return Err(Failure::Usage("--max-size must be at least 1".into()));
    }
    Ok(ClassEnumerator::new(kind, max_size))
}

fn type_ref(v: &[usize]) -> TypeRef {
    TypeRef::new(v[0], v[1], v[2])
}

fn engine(budget: Option<u64>) -> Engine {
    match budget {
        Some(b) => Engine::new().with_budget(b),
        None => Engine::new(),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome {
    let budget = cli.budget;
    let say = |out: &mut dyn Write, text: String| out.write_all(text.as_bytes()).map_err(|e| Failure::Domain(e.to_string()));
    match cli.command {
        Command::Compare { level, a, b, tuple_a, tuple_b } => {
            let (ta, tb) = (tuple("tuple-a", &tuple_a)?, tuple("tuple-b", &tuple_b)?);
            let (a, b) = (structure(&a)?, structure(&b)?);
            let c = engine(budget).compare(&a, &ta, &b, &tb, level)?;
            say(out, format!("{c}\n"))
        }
        Command::Type { level, class: c, a, tuple: t } => {
            let t = tuple("tuple", &t)?;
            let k = class(&c.class, c.max_size)?;
            let a = structure(&a)?;
            let mut cat = Catalog::with_options(k, None, budget)?;
            let ty = cat
                .classify(level, &a, &t)?
                .ok_or_else(|| Failure::Domain(format!("the pair realizes no {level}-type of the class fragment")))?;
            let rep = cat.get(ty)?;
            let s = &cat.structures()[rep.rep_index];
            say(out, format!("type {ty}\nrep {} {}\n{}", rep.rep_index, format_tuple(&rep.rep_tuple), s.serialize()))
        }
        Command::Structure { class: c, level, arity_bound, output } => {
            let k = class(&c.class, c.max_size)?;
            let mut cat = Catalog::with_options(k, None, budget)?;
            let bfs = assemble_from(&mut cat, level, arity_bound)?;
            write_to(output.as_deref(), &bfs.serialize(), out)
        }
        Command::Verify { bfs, class: c } => {
            let k = class(&c.class, c.max_size)?;
            let candidate = BfStructure::deserialize(&read(&bfs)?)?;
            let mut cat = Catalog::with_options(k, None, budget)?;
            let report = verify_with(&candidate, &mut cat, candidate.levels)?;
            say(out, report.render())?;
            match report.failure {
                None => Ok(()),
                Some(f) => Err(Failure::Domain(format!("verification failed at {f}"))),
            }
        }
        Command::Scott { a, bound } => {
            let a = structure(&a)?;
            let report = scott_rank_with(&engine(budget), &a, bound)?;
            say(out, report.render())
        }
        Command::Count { class: c, level, arity } => {
            let k = class(&c.class, c.max_size)?;
            let mut cat = Catalog::with_options(k, None, budget)?;
            let n = cat.count_classes(level, arity)?;
            say(out, format!("{n}\n"))
        }
        Command::Axioms { bfs, sigma, output } => {
            let b = BfStructure::deserialize(&read(&bfs)?)?;
            let t = match sigma {
                Some(v) => t_alpha_sigma(&b, type_ref(&v))?,
                None => t_alpha(&b)?,
            };
            write_to(output.as_deref(), &t.serialize(), out)
        }
        Command::Build { bfs, sigma, max_stages, max_domain, enumerator_bound, output, chain } => {
            let b = BfStructure::deserialize(&read(&bfs)?)?;
            let bound = enumerator_bound.unwrap_or(b.structures()?.len());
            let limits = BuildBudget::new(max_stages, max_domain, bound).map_err(|e| Failure::Usage(e.to_string()))?;
            let sigma = type_ref(&sigma);
            match build_with_type_engine(&b, sigma, limits, Rc::new(engine(budget))) {
                Ok(r) => {
                    if let Some(p) = &chain {
                        write_to(Some(p), &r.chain.serialize(), out)?;
                    }
                    write_to(output.as_deref(), &r.structure.serialize(), out)?;
                    say(out, format!("tuple {}\ncomparison {}\n", format_tuple(&r.tuple), r.comparison))
                }
                Err(e) => {
                    if let Some(p) = &chain {
                        write_to(Some(p), &e.chain.serialize(), out)?;
                    }
                    Err(e.into())
                }
            }
        }
        Command::Henkin { theory, class: spec, max_size, max_stages, max_domain, enumerator_bound, seed, output, chain } => {
            let k = class(&spec, max_size)?;
            let t = Theory::parse(&read(&theory)?)?;
            let members = k.enumerate()?.len();
            let limits = BuildBudget::new(max_stages, max_domain.unwrap_or(max_size), enumerator_bound.unwrap_or(members))
                .map_err(|e| Failure::Usage(e.to_string()))?;
            match henkin_build(&t, &k, limits, seed) {
                Ok(c) => {
                    if let Some(p) = &chain {
                        write_to(Some(p), &c.serialize(), out)?;
                    }
                    write_to(output.as_deref(), &c.final_structure().serialize(), out)?;
                    let report = check_chain(&c, &t)?;
                    let status = match &c.frontier {
                        None => "complete".to_string(),
                        Some((i, tu)) => format!("frontier {i} {}", format_tuple(tu)),
                    };
                    say(out, format!("stages {}\n{status}\n{}", c.stages.len(), report.render()))
                }
                Err(e) => {
                    if let Some(p) = &chain {
                        write_to(Some(p), &e.chain.serialize(), out)?;
                    }
                    Err(e.into())
                }
            }
        }
    }
}
