//! Henkin-style model building for `Π₂` theories over a finite-diagram
//! source, and the prescribed-type construction through `T_{α,σ}`.
//!
//! Requirements are pairs `(i, ā)`: clause `i` of the normal form and a
//! tuple for its universal prefix. They are handled in the order of
//! `(max ā + 1, i, ā)`, so pairs over an old domain always precede pairs
//! that mention a new element.

use std::fmt;
use std::rc::Rc;

use crate::bfstruct::BfStructure;
use crate::catalog::TypeRef;
use crate::class::ClassEnumerator;
use crate::engine::{Comparison, Engine};
use crate::error::{Error, Result};
use crate::extlang::{expand_with, t_alpha_sigma, ExtendedStructure};
use crate::formula::{classify, eval, Formula, Term, Theory, WithConstants};
use crate::structure::{all_tuples, dedup, format_tuple, parse_tuple, Structure, Tuple};

/// Resource limits standing in for "in the limit".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildBudget {
    /// Extension stages after the initial diagram.
    pub max_stages: usize,
    /// Largest domain a stage may have.
    pub max_domain: usize,
    /// Only the first this many members of the diagram source are searched.
    pub enumerator_bound: usize,
}

impl BuildBudget {
    pub fn new(max_stages: usize, max_domain: usize, enumerator_bound: usize) -> Result<Self> {
        if max_stages == 0 || max_domain == 0 || enumerator_bound == 0 {
            return Err(Error::invalid("budget fields must be positive"));
        }
        Ok(BuildBudget { max_stages, max_domain, enumerator_bound })
    }
}

/// `∀ vars matrix` with a `Σ₁` matrix. `source` is the sentence index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub vars: Vec<String>,
    pub matrix: Formula,
    pub source: usize,
}

/// Splits every sentence into `∀∃` clauses: conjunctions are split,
/// universal quantifiers pulled out of conjunctions and disjunctions.
/// Anything that would need an `∃∀` prefix is rejected.
pub fn normalize(theory: &Theory) -> Result<Vec<Clause>> {
    let mut out = Vec::new();
    for (source, (f, tag)) in theory.sentences.iter().enumerate() {
        if !classify(f).within_pi(2) {
            return Err(Error::NotPi2(format!("sentence {source} ({tag}) is {}", classify(f))));
        }
        let mut parts = Vec::new();
        split(&[], f.nnf(), &mut 0, &mut parts).map_err(|e| match e {
            Error::NotPi2(m) => Error::NotPi2(format!("sentence {source} ({tag}): {m}")),
            e => e,
        })?;
        out.extend(parts.into_iter().map(|(vars, matrix)| Clause { vars, matrix, source }));
    }
    Ok(out)
}

fn has_forall(f: &Formula) -> bool {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) | Formula::Bf { .. } => false,
        Formula::Forall(..) => true,
        Formula::Not(g) | Formula::Exists(_, g) => has_forall(g),
        Formula::And(fs) | Formula::Or(fs) | Formula::BigAnd(fs) | Formula::BigOr(fs) => fs.iter().any(has_forall),
    }
}

fn fresh_names(vs: &[String], body: &Formula, taken: &[String], counter: &mut usize) -> (Vec<String>, Formula) {
    if vs.iter().all(|v| !taken.contains(v)) {
        return (vs.to_vec(), body.clone());
    }
    let renamed: Vec<String> = vs
        .iter()
        .map(|v| {
            *counter += 1;
            format!("{v}_{counter}")
        })
        .collect();
    let body = body.substitute(&|name| vs.iter().position(|v| v == name).map(|i| Term::var(renamed[i].clone())));
    (renamed, body)
}

fn split(prefix: &[String], f: Formula, counter: &mut usize, out: &mut Vec<(Vec<String>, Formula)>) -> Result<()> {
    if !has_forall(&f) {
        out.push((prefix.to_vec(), f));
        return Ok(());
    }
    match f {
        Formula::And(cs) | Formula::BigAnd(cs) => {
            for c in cs {
                split(prefix, c, counter, out)?;
            }
            Ok(())
        }
        Formula::Forall(vs, body) => {
            let (vs, body) = fresh_names(&vs, &body, prefix, counter);
            let mut p = prefix.to_vec();
            p.extend(vs);
            split(&p, body, counter, out)
        }
        Formula::Or(cs) | Formula::BigOr(cs) => {
            let mut flat = Vec::new();
            flatten_or(cs, &mut flat);
            let (mut with, rest): (Vec<_>, Vec<_>) = flat.into_iter().partition(has_forall);
            if with.len() != 1 {
                return Err(Error::NotPi2("a disjunction of several universal parts".into()));
            }
            match with.pop().expect("one part") {
                Formula::And(ds) | Formula::BigAnd(ds) => {
                    for d in ds {
                        let mut disj = rest.clone();
                        disj.push(d);
                        split(prefix, Formula::Or(disj), counter, out)?;
                    }
                    Ok(())
                }
                Formula::Forall(vs, body) => {
                    let mut taken = prefix.to_vec();
                    for r in &rest {
                        taken.extend(r.free_vars());
                    }
                    let (vs, body) = fresh_names(&vs, &body, &taken, counter);
                    let mut p = prefix.to_vec();
                    p.extend(vs);
                    let mut disj = rest;
                    disj.push(body);
                    split(&p, Formula::Or(disj), counter, out)
                }
                _ => Err(Error::NotPi2("an existential over a universal".into())),
            }
        }
        _ => Err(Error::NotPi2("an existential over a universal".into())),
    }
}

fn flatten_or(cs: Vec<Formula>, out: &mut Vec<Formula>) {
    for c in cs {
        match c {
            Formula::Or(ds) | Formula::BigOr(ds) => flatten_or(ds, out),
            c => out.push(c),
        }
    }
}

/// One extension step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub pair: (usize, Tuple),
    /// Index of the source structure that supplied the extension.
    pub witness: usize,
    pub structure: Structure,
}

/// `D₀ ⊆ D₁ ⊆ ⋯` with the pair each step handled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramChain {
    /// Interpretation of the constants `@0, @1, …` in every stage.
    pub constants: Tuple,
    pub initial: Structure,
    pub stages: Vec<Stage>,
    /// Least pair not handled when the run stopped; `None` when every pair
    /// over the final structure was handled.
    pub frontier: Option<(usize, Tuple)>,
}

impl DiagramChain {
    pub fn final_structure(&self) -> &Structure {
        self.stages.last().map_or(&self.initial, |s| &s.structure)
    }

    /// Every structure of the chain, `D₀` first.
    pub fn snapshots(&self) -> impl Iterator<Item = &Structure> {
        std::iter::once(&self.initial).chain(self.stages.iter().map(|s| &s.structure))
    }

    pub fn is_complete(&self) -> bool {
        self.frontier.is_none()
    }

    /// Text dump: a `chain v1` header, the constants, `D₀`, then per stage
    /// `stage s pair i <tuple> witness w` followed by the structure, each
    /// structure terminated by `end`, and finally the frontier.
    pub fn serialize(&self) -> String {
        let mut out = format!("chain v1\nconstants {}\ninitial\n", format_tuple(&self.constants));
        out.push_str(&self.initial.serialize());
        out.push_str("end\n");
        for (s, st) in self.stages.iter().enumerate() {
            out.push_str(&format!(
                "stage {} pair {} {} witness {}\n",
                s + 1,
                st.pair.0,
                format_tuple(&st.pair.1),
                st.witness
            ));
            out.push_str(&st.structure.serialize());
            out.push_str("end\n");
        }
        match &self.frontier {
            Some((i, t)) => out.push_str(&format!("frontier {} {}\n", i, format_tuple(t))),
            None => out.push_str("frontier none\n"),
        }
        out
    }

    pub fn parse(text: &str) -> Result<DiagramChain> {
        let mut cur = Cursor { lines: text.lines().collect(), pos: 0 };
        let (n, head) = cur.next("header")?;
        if head != "chain v1" {
            return Err(Error::syntax(n, "expected `chain v1`"));
        }
        let (n, c) = cur.next("constants")?;
        let constants = match c.strip_prefix("constants ") {
            Some(t) => parse_tuple(t).map_err(|e| Error::syntax(n, e.to_string()))?,
            None => return Err(Error::syntax(n, "expected constants")),
        };
        let (n, init) = cur.next("initial")?;
        if init != "initial" {
            return Err(Error::syntax(n, "expected `initial`"));
        }
        let initial = cur.structure()?;
        let mut stages = Vec::new();
        loop {
            let (n, line) = cur.next("stage or frontier")?;
            let words: Vec<&str> = line.split_whitespace().collect();
            let frontier = match words.as_slice() {
                ["frontier", "none"] => None,
                ["frontier", i, t] => {
                    let i = i.parse().map_err(|_| Error::syntax(n, "bad clause index"))?;
                    Some((i, parse_tuple(t).map_err(|e| Error::syntax(n, e.to_string()))?))
                }
                ["stage", s, "pair", i, t, "witness", w] => {
                    let num = |x: &str| x.parse::<usize>().map_err(|_| Error::syntax(n, format!("bad number `{x}`")));
                    if num(s)? != stages.len() + 1 {
                        return Err(Error::syntax(n, "stages out of order"));
                    }
                    let pair = (num(i)?, parse_tuple(t).map_err(|e| Error::syntax(n, e.to_string()))?);
                    let witness = num(w)?;
                    let structure = cur.structure()?;
                    stages.push(Stage { pair, witness, structure });
                    continue;
                }
                _ => return Err(Error::syntax(n, "expected `stage` or `frontier`")),
            };
            if cur.lines[cur.pos..].iter().any(|l| !l.trim().is_empty()) {
                return Err(Error::syntax(cur.pos + 1, "trailing content after frontier"));
            }
            return Ok(DiagramChain { constants, initial, stages, frontier });
        }
    }
}

struct Cursor<'t> {
    lines: Vec<&'t str>,
    pos: usize,
}

impl<'t> Cursor<'t> {
    fn next(&mut self, what: &str) -> Result<(usize, &'t str)> {
        let line = self.lines.get(self.pos).ok_or_else(|| Error::syntax(self.pos + 1, format!("expected {what}")))?;
        self.pos += 1;
        Ok((self.pos, line.trim()))
    }

    fn structure(&mut self) -> Result<Structure> {
        let mut body = String::new();
        loop {
            let (_, line) = self.next("`end`")?;
            if line == "end" {
                return Structure::parse(&body);
            }
            body.push_str(line);
            body.push('\n');
        }
    }
}

#[derive(Debug)]
pub enum BuildErrorKind {
    /// No source structure within the bound extends the stage as needed.
    EnumeratorExhausted { pair: (usize, Tuple) },
    /// The least extension would exceed the domain limit.
    DomainExceeded { pair: (usize, Tuple), needed: usize },
    Engine(Error),
}

/// A failed run, carrying the chain built so far.
#[derive(Debug)]
pub struct BuildError {
    pub kind: BuildErrorKind,
    pub chain: Box<DiagramChain>,
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BuildErrorKind::EnumeratorExhausted { pair } => {
                write!(f, "enumerator exhausted at pair {} {}", pair.0, format_tuple(&pair.1))
            }
            BuildErrorKind::DomainExceeded { pair, needed } => write!(
                f,
                "domain budget exceeded at pair {} {}: needs {} elements",
                pair.0,
                format_tuple(&pair.1),
                needed
            ),
            BuildErrorKind::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BuildError {}

/// Evaluates a clause matrix on a stage.
type StageEval<'e> = dyn FnMut(&Structure, &Formula, &[(String, usize)]) -> Result<bool> + 'e;

fn pairs_at(clauses: &[Clause], h: usize) -> Vec<(usize, Tuple)> {
    let mut out = Vec::new();
    for (i, c) in clauses.iter().enumerate() {
        let p = c.vars.len();
        if h == 0 {
            if p == 0 {
                out.push((i, Vec::new()));
            }
            continue;
        }
        if p == 0 {
            continue;
        }
        for t in all_tuples(h, p) {
            if t.contains(&(h - 1)) {
                out.push((i, t));
            }
        }
    }
    out
}

fn pair_holds(clauses: &[Clause], pair: &(usize, Tuple), s: &Structure, ev: &mut StageEval) -> Result<bool> {
    let c = &clauses[pair.0];
    let env: Vec<(String, usize)> = c.vars.iter().cloned().zip(pair.1.iter().copied()).collect();
    ev(s, &c.matrix, &env)
}

/// Injective maps `f` from the stage into `b` with `b` induced on the image
/// equal to the stage, in lexicographic order.
fn embeddings(stage: &Structure, b: &Structure, visit: &mut dyn FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    fn go(
        stage: &Structure,
        b: &Structure,
        f: &mut Vec<usize>,
        used: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        if f.len() == stage.size() {
            return visit(f);
        }
        let x = f.len();
        for y in 0..b.size() {
            if used[y] {
                continue;
            }
            f.push(y);
            if consistent(stage, b, f, x) {
                used[y] = true;
                let found = go(stage, b, f, used, visit)?;
                used[y] = false;
                if found {
                    return Ok(true);
                }
            }
            f.pop();
        }
        Ok(false)
    }
    let mut used = vec![false; b.size()];
    go(stage, b, &mut Vec::new(), &mut used, visit)
}

/// Checks every atom over `0..=x` that mentions `x`.
fn consistent(stage: &Structure, b: &Structure, f: &[usize], x: usize) -> bool {
    for (s, sym) in stage.signature().symbols().iter().enumerate() {
        for t in all_tuples(x + 1, sym.arity) {
            if !t.contains(&x) {
                continue;
            }
            let image: Vec<usize> = t.iter().map(|&i| f[i]).collect();
            if stage.holds(s, &t) != b.holds(s, &image) {
                return false;
            }
        }
    }
    true
}

/// `b` relabelled so that `f(i)` becomes `i` and the other elements follow
/// in increasing order.
fn place(b: &Structure, f: &[usize]) -> Structure {
    let mut perm = vec![usize::MAX; b.size()];
    for (i, &y) in f.iter().enumerate() {
        perm[y] = i;
    }
    let mut next = f.len();
    for p in perm.iter_mut() {
        if *p == usize::MAX {
            *p = next;
            next += 1;
        }
    }
    b.relabel(&perm)
}

struct Run<'r, 'e> {
    clauses: &'r [Clause],
    source: &'r [Structure],
    budget: BuildBudget,
    eval: &'r mut StageEval<'e>,
    accept: &'r mut dyn FnMut(&Structure) -> Result<bool>,
}

impl Run<'_, '_> {
    /// Least extension of `stage` (fewest new elements, then source order,
    /// then embedding order) that is accepted and satisfies the pair.
    fn witness(&mut self, stage: &Structure, pair: &(usize, Tuple)) -> Result<Option<(usize, Structure)>> {
        let d = stage.size();
        let largest = self.source.iter().map(Structure::size).max().unwrap_or(0);
        for size in d + 1..=largest {
            for (idx, b) in self.source.iter().enumerate() {
                if b.size() != size || b.signature() != stage.signature() {
                    continue;
                }
                let mut hit = None;
                let found = embeddings(stage, b, &mut |f| {
                    let cand = place(b, f);
                    if (self.accept)(&cand)? && pair_holds(self.clauses, pair, &cand, self.eval)? {
                        hit = Some(cand);
                        return Ok(true);
                    }
                    Ok(false)
                })?;
                if found {
                    return Ok(hit.map(|s| (idx, s)));
                }
            }
        }
        Ok(None)
    }

    fn build(&mut self, initial: Structure, constants: Tuple) -> std::result::Result<DiagramChain, BuildError> {
        let mut chain = DiagramChain { constants, initial, stages: Vec::new(), frontier: None };
        let fail = |kind, chain: &DiagramChain| BuildError { kind, chain: Box::new(chain.clone()) };
        let mut h = 0;
        while h <= chain.final_structure().size() {
            for pair in pairs_at(self.clauses, h) {
                let stage = chain.final_structure().clone();
                let ok = pair_holds(self.clauses, &pair, &stage, self.eval)
                    .map_err(|e| fail(BuildErrorKind::Engine(e), &chain))?;
                if ok {
                    continue;
                }
                if chain.stages.len() == self.budget.max_stages {
                    chain.frontier = Some(pair);
                    return Ok(chain);
                }
                match self.witness(&stage, &pair).map_err(|e| fail(BuildErrorKind::Engine(e), &chain))? {
                    None => return Err(fail(BuildErrorKind::EnumeratorExhausted { pair }, &chain)),
                    Some((_, s)) if s.size() > self.budget.max_domain => {
                        let needed = s.size();
                        return Err(fail(BuildErrorKind::DomainExceeded { pair, needed }, &chain));
                    }
                    Some((witness, structure)) => chain.stages.push(Stage { pair, witness, structure }),
                }
            }
            h += 1;
        }
        Ok(chain)
    }
}

/// Builds a chain of finite diagrams from the first `enumerator_bound`
/// members of `class`, starting at member `seed_index`. Stops with a
/// frontier when the stage budget runs out.
pub fn henkin_build(
    theory: &Theory,
    class: &ClassEnumerator,
    budget: BuildBudget,
    seed_index: usize,
) -> std::result::Result<DiagramChain, BuildError> {
    let early = |e: Error| BuildError {
        kind: BuildErrorKind::Engine(e),
        chain: Box::new(DiagramChain { constants: Vec::new(), initial: placeholder(), stages: Vec::new(), frontier: None }),
    };
    let clauses = normalize(theory).map_err(early)?;
    if theory.formulas().any(|f| f.max_constant().is_some()) {
        return Err(early(Error::invalid("theory mentions constants; use the prescribed-type builder")));
    }
    let mut all = class.enumerate().map_err(early)?;
    all.truncate(budget.enumerator_bound);
    let initial = all
        .get(seed_index)
        .cloned()
        .ok_or_else(|| early(Error::invalid(format!("seed index {seed_index} is beyond the searched source"))))?;
    let mut ev = |s: &Structure, f: &Formula, env: &[(String, usize)]| eval(s, f, env);
    let mut accept = |_: &Structure| Ok(true);
    Run { clauses: &clauses, source: &all, budget, eval: &mut ev, accept: &mut accept }.build(initial, Vec::new())
}

fn placeholder() -> Structure {
    Structure::new(crate::structure::Signature::default(), 1).expect("nonempty")
}

/// Result of [`build_with_type`].
#[derive(Debug, Clone)]
pub struct TypedBuild {
    pub structure: Structure,
    pub tuple: Tuple,
    pub chain: DiagramChain,
    /// The output against σ's representative at σ's level.
    pub comparison: Comparison,
}

/// Builds a model of `T_{α,σ}` whose constants realize `σ`.
///
/// The diagram source is the class fragment of `bfs`; an extension is
/// admitted only when the constants still realize `σ` in it (the
/// extended diagram of the stage extends `σ`). `D₀` is the substructure
/// of σ's representative on its tuple (the first fragment member when the
/// tuple is empty). Quantifier-free clauses of `T_α` are omitted from the
/// requirements: they hold in every expansion of a fragment member.
pub fn build_with_type(
    bfs: &BfStructure,
    sigma: TypeRef,
    budget: BuildBudget,
) -> std::result::Result<TypedBuild, BuildError> {
    build_with_type_engine(bfs, sigma, budget, Rc::new(Engine::new()))
}

pub fn build_with_type_engine(
    bfs: &BfStructure,
    sigma: TypeRef,
    budget: BuildBudget,
    engine: Rc<Engine>,
) -> std::result::Result<TypedBuild, BuildError> {
    let early = |e: Error| BuildError {
        kind: BuildErrorKind::Engine(e),
        chain: Box::new(DiagramChain { constants: Vec::new(), initial: placeholder(), stages: Vec::new(), frontier: None }),
    };
    let prepared = prepare(bfs, sigma).map_err(early)?;
    let (rep, rep_tuple) = bfs.rep(sigma).map_err(early)?;
    let mut source = bfs.structures().map_err(early)?.to_vec();
    source.truncate(budget.enumerator_bound);
    let rep_id = engine.intern(rep);
    let constants = prepared.constants.clone();
    let mut ev = extended_eval(bfs, engine.clone(), constants.clone());
    let mut accept = |s: &Structure| {
        let id = engine.intern(s);
        engine.equiv_ids(rep_id, rep_tuple, id, &constants, sigma.level)
    };
    let chain = Run { clauses: &prepared.clauses, source: &source, budget, eval: &mut ev, accept: &mut accept }
        .build(prepared.initial, prepared.constants.clone())?;
    let structure = chain.final_structure().clone();
    let comparison = engine
        .compare(rep, rep_tuple, &structure, &prepared.constants, sigma.level)
        .map_err(|e| BuildError { kind: BuildErrorKind::Engine(e), chain: Box::new(chain.clone()) })?;
    Ok(TypedBuild { structure, tuple: prepared.constants, chain, comparison })
}

struct Prepared {
    clauses: Vec<Clause>,
    initial: Structure,
    constants: Tuple,
}

fn prepare(bfs: &BfStructure, sigma: TypeRef) -> Result<Prepared> {
    let theory = t_alpha_sigma(bfs, sigma)?;
    let own = crate::extlang::sigma_sentences(bfs, sigma)?.len();
    let clauses = normalize(&theory)?
        .into_iter()
        .filter(|c| c.source < own || c.matrix.has_quantifier())
        .collect();
    let (rep, rep_tuple) = bfs.rep(sigma)?;
    let distinct = dedup(rep_tuple);
    let (initial, constants) = if distinct.is_empty() {
        (bfs.structures()?[0].clone(), Vec::new())
    } else {
        let c = rep_tuple.iter().map(|x| distinct.iter().position(|y| y == x).expect("present")).collect();
        (rep.induced(&distinct)?, c)
    };
    Ok(Prepared { clauses, initial, constants })
}

fn extended_eval<'b>(
    bfs: &'b BfStructure,
    engine: Rc<Engine>,
    constants: Tuple,
) -> impl FnMut(&Structure, &Formula, &[(String, usize)]) -> Result<bool> + 'b {
    let mut cache: Option<ExtendedStructure<'b>> = None;
    move |s, f, env| {
        if cache.as_ref().is_none_or(|m| m.base() != s) {
            cache = Some(expand_with(s, bfs, engine.clone())?);
        }
        let m = cache.as_ref().expect("just filled");
        eval(&WithConstants { model: m, constants: &constants }, f, env)
    }
}

/// Audit of a chain against a theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    /// Stages whose structure does not extend the previous one.
    pub monotonicity: Vec<usize>,
    /// Stages whose recorded pair fails there.
    pub unwitnessed: Vec<usize>,
    /// `(stage, pair)`: the matrix held at `stage` but fails at `stage + 1`.
    pub persistence: Vec<(usize, (usize, Tuple))>,
    /// Handled pairs whose matrix fails in the final structure.
    pub handled_failures: Vec<(usize, Tuple)>,
    /// Pairs at or after the frontier whose matrix fails in the final
    /// structure.
    pub unhandled: Vec<(usize, Tuple)>,
    /// Number of pairs over the final structure.
    pub pairs: usize,
}

impl ChainReport {
    /// No invariant violations among handled pairs.
    pub fn sound(&self) -> bool {
        self.monotonicity.is_empty()
            && self.unwitnessed.is_empty()
            && self.persistence.is_empty()
            && self.handled_failures.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = format!("pairs {}\n", self.pairs);
        for s in &self.monotonicity {
            out.push_str(&format!("violation monotonicity stage {s}\n"));
        }
        for s in &self.unwitnessed {
            out.push_str(&format!("violation witness stage {s}\n"));
        }
        for (s, (i, t)) in &self.persistence {
            out.push_str(&format!("violation persistence stage {s} pair {i} {}\n", format_tuple(t)));
        }
        for (i, t) in &self.handled_failures {
            out.push_str(&format!("violation handled pair {i} {}\n", format_tuple(t)));
        }
        for (i, t) in &self.unhandled {
            out.push_str(&format!("unhandled pair {i} {}\n", format_tuple(t)));
        }
        out.push_str(&format!("violations {}\n", self.violations()));
        out.push_str(&format!("unhandled {}\n", self.unhandled.len()));
        out
    }

    pub fn violations(&self) -> usize {
        self.monotonicity.len() + self.unwitnessed.len() + self.persistence.len() + self.handled_failures.len()
    }
}

fn key(p: &(usize, Tuple)) -> (usize, usize, &Tuple) {
    (p.1.iter().map(|x| x + 1).max().unwrap_or(0), p.0, &p.1)
}

fn audit(chain: &DiagramChain, clauses: &[Clause], ev: &mut StageEval) -> Result<ChainReport> {
    let snaps: Vec<&Structure> = chain.snapshots().collect();
    let mut report = ChainReport {
        monotonicity: Vec::new(),
        unwitnessed: Vec::new(),
        persistence: Vec::new(),
        handled_failures: Vec::new(),
        unhandled: Vec::new(),
        pairs: 0,
    };
    for s in 1..snaps.len() {
        let (prev, next) = (snaps[s - 1], snaps[s]);
        let prefix: Vec<usize> = (0..prev.size()).collect();
        let extends = next.signature() == prev.signature()
            && next.size() >= prev.size()
            && next.induced(&prefix).is_ok_and(|x| &x == prev);
        if !extends {
            report.monotonicity.push(s);
        }
        let pair = &chain.stages[s - 1].pair;
        if pair.0 >= clauses.len() || pair.1.len() != clauses[pair.0].vars.len() {
            return Err(Error::Malformed(format!("stage {s} names a pair outside the theory")));
        }
        if next.check_tuple(&pair.1).is_err() || !pair_holds(clauses, pair, next, ev)? {
            report.unwitnessed.push(s);
        }
        if !extends {
            continue;
        }
        for h in 0..=prev.size() {
            for p in pairs_at(clauses, h) {
                if pair_holds(clauses, &p, prev, ev)? && !pair_holds(clauses, &p, next, ev)? {
                    report.persistence.push((s - 1, p));
                }
            }
        }
    }
    let last = chain.final_structure();
    for h in 0..=last.size() {
        for p in pairs_at(clauses, h) {
            report.pairs += 1;
            let handled = chain.frontier.as_ref().is_none_or(|f| key(&p) < key(f));
            if !pair_holds(clauses, &p, last, ev)? {
                if handled {
                    report.handled_failures.push(p);
                } else {
                    report.unhandled.push(p);
                }
            }
        }
    }
    Ok(report)
}

/// Checks monotonicity, per-stage witnesses, `Σ₁` persistence between
/// consecutive stages, and every pair over the final structure.
pub fn check_chain(chain: &DiagramChain, theory: &Theory) -> Result<ChainReport> {
    let clauses = normalize(theory)?;
    let constants = chain.constants.clone();
    let mut ev = |s: &Structure, f: &Formula, env: &[(String, usize)]| {
        eval(&WithConstants { model: s, constants: &constants }, f, env)
    };
    audit(chain, &clauses, &mut ev)
}

/// [`check_chain`] for a chain produced by [`build_with_type`], evaluating
/// in expansions over `bfs`.
pub fn check_typed_chain(chain: &DiagramChain, bfs: &BfStructure, sigma: TypeRef) -> Result<ChainReport> {
    let prepared = prepare(bfs, sigma)?;
    let mut ev = extended_eval(bfs, Rc::new(Engine::new()), chain.constants.clone());
    audit(chain, &prepared.clauses, &mut ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theory(lines: &str) -> Theory {
        Theory::parse(lines).unwrap()
    }

    const LINORD: &str = "\
(forall (x) (not (atom < x x))) # irreflexive
(forall (x y z) (or (not (atom < x y)) (not (atom < y z)) (atom < x z))) # transitive
(forall (x y) (or (atom < x y) (= x y) (atom < y x))) # total
";

    #[test]
    fn normal_form_splits_and_pulls() {
        let t = theory("(forall (x) (and (exists (y) (atom < x y)) (or (= x x) (forall (z) (atom < z x)))))");
        let cs = normalize(&t).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].vars, vec!["x"]);
        assert_eq!(cs[1].vars, vec!["x", "z"]);
        assert!(matches!(normalize(&theory("(exists (x) (forall (y) (atom < x y)))")), Err(Error::NotPi2(_))));
    }

    #[test]
    fn renames_clashing_binders() {
        let t = theory("(forall (x) (or (atom < x x) (forall (x) (= x x))))");
        let cs = normalize(&t).unwrap();
        assert_eq!(cs[0].vars.len(), 2);
        assert_ne!(cs[0].vars[0], cs[0].vars[1]);
    }

    #[test]
    fn linear_order_axioms_stabilize() {
        let t = theory(LINORD);
        let chain = henkin_build(&t, &ClassEnumerator::linear_orders(4), BuildBudget::new(10, 10, 10).unwrap(), 2).unwrap();
        assert!(chain.is_complete());
        assert!(chain.stages.is_empty());
        let report = check_chain(&chain, &t).unwrap();
        assert!(report.sound() && report.unhandled.is_empty());
    }

    #[test]
    fn no_maximum_grows_each_stage() {
        let mut text = LINORD.to_string();
        text.push_str("(forall (x) (exists (y) (atom < x y))) # no maximum\n");
        let t = theory(&text);
        let chain = henkin_build(&t, &ClassEnumerator::linear_orders(12), BuildBudget::new(6, 12, 12).unwrap(), 0).unwrap();
        assert_eq!(chain.stages.len(), 6);
        for (i, s) in chain.snapshots().enumerate() {
            assert_eq!(s.size(), i + 1);
        }
        let report = check_chain(&chain, &t).unwrap();
        assert!(report.sound());
        assert_eq!(report.unhandled, vec![(3, vec![6])]);
        assert_eq!(DiagramChain::parse(&chain.serialize()).unwrap(), chain);
    }

    #[test]
    fn shrinking_stage_is_reported() {
        let t = theory("(forall (x) (exists (y) (atom < x y)))");
        let mut chain = henkin_build(&t, &ClassEnumerator::linear_orders(5), BuildBudget::new(3, 5, 5).unwrap(), 0).unwrap();
        chain.stages[1].structure.set(0, &[0, 1], false).unwrap();
        assert_eq!(check_chain(&chain, &t).unwrap().monotonicity, vec![2, 3]);
    }

    #[test]
    fn density_exhausts_the_source() {
        let t = theory("(forall (x y) (or (not (atom < x y)) (exists (z) (and (atom < x z) (atom < z y)))))");
        let err = henkin_build(&t, &ClassEnumerator::linear_orders(4), BuildBudget::new(50, 50, 50).unwrap(), 1).unwrap_err();
        assert!(matches!(err.kind, BuildErrorKind::EnumeratorExhausted { .. }), "{err}");
        assert_eq!(err.chain.final_structure().size(), 4);
    }
}
