//! Infinitary formulas over finite materializations, their Σ/Π rank, and
//! satisfaction in finite models.
//!
//! Text form is prefix notation, one formula per line:
//!
//! ```text
//! (forall (x y) (or (= x y) (atom < x y) (atom < y x)))
//! (bigand (bftype 1 0 2) (exists (z) (bftype 0 1 0 z)))
//! ```
//!
//! Constants are written `@0`, `@1`, …

use std::collections::BTreeSet;
use std::fmt;

use crate::catalog::TypeRef;
use crate::error::{Error, Result};
use crate::structure::{all_tuples, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(usize),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "@{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// A base-signature atom.
    Atom { symbol: String, args: Vec<Term> },
    Eq(Term, Term),
    /// An extended predicate `φ_σ`.
    Bf { ty: TypeRef, args: Vec<Term> },
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// Infinitary conjunction, materialized as a finite list.
    BigAnd(Vec<Formula>),
    BigOr(Vec<Formula>),
    Forall(Vec<String>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

pub fn vars(names: &[String]) -> Vec<Term> {
    names.iter().map(|v| Term::Var(v.clone())).collect()
}

impl Formula {
    pub fn atom(symbol: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom { symbol: symbol.into(), args }
    }

    pub fn bf(ty: TypeRef, args: Vec<Term>) -> Formula {
        Formula::Bf { ty, args }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Or(vec![Formula::not(a), b])
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::And(vec![Formula::implies(a.clone(), b.clone()), Formula::implies(b, a)])
    }

    /// `∀x̄ f`, or `f` itself when `x̄` is empty.
    pub fn forall(vars: Vec<String>, f: Formula) -> Formula {
        if vars.is_empty() {
            f
        } else {
            Formula::Forall(vars, Box::new(f))
        }
    }

    pub fn exists(vars: Vec<String>, f: Formula) -> Formula {
        if vars.is_empty() {
            f
        } else {
            Formula::Exists(vars, Box::new(f))
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Atom { args, .. } | Formula::Bf { args, .. } => args.iter().for_each(|t| term(t, bound)),
            Formula::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) | Formula::BigAnd(fs) | Formula::BigOr(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                f.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Largest constant index mentioned, if any.
    pub fn max_constant(&self) -> Option<usize> {
        let of_terms = |args: &[Term]| {
            args.iter()
                .filter_map(|t| match t {
                    Term::Const(c) => Some(*c),
                    Term::Var(_) => None,
                })
                .max()
        };
        match self {
            Formula::Atom { args, .. } | Formula::Bf { args, .. } => of_terms(args),
            Formula::Eq(a, b) => of_terms(&[a.clone(), b.clone()]),
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.max_constant(),
            Formula::And(fs) | Formula::Or(fs) | Formula::BigAnd(fs) | Formula::BigOr(fs) => {
                fs.iter().filter_map(Formula::max_constant).max()
            }
        }
    }

    /// Replaces free occurrences of variables. Bound variables shadow; the
    /// caller keeps bound names disjoint from the substituted terms.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Term>) -> Formula {
        self.subst_inner(map, &mut Vec::new())
    }

    fn subst_inner(&self, map: &dyn Fn(&str) -> Option<Term>, bound: &mut Vec<String>) -> Formula {
        let term = |t: &Term, bound: &Vec<String>| match t {
            Term::Var(v) if !bound.contains(v) => map(v).unwrap_or_else(|| t.clone()),
            _ => t.clone(),
        };
        let terms = |args: &[Term], bound: &Vec<String>| args.iter().map(|t| term(t, bound)).collect();
        match self {
            Formula::Atom { symbol, args } => Formula::Atom { symbol: symbol.clone(), args: terms(args, bound) },
            Formula::Bf { ty, args } => Formula::Bf { ty: *ty, args: terms(args, bound) },
            Formula::Eq(a, b) => Formula::Eq(term(a, bound), term(b, bound)),
            Formula::Not(f) => Formula::not(f.subst_inner(map, bound)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.subst_inner(map, bound)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.subst_inner(map, bound)).collect()),
            Formula::BigAnd(fs) => Formula::BigAnd(fs.iter().map(|f| f.subst_inner(map, bound)).collect()),
            Formula::BigOr(fs) => Formula::BigOr(fs.iter().map(|f| f.subst_inner(map, bound)).collect()),
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                let inner = f.subst_inner(map, bound);
                bound.truncate(depth);
                match self {
                    Formula::Forall(..) => Formula::Forall(vs.clone(), Box::new(inner)),
                    _ => Formula::Exists(vs.clone(), Box::new(inner)),
                }
            }
        }
    }

    /// Replaces every extended atom `φ_σ(t̄)` by `expand(σ, t̄)`.
    pub fn expand_bf(&self, expand: &mut dyn FnMut(TypeRef, &[Term]) -> Result<Formula>) -> Result<Formula> {
        let many = |fs: &[Formula], expand: &mut dyn FnMut(TypeRef, &[Term]) -> Result<Formula>| {
            fs.iter().map(|f| f.expand_bf(expand)).collect::<Result<Vec<_>>>()
        };
        Ok(match self {
            Formula::Bf { ty, args } => expand(*ty, args)?,
            Formula::Atom { .. } | Formula::Eq(..) => self.clone(),
            Formula::Not(f) => Formula::not(f.expand_bf(expand)?),
            Formula::And(fs) => Formula::And(many(fs, expand)?),
            Formula::Or(fs) => Formula::Or(many(fs, expand)?),
            Formula::BigAnd(fs) => Formula::BigAnd(many(fs, expand)?),
            Formula::BigOr(fs) => Formula::BigOr(many(fs, expand)?),
            Formula::Forall(vs, f) => Formula::Forall(vs.clone(), Box::new(f.expand_bf(expand)?)),
            Formula::Exists(vs, f) => Formula::Exists(vs.clone(), Box::new(f.expand_bf(expand)?)),
        })
    }

    /// Negation normal form: negations only on atoms.
    pub fn nnf(&self) -> Formula {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, positive: bool) -> Formula {
        let many = |fs: &[Formula]| fs.iter().map(|f| f.nnf_signed(positive)).collect();
        match (self, positive) {
            (Formula::Atom { .. } | Formula::Eq(..) | Formula::Bf { .. }, true) => self.clone(),
            (Formula::Atom { .. } | Formula::Eq(..) | Formula::Bf { .. }, false) => Formula::not(self.clone()),
            (Formula::Not(f), _) => f.nnf_signed(!positive),
            (Formula::And(fs), true) | (Formula::Or(fs), false) => Formula::And(many(fs)),
            (Formula::Or(fs), true) | (Formula::And(fs), false) => Formula::Or(many(fs)),
            (Formula::BigAnd(fs), true) | (Formula::BigOr(fs), false) => Formula::BigAnd(many(fs)),
            (Formula::BigOr(fs), true) | (Formula::BigAnd(fs), false) => Formula::BigOr(many(fs)),
            (Formula::Forall(vs, f), true) | (Formula::Exists(vs, f), false) => {
                Formula::Forall(vs.clone(), Box::new(f.nnf_signed(positive)))
            }
            (Formula::Exists(vs, f), true) | (Formula::Forall(vs, f), false) => {
                Formula::Exists(vs.clone(), Box::new(f.nnf_signed(positive)))
            }
        }
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) | Formula::Bf { .. } => false,
            Formula::Not(f) => f.has_quantifier(),
            Formula::And(fs) | Formula::Or(fs) | Formula::BigAnd(fs) | Formula::BigOr(fs) => {
                fs.iter().any(Formula::has_quantifier)
            }
            Formula::Forall(..) | Formula::Exists(..) => true,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) | Formula::Bf { .. } => 1,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) | Formula::BigAnd(fs) | Formula::BigOr(fs) => {
                1 + fs.iter().map(Formula::size).sum::<usize>()
            }
        }
    }

    pub fn parse(text: &str) -> Result<Formula> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let f = parse_formula(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::invalid(format!("trailing input after formula: `{}`", tokens[pos])));
        }
        Ok(f)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, head: &str, items: &[Formula]) -> fmt::Result {
    write!(f, "({head}")?;
    for item in items {
        write!(f, " {item}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { symbol, args } => {
                write!(f, "(atom {symbol}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Bf { ty, args } => {
                write!(f, "(bftype {} {} {}", ty.level, ty.arity, ty.id)?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(fs) => write_list(f, "and", fs),
            Formula::Or(fs) => write_list(f, "or", fs),
            Formula::BigAnd(fs) => write_list(f, "bigand", fs),
            Formula::BigOr(fs) => write_list(f, "bigor", fs),
            Formula::Forall(vs, g) => write!(f, "(forall ({}) {g})", vs.join(" ")),
            Formula::Exists(vs, g) => write!(f, "(exists ({}) {g})", vs.join(" ")),
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn expect(tokens: &[String], pos: &mut usize, want: &str) -> Result<()> {
    match tokens.get(*pos) {
        Some(t) if t == want => {
            *pos += 1;
            Ok(())
        }
        Some(t) => Err(Error::invalid(format!("expected `{want}`, found `{t}`"))),
        None => Err(Error::invalid(format!("expected `{want}`, found end of input"))),
    }
}

fn word<'a>(tokens: &'a [String], pos: &mut usize) -> Result<&'a str> {
    match tokens.get(*pos) {
        Some(t) if t != "(" && t != ")" => {
            *pos += 1;
            Ok(t)
        }
        Some(t) => Err(Error::invalid(format!("expected a word, found `{t}`"))),
        None => Err(Error::invalid("unexpected end of input")),
    }
}

fn number(tokens: &[String], pos: &mut usize) -> Result<usize> {
    let w = word(tokens, pos)?;
    w.parse().map_err(|_| Error::invalid(format!("expected a number, found `{w}`")))
}

fn term_of(w: &str) -> Result<Term> {
    match w.strip_prefix('@') {
        Some(n) => n.parse().map(Term::Const).map_err(|_| Error::invalid(format!("bad constant `{w}`"))),
        None => Ok(Term::Var(w.to_string())),
    }
}

fn terms_until_close(tokens: &[String], pos: &mut usize) -> Result<Vec<Term>> {
    let mut args = Vec::new();
    while tokens.get(*pos).map(String::as_str) != Some(")") {
        args.push(term_of(word(tokens, pos)?)?);
    }
    *pos += 1;
    Ok(args)
}

fn parse_formula(tokens: &[String], pos: &mut usize) -> Result<Formula> {
    expect(tokens, pos, "(")?;
    let head = word(tokens, pos)?.to_string();
    let f = match head.as_str() {
        "atom" => {
            let symbol = word(tokens, pos)?.to_string();
            Formula::Atom { symbol, args: terms_until_close(tokens, pos)? }
        }
        "=" => {
            let args = terms_until_close(tokens, pos)?;
            match <[Term; 2]>::try_from(args) {
                Ok([a, b]) => Formula::Eq(a, b),
                Err(_) => return Err(Error::invalid("`=` takes two terms")),
            }
        }
        "bftype" => {
            let ty = TypeRef::new(number(tokens, pos)?, number(tokens, pos)?, number(tokens, pos)?);
            let args = terms_until_close(tokens, pos)?;
            if args.len() != ty.arity {
                return Err(Error::invalid(format!("bftype {ty} applied to {} arguments", args.len())));
            }
            Formula::Bf { ty, args }
        }
        "forall" | "exists" => {
            expect(tokens, pos, "(")?;
            let mut vs = Vec::new();
            while tokens.get(*pos).map(String::as_str) != Some(")") {
                vs.push(word(tokens, pos)?.to_string());
            }
            *pos += 1;
            let body = parse_formula(tokens, pos)?;
            expect(tokens, pos, ")")?;
            if head == "forall" {
                Formula::forall(vs, body)
            } else {
                Formula::exists(vs, body)
            }
        }
        "not" | "and" | "or" | "bigand" | "bigor" => {
            let mut fs = Vec::new();
            while tokens.get(*pos).map(String::as_str) != Some(")") {
                fs.push(parse_formula(tokens, pos)?);
            }
            *pos += 1;
            match head.as_str() {
                "not" => match <[Formula; 1]>::try_from(fs) {
                    Ok([g]) => Formula::not(g),
                    Err(_) => return Err(Error::invalid("`not` takes one formula")),
                },
                "and" => Formula::And(fs),
                "or" => Formula::Or(fs),
                "bigand" => Formula::BigAnd(fs),
                _ => Formula::BigOr(fs),
            }
        }
        other => return Err(Error::invalid(format!("unknown connective `{other}`"))),
    };
    Ok(f)
}

/// `Σₙ`, `Πₙ`, or quantifier-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankKind {
    Sigma,
    Pi,
    Delta0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RankClass {
    pub kind: RankKind,
    pub level: usize,
}

impl RankClass {
    pub const DELTA0: RankClass = RankClass { kind: RankKind::Delta0, level: 0 };

    pub fn sigma(level: usize) -> RankClass {
        RankClass { kind: RankKind::Sigma, level }
    }

    pub fn pi(level: usize) -> RankClass {
        RankClass { kind: RankKind::Pi, level }
    }

    /// Whether every formula of this class is `Πₙ` (up to the usual
    /// inclusions `Σₘ, Πₘ ⊆ Πₘ₊₁`).
    pub fn within_pi(&self, n: usize) -> bool {
        match self.kind {
            RankKind::Delta0 => true,
            RankKind::Pi => self.level <= n,
            RankKind::Sigma => self.level < n,
        }
    }

    pub fn within_sigma(&self, n: usize) -> bool {
        match self.kind {
            RankKind::Delta0 => true,
            RankKind::Sigma => self.level <= n,
            RankKind::Pi => self.level < n,
        }
    }
}

impl fmt::Display for RankClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RankKind::Delta0 => f.write_str("Δ0"),
            RankKind::Sigma => write!(f, "Σ{}", self.level),
            RankKind::Pi => write!(f, "Π{}", self.level),
        }
    }
}

/// Least `(s, p)` with the formula in `Σ_s` and in `Π_p`.
fn levels(f: &Formula) -> (usize, usize) {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) | Formula::Bf { .. } => (0, 0),
        Formula::Not(g) => {
            let (s, p) = levels(g);
            (p, s)
        }
        Formula::And(fs) | Formula::Or(fs) => {
            fs.iter().map(levels).fold((0, 0), |(s, p), (s2, p2)| (s.max(s2), p.max(p2)))
        }
        Formula::Forall(_, g) => universal(std::slice::from_ref(g.as_ref())),
        Formula::BigAnd(fs) => universal(fs),
        Formula::Exists(_, g) => {
            let (p, s) = universal_dual(std::slice::from_ref(g.as_ref()));
            (s, p)
        }
        Formula::BigOr(fs) => {
            let (p, s) = universal_dual(fs);
            (s, p)
        }
    }
}

fn universal(fs: &[Formula]) -> (usize, usize) {
    if fs.is_empty() {
        return (0, 0);
    }
    let p = fs.iter().map(|g| {
        let (s, p) = levels(g);
        p.min(s + 1).max(1)
    });
    let p = p.max().expect("nonempty");
    (p + 1, p)
}

// dual of `universal`, returns (s, p+1 form swapped back by caller)
fn universal_dual(fs: &[Formula]) -> (usize, usize) {
    if fs.is_empty() {
        return (0, 0);
    }
    let s = fs.iter().map(|g| {
        let (s, p) = levels(g);
        s.min(p + 1).max(1)
    });
    let s = s.max().expect("nonempty");
    (s + 1, s)
}

/// Rank of a formula, counting `bigand`/`forall` as universal and
/// `bigor`/`exists` as existential steps. Finitary connectives do not raise
/// the level.
pub fn classify(f: &Formula) -> RankClass {
    match levels(f) {
        (0, 0) => RankClass::DELTA0,
        (s, p) if p <= s => RankClass::pi(p),
        (s, _) => RankClass::sigma(s),
    }
}

/// Something formulas can be evaluated in.
pub trait Model {
    fn domain_size(&self) -> usize;
    fn atom(&self, symbol: &str, args: &[usize]) -> Result<bool>;
    fn bftype(&self, ty: TypeRef, args: &[usize]) -> Result<bool> {
        let _ = args;
        Err(Error::UnknownPredicate(format!("phi_{}_{}_{}", ty.level, ty.arity, ty.id)))
    }
    fn constant(&self, index: usize) -> Result<usize> {
        Err(Error::invalid(format!("constant @{index} is not interpreted")))
    }
}

impl Model for Structure {
    fn domain_size(&self) -> usize {
        self.size()
    }

    fn atom(&self, symbol: &str, args: &[usize]) -> Result<bool> {
        let idx = self.signature().index_of(symbol).ok_or_else(|| Error::UnknownPredicate(symbol.to_string()))?;
        let arity = self.signature().symbols()[idx].arity;
        if arity != args.len() {
            return Err(Error::ArityMismatch { symbol: symbol.to_string(), expected: arity, got: args.len() });
        }
        Ok(self.holds(idx, args))
    }
}

/// A model with constants `@0, @1, …` interpreted by a tuple.
pub struct WithConstants<'a, M: Model + ?Sized> {
    pub model: &'a M,
    pub constants: &'a [usize],
}

impl<M: Model + ?Sized> Model for WithConstants<'_, M> {
    fn domain_size(&self) -> usize {
        self.model.domain_size()
    }

    fn atom(&self, symbol: &str, args: &[usize]) -> Result<bool> {
        self.model.atom(symbol, args)
    }

    fn bftype(&self, ty: TypeRef, args: &[usize]) -> Result<bool> {
        self.model.bftype(ty, args)
    }

    fn constant(&self, index: usize) -> Result<usize> {
        self.constants
            .get(index)
            .copied()
            .ok_or_else(|| Error::invalid(format!("constant @{index} is not interpreted")))
    }
}

/// Variable assignment, searched from the most recent binding.
pub type Assignment = Vec<(String, usize)>;

fn value(model: &dyn Model, env: &[(String, usize)], t: &Term) -> Result<usize> {
    match t {
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|(_, e)| *e)
            .ok_or_else(|| Error::UnboundVariable(v.clone())),
        Term::Const(c) => model.constant(*c),
    }
}

/// Satisfaction of `f` in `model` under `assignment`.
pub fn eval(model: &dyn Model, f: &Formula, assignment: &[(String, usize)]) -> Result<bool> {
    let mut env = assignment.to_vec();
    eval_in(model, f, &mut env)
}

/// Satisfaction of a sentence.
pub fn holds(model: &dyn Model, f: &Formula) -> Result<bool> {
    eval(model, f, &[])
}

fn eval_in(model: &dyn Model, f: &Formula, env: &mut Assignment) -> Result<bool> {
    match f {
        Formula::Atom { symbol, args } => {
            let vals = args.iter().map(|t| value(model, env, t)).collect::<Result<Vec<_>>>()?;
            model.atom(symbol, &vals)
        }
        Formula::Eq(a, b) => Ok(value(model, env, a)? == value(model, env, b)?),
        Formula::Bf { ty, args } => {
            let vals = args.iter().map(|t| value(model, env, t)).collect::<Result<Vec<_>>>()?;
            model.bftype(*ty, &vals)
        }
        Formula::Not(g) => Ok(!eval_in(model, g, env)?),
        Formula::And(fs) | Formula::BigAnd(fs) => {
            for g in fs {
                if !eval_in(model, g, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(fs) | Formula::BigOr(fs) => {
            for g in fs {
                if eval_in(model, g, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let universal = matches!(f, Formula::Forall(..));
            let depth = env.len();
            for t in all_tuples(model.domain_size(), vs.len()) {
                env.truncate(depth);
                env.extend(vs.iter().cloned().zip(t));
                let v = eval_in(model, g, env)?;
                if v != universal {
                    env.truncate(depth);
                    return Ok(v);
                }
            }
            env.truncate(depth);
            Ok(universal)
        }
    }
}

/// A named list of sentences, each tagged with the schema that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub sentences: Vec<(Formula, String)>,
}

impl Theory {
    pub fn new(name: impl Into<String>) -> Self {
        Theory { name: name.into(), sentences: Vec::new() }
    }

    pub fn push(&mut self, f: Formula, tag: impl Into<String>) {
        self.sentences.push((f, tag.into()));
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.sentences.iter().map(|(f, _)| f)
    }

    /// First sentence that fails in `model`, if any.
    pub fn first_failure(&self, model: &dyn Model) -> Result<Option<usize>> {
        for (i, (f, _)) in self.sentences.iter().enumerate() {
            if !holds(model, f)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// `# theory <name>` then one `<formula> # <tag>` line per sentence.
    pub fn serialize(&self) -> String {
        let mut out = format!("# theory {}\n", self.name);
        for (f, tag) in &self.sentences {
            out.push_str(&format!("{f} # {tag}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Theory> {
        let mut theory = Theory::new("unnamed");
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(name) = line.strip_prefix("# theory ") {
                theory.name = name.trim().to_string();
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (body, tag) = match line.split_once('#') {
                Some((b, t)) => (b.trim(), t.trim()),
                None => (line, ""),
            };
            let f = Formula::parse(body).map_err(|e| Error::syntax(i + 1, e.to_string()))?;
            if !f.is_sentence() {
                return Err(Error::syntax(i + 1, format!("free variables {:?}", f.free_vars())));
            }
            theory.push(f, tag);
        }
        Ok(theory)
    }
}
