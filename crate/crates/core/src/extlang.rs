//! The extended language `L_α`: one predicate `φ_σ` per bf-type, its
//! defining formulas, the `Π₂` theory `T_α`, and expansions of structures.

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

use rustc_hash::FxHashMap;

use crate::bfstruct::BfStructure;
use crate::catalog::TypeRef;
use crate::class::ClassKind;
use crate::diagram::AtomicDiagram;
use crate::engine::{Engine, StructId};
use crate::error::{Error, Result};
use crate::formula::{holds, vars, Formula, Model, Term, Theory};
use crate::structure::{all_tuples, Signature, Structure, Tuple};

/// Node limit for fully expanded `φ_σ`.
pub const EXPANSION_LIMIT: usize = 2_000_000;

/// Base signature plus one predicate per stored bf-type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedSignature {
    pub base: Signature,
    pub predicates: Vec<TypeRef>,
}

impl ExtendedSignature {
    pub fn of(bfs: &BfStructure) -> Self {
        ExtendedSignature { base: bfs.signature.clone(), predicates: bfs.all_types().collect() }
    }

    /// `phi_<level>_<arity>_<id>`.
    pub fn name(ty: TypeRef) -> String {
        format!("phi_{}_{}_{}", ty.level, ty.arity, ty.id)
    }

    pub fn parse_name(name: &str) -> Option<TypeRef> {
        let rest = name.strip_prefix("phi_")?;
        let nums: Vec<usize> = rest.split('_').map(|w| w.parse().ok()).collect::<Option<_>>()?;
        match nums.as_slice() {
            &[l, k, id] => Some(TypeRef::new(l, k, id)),
            _ => None,
        }
    }
}

/// `A_(α)`: a structure with every `φ_σ` interpreted as `σ ≤ (A, x̄)`.
/// Extended tables are computed on demand.
pub struct ExtendedStructure<'a> {
    base: Structure,
    bfs: &'a BfStructure,
    engine: Rc<Engine>,
    base_id: StructId,
    rep_ids: RefCell<FxHashMap<usize, StructId>>,
    cache: RefCell<FxHashMap<(TypeRef, Tuple), bool>>,
}

impl fmt::Debug for ExtendedStructure<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtendedStructure")
            .field("size", &self.base.size())
            .field("cached", &self.cache.borrow().len())
            .finish()
    }
}

/// Expands `a` over `bfs` with a private engine.
pub fn expand<'a>(a: &Structure, bfs: &'a BfStructure) -> Result<ExtendedStructure<'a>> {
    expand_with(a, bfs, Rc::new(Engine::new()))
}

/// Expands `a` sharing `engine` (and its memo table) with other callers.
pub fn expand_with<'a>(a: &Structure, bfs: &'a BfStructure, engine: Rc<Engine>) -> Result<ExtendedStructure<'a>> {
    if a.signature() != &bfs.signature {
        return Err(Error::SignatureMismatch);
    }
    let base_id = engine.intern(a);
    Ok(ExtendedStructure {
        base: a.clone(),
        bfs,
        engine,
        base_id,
        rep_ids: RefCell::new(FxHashMap::default()),
        cache: RefCell::new(FxHashMap::default()),
    })
}

impl<'a> ExtendedStructure<'a> {
    /// The base reduct.
    pub fn base(&self) -> &Structure {
        &self.base
    }

    pub fn bfs(&self) -> &'a BfStructure {
        self.bfs
    }

    pub fn engine(&self) -> &Rc<Engine> {
        &self.engine
    }

    /// `A_(α) ⊨ φ_σ(t̄)`.
    pub fn phi(&self, ty: TypeRef, tuple: &[usize]) -> Result<bool> {
        if !self.bfs.contains(ty) {
            return Err(Error::UnknownPredicate(ExtendedSignature::name(ty)));
        }
        if tuple.len() != ty.arity {
            return Err(Error::ArityMismatch { symbol: ExtendedSignature::name(ty), expected: ty.arity, got: tuple.len() });
        }
        self.base.check_tuple(tuple)?;
        let key = (ty, tuple.to_vec());
        if let Some(&v) = self.cache.borrow().get(&key) {
            return Ok(v);
        }
        let rep = self.bfs.get(ty)?;
        let rid = {
            let known = self.rep_ids.borrow().get(&rep.rep_index).copied();
            match known {
                Some(id) => id,
                None => {
                    let (s, _) = self.bfs.rep(ty)?;
                    let id = self.engine.intern(s);
                    self.rep_ids.borrow_mut().insert(rep.rep_index, id);
                    id
                }
            }
        };
        let v = self.engine.leq_ids(rid, &rep.rep_tuple, self.base_id, tuple, ty.level)?;
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// All tuples in the table of `φ_σ`.
    pub fn table(&self, ty: TypeRef) -> Result<Vec<Tuple>> {
        let mut out = Vec::new();
        for t in all_tuples(self.base.size(), ty.arity) {
            if self.phi(ty, &t)? {
                out.push(t);
            }
        }
        Ok(out)
    }
}

impl Model for ExtendedStructure<'_> {
    fn domain_size(&self) -> usize {
        self.base.size()
    }

    fn atom(&self, symbol: &str, args: &[usize]) -> Result<bool> {
        if let Some(ty) = ExtendedSignature::parse_name(symbol) {
            return self.phi(ty, args);
        }
        self.base.atom(symbol, args)
    }

    fn bftype(&self, ty: TypeRef, args: &[usize]) -> Result<bool> {
        self.phi(ty, args)
    }
}

fn xs(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

fn ys(level: usize, m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("y{level}_{i}")).collect()
}

/// Right-hand side of the recursive definition of `φ_σ` for level ≥ 1:
/// `⋀_{γ<β} ⋀_{τ ∉ ext_γ(σ)} ∀ȳ ¬φ_τ(x̄ȳ)`, with `x̄ = x1..xk`.
fn eq1_body(bfs: &BfStructure, sigma: TypeRef) -> Result<Formula> {
    let k = sigma.arity;
    let x = vars(&xs(k));
    let mut conjuncts = Vec::new();
    for gamma in 0..sigma.level {
        let ext = bfs.ext_set(sigma, gamma)?;
        for m in 1..=bfs.extension_bound {
            let y = ys(sigma.level, m);
            let mut args = x.clone();
            args.extend(vars(&y));
            for tau in bfs.types(gamma, k + m)? {
                if !ext.contains(&tau) {
                    conjuncts.push(Formula::forall(y.clone(), Formula::not(Formula::bf(tau, args.clone()))));
                }
            }
        }
    }
    Ok(Formula::BigAnd(conjuncts))
}

/// The defining formula of `φ_σ` in free variables `x1..xk`. Inner
/// predicates stay symbolic unless `expand` is set, in which case the
/// result is a pure base-language formula (bounded by
/// [`EXPANSION_LIMIT`] nodes).
pub fn phi_def(bfs: &BfStructure, sigma: TypeRef, expand: bool) -> Result<Formula> {
    bfs.get(sigma)?;
    let f = if sigma.level == 0 {
        bfs.diagram(sigma)?.formula(&vars(&xs(sigma.arity)))
    } else {
        eq1_body(bfs, sigma)?
    };
    if !expand {
        return Ok(f);
    }
    let mut budget = EXPANSION_LIMIT;
    expand_all(bfs, &f, &mut budget)
}

fn expand_all(bfs: &BfStructure, f: &Formula, budget: &mut usize) -> Result<Formula> {
    f.expand_bf(&mut |tau, args| {
        let inner = phi_def(bfs, tau, false)?;
        let inner = expand_all(bfs, &inner, budget)?;
        let size = inner.size();
        if size > *budget {
            return Err(Error::invalid(format!("expansion exceeds {EXPANSION_LIMIT} nodes")));
        }
        *budget -= size;
        let names = xs(tau.arity);
        Ok(inner.substitute(&|v| names.iter().position(|n| n == v).map(|i| args[i].clone())))
    })
}

/// `ψ_σ` in the form `φ_σ(x̄) ∧ ⋀_{γ<β} ⋀_{τ ∈ ext_γ(σ)} ∃ȳ φ_τ(x̄ȳ)`.
pub fn psi_def(bfs: &BfStructure, sigma: TypeRef) -> Result<Formula> {
    bfs.get(sigma)?;
    if sigma.level >= bfs.levels {
        return Err(Error::invalid(format!("ψ is defined below the top level {}, got {sigma}", bfs.levels)));
    }
    let x = vars(&xs(sigma.arity));
    let phi = Formula::bf(sigma, x.clone());
    if sigma.level == 0 {
        return Ok(phi);
    }
    Ok(Formula::And(vec![phi, witnesses(bfs, sigma, &x, sigma.level)?]))
}

fn witnesses(bfs: &BfStructure, sigma: TypeRef, x: &[Term], level_tag: usize) -> Result<Formula> {
    let mut conjuncts = Vec::new();
    for gamma in 0..sigma.level {
        for &tau in bfs.ext_set(sigma, gamma)? {
            let y = ys(level_tag, tau.arity - sigma.arity);
            let mut args = x.to_vec();
            args.extend(vars(&y));
            conjuncts.push(Formula::exists(y, Formula::bf(tau, args)));
        }
    }
    Ok(Formula::BigAnd(conjuncts))
}

/// `ψ_σ` as `⋁ φ_σ'` over top-level `σ'` projecting to `σ`.
pub fn psi_disjunctive(bfs: &BfStructure, sigma: TypeRef) -> Result<Formula> {
    bfs.get(sigma)?;
    if sigma.level >= bfs.levels {
        return Err(Error::invalid(format!("ψ is defined below the top level {}, got {sigma}", bfs.levels)));
    }
    if sigma.arity > bfs.arity_bound {
        return Err(Error::invalid(format!("top-level types are stored for arity ≤ {}", bfs.arity_bound)));
    }
    let x = vars(&xs(sigma.arity));
    let mut disjuncts = Vec::new();
    for top in bfs.types(bfs.levels, sigma.arity)? {
        if bfs.project(top, sigma.level)? == sigma {
            disjuncts.push(Formula::bf(top, x.clone()));
        }
    }
    Ok(Formula::BigOr(disjuncts))
}

/// `T_α` for arities up to the stored arity bound.
pub fn t_alpha(bfs: &BfStructure) -> Result<Theory> {
    let n = bfs.levels;
    let mut t = Theory::new(format!("T_{n}"));
    for k in 0..=bfs.arity_bound {
        let x = xs(k);
        let xt = vars(&x);
        let all: Vec<Formula> = bfs.types(n, k)?.into_iter().map(|s| Formula::bf(s, xt.clone())).collect();
        t.push(Formula::forall(x.clone(), Formula::BigOr(all)), "T1-total");
    }
    for beta in 0..n {
        for k in 0..=bfs.arity_bound {
            let x = xs(k);
            let types = bfs.types(beta, k)?;
            let psis = types.iter().map(|&s| psi_disjunctive(bfs, s)).collect::<Result<Vec<_>>>()?;
            for i in 0..types.len() {
                for j in i + 1..types.len() {
                    let both = Formula::And(vec![psis[i].clone(), psis[j].clone()]);
                    t.push(Formula::forall(x.clone(), Formula::not(both)), "T1-unique");
                }
            }
        }
    }
    for beta in 0..=n {
        for k in 0..=bfs.arity_bound {
            let x = xs(k);
            let xt = vars(&x);
            for sigma in bfs.types(beta, k)? {
                let phi = Formula::bf(sigma, xt.clone());
                let (body, tag) = if beta == 0 {
                    (bfs.diagram(sigma)?.formula(&xt), "T2-base")
                } else {
                    (eq1_body(bfs, sigma)?, "T2-rec")
                };
                t.push(Formula::forall(x.clone(), Formula::iff(phi, body)), tag);
            }
        }
    }
    for beta in 0..n {
        for k in 0..=bfs.arity_bound {
            let x = xs(k);
            let xt = vars(&x);
            for sigma in bfs.types(beta, k)? {
                let consequence = Formula::And(vec![Formula::bf(sigma, xt.clone()), witnesses(bfs, sigma, &xt, beta)?]);
                let f = Formula::implies(psi_disjunctive(bfs, sigma)?, consequence);
                t.push(Formula::forall(x.clone(), f), "T3");
            }
        }
    }
    Ok(t)
}

/// Sentences saying that constants `@0..` realize `σ`: `φ_σ(c̄)` and one
/// witness `∃ȳ φ_τ(c̄ȳ)` per `τ ∈ ext_γ(σ)`.
pub fn sigma_sentences(bfs: &BfStructure, sigma: TypeRef) -> Result<Theory> {
    bfs.get(sigma)?;
    let c: Vec<Term> = (0..sigma.arity).map(Term::Const).collect();
    let mut t = Theory::new(format!("T_{}_{}", bfs.levels, sigma));
    t.push(Formula::bf(sigma, c.clone()), "T-sigma-phi");
    for gamma in 0..sigma.level {
        for &tau in bfs.ext_set(sigma, gamma)? {
            let y = ys(0, tau.arity - sigma.arity);
            let mut args = c.clone();
            args.extend(vars(&y));
            t.push(Formula::exists(y, Formula::bf(tau, args)), "T-sigma-ext");
        }
    }
    Ok(t)
}

/// `T_{α,σ}`: the sentences about `c̄` followed by `T_α`.
pub fn t_alpha_sigma(bfs: &BfStructure, sigma: TypeRef) -> Result<Theory> {
    let mut t = sigma_sentences(bfs, sigma)?;
    t.sentences.extend(t_alpha(bfs)?.sentences);
    Ok(t)
}

/// `D_α(τ)`: the base diagram together with every extended atom
/// `φ_δ(x̄_v̄)` with `level(δ) ≤ level(τ)` and `|δ| ≤ |τ|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedDiagram {
    pub base: AtomicDiagram,
    /// `(δ, v̄, value)` with 0-based positions `v̄`, sorted.
    pub atoms: Vec<(TypeRef, Vec<usize>, bool)>,
}

impl ExtendedDiagram {
    /// Reads the same atoms off an expansion.
    pub fn of(m: &ExtendedStructure, tuple: &[usize], level: usize) -> Result<ExtendedDiagram> {
        let bfs = m.bfs();
        let k = tuple.len();
        let base = AtomicDiagram::of(m.base(), tuple)?;
        let mut atoms = Vec::new();
        for beta in 0..=level {
            for j in 0..=k {
                for delta in bfs.types(beta, j)? {
                    for v in all_tuples(k, j) {
                        let args: Tuple = v.iter().map(|&i| tuple[i]).collect();
                        atoms.push((delta, v, m.phi(delta, &args)?));
                    }
                }
            }
        }
        atoms.sort();
        Ok(ExtendedDiagram { base, atoms })
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = (TypeRef, &[usize])> {
        self.atoms.iter().filter(|a| a.2).map(|(d, v, _)| (*d, v.as_slice()))
    }
}

impl fmt::Display for ExtendedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for (d, v) in self.true_atoms() {
            let args: Vec<String> = v.iter().map(|i| format!("x{}", i + 1)).collect();
            write!(f, " {}({})", ExtendedSignature::name(d), args.join(","))?;
        }
        Ok(())
    }
}

/// `D_α(τ)` computed from the stored tables alone: `φ_δ(x̄_v̄)` holds iff
/// `δ ≤ π_v̄((τ)_β)`. Needs `|τ|` within the arity bound.
pub fn extended_diagram(bfs: &BfStructure, tau: TypeRef) -> Result<ExtendedDiagram> {
    let k = tau.arity;
    if k > bfs.arity_bound {
        return Err(Error::invalid(format!("extended diagrams need arity ≤ {}", bfs.arity_bound)));
    }
    let base = bfs.diagram(tau)?.clone();
    let mut atoms = Vec::new();
    for beta in 0..=tau.level {
        let proj = bfs.project(tau, beta)?;
        for j in 0..=k {
            for v in all_tuples(k, j) {
                let iota: Vec<usize> = v.iter().map(|i| i + 1).collect();
                let target = bfs.permute(proj, &iota)?;
                for delta in bfs.types(beta, j)? {
                    atoms.push((delta, v.clone(), bfs.leq(delta, target)?));
                }
            }
        }
    }
    atoms.sort();
    Ok(ExtendedDiagram { base, atoms })
}

/// One existential sentence of the canonical enumeration: `∃x1..xv` of a
/// conjunction of literals, each an index into [`literal_universe`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sigma1Sentence {
    pub vars: usize,
    pub literals: Vec<usize>,
    pub formula: Formula,
}

/// Atoms over `x1..xv`, in order: equalities `xi = xj` (`i ≤ j`), base
/// atoms by symbol then argument tuple, then `φ_δ` for levels below the
/// top by type and argument tuple. Literal `2i` is atom `i`, `2i + 1` its
/// negation.
pub fn literal_universe(bfs: &BfStructure, v: usize) -> Result<Vec<Formula>> {
    let x = vars(&xs(v));
    let mut atoms = Vec::new();
    for i in 0..v {
        for j in i..v {
            atoms.push(Formula::Eq(x[i].clone(), x[j].clone()));
        }
    }
    for sym in bfs.signature.symbols() {
        for t in all_tuples(v, sym.arity) {
            atoms.push(Formula::atom(sym.name.clone(), t.iter().map(|&i| x[i].clone()).collect()));
        }
    }
    for beta in 0..bfs.levels {
        for j in 0..=v.min(bfs.arity_at(beta)) {
            for delta in bfs.types(beta, j)? {
                for t in all_tuples(v, j) {
                    atoms.push(Formula::bf(delta, t.iter().map(|&i| x[i].clone()).collect()));
                }
            }
        }
    }
    Ok(atoms)
}

/// The canonical list of `Σ₁` sentences of size (variables plus literals)
/// at most `bound`: ordered by size, then number of variables, then the
/// literal index list. Index 0 is `∃x1 (x1 = x1)`.
pub fn sigma1_sentences(bfs: &BfStructure, bound: usize) -> Result<Vec<Sigma1Sentence>> {
    let mut out = Vec::new();
    let mut universes: FxHashMap<usize, Vec<Formula>> = FxHashMap::default();
    for size in 2..=bound {
        for v in 1..size {
            let r = size - v;
            if let std::collections::hash_map::Entry::Vacant(e) = universes.entry(v) {
                e.insert(literal_universe(bfs, v)?);
            }
            let atoms = &universes[&v];
            let lits = 2 * atoms.len();
            for combo in combinations(lits, r) {
                let conj = combo
                    .iter()
                    .map(|&l| {
                        let a = atoms[l / 2].clone();
                        if l % 2 == 0 {
                            a
                        } else {
                            Formula::not(a)
                        }
                    })
                    .collect();
                out.push(Sigma1Sentence { vars: v, literals: combo, formula: Formula::exists(xs(v), Formula::And(conj)) });
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// `t_A`: truth values of the canonical `Σ₁` sentences over `L_{<α}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sigma1Theory {
    pub size_bound: usize,
    pub bits: Vec<bool>,
}

impl Sigma1Theory {
    pub fn render(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

pub fn sigma1_theory(m: &ExtendedStructure, size_bound: usize) -> Result<Sigma1Theory> {
    let sentences = sigma1_sentences(m.bfs(), size_bound)?;
    let bits = sentences.iter().map(|s| holds(m, &s.formula)).collect::<Result<Vec<_>>>()?;
    Ok(Sigma1Theory { size_bound, bits })
}

/// Defining axioms of the builtin classes.
pub fn class_axioms(kind: &ClassKind) -> Option<Theory> {
    let lines: &[(&str, &str)] = match kind {
        ClassKind::LinearOrders => &[
            ("(forall (x) (not (atom < x x)))", "irreflexive"),
            ("(forall (x y z) (or (not (atom < x y)) (not (atom < y z)) (atom < x z)))", "transitive"),
            ("(forall (x y) (or (atom < x y) (= x y) (atom < y x)))", "total"),
        ],
        ClassKind::EquivalenceStructures => &[
            ("(forall (x) (atom E x x))", "reflexive"),
            ("(forall (x y) (or (not (atom E x y)) (atom E y x)))", "symmetric"),
            ("(forall (x y z) (or (not (atom E x y)) (not (atom E y z)) (atom E x z)))", "transitive"),
        ],
        ClassKind::Graphs => &[
            ("(forall (x) (not (atom E x x)))", "irreflexive"),
            ("(forall (x y) (or (not (atom E x y)) (atom E y x)))", "symmetric"),
        ],
        ClassKind::Files(_) => return None,
    };
    let mut t = Theory::new(kind.to_string());
    for (f, tag) in lines {
        t.push(Formula::parse(f).expect("builtin axiom parses"), *tag);
    }
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfstruct::assemble;
    use crate::class::{linear_order, ClassEnumerator};
    use crate::formula::{classify, RankClass};

    fn lo_bfs(max: usize, n: usize, m: usize) -> BfStructure {
        assemble(&ClassEnumerator::linear_orders(max), n, m).unwrap()
    }

    #[test]
    fn names_round_trip() {
        let r = TypeRef::new(2, 1, 13);
        assert_eq!(ExtendedSignature::parse_name(&ExtendedSignature::name(r)), Some(r));
        assert_eq!(ExtendedSignature::parse_name("phi_1_2"), None);
    }

    #[test]
    fn expansion_reduct_and_level_zero() {
        let bfs = lo_bfs(3, 1, 1);
        let lo2 = linear_order(2).unwrap();
        let m = expand(&lo2, &bfs).unwrap();
        assert_eq!(m.base(), &lo2);
        for sigma in bfs.types(0, 2).unwrap() {
            let d = bfs.diagram(sigma).unwrap().clone();
            for t in all_tuples(2, 2) {
                assert_eq!(m.phi(sigma, &t).unwrap(), AtomicDiagram::of(&lo2, &t).unwrap() == d);
            }
        }
        assert!(m.phi(TypeRef::new(5, 0, 0), &[]).is_err());
    }

    #[test]
    fn phi_of_one_point_order_forbids_pairs() {
        let bfs = lo_bfs(3, 1, 0);
        let lo1 = bfs.types(1, 0).unwrap()[0];
        let f = phi_def(&bfs, lo1, false).unwrap();
        let less = TypeRef::new(0, 2, 1);
        assert_eq!(bfs.diagram(less).unwrap().to_string(), "!x1=x2 !<(x1,x1) <(x1,x2) !<(x2,x1) !<(x2,x2)");
        assert!(f.to_string().contains(&"(forall (y1_1 y1_2) (not (bftype 0 2 1 y1_1 y1_2)))".to_string()));
        let g = phi_def(&bfs, lo1, true).unwrap();
        assert_eq!(classify(&g), RankClass::pi(1));
        assert!(holds(&linear_order(1).unwrap(), &g).unwrap());
        assert!(!holds(&linear_order(2).unwrap(), &g).unwrap());
    }

    #[test]
    fn psi_forms() {
        let bfs = lo_bfs(2, 1, 1);
        let zero = bfs.types(0, 1).unwrap()[0];
        assert_eq!(psi_def(&bfs, zero).unwrap(), Formula::bf(zero, vars(&xs(1))));
        assert!(psi_def(&bfs, bfs.types(1, 0).unwrap()[0]).is_err());
    }

    #[test]
    fn theory_is_pi2_and_holds_in_expansions() {
        let bfs = lo_bfs(2, 1, 1);
        let t = t_alpha(&bfs).unwrap();
        assert!(t.formulas().all(|f| classify(f).within_pi(2)));
        for a in bfs.structures().unwrap() {
            let m = expand(a, &bfs).unwrap();
            assert_eq!(t.first_failure(&m).unwrap(), None);
        }
    }

    #[test]
    fn first_sigma1_sentence() {
        let bfs = lo_bfs(2, 1, 0);
        let all = sigma1_sentences(&bfs, 3).unwrap();
        assert_eq!(all[0].formula.to_string(), "(exists (x1) (and (= x1 x1)))");
        let m = expand(&linear_order(1).unwrap(), &bfs).unwrap();
        assert!(sigma1_theory(&m, 3).unwrap().bits[0]);
    }

    #[test]
    fn builtin_axioms_hold() {
        for class in [ClassEnumerator::linear_orders(3), ClassEnumerator::equivalence_structures(3), ClassEnumerator::graphs(3)] {
            let t = class_axioms(&class.kind).unwrap();
            for s in class.enumerate().unwrap() {
                assert_eq!(t.first_failure(&s).unwrap(), None);
            }
        }
    }
}
