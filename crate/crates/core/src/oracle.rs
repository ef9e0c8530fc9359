//! Π-type inclusion through canonical characteristic formulas.
//!
//! For every pair `(E, ḡ)` of a finite fragment and every level `γ` this
//! module writes down a formula `χ^γ_{E,ḡ}(x̄)`:
//!
//! ```text
//! χ^0 = D(x̄) = D_E(ḡ)
//! χ^γ = χ^0 ∧ ⋀ₘ ∀ȳ (ȳ fresh and injective → ⋀ ¬χ^{γ-1}_{E',h̄}(x̄ȳ))
//! ```
//!
//! where the inner conjunction ranges over the `(γ-1)`-formulas of length
//! `|ḡ| + m` that no fresh extension of `ḡ` in `E` satisfies. Inner
//! formulas stay as named predicates, and the whole thing is evaluated with
//! [`crate::formula::eval`]. Nothing here calls the back-and-forth engine.
//!
//! Formulas are kept one per class of mutual satisfaction, which keeps the
//! conjunctions short.

use std::cell::RefCell;

use rustc_hash::FxHashMap;

use crate::catalog::TypeRef;
use crate::class::ClassEnumerator;
use crate::diagram::AtomicDiagram;
use crate::error::{Error, Result};
use crate::formula::{eval, Formula, Model, Term};
use crate::structure::{injective_tuples, pattern, Structure, Tuple};

type Pattern = Vec<usize>;
type Point = (usize, Tuple);

struct Class {
    rep: Point,
    formula: Formula,
}

#[derive(Default)]
struct Group {
    /// Class of every point of the pattern.
    class_of: FxHashMap<Point, usize>,
    classes: Vec<usize>,
}

/// Reusable oracle over one fragment. Pairs passed to
/// [`PiOracle::included`] join the fragment if they are not members yet.
pub struct PiOracle {
    fragment: RefCell<Vec<Structure>>,
    /// Global class table; a class id is the `id` of its [`TypeRef`].
    classes: RefCell<Vec<Class>>,
    groups: RefCell<FxHashMap<(usize, Pattern), Group>>,
    memo: RefCell<FxHashMap<(usize, usize, Tuple), bool>>,
    max_size: RefCell<usize>,
}

struct View<'a> {
    oracle: &'a PiOracle,
    structure: &'a Structure,
    index: usize,
}

impl Model for View<'_> {
    fn domain_size(&self) -> usize {
        self.structure.size()
    }

    fn atom(&self, symbol: &str, args: &[usize]) -> Result<bool> {
        self.structure.atom(symbol, args)
    }

    fn bftype(&self, ty: TypeRef, args: &[usize]) -> Result<bool> {
        self.oracle.holds(ty.id, self.index, args)
    }
}

fn xs(k: usize) -> Vec<Term> {
    (1..=k).map(|i| Term::var(format!("x{i}"))).collect()
}

fn assignment(tuple: &[usize]) -> Vec<(String, usize)> {
    tuple.iter().enumerate().map(|(i, &e)| (format!("x{}", i + 1), e)).collect()
}

/// Tuples of `E` with equality pattern `p`, in lexicographic order of their
/// distinct entries.
fn tuples_with_pattern(size: usize, p: &[usize]) -> Vec<Tuple> {
    let heads: Vec<usize> = (0..p.len()).filter(|&i| p[i] == i).collect();
    injective_tuples(size, heads.len(), &[])
        .into_iter()
        .map(|v| p.iter().map(|&q| v[heads.iter().position(|&h| h == q).expect("head")]).collect())
        .collect()
}

impl PiOracle {
    pub fn new(class: &ClassEnumerator) -> Result<Self> {
        Ok(Self::from_structures(class.enumerate()?))
    }

    pub fn from_structures(fragment: Vec<Structure>) -> Self {
        let max = fragment.iter().map(Structure::size).max().unwrap_or(0);
        PiOracle {
            fragment: RefCell::new(fragment),
            classes: RefCell::new(Vec::new()),
            groups: RefCell::new(FxHashMap::default()),
            memo: RefCell::new(FxHashMap::default()),
            max_size: RefCell::new(max),
        }
    }

    fn index_of(&self, s: &Structure) -> usize {
        if let Some(i) = self.fragment.borrow().iter().position(|t| t == s) {
            return i;
        }
        // a new member invalidates every group built so far
        self.fragment.borrow_mut().push(s.clone());
        let mut max = self.max_size.borrow_mut();
        *max = (*max).max(s.size());
        self.classes.borrow_mut().clear();
        self.groups.borrow_mut().clear();
        self.memo.borrow_mut().clear();
        self.fragment.borrow().len() - 1
    }

    fn structure(&self, index: usize) -> Structure {
        self.fragment.borrow()[index].clone()
    }

    /// Whether every canonical `Π_γ` formula, `1 ≤ γ ≤ n`, true of `ā` in
    /// `A` is true of `b̄` in `B`.
    pub fn included(&self, a: &Structure, at: &[usize], b: &Structure, bt: &[usize], n: usize) -> Result<bool> {
        if n == 0 {
            return Err(Error::invalid("the oracle needs n ≥ 1; compare atomic diagrams instead"));
        }
        if a.signature() != b.signature() {
            return Err(Error::SignatureMismatch);
        }
        if at.len() != bt.len() {
            return Err(Error::TupleLength(at.len(), bt.len()));
        }
        a.check_tuple(at)?;
        b.check_tuple(bt)?;
        let ia = self.index_of(a);
        let ib = self.index_of(b);
        let p = pattern(at);
        for gamma in 1..=n {
            self.ensure_group(gamma, &p)?;
            let classes = self.groups.borrow()[&(gamma, p.clone())].classes.clone();
            for c in classes {
                if self.holds(c, ia, at)? && !self.holds(c, ib, bt)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `χ_c(t̄)` in fragment member `index`.
    fn holds(&self, class: usize, index: usize, tuple: &[usize]) -> Result<bool> {
        let key = (class, index, tuple.to_vec());
        if let Some(&v) = self.memo.borrow().get(&key) {
            return Ok(v);
        }
        let formula = self.classes.borrow()[class].formula.clone();
        let v = self.eval_at(&formula, index, tuple)?;
        self.memo.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn eval_at(&self, f: &Formula, index: usize, tuple: &[usize]) -> Result<bool> {
        let s = self.structure(index);
        let view = View { oracle: self, structure: &s, index };
        eval(&view, f, &assignment(tuple))
    }

    fn ensure_group(&self, gamma: usize, p: &Pattern) -> Result<()> {
        if self.groups.borrow().contains_key(&(gamma, p.clone())) {
            return Ok(());
        }
        let members = self.fragment.borrow().len();
        let mut group = Group::default();
        for index in 0..members {
            let size = self.fragment.borrow()[index].size();
            for t in tuples_with_pattern(size, p) {
                let formula = self.characteristic(gamma, index, &t)?;
                let mut found = None;
                for &c in &group.classes {
                    let rep = self.classes.borrow()[c].rep.clone();
                    if self.holds(c, index, &t)? && self.eval_at(&formula, rep.0, &rep.1)? {
                        found = Some(c);
                        break;
                    }
                }
                let c = match found {
                    Some(c) => c,
                    None => {
                        let mut classes = self.classes.borrow_mut();
                        classes.push(Class { rep: (index, t.clone()), formula });
                        group.classes.push(classes.len() - 1);
                        classes.len() - 1
                    }
                };
                group.class_of.insert((index, t), c);
            }
        }
        self.groups.borrow_mut().insert((gamma, p.clone()), group);
        Ok(())
    }

    /// `χ^γ_{E,ḡ}` with free variables `x1..xk`.
    fn characteristic(&self, gamma: usize, index: usize, g: &[usize]) -> Result<Formula> {
        let s = self.structure(index);
        let k = g.len();
        let x = xs(k);
        let mut parts = vec![AtomicDiagram::of(&s, g)?.formula(&x)];
        if gamma == 0 {
            return Ok(Formula::And(parts));
        }
        let p = pattern(g);
        let distinct = p.iter().enumerate().filter(|(i, q)| *i == **q).count();
        let max_size = *self.max_size.borrow();
        let start = if k >= 1 { 0 } else { 1 };
        for m in start..=max_size {
            if distinct + m > max_size {
                break;
            }
            let mut q = p.clone();
            q.extend(k..k + m);
            self.ensure_group(gamma - 1, &q)?;
            let below = self.groups.borrow()[&(gamma - 1, q.clone())].classes.clone();
            let fresh = injective_tuples(s.size(), m, g);
            let mut excluded = Vec::new();
            for c in below {
                let mut realized = false;
                for e in &fresh {
                    let mut t = g.to_vec();
                    t.extend_from_slice(e);
                    if self.holds(c, index, &t)? {
                        realized = true;
                        break;
                    }
                }
                if !realized {
                    excluded.push(c);
                }
            }
            if excluded.is_empty() {
                continue;
            }
            let y: Vec<String> = (1..=m).map(|i| format!("y{i}")).collect();
            let mut args = x.clone();
            args.extend(y.iter().map(|v| Term::var(v.clone())));
            let forbid = Formula::BigAnd(
                excluded
                    .into_iter()
                    .map(|c| Formula::not(Formula::bf(TypeRef::new(gamma - 1, k + m, c), args.clone())))
                    .collect(),
            );
            let mut guard = Vec::new();
            for (i, yi) in y.iter().enumerate() {
                for xl in &x {
                    guard.push(Formula::not(Formula::Eq(Term::var(yi.clone()), xl.clone())));
                }
                for yj in &y[i + 1..] {
                    guard.push(Formula::not(Formula::Eq(Term::var(yi.clone()), Term::var(yj.clone()))));
                }
            }
            parts.push(Formula::forall(y, Formula::implies(Formula::And(guard), forbid)));
        }
        Ok(Formula::And(parts))
    }

    /// The canonical formula `χ^n_{A,ā}`; inner predicates refer to this
    /// oracle's class table.
    pub fn characteristic_formula(&self, a: &Structure, at: &[usize], n: usize) -> Result<Formula> {
        a.check_tuple(at)?;
        let ia = self.index_of(a);
        self.characteristic(n, ia, at)
    }

    /// Number of canonical classes built so far.
    pub fn class_count(&self) -> usize {
        self.classes.borrow().len()
    }
}

/// Π-type inclusion `(A, ā) ⊑ₙ (B, b̄)` over the fragment `class ∪ {A, B}`.
pub fn pi_type_inclusion_oracle(
    class: &ClassEnumerator,
    a: &Structure,
    at: &[usize],
    b: &Structure,
    bt: &[usize],
    n: usize,
) -> Result<bool> {
    PiOracle::new(class)?.included(a, at, b, bt, n)
}
