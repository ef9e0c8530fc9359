//! The back-and-forth relations `≤ₙ` and `≡ₙ`.
//!
//! `(A, ā) ≤₀ (B, b̄)` holds when the two tuples have the same atomic
//! diagram. For `n > 0`, `(A, ā) ≤ₙ (B, b̄)` holds when for every `γ < n`
//! and every injective `d̄` over `B` there is `c̄` over `A` with
//! `(B, b̄d̄) ≤_γ (A, āc̄)`.
//!
//! The engine checks only `γ = n - 1` (the relations are monotone in `n`)
//! and, once a tuple sees the whole signature, replaces it by its distinct
//! entries and restricts moves to fresh elements. Answers mirror the
//! equality pattern of the move, so only injective fresh answers are tried.

use std::cell::{Cell, OnceCell, RefCell};
use std::fmt;
use std::rc::Rc;

use rustc_hash::FxHashMap;

use crate::diagram::same_diagram;
use crate::error::{Error, Result};
use crate::structure::{dedup, injective_tuples, Structure};

/// Handle of a structure interned in an [`Engine`].
pub type StructId = usize;

/// Largest structure for which automorphisms are precomputed to shortcut
/// comparisons inside one structure.
const ORBIT_LIMIT: usize = 6;

/// Outcome of comparing two pairs both ways.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Leq,
    Geq,
    Equiv,
    Incomparable,
}

impl Comparison {
    fn from_pair(leq: bool, geq: bool) -> Comparison {
        match (leq, geq) {
            (true, true) => Comparison::Equiv,
            (true, false) => Comparison::Leq,
            (false, true) => Comparison::Geq,
            (false, false) => Comparison::Incomparable,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Leq => "leq",
            Comparison::Geq => "geq",
            Comparison::Equiv => "equiv",
            Comparison::Incomparable => "incomparable",
        })
    }
}

struct Entry {
    structure: Structure,
    automorphisms: OnceCell<Option<Vec<Vec<usize>>>>,
}

impl Entry {
    fn same_orbit(&self, a: &[usize], b: &[usize]) -> bool {
        let auts = self.automorphisms.get_or_init(|| {
            (self.structure.size() <= ORBIT_LIMIT).then(|| self.structure.automorphisms())
        });
        match auts {
            Some(auts) => auts.iter().any(|g| a.iter().zip(b).all(|(&x, &y)| g[x] == y)),
            None => false,
        }
    }
}

#[derive(PartialEq, Eq, Hash)]
struct Key {
    a: u32,
    b: u32,
    n: u32,
    tuples: Box<[u16]>,
}

/// Memoizing evaluator for `≤ₙ`. Structures are interned; the memo table is
/// shared by every query made through the same engine.
pub struct Engine {
    entries: RefCell<Vec<Rc<Entry>>>,
    index: RefCell<FxHashMap<Structure, StructId>>,
    memo: RefCell<FxHashMap<Key, bool>>,
    nodes: Cell<u64>,
    budget: Option<u64>,
    max_extension: Option<usize>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("structures", &self.entries.borrow().len())
            .field("memo", &self.memo.borrow().len())
            .field("nodes", &self.nodes.get())
            .field("budget", &self.budget)
            .field("max_extension", &self.max_extension)
            .finish()
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine {
            entries: RefCell::new(Vec::new()),
            index: RefCell::new(FxHashMap::default()),
            memo: RefCell::new(FxHashMap::default()),
            nodes: Cell::new(0),
            budget: None,
            max_extension: None,
        }
    }

    /// Aborts with [`Error::Budget`] once more than `nodes` distinct
    /// comparisons have been expanded.
    pub fn with_budget(mut self, nodes: u64) -> Self {
        self.budget = Some(nodes);
        self
    }

    /// Caps the length of extension tuples. Without a cap moves range up to
    /// the size of the structure, which is exact.
    pub fn with_max_extension(mut self, len: usize) -> Self {
        self.max_extension = Some(len);
        self
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn max_extension(&self) -> Option<usize> {
        self.max_extension
    }

    /// Number of comparisons expanded so far.
    pub fn nodes(&self) -> u64 {
        self.nodes.get()
    }

    pub fn intern(&self, s: &Structure) -> StructId {
        if let Some(&id) = self.index.borrow().get(s) {
            return id;
        }
        let mut entries = self.entries.borrow_mut();
        let id = entries.len();
        entries.push(Rc::new(Entry { structure: s.clone(), automorphisms: OnceCell::new() }));
        self.index.borrow_mut().insert(s.clone(), id);
        id
    }

    pub fn structure(&self, id: StructId) -> Structure {
        self.entry(id).structure.clone()
    }

    fn entry(&self, id: StructId) -> Rc<Entry> {
        Rc::clone(&self.entries.borrow()[id])
    }

    fn check(&self, a: &Structure, at: &[usize], b: &Structure, bt: &[usize]) -> Result<()> {
        if a.signature() != b.signature() {
            return Err(Error::SignatureMismatch);
        }
        if at.len() != bt.len() {
            return Err(Error::TupleLength(at.len(), bt.len()));
        }
        a.check_tuple(at)?;
        b.check_tuple(bt)
    }

    /// `(A, ā) ≤ₙ (B, b̄)`.
    pub fn leq(&self, a: &Structure, at: &[usize], b: &Structure, bt: &[usize], n: usize) -> Result<bool> {
        self.check(a, at, b, bt)?;
        let (ia, ib) = (self.intern(a), self.intern(b));
        self.leq_ids(ia, at, ib, bt, n)
    }

    /// Both directions of [`Engine::leq`].
    pub fn compare(&self, a: &Structure, at: &[usize], b: &Structure, bt: &[usize], n: usize) -> Result<Comparison> {
        self.check(a, at, b, bt)?;
        let (ia, ib) = (self.intern(a), self.intern(b));
        self.compare_ids(ia, at, ib, bt, n)
    }

    pub fn compare_ids(&self, a: StructId, at: &[usize], b: StructId, bt: &[usize], n: usize) -> Result<Comparison> {
        let leq = self.leq_ids(a, at, b, bt, n)?;
        let geq = self.leq_ids(b, bt, a, at, n)?;
        Ok(Comparison::from_pair(leq, geq))
    }

    pub fn equiv_ids(&self, a: StructId, at: &[usize], b: StructId, bt: &[usize], n: usize) -> Result<bool> {
        Ok(self.leq_ids(a, at, b, bt, n)? && self.leq_ids(b, bt, a, at, n)?)
    }

    /// `≤ₙ` on interned structures. Tuples are assumed valid and of equal
    /// length.
    pub fn leq_ids(&self, a: StructId, at: &[usize], b: StructId, bt: &[usize], n: usize) -> Result<bool> {
        let ea = self.entry(a);
        let eb = self.entry(b);
        if !same_diagram(&ea.structure, at, &eb.structure, bt) {
            return Ok(false);
        }
        if n == 0 || (a == b && at == bt) {
            return Ok(true);
        }
        let saturated = at.is_empty() || dedup(at).len() >= ea.structure.signature().len();
        let (at, bt) = if saturated { (dedup(at), dedup(bt)) } else { (at.to_vec(), bt.to_vec()) };
        if a == b && ea.same_orbit(&at, &bt) {
            return Ok(true);
        }
        let key = Key {
            a: a as u32,
            b: b as u32,
            n: n as u32,
            tuples: at.iter().chain(&bt).map(|&e| e as u16).collect(),
        };
        if let Some(&v) = self.memo.borrow().get(&key) {
            return Ok(v);
        }
        self.tick()?;
        let result = if saturated {
            self.fresh_moves(a, &at, &ea, b, &bt, &eb, n)?
        } else {
            self.literal_moves(a, &at, &ea, b, &bt, &eb, n)?
        };
        self.memo.borrow_mut().insert(key, result);
        Ok(result)
    }

    fn tick(&self) -> Result<()> {
        let n = self.nodes.get() + 1;
        self.nodes.set(n);
        match self.budget {
            Some(b) if n > b => Err(Error::Budget(b)),
            _ => Ok(()),
        }
    }

    fn cap(&self, len: usize) -> usize {
        self.max_extension.map_or(len, |m| m.min(len))
    }

    // Injective tuples: a move re-mentioning b̄ reduces to its fresh part,
    // and a move with no fresh part to comparing b̄ with ā at level n-1.
    #[allow(clippy::too_many_arguments)]
    fn fresh_moves(
        &self,
        a: StructId,
        at: &[usize],
        ea: &Entry,
        b: StructId,
        bt: &[usize],
        eb: &Entry,
        n: usize,
    ) -> Result<bool> {
        if !bt.is_empty() && !self.leq_ids(b, bt, a, at, n - 1)? {
            return Ok(false);
        }
        let room_a = ea.structure.size() - at.len();
        let max_m = self.cap(eb.structure.size() - bt.len());
        let mut bd = bt.to_vec();
        let mut ac = at.to_vec();
        for m in 1..=max_m {
            if m > room_a {
                // no fresh answer of this length exists
                return Ok(injective_tuples(eb.structure.size(), m, bt).is_empty());
            }
            let answers = injective_tuples(ea.structure.size(), m, at);
            for d in injective_tuples(eb.structure.size(), m, bt) {
                bd.truncate(bt.len());
                bd.extend_from_slice(&d);
                let mut found = false;
                for c in &answers {
                    ac.truncate(at.len());
                    ac.extend_from_slice(c);
                    if self.leq_ids(b, &bd, a, &ac, n - 1)? {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    // Moves as defined: every injective d̄ of length 1..=|B|. Entries of d̄
    // already in b̄ are answered by the matching entry of ā.
    #[allow(clippy::too_many_arguments)]
    fn literal_moves(
        &self,
        a: StructId,
        at: &[usize],
        ea: &Entry,
        b: StructId,
        bt: &[usize],
        eb: &Entry,
        n: usize,
    ) -> Result<bool> {
        let size_b = eb.structure.size();
        let size_a = ea.structure.size();
        let mut bd = bt.to_vec();
        for m in 1..=self.cap(size_b) {
            for d in injective_tuples(size_b, m, &[]) {
                let mirror: Vec<Option<usize>> =
                    d.iter().map(|e| bt.iter().position(|x| x == e).map(|j| at[j])).collect();
                let fresh = mirror.iter().filter(|x| x.is_none()).count();
                bd.truncate(bt.len());
                bd.extend_from_slice(&d);
                let mut found = false;
                let exclude = dedup(at);
                if fresh <= size_a - exclude.len() {
                    for c in injective_tuples(size_a, fresh, &exclude) {
                        let mut ac = at.to_vec();
                        let mut next = c.iter();
                        ac.extend(mirror.iter().map(|x| x.unwrap_or_else(|| *next.next().expect("fresh slot"))));
                        if self.leq_ids(b, &bd, a, &ac, n - 1)? {
                            found = true;
                            break;
                        }
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `(A, ā) ≤ₙ (B, b̄)` with a fresh engine.
pub fn bf_leq(a: &Structure, at: &[usize], b: &Structure, bt: &[usize], n: usize) -> Result<bool> {
    Engine::new().leq(a, at, b, bt, n)
}

/// Compares two pairs at level `n` with a fresh engine.
pub fn bf_compare(a: &Structure, at: &[usize], b: &Structure, bt: &[usize], n: usize) -> Result<Comparison> {
    Engine::new().compare(a, at, b, bt, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::{equivalence_structure, linear_order};
    use crate::structure::Signature;

    fn lo(n: usize) -> Structure {
        linear_order(n).unwrap()
    }

    #[test]
    fn identity_is_leq_at_every_level() {
        for n in 0..4 {
            assert!(bf_leq(&lo(2), &[0, 1], &lo(2), &[0, 1], n).unwrap());
        }
    }

    #[test]
    fn one_point_order_is_pi1_stronger() {
        assert!(bf_leq(&lo(2), &[], &lo(1), &[], 1).unwrap());
        assert!(!bf_leq(&lo(1), &[], &lo(2), &[], 1).unwrap());
        assert_eq!(bf_compare(&lo(1), &[], &lo(2), &[], 1).unwrap(), Comparison::Geq);
    }

    #[test]
    fn endpoints_are_incomparable() {
        assert_eq!(bf_compare(&lo(2), &[0], &lo(2), &[1], 1).unwrap(), Comparison::Incomparable);
        assert_eq!(bf_compare(&lo(2), &[0], &lo(2), &[1], 0).unwrap(), Comparison::Equiv);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(bf_leq(&lo(2), &[0], &lo(2), &[], 1), Err(Error::TupleLength(1, 0))));
        let eq = equivalence_structure(&[1]).unwrap();
        assert!(matches!(bf_leq(&lo(1), &[], &eq, &[], 1), Err(Error::SignatureMismatch)));
        assert!(matches!(bf_leq(&lo(1), &[3], &lo(1), &[0], 1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn budget_aborts() {
        let engine = Engine::new().with_budget(1);
        let err = engine.leq(&lo(3), &[], &lo(4), &[], 3).unwrap_err();
        assert!(matches!(err, Error::Budget(1)));
    }

    #[test]
    fn repeated_entries_follow_the_pattern() {
        assert!(bf_leq(&lo(3), &[1, 1], &lo(3), &[1, 1], 2).unwrap());
        assert!(!bf_leq(&lo(3), &[1, 1], &lo(3), &[0, 1], 0).unwrap());
        // (1,1) in LO(3) has a point on each side, (0,0) does not
        assert!(!bf_leq(&lo(3), &[0, 0], &lo(3), &[1, 1], 1).unwrap());
    }

    #[test]
    fn unsaturated_signature_uses_literal_moves() {
        let sig = Signature::new([("P", 1), ("Q", 1)]).unwrap();
        let mut a = Structure::new(sig.clone(), 2).unwrap();
        a.set(1, &[0], true).unwrap();
        let b = Structure::new(sig, 2).unwrap();
        // a single element sees only P, so level 0 cannot tell them apart
        assert!(bf_leq(&a, &[0], &b, &[0], 0).unwrap());
        // a move of length one reaches a two-tuple, which sees Q
        assert!(!bf_leq(&a, &[0], &b, &[0], 1).unwrap());
        assert!(bf_leq(&a, &[], &a, &[], 3).unwrap());
    }

    #[test]
    fn extension_cap_weakens_the_relation() {
        // with moves of length one, LO(2) and LO(3) look alike at level 1
        let engine = Engine::new().with_max_extension(1);
        assert!(engine.leq(&lo(2), &[], &lo(3), &[], 1).unwrap());
        assert!(!bf_leq(&lo(2), &[], &lo(3), &[], 1).unwrap());
    }
}
