//! Quotients `BFₙ,ₖ` of a class fragment, with projections, re-arrangements
//! and `ext` sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;

use crate::class::ClassEnumerator;
use crate::diagram::AtomicDiagram;
use crate::engine::{Engine, StructId};
use crate::error::{Error, Result};
use crate::structure::{all_tuples, format_tuple, Structure, Tuple};

/// Names a bf-type inside one catalog or bf-structure: `level:arity:id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeRef {
    pub level: usize,
    pub arity: usize,
    pub id: usize,
}

impl TypeRef {
    pub fn new(level: usize, arity: usize, id: usize) -> Self {
        TypeRef { level, arity, id }
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.level, self.arity, self.id)
    }
}

impl FromStr for TypeRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let nums: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
        match nums.as_deref() {
            Some(&[level, arity, id]) => Ok(TypeRef { level, arity, id }),
            _ => Err(Error::invalid(format!("bad type reference `{s}` (want level:arity:id)"))),
        }
    }
}

/// An `≡ₙ`-class with its enumeration-least representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BfType {
    pub level: usize,
    pub arity: usize,
    pub id: usize,
    /// Index of the representative structure in the class enumeration.
    pub rep_index: usize,
    pub rep_tuple: Tuple,
}

impl BfType {
    pub fn type_ref(&self) -> TypeRef {
        TypeRef::new(self.level, self.arity, self.id)
    }
}

impl fmt::Display for BfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rep {} {}", self.type_ref(), self.rep_index, format_tuple(&self.rep_tuple))
    }
}

/// The quotient `BFₙ,ₖ` ordered by `≤ₙ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfLevel {
    pub level: usize,
    pub arity: usize,
    pub types: Vec<BfType>,
    leq: BTreeSet<(usize, usize)>,
}

impl BfLevel {
    /// `pairs` lists every `(i, j)` with `types[i] ≤ types[j]`.
    pub fn new(level: usize, arity: usize, types: Vec<BfType>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        BfLevel { level, arity, types, leq: pairs.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// `types[i] ≤ₙ types[j]`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq.contains(&(i, j))
    }

    /// All true pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.leq.iter().copied()
    }

    /// Whether the stored relation is reflexive, transitive and
    /// antisymmetric.
    pub fn is_partial_order(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.leq(i, i))
            && self.leq.iter().all(|&(i, j)| i == j || !self.leq(j, i))
            && self.leq.iter().all(|&(i, j)| self.leq.range((j, 0)..(j + 1, 0)).all(|&(_, l)| self.leq(i, l)))
    }
}

struct LevelData {
    types: Vec<BfType>,
    members: FxHashMap<(usize, Tuple), usize>,
    /// Each type's `(n-1)`-type and `0`-type.
    prev: Vec<usize>,
    zero: Vec<usize>,
    leq: FxHashMap<(usize, usize), bool>,
    /// Types grouped by their level-0 type.
    by_diagram: BTreeMap<usize, Vec<usize>>,
    full: Option<BfLevel>,
}

/// Lazily computed quotients of one class fragment, sharing one engine.
pub struct Catalog {
    class: ClassEnumerator,
    structures: Vec<Structure>,
    ids: Vec<StructId>,
    engine: Engine,
    extension_bound: usize,
    levels: BTreeMap<(usize, usize), LevelData>,
}

impl fmt::Debug for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Catalog")
            .field("class", &self.class)
            .field("structures", &self.structures.len())
            .field("levels", &self.levels.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Catalog {
    pub fn new(class: ClassEnumerator) -> Result<Self> {
        Self::with_options(class, None, None)
    }

    /// `extension_bound` caps the length of extension tuples (default: the
    /// size of the largest member, which is exact). `budget` caps engine
    /// nodes.
    pub fn with_options(class: ClassEnumerator, extension_bound: Option<usize>, budget: Option<u64>) -> Result<Self> {
        let structures = class.enumerate()?;
        if structures.is_empty() {
            return Err(Error::invalid("class fragment is empty"));
        }
        let largest = structures.iter().map(Structure::size).max().unwrap_or(0);
        let extension_bound = extension_bound.unwrap_or(largest);
        let mut engine = Engine::new();
        if extension_bound < largest {
            engine = engine.with_max_extension(extension_bound);
        }
        if let Some(b) = budget {
            engine = engine.with_budget(b);
        }
        let ids = structures.iter().map(|s| engine.intern(s)).collect();
        Ok(Catalog { class, structures, ids, engine, extension_bound, levels: BTreeMap::new() })
    }

    pub fn class(&self) -> &ClassEnumerator {
        &self.class
    }

    pub fn structures(&self) -> &[Structure] {
        &self.structures
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn struct_id(&self, index: usize) -> StructId {
        self.ids[index]
    }

    /// Length bound for `ext` extensions and engine moves.
    pub fn extension_bound(&self) -> usize {
        self.extension_bound
    }

    fn ensure(&mut self, n: usize, k: usize) -> Result<()> {
        if self.levels.contains_key(&(n, k)) {
            return Ok(());
        }
        if n > 0 {
            self.ensure(n - 1, k)?;
        }
        let mut types: Vec<BfType> = Vec::new();
        let mut members = FxHashMap::default();
        if n == 0 {
            let mut seen: FxHashMap<AtomicDiagram, usize> = FxHashMap::default();
            for (si, s) in self.structures.iter().enumerate() {
                for t in all_tuples(s.size(), k) {
                    let d = AtomicDiagram::of(s, &t)?;
                    let next = seen.len();
                    let id = *seen.entry(d).or_insert(next);
                    if id == types.len() {
                        types.push(BfType { level: 0, arity: k, id, rep_index: si, rep_tuple: t.clone() });
                    }
                    members.insert((si, t), id);
                }
            }
        } else {
            let prev = &self.levels[&(n - 1, k)];
            let mut buckets: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
            for (si, s) in self.structures.iter().enumerate() {
                for t in all_tuples(s.size(), k) {
                    let p = prev.members[&(si, t.clone())];
                    let bucket = buckets.entry(p).or_default();
                    let mut found = None;
                    for &cand in bucket.iter() {
                        let rep: &BfType = &types[cand];
                        if self.engine.equiv_ids(self.ids[rep.rep_index], &rep.rep_tuple, self.ids[si], &t, n)? {
                            found = Some(cand);
                            break;
                        }
                    }
                    let id = match found {
                        Some(id) => id,
                        None => {
                            let id = types.len();
                            types.push(BfType { level: n, arity: k, id, rep_index: si, rep_tuple: t.clone() });
                            bucket.push(id);
                            id
                        }
                    };
                    members.insert((si, t), id);
                }
            }
        }
        let (prev, zero): (Vec<usize>, Vec<usize>) = if n == 0 {
            ((0..types.len()).collect(), (0..types.len()).collect())
        } else {
            let below = &self.levels[&(n - 1, k)];
            types.iter().map(|ty| {
                let p = below.members[&(ty.rep_index, ty.rep_tuple.clone())];
                (p, below.zero[p])
            }).unzip()
        };
        let mut by_diagram: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for ty in &types {
            by_diagram.entry(zero[ty.id]).or_default().push(ty.id);
        }
        self.levels.insert(
            (n, k),
            LevelData { types, members, prev, zero, leq: FxHashMap::default(), by_diagram, full: None },
        );
        Ok(())
    }

    /// The quotient `BFₙ,ₖ` with its order.
    pub fn level(&mut self, n: usize, k: usize) -> Result<&BfLevel> {
        self.ensure(n, k)?;
        if self.levels[&(n, k)].full.is_none() {
            let groups: Vec<Vec<usize>> = self.levels[&(n, k)].by_diagram.values().cloned().collect();
            let mut pairs = Vec::new();
            for group in &groups {
                for &i in group {
                    for &j in group {
                        if self.leq_ids(n, k, i, j)? {
                            pairs.push((i, j));
                        }
                    }
                }
            }
            let data = self.levels.get_mut(&(n, k)).expect("ensured");
            data.full = Some(BfLevel::new(n, k, data.types.clone(), pairs));
        }
        Ok(self.levels[&(n, k)].full.as_ref().expect("just built"))
    }

    /// Types of `BFₙ,ₖ` without forcing the order matrix.
    pub fn types(&mut self, n: usize, k: usize) -> Result<&[BfType]> {
        self.ensure(n, k)?;
        Ok(&self.levels[&(n, k)].types)
    }

    fn leq_ids(&mut self, n: usize, k: usize, i: usize, j: usize) -> Result<bool> {
        let data = &self.levels[&(n, k)];
        if i == j {
            return Ok(true);
        }
        if n == 0 || data.zero[i] != data.zero[j] {
            return Ok(false);
        }
        if let Some(&v) = data.leq.get(&(i, j)) {
            return Ok(v);
        }
        let (pi, pj) = (data.prev[i], data.prev[j]);
        let (ti, tj) = (data.types[i].clone(), data.types[j].clone());
        let value = self.leq_ids(n - 1, k, pi, pj)?
            && self.engine.leq_ids(self.ids[ti.rep_index], &ti.rep_tuple, self.ids[tj.rep_index], &tj.rep_tuple, n)?;
        self.levels.get_mut(&(n, k)).expect("ensured").leq.insert((i, j), value);
        Ok(value)
    }

    /// `σ ≤ τ` for two types of the same level and arity.
    pub fn leq(&mut self, sigma: TypeRef, tau: TypeRef) -> Result<bool> {
        if sigma.level != tau.level || sigma.arity != tau.arity {
            return Err(Error::invalid(format!("{sigma} and {tau} live in different quotients")));
        }
        self.get(sigma)?;
        self.get(tau)?;
        self.leq_ids(sigma.level, sigma.arity, sigma.id, tau.id)
    }

    pub fn get(&mut self, r: TypeRef) -> Result<BfType> {
        self.ensure(r.level, r.arity)?;
        self.levels[&(r.level, r.arity)]
            .types
            .get(r.id)
            .cloned()
            .ok_or_else(|| Error::UnknownType(r.to_string()))
    }

    /// The `n`-type of `(K[index], tuple)`.
    pub fn type_of(&mut self, n: usize, index: usize, tuple: &[usize]) -> Result<TypeRef> {
        let s = self.structures.get(index).ok_or_else(|| Error::invalid(format!("no structure {index}")))?;
        s.check_tuple(tuple)?;
        let k = tuple.len();
        self.ensure(n, k)?;
        let id = self.levels[&(n, k)].members[&(index, tuple.to_vec())];
        Ok(TypeRef::new(n, k, id))
    }

    /// The `n`-type of an arbitrary pair, or `None` when it is not realized
    /// in the fragment.
    pub fn classify(&mut self, n: usize, a: &Structure, tuple: &[usize]) -> Result<Option<TypeRef>> {
        if let Some(index) = self.structures.iter().position(|s| s == a) {
            return self.type_of(n, index, tuple).map(Some);
        }
        if a.signature() != self.structures[0].signature() {
            return Err(Error::SignatureMismatch);
        }
        a.check_tuple(tuple)?;
        let k = tuple.len();
        self.ensure(n, k)?;
        let ia = self.engine.intern(a);
        let candidates: Vec<BfType> = self.levels[&(n, k)].types.clone();
        for ty in candidates {
            if self.engine.equiv_ids(self.ids[ty.rep_index], &ty.rep_tuple, ia, tuple, n)? {
                return Ok(Some(ty.type_ref()));
            }
        }
        Ok(None)
    }

    /// `(σ)_β`.
    pub fn project(&mut self, sigma: TypeRef, beta: usize) -> Result<TypeRef> {
        if beta > sigma.level {
            return Err(Error::invalid(format!("cannot project {sigma} to level {beta}")));
        }
        let rep = self.get(sigma)?;
        self.type_of(beta, rep.rep_index, &rep.rep_tuple)
    }

    /// `π_ι(σ)` for a 1-based index map `ι`.
    pub fn permute(&mut self, sigma: TypeRef, iota: &[usize]) -> Result<TypeRef> {
        if let Some(&bad) = iota.iter().find(|&&i| i == 0 || i > sigma.arity) {
            return Err(Error::invalid(format!("index {bad} out of range for arity {}", sigma.arity)));
        }
        let rep = self.get(sigma)?;
        let tuple: Tuple = iota.iter().map(|&i| rep.rep_tuple[i - 1]).collect();
        self.type_of(sigma.level, rep.rep_index, &tuple)
    }

    /// The `γ`-types of all one-shot extensions `āc̄` of σ's representative,
    /// before downward closure.
    fn extension_types(&mut self, sigma: &BfType, gamma: usize) -> Result<BTreeSet<TypeRef>> {
        let size = self.structures[sigma.rep_index].size();
        let mut out = BTreeSet::new();
        for m in 1..=self.extension_bound {
            for c in all_tuples(size, m) {
                let mut t = sigma.rep_tuple.clone();
                t.extend_from_slice(&c);
                out.insert(self.type_of(gamma, sigma.rep_index, &t)?);
            }
        }
        Ok(out)
    }

    /// `ext_γ(σ)`: the `≤_γ`-downward closure of the `γ`-types of the
    /// extensions of σ's representative by tuples of length
    /// `1..=extension_bound`.
    pub fn ext_set(&mut self, sigma: TypeRef, gamma: usize) -> Result<BTreeSet<TypeRef>> {
        if gamma >= sigma.level {
            return Err(Error::invalid(format!("ext_{gamma} needs a type of level above {gamma}, got {sigma}")));
        }
        let rep = self.get(sigma)?;
        let direct = self.extension_types(&rep, gamma)?;
        let mut out = BTreeSet::new();
        for rho in &direct {
            let (n, k) = (rho.level, rho.arity);
            let d = self.levels[&(n, k)].zero[rho.id];
            let group = self.levels[&(n, k)].by_diagram[&d].clone();
            for tau in group {
                if self.leq_ids(n, k, tau, rho.id)? {
                    out.insert(TypeRef::new(n, k, tau));
                }
            }
        }
        Ok(out)
    }

    /// Whether `σ ≤_γ τ ⇔ ∀β<γ ext_β(σ) ⊇ ext_β(τ)` holds for this pair.
    pub fn ext_characterization_check(&mut self, sigma: TypeRef, tau: TypeRef, gamma: usize) -> Result<bool> {
        if sigma.arity != tau.arity {
            return Err(Error::invalid("types of different arity"));
        }
        if gamma == 0 || gamma > sigma.level || gamma > tau.level {
            return Err(Error::invalid(format!("level {gamma} must be in 1..=min level")));
        }
        let (s, t) = (self.project(sigma, gamma)?, self.project(tau, gamma)?);
        let lhs = self.leq(s, t)?;
        let mut rhs = true;
        for beta in 0..gamma {
            let es = self.ext_set(s, beta)?;
            let et = self.ext_set(t, beta)?;
            if !es.is_superset(&et) {
                rhs = false;
                break;
            }
        }
        Ok(lhs == rhs)
    }

    /// The level-0 diagram of a level-0 type.
    pub fn diagram(&mut self, sigma: TypeRef) -> Result<AtomicDiagram> {
        let rep = self.get(sigma)?;
        AtomicDiagram::of(&self.structures[rep.rep_index], &rep.rep_tuple)
    }

    pub fn count_classes(&mut self, n: usize, k: usize) -> Result<usize> {
        Ok(self.types(n, k)?.len())
    }
}

/// `BFₙ,ₖ` of a class fragment. `tuple_bound` caps the length of extension
/// tuples and must be at least `k`.
pub fn types_at_level(class: &ClassEnumerator, n: usize, k: usize, tuple_bound: usize) -> Result<BfLevel> {
    if tuple_bound < k {
        return Err(Error::invalid(format!("tuple bound {tuple_bound} is below the arity {k}")));
    }
    let mut cat = Catalog::with_options(class.clone(), Some(tuple_bound), None)?;
    Ok(cat.level(n, k)?.clone())
}

/// Number of `≡ₙ`-classes of `k`-tuples in the fragment.
pub fn count_classes(class: &ClassEnumerator, n: usize, k: usize) -> Result<usize> {
    Catalog::new(class.clone())?.count_classes(n, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lo(max: usize) -> Catalog {
        Catalog::new(ClassEnumerator::linear_orders(max)).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(count_classes(&ClassEnumerator::linear_orders(3), 1, 0).unwrap(), 3);
        assert_eq!(count_classes(&ClassEnumerator::graphs(3), 0, 0).unwrap(), 1);
        assert_eq!(count_classes(&ClassEnumerator::equivalence_structures(2), 0, 2).unwrap(), 3);
    }

    #[test]
    fn representatives_are_enumeration_least() {
        let level = types_at_level(&ClassEnumerator::linear_orders(3), 1, 0, 3).unwrap();
        let reps: Vec<usize> = level.types.iter().map(|t| t.rep_index).collect();
        assert_eq!(reps, vec![0, 1, 2]);
        assert!(types_at_level(&ClassEnumerator::linear_orders(3), 1, 2, 1).is_err());
    }

    #[test]
    fn projection_and_permutation() {
        let mut cat = lo(3);
        let top = cat.type_of(1, 2, &[]).unwrap();
        assert_eq!(cat.project(top, 1).unwrap(), top);
        assert_eq!(cat.project(top, 0).unwrap(), TypeRef::new(0, 0, 0));
        let pair = cat.type_of(0, 1, &[0, 1]).unwrap();
        let swapped = cat.permute(pair, &[2, 1]).unwrap();
        assert_eq!(swapped, cat.type_of(0, 1, &[1, 0]).unwrap());
        assert_eq!(cat.permute(pair, &[1, 2]).unwrap(), pair);
        let first = cat.permute(pair, &[1]).unwrap();
        assert_eq!(first, cat.type_of(0, 1, &[0]).unwrap());
        assert!(cat.permute(pair, &[3]).is_err());
        assert!(cat.project(pair, 1).is_err());
    }

    #[test]
    fn ext_of_small_orders() {
        let mut cat = lo(3);
        let one = cat.type_of(1, 0, &[]).unwrap();
        let two = cat.type_of(1, 1, &[]).unwrap();
        let e1 = cat.ext_set(one, 0).unwrap();
        let e2 = cat.ext_set(two, 0).unwrap();
        assert!(e2.is_superset(&e1) && e2.len() > e1.len());
        let less = cat.type_of(0, 1, &[0, 1]).unwrap();
        assert!(e2.contains(&less) && !e1.contains(&less));
        assert!(cat.ext_set(one, 1).is_err());
    }

    #[test]
    fn characterization_on_a_few_pairs() {
        let mut cat = lo(3);
        let one = cat.type_of(1, 0, &[]).unwrap();
        let two = cat.type_of(1, 1, &[]).unwrap();
        assert!(cat.ext_characterization_check(one, one, 1).unwrap());
        assert!(cat.ext_characterization_check(one, two, 1).unwrap());
        assert!(cat.ext_characterization_check(two, one, 1).unwrap());
        let lo_end = cat.type_of(1, 1, &[0]).unwrap();
        let hi_end = cat.type_of(1, 1, &[1]).unwrap();
        assert!(!cat.leq(lo_end, hi_end).unwrap() && !cat.leq(hi_end, lo_end).unwrap());
        assert!(cat.ext_characterization_check(lo_end, hi_end, 1).unwrap());
    }

    #[test]
    fn type_ref_round_trip() {
        let r = TypeRef::new(2, 1, 7);
        assert_eq!(r.to_string().parse::<TypeRef>().unwrap(), r);
        assert!("2:1".parse::<TypeRef>().is_err());
    }
}
