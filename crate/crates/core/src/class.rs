//! Deterministic enumerators for finite fragments of structure classes.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::structure::{all_tuples, permutations, Signature, Structure};

/// Largest graph size the brute-force canonicalizer accepts.
pub const MAX_GRAPH_SIZE: usize = 6;

/// Which family a [`ClassEnumerator`] walks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClassKind {
    /// Finite strict linear orders, one per size.
    LinearOrders,
    /// Finite equivalence structures (`E` reflexive, symmetric, transitive),
    /// one per partition shape.
    EquivalenceStructures,
    /// Finite simple undirected graphs up to isomorphism.
    Graphs,
    /// Structures read from files, in the listed order.
    Files(Vec<PathBuf>),
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassKind::LinearOrders => f.write_str("linord"),
            ClassKind::EquivalenceStructures => f.write_str("equiv"),
            ClassKind::Graphs => f.write_str("graph"),
            ClassKind::Files(paths) => {
                let list: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
                write!(f, "files:{}", list.join(","))
            }
        }
    }
}

impl FromStr for ClassKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linord" | "linear-orders" => Ok(ClassKind::LinearOrders),
            "equiv" | "equivalence-structures" => Ok(ClassKind::EquivalenceStructures),
            "graph" | "graphs" => Ok(ClassKind::Graphs),
            other => match other.strip_prefix("files:") {
                Some(list) if !list.is_empty() => {
                    Ok(ClassKind::Files(list.split(',').map(PathBuf::from).collect()))
                }
                _ => Err(Error::invalid(format!("unknown class `{other}`"))),
            },
        }
    }
}

/// A class of finite structures bounded by size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassEnumerator {
    pub kind: ClassKind,
    pub max_size: usize,
}

impl ClassEnumerator {
    pub fn new(kind: ClassKind, max_size: usize) -> Self {
        ClassEnumerator { kind, max_size }
    }

    pub fn linear_orders(max_size: usize) -> Self {
        Self::new(ClassKind::LinearOrders, max_size)
    }

    pub fn equivalence_structures(max_size: usize) -> Self {
        Self::new(ClassKind::EquivalenceStructures, max_size)
    }

    pub fn graphs(max_size: usize) -> Self {
        Self::new(ClassKind::Graphs, max_size)
    }

    pub fn files(paths: Vec<PathBuf>) -> Self {
        Self::new(ClassKind::Files(paths), usize::MAX)
    }

    /// The signature shared by every member.
    pub fn signature(&self) -> Result<Signature> {
        match &self.kind {
            ClassKind::LinearOrders => Signature::new([("<", 2)]),
            ClassKind::EquivalenceStructures | ClassKind::Graphs => Signature::new([("E", 2)]),
            ClassKind::Files(_) => {
                let first = self.enumerate()?;
                first
                    .first()
                    .map(|s| s.signature().clone())
                    .ok_or_else(|| Error::invalid("empty file list"))
            }
        }
    }

    /// All members in canonical order: by size, then by table encoding.
    /// File lists are yielded in the listed order.
    pub fn enumerate(&self) -> Result<Vec<Structure>> {
        if self.max_size == 0 {
            return Err(Error::invalid("max size must be at least 1"));
        }
        match &self.kind {
            ClassKind::LinearOrders => (1..=self.max_size).map(linear_order).collect(),
            ClassKind::EquivalenceStructures => {
                let mut out = Vec::new();
                for n in 1..=self.max_size {
                    let mut level: Vec<Structure> =
                        partitions(n).iter().map(|p| equivalence_structure(p)).collect::<Result<_>>()?;
                    level.sort_by_key(|s| s.encoding());
                    out.extend(level);
                }
                Ok(out)
            }
            ClassKind::Graphs => {
                if self.max_size > MAX_GRAPH_SIZE {
                    return Err(Error::invalid(format!(
                        "graph enumeration is limited to size {MAX_GRAPH_SIZE}"
                    )));
                }
                let mut out = Vec::new();
                for n in 1..=self.max_size {
                    out.extend(graphs_of_size(n)?);
                }
                Ok(out)
            }
            ClassKind::Files(paths) => {
                let mut out = Vec::new();
                for p in paths {
                    let text = std::fs::read_to_string(p)
                        .map_err(|source| Error::Io { path: p.clone(), source })?;
                    out.push(Structure::parse(&text)?);
                }
                if let Some(first) = out.first() {
                    if out.iter().any(|s| s.signature() != first.signature()) {
                        return Err(Error::SignatureMismatch);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Size of the largest member.
    pub fn largest(&self) -> Result<usize> {
        Ok(self.enumerate()?.iter().map(Structure::size).max().unwrap_or(0))
    }
}

impl fmt::Display for ClassEnumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

/// The strict linear order `0 < 1 < … < n-1`.
pub fn linear_order(n: usize) -> Result<Structure> {
    let mut s = Structure::new(Signature::new([("<", 2)])?, n)?;
    for i in 0..n {
        for j in i + 1..n {
            s.set(0, &[i, j], true)?;
        }
    }
    Ok(s)
}

/// Equivalence structure whose classes are contiguous blocks of the given sizes.
pub fn equivalence_structure(blocks: &[usize]) -> Result<Structure> {
    let n: usize = blocks.iter().sum();
    let mut s = Structure::new(Signature::new([("E", 2)])?, n)?;
    let mut start = 0;
    for &b in blocks {
        for i in start..start + b {
            for j in start..start + b {
                s.set(0, &[i, j], true)?;
            }
        }
        start += b;
    }
    Ok(s)
}

/// Integer partitions of `n`, parts in non-increasing order.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

fn graphs_of_size(n: usize) -> Result<Vec<Structure>> {
    let sig = Signature::new([("E", 2)])?;
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms: Vec<Vec<usize>> = permutations(n).collect();
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    for mask in 0u64..(1u64 << edges.len()) {
        let mut g = Structure::new(sig.clone(), n)?;
        for (bit, &(i, j)) in edges.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                g.set(0, &[i, j], true)?;
                g.set(0, &[j, i], true)?;
            }
        }
        let canon = perms.iter().map(|p| g.relabel(p).encoding()).max().expect("n ≥ 1");
        seen.insert(canon);
    }
    seen.into_iter()
        .map(|bits| {
            let mut g = Structure::new(sig.clone(), n)?;
            for (code, t) in all_tuples(n, 2).enumerate() {
                if bits[code] {
                    g.set(0, &t, true)?;
                }
            }
            Ok(g)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::isomorphic;

    #[test]
    fn linear_orders_one_per_size() {
        let all = ClassEnumerator::linear_orders(3).enumerate().unwrap();
        assert_eq!(all.len(), 3);
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s, &linear_order(i + 1).unwrap());
        }
    }

    #[test]
    fn equivalence_structures_count_partitions() {
        // brute force: p(1) + p(2) + p(3) = 1 + 2 + 3
        assert_eq!(ClassEnumerator::equivalence_structures(3).enumerate().unwrap().len(), 6);
        assert_eq!(ClassEnumerator::equivalence_structures(4).enumerate().unwrap().len(), 11);
    }

    #[test]
    fn graphs_up_to_isomorphism() {
        let all = ClassEnumerator::graphs(4).enumerate().unwrap();
        assert_eq!(all.len(), 1 + 2 + 4 + 11);
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert!(!isomorphic(a, b).unwrap());
            }
        }
    }

    #[test]
    fn enumeration_is_repeatable() {
        for class in [
            ClassEnumerator::linear_orders(4),
            ClassEnumerator::equivalence_structures(4),
            ClassEnumerator::graphs(4),
        ] {
            assert_eq!(class.enumerate().unwrap(), class.enumerate().unwrap());
        }
    }

    #[test]
    fn explicit_files_in_listed_order() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.struct");
        let b = dir.path().join("b.struct");
        std::fs::write(&a, linear_order(3).unwrap().serialize()).unwrap();
        std::fs::write(&b, linear_order(1).unwrap().serialize()).unwrap();
        let class = ClassEnumerator::files(vec![a.clone(), b]);
        let got = class.enumerate().unwrap();
        assert_eq!(got, vec![linear_order(3).unwrap(), linear_order(1).unwrap()]);
        let missing = ClassEnumerator::files(vec![dir.path().join("nope.struct")]);
        assert!(matches!(missing.enumerate(), Err(Error::Io { .. })));
        assert_eq!(format!("files:{}", a.display()).parse::<ClassKind>().unwrap(), ClassKind::Files(vec![a]));
    }

    #[test]
    fn isomorphism_is_an_equivalence_on_small_families() {
        let mut pool = Vec::new();
        for class in [ClassEnumerator::equivalence_structures(3), ClassEnumerator::graphs(3)] {
            for s in class.enumerate().unwrap() {
                // add a relabelled copy so the relation is nontrivial
                let n = s.size();
                let rev: Vec<usize> = (0..n).rev().collect();
                pool.push(s.relabel(&rev));
                pool.push(s);
            }
        }
        let sig_eq = |a: &Structure, b: &Structure| a.signature() == b.signature();
        for a in &pool {
            assert!(isomorphic(a, a).unwrap());
            for b in pool.iter().filter(|b| sig_eq(a, b)) {
                assert_eq!(isomorphic(a, b).unwrap(), isomorphic(b, a).unwrap());
                for c in pool.iter().filter(|c| sig_eq(b, c)) {
                    if isomorphic(a, b).unwrap() && isomorphic(b, c).unwrap() {
                        assert!(isomorphic(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn equivalence_relabelling_is_isomorphic() {
        // EQ(2+1) vs EQ(1+2): same shape, different labelling
        let a = equivalence_structure(&[2, 1]).unwrap();
        let b = equivalence_structure(&[1, 2]).unwrap();
        assert_ne!(a, b);
        assert!(isomorphic(&a, &b).unwrap());
    }
}
