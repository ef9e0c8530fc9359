//! `ρ_A(ā)` and Scott rank of finite structures.

use std::collections::BTreeMap;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::structure::{all_tuples, Structure, Tuple};

/// Per-tuple `ρ` values and the resulting Scott rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScottRankReport {
    pub structure: Structure,
    pub per_tuple: BTreeMap<Tuple, usize>,
    pub sr: usize,
    /// First tuple (by length, then lexicographically) attaining `sr`.
    pub argmax: Tuple,
}

impl ScottRankReport {
    /// `SR n` followed by one `rho <tuple> <value>` line per tuple.
    pub fn render(&self) -> String {
        let mut out = format!("SR {}\n", self.sr);
        let mut rows: Vec<(&Tuple, &usize)> = self.per_tuple.iter().collect();
        rows.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        for (t, r) in rows {
            out.push_str(&format!("rho {} {}\n", crate::structure::format_tuple(t), r));
        }
        out
    }
}

fn orbit(auts: &[Vec<usize>], a: &[usize]) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = auts.iter().map(|g| a.iter().map(|&x| g[x]).collect()).collect();
    out.sort();
    out.dedup();
    out
}

/// Upper bound on `ρ` used as a safety cap: at level `2|A|` the relation
/// inside one structure is already the orbit relation.
fn cap(a: &Structure) -> usize {
    2 * a.size() + 2
}

fn rho_with(engine: &Engine, a: &Structure, auts: &[Vec<usize>], at: &[usize]) -> Result<usize> {
    a.check_tuple(at)?;
    let id = engine.intern(a);
    let orb = orbit(auts, at);
    let others: Vec<Tuple> = all_tuples(a.size(), at.len()).filter(|t| orb.binary_search(t).is_err()).collect();
    for n in 0..=cap(a) {
        let mut pinned = true;
        for b in &others {
            if engine.leq_ids(id, at, id, b, n)? {
                pinned = false;
                break;
            }
        }
        if pinned {
            return Ok(n);
        }
    }
    Err(Error::invalid("ρ did not stabilize below the structural bound"))
}

/// Least `n` such that `(A, ā) ≤ₙ (A, b̄)` forces `b̄` into the automorphism
/// orbit of `ā`.
pub fn rho(a: &Structure, at: &[usize]) -> Result<usize> {
    rho_with(&Engine::new(), a, &a.automorphisms(), at)
}

/// `SR(A) = max ρ(ā) + 1` over tuples of length at most `bound` (default
/// `|A|`).
pub fn scott_rank(a: &Structure, bound: Option<usize>) -> Result<ScottRankReport> {
    scott_rank_with(&Engine::new(), a, bound)
}

pub fn scott_rank_with(engine: &Engine, a: &Structure, bound: Option<usize>) -> Result<ScottRankReport> {
    let bound = bound.unwrap_or(a.size());
    if bound == 0 {
        return Err(Error::invalid("tuple length bound must be at least 1"));
    }
    let auts = a.automorphisms();
    let mut per_tuple = BTreeMap::new();
    let mut best: Option<(usize, Tuple)> = None;
    for k in 0..=bound {
        for t in all_tuples(a.size(), k) {
            let r = rho_with(engine, a, &auts, &t)?;
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, t.clone()));
            }
            per_tuple.insert(t, r);
        }
    }
    let (r, argmax) = best.expect("the empty tuple is always recorded");
    Ok(ScottRankReport { structure: a.clone(), per_tuple, sr: r + 1, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::{equivalence_structure, linear_order};

    #[test]
    fn singleton_structure() {
        let a = equivalence_structure(&[1]).unwrap();
        assert_eq!(rho(&a, &[0]).unwrap(), 0);
        assert_eq!(scott_rank(&a, None).unwrap().sr, 1);
    }

    #[test]
    fn two_element_order() {
        let lo2 = linear_order(2).unwrap();
        assert_eq!(rho(&lo2, &[0]).unwrap(), 1);
        assert_eq!(rho(&lo2, &[1]).unwrap(), 1);
        assert_eq!(rho(&lo2, &[0, 1]).unwrap(), 0);
        let report = scott_rank(&lo2, None).unwrap();
        assert_eq!(report.sr, 2);
        assert_eq!(report.argmax, vec![0]);
        assert!(report.render().starts_with("SR 2\nrho - 0\n"));
    }

    #[test]
    fn zero_bound_rejected() {
        assert!(scott_rank(&linear_order(1).unwrap(), Some(0)).is_err());
    }
}
