//! Atomic diagrams `D_A(ā)` over `L↾|ā|`, including equality atoms.

use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Formula, Term};
use crate::structure::{all_tuples, Signature, Structure, Symbol};

/// The complete record of atomic facts of a tuple of length `arity`.
///
/// Atoms are enumerated canonically: first `x_i = x_j` for `i < j`, then for
/// each visible symbol in declaration order, every variable sequence in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicDiagram {
    arity: usize,
    symbols: Vec<Symbol>,
    bits: Vec<bool>,
}

impl AtomicDiagram {
    pub fn of(structure: &Structure, tuple: &[usize]) -> Result<AtomicDiagram> {
        structure.check_tuple(tuple)?;
        let k = tuple.len();
        let sig = structure.signature();
        let visible = sig.visible(k);
        let mut bits = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                bits.push(tuple[i] == tuple[j]);
            }
        }
        for s in 0..visible {
            for vars in all_tuples(k, sig.symbols()[s].arity) {
                bits.push(structure.holds_at(s, tuple, &vars));
            }
        }
        Ok(AtomicDiagram { arity: k, symbols: sig.symbols()[..visible].to_vec(), bits })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Visible symbols (`L↾arity`).
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Atoms with their truth values in canonical order. Variables are
    /// 0-based positions.
    pub fn literals(&self) -> Vec<(DiagramAtom, bool)> {
        let mut atoms = Vec::with_capacity(self.bits.len());
        for i in 0..self.arity {
            for j in i + 1..self.arity {
                atoms.push(DiagramAtom::Eq(i, j));
            }
        }
        for (s, sym) in self.symbols.iter().enumerate() {
            for vars in all_tuples(self.arity, sym.arity) {
                atoms.push(DiagramAtom::Rel(s, vars));
            }
        }
        atoms.into_iter().zip(self.bits.iter().copied()).collect()
    }

    /// Parses the canonical string produced by `Display`, for a tuple of
    /// length `arity` over `signature`.
    pub fn parse(signature: &Signature, arity: usize, text: &str) -> Result<AtomicDiagram> {
        let visible = signature.visible(arity);
        let symbols = signature.symbols()[..visible].to_vec();
        let template = AtomicDiagram { arity, symbols, bits: Vec::new() };
        let expected: Vec<String> = template
            .atoms_only()
            .iter()
            .map(|a| template.render_atom(a))
            .collect();
        let words: Vec<&str> = text.split_whitespace().filter(|w| *w != "-").collect();
        if words.len() != expected.len() {
            return Err(Error::invalid(format!(
                "diagram has {} literals, expected {}",
                words.len(),
                expected.len()
            )));
        }
        let mut bits = Vec::with_capacity(words.len());
        for (w, e) in words.iter().zip(&expected) {
            let (neg, body) = match w.strip_prefix('!') {
                Some(rest) => (true, rest),
                None => (false, *w),
            };
            if body != e {
                return Err(Error::invalid(format!("unexpected diagram literal `{w}` (wanted `{e}`)")));
            }
            bits.push(!neg);
        }
        Ok(AtomicDiagram { bits, ..template })
    }

    /// The quantifier-free conjunction "`D(x̄) = D`" over the given terms.
    pub fn formula(&self, vars: &[Term]) -> Formula {
        let literals = self
            .literals()
            .into_iter()
            .map(|(atom, value)| {
                let f = match atom {
                    DiagramAtom::Eq(i, j) => Formula::Eq(vars[i].clone(), vars[j].clone()),
                    DiagramAtom::Rel(s, args) => {
                        Formula::atom(self.symbols[s].name.clone(), args.iter().map(|&v| vars[v].clone()).collect())
                    }
                };
                if value {
                    f
                } else {
                    Formula::not(f)
                }
            })
            .collect();
        Formula::And(literals)
    }

    fn atoms_only(&self) -> Vec<DiagramAtom> {
        let mut atoms = Vec::new();
        for i in 0..self.arity {
            for j in i + 1..self.arity {
                atoms.push(DiagramAtom::Eq(i, j));
            }
        }
        for (s, sym) in self.symbols.iter().enumerate() {
            for vars in all_tuples(self.arity, sym.arity) {
                atoms.push(DiagramAtom::Rel(s, vars));
            }
        }
        atoms
    }

    fn render_atom(&self, atom: &DiagramAtom) -> String {
        match atom {
            DiagramAtom::Eq(i, j) => format!("x{}=x{}", i + 1, j + 1),
            DiagramAtom::Rel(s, vars) => {
                let args: Vec<String> = vars.iter().map(|v| format!("x{}", v + 1)).collect();
                format!("{}({})", self.symbols[*s].name, args.join(","))
            }
        }
    }
}

/// One atomic formula of a diagram, over 0-based variable positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagramAtom {
    Eq(usize, usize),
    /// Symbol index into the visible signature and argument positions.
    Rel(usize, Vec<usize>),
}

impl fmt::Display for AtomicDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("-");
        }
        let mut first = true;
        for (atom, value) in self.literals() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if !value {
                f.write_str("!")?;
            }
            f.write_str(&self.render_atom(&atom))?;
        }
        Ok(())
    }
}

/// Whether `D_A(ā) = D_B(b̄)`, without materializing either diagram.
pub(crate) fn same_diagram(a: &Structure, at: &[usize], b: &Structure, bt: &[usize]) -> bool {
    let k = at.len();
    if k != bt.len() {
        return false;
    }
    for i in 0..k {
        for j in i + 1..k {
            if (at[i] == at[j]) != (bt[i] == bt[j]) {
                return false;
            }
        }
    }
    let visible = a.signature().visible(k);
    let mut vars = Vec::new();
    for s in 0..visible {
        let arity = a.signature().symbols()[s].arity;
        let total = (0..arity).fold(1usize, |acc, _| acc * k);
        for mut code in 0..total {
            vars.clear();
            vars.resize(arity, 0);
            for slot in vars.iter_mut().rev() {
                *slot = code % k;
                code /= k;
            }
            if a.holds_at(s, at, &vars) != b.holds_at(s, bt, &vars) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lo(n: usize) -> Structure {
        let mut s = Structure::new(Signature::new([("<", 2)]).unwrap(), n).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                s.set(0, &[i, j], true).unwrap();
            }
        }
        s
    }

    #[test]
    fn ordered_pair() {
        let d = AtomicDiagram::of(&lo(2), &[0, 1]).unwrap();
        assert_eq!(d.to_string(), "!x1=x2 !<(x1,x1) <(x1,x2) !<(x2,x1) !<(x2,x2)");
    }

    #[test]
    fn repeated_entry() {
        let d = AtomicDiagram::of(&lo(2), &[0, 0]).unwrap();
        assert_eq!(d.to_string(), "x1=x2 !<(x1,x1) !<(x1,x2) !<(x2,x1) !<(x2,x2)");
    }

    #[test]
    fn empty_tuple() {
        let d = AtomicDiagram::of(&lo(3), &[]).unwrap();
        assert_eq!(d.arity(), 0);
        assert!(d.literals().is_empty());
        assert_eq!(d.to_string(), "-");
    }

    #[test]
    fn parse_round_trip() {
        let sig = Signature::new([("<", 2)]).unwrap();
        for t in all_tuples(3, 3) {
            let d = AtomicDiagram::of(&lo(3), &t).unwrap();
            assert_eq!(AtomicDiagram::parse(&sig, 3, &d.to_string()).unwrap(), d);
        }
        assert_eq!(AtomicDiagram::parse(&sig, 0, "-").unwrap(), AtomicDiagram::of(&lo(1), &[]).unwrap());
    }

    #[test]
    fn same_diagram_matches_materialized() {
        let a = lo(3);
        let b = lo(2);
        for s in all_tuples(3, 2) {
            for t in all_tuples(2, 2) {
                let direct = same_diagram(&a, &s, &b, &t);
                let slow = AtomicDiagram::of(&a, &s).unwrap() == AtomicDiagram::of(&b, &t).unwrap();
                assert_eq!(direct, slow, "{s:?} {t:?}");
            }
        }
    }

    #[test]
    fn restricted_signature_hides_later_symbols() {
        let sig = Signature::new([("P", 1), ("Q", 1)]).unwrap();
        let mut a = Structure::new(sig.clone(), 1).unwrap();
        a.set(1, &[0], true).unwrap();
        let b = Structure::new(sig, 1).unwrap();
        assert!(same_diagram(&a, &[0], &b, &[0]));
        assert!(!same_diagram(&a, &[0, 0], &b, &[0, 0]));
    }
}
