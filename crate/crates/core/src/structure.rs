//! Finite relational structures over an ordered signature.
//!
//! The domain of a structure of size `n` is `{0, …, n-1}`. Relation tables
//! are stored densely, one bit per element sequence of the symbol's arity,
//! in mixed-radix order.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A tuple of domain elements. Repeats are allowed.
pub type Tuple = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// Relational signature. Declaration order is significant: `L↾k` is the
/// first `k` symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut sig = Signature::default();
        for (name, arity) in symbols {
            sig.push(name.into(), arity)?;
        }
        Ok(sig)
    }

    fn push(&mut self, name: String, arity: usize) -> Result<()> {
        if arity == 0 {
            return Err(Error::invalid(format!("symbol `{name}` must have arity ≥ 1")));
        }
        if self.index_of(&name).is_some() {
            return Err(Error::invalid(format!("duplicate symbol `{name}`")));
        }
        self.symbols.push(Symbol { name, arity });
        Ok(())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// Number of symbols visible to a tuple of length `k` (`|L↾k|`).
    pub fn visible(&self, k: usize) -> usize {
        k.min(self.symbols.len())
    }

    /// The first `k` symbols.
    pub fn restrict(&self, k: usize) -> Result<Signature> {
        if k > self.symbols.len() {
            return Err(Error::invalid(format!(
                "cannot restrict a {}-symbol signature to {k} symbols",
                self.symbols.len()
            )));
        }
        Ok(Signature { symbols: self.symbols[..k].to_vec() })
    }
}

/// A finite relational structure with domain `{0, …, size-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Structure {
    signature: Signature,
    size: usize,
    tables: Vec<Vec<bool>>,
}

fn pow(base: usize, exp: usize) -> usize {
    (0..exp).fold(1usize, |acc, _| acc * base)
}

impl Structure {
    /// An empty-relation structure of the given size.
    pub fn new(signature: Signature, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("structures must be nonempty"));
        }
        let tables = signature.symbols.iter().map(|s| vec![false; pow(size, s.arity)]).collect();
        Ok(Structure { signature, size, tables })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn offset(&self, args: impl IntoIterator<Item = usize>) -> usize {
        args.into_iter().fold(0, |acc, e| acc * self.size + e)
    }

    /// Sets a fact, checking ranges and arity.
    pub fn set(&mut self, symbol: usize, args: &[usize], value: bool) -> Result<()> {
        let sym = &self.signature.symbols[symbol];
        if args.len() != sym.arity {
            return Err(Error::ArityMismatch {
                symbol: sym.name.clone(),
                expected: sym.arity,
                got: args.len(),
            });
        }
        if let Some(&e) = args.iter().find(|&&e| e >= self.size) {
            return Err(Error::OutOfRange { element: e, size: self.size });
        }
        let off = self.offset(args.iter().copied());
        self.tables[symbol][off] = value;
        Ok(())
    }

    pub fn set_named(&mut self, name: &str, args: &[usize], value: bool) -> Result<()> {
        let idx = self
            .signature
            .index_of(name)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))?;
        self.set(idx, args, value)
    }

    /// Truth of `symbol(args)`. Arguments are assumed in range.
    #[inline]
    pub fn holds(&self, symbol: usize, args: &[usize]) -> bool {
        self.tables[symbol][self.offset(args.iter().copied())]
    }

    /// Truth of `symbol(tuple[vars[0]], tuple[vars[1]], …)`.
    #[inline]
    pub(crate) fn holds_at(&self, symbol: usize, tuple: &[usize], vars: &[usize]) -> bool {
        self.tables[symbol][self.offset(vars.iter().map(|&v| tuple[v]))]
    }

    /// All true facts of a symbol in lexicographic order.
    pub fn facts(&self, symbol: usize) -> Vec<Tuple> {
        let arity = self.signature.symbols[symbol].arity;
        all_tuples(self.size, arity).filter(|t| self.holds(symbol, t)).collect()
    }

    /// Flat bit encoding of all tables in declaration order.
    pub fn encoding(&self) -> Vec<bool> {
        self.tables.concat()
    }

    pub fn check_tuple(&self, tuple: &[usize]) -> Result<()> {
        match tuple.iter().find(|&&e| e >= self.size) {
            Some(&e) => Err(Error::OutOfRange { element: e, size: self.size }),
            None => Ok(()),
        }
    }

    /// Keeps only the first `k` symbols.
    pub fn restrict(&self, k: usize) -> Result<Structure> {
        let signature = self.signature.restrict(k)?;
        Ok(Structure { signature, size: self.size, tables: self.tables[..k].to_vec() })
    }

    /// The substructure induced on `elements` (which must be distinct),
    /// relabelled so that `elements[i]` becomes `i`.
    pub fn induced(&self, elements: &[usize]) -> Result<Structure> {
        self.check_tuple(elements)?;
        let mut out = Structure::new(self.signature.clone(), elements.len())?;
        for (s, sym) in self.signature.symbols.iter().enumerate() {
            for t in all_tuples(elements.len(), sym.arity) {
                let image: Vec<usize> = t.iter().map(|&i| elements[i]).collect();
                if self.holds(s, &image) {
                    out.set(s, &t, true)?;
                }
            }
        }
        Ok(out)
    }

    /// Applies a bijection `perm` (element `i` goes to `perm[i]`).
    pub fn relabel(&self, perm: &[usize]) -> Structure {
        let mut out = Structure::new(self.signature.clone(), self.size).expect("nonempty");
        for (s, sym) in self.signature.symbols.iter().enumerate() {
            for t in all_tuples(self.size, sym.arity) {
                if self.holds(s, &t) {
                    let image: Vec<usize> = t.iter().map(|&i| perm[i]).collect();
                    let off = out.offset(image);
                    out.tables[s][off] = true;
                }
            }
        }
        out
    }

    /// Whether `perm` maps this structure onto `other` preserving every table
    /// in both directions.
    pub fn is_isomorphism(&self, other: &Structure, perm: &[usize]) -> bool {
        self.signature.symbols.iter().enumerate().all(|(s, sym)| {
            all_tuples(self.size, sym.arity).all(|t| {
                let image: Vec<usize> = t.iter().map(|&i| perm[i]).collect();
                self.holds(s, &t) == other.holds(s, &image)
            })
        })
    }

    /// All automorphisms, by exhaustive search over permutations.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        permutations(self.size).filter(|p| self.is_isomorphism(self, p)).collect()
    }

    /// Parses the line-oriented structure format.
    pub fn parse(text: &str) -> Result<Structure> {
        let mut sig = Signature::default();
        let mut size: Option<usize> = None;
        let mut facts: Vec<(usize, String, Vec<usize>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            match words.next() {
                Some("signature") => {
                    if size.is_some() {
                        return Err(Error::syntax(lineno, "signature after size"));
                    }
                    let name = words.next().ok_or_else(|| Error::syntax(lineno, "missing name"))?;
                    let arity = parse_num(words.next(), lineno)?;
                    if words.next().is_some() {
                        return Err(Error::syntax(lineno, "trailing tokens"));
                    }
                    sig.push(name.to_string(), arity).map_err(|e| Error::syntax(lineno, e.to_string()))?;
                }
                Some("size") => {
                    if size.is_some() {
                        return Err(Error::syntax(lineno, "duplicate size line"));
                    }
                    let n = parse_num(words.next(), lineno)?;
                    if n == 0 {
                        return Err(Error::syntax(lineno, "structures must be nonempty"));
                    }
                    size = Some(n);
                }
                Some("rel") => {
                    let name = words.next().ok_or_else(|| Error::syntax(lineno, "missing name"))?;
                    let args = words
                        .map(|w| w.parse::<usize>().map_err(|_| Error::syntax(lineno, format!("bad element `{w}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    facts.push((lineno, name.to_string(), args));
                }
                Some(other) => return Err(Error::syntax(lineno, format!("unknown keyword `{other}`"))),
                None => unreachable!(),
            }
        }
        let size = size.ok_or_else(|| Error::syntax(text.lines().count().max(1), "missing size line"))?;
        let mut st = Structure::new(sig, size)?;
        for (lineno, name, args) in facts {
            let idx = st
                .signature
                .index_of(&name)
                .ok_or_else(|| Error::syntax(lineno, format!("undeclared symbol `{name}`")))?;
            st.set(idx, &args, true)?;
        }
        Ok(st)
    }

    /// Canonical text: signature lines, size, then `rel` lines sorted by
    /// symbol name and then numerically by tuple.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for sym in &self.signature.symbols {
            let _ = writeln!(out, "signature {} {}", sym.name, sym.arity);
        }
        let _ = writeln!(out, "size {}", self.size);
        let mut order: Vec<usize> = (0..self.signature.len()).collect();
        order.sort_by(|&a, &b| self.signature.symbols[a].name.cmp(&self.signature.symbols[b].name));
        for s in order {
            for t in self.facts(s) {
                let _ = write!(out, "rel {}", self.signature.symbols[s].name);
                for e in t {
                    let _ = write!(out, " {e}");
                }
                out.push('\n');
            }
        }
        out
    }
}

fn parse_num(word: Option<&str>, line: usize) -> Result<usize> {
    let w = word.ok_or_else(|| Error::syntax(line, "missing number"))?;
    w.parse().map_err(|_| Error::syntax(line, format!("bad number `{w}`")))
}

/// Exhaustive isomorphism test.
pub fn isomorphic(a: &Structure, b: &Structure) -> Result<bool> {
    if a.signature != b.signature {
        return Err(Error::SignatureMismatch);
    }
    if a.size != b.size {
        return Ok(false);
    }
    Ok(permutations(a.size).any(|p| a.is_isomorphism(b, &p)))
}

/// All sequences in `{0..n}^k` in lexicographic order.
pub fn all_tuples(n: usize, k: usize) -> impl Iterator<Item = Tuple> {
    let total = if n == 0 && k > 0 { 0 } else { pow(n, k) };
    (0..total).map(move |mut code| {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        t
    })
}

/// All injective sequences of length `k` over `{0..n}` avoiding `exclude`,
/// in lexicographic order.
pub fn injective_tuples(n: usize, k: usize, exclude: &[usize]) -> Vec<Tuple> {
    fn go(n: usize, k: usize, used: &mut Vec<bool>, cur: &mut Tuple, out: &mut Vec<Tuple>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in 0..n {
            if !used[e] {
                used[e] = true;
                cur.push(e);
                go(n, k, used, cur, out);
                cur.pop();
                used[e] = false;
            }
        }
    }
    let mut used = vec![false; n];
    for &e in exclude {
        if e < n {
            used[e] = true;
        }
    }
    let mut out = Vec::new();
    go(n, k, &mut used, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All permutations of `{0..n}` in lexicographic order.
pub fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    injective_tuples(n, n, &[]).into_iter()
}

/// Equality pattern of a tuple: position of the first occurrence of each entry.
pub fn pattern(tuple: &[usize]) -> Vec<usize> {
    tuple
        .iter()
        .map(|e| tuple.iter().position(|x| x == e).expect("present"))
        .collect()
}

/// Distinct entries of a tuple in order of first occurrence.
pub fn dedup(tuple: &[usize]) -> Tuple {
    let mut out = Vec::with_capacity(tuple.len());
    for &e in tuple {
        if !out.contains(&e) {
            out.push(e);
        }
    }
    out
}

/// Parses a comma-separated tuple; the empty string (or `-`) is the empty tuple.
pub fn parse_tuple(text: &str) -> Result<Tuple> {
    let text = text.trim();
    if text.is_empty() || text == "-" {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|w| w.trim().parse::<usize>().map_err(|_| Error::invalid(format!("bad tuple entry `{w}`"))))
        .collect()
}

pub fn format_tuple(tuple: &[usize]) -> String {
    if tuple.is_empty() {
        return "-".to_string();
    }
    tuple.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
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
    fn parses_two_element_order() {
        let s = Structure::parse("signature < 2\nsize 2\nrel < 0 1\n").unwrap();
        assert_eq!(s, lo(2));
        assert_eq!(s.serialize(), "signature < 2\nsize 2\nrel < 0 1\n");
    }

    #[test]
    fn parses_empty_relation() {
        let s = Structure::parse("signature < 2\nsize 1\n").unwrap();
        assert_eq!(s, lo(1));
        assert!(s.facts(0).is_empty());
    }

    #[test]
    fn rejects_out_of_range() {
        let err = Structure::parse("signature < 2\nsize 3\nrel < 0 5\n").unwrap_err();
        assert!(matches!(err, Error::OutOfRange { element: 5, size: 3 }));
    }

    #[test]
    fn rejects_arity_mismatch_and_syntax() {
        assert!(matches!(
            Structure::parse("signature < 2\nsize 3\nrel < 0\n").unwrap_err(),
            Error::ArityMismatch { .. }
        ));
        assert!(matches!(
            Structure::parse("signature < 2\nsize x\n").unwrap_err(),
            Error::Syntax { line: 2, .. }
        ));
        assert!(Structure::parse("signature < 2\nsize 0\n").is_err());
        assert!(Structure::parse("signature < 2\n").is_err());
    }

    #[test]
    fn restrict_keeps_prefix() {
        assert_eq!(lo(3).restrict(1).unwrap(), lo(3));
        let mut two = Structure::new(Signature::new([("P", 1), ("<", 2)]).unwrap(), 2).unwrap();
        two.set(0, &[1], true).unwrap();
        let bare = two.restrict(0).unwrap();
        assert!(bare.signature().is_empty());
        assert_eq!(two.restrict(2).unwrap(), two);
        assert!(two.restrict(3).is_err());
    }

    #[test]
    fn isomorphism_basics() {
        assert!(isomorphic(&lo(2), &lo(2)).unwrap());
        assert!(!isomorphic(&lo(2), &lo(3)).unwrap());
        assert_eq!(lo(3).automorphisms().len(), 1);
    }

    #[test]
    fn tuple_helpers() {
        assert_eq!(all_tuples(2, 2).count(), 4);
        assert_eq!(all_tuples(3, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(injective_tuples(3, 2, &[1]), vec![vec![0, 2], vec![2, 0]]);
        assert_eq!(pattern(&[4, 2, 4]), vec![0, 1, 0]);
        assert_eq!(dedup(&[4, 2, 4]), vec![4, 2]);
        assert_eq!(parse_tuple("0, 1").unwrap(), vec![0, 1]);
        assert_eq!(format_tuple(&[]), "-");
    }
}
