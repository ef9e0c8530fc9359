//! The `n`-back-and-forth structure of a class fragment as one explicit
//! object: quotients, orders, projections, re-arrangements, `ext` relations
//! and level-0 diagrams.
//!
//! Arity is bounded level by level. With arity bound `m`, extension bound
//! `s` and top level `n`, level `β` carries all arities up to
//! `m + (n - β)·s`, which is what the `ext` relations of the level above
//! refer to.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::catalog::{BfLevel, BfType, Catalog, TypeRef};
use crate::class::{ClassEnumerator, ClassKind};
use crate::diagram::AtomicDiagram;
use crate::error::{Error, Result};
use crate::structure::{all_tuples, format_tuple, parse_tuple, Signature, Structure, Tuple};

pub struct BfStructure {
    pub levels: usize,
    pub arity_bound: usize,
    pub extension_bound: usize,
    pub class: ClassEnumerator,
    pub signature: Signature,
    pub quotients: BTreeMap<(usize, usize), BfLevel>,
    /// `(σ, β) ↦ (σ)_β` for `β < level(σ)`.
    pub proj: BTreeMap<(TypeRef, usize), TypeRef>,
    /// `(σ, ι) ↦ π_ι(σ)` with 1-based `ι`, for `|σ| ≤ arity_bound`.
    pub perm: BTreeMap<(TypeRef, Vec<usize>), TypeRef>,
    /// `(σ, γ) ↦ ext_γ(σ)` for `γ < level(σ)`.
    pub ext: BTreeMap<(TypeRef, usize), BTreeSet<TypeRef>>,
    pub diag: BTreeMap<TypeRef, AtomicDiagram>,
    structures: OnceCell<Vec<Structure>>,
}

impl Clone for BfStructure {
    fn clone(&self) -> Self {
        BfStructure {
            levels: self.levels,
            arity_bound: self.arity_bound,
            extension_bound: self.extension_bound,
            class: self.class.clone(),
            signature: self.signature.clone(),
            quotients: self.quotients.clone(),
            proj: self.proj.clone(),
            perm: self.perm.clone(),
            ext: self.ext.clone(),
            diag: self.diag.clone(),
            structures: self.structures.clone(),
        }
    }
}

impl PartialEq for BfStructure {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels
            && self.arity_bound == other.arity_bound
            && self.extension_bound == other.extension_bound
            && self.class == other.class
            && self.signature == other.signature
            && self.quotients == other.quotients
            && self.proj == other.proj
            && self.perm == other.perm
            && self.ext == other.ext
            && self.diag == other.diag
    }
}

impl fmt::Debug for BfStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<String> =
            self.quotients.iter().map(|((b, k), l)| format!("{b}:{k}={}", l.len())).collect();
        f.debug_struct("BfStructure")
            .field("levels", &self.levels)
            .field("arity_bound", &self.arity_bound)
            .field("extension_bound", &self.extension_bound)
            .field("class", &self.class)
            .field("quotients", &counts)
            .finish()
    }
}

/// Every `ι ∈ [ℓ]^j` for `j ≤ ℓ`, 1-based, shortest first.
fn index_maps(l: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=l).flat_map(move |j| all_tuples(l, j).map(|t| t.into_iter().map(|i| i + 1).collect()))
}

/// Assembles the `n`-bf-structure of `class` with arity bound `m`.
pub fn assemble(class: &ClassEnumerator, n: usize, m: usize) -> Result<BfStructure> {
    let mut catalog = Catalog::new(class.clone())?;
    assemble_from(&mut catalog, n, m)
}

/// As [`assemble`], reusing (and filling) an existing catalog.
pub fn assemble_from(catalog: &mut Catalog, n: usize, m: usize) -> Result<BfStructure> {
    let s = catalog.extension_bound();
    let signature = catalog.structures()[0].signature().clone();
    let mut b = BfStructure {
        levels: n,
        arity_bound: m,
        extension_bound: s,
        class: catalog.class().clone(),
        signature,
        quotients: BTreeMap::new(),
        proj: BTreeMap::new(),
        perm: BTreeMap::new(),
        ext: BTreeMap::new(),
        diag: BTreeMap::new(),
        structures: OnceCell::from(catalog.structures().to_vec()),
    };
    for beta in 0..=n {
        for k in 0..=b.arity_at(beta) {
            let level = catalog.level(beta, k)?.clone();
            for ty in &level.types {
                let r = ty.type_ref();
                for lower in 0..beta {
                    b.proj.insert((r, lower), catalog.project(r, lower)?);
                    b.ext.insert((r, lower), catalog.ext_set(r, lower)?);
                }
                if beta == 0 {
                    b.diag.insert(r, catalog.diagram(r)?);
                }
                if k <= m {
                    for iota in index_maps(k) {
                        let to = catalog.permute(r, &iota)?;
                        b.perm.insert((r, iota), to);
                    }
                }
            }
            b.quotients.insert((beta, k), level);
        }
    }
    Ok(b)
}

impl BfStructure {
    /// Largest arity stored at level `β`.
    pub fn arity_at(&self, beta: usize) -> usize {
        self.arity_bound + (self.levels.saturating_sub(beta)) * self.extension_bound
    }

    pub fn level(&self, beta: usize, k: usize) -> Result<&BfLevel> {
        self.quotients
            .get(&(beta, k))
            .ok_or_else(|| Error::invalid(format!("no quotient at level {beta}, arity {k} (bound {})", self.arity_at(beta))))
    }

    pub fn types(&self, beta: usize, k: usize) -> Result<Vec<TypeRef>> {
        Ok(self.level(beta, k)?.types.iter().map(BfType::type_ref).collect())
    }

    /// Every stored type, by level, arity and id.
    pub fn all_types(&self) -> impl Iterator<Item = TypeRef> + '_ {
        self.quotients.values().flat_map(|l| l.types.iter().map(BfType::type_ref))
    }

    pub fn get(&self, r: TypeRef) -> Result<&BfType> {
        self.quotients
            .get(&(r.level, r.arity))
            .and_then(|l| l.types.get(r.id))
            .ok_or_else(|| Error::UnknownType(r.to_string()))
    }

    pub fn contains(&self, r: TypeRef) -> bool {
        self.get(r).is_ok()
    }

    pub fn leq(&self, sigma: TypeRef, tau: TypeRef) -> Result<bool> {
        self.get(sigma)?;
        self.get(tau)?;
        if sigma.level != tau.level || sigma.arity != tau.arity {
            return Err(Error::invalid(format!("{sigma} and {tau} live in different quotients")));
        }
        Ok(self.quotients[&(sigma.level, sigma.arity)].leq(sigma.id, tau.id))
    }

    pub fn project(&self, sigma: TypeRef, beta: usize) -> Result<TypeRef> {
        self.get(sigma)?;
        if beta == sigma.level {
            return Ok(sigma);
        }
        if beta > sigma.level {
            return Err(Error::invalid(format!("cannot project {sigma} to level {beta}")));
        }
        self.proj.get(&(sigma, beta)).copied().ok_or_else(|| Error::Malformed(format!("no projection of {sigma} to {beta}")))
    }

    pub fn permute(&self, sigma: TypeRef, iota: &[usize]) -> Result<TypeRef> {
        self.get(sigma)?;
        if let Some(&bad) = iota.iter().find(|&&i| i == 0 || i > sigma.arity) {
            return Err(Error::invalid(format!("index {bad} out of range for arity {}", sigma.arity)));
        }
        if sigma.arity > self.arity_bound {
            return Err(Error::invalid(format!("re-arrangements are stored for arity ≤ {}", self.arity_bound)));
        }
        self.perm
            .get(&(sigma, iota.to_vec()))
            .copied()
            .ok_or_else(|| Error::Malformed(format!("no re-arrangement of {sigma} by {}", format_tuple(iota))))
    }

    pub fn ext_set(&self, sigma: TypeRef, gamma: usize) -> Result<&BTreeSet<TypeRef>> {
        self.get(sigma)?;
        if gamma >= sigma.level {
            return Err(Error::invalid(format!("ext_{gamma} needs a type of level above {gamma}, got {sigma}")));
        }
        self.ext.get(&(sigma, gamma)).ok_or_else(|| Error::Malformed(format!("no ext_{gamma} of {sigma}")))
    }

    /// `D((σ)₀)`.
    pub fn diagram(&self, sigma: TypeRef) -> Result<&AtomicDiagram> {
        let zero = self.project(sigma, 0)?;
        self.diag.get(&zero).ok_or_else(|| Error::Malformed(format!("no diagram for {zero}")))
    }

    /// Members of the class fragment, enumerated on first use.
    pub fn structures(&self) -> Result<&[Structure]> {
        if self.structures.get().is_none() {
            let all = self.class.enumerate()?;
            let _ = self.structures.set(all);
        }
        Ok(self.structures.get().expect("just set"))
    }

    /// σ's representative pair.
    pub fn rep(&self, sigma: TypeRef) -> Result<(&Structure, &Tuple)> {
        let ty = self.get(sigma)?;
        let all = self.structures()?;
        let s = all.get(ty.rep_index).ok_or_else(|| Error::Malformed(format!("{sigma} names structure {}", ty.rep_index)))?;
        Ok((s, &ty.rep_tuple))
    }

    /// The structure obtained by identifying `drop` with `keep`. Both must be
    /// types of the same quotient. Used to probe verifiers.
    pub fn merged(&self, keep: TypeRef, drop: TypeRef) -> Result<BfStructure> {
        self.get(keep)?;
        self.get(drop)?;
        if (keep.level, keep.arity) != (drop.level, drop.arity) || keep == drop {
            return Err(Error::invalid("merge needs two distinct types of one quotient"));
        }
        let map = |r: TypeRef| {
            if (r.level, r.arity) != (drop.level, drop.arity) {
                return r;
            }
            let id = if r.id == drop.id { keep.id } else { r.id };
            TypeRef::new(r.level, r.arity, if id > drop.id { id - 1 } else { id })
        };
        let mut out = self.clone();
        let level = &self.quotients[&(drop.level, drop.arity)];
        let mut types: Vec<BfType> = level.types.clone();
        types.remove(drop.id);
        for (i, ty) in types.iter_mut().enumerate() {
            ty.id = i;
        }
        let pairs: Vec<(usize, usize)> = level
            .pairs()
            .map(|(i, j)| {
                let f = |x: usize| map(TypeRef::new(drop.level, drop.arity, x)).id;
                (f(i), f(j))
            })
            .collect();
        out.quotients.insert((drop.level, drop.arity), BfLevel::new(drop.level, drop.arity, types, pairs));
        out.proj = self.proj.iter().map(|(&(s, b), &t)| ((map(s), b), map(t))).collect();
        out.perm = self.perm.iter().map(|((s, i), &t)| ((map(*s), i.clone()), map(t))).collect();
        out.ext = BTreeMap::new();
        for (&(s, g), set) in &self.ext {
            out.ext.entry((map(s), g)).or_default().extend(set.iter().map(|&t| map(t)));
        }
        out.diag = self.diag.iter().map(|(&s, d)| (map(s), d.clone())).collect();
        Ok(out)
    }

    /// Checks that every reference inside the structure names a stored type.
    pub fn check_references(&self) -> Result<()> {
        let known = |r: &TypeRef| {
            if self.contains(*r) {
                Ok(())
            } else {
                Err(Error::Malformed(format!("dangling type {r}")))
            }
        };
        for ((s, _), t) in &self.proj {
            known(s)?;
            known(t)?;
        }
        for ((s, _), t) in &self.perm {
            known(s)?;
            known(t)?;
        }
        for ((s, _), set) in &self.ext {
            known(s)?;
            set.iter().try_for_each(known)?;
        }
        for s in self.diag.keys() {
            known(s)?;
        }
        for ((b, k), level) in &self.quotients {
            if level.level != *b || level.arity != *k {
                return Err(Error::Malformed(format!("quotient {b}:{k} is labelled {}:{}", level.level, level.arity)));
            }
            if let Some((i, j)) = level.pairs().find(|&(i, j)| i >= level.len() || j >= level.len()) {
                return Err(Error::Malformed(format!("order pair {i} {j} outside quotient {b}:{k}")));
            }
        }
        Ok(())
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("bfstruct v1\n");
        out.push_str(&format!("levels {}\n", self.levels));
        out.push_str(&format!("aritybound {}\n", self.arity_bound));
        out.push_str(&format!("extbound {}\n", self.extension_bound));
        match self.class.kind {
            ClassKind::Files(_) => out.push_str(&format!("class {}\n", self.class)),
            _ => out.push_str(&format!("class {} maxsize {}\n", self.class, self.class.max_size)),
        }
        for sym in self.signature.symbols() {
            out.push_str(&format!("signature {} {}\n", sym.name, sym.arity));
        }
        for level in self.quotients.values() {
            for ty in &level.types {
                out.push_str(&format!(
                    "type {} {} {} rep {} {}\n",
                    ty.level,
                    ty.arity,
                    ty.id,
                    ty.rep_index,
                    format_tuple(&ty.rep_tuple)
                ));
            }
        }
        for level in self.quotients.values() {
            for (i, j) in level.pairs() {
                out.push_str(&format!("leq {} {} {i} {j}\n", level.level, level.arity));
            }
        }
        for ((s, b), t) in &self.proj {
            out.push_str(&format!("proj {s} {b} {t}\n"));
        }
        for ((s, iota), t) in &self.perm {
            out.push_str(&format!("perm {s} {} {t}\n", format_tuple(iota)));
        }
        for ((s, g), set) in &self.ext {
            for t in set {
                out.push_str(&format!("ext {g} {t} {s}\n"));
            }
        }
        for (s, d) in &self.diag {
            out.push_str(&format!("diag {s} {d}\n"));
        }
        out
    }

    pub fn deserialize(text: &str) -> Result<BfStructure> {
        let mut header: BTreeMap<&str, usize> = BTreeMap::new();
        let mut class: Option<ClassEnumerator> = None;
        let mut symbols: Vec<(String, usize)> = Vec::new();
        let mut types: BTreeMap<(usize, usize), Vec<BfType>> = BTreeMap::new();
        let mut pairs: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        let mut proj = BTreeMap::new();
        let mut perm = BTreeMap::new();
        let mut ext: BTreeMap<(TypeRef, usize), BTreeSet<TypeRef>> = BTreeMap::new();
        let mut diag_text: Vec<(usize, TypeRef, String)> = Vec::new();
        let mut seen_magic = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::syntax(line_no, msg.to_string());
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |w: Option<&&str>| -> Result<usize> {
                w.ok_or_else(|| bad("missing number"))?.parse().map_err(|_| bad("bad number"))
            };
            let tref = |w: Option<&&str>| -> Result<TypeRef> {
                w.ok_or_else(|| bad("missing type reference"))?.parse().map_err(|e: Error| bad(&e.to_string()))
            };
            match words[0] {
                "bfstruct" => {
                    if words.get(1) != Some(&"v1") {
                        return Err(bad("unsupported bfstruct version"));
                    }
                    seen_magic = true;
                }
                "levels" | "aritybound" | "extbound" => {
                    header.insert(words[0], num(words.get(1))?);
                }
                "class" => {
                    let kind: ClassKind = words.get(1).ok_or_else(|| bad("missing class"))?.parse().map_err(|e: Error| bad(&e.to_string()))?;
                    let max = match words.get(2) {
                        Some(&"maxsize") => num(words.get(3))?,
                        None => usize::MAX,
                        Some(_) => return Err(bad("expected `maxsize`")),
                    };
                    class = Some(ClassEnumerator::new(kind, max));
                }
                "signature" => {
                    let name = words.get(1).ok_or_else(|| bad("missing symbol"))?.to_string();
                    symbols.push((name, num(words.get(2))?));
                }
                "type" => {
                    let (level, arity, id) = (num(words.get(1))?, num(words.get(2))?, num(words.get(3))?);
                    if words.get(4) != Some(&"rep") {
                        return Err(bad("expected `rep`"));
                    }
                    let rep_index = num(words.get(5))?;
                    let rep_tuple = parse_tuple(words.get(6).ok_or_else(|| bad("missing tuple"))?)
                        .map_err(|e| bad(&e.to_string()))?;
                    if rep_tuple.len() != arity {
                        return Err(bad("representative tuple has the wrong length"));
                    }
                    let list = types.entry((level, arity)).or_default();
                    if id != list.len() {
                        return Err(bad("type ids must be dense and in order"));
                    }
                    list.push(BfType { level, arity, id, rep_index, rep_tuple });
                }
                "leq" => {
                    let key = (num(words.get(1))?, num(words.get(2))?);
                    pairs.entry(key).or_default().push((num(words.get(3))?, num(words.get(4))?));
                }
                "proj" => {
                    proj.insert((tref(words.get(1))?, num(words.get(2))?), tref(words.get(3))?);
                }
                "perm" => {
                    let iota = parse_tuple(words.get(2).ok_or_else(|| bad("missing index map"))?)
                        .map_err(|e| bad(&e.to_string()))?;
                    perm.insert((tref(words.get(1))?, iota), tref(words.get(3))?);
                }
                "ext" => {
                    let gamma = num(words.get(1))?;
                    let tau = tref(words.get(2))?;
                    ext.entry((tref(words.get(3))?, gamma)).or_default().insert(tau);
                }
                "diag" => {
                    let r = tref(words.get(1))?;
                    diag_text.push((line_no, r, words[2..].join(" ")));
                }
                other => return Err(bad(&format!("unknown directive `{other}`"))),
            }
        }
        if !seen_magic {
            return Err(Error::syntax(1, "missing `bfstruct v1` header"));
        }
        let get = |k: &str| header.get(k).copied().ok_or_else(|| Error::Malformed(format!("missing `{k}` header")));
        let signature = Signature::new(symbols)?;
        let mut diag = BTreeMap::new();
        for (line, r, text) in diag_text {
            let d = AtomicDiagram::parse(&signature, r.arity, &text).map_err(|e| Error::syntax(line, e.to_string()))?;
            diag.insert(r, d);
        }
        let mut quotients = BTreeMap::new();
        for ((b, k), list) in types {
            let p = pairs.remove(&(b, k)).unwrap_or_default();
            quotients.insert((b, k), BfLevel::new(b, k, list, p));
        }
        if let Some(((b, k), _)) = pairs.into_iter().next() {
            return Err(Error::Malformed(format!("order pairs for missing quotient {b}:{k}")));
        }
        let out = BfStructure {
            levels: get("levels")?,
            arity_bound: get("aritybound")?,
            extension_bound: get("extbound")?,
            class: class.ok_or_else(|| Error::Malformed("missing `class` header".into()))?,
            signature,
            quotients,
            proj,
            perm,
            ext,
            diag,
            structures: OnceCell::new(),
        };
        out.check_references()?;
        Ok(out)
    }
}

/// First failure found by [`verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyFailure {
    pub level: usize,
    pub arity: usize,
    pub witness: String,
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {} arity {}: {}", self.level, self.arity, self.witness)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub passed: bool,
    pub failure: Option<VerifyFailure>,
    /// Candidate type ↦ reference type, for every level matched so far.
    pub correspondence: BTreeMap<TypeRef, TypeRef>,
}

impl VerificationReport {
    pub fn render(&self) -> String {
        match &self.failure {
            None => format!("pass ({} types matched)\n", self.correspondence.len()),
            Some(f) => format!("fail {f}\n"),
        }
    }
}

/// Checks `candidate` against the `n`-bf-structure of `class`, matching
/// level 0 by diagrams and each higher level by `ext` fingerprints.
pub fn verify(candidate: &BfStructure, class: &ClassEnumerator, n: usize) -> Result<VerificationReport> {
    let mut catalog = Catalog::with_options(class.clone(), Some(candidate.extension_bound), None)?;
    verify_with(candidate, &mut catalog, n)
}

pub fn verify_with(candidate: &BfStructure, catalog: &mut Catalog, n: usize) -> Result<VerificationReport> {
    candidate.check_references()?;
    if candidate.levels != n {
        return Err(Error::invalid(format!("candidate has {} levels, expected {n}", candidate.levels)));
    }
    let reference = assemble_from(catalog, n, candidate.arity_bound)?;
    let mut map: BTreeMap<TypeRef, TypeRef> = BTreeMap::new();
    let fail = |map: BTreeMap<TypeRef, TypeRef>, level, arity, witness: String| {
        Ok(VerificationReport { passed: false, failure: Some(VerifyFailure { level, arity, witness }), correspondence: map })
    };
    if candidate.extension_bound != reference.extension_bound {
        return fail(map, 0, 0, format!("extension bound {} (expected {})", candidate.extension_bound, reference.extension_bound));
    }
    if candidate.signature != reference.signature {
        return fail(map, 0, 0, "signature differs from the class".into());
    }
    for beta in 0..=n {
        for k in 0..=reference.arity_at(beta) {
            let Ok(cand_level) = candidate.level(beta, k) else {
                return fail(map, beta, k, "quotient missing".into());
            };
            let ref_level = reference.level(beta, k)?;
            let mut used: BTreeMap<TypeRef, TypeRef> = BTreeMap::new();
            let fingerprints: BTreeMap<Vec<BTreeSet<TypeRef>>, TypeRef> = if beta == 0 {
                BTreeMap::new()
            } else {
                ref_level
                    .types
                    .iter()
                    .map(|t| {
                        let r = t.type_ref();
                        let fp = (0..beta).map(|g| reference.ext[&(r, g)].clone()).collect();
                        (fp, r)
                    })
                    .collect()
            };
            for ty in &cand_level.types {
                let sigma = ty.type_ref();
                let target = if beta == 0 {
                    let Some(d) = candidate.diag.get(&sigma) else {
                        return fail(map, beta, k, format!("{sigma} has no diagram"));
                    };
                    ref_level.types.iter().map(BfType::type_ref).find(|r| reference.diag[r] == *d)
                } else {
                    let mut fp = Vec::new();
                    for g in 0..beta {
                        let Some(set) = candidate.ext.get(&(sigma, g)) else {
                            return fail(map, beta, k, format!("{sigma} has no ext_{g}"));
                        };
                        let mut mapped = BTreeSet::new();
                        for t in set {
                            match map.get(t) {
                                Some(&r) => {
                                    mapped.insert(r);
                                }
                                None => return fail(map, beta, k, format!("ext_{g}({sigma}) names unmatched {t}")),
                            }
                        }
                        fp.push(mapped);
                    }
                    fingerprints.get(&fp).copied()
                };
                let Some(target) = target else {
                    return fail(map, beta, k, format!("no reference type matches {sigma}"));
                };
                if let Some(other) = used.insert(target, sigma) {
                    return fail(map, beta, k, format!("{other} and {sigma} both match {target}"));
                }
                map.insert(sigma, target);
            }
            if let Some(missing) = ref_level.types.iter().map(BfType::type_ref).find(|r| !used.contains_key(r)) {
                return fail(map, beta, k, format!("reference type {missing} has no counterpart"));
            }
            let ids = |i: usize| map[&TypeRef::new(beta, k, i)].id;
            let mapped: BTreeSet<(usize, usize)> = cand_level.pairs().map(|(i, j)| (ids(i), ids(j))).collect();
            let wanted: BTreeSet<(usize, usize)> = ref_level.pairs().collect();
            if let Some(&(i, j)) = mapped.symmetric_difference(&wanted).next() {
                let back = |x: usize| used[&TypeRef::new(beta, k, x)];
                return fail(map, beta, k, format!("order differs on {} ≤ {}", back(i), back(j)));
            }
            for ty in &cand_level.types {
                let sigma = ty.type_ref();
                for lower in 0..beta {
                    let got = candidate.proj.get(&(sigma, lower)).and_then(|t| map.get(t));
                    let want = reference.proj[&(map[&sigma], lower)];
                    if got != Some(&want) {
                        return fail(map, beta, k, format!("projection of {sigma} to level {lower} is wrong"));
                    }
                }
                if k <= candidate.arity_bound {
                    for iota in index_maps(k) {
                        let got = candidate.perm.get(&(sigma, iota.clone())).and_then(|t| map.get(t));
                        let want = reference.perm[&(map[&sigma], iota.clone())];
                        if got != Some(&want) {
                            return fail(map, beta, k, format!("re-arrangement of {sigma} by {} is wrong", format_tuple(&iota)));
                        }
                    }
                }
            }
        }
    }
    Ok(VerificationReport { passed: true, failure: None, correspondence: map })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_linear_orders() {
        let b = assemble(&ClassEnumerator::linear_orders(3), 1, 1).unwrap();
        assert_eq!(b.level(0, 0).unwrap().len(), 1);
        assert_eq!(b.level(1, 0).unwrap().len(), 3);
        assert_eq!(b.arity_at(0), 4);
        assert!(verify(&b, &ClassEnumerator::linear_orders(3), 1).unwrap().passed);
    }

    #[test]
    fn level_zero_only() {
        let b = assemble(&ClassEnumerator::equivalence_structures(2), 0, 2).unwrap();
        assert!(b.ext.is_empty() && b.proj.is_empty());
        assert_eq!(b.level(0, 2).unwrap().len(), 3);
    }

    #[test]
    fn text_round_trip() {
        let b = assemble(&ClassEnumerator::linear_orders(2), 1, 1).unwrap();
        let text = b.serialize();
        let back = BfStructure::deserialize(&text).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.serialize(), text);
        let dangling = text.replace("proj 1:0:1 0 0:0:0", "proj 1:0:1 0 0:0:9");
        assert!(matches!(BfStructure::deserialize(&dangling), Err(Error::Malformed(_))));
    }

    #[test]
    fn merge_is_detected() {
        let class = ClassEnumerator::linear_orders(3);
        let b = assemble(&class, 1, 1).unwrap();
        let m = b.merged(TypeRef::new(1, 0, 0), TypeRef::new(1, 0, 1)).unwrap();
        assert_eq!(m.level(1, 0).unwrap().len(), 2);
        let report = verify(&m, &class, 1).unwrap();
        assert!(!report.passed);
        assert_eq!(report.failure.unwrap().level, 1);
    }
}
