//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use bfcalc::oracle::PiOracle;
use bfcalc::structure::{all_tuples, Structure, Tuple};

/// Atomic diagram bits over `L↾|t|`, computed directly.
pub fn diagram_bits(s: &Structure, t: &[usize]) -> Vec<bool> {
    let k = t.len();
    let mut bits = Vec::new();
    for i in 0..k {
        for j in 0..k {
            bits.push(t[i] == t[j]);
        }
    }
    let sig = s.signature();
    for (idx, sym) in sig.symbols().iter().enumerate().take(k.min(sig.len())) {
        for args in all_tuples(k, sym.arity) {
            let image: Vec<usize> = args.iter().map(|&i| t[i]).collect();
            bits.push(s.holds(idx, &image));
        }
    }
    bits
}

/// Textbook `≤ₙ`: every extension `d̄` of length `0..=max_ext` (repeats
/// allowed) is answered by some `c̄` at every level `γ < n`.
pub struct Reference<'a> {
    pub structures: &'a [Structure],
    pub max_ext: usize,
    dsets: HashMap<(usize, Tuple), usize>,
    dset_ids: HashMap<Vec<Vec<bool>>, usize>,
    subset: HashMap<(usize, usize), bool>,
    memo: HashMap<(usize, usize, Tuple, usize, Tuple), bool>,
    sets: Vec<Vec<Vec<bool>>>,
}

impl<'a> Reference<'a> {
    pub fn new(structures: &'a [Structure], max_ext: usize) -> Self {
        Reference {
            structures,
            max_ext,
            dsets: HashMap::new(),
            dset_ids: HashMap::new(),
            subset: HashMap::new(),
            memo: HashMap::new(),
            sets: Vec::new(),
        }
    }

    fn extensions(&self, size: usize) -> Vec<Tuple> {
        (0..=self.max_ext).flat_map(|m| all_tuples(size, m)).collect()
    }

    /// Id of `{diagram(t·e) : e}`.
    fn dset(&mut self, s: usize, t: &[usize]) -> usize {
        if let Some(&id) = self.dsets.get(&(s, t.to_vec())) {
            return id;
        }
        let st = &self.structures[s];
        let mut set: Vec<Vec<bool>> = self
            .extensions(st.size())
            .into_iter()
            .map(|e| {
                let mut full = t.to_vec();
                full.extend(e);
                diagram_bits(st, &full)
            })
            .collect();
        set.sort();
        set.dedup();
        let next = self.dset_ids.len();
        let id = *self.dset_ids.entry(set.clone()).or_insert_with(|| {
            self.sets.push(set);
            next
        });
        self.dsets.insert((s, t.to_vec()), id);
        id
    }

    fn included(&mut self, small: usize, big: usize) -> bool {
        if let Some(&v) = self.subset.get(&(small, big)) {
            return v;
        }
        let (a, b) = (&self.sets[small], &self.sets[big]);
        let v = a.iter().all(|x| b.binary_search(x).is_ok());
        self.subset.insert((small, big), v);
        v
    }

    /// `(A_a, ā) ≤ₙ (A_b, b̄)`.
    pub fn leq(&mut self, a: usize, at: &[usize], b: usize, bt: &[usize], n: usize) -> bool {
        if at.len() != bt.len() {
            return false;
        }
        if n == 0 {
            return diagram_bits(&self.structures[a], at) == diagram_bits(&self.structures[b], bt);
        }
        if n == 1 {
            let (da, db) = (self.dset(a, at), self.dset(b, bt));
            return self.included(db, da);
        }
        let key = (n, a, at.to_vec(), b, bt.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut v = self.leq(a, at, b, bt, n - 1);
        if v {
            let ea = self.extensions(self.structures[a].size());
            let eb = self.extensions(self.structures[b].size());
            'outer: for d in &eb {
                let mut bd = bt.to_vec();
                bd.extend(d);
                for c in ea.iter().filter(|c| c.len() == d.len()) {
                    let mut ac = at.to_vec();
                    ac.extend(c);
                    if self.leq(b, &bd, a, &ac, n - 1) {
                        continue 'outer;
                    }
                }
                v = false;
                break;
            }
        }
        self.memo.insert(key, v);
        v
    }
}

/// Automorphism orbit of `t` by brute force over all permutations.
pub fn orbit(s: &Structure, t: &[usize]) -> Vec<Tuple> {
    let n = s.size();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute_all(&mut perm, 0, &mut |p| {
        let ok = s.signature().symbols().iter().enumerate().all(|(idx, sym)| {
            all_tuples(n, sym.arity).all(|args| {
                let image: Vec<usize> = args.iter().map(|&i| p[i]).collect();
                s.holds(idx, &args) == s.holds(idx, &image)
            })
        });
        if ok {
            out.push(t.iter().map(|&x| p[x]).collect());
        }
    });
    out.sort();
    out.dedup();
    out
}

fn permute_all(p: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
    if i == p.len() {
        f(p);
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute_all(p, i + 1, f);
        p.swap(i, j);
    }
}

/// `ρ(ā)` through Π-type inclusion and brute-force orbits.
pub fn oracle_rho(oracle: &PiOracle, s: &Structure, t: &[usize]) -> usize {
    let orb = orbit(s, t);
    let others: Vec<Tuple> = all_tuples(s.size(), t.len()).filter(|b| orb.binary_search(b).is_err()).collect();
    if others.iter().all(|b| diagram_bits(s, t) != diagram_bits(s, b)) {
        return 0;
    }
    (1..)
        .find(|&n| others.iter().all(|b| !oracle.included(s, t, s, b, n).unwrap()))
        .expect("ρ is finite")
}

/// `SR(A)` from [`oracle_rho`] over tuples of length at most `|A|`.
pub fn oracle_scott_rank(s: &Structure) -> usize {
    let oracle = PiOracle::from_structures(vec![s.clone()]);
    let mut best = 0;
    for k in 0..=s.size() {
        for t in all_tuples(s.size(), k) {
            best = best.max(oracle_rho(&oracle, s, &t));
        }
    }
    best + 1
}
