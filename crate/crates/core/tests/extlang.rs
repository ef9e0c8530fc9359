use bfcalc::bfstruct::{assemble, BfStructure};
use bfcalc::catalog::TypeRef;
use bfcalc::class::{equivalence_structure, linear_order, ClassEnumerator};
use bfcalc::engine::bf_leq;
use bfcalc::error::Error;
use bfcalc::extlang::{
    expand, extended_diagram, phi_def, sigma1_sentences, sigma1_theory, t_alpha, t_alpha_sigma, ExtendedDiagram,
};
use bfcalc::formula::{classify, eval, Formula, Theory, WithConstants};
use bfcalc::structure::all_tuples;
use proptest::prelude::*;

fn equiv_bfs() -> BfStructure {
    assemble(&ClassEnumerator::equivalence_structures(3), 2, 1).unwrap()
}

fn env(t: &[usize]) -> Vec<(String, usize)> {
    t.iter().enumerate().map(|(i, &x)| (format!("x{}", i + 1), x)).collect()
}

#[test]
fn stored_and_observed_extended_diagrams_agree() {
    let bfs = equiv_bfs();
    for tau in bfs.all_types().filter(|t| t.arity <= bfs.arity_bound) {
        let (rep, rt) = bfs.rep(tau).unwrap();
        let m = expand(rep, &bfs).unwrap();
        let observed = ExtendedDiagram::of(&m, rt, tau.level).unwrap();
        assert_eq!(extended_diagram(&bfs, tau).unwrap(), observed, "{tau}");
    }
}

#[test]
fn expanded_definitions_are_base_formulas_of_the_right_rank() {
    let bfs = assemble(&ClassEnumerator::linear_orders(3), 2, 1).unwrap();
    for sigma in bfs.all_types().filter(|t| t.level <= 1 && t.arity <= 1) {
        let f = phi_def(&bfs, sigma, true).unwrap();
        assert!(classify(&f).within_pi(sigma.level), "{sigma}: {}", classify(&f));
        let (rep, rt) = bfs.rep(sigma).unwrap();
        for a in bfs.structures().unwrap() {
            for t in all_tuples(a.size(), sigma.arity) {
                assert_eq!(eval(a, &f, &env(&t)).unwrap(), bf_leq(rep, rt, a, &t, sigma.level).unwrap());
            }
        }
    }
}

#[test]
fn theory_shape() {
    let bfs = equiv_bfs();
    let t = t_alpha(&bfs).unwrap();
    assert!(t.formulas().all(|f| f.is_sentence() && classify(f).within_pi(2)));
    let tags: std::collections::BTreeSet<&str> = t.sentences.iter().map(|(_, g)| g.as_str()).collect();
    for tag in ["T1-total", "T1-unique", "T2-base", "T2-rec", "T3"] {
        assert!(tags.contains(tag), "{tag}");
    }
    assert_eq!(Theory::parse(&t.serialize()).unwrap(), t);
}

#[test]
fn typed_theory_holds_at_representatives() {
    let bfs = equiv_bfs();
    for sigma in bfs.types(2, 1).unwrap() {
        let t = t_alpha_sigma(&bfs, sigma).unwrap();
        assert_eq!(t.sentences[0].1, "T-sigma-phi");
        let (rep, rt) = bfs.rep(sigma).unwrap();
        let m = expand(rep, &bfs).unwrap();
        let with = WithConstants { model: &m, constants: rt };
        assert_eq!(t.first_failure(&with).unwrap(), None, "{sigma}");
        let other = bfs.types(2, 1).unwrap().into_iter().find(|&s| s != sigma).unwrap();
        let (orep, ort) = bfs.rep(other).unwrap();
        let om = expand(orep, &bfs).unwrap();
        let owith = WithConstants { model: &om, constants: ort };
        assert!(t.first_failure(&owith).unwrap().is_some());
    }
}

#[test]
fn expansion_errors() {
    let bfs = equiv_bfs();
    assert!(matches!(expand(&linear_order(2).unwrap(), &bfs), Err(Error::SignatureMismatch)));
    let m = expand(&equivalence_structure(&[2]).unwrap(), &bfs).unwrap();
    assert!(matches!(m.phi(TypeRef::new(9, 0, 0), &[]), Err(Error::UnknownPredicate(_))));
    let one = bfs.types(1, 1).unwrap()[0];
    assert!(matches!(m.phi(one, &[]), Err(Error::ArityMismatch { .. })));
    assert!(matches!(m.phi(one, &[7]), Err(Error::OutOfRange { .. })));
    let f = Formula::parse("(atom phi_1_1_0 @0)").unwrap();
    assert!(eval(&WithConstants { model: &m, constants: &[0] }, &f, &[]).is_ok());
}

#[test]
fn sigma1_profiles_separate_small_orders() {
    let bfs = assemble(&ClassEnumerator::linear_orders(3), 1, 0).unwrap();
    let a = sigma1_theory(&expand(&linear_order(1).unwrap(), &bfs).unwrap(), 3).unwrap();
    let b = sigma1_theory(&expand(&linear_order(2).unwrap(), &bfs).unwrap(), 3).unwrap();
    assert_ne!(a, b);
    let list = sigma1_sentences(&bfs, 3).unwrap();
    assert_eq!(list.len(), a.bits.len());
    let sizes: Vec<usize> = list.iter().map(|s| s.vars + s.literals.len()).collect();
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sigma1_profile_is_isomorphism_invariant(blocks in proptest::collection::vec(1usize..3, 1..3), seed in 0usize..6) {
        let bfs = assemble(&ClassEnumerator::equivalence_structures(4), 1, 0).unwrap();
        let s = equivalence_structure(&blocks).unwrap();
        let n = s.size();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left(seed % n);
        let relabelled = s.relabel(&perm);
        let x = sigma1_theory(&expand(&s, &bfs).unwrap(), 3).unwrap();
        let y = sigma1_theory(&expand(&relabelled, &bfs).unwrap(), 3).unwrap();
        prop_assert_eq!(x, y);
    }
}
