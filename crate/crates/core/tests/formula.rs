use bfcalc::formula::{classify, eval, holds, Formula, RankClass, RankKind, Term, Theory};
use bfcalc::structure::{Signature, Structure};
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn term() -> impl Strategy<Value = Term> {
    (0usize..3).prop_map(|i| Term::var(VARS[i]))
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (term(), term()).prop_map(|(a, b)| Formula::atom("E", vec![a, b])),
        (term(), term()).prop_map(|(a, b)| Formula::Eq(a, b)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(Formula::And),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(Formula::Or),
            (0usize..3, inner.clone()).prop_map(|(i, f)| Formula::forall(vec![VARS[i].into()], f)),
            (0usize..3, inner).prop_map(|(i, f)| Formula::exists(vec![VARS[i].into()], f)),
        ]
    })
}

fn graph() -> impl Strategy<Value = Structure> {
    (1usize..=3).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..6).prop_map(move |es| {
            let mut s = Structure::new(Signature::new([("E", 2)]).unwrap(), n).unwrap();
            for (a, b) in es {
                s.set(0, &[a, b], true).unwrap();
            }
            s
        })
    })
}

fn close(f: Formula) -> Formula {
    Formula::forall(VARS.iter().map(|v| v.to_string()).collect(), f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_round_trip(f in formula()) {
        prop_assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn nnf_preserves_truth(f in formula(), g in graph()) {
        let n = f.nnf();
        prop_assert_eq!(holds(&g, &close(f.clone())).unwrap(), holds(&g, &close(n.clone())).unwrap());
        prop_assert!(!n.to_string().contains("(not (and") && !n.to_string().contains("(not (forall"));
    }

    #[test]
    fn negation_dualizes_rank(f in formula()) {
        let (a, b) = (classify(&f), classify(&Formula::not(f.clone())));
        match a.kind {
            RankKind::Delta0 => prop_assert_eq!(b, RankClass::DELTA0),
            RankKind::Sigma => prop_assert_eq!(b, RankClass::pi(a.level)),
            // ties between Σₙ and Πₙ are labelled Π on both sides
            RankKind::Pi => prop_assert!(b == RankClass::sigma(a.level) || b == a),
        }
        prop_assert_eq!(classify(&Formula::not(Formula::not(f))), a);
    }
}

#[test]
fn evaluation_basics() {
    let mut g = Structure::new(Signature::new([("E", 2)]).unwrap(), 2).unwrap();
    g.set(0, &[0, 1], true).unwrap();
    let f = Formula::parse("(exists (y) (atom E x y))").unwrap();
    assert!(eval(&g, &f, &[("x".into(), 0)]).unwrap());
    assert!(!eval(&g, &f, &[("x".into(), 1)]).unwrap());
    assert!(eval(&g, &f, &[]).is_err());
    assert!(Formula::parse("(atom E x").is_err());
    assert_eq!(Formula::parse("(exists () (= x x))").unwrap(), Formula::parse("(= x x)").unwrap());
}

#[test]
fn theory_files() {
    let t = Theory::parse("# comment\n(forall (x) (not (atom E x x))) # loopless\n\n").unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t.sentences[0].1, "loopless");
    assert_eq!(Theory::parse(&t.serialize()).unwrap(), t);
    assert!(Theory::parse("(atom E x x)\n").is_err());
}
