mod common;

use bfcalc::class::{equivalence_structure, linear_order, ClassEnumerator};
use bfcalc::rank::{rho, scott_rank};
use bfcalc::structure::{parse_tuple, Structure};
use bfcalc::oracle::PiOracle;

#[test]
fn linear_orders() {
    assert_eq!(scott_rank(&linear_order(1).unwrap(), None).unwrap().sr, 1);
    for n in 2..=5 {
        assert_eq!(scott_rank(&linear_order(n).unwrap(), None).unwrap().sr, 2, "LO({n})");
    }
}

#[test]
fn rho_matches_oracle_on_graphs() {
    for g in ClassEnumerator::graphs(3).enumerate().unwrap() {
        let oracle = PiOracle::from_structures(vec![g.clone()]);
        for t in bfcalc::structure::all_tuples(g.size(), 2) {
            assert_eq!(rho(&g, &t).unwrap(), common::oracle_rho(&oracle, &g, &t));
        }
    }
}

#[test]
fn render_is_parseable() {
    let e = equivalence_structure(&[2, 1]).unwrap();
    let report = scott_rank(&e, Some(2)).unwrap();
    let text = report.render();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("SR {}", report.sr));
    for line in lines {
        let w: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(w[0], "rho");
        let t = parse_tuple(w[1]).unwrap();
        assert_eq!(report.per_tuple[&t], w[2].parse::<usize>().unwrap());
    }
    assert_eq!(report.per_tuple.len(), 1 + 3 + 9);
}

#[test]
fn structure_text_round_trip() {
    let text = "signature E 2\nsize 3\nrel E 0 1\nrel E 1 0\n";
    let s = Structure::parse(text).unwrap();
    assert_eq!(s.serialize(), text);
    assert!(Structure::parse("signature E 2\nsize 0\n").is_err());
    assert!(Structure::parse("size 2\nrel E 0 1\n").is_err());
}
