use bfcalc::catalog::{count_classes, types_at_level, Catalog, TypeRef};
use bfcalc::class::{linear_order, ClassEnumerator};
use bfcalc::engine::bf_leq;
use bfcalc::structure::all_tuples;

#[test]
fn representatives_realize_their_types() {
    let mut cat = Catalog::new(ClassEnumerator::equivalence_structures(3)).unwrap();
    for n in 0..=2 {
        for k in 0..=2 {
            for ty in cat.types(n, k).unwrap().to_vec() {
                assert_eq!(cat.type_of(n, ty.rep_index, &ty.rep_tuple).unwrap(), ty.type_ref());
            }
        }
    }
}

#[test]
fn order_matches_engine() {
    let class = ClassEnumerator::graphs(3);
    let all = class.enumerate().unwrap();
    let mut cat = Catalog::new(class).unwrap();
    for k in 0..=1 {
        let types: Vec<_> = cat.types(2, k).unwrap().to_vec();
        for s in &types {
            for t in &types {
                let want = bf_leq(&all[s.rep_index], &s.rep_tuple, &all[t.rep_index], &t.rep_tuple, 2).unwrap();
                assert_eq!(cat.leq(s.type_ref(), t.type_ref()).unwrap(), want);
            }
        }
    }
}

#[test]
fn projections_and_permutations_commute_with_members() {
    let class = ClassEnumerator::linear_orders(3);
    let all = class.enumerate().unwrap();
    let mut cat = Catalog::new(class).unwrap();
    for (i, s) in all.iter().enumerate() {
        for t in all_tuples(s.size(), 2) {
            let sigma = cat.type_of(2, i, &t).unwrap();
            assert_eq!(cat.project(sigma, 1).unwrap(), cat.type_of(1, i, &t).unwrap());
            let swapped = vec![t[1], t[0]];
            assert_eq!(cat.permute(sigma, &[2, 1]).unwrap(), cat.type_of(2, i, &swapped).unwrap());
            assert_eq!(cat.permute(sigma, &[1]).unwrap(), cat.type_of(2, i, &t[..1]).unwrap());
        }
    }
}

#[test]
fn classify_outside_the_fragment() {
    let mut cat = Catalog::new(ClassEnumerator::linear_orders(3)).unwrap();
    let lo5 = linear_order(5).unwrap();
    let ty = cat.classify(2, &lo5, &[]).unwrap();
    assert_eq!(ty, None);
    let lo2 = linear_order(2).unwrap();
    assert_eq!(cat.classify(1, &lo2, &[]).unwrap(), Some(TypeRef::new(1, 0, 1)));
    assert!(cat.classify(1, &lo2, &[9]).is_err());
}

#[test]
fn counts() {
    assert_eq!(count_classes(&ClassEnumerator::linear_orders(3), 1, 0).unwrap(), 3);
    assert_eq!(count_classes(&ClassEnumerator::linear_orders(3), 0, 0).unwrap(), 1);
    let level = types_at_level(&ClassEnumerator::linear_orders(3), 1, 1, 3).unwrap();
    assert!(level.is_partial_order());
    assert!(types_at_level(&ClassEnumerator::linear_orders(3), 1, 2, 1).is_err());
}

#[test]
fn ext_sets_are_downward_closed() {
    let mut cat = Catalog::new(ClassEnumerator::equivalence_structures(3)).unwrap();
    let sigma = cat.types(2, 0).unwrap()[2].type_ref();
    for gamma in 0..2 {
        let ext = cat.ext_set(sigma, gamma).unwrap();
        for &tau in &ext {
            for other in cat.types(gamma, tau.arity).unwrap().to_vec() {
                let o = other.type_ref();
                if cat.leq(o, tau).unwrap() {
                    assert!(ext.contains(&o));
                }
            }
        }
    }
    assert!(cat.ext_set(sigma, 2).is_err());
}
