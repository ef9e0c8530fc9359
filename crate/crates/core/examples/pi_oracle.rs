//! Π-type inclusion through characteristic formulas, checked against the
//! game engine.

use bfcalc::class::{linear_order, ClassEnumerator};
use bfcalc::engine::bf_leq;
use bfcalc::formula::classify;
use bfcalc::oracle::PiOracle;

fn main() -> bfcalc::error::Result<()> {
    let oracle = PiOracle::new(&ClassEnumerator::linear_orders(3))?;
    let lo2 = linear_order(2)?;
    let lo3 = linear_order(3)?;
    let chi = oracle.characteristic_formula(&lo2, &[], 2)?;
    println!("χ for (LO(2), ∅) at level 2 has {} nodes, rank {}", chi.size(), classify(&chi));
    for n in 1..=3 {
        for (a, b, label) in [(&lo2, &lo3, "LO(2) ≤ LO(3)"), (&lo3, &lo2, "LO(3) ≤ LO(2)")] {
            let via_formulas = oracle.included(a, &[], b, &[], n)?;
            println!("n={n} {label}: oracle {via_formulas}, engine {}", bf_leq(a, &[], b, &[], n)?);
        }
    }
    Ok(())
}
