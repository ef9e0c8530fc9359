//! Henkin construction for "linear order without a maximum" over finite
//! linear orders.

use bfcalc::builder::{check_chain, henkin_build, BuildBudget};
use bfcalc::class::ClassEnumerator;
use bfcalc::formula::Theory;

const THEORY: &str = "\
# theory dlo-no-max
(forall (x) (not (atom < x x))) # irreflexive
(forall (x y z) (or (not (atom < x y)) (not (atom < y z)) (atom < x z))) # transitive
(forall (x y) (or (atom < x y) (= x y) (atom < y x))) # total
(forall (x) (exists (y) (atom < x y))) # no maximum
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = Theory::parse(THEORY)?;
    let class = ClassEnumerator::linear_orders(24);
    let chain = henkin_build(&t, &class, BuildBudget::new(20, 24, 24)?, 0)?;
    for (s, st) in chain.stages.iter().enumerate().take(5) {
        println!("stage {} handles axiom {} at {:?} using member {}", s + 1, st.pair.0, st.pair.1, st.witness);
    }
    println!("final size {}, frontier {:?}", chain.final_structure().size(), chain.frontier);
    print!("{}", check_chain(&chain, &t)?.render());
    Ok(())
}
