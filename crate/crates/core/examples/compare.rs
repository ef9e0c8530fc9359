//! ≤ₙ between finite linear orders, with and without parameters.

use bfcalc::class::linear_order;
use bfcalc::engine::bf_compare;

fn main() -> bfcalc::error::Result<()> {
    let lo: Vec<_> = (1..=4).map(linear_order).collect::<Result<_, _>>()?;
    for n in 0..=3 {
        print!("n={n}:");
        for a in &lo {
            for b in &lo {
                print!(" {}", short(bf_compare(a, &[], b, &[], n)?));
            }
            print!(" |");
        }
        println!();
    }
    // the least element of LO(3) against the middle one
    let c = bf_compare(&lo[2], &[0], &lo[2], &[1], 1)?;
    println!("(LO(3), 0) vs (LO(3), 1) at level 1: {c}");
    Ok(())
}

fn short(c: bfcalc::engine::Comparison) -> &'static str {
    use bfcalc::engine::Comparison::*;
    match c {
        Leq => "<=",
        Geq => ">=",
        Equiv => "==",
        Incomparable => "<>",
    }
}
