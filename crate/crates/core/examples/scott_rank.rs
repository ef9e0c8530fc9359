use bfcalc::class::{equivalence_structure, linear_order};
use bfcalc::rank::scott_rank;

fn main() -> bfcalc::error::Result<()> {
    for n in 1..=4 {
        let r = scott_rank(&linear_order(n)?, None)?;
        println!("SR(LO({n})) = {}  attained at {:?}", r.sr, r.argmax);
    }
    let e = equivalence_structure(&[2, 1])?;
    print!("{}", scott_rank(&e, None)?.render());
    Ok(())
}
