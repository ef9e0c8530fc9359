//! Number of ≡ₙ classes of k-tuples realized in a class fragment.

use bfcalc::catalog::Catalog;
use bfcalc::class::ClassEnumerator;

fn main() -> bfcalc::error::Result<()> {
    for class in [ClassEnumerator::linear_orders(4), ClassEnumerator::equivalence_structures(3), ClassEnumerator::graphs(3)] {
        let mut cat = Catalog::new(class.clone())?;
        println!("{class} <= {}", class.max_size);
        for k in 0..=2 {
            let counts = (0..=3).map(|n| cat.count_classes(n, k)).collect::<Result<Vec<_>, _>>()?;
            println!("  k={k}: {counts:?}");
        }
    }
    Ok(())
}
