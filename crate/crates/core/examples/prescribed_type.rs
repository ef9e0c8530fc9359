//! Build structures realizing each 2-type of a single element over linear
//! orders of size at most 3.

use bfcalc::bfstruct::assemble;
use bfcalc::builder::{build_with_type, check_typed_chain, BuildBudget};
use bfcalc::class::ClassEnumerator;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bfs = assemble(&ClassEnumerator::linear_orders(3), 2, 1)?;
    let budget = BuildBudget::new(8, 8, bfs.structures()?.len())?;
    for sigma in bfs.types(2, 1)? {
        let out = build_with_type(&bfs, sigma, budget)?;
        let audit = check_typed_chain(&out.chain, &bfs, sigma)?;
        println!(
            "{sigma}: size {} tuple {:?} {} ({} stages, {} violations)",
            out.structure.size(),
            out.tuple,
            out.comparison,
            out.chain.stages.len(),
            audit.violations()
        );
    }
    Ok(())
}
