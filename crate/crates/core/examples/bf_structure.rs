//! Assemble the bf-structure of a class, round-trip it through text, and
//! watch the verifier reject a corrupted copy.

use bfcalc::bfstruct::{assemble, verify, BfStructure};
use bfcalc::class::ClassEnumerator;

fn main() -> bfcalc::error::Result<()> {
    let class = ClassEnumerator::equivalence_structures(3);
    let bfs = assemble(&class, 2, 1)?;
    for beta in 0..=2 {
        let sizes: Vec<usize> = (0..=bfs.arity_at(beta).min(3)).map(|k| bfs.types(beta, k).map_or(0, |t| t.len())).collect();
        println!("level {beta}: arity bound {} types by arity {sizes:?}", bfs.arity_at(beta));
    }
    let text = bfs.serialize();
    println!("{} lines of text", text.lines().count());
    let back = BfStructure::deserialize(&text)?;
    print!("{}", verify(&back, &class, 2)?.render());

    let top = bfs.types(2, 0)?;
    let merged = bfs.merged(top[0], top[1])?;
    print!("merged {} into {}: {}", top[1], top[0], verify(&merged, &class, 2)?.render());
    Ok(())
}
