//! The language L_α over linear orders: definitions of φ_σ, the theory
//! T_α, and expansions.

use bfcalc::bfstruct::assemble;
use bfcalc::class::{linear_order, ClassEnumerator};
use bfcalc::extlang::{expand, extended_diagram, phi_def, psi_def, sigma1_theory, t_alpha, ExtendedSignature};
use bfcalc::formula::{classify, holds};

fn main() -> bfcalc::error::Result<()> {
    let bfs = assemble(&ClassEnumerator::linear_orders(3), 2, 1)?;
    let sig = ExtendedSignature::of(&bfs);
    println!("{} extended predicates", sig.predicates.len());

    let sigma = bfs.types(1, 0)?[0];
    let phi = phi_def(&bfs, sigma, false)?;
    println!("φ_{sigma} has {} nodes", phi.size());
    let flat = phi_def(&bfs, sigma, true)?;
    println!("expanded: {} nodes, {}", flat.size(), classify(&flat));
    for n in 1..=3 {
        println!("  LO({n}) ⊨ φ_{sigma}: {}", holds(&linear_order(n)?, &flat)?);
    }
    println!("ψ_{sigma} = {}", psi_def(&bfs, sigma)?);

    let t = t_alpha(&bfs)?;
    println!("T_2: {} sentences", t.len());
    for n in 1..=3 {
        let m = expand(&linear_order(n)?, &bfs)?;
        println!("  LO({n}) expansion satisfies T_2: {}", t.first_failure(&m)?.is_none());
        println!("  Σ1 profile {}", sigma1_theory(&m, 3)?.render().chars().take(40).collect::<String>());
    }

    let tau = bfs.types(2, 1)?[1];
    println!("D({tau}) = {}", extended_diagram(&bfs, tau)?.base);
    Ok(())
}
