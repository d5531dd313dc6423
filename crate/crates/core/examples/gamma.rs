//! The default spending sequence.

use online_fdx::schedule::{default_gamma, default_gamma_infinite_mass, default_gamma_with, GammaNormalization};

fn main() -> online_fdx::Result<()> {
    let g = default_gamma(1000)?;
    for i in [1, 2, 3, 10, 100, 1000] {
        println!("gamma_{i:<5} = {:.6e}", g.get(i));
    }
    println!("sum over horizon = {:.12}", g.total());

    let inf = default_gamma_with(1000, GammaNormalization::Infinite)?;
    println!("series mass = {:.6}", default_gamma_infinite_mass());
    println!("infinite-normalised mass within 1000 steps = {:.6}", inf.total());
    Ok(())
}
