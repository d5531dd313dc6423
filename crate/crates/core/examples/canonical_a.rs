//! The offset `a` that maximises the initial budget `w₀`, across `r*`.

use online_fdx::boost::{canonical_a, SupLordParams};

fn main() -> online_fdx::Result<()> {
    println!("{:>4} {:>12} {:>12} {:>12}", "r*", "a", "w0(a)", "w0(a=1)");
    for r_star in [1, 5, 10, 15, 20, 30, 50, 100] {
        let a = canonical_a(0.15, 0.05, r_star)?;
        let best = SupLordParams::with_canonical_a(0.15, 0.05, r_star)?;
        let unit = SupLordParams::new(0.15, 0.05, r_star, 1.0)
            .map(|p| format!("{:12.6}", p.w0()))
            .unwrap_or_else(|_| format!("{:>12}", "infeasible"));
        println!("{r_star:>4} {a:>12.6} {:>12.6} {unit}", best.w0());
    }
    Ok(())
}
