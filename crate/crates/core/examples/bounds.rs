//! Guarantees implied by a SupLORD parameter choice.

use online_fdx::boost::{guarantee_summary, mfdr_safe_boosts, suplord_default_boosts, SupLordParams};

fn main() -> online_fdx::Result<()> {
    let params = SupLordParams::new(0.15, 0.05, 30, 1.0)?;
    let summary = guarantee_summary(&params, &suplord_default_boosts(&params)?)?;
    print!("{}", summary.to_key_value());

    // The same parameters with boosts that also bound mFDR and fixed-time FDR.
    let summary = guarantee_summary(&params, &mfdr_safe_boosts(&params)?)?;
    println!("\nmfdr-safe boosts: mfdr bound {:.5} active={}", summary.mfdr.bound, summary.mfdr.active);

    // FDX levels the same run controls at other confidence levels.
    for delta in [0.01, 0.05, 0.1, 0.2] {
        println!("delta={delta:<5} eps={:.4}", summary.fdx_family(delta)?);
    }
    Ok(())
}
