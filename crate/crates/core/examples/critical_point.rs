//! The critical parameter `λ₀ = 2u₀(0)`, the nondegeneracy spectra, `v₀` and the constants of
//! the reduced energy.
//!
//! ```text
//! cargo run --release --example critical_point
//! ```

use bn6::critical_data::{assumption_report, RecomputedLaw};
use bn6::{DomainBall, Settings};

fn main() -> bn6::Result<()> {
    let settings = Settings::default();
    let data = assumption_report(&DomainBall::unit(), &settings)?;
    let rep = &data.report;
    println!("lambda0 = {:.15} (|lambda0 - 2u0(0)| = {:.2e})", rep.lambda0, rep.fixed_point_residual);
    println!("brackets of lambda - 2u(0): {:?}", rep.lambda0_brackets);

    println!("\nsector  min |mu|");
    for (ell, mu) in &rep.nondegeneracy.per_sector {
        println!("{ell:>6}  {mu:.6e}");
    }
    println!("nondegenerate: {} (margin {:.4})", rep.nondegenerate, rep.nondegeneracy.margin);

    let c = &data.constants;
    println!("\nu0(0) = {:.12}, v0(0) = {:.12}, 1 - 2v0(0) = {:.9}", c.u0_max, c.v0_at_center, c.sign_condition);
    println!("case: {}", rep.theorem_case.as_str());
    println!("a1 = {:.6e}, a2 = {:.6e}, a3 = {:.6e}", c.a1, c.a2, c.a3);
    println!("d0 = {:.9}, R0 = {:.9}", c.d0, c.r0);

    let law = RecomputedLaw::new(c);
    println!(
        "recollected law: a3* = {:.6e}, maximum for sign(eps) = {:+}, d* = {:.9}",
        law.a3, law.admissible_sign, law.d_star
    );
    Ok(())
}
