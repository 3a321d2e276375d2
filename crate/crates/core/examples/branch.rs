//! Sign-changing branch on both sides of `λ₀`: seeded near the predicted rate, continued
//! towards `λ₀`, and the fitted `δ/|ε|` compared with both rate laws.
//!
//! ```text
//! cargo run --release --example branch
//! ```

use bn6::branch_tracker::{continue_branch, fit_blowup_rate, geometric_targets, remainder_slope, seed_branch_from};
use bn6::critical_data::{assumption_report, RecomputedLaw};
use bn6::{DomainBall, Settings};

fn main() -> bn6::Result<()> {
    let settings = Settings::default();
    let data = assumption_report(&DomainBall::unit(), &settings)?;
    let (gs, v0, c) = (&data.ground_state, &data.v0, &data.constants);
    let law = RecomputedLaw::new(c);
    let theorem = data.report.theorem_case.sign();

    for (label, sign, d) in [("theorem case", theorem, c.d0), ("opposite sign", -theorem, law.d_star)] {
        println!("\n{label}: eps sign {sign:+}, seeded at d = {d:.6}");
        let seed = match seed_branch_from(gs, v0, d, sign * 1e-2, &settings) {
            Ok(p) => p,
            Err(e) => {
                println!("  {e}");
                continue;
            }
        };
        let targets = geometric_targets(seed.eps, sign * 10f64.powf(-3.5), 4);
        let mut points = continue_branch(seed, &targets, gs, v0, &settings)?;
        points.dedup_by(|a, b| a.eps == b.eps);
        println!("{:>12} {:>14} {:>12} {:>12}", "eps", "delta", "delta/|eps|", "phi proxy");
        for p in &points {
            println!(
                "{:>12.4e} {:>14.6e} {:>12.6} {:>12.3e}",
                p.eps,
                p.delta_extracted,
                p.delta_over_abs_eps(),
                p.phi_norm_proxy
            );
        }
        match fit_blowup_rate(&points, c.d0) {
            Ok(f) => println!(
                "  d fitted {:.6} (d0 = {:.6}, d* = {:.6}), r^2 = {:.6}",
                f.d_fitted, c.d0, law.d_star, f.r_squared
            ),
            Err(e) => println!("  {e}"),
        }
        if let Some(s) = remainder_slope(&points) {
            println!("  remainder slope {s:.3}");
        }
    }
    Ok(())
}
