//! Energy of the ansatz against the reduced-energy law at a few `(ε, d)`.
//!
//! ```text
//! cargo run --release --example expansion
//! ```

use std::time::Instant;

use bn6::critical_data::{assumption_report, RecomputedLaw};
use bn6::energy_expansion::{expansion_sample, i_term_audit};
use bn6::{DomainBall, Settings};

fn main() -> bn6::Result<()> {
    let settings = Settings::default();
    let data = assumption_report(&DomainBall::unit(), &settings)?;
    let (gs, v0, c) = (&data.ground_state, &data.v0, &data.constants);
    let sign = data.report.theorem_case.sign();
    let law = RecomputedLaw::new(c);
    println!("d0 = {:.6e}, recomputed d* = {:.6e}", c.d0, law.d_star);
    println!("{:>10} {:>8} {:>14} {:>14} {:>14} {:>10}", "eps", "d/d0", "measured", "law", "recomputed", "seconds");
    for eps in [1e-2, 10f64.powf(-2.5), 1e-3] {
        for m in [0.5, 1.0, 2.0] {
            let t = Instant::now();
            let s = expansion_sample(gs, v0, c, sign * eps, m * c.d0, &settings)?;
            println!(
                "{:>10.3e} {:>8.2} {:>14.6e} {:>14.6e} {:>14.6e} {:>10.2}",
                s.eps,
                m,
                s.upsilon_measured,
                s.upsilon_predicted,
                law.upsilon(s.d, s.eps),
                t.elapsed().as_secs_f64()
            );
        }
    }
    let t = Instant::now();
    let terms = i_term_audit(gs, v0, sign * 1e-3, c.d0, &settings)?;
    println!("I-terms at eps = 1e-3 ({:.2}s): {terms:?}", t.elapsed().as_secs_f64());
    println!("I4/(eps^3 d^2) = {:.6e}, I5/(|eps|^3 d^3) = {:.6e}", terms.i4_ratio(), terms.i5_ratio());
    Ok(())
}
