//! Positive radial solution at a few λ, its Morse data, the Pohozaev balance and the
//! collocation cross-check.
//!
//! ```text
//! cargo run --release --example ground_state
//! ```

use bn6::radial_bvp::{first_eigenvalue, pohozaev_audit, solve_positive, solve_positive_collocated};
use bn6::{DomainBall, Settings};

fn main() -> bn6::Result<()> {
    let dom = DomainBall::unit();
    let settings = Settings::default();
    let lambda1 = first_eigenvalue(&dom);
    println!("lambda1 = {lambda1:.12}");
    println!("{:>8} {:>16} {:>6} {:>14} {:>14}", "lambda", "u(0)", "morse", "mu_1", "pohozaev gap");
    for lambda in [5.0, 10.0, 15.0, 20.0, 22.469, 25.0] {
        let gs = solve_positive(lambda, &dom, &settings)?;
        let audit = pohozaev_audit(&gs.profile, lambda, settings.quad_tol)?;
        println!(
            "{lambda:>8.3} {:>16.10} {:>6} {:>14.6e} {:>14.3e}",
            gs.max_value, gs.morse_data.index, gs.morse_data.lowest[0], audit.relative_gap
        );
    }

    let gs = solve_positive(20.0, &dom, &settings)?;
    let col = solve_positive_collocated(&gs, settings.grid_n, &settings)?;
    println!(
        "\ncollocation at lambda = 20: {} Newton steps, |u(0) - shooting| = {:.2e}",
        col.iterations,
        (col.profile.center_value() - gs.max_value).abs()
    );
    Ok(())
}
