//! Bubbles on the unit ball: closed-form constants, the exact projection of a centred
//! bubble and the rate at which `PU - U + α δ² H` vanishes.
//!
//! ```text
//! cargo run --release --example bubbles
//! ```

use bn6::bubble_kernel::{bubble_integrals, eval_bubble, projection_expansion, CentralProjection};
use bn6::{alpha6, omega6, BubbleParams, DomainBall, RadialFunction};

fn main() -> bn6::Result<()> {
    let ints = bubble_integrals();
    println!("alpha6 = {}, omega6 = {:.15}", alpha6(), omega6());
    println!("int U^3 = {:.12}, int (1+|y|^2)^-4 = {:.12}", ints.int_u3, ints.int_w4);

    let dom = DomainBall::unit();
    println!("\n{:>10} {:>16} {:>16}", "delta", "PU(0)", "sup err r>=R/4");
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..6 {
        let delta = 0.1 * 0.5f64.powi(k);
        let p = BubbleParams::central(delta)?;
        let exact = CentralProjection::new(&p, &dom)?;
        let mut sup = 0.0f64;
        for i in 0..=64 {
            let r = 0.25 + 0.75 * i as f64 / 64.0;
            let x = [r, 0.0, 0.0, 0.0, 0.0, 0.0];
            sup = sup.max((exact.value(r) - projection_expansion(&p, &x, &dom)?).abs());
        }
        let rate = prev.map(|(d, e)| (sup / e).ln() / (delta / d).ln());
        println!(
            "{delta:>10.3e} {:>16.8e} {sup:>16.3e} {}",
            exact.value(0.0),
            rate.map(|s| format!("slope {s:.3}")).unwrap_or_default()
        );
        prev = Some((delta, sup));
    }

    let p = BubbleParams::central(0.05)?;
    let x = [0.3, 0.0, 0.0, 0.0, 0.0, 0.0];
    println!("\nU(0.3) at delta = 0.05: {:.12e}", eval_bubble(&p, &x));
    Ok(())
}
