//! Sector eigenvalues of the linearization by shooting with Sturm zero counting.

use crate::error::Result;
use crate::numerics::Dopri5;

use super::shooting::{g_prime, sector_endpoint};

/// Lowest `count` eigenvalues of `-ψ'' - 5ψ'/r + ℓ(ℓ+4)ψ/r² - (2|u|+λ)ψ = μψ`, ψ(R) = 0,
/// where u starts from `u(0) = s` (s = 0 and λ = 0 give the free Laplacian).
pub(crate) fn sector_spectrum(s: f64, lambda: f64, radius: f64, ell: usize, count: usize) -> Result<Vec<f64>> {
    let ode = Dopri5::with_tolerances(1e-12, 1e-15);
    let zeros = |mu: f64| -> Result<usize> { Ok(sector_endpoint(s, lambda, ell, mu, radius, &ode)?.1) };
    let floor = -g_prime(s, lambda).abs() - 1.0;
    let mut out = Vec::with_capacity(count);
    let mut lo = floor;
    for k in 1..=count {
        let mut hi = lo.abs().max(1.0 / (radius * radius));
        while zeros(hi)? < k {
            hi = 2.0 * hi.abs() + 10.0 / (radius * radius);
        }
        // bracket [lo, hi] with N(lo) < k <= N(hi); bisect on the Sturm count
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if zeros(mid)? >= k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        let mu = 0.5 * (lo + hi);
        out.push(mu);
        lo = hi;
    }
    Ok(out)
}
