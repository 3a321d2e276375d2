//! Special functions needed for the six-dimensional constants: sphere areas,
//! Beta integrals and integer-order Bessel functions.

use std::f64::consts::PI;

/// Gamma function at a positive integer or half-integer `x = k/2`.
pub fn gamma_half_integer(twice_x: u32) -> f64 {
    assert!(twice_x > 0, "gamma is only tabulated for x > 0");
    if twice_x % 2 == 0 {
        (1..twice_x / 2).fold(1.0, |acc, k| acc * k as f64)
    } else {
        // Gamma(1/2) = sqrt(pi), Gamma(x + 1) = x Gamma(x)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while 2.0 * x < twice_x as f64 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Surface area of the unit sphere S^{n-1} in R^n.
pub fn unit_sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Beta function B(a, b) for positive integer or half-integer arguments given as `2a`, `2b`.
pub fn beta_half_integer(twice_a: u32, twice_b: u32) -> f64 {
    gamma_half_integer(twice_a) * gamma_half_integer(twice_b) / gamma_half_integer(twice_a + twice_b)
}

/// Bessel function of the first kind J_n(x) for integer order.
///
/// Uses the periodic integral J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt with the
/// trapezoidal rule, whose aliasing error is a sum of J_{n + kM}(x) and therefore negligible
/// once M exceeds |x| + n by a comfortable margin.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let m = 2 * ((x.abs() as usize) + n.unsigned_abs() as usize + 40);
    let h = 2.0 * PI / m as f64;
    let nf = n as f64;
    let sum: f64 = (0..m)
        .map(|k| {
            let t = k as f64 * h;
            (nf * t - x * t.sin()).cos()
        })
        .sum();
    sum / m as f64
}

/// Derivative J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2.
pub fn bessel_j_prime(n: i32, x: f64) -> f64 {
    0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
}

/// k-th positive zero (k >= 1) of J_n, n >= 0.
pub fn bessel_j_zero(n: i32, k: usize) -> f64 {
    assert!(k >= 1 && n >= 0);
    // McMahon's asymptotic guess, then bracket + Newton/bisection.
    let beta = (k as f64 + 0.5 * n as f64 - 0.25) * PI;
    let mu = 4.0 * (n as f64).powi(2);
    let guess = beta - (mu - 1.0) / (8.0 * beta);
    let step = 0.25;
    let mut lo = (guess - step).max(1e-3);
    let mut hi = guess + step;
    // widen until the bracket holds a sign change
    let mut tries = 0;
    while bessel_j(n, lo).signum() == bessel_j(n, hi).signum() && tries < 40 {
        lo = (lo - step).max(1e-3);
        hi += step;
        tries += 1;
    }
    let mut x = guess.clamp(lo, hi);
    let f_lo_sign = bessel_j(n, lo).signum();
    for _ in 0..100 {
        let f = bessel_j(n, x);
        if f == 0.0 {
            return x;
        }
        if f.signum() == f_lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / bessel_j_prime(n, x);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let moved = (next - x).abs();
        x = next;
        if (hi - lo).abs() < 1e-15 * x || moved < 1e-15 * x {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bessel_series(n: i32, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(n) / gamma_half_integer(2 * (n as u32 + 1));
        let mut sum = term;
        for k in 1..80 {
            term *= -(0.25 * x * x) / (k as f64 * (k as f64 + n as f64));
            sum += term;
        }
        sum
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_half_integer(2), 1.0);
        assert_eq!(gamma_half_integer(6), 2.0);
        assert_eq!(gamma_half_integer(10), 24.0);
        assert!((gamma_half_integer(1) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half_integer(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(6) / PI.powi(3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn beta_values() {
        assert!((beta_half_integer(6, 6) - 1.0 / 30.0).abs() < 1e-16);
        assert!((beta_half_integer(6, 2) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn bessel_matches_series() {
        for n in 0..4 {
            for &x in &[0.1, 1.0, 3.3, 5.1356, 8.0] {
                assert!((bessel_j(n, x) - bessel_series(n, x)).abs() < 1e-13, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn bessel_zeros_known_values() {
        assert!((bessel_j_zero(0, 1) - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((bessel_j_zero(2, 1) - 5.135_622_301_840_683).abs() < 1e-12);
        assert!((bessel_j_zero(2, 2) - 8.417_244_140_399_865).abs() < 1e-12);
        assert!((bessel_j_zero(1, 3) - 10.173_468_135_062_722).abs() < 1e-12);
    }
}
