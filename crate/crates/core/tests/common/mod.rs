#![allow(dead_code)]

use std::sync::OnceLock;

use bn6::critical_data::{assumption_report, CriticalData};
use bn6::{DomainBall, Settings};

/// Critical data on the unit ball at default settings, computed once per test binary.
pub fn critical() -> &'static CriticalData {
    static DATA: OnceLock<CriticalData> = OnceLock::new();
    DATA.get_or_init(|| assumption_report(&DomainBall::unit(), &Settings::default()).expect("critical data"))
}

/// Composite Simpson on a uniform grid of `2m` intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Second-order radial defect `u'' + 5u'/r + |u|u + λu` from central differences of `u`.
pub fn fd_defect<F: Fn(f64) -> f64>(u: F, lambda: f64, r: f64, h: f64) -> f64 {
    let (um, u0, up) = (u(r - h), u(r), u(r + h));
    let d2 = (up - 2.0 * u0 + um) / (h * h);
    let d1 = (up - um) / (2.0 * h);
    d2 + 5.0 * d1 / r + u0.abs() * u0 + lambda * u0
}
