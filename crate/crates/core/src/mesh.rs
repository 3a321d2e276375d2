//! Graded radial meshes on [0, R].

/// Relative step that yields 64 nodes per decade of r.
pub fn decade_ratio() -> f64 {
    10f64.powf(1.0 / 64.0) - 1.0
}

/// Mesh with `n` intervals of uniform scale, geometrically refined towards r = 0 (down to
/// `focus / 100` when a concentration scale is given) and towards r = R.
///
/// Local step: `h(r) = min(R/n, q max(r, r_min), q (R - r) + R/(8n))` with `q` the
/// 64-per-decade ratio.
pub fn graded(radius: f64, n: usize, focus: Option<f64>) -> Vec<f64> {
    assert!(radius > 0.0 && n >= 4);
    let h_base = radius / n as f64;
    let q = decade_ratio();
    let h_edge = h_base / 8.0;
    let r_min = match focus {
        Some(delta) if delta > 0.0 => (delta / 100.0).min(h_base / 8.0),
        _ => h_base / 8.0,
    };
    let step = |r: f64| -> f64 {
        h_base
            .min(q * r.max(r_min))
            .min(q * (radius - r) + h_edge)
    };
    let mut nodes = vec![0.0];
    // the first few nodes below r_min are spaced at q r_min
    let mut r = 0.0;
    loop {
        let h = step(r);
        let next = r + h;
        if next >= radius - 0.5 * step(next.min(radius)) {
            break;
        }
        nodes.push(next);
        r = next;
    }
    nodes.push(radius);
    nodes
}

/// Logarithmically spaced breakpoints between `lo` and `hi`, `per_decade` per decade.
pub fn log_breakpoints(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let m = ((decades * per_decade as f64).ceil() as usize).max(1);
    (0..=m).map(|k| lo * (hi / lo).powf(k as f64 / m as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_is_strictly_increasing_and_spans_ball() {
        for focus in [None, Some(1e-3), Some(1e-6)] {
            let m = graded(1.0, 256, focus);
            assert_eq!(m[0], 0.0);
            assert_eq!(*m.last().unwrap(), 1.0);
            assert!(m.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn focus_gives_dense_decades() {
        let delta = 1e-4;
        let m = graded(1.0, 1024, Some(delta));
        let inside = m.iter().filter(|&&r| r > delta / 10.0 && r < 10.0 * delta).count();
        assert!(inside >= 128, "only {inside} nodes in two decades around delta");
    }

    #[test]
    fn uniform_core_matches_n() {
        let m = graded(2.0, 512, None);
        let intervals = m.len() - 1;
        assert!(intervals >= 512 && intervals < 512 + 400, "{intervals}");
    }
}
