/// Numerical knobs shared by every solver stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Number of uniform-scale intervals on [0, R]; graded refinement adds more.
    pub grid_n: usize,
    /// Boundary-condition and shooting tolerance.
    pub tol_bc: f64,
    /// Gap below which an eigenvalue counts as zero.
    pub tol_eig: f64,
    /// Relative quadrature tolerance.
    pub quad_tol: f64,
    /// Newton step tolerance in the weighted max norm.
    pub newton_tol: f64,
    /// Highest angular sector checked for nondegeneracy.
    pub ell_max: usize,
    /// Admissible window for the scaled rate, d in [sigma, 1/sigma].
    pub sigma: f64,
    /// Threshold on |1 - 2 v0(0)| below which the case selection is unreliable.
    pub v00_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            grid_n: 4096,
            tol_bc: 1e-9,
            tol_eig: 1e-6,
            quad_tol: 1e-11,
            newton_tol: 1e-11,
            ell_max: 10,
            sigma: 0.01,
            v00_tol: 1e-4,
        }
    }
}
