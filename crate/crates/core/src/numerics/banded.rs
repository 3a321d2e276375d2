//! Banded LU factorisation with partial pivoting.

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals. Storage keeps `kl` extra
/// super-diagonals for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    // row-major band: row i holds columns i - kl ..= i + ku + kl
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.width {
            None
        } else {
            Some(i * self.width + off as usize)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entry (i, j); panics when (i, j) falls outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let in_band = j + self.kl >= i && j <= i + self.ku;
        assert!(in_band, "entry ({i}, {j}) outside band kl={} ku={}", self.kl, self.ku);
        let s = self.slot(i, j).expect("band slot");
        self.data[s] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("band slot");
        self.data[s] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + self.kl).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b` in place (A is overwritten by its factors).
    pub fn solve(mut self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut x = b.to_vec();
        let reach = self.ku + self.kl;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::InvalidParameter(format!("singular band matrix at column {k}")));
            }
            let last_col = (k + reach).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.get(k, j);
                    let c = self.get(p, j);
                    self.set(k, j, c);
                    self.set(p, j, a);
                }
                x.swap(k, p);
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last_row {
                let l = self.get(i, k) / pivot;
                if l == 0.0 {
                    continue;
                }
                self.set(i, k, 0.0);
                for j in k + 1..=last_col {
                    let v = self.get(i, j) - l * self.get(k, j);
                    self.set(i, j, v);
                }
                x[i] -= l * x[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + reach).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=last_col {
                s -= self.get(k, j) * x[j];
            }
            x[k] = s / self.get(k, k);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        let n = 50;
        let mut a = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
            }
        }
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&xs);
        let sol = a.solve(&b).unwrap();
        for (u, v) in sol.iter().zip(&xs) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn pivoting_needed() {
        // zero on the diagonal forces a row swap
        let mut a = BandMatrix::zeros(3, 2, 2);
        let dense = [[0.0, 1.0, 2.0], [3.0, 4.0, 5.0], [6.0, 0.0, 8.0]];
        for (i, row) in dense.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                a.add(i, j, *v);
            }
        }
        let x = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x);
        let sol = a.solve(&b).unwrap();
        for (u, v) in sol.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
