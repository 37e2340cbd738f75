//! Symmetric banded matrices and their Cholesky factorization.
//!
//! Only the lower band is stored: `data[i * (bw + 1) + k] = A[i][i - k]`
//! for `k = 0..=bw`. Entries with `i < k` are padding and stay zero.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymBanded {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBanded {
    pub fn zeros(n: usize, bw: usize) -> Self {
        SymBanded {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = r - c;
        (k <= self.bw).then(|| r * (self.bw + 1) + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to `A[i][j]` (and, by symmetry, `A[j][i]`).
    ///
    /// Panics if `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bw));
        self.data[s] += v;
    }

    /// `alpha * self + beta * other`, both of the same shape.
    pub fn lin_comb(&self, alpha: f64, other: &SymBanded, beta: f64) -> SymBanded {
        assert_eq!((self.n, self.bw), (other.n, other.bw), "shape mismatch");
        SymBanded {
            n: self.n,
            bw: self.bw,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> SymBanded {
        SymBanded {
            n: self.n,
            bw: self.bw,
            data: self.data.iter().map(|a| alpha * a).collect(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let w = self.bw + 1;
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = row[0] * x[i];
            for k in 1..=self.bw.min(i) {
                acc += row[k] * x[i - k];
            }
            y[i] = acc;
        }
        // upper triangle via symmetry
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            for k in 1..=self.bw.min(i) {
                y[i - k] += row[k] * x[i];
            }
        }
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matvec(&vec![1.0; self.n])
    }

    /// Banded Cholesky `A = L Lᵀ`. Fails if a pivot is not positive.
    pub fn cholesky(&self) -> Result<BandedCholesky> {
        let w = self.bw + 1;
        let mut l = self.data.clone();
        for i in 0..self.n {
            let jmin = i.saturating_sub(self.bw);
            for j in jmin..=i {
                // L[i][j] = (A[i][j] - Σ_{k<j} L[i][k] L[j][k]) / L[j][j]
                let mut s = l[i * w + (i - j)];
                let kmin = jmin.max(j.saturating_sub(self.bw));
                for k in kmin..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::Precondition(format!(
                            "matrix not positive definite (pivot {s:e} at row {i})"
                        )));
                    }
                    l[i * w] = s.sqrt();
                } else {
                    l[i * w + (i - j)] = s / l[j * w];
                }
            }
        }
        Ok(BandedCholesky {
            n: self.n,
            bw: self.bw,
            l,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        let w = self.bw + 1;
        // forward: L y = b
        for i in 0..self.n {
            let mut s = x[i];
            for k in 1..=self.bw.min(i) {
                s -= self.l[i * w + k] * x[i - k];
            }
            x[i] = s / self.l[i * w];
        }
        // backward: Lᵀ x = y
        for i in (0..self.n).rev() {
            let mut s = x[i];
            for k in 1..=self.bw.min(self.n - 1 - i) {
                s -= self.l[(i + k) * w + k] * x[i + k];
            }
            x[i] = s / self.l[i * w];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter()
            .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
            .collect()
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = SymBanded::zeros(2, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, 1.0);
        a.add(0, 1, 2.0);
        assert!(a.cholesky().is_err());
    }

    proptest! {
        #[test]
        fn solve_recovers_rhs(
            n in 1usize..12,
            bw in 0usize..4,
            seed in proptest::collection::vec(-1.0f64..1.0, 64),
            rhs in proptest::collection::vec(-5.0f64..5.0, 12),
        ) {
            // diagonally dominant ⇒ SPD
            let mut a = SymBanded::zeros(n, bw);
            let mut it = seed.iter().cycle();
            for i in 0..n {
                for k in 1..=bw.min(i) {
                    a.add(i, i - k, *it.next().unwrap());
                }
            }
            for i in 0..n {
                a.add(i, i, 1.0 + 2.0 * bw as f64);
            }
            let b = &rhs[..n];
            let x = a.cholesky().unwrap().solve(b);
            let back = dense_matvec(&a.to_dense(), &x);
            for (p, q) in back.iter().zip(b) {
                prop_assert!((p - q).abs() < 1e-10);
            }
            let y = a.matvec(&x);
            for (p, q) in y.iter().zip(&back) {
                prop_assert!((p - q).abs() < 1e-12);
            }
        }
    }
}
