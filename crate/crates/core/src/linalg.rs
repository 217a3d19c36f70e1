//! Dense complex matrices and LU factorization with partial pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Build from a row-major vector of length n*n.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(CMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.n + col] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Copy with `diag[i]` added to entry (i, i).
    pub fn plus_diagonal(&self, diag: &[Complex64]) -> Result<CMatrix> {
        if diag.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "diagonal of length {} does not match matrix dimension {}",
                diag.len(),
                self.n
            )));
        }
        let mut out = self.clone();
        for (i, d) in diag.iter().enumerate() {
            out.data[i * self.n + i] += d;
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Packed LU factors, PA = LU, with unit lower triangle.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    anorm1: f64,
}

impl Lu {
    /// Factor `a`. Fails on an exactly zero pivot or non-finite entries.
    pub fn factor(a: &CMatrix) -> Result<Lu> {
        let n = a.n;
        if a.data
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite("matrix to factor".into()));
        }
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return Err(Error::SingularSystem(format!("zero pivot in column {k}")));
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= factor * u;
                }
            }
        }
        Ok(Lu {
            n,
            lu,
            perm,
            anorm1: a.norm1(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: Complex64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: Complex64 = ((i + 1)..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solve A^T x = b (plain transpose, no conjugation).
    pub fn solve_transpose(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        // A^T = U^T L^T P
        let mut y = b.to_vec();
        for i in 0..n {
            let s: Complex64 = (0..i).map(|j| self.lu[j * n + i] * y[j]).sum();
            y[i] = (y[i] - s) / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let s: Complex64 = ((i + 1)..n).map(|j| self.lu[j * n + i] * y[j]).sum();
            y[i] -= s;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    /// Solve A^H x = b.
    fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let conj_b: Vec<Complex64> = b.iter().map(|z| z.conj()).collect();
        self.solve_transpose(&conj_b)
            .into_iter()
            .map(|z| z.conj())
            .collect()
    }

    /// Estimate of the 1-norm condition number, ||A||_1 * est(||A^-1||_1),
    /// using Hager's iteration on the factors. A lower bound in general.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            let y_norm: f64 = y.iter().map(|z| z.norm()).sum();
            if y_norm <= est {
                break;
            }
            est = y_norm;
            let xi: Vec<Complex64> = y
                .iter()
                .map(|z| {
                    let m = z.norm();
                    if m == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        z / m
                    }
                })
                .collect();
            let w = self.solve_adjoint(&xi);
            let (j, wmax) =
                w.iter()
                    .map(|z| z.re)
                    .enumerate()
                    .fold(
                        (0, f64::NEG_INFINITY),
                        |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
                    );
            let wx: f64 = w.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if wmax <= wx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![Complex64::new(0.0, 0.0); n];
            x[j] = Complex64::new(1.0, 0.0);
        }
        // alternative lower bound from an alternating-sign probe
        let probe: Vec<Complex64> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
                Complex64::new(sign * (1.0 + i as f64 / denom), 0.0)
            })
            .collect();
        let alt = 2.0 * self.solve(&probe).iter().map(|z| z.norm()).sum::<f64>() / (3.0 * n as f64);
        self.anorm1 * est.max(alt)
    }
}
