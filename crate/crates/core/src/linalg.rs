//! Small dense complex linear algebra.
//!
//! Interpolation systems and Newton steps in this crate are at most a few
//! hundred unknowns, so everything here is plain `O(n³)` with no blocking.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Matrix with entries `f(i, j)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `A^H y`.
    pub fn adjoint_mul_vec(&self, y: &[C64]) -> Vec<C64> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (i, yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * yi;
            }
        }
        out
    }

    /// `A B`.
    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Maximum absolute row sum (the ∞-operator norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|a| a.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Real embedding `[[Re, -Im], [Im, Re]]`, column-major for Jacobi sweeps.
    fn real_embedding_columns(&self) -> Vec<Vec<f64>> {
        let (m, n) = (self.rows, self.cols);
        let mut cols = vec![vec![0.0; 2 * m]; 2 * n];
        for i in 0..m {
            for j in 0..n {
                let a = self[(i, j)];
                cols[j][i] = a.re;
                cols[j][m + i] = a.im;
                cols[n + j][i] = -a.im;
                cols[n + j][m + i] = a.re;
            }
        }
        cols
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean norm of a complex vector.
pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `Σ x_i conj(y_i)`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Factor a square matrix; fails on an exactly zero pivot.
    pub fn new(a: &CMatrix) -> Result<Self> {
        assert_eq!(a.rows, a.cols);
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| lu[(x, k)].norm().total_cmp(&lu[(y, k)].norm()))
                .unwrap_or(k);
            if lu[(p, k)].norm() == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    /// Solve `A x = b` with the stored factors.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let v = self.lu[(i, j)] * x[j];
                x[i] -= v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let v = self.lu[(i, j)] * x[j];
                x[i] -= v;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Solve `A x = b` by pivoted LU followed by iterative refinement.
pub fn solve(a: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let lu = Lu::new(a)?;
    let mut x = lu.solve(b);
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Singular);
    }
    for _ in 0..3 {
        let ax = a.mul_vec(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        if norm2(&r) <= 1e-15 * norm2(b) {
            break;
        }
        let dx = lu.solve(&r);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
    }
    Ok(x)
}

/// Cholesky factor `L` (lower triangular) of a Hermitian positive definite matrix.
pub fn cholesky(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows;
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 {
            return Err(Error::Singular);
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Singular values in descending order (one-sided Jacobi on the real embedding).
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut cols = a.real_embedding_columns();
    let n = cols.len();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut al = 0.0;
                    let mut be = 0.0;
                    let mut ga = 0.0;
                    for (x, y) in cp.iter().zip(cq) {
                        al += x * x;
                        be += y * y;
                        ga += x * y;
                    }
                    (al, be, ga)
                };
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (u, v) = (*x, *y);
                    *x = c * u - s * v;
                    *y = s * u + c * v;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    // every singular value of the complex matrix appears twice in the embedding
    sv.into_iter().step_by(2).collect()
}

/// 2-norm condition number `σ_max / σ_min` (infinite when singular).
pub fn condition_number(a: &CMatrix) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Eigenvalues of a real symmetric matrix (cyclic Jacobi), ascending.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let n = a.rows;
    let mut r = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            // symmetrize to absorb round-off in the input
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            r[i][j] = v.re;
            r[n + i][n + j] = v.re;
            r[i][n + j] = -v.im;
            r[n + i][j] = v.im;
        }
    }
    symmetric_eigenvalues(r).into_iter().step_by(2).collect()
}

/// Eigenvalues of the 2×2 Hermitian matrix `[[a, b], [conj(b), d]]`, ascending.
pub fn hermitian2_eigenvalues(a: f64, b: C64, d: f64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - rad, mean + rad)
}
