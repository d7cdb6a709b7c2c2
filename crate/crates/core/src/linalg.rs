//! Dense LU factorisation with partial pivoting.
//!
//! The factorisation is blocked: a narrow panel is factored column by column and the trailing
//! matrix is then updated once per panel, which keeps the working set in cache for the
//! several-thousand-row systems produced by long Hamiltonian-simulation targets. Trailing rows
//! are updated independently (and in parallel) with a fixed summation order, so the result does
//! not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Pivots smaller than this are treated as exact zeros.
pub const PIVOT_FLOOR: f64 = 1e-300;

const PANEL: usize = 48;
const COL_CHUNK: usize = 256;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix rows must all have length n".into()));
        }
        Ok(Self { n, data: rows.concat() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Packed `L\U` factors with the row permutation.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(mut a: DenseMatrix) -> Result<Self> {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let data = &mut a.data;
        let mut p0 = 0;
        while p0 < n {
            let p1 = (p0 + PANEL).min(n);
            for k in p0..p1 {
                let (piv_row, piv_abs) = (k..n)
                    .map(|i| (i, data[i * n + k].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
                if !(piv_abs >= PIVOT_FLOOR) {
                    return Err(Error::SingularMatrix { column: k, pivot: piv_abs });
                }
                if piv_row != k {
                    swap_rows(data, n, k, piv_row);
                    perm.swap(k, piv_row);
                }
                let (head, tail) = data.split_at_mut((k + 1) * n);
                let pivot_row = &head[k * n..(k + 1) * n];
                let inv = 1.0 / pivot_row[k];
                for row in tail.chunks_exact_mut(n) {
                    let l = row[k] * inv;
                    row[k] = l;
                    if l != 0.0 {
                        axpy(&mut row[k + 1..p1], -l, &pivot_row[k + 1..p1]);
                    }
                }
            }
            if p1 < n {
                // U12 = L11^{-1} A12 (unit lower triangular solve within the panel rows)
                for k in p0..p1 {
                    let (head, tail) = data.split_at_mut((k + 1) * n);
                    let src = &head[k * n + p1..(k + 1) * n];
                    for row in tail.chunks_exact_mut(n).take(p1 - k - 1) {
                        let l = row[k];
                        if l != 0.0 {
                            axpy(&mut row[p1..], -l, src);
                        }
                    }
                }
                // A22 -= L21 U12
                let (top, bottom) = data.split_at_mut(p1 * n);
                let upanel = &top[p0 * n..p1 * n];
                bottom.par_chunks_mut(n).for_each(|row| {
                    let mut c0 = p1;
                    while c0 < n {
                        let c1 = (c0 + COL_CHUNK).min(n);
                        for k in p0..p1 {
                            let l = row[k];
                            if l != 0.0 {
                                let urow = &upanel[(k - p0) * n..(k - p0 + 1) * n];
                                axpy(&mut row[c0..c1], -l, &urow[c0..c1]);
                            }
                        }
                        c0 = c1;
                    }
                });
            }
            p0 = p1;
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }
}

fn swap_rows(data: &mut [f64], n: usize, a: usize, b: usize) {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let (head, tail) = data.split_at_mut(hi * n);
    head[lo * n..(lo + 1) * n].swap_with_slice(&mut tail[..n]);
}

#[inline]
fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Solve `A x = b` by LU with partial pivoting.
pub fn solve_linear(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.n {
        return Err(Error::Invalid(format!(
            "right-hand side has length {}, matrix is {}x{}",
            b.len(),
            a.n,
            a.n
        )));
    }
    Ok(LuFactors::factor(a.clone())?.solve(b))
}
