//! Dense linear algebra over scalars and over jets.

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::scalar::Scalar;
use std::sync::Arc;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S: Scalar> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }
    pub fn mul(&self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        r[(i, j)].add_mul_assign(a, b);
                    }
                }
            }
        }
        r
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self, tol: f64) -> (Matrix<S>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let p = if S::exact() {
                (r..m.rows).find(|&i| !m[(i, c)].is_zero())
            } else {
                (r..m.rows)
                    .filter(|&i| !m[(i, c)].is_negligible(tol))
                    .max_by(|&a, &b| m[(a, c)].to_f64().abs().partial_cmp(&m[(b, c)].to_f64().abs()).unwrap())
            };
            let Some(p) = p else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip().unwrap();
            for j in 0..m.cols {
                m[(r, j)] = m[(r, j)].mul(&inv);
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        let v = m[(r, j)].mul(&f);
                        m[(i, j)] = m[(i, j)].sub(&v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.rref(tol).1.len()
    }

    /// Basis of the right null space {v : M v = 0}.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<S>> {
        let (r, piv) = self.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (k, &p) in piv.iter().enumerate() {
                    v[p] = r[(k, f)].neg();
                }
                v
            })
            .collect()
    }

    /// Basis of the left null space {w : wᵀ M = 0}.
    pub fn left_nullspace(&self, tol: f64) -> Vec<Vec<S>> {
        self.transpose().nullspace(tol)
    }

    /// One solution of `M x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[S], tol: f64) -> Option<Vec<S>> {
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, piv) = aug.rref(tol);
        if piv.contains(&self.cols) {
            return None;
        }
        let mut x = vec![S::zero(); self.cols];
        for (k, &p) in piv.iter().enumerate() {
            x[p] = r[(k, self.cols)].clone();
        }
        Some(x)
    }

    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return S::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg();
            }
            let piv = m[(c, c)].clone();
            det = det.mul(&piv);
            let inv = piv.recip().unwrap();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].mul(&inv);
                for j in c..n {
                    let v = m[(c, j)].mul(&f);
                    m[(i, j)] = m[(i, j)].sub(&v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix<S>> {
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let (r, piv) = aug.rref(0.0);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Inertia (positive, negative, zero) of a symmetric matrix, computed by
    /// exact congruence diagonalisation.
    pub fn inertia(&self) -> (usize, usize, usize) {
        let mut m = self.clone();
        let n = m.rows;
        let (mut pos, mut neg) = (0, 0);
        let mut active: Vec<usize> = (0..n).collect();
        while let Some(&_) = active.first() {
            let diag = active.iter().copied().find(|&i| !m[(i, i)].is_zero());
            let p = match diag {
                Some(p) => p,
                None => {
                    let pair = active
                        .iter()
                        .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                        .find(|&(i, j)| i != j && !m[(i, j)].is_zero());
                    let Some((i, j)) = pair else { break };
                    // row/col i += row/col j makes the (i,i) entry 2 m_ij
                    for k in 0..n {
                        let v = m[(j, k)].clone();
                        m[(i, k)] = m[(i, k)].add(&v);
                    }
                    for k in 0..n {
                        let v = m[(k, j)].clone();
                        m[(k, i)] = m[(k, i)].add(&v);
                    }
                    i
                }
            };
            let piv = m[(p, p)].clone();
            if piv.signum() > 0 {
                pos += 1;
            } else {
                neg += 1;
            }
            let inv = piv.recip().unwrap();
            let rest: Vec<usize> = active.iter().copied().filter(|&i| i != p).collect();
            for &i in &rest {
                let f = m[(i, p)].mul(&inv);
                if f.is_zero() {
                    continue;
                }
                for &k in &rest {
                    let v = m[(p, k)].mul(&f);
                    m[(i, k)] = m[(i, k)].sub(&v);
                }
                m[(i, p)] = S::zero();
                m[(p, i)] = S::zero();
            }
            active = rest;
        }
        (pos, neg, n - pos - neg)
    }
}

impl<S: Scalar> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}
impl<S: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix of jets.
pub type JetMatrix<S> = Vec<Vec<Jet<S>>>;

/// Constant terms of a jet matrix.
pub fn jet_matrix_value<S: Scalar>(m: &JetMatrix<S>) -> Matrix<S> {
    Matrix::from_rows(m.iter().map(|r| r.iter().map(|j| j.constant_term()).collect()).collect())
}

/// Solves `A X = B` for jet matrices by Gauss–Jordan elimination with pivots
/// invertible at the base point.
pub fn jet_solve<S: Scalar>(a: &JetMatrix<S>, b: &JetMatrix<S>) -> Result<JetMatrix<S>> {
    let n = a.len();
    if n == 0 {
        return Ok(b.clone());
    }
    let m = b.first().map_or(0, |r| r.len());
    let mut a = a.clone();
    let mut b = b.clone();
    for c in 0..n {
        let p = (c..n)
            .find(|&i| !a[i][c].constant_term().is_zero())
            .ok_or_else(|| Error::NotInvertible(format!("jet matrix singular at the base point (column {c})")))?;
        a.swap(p, c);
        b.swap(p, c);
        let inv = a[c][c].invert()?;
        for j in c..n {
            a[c][j] = &a[c][j] * &inv;
        }
        for j in 0..m {
            b[c][j] = &b[c][j] * &inv;
        }
        for i in 0..n {
            if i == c || a[i][c].is_exact_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..n {
                let v = &a[c][j] * &f;
                a[i][j] = &a[i][j] - &v;
            }
            for j in 0..m {
                let v = &b[c][j] * &f;
                b[i][j] = &b[i][j] - &v;
            }
        }
    }
    Ok(b)
}

pub fn jet_identity<S: Scalar>(space: &Arc<JetSpace>, n: usize) -> JetMatrix<S> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Jet::one(space) } else { Jet::zero(space) }).collect())
        .collect()
}

pub fn jet_inverse<S: Scalar>(a: &JetMatrix<S>) -> Result<JetMatrix<S>> {
    let sp = a
        .first()
        .and_then(|r| r.first())
        .map(|j| j.space().clone())
        .ok_or_else(|| Error::Dimension("empty matrix".into()))?;
    jet_solve(a, &jet_identity(&sp, a.len()))
}

/// Determinant of a jet matrix by cofactor-free elimination.
pub fn jet_det<S: Scalar>(a: &JetMatrix<S>) -> Result<Jet<S>> {
    let n = a.len();
    let sp = a[0][0].space().clone();
    let mut a = a.clone();
    let mut det = Jet::one(&sp);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].constant_term().is_zero()) else {
            // fall back to expansion when no pivot is a unit at the base point
            return Ok(cofactor_det(&a[c..].iter().map(|r| r[c..].to_vec()).collect::<Vec<_>>()) * det);
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].invert()?;
        for i in c + 1..n {
            if a[i][c].is_exact_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let v = &a[c][j] * &f;
                a[i][j] = &a[i][j] - &v;
            }
        }
    }
    Ok(det)
}

/// Laplace expansion (used for small or non-unit-pivot matrices).
pub fn cofactor_det<S: Scalar>(a: &[Vec<Jet<S>>]) -> Jet<S> {
    let n = a.len();
    if n == 1 {
        return a[0][0].clone();
    }
    let sp = a[0][0].space().clone();
    let mut acc = Jet::zero(&sp);
    for j in 0..n {
        if a[0][j].is_exact_zero() {
            continue;
        }
        let minor: Vec<Vec<Jet<S>>> =
            a[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let t = &a[0][j] * &cofactor_det(&minor);
        acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}
