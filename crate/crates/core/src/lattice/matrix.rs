use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use super::IntVector;
use crate::error::{Error, Result};

/// Square integer matrix with determinant ±1, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnimodularMatrix {
    size: usize,
    entries: Vec<i64>,
}

impl UnimodularMatrix {
    pub fn new(size: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::Domain(format!(
                "expected {} entries for a {size}x{size} matrix, got {}",
                size * size,
                entries.len()
            )));
        }
        let d = int_det(size, &entries);
        if d.abs() != 1 {
            return Err(Error::Domain(format!("determinant {d} is not ±1")));
        }
        Ok(UnimodularMatrix { size, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::Domain("matrix is not square".into()));
        }
        Self::new(size, rows.concat())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[IntVector]) -> Result<Self> {
        let size = cols.len();
        let mut e = vec![0; size * size];
        for (j, c) in cols.iter().enumerate() {
            if c.dim() != size {
                return Err(Error::Domain("column length mismatch".into()));
            }
            for i in 0..size {
                e[i * size + j] = c[i];
            }
        }
        Self::new(size, e)
    }

    pub fn identity(size: usize) -> Self {
        let mut e = vec![0; size * size];
        for i in 0..size {
            e[i * size + i] = 1;
        }
        UnimodularMatrix { size, entries: e }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    pub fn det(&self) -> i64 {
        int_det(self.size, &self.entries)
    }

    pub fn mul(&self, other: &UnimodularMatrix) -> UnimodularMatrix {
        assert_eq!(self.size, other.size, "size mismatch in matrix product");
        let n = self.size;
        let mut e = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let s: i128 = (0..n)
                    .map(|k| self.get(i, k) as i128 * other.get(k, j) as i128)
                    .sum();
                e[i * n + j] = s as i64;
            }
        }
        UnimodularMatrix { size: n, entries: e }
    }

    /// Exact inverse: adjugate times the determinant (which is ±1).
    pub fn inverse(&self) -> UnimodularMatrix {
        let n = self.size;
        let d = self.det();
        let mut e = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let minor = minor_entries(n, &self.entries, j, i);
                let c = int_det(n - 1, &minor);
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                e[i * n + j] = sign * c * d;
            }
        }
        UnimodularMatrix { size: n, entries: e }
    }

    /// Block-diagonal extension `diag(self, 1)`.
    pub fn embed(&self) -> UnimodularMatrix {
        let n = self.size + 1;
        let mut e = vec![0i64; n * n];
        for i in 0..self.size {
            for j in 0..self.size {
                e[i * n + j] = self.get(i, j);
            }
        }
        e[n * n - 1] = 1;
        UnimodularMatrix { size: n, entries: e }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.size);
        (0..self.size)
            .map(|i| {
                (0..self.size)
                    .map(|k| v[k] * self.get(i, k) as f64)
                    .sum()
            })
            .collect()
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.size).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", IntVector::new(row.to_vec()))?;
        }
        write!(f, "]")
    }
}

fn minor_entries(n: usize, e: &[i64], skip_row: usize, skip_col: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity((n - 1) * (n - 1));
    for i in (0..n).filter(|&i| i != skip_row) {
        for j in (0..n).filter(|&j| j != skip_col) {
            out.push(e[i * n + j]);
        }
    }
    out
}

/// Fraction-free (Bareiss) determinant.
pub(crate) fn int_det(n: usize, e: &[i64]) -> i64 {
    if n == 0 {
        return 1;
    }
    let mut a: Vec<i128> = e.iter().map(|&x| x as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                return 0;
            };
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
            }
        }
        prev = a[k * n + k];
    }
    (sign * a[n * n - 1]) as i64
}

/// Invariant factors of the Smith normal form of an integer matrix (rows
/// given as slices). Zero factors are omitted, so the length is the rank.
pub fn smith_invariants(rows: &[Vec<i64>]) -> Vec<i64> {
    let m = rows.len();
    if m == 0 {
        return vec![];
    }
    let n = rows[0].len();
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero |entry| in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..m {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    let pivot_row = a[t].clone();
                    for (x, y) in a[i][t..].iter_mut().zip(&pivot_row[t..]) {
                        *x -= q * y;
                    }
                }
                if a[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility of the remaining block by the pivot
                let bad = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| a[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        let other = a[i].clone();
                        for (x, y) in a[t][t..].iter_mut().zip(&other[t..]) {
                            *x += y;
                        }
                        continue;
                    }
                }
            }
            // move the smallest remaining entry of row/column t onto the pivot
            let mut best = (t, t);
            for i in t..m {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..n {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs() as i64);
        t += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let m = UnimodularMatrix::from_rows(&[vec![2, 1, 0], vec![1, 1, 0], vec![0, 3, 1]]).unwrap();
        assert_eq!(m.det(), 1);
        assert_eq!(m.mul(&m.inverse()), UnimodularMatrix::identity(3));
        assert_eq!(m.inverse().mul(&m), UnimodularMatrix::identity(3));
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(UnimodularMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn negative_det_allowed() {
        let m = UnimodularMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(m.det(), -1);
        assert_eq!(m.mul(&m.inverse()), UnimodularMatrix::identity(2));
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let e = vec![3, -1, 4, 1, 5, -9, 2, 6, 5];
        // 3(25+54) +1(5+18) +4(6-10) = 237 + 23 - 16
        assert_eq!(int_det(3, &e), 244);
        let e4 = vec![0, 0, 0, -1, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0];
        assert_eq!(int_det(4, &e4), 1);
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_invariants(&[vec![1, 0, 0], vec![1, 2, 0]]), vec![1, 2]);
        assert_eq!(smith_invariants(&[vec![1, 0, 0], vec![1, -1, 0]]), vec![1, 1]);
        assert_eq!(smith_invariants(&[vec![2, 4]]), vec![2]);
        assert_eq!(smith_invariants(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
        assert_eq!(smith_invariants(&[vec![1, 2], vec![2, 4]]), vec![1]);
    }
}
