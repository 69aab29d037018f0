//! Dense Gaussian elimination over the field of rational functions in `q`.

use crate::scalar::RationalScalar;

pub type Matrix = Vec<Vec<RationalScalar>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![RationalScalar::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = RationalScalar::one();
    }
    m
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = RationalScalar::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[RationalScalar]) -> Vec<RationalScalar> {
    a.iter()
        .map(|row| {
            let mut acc = RationalScalar::zero();
            for (x, y) in row.iter().zip(v) {
                if !x.is_zero() && !y.is_zero() {
                    acc += &(x * y);
                }
            }
            acc
        })
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (top, rest) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in rest.iter_mut().zip(top.iter()) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank and the first maximal set of independent columns (in column order).
pub fn pivot_columns(m: &Matrix) -> Vec<usize> {
    let mut w = m.clone();
    rref(&mut w)
}

pub fn rank(m: &Matrix) -> usize {
    pivot_columns(m).len()
}

/// Solve `a x = b` for square nonsingular `a`.
pub fn solve(a: &Matrix, b: &[RationalScalar]) -> Option<Vec<RationalScalar>> {
    let n = a.len();
    let mut aug: Matrix = a.iter().zip(b).map(|(row, y)| {
        let mut r = row.clone();
        r.push(y.clone());
        r
    }).collect();
    let piv = rref(&mut aug);
    if piv.len() != n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Solve `a X = B` column by column for square nonsingular `a`.
pub fn solve_many(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let k = b.first().map_or(0, Vec::len);
    let mut aug: Matrix = a.iter().zip(b).map(|(row, y)| {
        let mut r = row.clone();
        r.extend(y.iter().cloned());
        r
    }).collect();
    let piv = rref(&mut aug);
    if piv.len() != n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..n + k].to_vec()).collect())
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    solve_many(a, &identity(a.len()))
}

/// A basis of the right kernel `{x : a x = 0}`.
pub fn nullspace(a: &Matrix, cols: usize) -> Vec<Vec<RationalScalar>> {
    let mut w = a.clone();
    let piv = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![RationalScalar::zero(); cols];
            x[f] = RationalScalar::one();
            for (r, &p) in piv.iter().enumerate() {
                x[p] = -&w[r][f];
            }
            x
        })
        .collect()
}
