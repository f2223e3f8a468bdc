//! Exact dense linear algebra over the rationals.

use crate::rat::Rat;

pub type Matrix = Vec<Vec<Rat>>;

/// Pivots of Gaussian elimination without row exchanges, stopping at the
/// first zero pivot. The leading principal minors are the running products.
fn leading_pivots(m: &[Vec<Rat>]) -> Vec<Rat> {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let p = a[k][k].clone();
        pivots.push(p.clone());
        if p.is_zero() {
            break;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= &t;
            }
        }
    }
    pivots
}

/// Sylvester's criterion for a symmetric matrix: negative definite iff the
/// leading principal minors alternate in sign starting negative, which is
/// the same as every elimination pivot being negative.
pub fn is_negative_definite(m: &[Vec<Rat>]) -> bool {
    let p = leading_pivots(m);
    p.len() == m.len() && p.iter().all(|x| x.is_negative())
}

/// Leading principal minors `det(M[..k, ..k])` for `k = 1..=n`.
pub fn leading_minors(m: &[Vec<Rat>]) -> Vec<Rat> {
    let p = leading_pivots(m);
    let mut out = Vec::with_capacity(m.len());
    let mut acc = Rat::one();
    for k in 0..m.len() {
        match p.get(k) {
            Some(x) if !x.is_zero() || k + 1 == p.len() => {
                acc = &acc * x;
                out.push(acc.clone());
            }
            _ => {
                // a zero pivot hides later minors; compute them directly
                out.push(determinant(&submatrix(m, k + 1)));
            }
        }
    }
    out
}

fn submatrix(m: &[Vec<Rat>], k: usize) -> Matrix {
    m[..k].iter().map(|row| row[..k].to_vec()).collect()
}

pub fn determinant(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut det = Rat::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Rat::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k].clone();
        det = &det * &piv;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= &t;
            }
        }
    }
    det
}

/// Inverse by Gauss–Jordan elimination; `None` if singular.
pub fn inverse(m: &[Vec<Rat>]) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut inv: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(p, k);
        inv.swap(p, k);
        let piv = a[k][k].recip();
        for j in 0..n {
            a[k][j] = &a[k][j] * &piv;
            inv[k][j] = &inv[k][j] * &piv;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                let t = &f * &a[k][j];
                a[i][j] -= &t;
                let t = &f * &inv[k][j];
                inv[i][j] -= &t;
            }
        }
    }
    Some(inv)
}

/// Solve `m x = b`; `None` if `m` is singular.
pub fn solve(m: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let inv = inverse(m)?;
    Some(mat_vec(&inv, b))
}

pub fn mat_vec(m: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}
