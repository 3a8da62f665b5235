//! Floating-point LLL reduction of a real basis (columns are basis vectors).

use crate::linalg::RMat;

/// Default Lovász parameter.
pub const LLL_DELTA: f64 = 0.99;

/// Result of an LLL reduction: `reduced = basis · unimodular`.
#[derive(Clone, Debug)]
pub struct LllOutput {
    pub reduced: RMat,
    /// Integer unimodular transform; column `j` holds the original-basis coordinates
    /// of reduced vector `j`.
    pub unimodular: Vec<Vec<i64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt coefficients `mu[i][j]` and squared norms `bn[i]` of the vectors `b`.
fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = b.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut bn = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &star[j]) / bn[j];
            for (vt, st) in v.iter_mut().zip(&star[j]) {
                *vt -= mu[i][j] * st;
            }
        }
        mu[i][i] = 1.0;
        bn[i] = dot(&v, &v);
        star.push(v);
    }
    (mu, bn)
}

/// LLL-reduces the columns of `basis` with Lovász parameter `delta`.
pub fn lll_reduce(basis: &RMat, delta: f64) -> LllOutput {
    let n = basis.ncols();
    let mut b: Vec<Vec<f64>> = (0..n)
        .map(|j| basis.column(j).iter().copied().collect())
        .collect();
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..n).map(|i| i64::from(i == j)).collect())
        .collect();
    if n <= 1 {
        return LllOutput {
            reduced: basis.clone(),
            unimodular: u,
        };
    }
    let (mut mu, mut bn) = gram_schmidt(&b);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let (bj, uj) = (b[j].clone(), u[j].clone());
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
                for (x, y) in u[k].iter_mut().zip(&uj) {
                    *x -= qi * y;
                }
                for l in 0..=j {
                    mu[k][l] -= q * mu[j][l];
                }
            }
        }
        if bn[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bn[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            let gs = gram_schmidt(&b);
            mu = gs.0;
            bn = gs.1;
            k = (k - 1).max(1);
        }
    }
    let reduced = RMat::from_fn(basis.nrows(), n, |i, j| b[j][i]);
    LllOutput {
        reduced,
        unimodular: u,
    }
}
