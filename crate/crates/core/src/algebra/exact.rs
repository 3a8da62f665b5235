//! Exact rational linear algebra and complex polynomial roots used by the algebraic factories.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

/// Square rational matrix stored as rows.
pub type QMat = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Determinant by Gaussian elimination over `Q`.
pub fn det(m: &QMat) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[r][j] -= t;
            }
        }
    }
    d
}

/// Inverse by Gauss–Jordan elimination over `Q`.
pub fn inverse(m: &QMat) -> Result<QMat> {
    let n = m.len();
    let mut a = m.clone();
    let mut inv: QMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&r| !a[r][c].is_zero())
            .ok_or_else(|| Error::Consistency("singular rational matrix".into()))?;
        a.swap(p, c);
        inv.swap(p, c);
        let piv = a[c][c].clone();
        for j in 0..n {
            a[c][j] = &a[c][j] / &piv;
            inv[c][j] = &inv[c][j] / &piv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                let t = &f * &a[c][j];
                a[r][j] -= t;
                let t = &f * &inv[c][j];
                inv[r][j] -= t;
            }
        }
    }
    Ok(inv)
}

/// `Mᵀ` for a rational matrix.
pub fn transpose(m: &QMat) -> QMat {
    let n = m.len();
    let c = m.first().map_or(0, Vec::len);
    (0..c)
        .map(|j| (0..n).map(|i| m[i][j].clone()).collect())
        .collect()
}

/// Whether every entry is an integer.
pub fn is_integral(m: &QMat) -> bool {
    m.iter().flatten().all(|x| x.is_integer())
}

/// Absolute value of a rational.
pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Roots of a monic complex polynomial `c_0 + c_1 x + … + x^d` (coefficients low to high,
/// leading coefficient 1 included), by Durand–Kerner iteration followed by Newton polishing.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 || (coeffs[d] - Complex64::new(1.0, 0.0)).norm() > 1e-15 {
        return Err(Error::InvalidArgument(
            "polynomial must be monic of positive degree".into(),
        ));
    }
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let deriv = |z: Complex64| {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (j, &c)| {
                acc * z + c * j as f64
            })
    };
    let bound = 1.0 + coeffs[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| seed.powu(j as u32) * (bound / 2.0).min(1.0))
        .collect();
    for _ in 0..2000 {
        let mut change = 0.0f64;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..4 {
            let dp = deriv(*r);
            if dp.norm() == 0.0 {
                break;
            }
            *r -= eval(*r) / dp;
        }
    }
    let scale = 1.0
        + z.iter()
            .map(|r| r.norm())
            .fold(0.0, f64::max)
            .powi(d as i32);
    if z.iter().any(|&r| eval(r).norm() > 1e-10 * scale) {
        return Err(Error::Consistency("root finder did not converge".into()));
    }
    Ok(z)
}
