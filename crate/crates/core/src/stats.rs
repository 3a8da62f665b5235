//! Statistical estimators: equal-mass binned L1 distance, bootstrap errors and chi-square tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{herm_pow, realify, CMat, RMat, RVec};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Default bins per real dimension for a given complex dimension.
pub fn default_bins(k: usize) -> usize {
    match k {
        1 => 64,
        2 => 16,
        _ => 4,
    }
}

/// Partition of `C^k` into cells of equal mass under the complex Gaussian `f_{√Σ0}`.
///
/// Points are whitened by `Σ0^{-1/2}`; each real coordinate is then `N(0, 1/2)` under the
/// reference law and is mapped through the normal CDF into `bins` equal-mass intervals.
#[derive(Clone, Debug)]
pub struct EqualMassBinner {
    whiten: RMat,
    bins: usize,
    dims: usize,
}

impl EqualMassBinner {
    pub fn new(cov0: &CMat, bins: usize) -> Result<Self> {
        let whiten = realify(&herm_pow(cov0, -0.5)?);
        let dims = whiten.nrows();
        let cells = (bins as f64).powi(dims as i32);
        if cells > 1e8 {
            return Err(Error::InvalidArgument(format!("{cells} cells is too many")));
        }
        Ok(Self { whiten, bins, dims })
    }

    /// Total number of cells.
    pub fn cells(&self) -> usize {
        self.bins.pow(self.dims as u32)
    }

    /// Cell index of a real-coordinate point.
    pub fn cell(&self, x: &RVec) -> usize {
        let u = &self.whiten * x;
        let mut idx = 0usize;
        for &c in u.iter() {
            let q = normal_cdf(c * std::f64::consts::SQRT_2);
            let b = ((q * self.bins as f64) as usize).min(self.bins - 1);
            idx = idx * self.bins + b;
        }
        idx
    }
}

/// `E|X − np|` for `X ~ Binomial(n, p)` (de Moivre's closed form).
pub fn binomial_mean_abs_dev(n: u64, p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 || n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let nu = (nf * p).floor() + 1.0;
    if nu > nf {
        return 0.0;
    }
    let ln = std::f64::consts::LN_2 + nu.ln() + ln_gamma(nf + 1.0)
        - ln_gamma(nu + 1.0)
        - ln_gamma(nf - nu + 1.0)
        + nu * p.ln()
        + (nf - nu + 1.0) * (1.0 - p).ln();
    ln.exp()
}

/// Binned L1 distance between an empirical law and the uniform cell law.
#[derive(Clone, Debug, PartialEq)]
pub struct L1Report {
    /// Raw statistic `Σ_j |p̂_j − p_j|`.
    pub l1: f64,
    /// Expected value of the statistic under exact sampling from the reference (noise floor).
    pub floor: f64,
    /// `l1 − floor`.
    pub debiased: f64,
    /// Poisson-bootstrap standard error of the statistic.
    pub se: f64,
    pub samples: u64,
}

fn l1_uniform(counts: &[f64], total: f64) -> f64 {
    let p = 1.0 / counts.len() as f64;
    counts.iter().map(|&c| (c / total - p).abs()).sum()
}

/// L1 distance of cell counts to the uniform law over the cells, with its noise floor and
/// bootstrap standard error (`replicates` Poisson resamples seeded by `seed`).
pub fn l1_against_uniform(counts: &[u64], replicates: usize, seed: u64) -> L1Report {
    let n: u64 = counts.iter().sum();
    let cf: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let l1 = l1_uniform(&cf, n as f64);
    let m = counts.len() as f64;
    let floor = m * binomial_mean_abs_dev(n, 1.0 / m) / n as f64;
    let se = bootstrap_se(counts, replicates, seed, |c, t| l1_uniform(c, t));
    L1Report {
        l1,
        floor,
        debiased: l1 - floor,
        se,
        samples: n,
    }
}

/// Poisson bootstrap standard error of a statistic of cell counts.
pub fn bootstrap_se<F>(counts: &[u64], replicates: usize, seed: u64, stat: F) -> f64
where
    F: Fn(&[f64], f64) -> f64,
{
    if replicates < 2 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals = Vec::with_capacity(replicates);
    let mut buf = vec![0.0; counts.len()];
    for _ in 0..replicates {
        let mut total = 0.0;
        for (b, &c) in buf.iter_mut().zip(counts) {
            *b = if c == 0 {
                0.0
            } else {
                Poisson::new(c as f64)
                    .expect("positive rate")
                    .sample(&mut rng)
            };
            total += *b;
        }
        vals.push(stat(&buf, total.max(1.0)));
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
}

/// L1 distance between two empirical cell laws.
pub fn l1_between(a: &[u64], b: &[u64]) -> f64 {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64 / na as f64 - y as f64 / nb as f64).abs())
        .sum()
}

/// Pearson chi-square goodness-of-fit outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson test of observed counts against expected counts; cells with expectation below
/// `min_expected` are pooled into one cell.
pub fn chi_square(
    observed: &[f64],
    expected: &[f64],
    min_expected: f64,
) -> Result<ChiSquareReport> {
    if observed.len() != expected.len() {
        return Err(Error::Shape("observed/expected length mismatch".into()));
    }
    let (mut o_pool, mut e_pool) = (0.0, 0.0);
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e < min_expected {
            o_pool += o;
            e_pool += e;
        } else {
            stat += (o - e) * (o - e) / e;
            cells += 1;
        }
    }
    if e_pool > 0.0 {
        if e_pool >= min_expected || cells == 0 {
            stat += (o_pool - e_pool) * (o_pool - e_pool) / e_pool;
            cells += 1;
        } else {
            // Too little pooled mass for its own cell: only a gross excess is informative.
            stat += (o_pool - e_pool).max(0.0).powi(2) / min_expected;
        }
    }
    let dof = cells.saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(ChiSquareReport {
        statistic: stat,
        dof,
        p_value: 1.0 - dist.cdf(stat),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_absolute_deviation_small_cases() {
        assert!((binomial_mean_abs_dev(1, 0.5) - 0.5).abs() < 1e-12);
        // n = 2, p = 1/2: E|X − 1| = 1/2.
        assert!((binomial_mean_abs_dev(2, 0.5) - 0.5).abs() < 1e-12);
        // Normal approximation for large n: sqrt(2np(1−p)/π).
        let v = binomial_mean_abs_dev(1_000_000, 0.01);
        let approx = (2.0 * 1e6 * 0.01 * 0.99 / std::f64::consts::PI).sqrt();
        assert!((v / approx - 1.0).abs() < 1e-3);
    }

    #[test]
    fn chi_square_of_exact_counts_is_zero() {
        let r = chi_square(&[10.0, 20.0, 30.0], &[10.0, 20.0, 30.0], 5.0).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value > 0.999);
    }

    #[test]
    fn cdf_symmetry() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.3) + normal_cdf(-1.3) - 1.0).abs() < 1e-15);
    }
}
