//! Finite-length secrecy ingredients of a wiretap code.
//!
//! * [`power_check`] and [`entropy_check`]: with `θ_t = (π − t)/π` and
//!   `ε = ε_{Λ_e}(√θ_t σ_s) < 1`, the transmitted energy satisfies
//!   `|E‖x‖² − Nσ_s²| ≤ 2πε/(1−ε)·σ_s²` and the per-dimension entropy of the shaping
//!   randomness lies within `ν_t(ε) = −ln(1−ε) + πε(1 + t^{−4})/(1−ε)` of
//!   `ln(πeσ_s²) − ln V(Λ_e)/N` (`N` complex dimensions).
//! * [`secrecy_threshold_check`]: for a fixed eavesdropper channel, the exact flatness factor
//!   `ε_{√Σ^{-1}H_eΛ_e}(1)` with `Σ^{-1} = (H_eH_e†)^{-1}/σ_s² + I/σ_e²`, the leakage bound
//!   `8NεR − 8ε ln 8ε` and the sufficient condition
//!   `2c√n·e^{C̄_e/2n} / (√(2π)·pdet(Λ_e^*)^{1/nk}·σ_s) ≤ 1`.

use std::collections::HashMap;
use std::f64::consts::{E, PI};

use nalgebra::Complex;
use rand::Rng;

use super::rates::log_det_gain;
use super::{Encoder, WiretapCode};
use crate::error::{Error, Result};
use crate::gauss::{banaszczyk_constant, flatness_factor, flatness_factor_sigma, GaussianSpec};
use crate::lattice::{devectorize, product_distance, Lattice, MatrixLattice, Provenance};
use crate::linalg::{herm_pow, kron, real_to_complex, CMat};
use crate::montecarlo::run_blocks;

/// Tail tolerance used for all flatness evaluations in this module.
const TAIL_TOL: f64 = 1e-13;

/// `ν_t(ε) = −ln(1−ε) + πε(1 + 1/t⁴)/(1−ε)`.
pub fn nu_t(eps: f64, t: f64) -> f64 {
    -(1.0 - eps).ln() + PI * eps * (1.0 + t.powi(-4)) / (1.0 - eps)
}

fn theta_flatness(code: &WiretapCode, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t < PI) {
        return Err(Error::InvalidArgument(format!("t = {t} outside (0, π)")));
    }
    let theta = (PI - t) / PI;
    let eps = flatness_factor_sigma(code.lambda_e(), theta.sqrt() * code.sigma_s(), TAIL_TOL)?;
    if eps >= 1.0 {
        return Err(Error::NotSmoothEnough {
            epsilon: eps,
            limit: 1.0,
        });
    }
    Ok((theta, eps))
}

/// Transmit-power check.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerCheck {
    pub t: f64,
    pub theta: f64,
    /// `ε_{Λ_e}(√θ_t σ_s)`.
    pub epsilon: f64,
    /// `2πε_t/(1−ε)·σ_s²` with `ε_t = (1 + t^{-4})ε` for `t < 1/e`, else `ε_t = ε`.
    pub bound: f64,
    /// `2πε/(1−ε)·σ_s²`, the form without the `t`-dependent factor (valid for `t ≥ 1/e`).
    pub bound_displayed: f64,
    /// `Nσ_s²`.
    pub nominal: f64,
    /// `max_m |E_m‖x‖² − Nσ_s²|` under the exact (truncated) laws.
    pub exact_max_dev: f64,
    /// Empirical `E‖x‖²` with uniformly drawn messages.
    pub empirical_mean: f64,
    pub empirical_se: f64,
    pub holds_exact: bool,
    /// `|empirical_mean − nominal| ≤ bound + 3·se`.
    pub holds_empirical: bool,
}

/// Compares the transmitted energy with `Nσ_s²`.
pub fn power_check(enc: &Encoder<'_>, t: f64, trials: u64, seed: u64) -> Result<PowerCheck> {
    let code = enc.code();
    let (theta, epsilon) = theta_flatness(code, t)?;
    let s2 = code.sigma_s().powi(2);
    let bound_displayed = 2.0 * PI * epsilon / (1.0 - epsilon) * s2;
    // The discrete-Gaussian second-moment lemma needs ε_t = (1 + t^{-4})ε when t < 1/e.
    let eps_t = if t < 1.0 / E {
        (1.0 + t.powi(-4)) * epsilon
    } else {
        epsilon
    };
    let bound = 2.0 * PI * eps_t / (1.0 - epsilon) * s2;
    let nominal = code.dim_complex() as f64 * s2;
    let exact_max_dev = (0..code.messages())
        .map(|m| (enc.sampler(m).expectation(|x| x.norm_squared()) - nominal).abs())
        .fold(0.0, f64::max);
    let m_count = code.messages();
    let (sum, sum2) = run_blocks(
        seed,
        0,
        trials,
        || (0.0f64, 0.0f64),
        |rng, n, acc| {
            for _ in 0..n {
                let m = rng.random_range(0..m_count);
                let e = enc.sampler(m).sample(rng).norm_squared();
                acc.0 += e;
                acc.1 += e * e;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let nf = trials as f64;
    let mean = sum / nf;
    let se = ((sum2 / nf - mean * mean).max(0.0) / nf).sqrt();
    Ok(PowerCheck {
        t,
        theta,
        epsilon,
        bound,
        bound_displayed,
        nominal,
        exact_max_dev,
        empirical_mean: mean,
        empirical_se: se,
        holds_exact: exact_max_dev <= bound,
        holds_empirical: (mean - nominal).abs() <= bound + 3.0 * se,
    })
}

/// Entropy check of the shaping randomness for one message.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyCheck {
    pub epsilon: f64,
    /// `ν_t(ε)`.
    pub nu: f64,
    /// `ln(πeσ_s²) − ln V(Λ_e)/N`.
    pub target: f64,
    /// Entropy per complex dimension of the truncated law (computed from its weights).
    pub truncated: f64,
    /// Miller–Madow plug-in estimate per complex dimension from sampled points.
    pub plug_in: f64,
    pub plug_in_se: f64,
    /// Number of distinct points observed.
    pub support_seen: usize,
    pub holds_truncated: bool,
    /// `|plug_in − target| ≤ ν + 3·se`.
    pub holds_plug_in: bool,
}

/// Compares the entropy of `D_{Λ_e+λ_m,σ_s}` with its continuous approximation.
pub fn entropy_check(
    enc: &Encoder<'_>,
    m: usize,
    t: f64,
    trials: u64,
    seed: u64,
) -> Result<EntropyCheck> {
    let code = enc.code();
    if m >= code.messages() {
        return Err(Error::InvalidArgument(format!("message {m} out of range")));
    }
    let (_, epsilon) = theta_flatness(code, t)?;
    let nu = nu_t(epsilon, t);
    let dimc = code.dim_complex() as f64;
    let target = (PI * E * code.sigma_s().powi(2)).ln() - code.lambda_e().volume().ln() / dimc;
    let sampler = enc.sampler(m);
    let truncated = sampler.entropy() / dimc;
    let counts = run_blocks(
        seed,
        1,
        trials,
        HashMap::<usize, u64>::new,
        |rng, n, acc| {
            for _ in 0..n {
                *acc.entry(sampler.sample_index(rng)).or_insert(0) += 1;
            }
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    );
    let nf = trials as f64;
    let mut h = 0.0;
    let mut h2 = 0.0;
    let mut keys: Vec<_> = counts.keys().copied().collect();
    keys.sort_unstable();
    for k in &keys {
        let p = counts[k] as f64 / nf;
        h -= p * p.ln();
        h2 += p * p.ln() * p.ln();
    }
    let se = ((h2 - h * h).max(0.0) / nf).sqrt() / dimc;
    let plug_in = (h + (keys.len() as f64 - 1.0) / (2.0 * nf)) / dimc;
    Ok(EntropyCheck {
        epsilon,
        nu,
        target,
        truncated,
        plug_in,
        plug_in_se: se,
        support_seen: keys.len(),
        holds_truncated: (truncated - target).abs() <= nu,
        holds_plug_in: (plug_in - target).abs() <= nu + 3.0 * se,
    })
}

/// Options of the secrecy check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecrecyOptions {
    /// Banaszczyk parameter `c > 1/√(2π)`.
    pub c: f64,
}

impl Default for SecrecyOptions {
    fn default() -> Self {
        Self { c: 1.0 }
    }
}

/// Secrecy ingredients for a fixed eavesdropper channel.
#[derive(Clone, Debug, PartialEq)]
pub struct SecrecyReport {
    /// Exact flatness factor `ε_{√Σ^{-1}H_eΛ_e}(1)`.
    pub epsilon: f64,
    /// Banaszczyk value `ε_k = C^{2N}/(1 − C^{2N})` at the configured `c`.
    pub epsilon_k: f64,
    /// `8NεR − 8ε ln 8ε` with the exact `ε`; infinite (vacuous) when `ε > 1/2`.
    pub leakage_bound: f64,
    /// The same bound evaluated at `ε_k`.
    pub leakage_bound_k: f64,
    /// `C̄_e = (1/k)Σ ln det(I + ρ_e H_{e,i}†H_{e,i})`.
    pub gain_stat: f64,
    /// `pdet(Λ_e^*)` (product distance `p(Λ_e^*)` for single-antenna codes).
    pub dual_min: f64,
    /// Dual constant `δ(Λ_e^*)^{2/k}` (`Np(Λ_e^*)^{2/k}` for single-antenna codes).
    pub g_e: f64,
    /// Left-hand side of the sufficient condition (≤ 1 required).
    pub condition_value: f64,
    pub condition_met: bool,
    /// `C̄_e + 2n ln(c√(2ne)) − ln g_e`: the auxiliary rate at which the condition binds.
    pub r_prime_threshold: f64,
}

/// `8NεR − 8ε ln 8ε` (zero at `ε = 0`, infinite when `ε > 1/2`).
pub fn leakage_bound(eps: f64, dim_complex: usize, rate: f64) -> f64 {
    if eps > 0.5 {
        f64::INFINITY
    } else if eps <= 0.0 {
        0.0
    } else {
        8.0 * dim_complex as f64 * eps * rate - 8.0 * eps * (8.0 * eps).ln()
    }
}

/// Reduces a tall block `n_e × n` to its square `n × n` QR factor (identity for square blocks).
pub fn square_block(h: &CMat) -> Result<CMat> {
    let (r, c) = h.shape();
    if r < c {
        return Err(Error::Shape(format!(
            "block {r}×{c} has fewer receive than transmit antennas"
        )));
    }
    if r == c {
        return Ok(h.clone());
    }
    Ok(h.clone().qr().r())
}

/// Block-diagonal matrix from square blocks.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(total, total);
    let mut o = 0;
    for b in blocks {
        out.view_mut((o, o), b.shape()).copy_from(b);
        o += b.nrows();
    }
    out
}

/// Minimum of `|pdet|` over the dual of `Λ_e` viewed as a matrix lattice with block size `n`.
pub fn dual_minimum(code: &WiretapCode) -> Result<(f64, f64)> {
    let dual = code.lambda_e().dual()?;
    let n = code.antennas();
    let k = code.blocks() as f64;
    if n == 1 {
        let pd = product_distance(&dual)?;
        return Ok((pd.p, pd.np.powf(2.0 / k)));
    }
    let gens = (0..dual.dim_real())
        .map(|j| devectorize(&real_to_complex(&dual.basis().column(j).clone_owned()), n))
        .collect::<Result<Vec<_>>>()?;
    let pm = MatrixLattice::new(gens, n, Provenance::Explicit)?.pdet_min()?;
    Ok((pm.pdet, pm.delta.powf(2.0 / k)))
}

/// The faded Eve lattice `(H ⊗ I_n)Λ_e` and its covariance `Σ ⊗ I_n` for square blocks.
pub fn faded_lattice(
    code: &WiretapCode,
    blocks: &[CMat],
    sigma_e2: f64,
) -> Result<(Lattice, CMat)> {
    let n = code.antennas();
    if blocks.len() != code.blocks() || blocks.iter().any(|b| b.shape() != (n, n)) {
        return Err(Error::Shape(format!(
            "need {} square {n}×{n} channel blocks",
            code.blocks()
        )));
    }
    let h = block_diag(blocks);
    let eye_n = CMat::identity(n, n);
    let faded = code.lambda_e().transformed_complex(&kron(&h, &eye_n))?;
    let hh = &h * h.adjoint();
    let nk = h.nrows();
    let s2 = code.sigma_s().powi(2);
    let inv = herm_pow(&hh, -1.0)? * Complex::new(1.0 / s2, 0.0)
        + CMat::identity(nk, nk) * Complex::new(1.0 / sigma_e2, 0.0);
    let sigma = herm_pow(&inv, -1.0)?;
    Ok((faded, kron(&sigma, &eye_n)))
}

/// Secrecy ingredients for Eve's channel blocks `H_{e,i}` (each `n_e × n`, `n_e ≥ n`) and
/// noise variance `σ_e²`. Tall blocks are first reduced to their square QR factors.
pub fn secrecy_threshold_check(
    code: &WiretapCode,
    blocks: &[CMat],
    sigma_e2: f64,
    opts: &SecrecyOptions,
) -> Result<SecrecyReport> {
    let c = opts.c;
    if !(c > 1.0 / (2.0 * PI).sqrt()) {
        return Err(Error::InvalidArgument(format!(
            "c = {c} must exceed 1/√(2π)"
        )));
    }
    if !(sigma_e2 > 0.0) {
        return Err(Error::InvalidArgument("σ_e² must be positive".into()));
    }
    let squares = blocks
        .iter()
        .map(square_block)
        .collect::<Result<Vec<_>>>()?;
    let (faded, cov) = faded_lattice(code, &squares, sigma_e2)?;
    let epsilon = flatness_factor(&faded, &GaussianSpec::correlated(cov)?, TAIL_TOL)?;
    let dimc = code.dim_complex();
    let cn = banaszczyk_constant(c).powi(2 * dimc as i32);
    let epsilon_k = cn / (1.0 - cn);
    let rho_e = code.sigma_s().powi(2) / sigma_e2;
    let k = code.blocks() as f64;
    let nf = code.antennas() as f64;
    let gain_stat = blocks.iter().map(|b| log_det_gain(b, rho_e)).sum::<f64>() / k;
    let (dual_min, g_e) = dual_minimum(code)?;
    let condition_value = 2.0 * c * nf.sqrt() * (gain_stat / (2.0 * nf)).exp()
        / ((2.0 * PI).sqrt() * dual_min.powf(1.0 / (nf * k)) * code.sigma_s());
    let r_prime_threshold = gain_stat + 2.0 * nf * (c * (2.0 * nf * E).sqrt()).ln() - g_e.ln();
    Ok(SecrecyReport {
        epsilon,
        epsilon_k,
        leakage_bound: leakage_bound(epsilon, dimc, code.rate()),
        leakage_bound_k: leakage_bound(epsilon_k, dimc, code.rate()),
        gain_stat,
        dual_min,
        g_e,
        condition_value,
        condition_met: condition_value <= 1.0,
        r_prime_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiretap::{build_code, BaseLattice, CodeParams};

    #[test]
    fn condition_matches_threshold() {
        let blocks = [CMat::identity(1, 1)];
        let probe = build_code(
            BaseLattice::Vector(Lattice::integer(1)),
            CodeParams::new(4f64.ln(), 1.0, 1.0),
        )
        .unwrap();
        let thr = secrecy_threshold_check(&probe, &blocks, 1.0, &SecrecyOptions::default())
            .unwrap()
            .r_prime_threshold;
        for (dr, met) in [(0.05, true), (-0.05, false)] {
            let code = build_code(
                BaseLattice::Vector(Lattice::integer(1)),
                CodeParams::new(4f64.ln(), thr + dr, 1.0),
            )
            .unwrap();
            let r =
                secrecy_threshold_check(&code, &blocks, 1.0, &SecrecyOptions::default()).unwrap();
            assert_eq!(r.condition_met, met);
            assert!((r.r_prime_threshold - thr).abs() < 1e-9);
        }
    }

    #[test]
    fn nu_vanishes_at_zero() {
        assert_eq!(nu_t(0.0, 0.1), 0.0);
        assert!(nu_t(1e-6, 0.1) > 0.0);
    }
}
