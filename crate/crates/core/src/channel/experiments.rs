//! Fixed-channel Monte Carlo experiments: Bob's error probability against the union and
//! Banaszczyk bounds, Eve's reduced observation, and the per-message variational distance
//! of Eve's observation to the Gaussian `f_{√Σ_0}`.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rand::Rng;

use super::mmse::Decoder;
use super::{block_kron, complex_noise};
use crate::error::{Error, Result};
use crate::gauss::checks::BOOTSTRAP_REPLICATES;
use crate::gauss::{
    banaszczyk_constant, flatness_factor, flatness_factor_sigma, theta_sum, GaussianSpec,
};
use crate::lattice::{min_distance, product_distance};
use crate::linalg::{complex_to_real, real_to_complex, CMat, CVec};
use crate::montecarlo::run_blocks;
use crate::stats::{default_bins, l1_against_uniform, l1_between, EqualMassBinner, L1Report};
use crate::wiretap::rates::log_det_gain;
use crate::wiretap::secrecy::{dual_minimum, faded_lattice};
use crate::wiretap::Encoder;

/// Outcome of [`error_prob_mc`].
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub trials: u64,
    pub errors: u64,
    /// Empirical message error probability.
    pub p_e_hat: f64,
    pub se: f64,
    /// `Σ_{λ∈RΛ_b\{0}} exp(−‖λ‖²/4σ_b²)`; `None` if too many points to enumerate.
    pub union_sum: Option<f64>,
    /// `ε_{Λ_e}(σ_s)`, the subgaussian constant of the shaping distribution.
    pub subgaussian_eps: f64,
    /// `(1+ε)/(1−ε)·union_sum` (infinite when the sum is unavailable or `ε ≥ 1`).
    pub union_bound: f64,
    /// `λ1(RΛ_b)`.
    pub lambda1_received: f64,
    /// Largest `c` with `τ = 1/√(4πσ_b²) ≥ √N·c/λ1(RΛ_b)` (`N` real dimensions).
    pub tau_c: f64,
    /// `C(c)^N/(1 − C(c)^N)` at `c = tau_c` when `tau_c > 1/√(2π)`.
    pub eps_k: Option<f64>,
    /// `(1+ε)/(1−ε)·eps_k`.
    pub banaszczyk_bound: Option<f64>,
    /// `(1/k)Σ ln det(I + ρ_b H_i†H_i)`.
    pub gain_stat: f64,
    /// Rate conditions `R + R' < C̄_b − n ln(4n/(πe)) + ln g_b` and `R' > n ln(ne/π) − ln g_e`
    /// with the code's own constants `g_b = δ(Λ_b)^{2/k}`, `g_e = δ(Λ_e^*)^{2/k}`.
    pub rate_condition_met: bool,
    /// `p_e_hat ≤ union_bound + 3·se`.
    pub bound_holds: bool,
}

/// Monte Carlo of encode → channel → MAP decode over the fixed blocks `H_{b,i}` with noise
/// variance `σ_b²`, together with the analytic bounds.
pub fn error_prob_mc(
    enc: &Encoder<'_>,
    blocks: &[CMat],
    noise_var: f64,
    trials: u64,
    seed: u64,
) -> Result<ErrorReport> {
    if trials < 1000 {
        return Err(Error::InvalidArgument(
            "at least 1000 trials are required".into(),
        ));
    }
    let code = enc.code();
    let n = code.antennas();
    let s2 = code.sigma_s().powi(2);
    let rho = s2 / noise_var;
    let decoder = Decoder::new(code, blocks, rho)?;
    let hv = block_kron(blocks, n);
    let messages = code.messages();
    let errors = run_blocks(
        seed,
        0,
        trials,
        || Ok(0u64),
        |rng, count, acc: &mut Result<u64>| {
            for _ in 0..count {
                let m = rng.random_range(0..messages);
                let x = enc.sampler(m).sample(rng);
                let y = &hv * real_to_complex(&x) + complex_noise(rng, hv.nrows(), noise_var);
                match decoder.decode(&y) {
                    Ok((mh, _)) => {
                        if let Ok(e) = acc.as_mut() {
                            *e += u64::from(mh != m);
                        }
                    }
                    Err(err) => *acc = Err(err),
                }
            }
        },
        |a, b| Ok(a? + b?),
    )?;
    let p = errors as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64)
        .sqrt()
        .max(1.0 / trials as f64);

    let received = decoder.received_lattice();
    let union_sum = theta_sum(received, 1.0 / (4.0 * noise_var), 1e-12)
        .ok()
        .map(|t| t.upper());
    let subgaussian_eps = flatness_factor_sigma(code.lambda_e(), code.sigma_s(), 1e-13)?;
    let factor = if subgaussian_eps < 1.0 {
        (1.0 + subgaussian_eps) / (1.0 - subgaussian_eps)
    } else {
        f64::INFINITY
    };
    let union_bound = union_sum.map_or(f64::INFINITY, |u| factor * u);
    let lambda1_received = min_distance(received, 0.0)?.lambda1;
    let dimr = received.dim_real() as f64;
    let tau = 1.0 / (4.0 * PI * noise_var).sqrt();
    let tau_c = tau * lambda1_received / dimr.sqrt();
    let eps_k = (tau_c > 1.0 / (2.0 * PI).sqrt()).then(|| {
        let cn = banaszczyk_constant(tau_c).powf(dimr);
        cn / (1.0 - cn)
    });
    let banaszczyk_bound = eps_k.map(|e| factor * e);

    let k = code.blocks() as f64;
    let nf = n as f64;
    let gain_stat = blocks.iter().map(|h| log_det_gain(h, rho)).sum::<f64>() / k;
    let g_b = match code.matrix_b() {
        Some(m) => m.pdet_min()?.delta.powf(2.0 / k),
        None => product_distance(code.lambda_b())?.np.powf(2.0 / k),
    };
    let (_, g_e) = dual_minimum(code)?;
    let rate_condition_met = code.rate() + code.rate_aux()
        < gain_stat - nf * (4.0 * nf / (PI * E)).ln() + g_b.ln()
        && code.rate_aux() > nf * (nf * E / PI).ln() - g_e.ln();
    Ok(ErrorReport {
        trials,
        errors,
        p_e_hat: p,
        se,
        union_sum,
        subgaussian_eps,
        union_bound,
        lambda1_received,
        tau_c,
        eps_k,
        banaszczyk_bound,
        gain_stat,
        rate_condition_met,
        bound_holds: p <= union_bound + 3.0 * se,
    })
}

/// Unitary reduction of Eve's tall channel blocks.
#[derive(Clone, Debug)]
pub struct EveReduction {
    /// Full unitary `Q_i` (`n_e × n_e`) per block.
    pub q_blocks: Vec<CMat>,
    /// Square upper-triangular `R'_i` (`n × n`) with `H_i = Q_i [R'_i; 0]`.
    pub r_blocks: Vec<CMat>,
    pub n_tx: usize,
    pub n_rx: usize,
}

impl EveReduction {
    /// QR-reduces every block; fails on rank-deficient blocks.
    pub fn new(blocks: &[CMat]) -> Result<Self> {
        let (ne, n) = blocks
            .first()
            .ok_or_else(|| Error::Shape("no channel blocks".into()))?
            .shape();
        if ne < n {
            return Err(Error::Shape(format!("Eve has {ne} < {n} antennas")));
        }
        let mut q_blocks = Vec::new();
        let mut r_blocks = Vec::new();
        for h in blocks {
            if h.shape() != (ne, n) {
                return Err(Error::Shape("channel blocks differ in shape".into()));
            }
            // QR of [H | I] yields a full unitary Q whose first n columns span H.
            let mut aug = CMat::zeros(ne, n + ne);
            aug.view_mut((0, 0), (ne, n)).copy_from(h);
            aug.view_mut((0, n), (ne, ne)).fill_with_identity();
            let qr = aug.qr();
            let r = qr.r().view((0, 0), (n, n)).clone_owned();
            if r.determinant().norm() < 1e-12 * h.camax().max(1e-300).powi(n as i32) {
                return Err(Error::InvalidArgument(
                    "rank-deficient eavesdropper block".into(),
                ));
            }
            q_blocks.push(qr.q());
            r_blocks.push(r);
        }
        Ok(Self {
            q_blocks,
            r_blocks,
            n_tx: n,
            n_rx: ne,
        })
    }
}

/// One observation of Eve.
#[derive(Clone, Debug, PartialEq)]
pub struct EveObservation {
    /// `z = (H ⊗ I_n)x + w`.
    pub z: CVec,
    /// `Z' = (R' ⊗ I_n)x + w'`: the first `n` rows of `Q_i†Z_i` in every block.
    pub reduced: CVec,
    /// The remaining `n_e − n` rows per block (pure noise).
    pub discarded: CVec,
}

/// Transmits message `m` to Eve and applies the `Q†` reduction.
pub fn eve_observe<R: Rng + ?Sized>(
    enc: &Encoder<'_>,
    m: usize,
    reduction: &EveReduction,
    noise_var: f64,
    rng: &mut R,
) -> Result<EveObservation> {
    let code = enc.code();
    let n = code.antennas();
    let ne = reduction.n_rx;
    let blocks: Vec<CMat> = reduction
        .q_blocks
        .iter()
        .zip(&reduction.r_blocks)
        .map(|(q, r)| {
            let mut full = CMat::zeros(ne, n);
            full.view_mut((0, 0), (n, n)).copy_from(r);
            q * full
        })
        .collect();
    let hv = block_kron(&blocks, n);
    let x = real_to_complex(&enc.encode(m, rng)?);
    let z = &hv * x + complex_noise(rng, hv.nrows(), noise_var);
    let rotated = block_kron(&reduction.q_blocks, n).adjoint() * &z;
    let per_block = ne * n;
    let keep = n * n;
    let k = reduction.q_blocks.len();
    let reduced = CVec::from_fn(k * keep, |t, _| rotated[(t / keep) * per_block + t % keep]);
    let drop = per_block - keep;
    let discarded = CVec::from_fn(k * drop, |t, _| {
        rotated[(t / drop.max(1)) * per_block + keep + t % drop.max(1)]
    });
    Ok(EveObservation {
        z,
        reduced,
        discarded,
    })
}

/// Outcome of [`leakage_estimate`].
#[derive(Clone, Debug, PartialEq)]
pub struct LeakageReport {
    /// Binned L1 distance of `p_{z'|m}` to `f_{√Σ_0}` for every message.
    pub per_message: Vec<L1Report>,
    /// Largest debiased distance over messages.
    pub v_max: f64,
    /// Bootstrap standard error of that message's estimate.
    pub v_max_se: f64,
    /// Largest raw (biased) distance over messages.
    pub raw_max: f64,
    /// Raw L1 distance between the histograms of messages 0 and 1.
    pub pairwise: f64,
    /// `ε_{√Σ^{-1}R'Λ_e}(1)`.
    pub epsilon: f64,
    /// `4ε`.
    pub bound: f64,
    /// `ε ≤ 1/2` (otherwise the bound is vacuous).
    pub smooth: bool,
    /// `v_max ≤ bound + 3·v_max_se`.
    pub passes: bool,
}

/// Estimates `V(p_{z'|H_e,M=m}, f_{√Σ_0})` for each message with `trials` samples each.
pub fn leakage_estimate(
    enc: &Encoder<'_>,
    blocks: &[CMat],
    noise_var: f64,
    trials: u64,
    seed: u64,
) -> Result<LeakageReport> {
    let code = enc.code();
    let dimc = code.dim_complex();
    if dimc > 2 {
        return Err(Error::InvalidArgument(format!(
            "density estimation needs complex dimension ≤ 2, got {dimc}"
        )));
    }
    let reduction = EveReduction::new(blocks)?;
    let (faded, cov) = faded_lattice(code, &reduction.r_blocks, noise_var)?;
    let epsilon = flatness_factor(&faded, &GaussianSpec::correlated(cov)?, 1e-13)?;
    let n = code.antennas();
    let t = block_kron(&reduction.r_blocks, n);
    let s2 = code.sigma_s().powi(2);
    let cov0 = &t * t.adjoint() * Complex64::new(s2, 0.0)
        + CMat::identity(dimc, dimc) * Complex64::new(noise_var, 0.0);
    let binner = EqualMassBinner::new(&cov0, default_bins(dimc))?;
    let cells = binner.cells();
    let counts: Vec<Vec<u64>> = (0..code.messages())
        .map(|m| {
            run_blocks(
                seed,
                m as u64,
                trials,
                || vec![0u64; cells],
                |rng, count, acc| {
                    for _ in 0..count {
                        let x = real_to_complex(&enc.sampler(m).sample(rng));
                        let z = &t * x + complex_noise(rng, dimc, noise_var);
                        acc[binner.cell(&complex_to_real(&z))] += 1;
                    }
                },
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
        })
        .collect();
    let per_message: Vec<L1Report> = counts
        .iter()
        .enumerate()
        .map(|(m, c)| l1_against_uniform(c, BOOTSTRAP_REPLICATES, seed ^ (0xB007 + m as u64)))
        .collect();
    let worst = per_message
        .iter()
        .max_by(|a, b| a.debiased.total_cmp(&b.debiased))
        .expect("at least one message");
    let raw_max = per_message.iter().map(|r| r.l1).fold(0.0, f64::max);
    let pairwise = if counts.len() > 1 {
        l1_between(&counts[0], &counts[1])
    } else {
        0.0
    };
    let bound = 4.0 * epsilon;
    Ok(LeakageReport {
        v_max: worst.debiased,
        v_max_se: worst.se,
        raw_max,
        pairwise,
        epsilon,
        bound,
        smooth: epsilon <= 0.5,
        passes: worst.debiased <= bound + 3.0 * worst.se,
        per_message,
    })
}
