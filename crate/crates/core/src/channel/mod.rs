//! Block-fading wiretap channel simulation.
//!
//! A channel realisation is a list of `k` blocks `H_i ∈ M_{n_rx×n_tx}(C)`; the codeword
//! `X ∈ M_{n_tx k × n_tx}(C)` (or `x ∈ C^k` for one antenna) is received as
//! `Y_i = H_i X_i + W_i` with i.i.d. `CN(0, σ²)` noise. In vectorised form
//! `y = (H ⊗ I_n) x + w` with `H = diag(H_1, …, H_k)`.

pub mod experiments;
pub mod mmse;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::exponential::integral;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::montecarlo::run_blocks;
use crate::wiretap::rates::log_det_gain;

pub use experiments::EveReduction;
pub use experiments::{
    error_prob_mc, eve_observe, leakage_estimate, ErrorReport, EveObservation, LeakageReport,
};
pub use mmse::{decode_map, mmse_gdfe, Decoder, MmseGdfe};

/// Time law of the fading blocks.
#[derive(Clone, Debug, PartialEq)]
pub enum FadingLaw {
    /// Every block equals the given matrix.
    Static(CMat),
    /// Independent blocks with i.i.d. `CN(0,1)` entries.
    RayleighIid,
    /// Draws from `law` held for `block_len` consecutive blocks.
    BlockFading {
        block_len: usize,
        law: Box<FadingLaw>,
    },
    /// A fixed sequence of blocks, repeated cyclically.
    Custom(Vec<CMat>),
    /// Symmetric Markov chain over `levels` that leaves its state with probability
    /// `switch_prob` per block (stationary start). Slow mixing makes the log-det average
    /// converge arbitrarily slowly.
    Markov { levels: Vec<CMat>, switch_prob: f64 },
}

/// Channel law, antenna counts, noise variance and SNR.
#[derive(Clone, Debug, PartialEq)]
pub struct FadingSpec {
    pub law: FadingLaw,
    pub n_tx: usize,
    pub n_rx: usize,
    /// `σ²` per complex dimension.
    pub noise_var: f64,
    /// `ρ = σ_s²/σ²`.
    pub snr: f64,
}

impl FadingSpec {
    /// Validates the law and its shapes.
    pub fn new(law: FadingLaw, n_tx: usize, n_rx: usize, noise_var: f64, snr: f64) -> Result<Self> {
        if n_tx == 0 || n_rx < n_tx {
            return Err(Error::InvalidArgument(format!(
                "need n_rx ≥ n_tx ≥ 1, got {n_rx}, {n_tx}"
            )));
        }
        if !(noise_var > 0.0 && snr > 0.0) {
            return Err(Error::InvalidArgument(
                "noise variance and SNR must be positive".into(),
            ));
        }
        check_law(&law, n_tx, n_rx)?;
        Ok(Self {
            law,
            n_tx,
            n_rx,
            noise_var,
            snr,
        })
    }

    /// Single-antenna static channel with gain `h`.
    pub fn siso_static(h: f64, noise_var: f64, snr: f64) -> Result<Self> {
        Self::new(
            FadingLaw::Static(CMat::from_element(1, 1, Complex64::new(h, 0.0))),
            1,
            1,
            noise_var,
            snr,
        )
    }
}

fn check_law(law: &FadingLaw, n_tx: usize, n_rx: usize) -> Result<()> {
    let shape_ok = |m: &CMat| m.shape() == (n_rx, n_tx);
    match law {
        FadingLaw::Static(h) if !shape_ok(h) => Err(Error::Shape("static block shape".into())),
        FadingLaw::BlockFading { block_len: 0, .. } => {
            Err(Error::InvalidArgument("block_len must be ≥ 1".into()))
        }
        FadingLaw::BlockFading { law, .. } => check_law(law, n_tx, n_rx),
        FadingLaw::Custom(seq) if seq.is_empty() || !seq.iter().all(shape_ok) => Err(Error::Shape(
            "custom sequence must be nonempty with matching shapes".into(),
        )),
        FadingLaw::Markov {
            levels,
            switch_prob,
        } => {
            if levels.len() < 2
                || !levels.iter().all(shape_ok)
                || !(0.0..=1.0).contains(switch_prob)
            {
                Err(Error::InvalidArgument(
                    "Markov law needs ≥ 2 levels and a probability".into(),
                ))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

/// A drawn channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub blocks: Vec<CMat>,
    /// `(1/k)Σ ln det(I + ρ H_i†H_i)`.
    pub stat: f64,
}

impl ChannelRealization {
    /// Builds a realisation from explicit blocks.
    pub fn from_blocks(blocks: Vec<CMat>, snr: f64) -> Self {
        let stat = blocks.iter().map(|h| log_det_gain(h, snr)).sum::<f64>() / blocks.len() as f64;
        Self { blocks, stat }
    }

    /// `H ⊗ I_n` acting on vectorised codewords.
    pub fn vectorised(&self, n: usize) -> CMat {
        block_kron(&self.blocks, n)
    }
}

/// `diag(B_1, …, B_k) ⊗ I_n` for equally shaped blocks.
pub fn block_kron(blocks: &[CMat], n: usize) -> CMat {
    let (r, c) = blocks[0].shape();
    let k = blocks.len();
    let mut out = CMat::zeros(r * k * n, c * k * n);
    for (i, h) in blocks.iter().enumerate() {
        for a in 0..r {
            for b in 0..c {
                for t in 0..n {
                    out[((i * r + a) * n + t, (i * c + b) * n + t)] = h[(a, b)];
                }
            }
        }
    }
    out
}

/// A `CN(0, σ²)` scalar.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// Vector of i.i.d. `CN(0, σ²)` entries.
pub fn complex_noise<R: Rng + ?Sized>(rng: &mut R, len: usize, var: f64) -> CVec {
    CVec::from_fn(len, |_, _| complex_normal(rng, var))
}

fn rayleigh_block<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| complex_normal(rng, 1.0))
}

fn draw_blocks<R: Rng + ?Sized>(
    law: &FadingLaw,
    n_tx: usize,
    n_rx: usize,
    k: usize,
    rng: &mut R,
) -> Vec<CMat> {
    match law {
        FadingLaw::Static(h) => vec![h.clone(); k],
        FadingLaw::RayleighIid => (0..k).map(|_| rayleigh_block(rng, n_rx, n_tx)).collect(),
        FadingLaw::BlockFading { block_len, law } => {
            let inner = draw_blocks(law, n_tx, n_rx, k.div_ceil(*block_len), rng);
            (0..k).map(|i| inner[i / block_len].clone()).collect()
        }
        FadingLaw::Custom(seq) => (0..k).map(|i| seq[i % seq.len()].clone()).collect(),
        FadingLaw::Markov {
            levels,
            switch_prob,
        } => {
            let mut state = rng.random_range(0..levels.len());
            (0..k)
                .map(|_| {
                    let h = levels[state].clone();
                    if rng.random::<f64>() < *switch_prob {
                        let step = rng.random_range(1..levels.len());
                        state = (state + step) % levels.len();
                    }
                    h
                })
                .collect()
        }
    }
}

/// Draws `k` blocks from the law of `spec`.
pub fn draw_channel<R: Rng + ?Sized>(
    spec: &FadingSpec,
    k: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be ≥ 1".into()));
    }
    let blocks = draw_blocks(&spec.law, spec.n_tx, spec.n_rx, k, rng);
    Ok(ChannelRealization::from_blocks(blocks, spec.snr))
}

/// Ergodic capacity `E[ln(1 + ρ|h|²)] = e^{1/ρ}E₁(1/ρ)` of single-antenna Rayleigh fading.
pub fn rayleigh_capacity(snr: f64) -> f64 {
    let x = 1.0 / snr;
    if x > 500.0 {
        // e^x E₁(x) ~ 1/x − 1/x² + 2/x³ for large x.
        return (1.0 - x.recip() + 2.0 * x.powi(-2)) / x;
    }
    x.exp() * integral(x, 1).expect("E1 converges for positive arguments")
}

/// `10^{dB/10}`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Deviation probability estimate at one block length.
#[derive(Clone, Debug, PartialEq)]
pub struct LlnPoint {
    pub k: usize,
    /// `P̂{|stat − C| > δ}`.
    pub p_hat: f64,
    pub se: f64,
    /// `k·P̂`.
    pub k_p_hat: f64,
}

/// Estimates `P{|(1/k)Σ ln det(I + ρH_i†H_i) − C| > δ}` for each `k` from `trials` draws.
pub fn lln_diagnostic(
    spec: &FadingSpec,
    capacity: f64,
    k_list: &[usize],
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<LlnPoint>> {
    if trials < 1000 {
        return Err(Error::InvalidArgument(
            "at least 1000 trials are required".into(),
        ));
    }
    k_list
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let hits = run_blocks(
                seed,
                i as u64,
                trials,
                || 0u64,
                |rng, n, acc| {
                    for _ in 0..n {
                        let r = draw_channel(spec, k, rng).expect("k ≥ 1");
                        if (r.stat - capacity).abs() > delta {
                            *acc += 1;
                        }
                    }
                },
                |a, b| a + b,
            );
            let p = hits as f64 / trials as f64;
            Ok(LlnPoint {
                k,
                p_hat: p,
                se: (p * (1.0 - p) / trials as f64).sqrt(),
                k_p_hat: k as f64 * p,
            })
        })
        .collect()
}

/// Direction of `k·P̂` across increasing block lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LlnTrend {
    /// Non-increasing with the last value strictly below the first.
    Decreasing,
    /// Non-decreasing.
    NonDecreasing,
    Mixed,
}

/// Classifies the `k·P̂` sequence of [`lln_diagnostic`] (points sorted by `k`).
pub fn lln_trend(points: &[LlnPoint]) -> LlnTrend {
    let v: Vec<f64> = points.iter().map(|p| p.k_p_hat).collect();
    let non_inc = v.windows(2).all(|w| w[1] <= w[0]);
    if non_inc && v.len() > 1 && v[v.len() - 1] < v[0] {
        LlnTrend::Decreasing
    } else if v.windows(2).all(|w| w[1] >= w[0]) {
        LlnTrend::NonDecreasing
    } else {
        LlnTrend::Mixed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn static_statistic() {
        let spec = FadingSpec::siso_static(1.0, 1.0, 3.0).unwrap();
        let r = draw_channel(&spec, 3, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!((r.stat - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn block_fading_repeats() {
        let spec = FadingSpec::new(
            FadingLaw::BlockFading {
                block_len: 4,
                law: Box::new(FadingLaw::RayleighIid),
            },
            1,
            1,
            1.0,
            1.0,
        )
        .unwrap();
        let r = draw_channel(&spec, 10, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(r.blocks[0], r.blocks[3]);
        assert_eq!(r.blocks[8], r.blocks[9]);
        assert_ne!(r.blocks[3], r.blocks[4]);
    }

    #[test]
    fn capacity_limits() {
        // Low SNR: C ≈ ρ; the asymptotic branch joins the series smoothly.
        assert!((rayleigh_capacity(1e-4) / 1e-4 - 1.0).abs() < 1e-3);
        assert!((rayleigh_capacity(1.0 / 499.0) - rayleigh_capacity(1.0 / 501.0)).abs() < 1e-5);
    }
}
