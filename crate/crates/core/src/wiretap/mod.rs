//! Nested-lattice wiretap codes `C(Λ_b, Λ_e)`.
//!
//! A code is built from a base lattice (an ideal lattice in `C^k` or a multi-block matrix
//! lattice of complex dimension `n²k`) by scaling it to the shaping volume
//!
//! `V(Λ_e) = (πeσ²)^{N} e^{−N R'/n}`, `σ² = P/n`, `N = n²k` complex dimensions,
//!
//! and nesting `Λ_e = s·Λ_b` for an integer `s ≥ 2`. The index `|Λ_b/Λ_e| = s^{2N}` carries
//! `R = 2n·ln s` nats per channel use. Messages are the cosets of `Λ_e` in `Λ_b`, labelled by
//! the coordinates of their leaders in the half-open parallelotope `Σ_j [0, s)·b_j` spanned by
//! the `Λ_e` basis; a message is sent as a sample of `D_{Λ_e+λ_m, σ_s}`.

pub mod rates;
pub mod secrecy;

use std::f64::consts::{E, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::gauss::{DiscreteGaussianSampler, GaussianSpec};
use crate::lattice::{Lattice, MatrixLattice};
use crate::linalg::RVec;

pub use rates::{
    achievable_rates, compound_sets_check, AchievableRates, CompoundMembership, RateBudget,
    RateMode,
};
pub use secrecy::{
    entropy_check, nu_t, power_check, secrecy_threshold_check, EntropyCheck, PowerCheck,
    SecrecyOptions, SecrecyReport,
};

/// Largest number of cosets (messages) a code may carry.
pub const MAX_MESSAGES: usize = 1 << 16;

/// Default truncation parameter `t` of the power and entropy checks
/// (so `θ_t = (π − t)/π ≈ 0.968`).
pub const DEFAULT_T: f64 = 0.1;

/// A base lattice before scaling.
#[derive(Clone, Debug)]
pub enum BaseLattice {
    /// Lattice in `C^k` used over `k` single-antenna channel uses.
    Vector(Lattice),
    /// Multi-block matrix lattice in `M_{nk×n}(C)`.
    Matrix(MatrixLattice),
}

impl BaseLattice {
    /// Vectorised lattice.
    pub fn lattice(&self) -> &Lattice {
        match self {
            Self::Vector(l) => l,
            Self::Matrix(m) => m.lattice(),
        }
    }

    /// Number of transmit antennas `n`.
    pub fn antennas(&self) -> usize {
        match self {
            Self::Vector(_) => 1,
            Self::Matrix(m) => m.block_size(),
        }
    }

    /// Number of blocks (fading blocks or channel uses) `k`.
    pub fn blocks(&self) -> usize {
        match self {
            Self::Vector(l) => l.dim_complex(),
            Self::Matrix(m) => m.block_rows(),
        }
    }
}

/// Requested code parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeParams {
    /// Confidential rate `R` (nats per channel use).
    pub rate: f64,
    /// Auxiliary (randomisation) rate `R'`.
    pub rate_aux: f64,
    /// Average power `P` per channel use.
    pub power: f64,
    /// Fractional reduction of the shaping variance: `σ_s² = (1 − backoff)·P/n`.
    pub power_backoff: f64,
}

impl CodeParams {
    pub fn new(rate: f64, rate_aux: f64, power: f64) -> Self {
        Self {
            rate,
            rate_aux,
            power,
            power_backoff: 0.0,
        }
    }
}

/// An immutable nested-lattice wiretap code.
#[derive(Clone, Debug)]
pub struct WiretapCode {
    base: BaseLattice,
    lambda_b: Lattice,
    lambda_e: Lattice,
    matrix_b: Option<MatrixLattice>,
    alpha_b: f64,
    alpha_e: f64,
    scale: u32,
    params: CodeParams,
    sigma_s: f64,
    leaders: Vec<RVec>,
}

/// `R = 2n·ln s` for nesting scale `s`.
pub fn rate_for_scale(scale: u32, n: usize) -> f64 {
    2.0 * n as f64 * (scale as f64).ln()
}

/// Builds `C(Λ_b, Λ_e)` from a base lattice.
///
/// `R` must equal `2n·ln s` for an integer `s ≥ 2` (to `1e−9` relative); otherwise
/// [`Error::Nesting`] reports the nearest feasible rate.
pub fn build_code(base: BaseLattice, params: CodeParams) -> Result<WiretapCode> {
    let CodeParams {
        rate,
        rate_aux,
        power,
        power_backoff,
    } = params;
    if !(rate > 0.0 && rate_aux > 0.0 && power > 0.0) {
        return Err(Error::InvalidArgument(
            "R, R' and P must be positive".into(),
        ));
    }
    if !(0.0..1.0).contains(&power_backoff) {
        return Err(Error::InvalidArgument(format!(
            "power backoff {power_backoff} outside [0, 1)"
        )));
    }
    let n = base.antennas();
    let s_real = (rate / (2.0 * n as f64)).exp();
    let s_near = s_real.round().max(2.0) as u32;
    if (s_real - s_near as f64).abs() > 1e-9 * s_real {
        return Err(Error::Nesting {
            requested: rate,
            nearest: rate_for_scale(s_near, n),
            scale: s_near,
        });
    }
    let s = s_near;
    let base_lat = base.lattice();
    let dimc = base_lat.dim_complex();
    let dimr = base_lat.dim_real();
    let messages = (s as f64).powi(dimr as i32);
    if messages > MAX_MESSAGES as f64 {
        return Err(Error::InvalidArgument(format!(
            "{messages} cosets exceed the limit {MAX_MESSAGES}"
        )));
    }
    let uses = (dimc / n) as f64;
    let sigma2_nominal = power / n as f64;
    let ln_ve = dimc as f64 * (PI * E * sigma2_nominal).ln() - uses * rate_aux;
    let alpha_e = ((ln_ve - base_lat.volume().ln()) / dimr as f64).exp();
    let alpha_b = alpha_e / s as f64;
    let lambda_b = base_lat.scaled(alpha_b)?;
    let lambda_e = Lattice::new(lambda_b.basis() * s as f64)?;
    let matrix_b = match &base {
        BaseLattice::Matrix(m) => Some(m.scaled(alpha_b)?),
        BaseLattice::Vector(_) => None,
    };
    let sigma_s = ((1.0 - power_backoff) * sigma2_nominal).sqrt();
    let mut code = WiretapCode {
        base,
        lambda_b,
        lambda_e,
        matrix_b,
        alpha_b,
        alpha_e,
        scale: s,
        params,
        sigma_s,
        leaders: Vec::new(),
    };
    code.leaders = (0..messages as usize)
        .map(|m| code.lambda_b.point(&code.digits(m)))
        .collect();
    code.check_invariants(ln_ve)?;
    Ok(code)
}

impl WiretapCode {
    fn digits(&self, m: usize) -> Vec<i64> {
        let s = self.scale as usize;
        let mut t = m;
        (0..self.lambda_b.dim_real())
            .map(|_| {
                let d = t % s;
                t /= s;
                d as i64
            })
            .collect()
    }

    fn check_invariants(&self, ln_ve: f64) -> Result<()> {
        if !self.lambda_b.contains_lattice(&self.lambda_e, 1e-6)? {
            return Err(Error::Consistency("Λ_e is not contained in Λ_b".into()));
        }
        let ln_index = (self.lambda_e.volume() / self.lambda_b.volume()).ln();
        let want = self.uses() * self.params.rate;
        if (ln_index - want).abs() > 1e-6 * want.abs().max(1.0) {
            return Err(Error::Consistency(format!(
                "ln|Λ_b/Λ_e| = {ln_index}, expected {want}"
            )));
        }
        if (self.lambda_e.volume().ln() - ln_ve).abs() > 1e-9 * ln_ve.abs().max(1.0) {
            return Err(Error::Consistency(
                "V(Λ_e) does not match the shaping volume".into(),
            ));
        }
        Ok(())
    }

    pub fn base(&self) -> &BaseLattice {
        &self.base
    }

    /// Bob's lattice `Λ_b = α_b·L`.
    pub fn lambda_b(&self) -> &Lattice {
        &self.lambda_b
    }

    /// Eve's (shaping) lattice `Λ_e = α_e·L = s·Λ_b`.
    pub fn lambda_e(&self) -> &Lattice {
        &self.lambda_e
    }

    /// `Λ_b` as a matrix lattice (multi-antenna codes only).
    pub fn matrix_b(&self) -> Option<&MatrixLattice> {
        self.matrix_b.as_ref()
    }

    pub fn alpha_b(&self) -> f64 {
        self.alpha_b
    }

    pub fn alpha_e(&self) -> f64 {
        self.alpha_e
    }

    /// Nesting scale `s = α_e/α_b`.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn rate(&self) -> f64 {
        self.params.rate
    }

    pub fn rate_aux(&self) -> f64 {
        self.params.rate_aux
    }

    pub fn power(&self) -> f64 {
        self.params.power
    }

    /// Shaping standard deviation per complex dimension.
    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    /// Transmit antennas `n`.
    pub fn antennas(&self) -> usize {
        self.base.antennas()
    }

    /// Blocks `k`.
    pub fn blocks(&self) -> usize {
        self.base.blocks()
    }

    /// Complex dimension `n²k` of the lattices.
    pub fn dim_complex(&self) -> usize {
        self.lambda_b.dim_complex()
    }

    /// Channel uses `nk` per codeword.
    pub fn uses(&self) -> f64 {
        (self.dim_complex() / self.antennas()) as f64
    }

    /// Number of messages `e^{nkR}`.
    pub fn messages(&self) -> usize {
        self.leaders.len()
    }

    /// Coset leader `λ_m`.
    pub fn leader(&self, m: usize) -> &RVec {
        &self.leaders[m]
    }

    pub fn leaders(&self) -> &[RVec] {
        &self.leaders
    }

    /// Message carried by a point of `Λ_b` (its coset modulo `Λ_e`).
    pub fn coset_index(&self, x: &RVec) -> Result<usize> {
        let coords = self.lambda_b.coordinates(x)?;
        let s = self.scale as i64;
        let mut m = 0usize;
        for c in coords.iter().rev() {
            let r = c.round();
            if (c - r).abs() > 1e-6 {
                return Err(Error::InvalidArgument("point is not in Λ_b".into()));
            }
            m = m * s as usize + (r as i64).rem_euclid(s) as usize;
        }
        Ok(m)
    }

    /// Integer coordinates of a point of `Λ_b` in its basis.
    pub fn coords_b(&self, x: &RVec) -> Result<Vec<i64>> {
        Ok(self
            .lambda_b
            .coordinates(x)?
            .iter()
            .map(|c| c.round() as i64)
            .collect())
    }

    /// Builds the per-message discrete Gaussian samplers.
    pub fn encoder(&self) -> Result<Encoder<'_>> {
        let spec = GaussianSpec::isotropic(self.dim_complex(), self.sigma_s)?;
        let samplers = self
            .leaders
            .iter()
            .map(|l| DiscreteGaussianSampler::new(&self.lambda_e, &(-l), &spec))
            .collect::<Result<Vec<_>>>()?;
        Ok(Encoder {
            code: self,
            samplers,
        })
    }
}

/// Sampling encoder `m ↦ x ~ D_{Λ_e+λ_m, σ_s}`.
#[derive(Clone, Debug)]
pub struct Encoder<'a> {
    code: &'a WiretapCode,
    samplers: Vec<DiscreteGaussianSampler>,
}

impl<'a> Encoder<'a> {
    pub fn code(&self) -> &'a WiretapCode {
        self.code
    }

    /// Sampler for message `m`.
    pub fn sampler(&self, m: usize) -> &DiscreteGaussianSampler {
        &self.samplers[m]
    }

    /// Encodes message `m`.
    pub fn encode<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<RVec> {
        let s = self
            .samplers
            .get(m)
            .ok_or_else(|| Error::InvalidArgument(format!("message {m} out of range")))?;
        Ok(s.sample(rng))
    }
}
