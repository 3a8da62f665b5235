//! Experiment configurations and the fixed-header CSV rows produced from them.
//!
//! Every configuration is a flat key/value record with `deny_unknown_fields`, so a typo in a
//! config file is an error rather than a silently ignored key. Every row starts with the
//! `master_seed` and `config_hash` of the run that produced it. Rates are carried in nats and
//! emitted in both nats and bits.
//!
//! All randomness is drawn through [`crate::montecarlo`], so the rows depend on the master
//! seed only and never on the number of worker threads.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::catalog::{self, CatalogLattice};
use crate::algebra::constants::{conway_thompson_h, h_from_rd, t_from_rd, to_bits, MARTINET_RD};
use crate::channel::{
    complex_normal, db_to_linear, draw_channel, error_prob_mc, leakage_estimate, rayleigh_capacity,
    FadingLaw, FadingSpec,
};
use crate::error::{Error, Result};
use crate::lattice::{
    hermite_invariant, min_distance, pairing_matrix, product_distance, Lattice, LatticeFile,
};
use crate::linalg::{CMat, RMat};
use crate::montecarlo::{block_rng, run_blocks};
use crate::verify;
use crate::wiretap::rates::{achievable_rates, RateBudget, RateMode};
use crate::wiretap::secrecy::{secrecy_threshold_check, SecrecyOptions};
use crate::wiretap::{build_code, rate_for_scale, BaseLattice, CodeParams, WiretapCode};

/// Tolerance of the pairing and codifferent checks in the lattice audit.
const DUAL_TOL: f64 = 1e-8;

/// Writes `rows` as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::InvalidArgument(format!("CSV output: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("CSV output: {e}")))
}

/// Renders `rows` as a CSV string.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn default_one() -> f64 {
    1.0
}

fn default_scale() -> u32 {
    2
}

fn default_c() -> f64 {
    1.0
}

fn default_rd() -> f64 {
    MARTINET_RD
}

fn default_suite() -> String {
    "all".into()
}

// ---------------------------------------------------------------------------------------------
// lattice-audit

/// Configuration of `lattice-audit`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    /// Catalog reference (see [`catalog::resolve`]) or path to a lattice JSON file.
    pub lattice: String,
    #[serde(default)]
    pub master_seed: u64,
    pub output: Option<String>,
}

/// One row of `lattice-audit`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AuditRow {
    pub master_seed: u64,
    pub config_hash: String,
    pub lattice: String,
    pub dim_complex: usize,
    pub volume: f64,
    pub lambda1: f64,
    pub hermite: f64,
    /// Normalised product distance (vector lattices only).
    pub np: Option<f64>,
    /// Minimum `|pdet|` over nonzero points (matrix lattices only).
    pub pdet_min: Option<f64>,
    /// Normalised minimum product determinant (matrix lattices only).
    pub delta: Option<f64>,
    pub dual_check: bool,
    /// `2^{k/2}/|d_F|^{1/4}` for a field's ring of integers or its dual.
    pub np_bound: Option<f64>,
    pub np_margin: Option<f64>,
    /// `2k/|d_F|^{1/2k}` for a field's ring of integers or its dual.
    pub h_bound: Option<f64>,
    pub h_margin: Option<f64>,
}

fn load_audit_lattice(reference: &str) -> Result<CatalogLattice> {
    let path = Path::new(reference);
    if reference.ends_with(".json") && path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{reference}: {e}")))?;
        let file: LatticeFile = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("{reference}: {e}")))?;
        return Ok(CatalogLattice {
            name: reference.into(),
            lattice: Lattice::from_file(&file)?,
            matrix: None,
            field: None,
        });
    }
    catalog::resolve(reference)
}

fn same_lattice(a: &Lattice, b: &Lattice) -> Result<bool> {
    Ok(a.contains_lattice(b, DUAL_TOL)? && b.contains_lattice(a, DUAL_TOL)?)
}

/// Geometric invariants, the dual check and the ideal-lattice bound margins of one lattice.
///
/// The dual check verifies `⟨Λ^*, Λ⟩ = I`; for a field's ring of integers it also compares the
/// codifferent embedding with the numerical dual, and for an algebra order it requires the
/// codifferent pairing to be integral and unimodular.
pub fn lattice_audit(cfg: &AuditConfig, config_hash: &str) -> Result<AuditRow> {
    let entry = load_audit_lattice(&cfg.lattice)?;
    let lat = &entry.lattice;
    let k = lat.dim_complex();
    let dual = lat.dual()?;
    let eye = RMat::identity(lat.dim_real(), lat.dim_real());
    let mut dual_check = (pairing_matrix(&dual, lat) - eye).amax() < DUAL_TOL;
    let (base, suffix) = match cfg.lattice.split_once('/') {
        Some((b, s)) => (b, Some(s)),
        None => (cfg.lattice.as_str(), None),
    };
    if suffix.is_none() {
        if entry.field.is_some() {
            let via = catalog::resolve(&format!("{base}/dual"))?.lattice;
            dual_check &= same_lattice(&via, &dual)?;
        } else if entry.matrix.is_some() {
            let codiff = catalog::resolve(&format!("{base}/dual"))?.lattice;
            let p = pairing_matrix(&codiff, lat);
            let rounded = p.map(f64::round);
            dual_check &= (&p - &rounded).amax() < DUAL_TOL
                && (rounded.determinant().abs() - 1.0).abs() < DUAL_TOL;
        }
    }
    let lambda1 = min_distance(lat, 0.0)?.lambda1;
    let hermite = hermite_invariant(lat)?;
    let (np, pdet_min, delta) = match &entry.matrix {
        Some(m) => {
            let pm = m.pdet_min()?;
            (None, Some(pm.pdet), Some(pm.delta))
        }
        None => (Some(product_distance(lat)?.np), None, None),
    };
    let bounds = match (&entry.field, suffix) {
        (Some(f), None | Some("dual")) => {
            let d = f.abs_discriminant();
            let kf = k as f64;
            Some((
                2f64.powf(kf / 2.0) / d.powf(0.25),
                2.0 * kf / d.powf(1.0 / (2.0 * kf)),
            ))
        }
        _ => None,
    };
    Ok(AuditRow {
        master_seed: cfg.master_seed,
        config_hash: config_hash.into(),
        lattice: entry.name,
        dim_complex: k,
        volume: lat.volume(),
        lambda1,
        hermite,
        np,
        pdet_min,
        delta,
        dual_check,
        np_bound: bounds.map(|b| b.0),
        np_margin: bounds.and_then(|b| np.map(|v| v - b.0)),
        h_bound: bounds.map(|b| b.1),
        h_margin: bounds.map(|b| hermite - b.1),
    })
}

// ---------------------------------------------------------------------------------------------
// rates

/// Channel model of a rate curve.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum RatesMode {
    /// Static Gaussian channels, Hermite constants.
    Gaussian,
    /// Single-antenna i.i.d. Rayleigh fading, product-distance constants.
    Rayleigh,
}

/// Constant set of a rate curve.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantSet {
    /// `2/rd` for a field family of root discriminant `rd`.
    NumberField,
    /// `h_b = h_e = 1/√(πe)` (Gaussian mode only).
    ConwayThompson,
    /// `user_g_b`, `user_g_e` from the config.
    User,
}

/// Configuration of `rates`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    pub mode: RatesMode,
    /// Eve's SNR in dB.
    pub snr_e_db: f64,
    /// Bob's SNR grid in dB.
    pub snr_b_db: Vec<f64>,
    /// Root discriminant of the number-field family.
    #[serde(default = "default_rd")]
    pub rd: f64,
    /// Constant sets to evaluate; defaults to every set applicable to the mode.
    pub constant_sets: Option<Vec<ConstantSet>>,
    pub user_g_b: Option<f64>,
    pub user_g_e: Option<f64>,
    /// Monte Carlo draws for the Rayleigh capacity cross-check column (0 = off).
    #[serde(default)]
    pub mc_draws: u64,
    #[serde(default)]
    pub master_seed: u64,
    pub output: Option<String>,
}

/// One row of `rates`: one SNR grid point under one constant set.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RateRow {
    pub master_seed: u64,
    pub config_hash: String,
    pub mode: RatesMode,
    pub constant_set: ConstantSet,
    pub snr_b_db: f64,
    pub snr_e_db: f64,
    pub g_b: f64,
    pub g_e: f64,
    pub c_b_nats: f64,
    pub c_b_bits: f64,
    /// Monte Carlo estimate of the Rayleigh capacity (when requested).
    pub c_b_mc_nats: Option<f64>,
    pub c_e_nats: f64,
    pub c_e_bits: f64,
    pub r_prime_min_nats: f64,
    pub r_sum_max_nats: f64,
    pub r_max_nats: f64,
    pub r_max_bits: f64,
    /// `max(R_max, 0)`.
    pub r_pos_nats: f64,
    pub r_pos_bits: f64,
}

/// Capacity `ln(1+ρ)` (Gaussian) or `E[ln(1+ρ|h|²)]` (Rayleigh) in nats.
pub fn mode_capacity(mode: RatesMode, snr: f64) -> f64 {
    match mode {
        RatesMode::Gaussian => snr.ln_1p(),
        RatesMode::Rayleigh => rayleigh_capacity(snr),
    }
}

/// Monte Carlo estimate of the Rayleigh capacity from `draws` fading draws.
pub fn rayleigh_capacity_mc(snr: f64, draws: u64, seed: u64, stream: u64) -> f64 {
    let sum = run_blocks(
        seed,
        stream,
        draws,
        || 0.0,
        |rng, n, acc: &mut f64| {
            for _ in 0..n {
                *acc += (snr * complex_normal(rng, 1.0).norm_sqr()).ln_1p();
            }
        },
        |a, b| a + b,
    );
    sum / draws as f64
}

fn rate_mode(mode: RatesMode) -> RateMode {
    match mode {
        RatesMode::Gaussian => RateMode::Gaussian,
        RatesMode::Rayleigh => RateMode::SisoFading,
    }
}

/// `(g_b, g_e)` of a constant set, or `None` if the set does not apply to the mode.
pub fn constants_for(cfg: &RatesConfig, set: ConstantSet) -> Result<Option<(f64, f64)>> {
    Ok(match (set, cfg.mode) {
        (ConstantSet::NumberField, RatesMode::Gaussian) => {
            Some((h_from_rd(cfg.rd), h_from_rd(cfg.rd)))
        }
        (ConstantSet::NumberField, RatesMode::Rayleigh) => {
            Some((t_from_rd(cfg.rd), t_from_rd(cfg.rd)))
        }
        (ConstantSet::ConwayThompson, RatesMode::Gaussian) => {
            Some((conway_thompson_h(), conway_thompson_h()))
        }
        (ConstantSet::ConwayThompson, RatesMode::Rayleigh) => None,
        (ConstantSet::User, _) => match (cfg.user_g_b, cfg.user_g_e) {
            (Some(b), Some(e)) if b > 0.0 && e > 0.0 => Some((b, e)),
            _ => {
                return Err(Error::InvalidArgument(
                    "constant set `user` needs positive user_g_b and user_g_e".into(),
                ))
            }
        },
    })
}

fn validate_rates(cfg: &RatesConfig) -> Result<Vec<(ConstantSet, f64, f64)>> {
    if cfg.snr_b_db.is_empty() {
        return Err(Error::InvalidArgument("snr_b_db grid is empty".into()));
    }
    if !(cfg.rd > 0.0) {
        return Err(Error::InvalidArgument("rd must be positive".into()));
    }
    let sets = match &cfg.constant_sets {
        Some(s) => s.clone(),
        None => {
            let mut s = vec![ConstantSet::NumberField];
            if cfg.mode == RatesMode::Gaussian {
                s.push(ConstantSet::ConwayThompson);
            }
            if cfg.user_g_b.is_some() || cfg.user_g_e.is_some() {
                s.push(ConstantSet::User);
            }
            s
        }
    };
    let mut out = Vec::new();
    for set in sets {
        match constants_for(cfg, set)? {
            Some((b, e)) => out.push((set, b, e)),
            None => {
                return Err(Error::InvalidArgument(format!(
                    "constant set {set:?} does not apply to {:?} mode",
                    cfg.mode
                )))
            }
        }
    }
    Ok(out)
}

/// Rate curves over the Bob SNR grid (rows ordered by constant set, then grid point).
pub fn rate_curves(cfg: &RatesConfig, config_hash: &str) -> Result<Vec<RateRow>> {
    let sets = validate_rates(cfg)?;
    let c_e = mode_capacity(cfg.mode, db_to_linear(cfg.snr_e_db));
    let mut rows = Vec::new();
    for (set, g_b, g_e) in sets {
        for (i, &snr_b_db) in cfg.snr_b_db.iter().enumerate() {
            let rho_b = db_to_linear(snr_b_db);
            let c_b = mode_capacity(cfg.mode, rho_b);
            let c_b_mc = (cfg.mode == RatesMode::Rayleigh && cfg.mc_draws > 0)
                .then(|| rayleigh_capacity_mc(rho_b, cfg.mc_draws, cfg.master_seed, i as u64));
            let budget = RateBudget {
                c_b,
                c_e,
                g_b,
                g_e,
                n: 1,
            };
            let r = achievable_rates(&budget, rate_mode(cfg.mode))?;
            rows.push(RateRow {
                master_seed: cfg.master_seed,
                config_hash: config_hash.into(),
                mode: cfg.mode,
                constant_set: set,
                snr_b_db,
                snr_e_db: cfg.snr_e_db,
                g_b,
                g_e,
                c_b_nats: c_b,
                c_b_bits: to_bits(c_b),
                c_b_mc_nats: c_b_mc,
                c_e_nats: c_e,
                c_e_bits: to_bits(c_e),
                r_prime_min_nats: r.r_prime_min,
                r_sum_max_nats: r.r_sum_max,
                r_max_nats: r.r_max,
                r_max_bits: to_bits(r.r_max),
                r_pos_nats: r.r_max.max(0.0),
                r_pos_bits: to_bits(r.r_max.max(0.0)),
            });
        }
    }
    Ok(rows)
}

/// Bob SNR (dB) at which `R_max` becomes positive, found by bisection on `[lo, hi]` dB.
pub fn positive_rate_snr_db(
    mode: RatesMode,
    snr_e_db: f64,
    g_b: f64,
    g_e: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let c_e = mode_capacity(mode, db_to_linear(snr_e_db));
    let r_max = |db: f64| -> Result<f64> {
        let budget = RateBudget {
            c_b: mode_capacity(mode, db_to_linear(db)),
            c_e,
            g_b,
            g_e,
            n: 1,
        };
        Ok(achievable_rates(&budget, rate_mode(mode))?.r_max)
    };
    let (mut a, mut b) = (lo, hi);
    if r_max(a)? > 0.0 || r_max(b)? <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "R_max does not change sign on [{lo}, {hi}] dB"
        )));
    }
    while b - a > 1e-10 {
        let m = 0.5 * (a + b);
        if r_max(m)? > 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

// ---------------------------------------------------------------------------------------------
// simulate

/// Time law of the simulated channels.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SimLaw {
    /// Every block has the configured gain.
    Static,
    /// One i.i.d. Rayleigh draw per `k`, scaled by the configured gain, held fixed.
    Rayleigh,
}

/// Configuration of `simulate`: one single-antenna code per `k` over the catalogued field of
/// complex dimension `k` with the smallest discriminant.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub k_list: Vec<usize>,
    /// Nesting scale `s`; the confidential rate is `R = 2 ln s`.
    #[serde(default = "default_scale")]
    pub scale: u32,
    /// Fixed auxiliary rate `R'` (nats). Exactly one of `rate_aux` and `rate_aux_margin`.
    pub rate_aux: Option<f64>,
    /// `R'` as an offset from the secrecy threshold of each `k`.
    pub rate_aux_margin: Option<f64>,
    #[serde(default = "default_one")]
    pub power: f64,
    pub snr_b_db: f64,
    pub snr_e_db: f64,
    #[serde(default = "default_one")]
    pub gain_b: f64,
    #[serde(default = "default_one")]
    pub gain_e: f64,
    pub law_b: SimLaw,
    pub law_e: SimLaw,
    /// Decoding trials per `k` (0 skips the error experiment, otherwise ≥ 1000).
    #[serde(default)]
    pub trials: u64,
    /// Samples per message for the leakage estimate (0 skips it; `k ≤ 2` only).
    #[serde(default)]
    pub leakage_trials: u64,
    /// Banaszczyk parameter of `ε_k`.
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub master_seed: u64,
    pub output: Option<String>,
}

/// One row of `simulate`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SimulateRow {
    pub master_seed: u64,
    pub config_hash: String,
    pub k: usize,
    pub lattice: String,
    pub messages: usize,
    pub rate_nats: f64,
    pub rate_bits: f64,
    pub rate_aux_nats: f64,
    pub rate_aux_bits: f64,
    pub r_aux_threshold_nats: f64,
    pub r_aux_threshold_bits: f64,
    pub condition_met: bool,
    pub gain_stat_b: f64,
    pub gain_stat_e: f64,
    pub trials: u64,
    pub p_e: Option<f64>,
    pub p_e_se: Option<f64>,
    pub union_bound: Option<f64>,
    pub banaszczyk_bound: Option<f64>,
    pub error_bound_holds: Option<bool>,
    pub epsilon: f64,
    pub epsilon_k: f64,
    pub leakage_bound_nats: f64,
    pub leakage_bound_bits: f64,
    pub v_hat: Option<f64>,
    pub v_hat_se: Option<f64>,
    pub v_bound: Option<f64>,
    pub leakage_pass: Option<bool>,
}

/// Stream offsets of the channel draws (decoding and leakage use their own seeds).
const STREAM_CHANNEL_B: u64 = 1 << 40;
const STREAM_CHANNEL_E: u64 = 2 << 40;

fn sim_blocks(law: SimLaw, gain: f64, count: usize, seed: u64, stream: u64) -> Result<Vec<CMat>> {
    match law {
        SimLaw::Static => Ok(vec![CMat::from_element(1, 1, gain.into()); count]),
        SimLaw::Rayleigh => {
            let spec = FadingSpec::new(FadingLaw::RayleighIid, 1, 1, 1.0, 1.0)?;
            let mut rng = block_rng(seed, stream, 0);
            Ok(draw_channel(&spec, count, &mut rng)?
                .blocks
                .into_iter()
                .map(|b| b * num_complex::Complex64::from(gain))
                .collect())
        }
    }
}

fn field_code(name: &str, rate: f64, rate_aux: f64, power: f64) -> Result<WiretapCode> {
    build_code(
        BaseLattice::Vector(catalog::resolve(name)?.lattice),
        CodeParams::new(rate, rate_aux, power),
    )
}

fn validate_simulate(cfg: &SimulateConfig) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
    if cfg.k_list.is_empty() {
        return bad("k_list is empty");
    }
    if cfg.rate_aux.is_some() == cfg.rate_aux_margin.is_some() {
        return bad("give exactly one of rate_aux and rate_aux_margin");
    }
    if cfg.scale < 2 {
        return bad("scale must be ≥ 2");
    }
    if !(cfg.power > 0.0 && cfg.gain_b > 0.0 && cfg.gain_e > 0.0) {
        return bad("power and gains must be positive");
    }
    if cfg.trials > 0 && cfg.trials < 1000 {
        return bad("trials must be 0 or ≥ 1000");
    }
    Ok(())
}

/// Runs the end-to-end experiment for every `k` of the configuration.
pub fn simulate(cfg: &SimulateConfig, config_hash: &str) -> Result<Vec<SimulateRow>> {
    validate_simulate(cfg)?;
    let rate = rate_for_scale(cfg.scale, 1);
    let opts = SecrecyOptions { c: cfg.c };
    let mut rows = Vec::new();
    for &k in &cfg.k_list {
        let name = catalog::smallest_field(k)?.name().to_string();
        let kk = k as u64;
        let blocks_b = sim_blocks(
            cfg.law_b,
            cfg.gain_b,
            k,
            cfg.master_seed,
            STREAM_CHANNEL_B + kk,
        )?;
        let blocks_e = sim_blocks(
            cfg.law_e,
            cfg.gain_e,
            k,
            cfg.master_seed,
            STREAM_CHANNEL_E + kk,
        )?;
        // The threshold is scale-invariant; a provisional code at R' = 1 locates it.
        let probe = field_code(&name, rate, 1.0, cfg.power)?;
        let s2 = probe.sigma_s().powi(2);
        let noise_b = s2 / db_to_linear(cfg.snr_b_db);
        let noise_e = s2 / db_to_linear(cfg.snr_e_db);
        let threshold =
            secrecy_threshold_check(&probe, &blocks_e, noise_e, &opts)?.r_prime_threshold;
        let rate_aux = match (cfg.rate_aux, cfg.rate_aux_margin) {
            (Some(r), _) => r,
            (None, Some(m)) => threshold + m,
            (None, None) => unreachable!("validated"),
        };
        let code = field_code(&name, rate, rate_aux, cfg.power)?;
        let sec = secrecy_threshold_check(&code, &blocks_e, noise_e, &opts)?;
        // The exact sampler is only certified when it is actually needed.
        let enc = if cfg.trials > 0 || (cfg.leakage_trials > 0 && k <= 2) {
            Some(code.encoder()?)
        } else {
            None
        };
        let err = if let (true, Some(enc)) = (cfg.trials > 0, &enc) {
            Some(error_prob_mc(
                enc,
                &blocks_b,
                noise_b,
                cfg.trials,
                cfg.master_seed ^ kk,
            )?)
        } else {
            None
        };
        let leak = if let (true, Some(enc)) = (cfg.leakage_trials > 0 && k <= 2, &enc) {
            Some(leakage_estimate(
                enc,
                &blocks_e,
                noise_e,
                cfg.leakage_trials,
                cfg.master_seed ^ (kk << 32),
            )?)
        } else {
            None
        };
        let rho_b = s2 / noise_b;
        let gain_stat_b = blocks_b
            .iter()
            .map(|h| crate::wiretap::rates::log_det_gain(h, rho_b))
            .sum::<f64>()
            / k as f64;
        rows.push(SimulateRow {
            master_seed: cfg.master_seed,
            config_hash: config_hash.into(),
            k,
            lattice: name,
            messages: code.messages(),
            rate_nats: rate,
            rate_bits: to_bits(rate),
            rate_aux_nats: rate_aux,
            rate_aux_bits: to_bits(rate_aux),
            r_aux_threshold_nats: threshold,
            r_aux_threshold_bits: to_bits(threshold),
            condition_met: sec.condition_met,
            gain_stat_b,
            gain_stat_e: sec.gain_stat,
            trials: cfg.trials,
            p_e: err.as_ref().map(|e| e.p_e_hat),
            p_e_se: err.as_ref().map(|e| e.se),
            union_bound: err.as_ref().map(|e| e.union_bound),
            banaszczyk_bound: err.as_ref().and_then(|e| e.banaszczyk_bound),
            error_bound_holds: err.as_ref().map(|e| e.bound_holds),
            epsilon: sec.epsilon,
            epsilon_k: sec.epsilon_k,
            leakage_bound_nats: sec.leakage_bound,
            leakage_bound_bits: to_bits(sec.leakage_bound),
            v_hat: leak.as_ref().map(|l| l.v_max),
            v_hat_se: leak.as_ref().map(|l| l.v_max_se),
            v_bound: leak.as_ref().map(|l| l.bound),
            leakage_pass: leak.as_ref().map(|l| l.passes),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------------------------
// verify

/// Configuration of `verify`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_suite")]
    pub suite: String,
    #[serde(default)]
    pub master_seed: u64,
    pub output: Option<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suite: default_suite(),
            master_seed: 0,
            output: None,
        }
    }
}

/// One row of `verify`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerifyRow {
    pub master_seed: u64,
    pub config_hash: String,
    pub suite: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// Runs a property suite; the caller decides the exit status from `passed`.
pub fn verify_rows(cfg: &VerifyConfig, config_hash: &str) -> Result<Vec<VerifyRow>> {
    Ok(verify::run_suite(&cfg.suite, cfg.master_seed)?
        .into_iter()
        .map(|c| VerifyRow {
            master_seed: cfg.master_seed,
            config_hash: config_hash.into(),
            suite: c.suite.to_string(),
            check: c.name.to_string(),
            passed: c.passed,
            detail: c.detail,
        })
        .collect())
}
