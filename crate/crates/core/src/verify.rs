//! Named property suites run by the command-line `verify` subcommand.
//!
//! Each suite evaluates the executable invariants of one module at desk scale and returns
//! one [`CheckResult`] per property. Library errors inside a check are reported as failures
//! with the error message as detail rather than aborting the suite.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::catalog;
use crate::algebra::constants::{conway_thompson_gap, rate_constants, to_bits, MARTINET_RD};
use crate::channel::{
    db_to_linear, error_prob_mc, lln_diagnostic, lln_trend, mmse_gdfe, rayleigh_capacity,
    EveReduction, FadingLaw, FadingSpec, LlnTrend,
};
use crate::error::{Error, Result};
use crate::gauss::checks::{linear_transform_check, regev_mixture_check, subgaussian_mgf_check};
use crate::gauss::{banaszczyk_tail, flatness_factor_sigma, smoothing_parameter};
use crate::lattice::lll::{lll_reduce, LLL_DELTA};
use crate::lattice::{
    hermite_invariant, min_distance, pairing_matrix, pdet, product_distance, Lattice,
};
use crate::linalg::{scaled_identity, CMat, CVec, RMat, RVec};
use crate::wiretap::secrecy::{
    entropy_check, power_check, secrecy_threshold_check, SecrecyOptions,
};
use crate::wiretap::{build_code, BaseLattice, CodeParams, WiretapCode, DEFAULT_T};

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 6] = ["gauss", "algebra", "lattice", "wiretap", "channel", "all"];

/// Outcome of one property.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = (&'static str, fn(u64) -> Result<(bool, String)>);

/// Runs a suite (or `"all"`) with the given master seed.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckResult>> {
    let suites: Vec<&'static str> = match name {
        "all" => SUITES[..5].to_vec(),
        other => vec![*SUITES[..5]
            .iter()
            .find(|s| **s == other)
            .ok_or_else(|| Error::UnknownEntry(format!("suite {other}")))?],
    };
    let mut out = Vec::new();
    for suite in suites {
        for (check_name, f) in checks(suite) {
            let (passed, detail) = match f(seed) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            out.push(CheckResult {
                suite,
                name: check_name,
                passed,
                detail,
            });
        }
    }
    Ok(out)
}

fn checks(suite: &str) -> Vec<Check> {
    match suite {
        "gauss" => vec![
            ("flatness-smoothing-round-trip", gauss_round_trip),
            ("banaszczyk-tail", gauss_banaszczyk),
            ("regev-mixture", gauss_mixture),
            ("linear-transform", gauss_linear),
            ("subgaussian-mgf", gauss_mgf),
        ],
        "algebra" => vec![
            ("ideal-lattice-bounds", algebra_bounds),
            ("codifferent-dual", algebra_codifferent),
            ("golden-pairing-and-volume", algebra_golden_pairing),
            ("golden-minimum-determinant", algebra_golden_min),
            ("golden-norm-identity", algebra_golden_norm),
        ],
        "lattice" => vec![
            ("lll-unimodular", lattice_lll),
            ("dual-pairing", lattice_dual),
            ("integer-minima", lattice_minima),
        ],
        "wiretap" => vec![
            ("rate-constants", wiretap_constants),
            ("code-bookkeeping", wiretap_bookkeeping),
            ("power-and-entropy", wiretap_shaping),
            ("secrecy-threshold-flip", wiretap_threshold),
        ],
        "channel" => vec![
            ("mmse-identities", channel_mmse),
            ("rayleigh-capacity", channel_capacity),
            ("error-probability-bound", channel_error),
            ("eve-reduction", channel_eve),
            ("lln-trends", channel_lln),
        ],
        _ => Vec::new(),
    }
}

fn gauss_round_trip(_: u64) -> Result<(bool, String)> {
    let lat = Lattice::integer(2);
    let sigma = 0.9;
    let eps = flatness_factor_sigma(&lat, sigma, 1e-15)?;
    let eta = smoothing_parameter(&lat, eps)?;
    let err = (eta / ((2.0 * PI).sqrt() * sigma) - 1.0).abs();
    Ok((err < 1e-8, format!("relative error {err:.2e}")))
}

fn gauss_banaszczyk(_: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for lat in [
        Lattice::integer(1),
        Lattice::integer(2),
        catalog::resolve("q-zeta5")?.lattice,
    ] {
        let n = lat.dim_real() as f64;
        let l1 = min_distance(&lat, 0.0)?.lambda1;
        for c in [0.8, 1.0, 1.5] {
            for i in 1..=10 {
                let tau = n.sqrt() * c / l1 * (1.0 + 0.1 * i as f64);
                let r = banaszczyk_tail(&lat, tau, c)?;
                if !r.holds {
                    return Ok((false, format!("fails at n = {n}, c = {c}, τ = {tau}")));
                }
                worst = worst.max(r.lhs_upper / r.rhs);
            }
        }
    }
    Ok((true, format!("max lhs/rhs {worst:.3e}")))
}

fn gauss_mixture(seed: u64) -> Result<(bool, String)> {
    let s = scaled_identity(1, 4.0);
    let r = regev_mixture_check(&Lattice::integer(1), &RVec::zeros(2), &s, &s, 200_000, seed)?;
    Ok((
        r.passes,
        format!(
            "debiased L1 {:.2e} ± {:.1e}, bound {:.1e}",
            r.l1.debiased, r.l1.se, r.bound
        ),
    ))
}

fn gauss_linear(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 1.0f64;
    for _ in 0..3 {
        let a = CMat::from_element(
            1,
            1,
            Complex64::new(rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0)),
        );
        let shift = RVec::from_vec(vec![
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
        ]);
        let r = linear_transform_check(
            &Lattice::integer(1),
            &shift,
            &scaled_identity(1, 1.5),
            &a,
            50_000,
            rng.random(),
        )?;
        worst = worst.min(r.p_value);
    }
    Ok((worst > 0.001, format!("min p-value {worst:.3}")))
}

fn gauss_mgf(_: u64) -> Result<(bool, String)> {
    let a = CMat::identity(2, 2);
    let dirs: Vec<CVec> = (0..12)
        .map(|t| {
            CVec::from_vec(vec![
                Complex64::from_polar(0.7, t as f64 * PI / 6.0),
                Complex64::new(0.2, -0.4),
            ])
        })
        .collect();
    let r = subgaussian_mgf_check(
        &Lattice::integer(2),
        &RVec::from_vec(vec![0.3, 0.1, -0.2, 0.4]),
        1.2,
        &a,
        &dirs,
    )?;
    Ok((
        r.worst_ratio <= 1.0,
        format!("worst ratio {:.6}", r.worst_ratio),
    ))
}

fn algebra_bounds(_: u64) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in catalog::field_names() {
        let f = catalog::field(name)?;
        let k = f.dim_complex() as f64;
        let d = f.abs_discriminant();
        for reference in [name.to_string(), format!("{name}/dual")] {
            let lat = catalog::resolve(&reference)?.lattice;
            let np = product_distance(&lat)?.np;
            let np_bound = 2f64.powf(k / 2.0) / d.powf(0.25);
            ok &= np >= np_bound - 1e-9;
            if k <= 3.0 {
                let h = hermite_invariant(&lat)?;
                ok &= h >= 2.0 * k / d.powf(1.0 / (2.0 * k)) - 1e-9;
            }
            detail.push(format!("{reference}: Np margin {:.3e}", np - np_bound));
        }
    }
    Ok((ok, detail.join("; ")))
}

fn algebra_codifferent(_: u64) -> Result<(bool, String)> {
    for name in catalog::field_names() {
        let primal = catalog::resolve(name)?.lattice;
        let via = catalog::resolve(&format!("{name}/dual"))?.lattice;
        let dual = primal.dual()?;
        if !(dual.contains_lattice(&via, 1e-8)? && via.contains_lattice(&dual, 1e-8)?) {
            return Ok((
                false,
                format!("{name}: codifferent embedding differs from the dual"),
            ));
        }
    }
    Ok((true, "all catalog fields".into()))
}

fn algebra_golden_pairing(_: u64) -> Result<(bool, String)> {
    let g = catalog::golden()?;
    let primal = g.multiblock_embed()?;
    let dual = g.algebra_codifferent()?;
    let p: RMat = pairing_matrix(dual.lattice(), primal.lattice());
    let rounded = p.map(f64::round);
    let int_err = (&p - &rounded).amax();
    let det = rounded.determinant().abs();
    let vol_err = (primal.volume() / g.expected_volume()? - 1.0).abs();
    Ok((
        int_err < 1e-9 && (det - 1.0).abs() < 1e-9 && vol_err < 1e-6,
        format!("integrality {int_err:.1e}, |det| {det}, volume rel. error {vol_err:.1e}"),
    ))
}

fn algebra_golden_min(_: u64) -> Result<(bool, String)> {
    let pm = catalog::golden()?.multiblock_embed()?.pdet_min()?;
    Ok((
        (pm.pdet - 1.0).abs() < 1e-9,
        format!("min |pdet| = {}", pm.pdet),
    ))
}

fn algebra_golden_norm(seed: u64) -> Result<(bool, String)> {
    let g = catalog::golden()?;
    let ml = g.multiblock_embed()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z: Vec<i64> = (0..8).map(|_| rng.random_range(-4..=4)).collect();
        let d = pdet(&ml.element(&z), 2).norm_sqr();
        let nq = crate::algebra::exact::q_to_f64(&g.norm_q(&g.element(&z))?);
        worst = worst.max((nq - d).abs() / nq.abs().max(1.0));
    }
    Ok((worst < 1e-8, format!("max rel. error {worst:.1e}")))
}

fn lattice_lll(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let m = RMat::from_fn(4, 4, |_, _| rng.random_range(-3i32..=3) as f64);
        if m.determinant().abs() < 0.5 {
            continue;
        }
        let out = lll_reduce(&m, LLL_DELTA);
        let u = RMat::from_fn(4, 4, |i, j| out.unimodular[j][i] as f64);
        if (u.determinant().abs() - 1.0).abs() > 1e-9 || (&m * &u - &out.reduced).amax() > 1e-9 {
            return Ok((false, "reduction changed the lattice".into()));
        }
    }
    Ok((true, "20 random bases".into()))
}

fn lattice_dual(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = RMat::from_fn(4, 4, |_, _| rng.random_range(-2.0..2.0));
    let lat = Lattice::new(m)?;
    let err = (pairing_matrix(&lat.dual()?, &lat) - RMat::identity(4, 4)).amax();
    Ok((err < 1e-9, format!("pairing error {err:.1e}")))
}

fn lattice_minima(_: u64) -> Result<(bool, String)> {
    for k in 1..=4 {
        if (min_distance(&Lattice::integer(k), 0.0)?.lambda1 - 1.0).abs() > 1e-12 {
            return Ok((false, format!("λ1(Z^{}) ≠ 1", 2 * k)));
        }
    }
    let z5 = min_distance(&catalog::resolve("q-zeta5")?.lattice, 0.0)?.lambda1;
    Ok((
        (z5 - 2f64.sqrt()).abs() < 1e-9,
        format!("λ1(ψ(Z[ζ5])) = {z5}"),
    ))
}

fn gaussian_integer_code(rate_aux: f64) -> Result<WiretapCode> {
    build_code(
        BaseLattice::Vector(catalog::resolve("q-i")?.lattice),
        CodeParams::new(4f64.ln(), rate_aux, 1.0),
    )
}

fn wiretap_constants(_: u64) -> Result<(bool, String)> {
    let k = rate_constants(MARTINET_RD, 1).kappa_siso;
    let g = conway_thompson_gap();
    let ok = (6.75..=6.77).contains(&k)
        && (9.74..=9.77).contains(&to_bits(k))
        && (1.23..=1.25).contains(&g)
        && (1.78..=1.80).contains(&to_bits(g));
    Ok((
        ok,
        format!("κ = {k:.4} nats, Conway–Thompson gap = {g:.4} nats"),
    ))
}

fn wiretap_bookkeeping(_: u64) -> Result<(bool, String)> {
    let c = build_code(
        BaseLattice::Vector(catalog::resolve("q-zeta5")?.lattice),
        CodeParams::new(4f64.ln(), 3.0, 1.0),
    )?;
    let index = (c.lambda_e().volume() / c.lambda_b().volume()).ln();
    let ok = c.messages() == 16
        && (index - c.uses() * c.rate()).abs() < 1e-9
        && (0..16).all(|m| c.coset_index(c.leader(m)).ok() == Some(m));
    Ok((ok, format!("{} cosets, ln index {index:.6}", c.messages())))
}

fn wiretap_shaping(seed: u64) -> Result<(bool, String)> {
    let c = gaussian_integer_code(3.0)?;
    let enc = c.encoder()?;
    let p = power_check(&enc, DEFAULT_T, 100_000, seed)?;
    let h = entropy_check(&enc, 0, DEFAULT_T, 100_000, seed)?;
    Ok((
        p.holds_exact && p.holds_empirical && h.holds_truncated && h.holds_plug_in,
        format!(
            "power dev {:.1e} ≤ {:.1e}; entropy {:.4} vs {:.4}",
            p.exact_max_dev, p.bound, h.plug_in, h.target
        ),
    ))
}

fn wiretap_threshold(_: u64) -> Result<(bool, String)> {
    let blocks = [CMat::identity(1, 1)];
    let opts = SecrecyOptions::default();
    let thr = secrecy_threshold_check(&gaussian_integer_code(1.0)?, &blocks, 1.0, &opts)?
        .r_prime_threshold;
    let above = secrecy_threshold_check(&gaussian_integer_code(thr + 0.05)?, &blocks, 1.0, &opts)?;
    let below = secrecy_threshold_check(&gaussian_integer_code(thr - 0.05)?, &blocks, 1.0, &opts)?;
    Ok((
        above.condition_met && !below.condition_met,
        format!("R' threshold {thr:.6}"),
    ))
}

fn channel_mmse(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<CMat> = (0..3)
        .map(|_| CMat::from_fn(3, 2, |_, _| crate::channel::complex_normal(&mut rng, 1.0)))
        .collect();
    let (e1, e2) = mmse_gdfe(&blocks, 2.5)?.identity_errors(&blocks)?;
    Ok((
        e1 < 1e-12 && e2 < 1e-12,
        format!("identity errors {e1:.1e}, {e2:.1e}"),
    ))
}

fn channel_capacity(seed: u64) -> Result<(bool, String)> {
    let rho = 10.0;
    let c = rayleigh_capacity(rho);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 200_000;
    let mc = (0..n)
        .map(|_| (1.0 + rho * crate::channel::complex_normal(&mut rng, 1.0).norm_sqr()).ln())
        .sum::<f64>()
        / n as f64;
    let rel = (mc / c - 1.0).abs();
    Ok((rel < 0.01, format!("E1 form {c:.5}, Monte Carlo {mc:.5}")))
}

fn channel_error(seed: u64) -> Result<(bool, String)> {
    let code = gaussian_integer_code(2.0)?;
    let enc = code.encoder()?;
    let r = error_prob_mc(
        &enc,
        &[CMat::identity(1, 1)],
        code.sigma_s().powi(2) / db_to_linear(20.0),
        10_000,
        seed,
    )?;
    Ok((
        r.bound_holds,
        format!(
            "P_e {:.2e} ± {:.1e}, union bound {:.2e}",
            r.p_e_hat, r.se, r.union_bound
        ),
    ))
}

fn channel_eve(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<CMat> = (0..2)
        .map(|_| CMat::from_fn(3, 1, |_, _| crate::channel::complex_normal(&mut rng, 1.0)))
        .collect();
    let red = EveReduction::new(&blocks)?;
    let mut worst = 0.0f64;
    for (i, h) in blocks.iter().enumerate() {
        let q = &red.q_blocks[i];
        worst = worst.max((q.adjoint() * q - CMat::identity(3, 3)).camax());
        let mut full = CMat::zeros(3, 1);
        full[(0, 0)] = red.r_blocks[i][(0, 0)];
        worst = worst.max((q * full - h).camax());
    }
    Ok((worst < 1e-12, format!("reconstruction error {worst:.1e}")))
}

fn channel_lln(seed: u64) -> Result<(bool, String)> {
    let rho = db_to_linear(-5.0);
    let ks = [10, 100, 1000];
    let spec = FadingSpec::new(FadingLaw::RayleighIid, 1, 1, 1.0, rho)?;
    let ergodic = lln_trend(&lln_diagnostic(
        &spec,
        rayleigh_capacity(rho),
        &ks,
        0.1,
        1000,
        seed,
    )?);
    let (l0, l1) = (0.3f64, 3.0f64);
    let levels = vec![
        CMat::from_element(1, 1, Complex64::new(l0, 0.0)),
        CMat::from_element(1, 1, Complex64::new(l1, 0.0)),
    ];
    let spec = FadingSpec::new(
        FadingLaw::Markov {
            levels,
            switch_prob: 1e-4,
        },
        1,
        1,
        1.0,
        rho,
    )?;
    let mean = 0.5 * ((1.0 + rho * l0 * l0).ln() + (1.0 + rho * l1 * l1).ln());
    let adversarial = lln_trend(&lln_diagnostic(&spec, mean, &ks, 0.1, 1000, seed)?);
    Ok((
        ergodic == LlnTrend::Decreasing && adversarial == LlnTrend::NonDecreasing,
        format!("Rayleigh {ergodic:?}, Markov {adversarial:?}"),
    ))
}
