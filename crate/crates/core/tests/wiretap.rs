//! Nested-code construction, rate formulas, shaping checks and uncertainty sets.

use std::f64::consts::{E, PI};

use lattice_wiretap::algebra::catalog;
use lattice_wiretap::algebra::constants::{d_from_rd, rate_constants, t_from_rd, MARTINET_RD};
use lattice_wiretap::channel::{draw_channel, rayleigh_capacity, FadingLaw, FadingSpec};
use lattice_wiretap::gauss::{flatness_factor, flatness_factor_sigma, flatness_unit, GaussianSpec};
use lattice_wiretap::lattice::Lattice;
use lattice_wiretap::linalg::{realify, sym_pow, CMat};
use lattice_wiretap::wiretap::rates::{
    achievable_rates, compound_sets_check, RateBudget, RateMode,
};
use lattice_wiretap::wiretap::secrecy::{entropy_check, faded_lattice, power_check};
use lattice_wiretap::wiretap::{build_code, BaseLattice, CodeParams, WiretapCode, DEFAULT_T};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn code(name: &str, rate_aux: f64) -> WiretapCode {
    let lat = catalog::resolve(name).unwrap().lattice;
    build_code(
        BaseLattice::Vector(lat),
        CodeParams::new(4f64.ln(), rate_aux, 1.0),
    )
    .unwrap()
}

fn scalar(h: f64) -> CMat {
    CMat::from_element(1, 1, Complex64::new(h, 0.0))
}

#[test]
fn zeta5_code_has_sixteen_cosets() {
    let c = code("q-zeta5", 3.0);
    assert_eq!(c.scale(), 2);
    assert_eq!(c.messages(), 16);
    assert!(c.lambda_b().contains_lattice(c.lambda_e(), 1e-9).unwrap());
    let mut seen = vec![false; 16];
    for m in 0..16 {
        let idx = c.coset_index(c.leader(m)).unwrap();
        assert_eq!(idx, m);
        seen[idx] = true;
        // Shifting a leader by a Λ_e point keeps its coset.
        let shifted = c.leader(m) + c.lambda_e().point(&[1, -2, 0, 3]);
        assert_eq!(c.coset_index(&shifted).unwrap(), m);
    }
    assert!(seen.iter().all(|&s| s));
}

#[test]
fn volume_bookkeeping() {
    for (name, rate_aux) in [("q-i", 2.0), ("q-zeta5", 3.0), ("q-zeta8", 1.5)] {
        let c = code(name, rate_aux);
        let dimc = c.dim_complex() as f64;
        let sigma2 = c.power() / c.antennas() as f64;
        let expected = dimc * (PI * E * sigma2).ln() - c.uses() * rate_aux;
        assert!(
            (c.lambda_e().volume().ln() - expected).abs() < 1e-9,
            "{name}"
        );
        let index = (c.lambda_e().volume() / c.lambda_b().volume()).ln();
        assert!((index - c.uses() * c.rate()).abs() < 1e-9, "{name}");
        assert!((index - (c.messages() as f64).ln()).abs() < 1e-9, "{name}");
    }
}

#[test]
fn transmit_power_and_shaping_entropy() {
    let c = code("q-i", 3.0);
    let enc = c.encoder().unwrap();
    let p = power_check(&enc, DEFAULT_T, 100_000, 11).unwrap();
    assert!(p.epsilon < 0.5);
    assert!(p.holds_exact, "{p:?}");
    assert!(p.holds_empirical, "{p:?}");
    // For t ≥ 1/e no extra factor is needed.
    let p = power_check(&enc, 0.5, 1000, 11).unwrap();
    assert_eq!(p.bound, p.bound_displayed);
    assert!(p.holds_exact, "{p:?}");
    for m in [0, 3] {
        let h = entropy_check(&enc, m, DEFAULT_T, 100_000, 12).unwrap();
        assert!(h.holds_truncated, "{h:?}");
        assert!(h.holds_plug_in, "{h:?}");
    }
}

#[test]
fn rate_grid_is_consistent_and_monotone() {
    let t = t_from_rd(MARTINET_RD);
    let mut last = f64::NEG_INFINITY;
    for i in 0..20 {
        let c_b = 5.0 + i as f64;
        let b = RateBudget {
            c_b,
            c_e: 2.0,
            g_b: t,
            g_e: t,
            n: 1,
        };
        let r = achievable_rates(&b, RateMode::SisoFading).unwrap();
        assert!((r.r_max - (r.r_sum_max - r.r_prime_min)).abs() < 1e-12);
        assert!((r.kappa(&b) - rate_constants(MARTINET_RD, 1).kappa_siso).abs() < 1e-12);
        assert!(r.r_max > last);
        last = r.r_max;
        // The auxiliary-rate floor only depends on Eve; the sum-rate ceiling only on Bob.
        let b2 = RateBudget { c_e: 3.0, ..b };
        let r2 = achievable_rates(&b2, RateMode::SisoFading).unwrap();
        assert!((r2.r_prime_min - r.r_prime_min - 1.0).abs() < 1e-12);
        assert_eq!(r2.r_sum_max, r.r_sum_max);
    }
}

#[test]
fn mimo_gap_matches_division_algebra_constant() {
    for n in [2, 3] {
        let d = d_from_rd(MARTINET_RD, n);
        let b = RateBudget {
            c_b: 40.0,
            c_e: 5.0,
            g_b: d,
            g_e: d,
            n,
        };
        for mode in [RateMode::Mimo, RateMode::Compound] {
            let kappa = achievable_rates(&b, mode).unwrap().kappa(&b);
            assert!(
                (kappa - rate_constants(MARTINET_RD, n).kappa_mimo).abs() < 1e-10,
                "n = {n}"
            );
        }
    }
}

#[test]
fn correlated_flatness_equals_whitened() {
    let c = code("q-zeta5", 3.0);
    let blocks = [scalar(0.7), scalar(1.3)];
    let sigma_e2 = 0.4;
    let (faded, cov) = faded_lattice(&c, &blocks, sigma_e2).unwrap();
    let eps = flatness_factor(
        &faded,
        &GaussianSpec::correlated(cov.clone()).unwrap(),
        1e-14,
    )
    .unwrap();
    // Independent whitening: Σ^{-1/2} in real coordinates (each real coordinate has variance Σ/2,
    // so the unit-σ normalisation uses the complex covariance itself).
    let w = sym_pow(&realify(&cov), -0.5).unwrap();
    let whitened = Lattice::new(&w * faded.basis()).unwrap();
    let eps_w = flatness_unit(&whitened, 1e-14).unwrap();
    assert!(
        (eps - eps_w).abs() < 1e-10 * eps.max(1.0),
        "{eps} vs {eps_w}"
    );
    // Single block: the covariance is scalar and the isotropic formula applies.
    let c1 = code("q-i", 2.0);
    let h = 0.7f64;
    let s2 = c1.sigma_s().powi(2);
    let var = 1.0 / (1.0 / (h * h * s2) + 1.0 / sigma_e2);
    let (faded1, cov1) = faded_lattice(&c1, &[scalar(h)], sigma_e2).unwrap();
    let a = flatness_factor(&faded1, &GaussianSpec::correlated(cov1).unwrap(), 1e-14).unwrap();
    let b = flatness_factor_sigma(&faded1, var.sqrt(), 1e-14).unwrap();
    assert!((a - b).abs() < 1e-10 * a.max(1.0));
}

#[test]
fn alternating_channel_sits_on_the_varying_boundary() {
    let rho = 1.0;
    let (g1, g2) = (0.5f64, 2.0f64);
    let h: Vec<CMat> = (0..10)
        .map(|i| scalar(if i % 2 == 0 { g1 } else { g2 }))
        .collect();
    let avg = 0.5 * ((1.0 + rho * g1 * g1).ln() + (1.0 + rho * g2 * g2).ln());
    let m = compound_sets_check(&h, &h, avg, avg, rho, rho).unwrap();
    assert!(m.varying_b && m.varying_e);
    assert_eq!(m.compound_b, None);
    let m = compound_sets_check(&h, &h, avg + 1e-6, avg - 1e-6, rho, rho).unwrap();
    assert!(!m.varying_b && !m.varying_e);
    // A static channel at the same average is compound-admissible as well.
    let g = ((avg.exp() - 1.0) / rho).sqrt();
    let s: Vec<CMat> = vec![scalar(g); 10];
    let m = compound_sets_check(&s, &s, avg, avg, rho, rho).unwrap();
    assert_eq!(m.compound_b, Some(true));
    assert_eq!(m.compound_e, Some(true));
}

#[test]
fn rayleigh_blocks_meet_a_relaxed_threshold_often() {
    let rho = 1.0;
    let spec = FadingSpec::new(FadingLaw::RayleighIid, 1, 1, 1.0, rho).unwrap();
    let c = rayleigh_capacity(rho);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 2000;
    let mut hits = 0;
    for _ in 0..draws {
        let r = draw_channel(&spec, 100, &mut rng).unwrap();
        let m = compound_sets_check(&r.blocks, &r.blocks, c - 0.1, c + 0.1, rho, rho).unwrap();
        if m.varying_b && m.varying_e {
            hits += 1;
        }
    }
    // The sample mean of ln(1 + |h|²) has standard deviation ≈ 0.07 at k = 100.
    assert!(hits as f64 / draws as f64 > 0.8, "{hits}");
}

#[test]
fn infeasible_rate_is_rejected() {
    let lat = Lattice::integer(1);
    assert!(build_code(BaseLattice::Vector(lat), CodeParams::new(1.0, 1.0, 1.0)).is_err());
}
