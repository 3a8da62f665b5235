//! MMSE-GDFE identities, exact MAP decoding, error-probability bounds, the Rayleigh capacity
//! and Eve's unitary reduction.

use lattice_wiretap::algebra::catalog;
use lattice_wiretap::channel::experiments::EveReduction;
use lattice_wiretap::channel::{
    complex_noise, db_to_linear, decode_map, error_prob_mc, eve_observe, mmse_gdfe,
    rayleigh_capacity,
};
use lattice_wiretap::linalg::{real_to_complex, CMat};
use lattice_wiretap::wiretap::rates::log_det_gain;
use lattice_wiretap::wiretap::{build_code, BaseLattice, CodeParams, WiretapCode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian_integers(rate_aux: f64) -> WiretapCode {
    let lat = catalog::resolve("q-i").unwrap().lattice;
    build_code(
        BaseLattice::Vector(lat),
        CodeParams::new(4f64.ln(), rate_aux, 1.0),
    )
    .unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        Complex64::new(a, b) / 2f64.sqrt()
    })
}

#[test]
fn mmse_factorisation_limits() {
    // H = I at very high SNR: R → I up to unit-modulus phases.
    let m = mmse_gdfe(&[CMat::identity(2, 2)], 1e9).unwrap();
    let r = &m.r_blocks[0];
    for i in 0..2 {
        for j in 0..2 {
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((r[(i, j)].norm() - target).abs() < 1e-8);
        }
    }
    // H = 0: the regulariser alone, |R| = I/√ρ.
    let rho = 4.0;
    let m = mmse_gdfe(&[CMat::zeros(3, 2)], rho).unwrap();
    for i in 0..2 {
        assert!((m.r_blocks[0][(i, i)].norm() - 0.5).abs() < 1e-14);
    }
    assert!(m.q1_blocks[0].camax() < 1e-14);
    // Random blocks satisfy both identities.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let blocks: Vec<CMat> = (0..3).map(|_| random_matrix(&mut rng, 3, 2)).collect();
    let m = mmse_gdfe(&blocks, 2.5).unwrap();
    let (e1, e2) = m.identity_errors(&blocks).unwrap();
    assert!(e1 < 1e-12 && e2 < 1e-12, "{e1} {e2}");
}

#[test]
fn decoder_matches_brute_force_map() {
    let code = gaussian_integers(1.0);
    let enc = code.encoder().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let s2 = code.sigma_s().powi(2);
    for trial in 0..500 {
        let h = random_matrix(&mut rng, 1, 1);
        let rho = db_to_linear(rng.random_range(-5.0..15.0));
        let noise_var = s2 / rho;
        let m = rng.random_range(0..code.messages());
        let x = real_to_complex(&enc.encode(m, &mut rng).unwrap());
        let y = &h * &x + complex_noise(&mut rng, 1, noise_var);
        // Regularised minimum over a coefficient box of Λ_b.
        let mut best = (f64::INFINITY, 0usize);
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                let p = code.lambda_b().point(&[a, b]);
                let xc = real_to_complex(&p);
                let cost = (&y - &h * &xc).norm_squared() + xc.norm_squared() / rho;
                if cost < best.0 {
                    best = (cost, code.coset_index(&p).unwrap());
                }
            }
        }
        let got = decode_map(&code, &y, &[h], rho).unwrap();
        assert_eq!(got, best.1, "instance {trial}");
    }
}

#[test]
fn error_probability_respects_bounds() {
    let code = gaussian_integers(2.0);
    let enc = code.encoder().unwrap();
    let noise_var = code.sigma_s().powi(2) / db_to_linear(20.0);
    let r = error_prob_mc(&enc, &[CMat::identity(1, 1)], noise_var, 10_000, 7).unwrap();
    assert!(r.rate_condition_met);
    assert!(r.bound_holds, "{r:?}");
    assert!(r.errors > 0 && r.p_e_hat < 0.01);
    let bk = r.banaszczyk_bound.expect("τ condition holds");
    assert!(r.union_bound <= bk, "{r:?}");
}

#[test]
fn far_outside_the_rate_region_decoding_is_near_chance() {
    let code = gaussian_integers(2.0);
    let enc = code.encoder().unwrap();
    let noise_var = code.sigma_s().powi(2) / db_to_linear(-20.0);
    let r = error_prob_mc(&enc, &[CMat::identity(1, 1)], noise_var, 4000, 8).unwrap();
    assert!(!r.rate_condition_met);
    // Four messages: chance level is 3/4.
    assert!((r.p_e_hat - 0.75).abs() < 0.05, "{}", r.p_e_hat);
}

#[test]
fn rayleigh_capacity_matches_quadrature_and_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for rho in [0.1, 1.0, 10.0, 100.0] {
        let c = rayleigh_capacity(rho);
        // Composite Simpson on ∫_0^∞ ln(1 + ρx)e^{−x} dx, truncated at x = 60.
        let n = 200_000;
        let hstep = 60.0 / n as f64;
        let f = |x: f64| (1.0 + rho * x).ln() * (-x).exp();
        let mut s = f(0.0) + f(60.0);
        for i in 1..n {
            s += f(i as f64 * hstep) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let quad = s * hstep / 3.0;
        assert!(
            (c - quad).abs() < 1e-9 * quad.max(1.0),
            "ρ = {rho}: {c} vs {quad}"
        );
        let draws = 400_000;
        let mc: f64 = (0..draws)
            .map(|_| {
                let g = lattice_wiretap::channel::complex_normal(&mut rng, 1.0);
                (1.0 + rho * g.norm_sqr()).ln()
            })
            .sum::<f64>()
            / draws as f64;
        assert!((mc / c - 1.0).abs() < 0.01, "ρ = {rho}: {mc} vs {c}");
    }
}

#[test]
fn eve_reduction_is_unitary_and_permutation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let blocks: Vec<CMat> = (0..2).map(|_| random_matrix(&mut rng, 3, 1)).collect();
    let red = EveReduction::new(&blocks).unwrap();
    for (i, h) in blocks.iter().enumerate() {
        let q = &red.q_blocks[i];
        assert!((q.adjoint() * q - CMat::identity(3, 3)).camax() < 1e-12);
        let mut full = CMat::zeros(3, 1);
        full[(0, 0)] = red.r_blocks[i][(0, 0)];
        assert!((q * full - h).camax() < 1e-12);
        assert!((log_det_gain(h, 3.0) - log_det_gain(&red.r_blocks[i], 3.0)).abs() < 1e-12);
        // Permuting Eve's antennas changes Q but not |R'|.
        let mut p = h.clone();
        p.swap_rows(0, 2);
        let rp = EveReduction::new(&[p]).unwrap();
        assert!((rp.r_blocks[0][(0, 0)].norm() - red.r_blocks[i][(0, 0)].norm()).abs() < 1e-12);
    }
    // The discarded rows carry noise only: mean power σ², uncorrelated with the codeword.
    let code = {
        let lat = catalog::resolve("q-zeta5").unwrap().lattice;
        build_code(
            BaseLattice::Vector(lat),
            CodeParams::new(4f64.ln(), 3.0, 1.0),
        )
        .unwrap()
    };
    let enc = code.encoder().unwrap();
    let noise_var = 0.3;
    let draws = 20_000;
    let mut power = 0.0;
    let mut cross = Complex64::new(0.0, 0.0);
    for _ in 0..draws {
        let obs = eve_observe(&enc, 0, &red, noise_var, &mut rng).unwrap();
        assert_eq!(obs.reduced.len(), 2);
        assert_eq!(obs.discarded.len(), 4);
        power += obs.discarded.norm_squared() / 4.0;
        cross += obs.discarded[0] * obs.reduced[0].conj();
    }
    let power = power / draws as f64;
    assert!((power / noise_var - 1.0).abs() < 0.03, "{power}");
    assert!((cross / draws as f64).norm() < 0.03);
}

#[test]
fn lln_trend_separates_ergodic_and_adversarial_laws() {
    use lattice_wiretap::channel::{lln_diagnostic, lln_trend, FadingLaw, FadingSpec, LlnTrend};
    let rho = db_to_linear(-5.0);
    let ks = [10, 100, 1000];
    let spec = FadingSpec::new(FadingLaw::RayleighIid, 1, 1, 1.0, rho).unwrap();
    let pts = lln_diagnostic(&spec, rayleigh_capacity(rho), &ks, 0.1, 2000, 3).unwrap();
    assert_eq!(lln_trend(&pts), LlnTrend::Decreasing, "{pts:?}");
    // Two slowly alternating levels: the block average rarely leaves one level.
    let levels = vec![
        CMat::from_element(1, 1, Complex64::new(0.3, 0.0)),
        CMat::from_element(1, 1, Complex64::new(3.0, 0.0)),
    ];
    let law = FadingLaw::Markov {
        levels,
        switch_prob: 1e-4,
    };
    let spec = FadingSpec::new(law, 1, 1, 1.0, rho).unwrap();
    let mean = 0.5 * ((1.0 + rho * 0.09).ln() + (1.0 + rho * 9.0).ln());
    let pts = lln_diagnostic(&spec, mean, &ks, 0.1, 2000, 4).unwrap();
    assert_eq!(lln_trend(&pts), LlnTrend::NonDecreasing, "{pts:?}");
}
