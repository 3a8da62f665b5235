//! Flatness factor, smoothing parameter, Banaszczyk tails and the discrete-Gaussian lemmas.

use std::f64::consts::PI;

use lattice_wiretap::algebra::catalog;
use lattice_wiretap::gauss::checks::{
    linear_transform_check, regev_mixture_check, subgaussian_mgf_check,
};
use lattice_wiretap::gauss::{
    banaszczyk_tail, flatness_factor_sigma, smoothing_parameter, DiscreteGaussianSampler,
    GaussianSpec,
};
use lattice_wiretap::lattice::{min_distance, Lattice};
use lattice_wiretap::linalg::{scaled_identity, CMat, CVec, RMat, RVec};
use lattice_wiretap::stats::{default_bins, l1_against_uniform, EqualMassBinner};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `max_x |V(Λ)·Σ_λ f_σ(x − λ) − 1|` over a grid on the fundamental parallelepiped of a
/// 2-dimensional lattice, with the primal sum taken directly.
fn grid_flatness(lat: &Lattice, sigma: f64) -> f64 {
    let b = lat.basis();
    let v = lat.volume();
    let s2 = sigma * sigma;
    let reach = 12.0 * sigma / min_distance(lat, 0.0).unwrap().lambda1 + 3.0;
    let r = reach.ceil() as i64 + 2;
    let density = |x: &RVec| -> f64 {
        let mut s = 0.0;
        for a in -r..=r {
            for c in -r..=r {
                let p = b * RVec::from_vec(vec![a as f64, c as f64]);
                s += (-(x - p).norm_squared() / s2).exp();
            }
        }
        s / (PI * s2)
    };
    let steps = 60;
    let mut best = 0.0f64;
    for i in 0..steps {
        for j in 0..steps {
            let u = RVec::from_vec(vec![i as f64 / steps as f64, j as f64 / steps as f64]);
            best = best.max((v * density(&(b * u)) - 1.0).abs());
        }
    }
    best
}

fn random_lattice(seed: u64, k: usize) -> Lattice {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * k;
    loop {
        let m = RMat::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        if m.determinant().abs() > 0.3 {
            return Lattice::new(m).unwrap();
        }
    }
}

#[test]
fn dual_theta_flatness_equals_primal_grid_maximum() {
    let zi = catalog::resolve("q-i").unwrap().lattice;
    for (lat, sigma) in [
        (Lattice::integer(1), 0.6),
        (random_lattice(3, 1), 0.7),
        (zi, 0.45),
    ] {
        let eps = flatness_factor_sigma(&lat, sigma, 1e-14).unwrap();
        let grid = grid_flatness(&lat, sigma);
        assert!((eps - grid).abs() < 1e-6, "{eps} vs {grid}");
    }
}

#[test]
fn smoothing_parameter_round_trip() {
    for (lat, sigma) in [(Lattice::integer(2), 0.9), (random_lattice(5, 2), 1.1)] {
        let eps = flatness_factor_sigma(&lat, sigma, 1e-15).unwrap();
        let eta = smoothing_parameter(&lat, eps).unwrap();
        assert!(
            (eta / ((2.0 * PI).sqrt() * sigma) - 1.0).abs() < 1e-8,
            "{eta}"
        );
    }
}

#[test]
fn banaszczyk_tail_bound_across_lattices() {
    let lats = [
        Lattice::integer(1),
        Lattice::integer(2),
        Lattice::integer(4),
        catalog::resolve("q-zeta5").unwrap().lattice,
    ];
    for lat in &lats {
        let n = lat.dim_real() as f64;
        let lambda1 = min_distance(lat, 0.0).unwrap().lambda1;
        for c in [0.8, 1.0, 1.5] {
            let tau_min = n.sqrt() * c / lambda1;
            for i in 1..=20 {
                let tau = tau_min * (1.0 + 0.05 * i as f64);
                let r = banaszczyk_tail(lat, tau, c).unwrap();
                assert!(r.applicable);
                assert!(r.holds, "n = {n}, c = {c}, τ = {tau}: {r:?}");
            }
        }
    }
}

#[test]
fn mixture_of_discrete_and_continuous_gaussians() {
    let z2 = Lattice::integer(1);
    let s = scaled_identity(1, 4.0);
    let r = regev_mixture_check(&z2, &RVec::zeros(2), &s, &s, 1_000_000, 21).unwrap();
    assert!(r.epsilon < 1e-7);
    assert!(r.passes, "{r:?}");
    assert!(r.l1.l1 < r.l1.floor + 4.0 * r.l1.se, "{r:?}");
}

#[test]
fn estimator_noise_floor_is_calibrated() {
    // Exact Gaussian samples: the raw statistic sits at its analytic noise floor.
    let cov = scaled_identity(1, 2.0);
    let binner = EqualMassBinner::new(&cov, default_bins(1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut counts = vec![0u64; binner.cells()];
    for _ in 0..1_000_000 {
        let x = RVec::from_fn(2, |_, _| StandardNormal.sample(&mut rng));
        counts[binner.cell(&x)] += 1;
    }
    let r = l1_against_uniform(&counts, 100, 1);
    assert!(r.debiased.abs() < 3.0 * r.se + 1e-3, "{r:?}");
}

#[test]
fn linear_transforms_of_discrete_gaussians() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let z2 = Lattice::integer(1);
    for _ in 0..5 {
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
            &z2,
            &shift,
            &scaled_identity(1, 1.5),
            &a,
            200_000,
            rng.random(),
        )
        .unwrap();
        assert!(r.p_value > 0.001, "{r:?}");
    }
}

#[test]
fn subgaussian_moment_generating_function() {
    let z4 = Lattice::integer(2);
    let shift = RVec::from_vec(vec![0.3, -0.2, 0.1, 0.45]);
    let a = CMat::from_fn(2, 2, |i, j| {
        Complex64::new(1.0 + (i + 2 * j) as f64 * 0.3, 0.2 * i as f64)
    });
    let dirs: Vec<CVec> = (0..24)
        .map(|t| {
            let ang = t as f64 * PI / 12.0;
            CVec::from_vec(vec![
                Complex64::from_polar(0.8, ang),
                Complex64::new(0.3 * ang.sin(), 0.5),
            ])
        })
        .collect();
    let r = subgaussian_mgf_check(&z4, &shift, 1.2, &a, &dirs).unwrap();
    assert!(r.worst_ratio <= 1.0, "{r:?}");
}

#[test]
fn sampler_matches_direct_weights_on_z2() {
    let z2 = Lattice::integer(1);
    let spec = GaussianSpec::isotropic(1, 0.8).unwrap();
    let shift = RVec::from_vec(vec![0.25, -0.1]);
    let s = DiscreteGaussianSampler::new(&z2, &shift, &spec).unwrap();
    // Direct normalisation over a wide box.
    let w = |a: i64, b: i64| (-((a as f64 - 0.25).powi(2) + (b as f64 + 0.1).powi(2)) / 0.64).exp();
    let total: f64 = (-15..=15)
        .flat_map(|a| (-15..=15).map(move |b| w(a, b)))
        .sum();
    for (p, prob) in s.points().iter().zip(s.probs()) {
        let (a, b) = ((p[0] + 0.25).round() as i64, (p[1] - 0.1).round() as i64);
        assert!((prob - w(a, b) / total).abs() < 1e-12);
    }
}
