//! Executable versions of the lattice Gaussian lemmas.
//!
//! * mixture check: `D_{Λ−c,√Σ1} + f_{√Σ2}` is within `4ε` of `f_{√(Σ1+Σ2)}` in L1, where
//!   `ε = ε_Λ(√Σ)` and `Σ^{-1} = Σ1^{-1} + Σ2^{-1}`;
//! * linear transform check: `A·D_{Λ−c,√Σ} = D_{A(Λ−c),√(AΣA†)}`;
//! * subgaussian check: `E[exp(Re(t†Ax))] ≤ (1+ε)/(1−ε)·exp(σ²‖A†t‖²/4)` for `x ~ D_{Λ−c,σ}`.
//!
//! Throughout, `shift` is the real-coordinate vector `c` of the coset `Λ − c`.

use std::collections::HashMap;

use rand_distr::{Distribution, StandardNormal};

use super::sampler::{DiscreteGaussianSampler, SamplerOptions};
use super::{flatness_factor, GaussianSpec};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{complex_to_real, herm_pow, realify, CMat, CVec, RVec};
use crate::montecarlo::run_blocks;
use crate::stats::{
    chi_square, default_bins, l1_against_uniform, ChiSquareReport, EqualMassBinner, L1Report,
};

/// Number of Poisson bootstrap replicates used for L1 standard errors.
pub const BOOTSTRAP_REPLICATES: usize = 200;

/// Outcome of the mixture check.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureReport {
    /// `ε_Λ(√Σ)`.
    pub epsilon: f64,
    /// `4ε`.
    pub bound: f64,
    pub l1: L1Report,
    /// `l1.debiased ≤ bound + 3·l1.se`.
    pub passes: bool,
}

/// Draws `X1 + X2` with `X1 ~ D_{Λ−c,√Σ1}`, `X2 ~ f_{√Σ2}` and measures its binned L1
/// distance to `f_{√(Σ1+Σ2)}`.
pub fn regev_mixture_check(
    lat: &Lattice,
    shift: &RVec,
    sigma1: &CMat,
    sigma2: &CMat,
    trials: u64,
    seed: u64,
) -> Result<MixtureReport> {
    let inv1 = herm_pow(sigma1, -1.0)?;
    let inv2 = herm_pow(sigma2, -1.0)?;
    let sigma = herm_pow(&(inv1 + inv2), -1.0)?;
    let epsilon = flatness_factor(lat, &GaussianSpec::correlated(sigma)?, 1e-15)?;
    if epsilon > 0.5 {
        return Err(Error::NotSmoothEnough {
            epsilon,
            limit: 0.5,
        });
    }
    let sampler =
        DiscreteGaussianSampler::new(lat, shift, &GaussianSpec::correlated(sigma1.clone())?)?;
    let noise =
        GaussianSpec::correlated(sigma2.clone())?.coloring()? * std::f64::consts::FRAC_1_SQRT_2;
    let cov0 = sigma1 + sigma2;
    let binner = EqualMassBinner::new(&cov0, default_bins(lat.dim_complex()))?;
    let counts = mixture_counts(&sampler, &noise, &binner, trials, seed, 0);
    let l1 = l1_against_uniform(&counts, BOOTSTRAP_REPLICATES, seed ^ 0xB007);
    let bound = 4.0 * epsilon;
    let passes = l1.debiased <= bound + 3.0 * l1.se;
    Ok(MixtureReport {
        epsilon,
        bound,
        l1,
        passes,
    })
}

/// Cell counts of `x + N x ~ sampler + noise`, where `noise` maps standard normals to the
/// continuous component.
pub(crate) fn mixture_counts(
    sampler: &DiscreteGaussianSampler,
    noise: &nalgebra::DMatrix<f64>,
    binner: &EqualMassBinner,
    trials: u64,
    seed: u64,
    stream: u64,
) -> Vec<u64> {
    let dim = noise.nrows();
    let cells = binner.cells();
    run_blocks(
        seed,
        stream,
        trials,
        || vec![0u64; cells],
        |rng, n, acc| {
            let mut g = RVec::zeros(dim);
            for _ in 0..n {
                let x = sampler.sample(rng);
                for v in g.iter_mut() {
                    *v = StandardNormal.sample(rng);
                }
                let y = x + noise * &g;
                acc[binner.cell(&y)] += 1;
            }
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )
}

/// Chi-square comparison of sampled `AX`, `X ~ D_{Λ−c,√Σ}`, against the independently
/// computed weights of `D_{A(Λ−c),√(AΣA†)}`.
pub fn linear_transform_check(
    lat: &Lattice,
    shift: &RVec,
    cov: &CMat,
    a: &CMat,
    trials: u64,
    seed: u64,
) -> Result<ChiSquareReport> {
    let ar = realify(a);
    if ar.determinant().abs() < 1e-12 {
        return Err(Error::InvalidArgument("transform is singular".into()));
    }
    let source = DiscreteGaussianSampler::new(lat, shift, &GaussianSpec::correlated(cov.clone())?)?;
    // Analytic target law on the transformed coset, built from scratch.
    let target_lat = lat.transformed(&ar)?;
    let target_shift = &ar * shift;
    let target_cov = a * cov * a.adjoint();
    let target = DiscreteGaussianSampler::new(
        &target_lat,
        &target_shift,
        &GaussianSpec::correlated(target_cov)?,
    )?;
    let index: HashMap<&[i64], usize> = target
        .coords()
        .iter()
        .enumerate()
        .map(|(i, z)| (z.as_slice(), i))
        .collect();
    let inv_basis = target_lat
        .basis()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidLattice("singular transformed basis".into()))?;
    let m = target.coords().len();
    let counts = run_blocks(
        seed,
        0,
        trials,
        || vec![0u64; m + 1],
        |rng, n, acc| {
            for _ in 0..n {
                let y = &ar * source.sample(rng);
                let z: Vec<i64> = (&inv_basis * (y + &target_shift))
                    .iter()
                    .map(|v| v.round() as i64)
                    .collect();
                match index.get(z.as_slice()) {
                    Some(&i) => acc[i] += 1,
                    None => acc[m] += 1,
                }
            }
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    let nf = trials as f64;
    let observed: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let mut expected: Vec<f64> = target.probs().iter().map(|p| p * nf).collect();
    // Mass outside the target support is certified below 1e-12.
    expected.push(target.mass_bound() * nf);
    chi_square(&observed, &expected, 5.0)
}

/// Outcome of the subgaussian moment-generating-function check.
#[derive(Clone, Debug, PartialEq)]
pub struct MgfReport {
    pub epsilon: f64,
    /// `E[exp(Re(t†Ax))] / ((1+ε)/(1−ε)·exp(σ²‖A†t‖²/4))` per test vector.
    pub ratios: Vec<f64>,
    pub worst_ratio: f64,
}

/// Exact (truncated-support) evaluation of the subgaussian bound.
pub fn subgaussian_mgf_check(
    lat: &Lattice,
    shift: &RVec,
    sigma: f64,
    a: &CMat,
    t_vectors: &[CVec],
) -> Result<MgfReport> {
    let spec = GaussianSpec::isotropic(lat.dim_complex(), sigma)?;
    let epsilon = flatness_factor(lat, &spec, 1e-15)?;
    if epsilon >= 1.0 {
        return Err(Error::NotSmoothEnough {
            epsilon,
            limit: 1.0,
        });
    }
    let s_vecs: Vec<RVec> = t_vectors
        .iter()
        .map(|t| complex_to_real(&(a.adjoint() * t)))
        .collect();
    let s_max = s_vecs.iter().map(|s| s.norm()).fold(0.0, f64::max);
    // The tilted law exp(−‖x‖²/σ² + s·x) is centred at σ²s/2, i.e. σ‖s‖/2 whitened units away.
    let opts = SamplerOptions {
        extra_radius: 0.5 * sigma * s_max + 1.0,
        ..SamplerOptions::default()
    };
    let sampler = DiscreteGaussianSampler::with_options(lat, shift, &spec, &opts)?;
    let factor = (1.0 + epsilon) / (1.0 - epsilon);
    let ratios: Vec<f64> = s_vecs
        .iter()
        .map(|s| {
            let e = sampler.expectation(|x| s.dot(x).exp());
            e / (factor * (sigma * sigma * s.norm_squared() / 4.0).exp())
        })
        .collect();
    let worst_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MgfReport {
        epsilon,
        ratios,
        worst_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scaled_identity;
    use num_complex::Complex64;

    #[test]
    fn identity_transform_fits() {
        let z2 = Lattice::integer(1);
        let r = linear_transform_check(
            &z2,
            &RVec::zeros(2),
            &scaled_identity(1, 1.0),
            &scaled_identity(1, 1.0),
            100_000,
            3,
        )
        .unwrap();
        assert!(r.p_value > 0.001, "{r:?}");
    }

    #[test]
    fn mgf_at_zero_is_one() {
        let z2 = Lattice::integer(1);
        let t0 = CVec::from_element(1, Complex64::new(0.0, 0.0));
        let r = subgaussian_mgf_check(&z2, &RVec::zeros(2), 2.0, &scaled_identity(1, 1.0), &[t0])
            .unwrap();
        assert!((r.ratios[0] * (1.0 + r.epsilon) / (1.0 - r.epsilon) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_lattice_mixture_is_gaussian() {
        let lat = Lattice::integer(1).scaled(0.05).unwrap();
        let r = regev_mixture_check(
            &lat,
            &RVec::zeros(2),
            &scaled_identity(1, 1.0),
            &scaled_identity(1, 1.0),
            200_000,
            5,
        )
        .unwrap();
        assert!(r.epsilon < 1e-100);
        assert!(r.passes, "{r:?}");
    }
}
