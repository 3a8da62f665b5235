//! Exact discrete Gaussian sampling over a truncated, certified point cloud.
//!
//! The sampler draws from `D_{Λ−c,√Σ}` (centre `μ` taken from the [`GaussianSpec`]):
//! mass proportional to `exp(−(x−μ)†Σ^{-1}(x−μ))` on `x ∈ Λ − c`. All points within a
//! whitened radius `r = m·√(nπ)` of the centre are enumerated. Banaszczyk's coset bound
//! `ρ((Λ'−t) \ rB) ≤ 2C(m)^n ρ(Λ')` certifies the omitted mass; `m` is increased from its
//! configured starting value until the certified fraction is below the mass tolerance.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{banaszczyk_constant, expected_points, theta_sum, GaussianSpec, MAX_POINTS};
use crate::error::{Error, Result};
use crate::lattice::{Enumerator, Lattice};
use crate::linalg::RVec;

/// Construction options.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerOptions {
    /// Starting truncation multiplier `m` (radius `m·√(nπ)` in whitened units).
    pub radius_mult: f64,
    /// Required bound on the truncated probability mass.
    pub mass_tol: f64,
    /// Additional whitened radius (used when the support must cover tilted measures).
    pub extra_radius: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            radius_mult: 1.5,
            mass_tol: 1e-12,
            extra_radius: 0.0,
        }
    }
}

/// Immutable sampler for `D_{Λ−c,√Σ}`.
#[derive(Clone, Debug)]
pub struct DiscreteGaussianSampler {
    lattice: Lattice,
    shift: RVec,
    spec: GaussianSpec,
    radius_mult: f64,
    mass_bound: f64,
    points: Vec<RVec>,
    coords: Vec<Vec<i64>>,
    probs: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl DiscreteGaussianSampler {
    /// Sampler with default options; `shift` is `c` in real coordinates.
    pub fn new(lattice: &Lattice, shift: &RVec, spec: &GaussianSpec) -> Result<Self> {
        Self::with_options(lattice, shift, spec, &SamplerOptions::default())
    }

    pub fn with_options(
        lattice: &Lattice,
        shift: &RVec,
        spec: &GaussianSpec,
        opts: &SamplerOptions,
    ) -> Result<Self> {
        let n = lattice.dim_real();
        if shift.len() != n || spec.dim() != lattice.dim_complex() {
            return Err(Error::Shape(
                "shift/spec dimensions do not match the lattice".into(),
            ));
        }
        let w = spec.whitening()?;
        let wl = lattice.transformed(&w)?;
        let target = &w * (shift + spec.center_real());
        // ρ(Λ') ≤ 1 + certified theta sum at a = 1.
        let rho_all = 1.0
            + theta_sum(&wl, 1.0, 1e-3)
                .map_err(|e| Error::Certification(e.to_string()))?
                .upper();
        let en = Enumerator::new(&wl)?;
        let mut m = opts.radius_mult.max(1.0 / (2.0 * PI).sqrt() + 1e-3);
        for _ in 0..200 {
            let r = m * (n as f64 * PI).sqrt() + opts.extra_radius;
            let r2 = r * r;
            let cm = banaszczyk_constant(r / (n as f64 * PI).sqrt());
            let cn = cm.powi(n as i32);
            // The coset mass never exceeds ρ(Λ'), so the certificate is at least 2C^n.
            if cn >= 1.0 || 2.0 * cn > opts.mass_tol {
                m += 0.25;
                continue;
            }
            if expected_points(&wl, r2) > MAX_POINTS {
                return Err(Error::Certification(format!(
                    "support of about {:.3e} points is too large",
                    expected_points(&wl, r2)
                )));
            }
            let pts = en
                .points_in_ball(Some(&target), r2)
                .map_err(|e| Error::Certification(e.to_string()))?;
            let rho_in: f64 = pts.iter().map(|(_, d)| (-d).exp()).sum();
            let bound = 2.0 * cn * rho_all / rho_in;
            if bound <= opts.mass_tol {
                return Self::finish(lattice, shift, spec, m, bound, pts);
            }
            m += 0.25;
        }
        Err(Error::Certification(
            "truncation radius did not converge".into(),
        ))
    }

    fn finish(
        lattice: &Lattice,
        shift: &RVec,
        spec: &GaussianSpec,
        m: f64,
        bound: f64,
        mut pts: Vec<(Vec<i64>, f64)>,
    ) -> Result<Self> {
        // Deterministic order independent of the enumeration path.
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        let dmin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = pts.iter().map(|(_, d)| (dmin - d).exp()).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let index = WeightedIndex::new(&probs).map_err(|e| Error::Certification(e.to_string()))?;
        let points = pts.iter().map(|(z, _)| lattice.point(z) - shift).collect();
        let coords = pts.into_iter().map(|(z, _)| z).collect();
        Ok(Self {
            lattice: lattice.clone(),
            shift: shift.clone(),
            spec: spec.clone(),
            radius_mult: m,
            mass_bound: bound,
            points,
            coords,
            probs,
            index,
        })
    }

    /// Draws one support index.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }

    /// Draws one point `x ∈ Λ − c` (real coordinates).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RVec {
        self.points[self.sample_index(rng)].clone()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn shift(&self) -> &RVec {
        &self.shift
    }

    pub fn spec(&self) -> &GaussianSpec {
        &self.spec
    }

    /// Truncation multiplier actually used.
    pub fn radius_mult(&self) -> f64 {
        self.radius_mult
    }

    /// Certified bound on the truncated probability mass.
    pub fn mass_bound(&self) -> f64 {
        self.mass_bound
    }

    /// Support points `x = Bz − c`.
    pub fn points(&self) -> &[RVec] {
        &self.points
    }

    /// Lattice coordinates `z` of the support points.
    pub fn coords(&self) -> &[Vec<i64>] {
        &self.coords
    }

    /// Normalised probabilities of the support points.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Exact expectation of `g(x)` under the truncated law.
    pub fn expectation<F: Fn(&RVec) -> f64>(&self, g: F) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| p * g(x))
            .sum()
    }

    /// Shannon entropy (nats) of the truncated law.
    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RMat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weights_are_normalised_and_certified() {
        let z2 = Lattice::integer(1);
        let spec = GaussianSpec::isotropic(1, 2.0).unwrap();
        let s = DiscreteGaussianSampler::new(&z2, &RVec::zeros(2), &spec).unwrap();
        assert!((s.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(s.mass_bound() <= 1e-12);
    }

    #[test]
    fn symmetric_integer_gaussian() {
        // D_{Z²,σ} is a product law, so its first coordinate is distributed as D_{Z,σ=2}.
        let lat = Lattice::new(RMat::identity(2, 2)).unwrap();
        let spec = GaussianSpec::isotropic(1, 2.0).unwrap();
        let s = DiscreteGaussianSampler::new(&lat, &RVec::zeros(2), &spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1_000_000;
        let (mut mean, mut c0, mut cp, mut cm) = (0.0, 0, 0, 0);
        for _ in 0..n {
            let x = s.sample(&mut rng);
            mean += x[0];
            match x[0].round() as i64 {
                0 => c0 += 1,
                1 => cp += 1,
                -1 => cm += 1,
                _ => {}
            }
        }
        mean /= n as f64;
        assert!(mean.abs() < 0.01);
        assert!(c0 > cp && c0 > cm);
        let rel = (cp as f64 - cm as f64).abs() / cp as f64;
        assert!(rel < 0.02);
    }

    #[test]
    fn shifted_coset_is_symmetric_about_origin() {
        let z2 = Lattice::integer(1);
        let spec = GaussianSpec::isotropic(1, 1.3).unwrap();
        let c = RVec::from_vec(vec![0.5, 0.5]);
        let s = DiscreteGaussianSampler::new(&z2, &c, &spec).unwrap();
        // Z² − c is invariant under x ↦ −x; the law must be too.
        for (x, p) in s.points().iter().zip(s.probs()) {
            let j = s
                .points()
                .iter()
                .position(|y| (y + x).norm() < 1e-12)
                .expect("negation in support");
            assert!((s.probs()[j] - p).abs() < 1e-15);
        }
    }
}
