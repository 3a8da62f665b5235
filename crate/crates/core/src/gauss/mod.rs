//! Lattice Gaussian measures.
//!
//! The continuous Gaussian on `C^k` is `f_{√Σ,c}(z) = (π^k det Σ)^{-1} exp(−(z−c)†Σ^{-1}(z−c))`;
//! the scalar case `Σ = σ²I` gives each real coordinate variance `σ²/2`. The flatness factor
//! of `Λ` is the dual theta sum `Σ_{λ*≠0} exp(−π²σ²‖λ*‖²)`, and correlated covariances are
//! absorbed into the lattice: `ε_Λ(√Σ) = ε_{Σ^{-1/2}Λ}(1)`.

pub mod checks;
pub mod sampler;

use std::f64::consts::{E, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::lattice::{Enumerator, Lattice};
use crate::linalg::{
    complex_to_real, herm_pow, is_hermitian_pd, realify, scaled_identity, CMat, CVec, RMat, RVec,
};

pub use checks::{
    linear_transform_check, regev_mixture_check, subgaussian_mgf_check, MgfReport, MixtureReport,
};
pub use sampler::{DiscreteGaussianSampler, SamplerOptions};

/// Largest number of lattice points a theta sum or sampler support may enumerate.
pub const MAX_POINTS: f64 = 5.0e7;

/// Complex Gaussian parameters: covariance `Σ` (Hermitian positive definite) and centre.
#[derive(Clone, Debug)]
pub struct GaussianSpec {
    cov: CMat,
    center: CVec,
}

impl GaussianSpec {
    /// Isotropic `f_σ` on `C^k`, centred at the origin.
    pub fn isotropic(k: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Self::correlated(scaled_identity(k, sigma * sigma))
    }

    /// Correlated `f_{√Σ}` centred at the origin.
    pub fn correlated(cov: CMat) -> Result<Self> {
        if !is_hermitian_pd(&cov) {
            return Err(Error::InvalidArgument(
                "covariance must be Hermitian positive definite".into(),
            ));
        }
        let k = cov.nrows();
        Ok(Self {
            cov,
            center: CVec::zeros(k),
        })
    }

    /// Same covariance with a new centre.
    pub fn with_center(mut self, center: CVec) -> Result<Self> {
        if center.len() != self.cov.nrows() {
            return Err(Error::Shape(
                "centre length differs from covariance size".into(),
            ));
        }
        self.center = center;
        Ok(self)
    }

    pub fn cov(&self) -> &CMat {
        &self.cov
    }

    pub fn center(&self) -> &CVec {
        &self.center
    }

    pub fn center_real(&self) -> RVec {
        complex_to_real(&self.center)
    }

    /// Complex dimension.
    pub fn dim(&self) -> usize {
        self.cov.nrows()
    }

    /// Real form of `Σ^{-1/2}`.
    pub fn whitening(&self) -> Result<RMat> {
        Ok(realify(&herm_pow(&self.cov, -0.5)?))
    }

    /// Real form of `Σ^{1/2}`.
    pub fn coloring(&self) -> Result<RMat> {
        Ok(realify(&herm_pow(&self.cov, 0.5)?))
    }
}

/// Banaszczyk's constant `C(c) = c·√(2πe)·e^{−πc²}`.
pub fn banaszczyk_constant(c: f64) -> f64 {
    c * (2.0 * PI * E).sqrt() * (-PI * c * c).exp()
}

/// Smallest `c > 1/√(2π)` with `n·ln C(c) ≤ ln_target`.
fn c_for_log_target(n: usize, ln_target: f64) -> f64 {
    let nf = n as f64;
    let f = |c: f64| nf * banaszczyk_constant(c).ln() - ln_target;
    let mut lo = 1.0 / (2.0 * PI).sqrt();
    let mut hi = 2.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Expected number of lattice points in a ball of squared radius `r2` (volume heuristic).
pub fn expected_points(lat: &Lattice, r2: f64) -> f64 {
    let n = lat.dim_real() as f64;
    let ln_ball = 0.5 * n * PI.ln() + 0.5 * n * r2.max(1e-300).ln() - ln_gamma(0.5 * n + 1.0);
    (ln_ball - lat.volume().ln()).exp()
}

/// A certified theta-type sum.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSum {
    /// `Σ_{0 < ‖λ‖² ≤ radius2} exp(−a‖λ‖²)`.
    pub value: f64,
    /// Rigorous upper bound on the omitted part of the sum.
    pub tail_bound: f64,
    pub radius2: f64,
    pub points: usize,
}

impl ThetaSum {
    /// Certified upper value.
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

/// Banaszczyk tail bound for `Σ_{‖λ‖² > r2} exp(−a‖λ‖²)` given the inner sum `inner`
/// (which excludes the origin); `None` if the radius is too small for the bound to apply.
pub fn theta_tail_bound(n: usize, a: f64, r2: f64, inner: f64) -> Option<f64> {
    let tau = (a / PI).sqrt();
    let c = r2.sqrt() * tau / (n as f64).sqrt();
    if c <= 1.0 / (2.0 * PI).sqrt() {
        return None;
    }
    let cn = banaszczyk_constant(c).powi(n as i32);
    if cn >= 1.0 {
        return None;
    }
    Some(cn * (1.0 + inner) / (1.0 - cn))
}

/// `Σ_{λ∈Λ\{0}} exp(−a‖λ‖²)` with a certified tail `≤ tail_tol`.
pub fn theta_sum(lat: &Lattice, a: f64, tail_tol: f64) -> Result<ThetaSum> {
    if !(a > 0.0) || !(tail_tol > 0.0) {
        return Err(Error::InvalidArgument(
            "theta sum needs a > 0 and tail_tol > 0".into(),
        ));
    }
    let n = lat.dim_real();
    let en = Enumerator::new(lat)?;
    let tau = (a / PI).sqrt();
    let mut inner_guess = 0.0f64;
    for _ in 0..8 {
        let target = (tail_tol / (1.0 + inner_guess)).ln() - std::f64::consts::LN_2;
        let c = c_for_log_target(n, target);
        let r = c * (n as f64).sqrt() / tau;
        let r2 = r * r;
        if expected_points(lat, r2) > MAX_POINTS {
            return Err(Error::TailTolerance(format!(
                "about {:.3e} points needed for tail {tail_tol:e}",
                expected_points(lat, r2)
            )));
        }
        let d = en
            .distances_in_ball(None, r2)
            .map_err(|e| Error::TailTolerance(e.to_string()))?;
        let mut ds: Vec<f64> = d.into_iter().filter(|&x| x > 0.0).collect();
        // Sum smallest terms first for accuracy.
        ds.sort_by(|x, y| y.partial_cmp(x).expect("finite"));
        let value: f64 = ds.iter().map(|&x| (-a * x).exp()).sum();
        let tail = theta_tail_bound(n, a, r2, value).unwrap_or(f64::INFINITY);
        if tail <= tail_tol {
            return Ok(ThetaSum {
                value,
                tail_bound: tail,
                radius2: r2,
                points: ds.len(),
            });
        }
        inner_guess = value.max(2.0 * inner_guess + 1.0);
    }
    Err(Error::TailTolerance("tail bound did not converge".into()))
}

/// The lattice `Σ^{-1/2}Λ` used by the whitened flatness identity.
pub fn whitened_lattice(lat: &Lattice, spec: &GaussianSpec) -> Result<Lattice> {
    if spec.dim() != lat.dim_complex() {
        return Err(Error::Shape(
            "covariance and lattice dimensions differ".into(),
        ));
    }
    lat.transformed(&spec.whitening()?)
}

/// Flatness factor `ε_Λ(√Σ)`, computed on the whitened lattice.
///
/// The dual theta sum is used unless the dual is so dense that enumerating it is infeasible,
/// in which case the equivalent primal Poisson form `V·π^{-k}·Σ_λ e^{−‖λ‖²} − 1` is summed.
pub fn flatness_factor(lat: &Lattice, spec: &GaussianSpec, tail_tol: f64) -> Result<f64> {
    let w = whitened_lattice(lat, spec)?;
    flatness_unit(&w, tail_tol)
}

/// Flatness factor of `Λ` at `σ = 1`.
pub fn flatness_unit(lat: &Lattice, tail_tol: f64) -> Result<f64> {
    let dual = lat.dual()?;
    let n = lat.dim_real();
    let k = lat.dim_complex() as f64;
    // Rough sizes of both enumerations for a 1e-16 tail.
    let c = c_for_log_target(n, (1e-16f64).ln());
    let r2_dual = c * c * n as f64 / PI; // a = π² → τ = √π
    let r2_primal = c * c * n as f64 * PI; // a = 1 → τ = 1/√π
    let dual_pts = expected_points(&dual, r2_dual);
    let primal_pts = expected_points(lat, r2_primal);
    if dual_pts <= 1e6 || dual_pts <= primal_pts {
        // `+ 0.0` turns the empty sum's `−0.0` into `0.0`.
        Ok(theta_sum(&dual, PI * PI, tail_tol)?.value + 0.0)
    } else {
        let scale = lat.volume() * PI.powf(-k);
        let s = theta_sum(lat, 1.0, tail_tol / scale)?;
        Ok(scale * (1.0 + s.value) - 1.0)
    }
}

/// Flatness factor for an isotropic `σ`.
pub fn flatness_factor_sigma(lat: &Lattice, sigma: f64, tail_tol: f64) -> Result<f64> {
    flatness_factor(
        lat,
        &GaussianSpec::isotropic(lat.dim_complex(), sigma)?,
        tail_tol,
    )
}

/// Smoothing parameter `η_ε(Λ)`: the smallest `s` with `Σ_{λ*≠0} exp(−(π/2)s²‖λ*‖²) ≤ ε`.
/// It satisfies `η = √(2π)σ` exactly when `ε_Λ(σ) = ε`.
pub fn smoothing_parameter(lat: &Lattice, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in (0,1), got {eps}"
        )));
    }
    let dual = lat.dual()?;
    let tol = eps * 1e-6;
    let f = |s: f64| -> Result<f64> { Ok(theta_sum(&dual, 0.5 * PI * s * s, tol)?.value) };
    // Bracket.
    let mut lo = 1.0 / crate::lattice::min_distance(&dual, f64::INFINITY)?.lambda1;
    let mut hi = lo;
    while f(hi)? > eps {
        hi *= 2.0;
    }
    while f(lo)? <= eps {
        lo *= 0.5;
    }
    // One enumeration covering the whole bracket, then bisection on the stored norms.
    let a_lo = 0.5 * PI * lo * lo;
    let base = theta_sum(&dual, a_lo, eps * 1e-14)?;
    let en = Enumerator::new(&dual)?;
    let mut norms: Vec<f64> = en
        .distances_in_ball(None, base.radius2)?
        .into_iter()
        .filter(|&x| x > 0.0)
        .collect();
    norms.sort_by(|x, y| y.partial_cmp(x).expect("finite"));
    let g = |s: f64| -> f64 {
        let a = 0.5 * PI * s * s;
        norms.iter().map(|&x| (-a * x).exp()).sum()
    };
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Outcome of a Banaszczyk tail check.
#[derive(Clone, Debug, PartialEq)]
pub struct BanaszczykCheck {
    /// Enumerated `Σ_{λ≠0} e^{−τ²π‖λ‖²}`.
    pub lhs: f64,
    /// Certified upper value of the left-hand side (enumerated part plus tail bound).
    pub lhs_upper: f64,
    /// `C^n/(1−C^n)`.
    pub rhs: f64,
    /// Whether `c > 1/√(2π)` and `τ > √n·c/λ1(Λ)`.
    pub applicable: bool,
    /// `lhs_upper ≤ rhs`.
    pub holds: bool,
}

/// Evaluates both sides of `Σ_{Λ\0} e^{−τ²π‖λ‖²} ≤ C^n/(1−C^n)`.
pub fn banaszczyk_tail(lat: &Lattice, tau: f64, c: f64) -> Result<BanaszczykCheck> {
    let n = lat.dim_real();
    let cn = banaszczyk_constant(c).powi(n as i32);
    let rhs = if cn < 1.0 {
        cn / (1.0 - cn)
    } else {
        f64::INFINITY
    };
    let lambda1 = crate::lattice::min_distance(lat, f64::INFINITY)?.lambda1;
    let applicable = c > 1.0 / (2.0 * PI).sqrt() && tau > (n as f64).sqrt() * c / lambda1;
    let tol = if rhs.is_finite() {
        (rhs * 1e-6).max(1e-300)
    } else {
        1e-6
    };
    let s = theta_sum(lat, PI * tau * tau, tol)?;
    Ok(BanaszczykCheck {
        lhs: s.value,
        lhs_upper: s.upper(),
        rhs,
        applicable,
        holds: s.upper() <= rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatness_of_z2_at_unit_sigma() {
        let z2 = Lattice::integer(1);
        let eps = flatness_factor_sigma(&z2, 1.0, 1e-18).unwrap();
        let pi2 = PI * PI;
        let series = 4.0 * (-pi2).exp()
            + 4.0 * (-2.0 * pi2).exp()
            + 4.0 * (-4.0 * pi2).exp()
            + 8.0 * (-5.0 * pi2).exp();
        assert!((eps - series).abs() < 1e-15, "{eps} vs {series}");
        assert!((eps - 2.07e-4).abs() < 1e-6);
    }

    #[test]
    fn flat_limit_and_monotonicity() {
        let z2 = Lattice::integer(1);
        assert!(flatness_factor_sigma(&z2, 10.0, 1e-300).unwrap() < 1e-40);
        let s1 = GaussianSpec::correlated(scaled_identity(1, 1.2)).unwrap();
        let s2 = GaussianSpec::correlated(scaled_identity(1, 1.0)).unwrap();
        assert!(
            flatness_factor(&z2, &s1, 1e-18).unwrap() <= flatness_factor(&z2, &s2, 1e-18).unwrap()
        );
    }

    #[test]
    fn primal_and_dual_paths_agree() {
        let z2 = Lattice::integer(1);
        let w = z2.scaled(1.0 / 0.7).unwrap(); // σ = 0.7
        let dual_val = theta_sum(&w.dual().unwrap(), PI * PI, 1e-15).unwrap().value;
        let scale = w.volume() / PI;
        let primal = scale * (1.0 + theta_sum(&w, 1.0, 1e-15).unwrap().value) - 1.0;
        assert!((dual_val - primal).abs() < 1e-12);
    }

    #[test]
    fn smoothing_round_trip_and_scaling() {
        let z2 = Lattice::integer(1);
        let eps = flatness_factor_sigma(&z2, 1.0, 1e-18).unwrap();
        let eta = smoothing_parameter(&z2, eps).unwrap();
        assert!((eta - (2.0 * PI).sqrt()).abs() < 1e-8);
        let eta3 = smoothing_parameter(&z2.scaled(3.0).unwrap(), eps).unwrap();
        assert!((eta3 - 3.0 * eta).abs() < 1e-8);
    }

    #[test]
    fn banaszczyk_on_z4() {
        let z4 = Lattice::integer(2);
        let chk = banaszczyk_tail(&z4, 2.1, 1.0).unwrap();
        assert!(chk.applicable && chk.holds);
        assert!((banaszczyk_constant(1.0) - 0.178_592).abs() < 1e-6);
        let far = banaszczyk_tail(&z4, 50.0, 1.0).unwrap();
        assert!(far.lhs < 1e-300 && far.holds);
        let vac =
            banaszczyk_tail(&Lattice::integer(1), 3.0, 1.0 / (2.0 * PI).sqrt() + 1e-3).unwrap();
        assert!(vac.rhs > 1e3 && vac.holds);
    }

    #[test]
    fn smoothing_obeys_lemma_one_on_z4() {
        let z4 = Lattice::integer(2);
        let n: f64 = 4.0;
        let cn = banaszczyk_constant(1.0).powi(4);
        let eps = cn / (1.0 - cn);
        let eta = smoothing_parameter(&z4, eps).unwrap();
        assert!(eta <= (2.0 * n).sqrt() * 1.0 / 1.0);
    }
}
