//! Achievable-rate formulas and uncertainty-set membership.
//!
//! With geometric constants `g_b, g_e` (`t` for fading codes from number fields, `h` for
//! Gaussian codes, `d` for division-algebra codes) and `n` antennas:
//!
//! * `R' > C_e + n·ln(ne/π) − ln g_e`;
//! * `R + R' < C_b − n·ln(4n/(πe)) + ln g_b`;
//! * hence `R < C_b − C_e − κ`, `κ = 2n·ln(2n/π) − ln(g_b g_e)`.
//!
//! The single-antenna fading and Gaussian cases are `n = 1`; the compound and arbitrarily
//! varying models use the multi-antenna formulas with capacities replaced by the set bounds.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Channel model selecting the rate formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateMode {
    SisoFading,
    Gaussian,
    Mimo,
    Compound,
}

/// Capacities and geometric constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateBudget {
    /// Bob's capacity (or its lower bound `C̄_b`), nats.
    pub c_b: f64,
    /// Eve's capacity (or its upper bound `C̄_e`), nats.
    pub c_e: f64,
    /// Bob-side constant `t_b`, `h_b` or `d_b`.
    pub g_b: f64,
    /// Eve-side constant `t_e`, `h_e` or `d_e`.
    pub g_e: f64,
    /// Transmit antennas.
    pub n: usize,
}

/// The three rate thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AchievableRates {
    /// Supremum of achievable confidential rates `R`.
    pub r_max: f64,
    /// Infimum of admissible auxiliary rates `R'`.
    pub r_prime_min: f64,
    /// Supremum of admissible sum rates `R + R'`.
    pub r_sum_max: f64,
}

impl AchievableRates {
    /// Gap `κ` between `C_b − C_e` and `R_max`.
    pub fn kappa(&self, budget: &RateBudget) -> f64 {
        budget.c_b - budget.c_e - self.r_max
    }
}

/// Rate thresholds for the selected model. A negative `r_max` means no positive rate.
pub fn achievable_rates(budget: &RateBudget, mode: RateMode) -> Result<AchievableRates> {
    let RateBudget {
        c_b,
        c_e,
        g_b,
        g_e,
        n,
    } = *budget;
    if !(g_b > 0.0 && g_e > 0.0) || n == 0 {
        return Err(Error::InvalidArgument(
            "geometric constants must be positive and n ≥ 1".into(),
        ));
    }
    if matches!(mode, RateMode::SisoFading | RateMode::Gaussian) && n != 1 {
        return Err(Error::InvalidArgument(format!(
            "{mode:?} requires n = 1, got {n}"
        )));
    }
    let nf = n as f64;
    let (e, pi) = (std::f64::consts::E, std::f64::consts::PI);
    let r_prime_min = c_e + nf * (nf * e / pi).ln() - g_e.ln();
    let r_sum_max = c_b - nf * (4.0 * nf / (pi * e)).ln() + g_b.ln();
    Ok(AchievableRates {
        r_max: r_sum_max - r_prime_min,
        r_prime_min,
        r_sum_max,
    })
}

/// `ln det(I + ρ H†H)` of one block.
pub fn log_det_gain(h: &CMat, rho: f64) -> f64 {
    let g = CMat::identity(h.ncols(), h.ncols()) + h.adjoint() * h * Complex::new(rho, 0.0);
    g.determinant().re.ln()
}

/// Membership of a channel pair in the compound and arbitrarily varying uncertainty sets.
#[derive(Clone, Debug, PartialEq)]
pub struct CompoundMembership {
    /// `(1/k)Σ ln det(I + ρ_b H_{b,i}†H_{b,i})`.
    pub stat_b: f64,
    /// `(1/k)Σ ln det(I + ρ_e H_{e,i}†H_{e,i})`.
    pub stat_e: f64,
    /// Static Bob channel with `ln det ≥ C_b`; `None` if the blocks are not all equal.
    pub compound_b: Option<bool>,
    /// Static Eve channel with `ln det ≤ C_e`; `None` if the blocks are not all equal.
    pub compound_e: Option<bool>,
    /// `stat_b ≥ C_b`.
    pub varying_b: bool,
    /// `stat_e ≤ C_e`.
    pub varying_e: bool,
}

fn is_static(blocks: &[CMat]) -> bool {
    blocks
        .windows(2)
        .all(|w| (&w[0] - &w[1]).camax() <= 1e-12 * w[0].camax().max(1.0))
}

/// Relative tolerance for the boundary comparisons `≥ C_b`, `≤ C_e`.
const BOUNDARY_TOL: f64 = 1e-12;

/// Evaluates the uncertainty-set inequalities for block lists `H_b`, `H_e`.
pub fn compound_sets_check(
    h_b: &[CMat],
    h_e: &[CMat],
    c_b: f64,
    c_e: f64,
    rho_b: f64,
    rho_e: f64,
) -> Result<CompoundMembership> {
    if h_b.is_empty() || h_b.len() != h_e.len() {
        return Err(Error::Shape(
            "Bob and Eve need the same positive number of blocks".into(),
        ));
    }
    let n = h_b[0].ncols();
    if h_b.iter().chain(h_e).any(|h| h.ncols() != n) {
        return Err(Error::Shape(
            "all blocks must have the same number of transmit antennas".into(),
        ));
    }
    let k = h_b.len() as f64;
    let stat = |hs: &[CMat], rho: f64| hs.iter().map(|h| log_det_gain(h, rho)).sum::<f64>() / k;
    let stat_b = stat(h_b, rho_b);
    let stat_e = stat(h_e, rho_e);
    let ge = |x: f64, c: f64| x >= c - BOUNDARY_TOL * c.abs().max(1.0);
    let le = |x: f64, c: f64| x <= c + BOUNDARY_TOL * c.abs().max(1.0);
    Ok(CompoundMembership {
        stat_b,
        stat_e,
        compound_b: is_static(h_b).then(|| ge(log_det_gain(&h_b[0], rho_b), c_b)),
        compound_e: is_static(h_e).then(|| le(log_det_gain(&h_e[0], rho_e), c_e)),
        varying_b: ge(stat_b, c_b),
        varying_e: le(stat_e, c_e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::constants::{conway_thompson_h, rate_constants, t_from_rd, MARTINET_RD};

    #[test]
    fn fading_gap_matches_closed_form() {
        let t = t_from_rd(MARTINET_RD);
        let b = RateBudget {
            c_b: 10.0,
            c_e: 1.0,
            g_b: t,
            g_e: t,
            n: 1,
        };
        let r = achievable_rates(&b, RateMode::SisoFading).unwrap();
        assert!((r.kappa(&b) - rate_constants(MARTINET_RD, 1).kappa_siso).abs() < 1e-12);
    }

    #[test]
    fn conway_thompson_gap() {
        let h = conway_thompson_h();
        let b = RateBudget {
            c_b: 5.0,
            c_e: 1.0,
            g_b: h,
            g_e: h,
            n: 1,
        };
        let k = achievable_rates(&b, RateMode::Gaussian).unwrap().kappa(&b);
        assert!((k - (4.0 * std::f64::consts::E / std::f64::consts::PI).ln()).abs() < 1e-12);
    }

    #[test]
    fn single_antenna_modes_reject_n() {
        let b = RateBudget {
            c_b: 1.0,
            c_e: 0.0,
            g_b: 1.0,
            g_e: 1.0,
            n: 2,
        };
        assert!(achievable_rates(&b, RateMode::Gaussian).is_err());
        assert!(achievable_rates(&b, RateMode::Mimo).is_ok());
    }

    #[test]
    fn identity_channel_at_e_minus_one() {
        let h = vec![CMat::identity(1, 1)];
        let rho = std::f64::consts::E - 1.0;
        let m = compound_sets_check(&h, &h, 1.0, 1.0, rho, rho).unwrap();
        assert!((m.stat_b - 1.0).abs() < 1e-12);
        assert_eq!(m.compound_b, Some(true));
        let m = compound_sets_check(&h, &h, 1.01, 1.0, rho, rho).unwrap();
        assert_eq!(m.compound_b, Some(false));
    }
}
