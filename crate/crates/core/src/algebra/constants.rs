//! Gap-to-capacity constants of the number-field, division-algebra and Conway–Thompson
//! lattice families.

use std::f64::consts::{E, LN_2, PI};

/// Root discriminant of the Martinet tower of totally complex fields.
pub const MARTINET_RD: f64 = 92.368;

/// `β = 23^{1/10}`, the discriminant growth factor of the division-algebra tower.
pub fn beta() -> f64 {
    23f64.powf(0.1)
}

/// Nats → bits.
pub fn to_bits(nats: f64) -> f64 {
    nats / LN_2
}

/// Constant gaps (nats per complex channel use).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateConstants {
    /// `2 ln(rd/π)` for single-antenna codes from fields of root discriminant `rd`.
    pub kappa_siso: f64,
    /// `2n ln(n·rd·β^{(n−1)/n}/π)` for `n`-antenna division-algebra codes.
    pub kappa_mimo: f64,
    pub n: usize,
}

/// Gap constants for root discriminant `rd` and `n` antennas.
pub fn rate_constants(rd: f64, n: usize) -> RateConstants {
    let nf = n as f64;
    RateConstants {
        kappa_siso: 2.0 * (rd / PI).ln(),
        kappa_mimo: 2.0 * nf * (nf * rd * beta().powf((nf - 1.0) / nf) / PI).ln(),
        n,
    }
}

/// Gap `ln(4e/π)` of the Conway–Thompson self-dual lattices on the Gaussian channel.
pub fn conway_thompson_gap() -> f64 {
    (4.0 * E / PI).ln()
}

/// Product-distance constant `t = 2/rd` of a field family with root discriminant `rd`.
pub fn t_from_rd(rd: f64) -> f64 {
    2.0 / rd
}

/// Hermite constant `h_b = h_e = 2/rd` of a field family (Gaussian channel).
pub fn h_from_rd(rd: f64) -> f64 {
    2.0 / rd
}

/// Hermite constants with `h_b·h_e = 1/(πe)` (the Conway–Thompson limit), split evenly.
pub fn conway_thompson_h() -> f64 {
    (1.0 / (PI * E)).sqrt()
}

/// Minimum-determinant constant `d = 2^n/(β^{n−1}·rd^n)` of the division-algebra family.
pub fn d_from_rd(rd: f64, n: usize) -> f64 {
    let nf = n as f64;
    2f64.powf(nf) / (beta().powf(nf - 1.0) * rd.powf(nf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_is_zero_at_pi() {
        let c = rate_constants(PI, 1);
        assert!(c.kappa_siso.abs() < 1e-15);
        assert!((c.kappa_mimo - c.kappa_siso).abs() < 1e-15);
    }

    #[test]
    fn mimo_constant_matches_substitution() {
        // κ = 2n ln(2n/π) − ln(d_b d_e) with d_b = d_e = d_from_rd(G, n).
        for n in 1..=4 {
            let d = d_from_rd(MARTINET_RD, n);
            let nf = n as f64;
            let kappa = 2.0 * nf * (2.0 * nf / PI).ln() - (d * d).ln();
            assert!((kappa - rate_constants(MARTINET_RD, n).kappa_mimo).abs() < 1e-12);
        }
    }
}
