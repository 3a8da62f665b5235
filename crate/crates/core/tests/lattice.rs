//! Lattice reduction, enumeration and invariants against brute-force oracles.

use lattice_wiretap::lattice::lll::{lll_reduce, LLL_DELTA};
use lattice_wiretap::lattice::{
    coordinate_product, hermite_invariant, min_distance, pairing_matrix, product_distance,
    product_distance_in_ball, Enumerator, Lattice, LatticeFile,
};
use lattice_wiretap::linalg::{RMat, RVec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_basis(rng: &mut ChaCha8Rng, n: usize) -> RMat {
    loop {
        let m = RMat::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
        if m.determinant().abs() > 0.5 {
            return m;
        }
    }
}

/// All coefficient vectors in `[-r, r]^n`.
fn box_points(n: usize, r: i64) -> Vec<Vec<i64>> {
    let side = (2 * r + 1) as usize;
    (0..side.pow(n as u32))
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let d = (idx % side) as i64 - r;
                    idx /= side;
                    d
                })
                .collect()
        })
        .collect()
}

#[test]
fn minimum_distance_and_product_distance_by_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..6 {
        // Start from an LLL-reduced basis so a small coefficient box certainly contains the minima.
        let b = lll_reduce(&random_basis(&mut rng, 4), LLL_DELTA).reduced;
        let lat = Lattice::new(b).unwrap();
        let en = Enumerator::new(&lat).unwrap();
        let r2 = 2.5 * min_distance(&lat, 0.0).unwrap().lambda1.powi(2);
        let box_pts: Vec<Vec<i64>> = box_points(4, 6)
            .into_iter()
            .filter(|z| z.iter().any(|&x| x != 0))
            .collect();
        // The box must contain the whole ball for the brute force to be exhaustive.
        let in_ball: Vec<&Vec<i64>> = box_pts
            .iter()
            .filter(|z| lat.point(z).norm_squared() <= r2)
            .collect();
        assert_eq!(
            in_ball.len() + 1,
            en.points_in_ball(None, r2).unwrap().len()
        );
        let l1 = box_pts
            .iter()
            .map(|z| lat.point(z).norm())
            .fold(f64::INFINITY, f64::min);
        assert!((min_distance(&lat, 0.0).unwrap().lambda1 - l1).abs() < 1e-12);
        let p = in_ball
            .iter()
            .map(|z| coordinate_product(&lat.point(z)))
            .fold(f64::INFINITY, f64::min);
        let pd = product_distance_in_ball(&lat, r2)
            .unwrap()
            .expect("ball holds a nonzero vector");
        assert!((pd.p - p).abs() < 1e-12, "{} vs {p}", pd.p);
        assert!((pd.np - pd.p / lat.volume().sqrt()).abs() < 1e-12);
        // The shrinking search never reports more than the best vector it has seen.
        assert!(
            product_distance(&lat).unwrap().p
                <= coordinate_product(&lat.point(&[1, 0, 0, 0])) + 1e-12
        );
    }
}

#[test]
fn closest_point_by_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let lat = Lattice::new(lll_reduce(&random_basis(&mut rng, 4), LLL_DELTA).reduced).unwrap();
    let en = Enumerator::new(&lat).unwrap();
    let pts = box_points(4, 5);
    for _ in 0..100 {
        let y = RVec::from_fn(4, |_, _| rng.random_range(-2.0..2.0));
        let best = pts
            .iter()
            .map(|z| (lat.point(z) - &y).norm_squared())
            .fold(f64::INFINITY, f64::min);
        let (_, d) = en.closest(&y).unwrap();
        assert!((d - best).abs() < 1e-10);
    }
}

#[test]
fn ball_counts_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let lat = Lattice::new(lll_reduce(&random_basis(&mut rng, 4), LLL_DELTA).reduced).unwrap();
    let en = Enumerator::new(&lat).unwrap();
    let r2 = 2.5;
    let brute = box_points(4, 6)
        .iter()
        .filter(|z| lat.point(z).norm_squared() <= r2)
        .count();
    assert_eq!(en.points_in_ball(None, r2).unwrap().len(), brute);
}

#[test]
fn hermite_invariant_of_integer_lattices() {
    for k in 1..=3 {
        // λ1 = 1 and V = 1 in every dimension.
        assert!((hermite_invariant(&Lattice::integer(k)).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn exchange_file_round_trip_through_json() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let lat = Lattice::new(random_basis(&mut rng, 4)).unwrap();
    let text = serde_json::to_string(&lat.to_file("random")).unwrap();
    let back = Lattice::from_file(&serde_json::from_str::<LatticeFile>(&text).unwrap()).unwrap();
    assert_eq!(back.basis(), lat.basis());
    assert!(serde_json::from_str::<LatticeFile>(
        r#"{"dim_complex":1,"basis":[1,0,0,1],"provenance":"x","extra":1}"#
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lll_preserves_the_lattice(entries in prop::collection::vec(-3i32..=3, 16)) {
        let m = RMat::from_iterator(4, 4, entries.iter().map(|&x| x as f64));
        prop_assume!(m.determinant().abs() > 0.5);
        let out = lll_reduce(&m, LLL_DELTA);
        let u = RMat::from_fn(4, 4, |i, j| out.unimodular[j][i] as f64);
        prop_assert!((u.determinant().abs() - 1.0).abs() < 1e-9);
        prop_assert!((&m * &u - &out.reduced).amax() < 1e-9);
    }

    #[test]
    fn dual_pairing_is_the_identity(entries in prop::collection::vec(-2.0f64..2.0, 4)) {
        let m = RMat::from_row_slice(2, 2, &entries);
        prop_assume!(m.determinant().abs() > 0.2);
        let lat = Lattice::new(m).unwrap();
        let p = pairing_matrix(&lat.dual().unwrap(), &lat);
        prop_assert!((p - RMat::identity(2, 2)).amax() < 1e-9);
    }

    #[test]
    fn scaling_scales_the_minimum(alpha in 0.2f64..5.0) {
        let lat = Lattice::integer(1).scaled(alpha).unwrap();
        prop_assert!((min_distance(&lat, 0.0).unwrap().lambda1 - alpha).abs() < 1e-12 * alpha);
        prop_assert!((lat.volume() - alpha * alpha).abs() < 1e-12 * alpha * alpha);
    }
}
