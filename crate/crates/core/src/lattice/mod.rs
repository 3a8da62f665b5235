//! Lattices in `C^k ≅ R^{2k}` given by real generator matrices, and their geometric invariants.
//!
//! Basis vectors are the *columns* of the generator matrix. Duality is taken with respect to
//! the real pairing `Re(x†y)`, i.e. the Euclidean inner product on real coordinates.

pub mod enumerate;
pub mod lll;
pub mod matrix;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{realify, CMat, RMat, RVec};
pub use enumerate::Enumerator;
pub use matrix::{
    block_hermitian, devectorize, pdet, vectorize, MatrixLattice, PdetMin, Provenance,
};

/// Largest real dimension handled by the exact enumeration routines.
pub const MAX_ENUM_DIM: usize = 24;

/// Full-rank lattice in `R^{2k}` (identified with `C^k`).
#[derive(Clone, Debug)]
pub struct Lattice {
    basis: RMat,
    dim_complex: usize,
    gram: RMat,
    volume: f64,
}

impl Lattice {
    /// Builds a lattice from a square real generator matrix of even dimension.
    pub fn new(basis: RMat) -> Result<Self> {
        let (r, c) = basis.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::InvalidLattice(format!(
                "generator matrix must be square of even size, got {r}×{c}"
            )));
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidLattice("non-finite generator entry".into()));
        }
        let gram = basis.transpose() * &basis;
        let det = gram.determinant();
        let scale: f64 = (0..c).map(|j| gram[(j, j)]).product();
        if !(det > 1e-13 * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::InvalidLattice(
                "basis vectors are linearly dependent".into(),
            ));
        }
        let volume = basis.determinant().abs();
        Ok(Self {
            basis,
            dim_complex: r / 2,
            gram,
            volume,
        })
    }

    /// The integer lattice `Z^{2k}` (equivalently `Z[i]^k`).
    pub fn integer(k: usize) -> Self {
        Self::new(RMat::identity(2 * k, 2 * k)).expect("identity is a valid basis")
    }

    /// Lattice generated by `2k` complex vectors (columns of a `k × 2k` complex matrix).
    pub fn from_complex_generators(gens: &CMat) -> Result<Self> {
        let k = gens.nrows();
        if gens.ncols() != 2 * k {
            return Err(Error::Shape(format!(
                "need {} complex generators, got {}",
                2 * k,
                gens.ncols()
            )));
        }
        let basis = RMat::from_fn(2 * k, 2 * k, |i, j| {
            if i < k {
                gens[(i, j)].re
            } else {
                gens[(i - k, j)].im
            }
        });
        Self::new(basis)
    }

    /// Generator matrix (columns are basis vectors).
    pub fn basis(&self) -> &RMat {
        &self.basis
    }

    /// Gram matrix `BᵀB`.
    pub fn gram(&self) -> &RMat {
        &self.gram
    }

    /// Fundamental volume `|det B| = sqrt(det Gram)`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Complex dimension `k`.
    pub fn dim_complex(&self) -> usize {
        self.dim_complex
    }

    /// Real dimension `2k`.
    pub fn dim_real(&self) -> usize {
        2 * self.dim_complex
    }

    /// The lattice `αΛ`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(&self.basis * alpha)
    }

    /// The lattice `AΛ` for a real `2k × 2k` matrix `A`.
    pub fn transformed(&self, a: &RMat) -> Result<Self> {
        if a.shape() != self.basis.shape() {
            return Err(Error::Shape("transform has the wrong size".into()));
        }
        Self::new(a * &self.basis)
    }

    /// The lattice `AΛ` for a complex `k × k` matrix `A`.
    pub fn transformed_complex(&self, a: &CMat) -> Result<Self> {
        self.transformed(&realify(a))
    }

    /// Dual lattice with respect to `Re(x†y)`; its basis `B*` satisfies `B*ᵀB = I`.
    pub fn dual(&self) -> Result<Self> {
        let inv = self
            .basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidLattice("singular basis".into()))?;
        Self::new(inv.transpose())
    }

    /// Lattice point `B z`.
    pub fn point(&self, z: &[i64]) -> RVec {
        let zf = RVec::from_iterator(z.len(), z.iter().map(|&c| c as f64));
        &self.basis * zf
    }

    /// Real (not necessarily integral) coordinates of `x` in this basis.
    pub fn coordinates(&self, x: &RVec) -> Result<RVec> {
        self.basis
            .clone()
            .lu()
            .solve(x)
            .ok_or_else(|| Error::InvalidLattice("singular basis".into()))
    }

    /// Whether every column of `other`'s basis has integral coordinates here (to `tol`).
    pub fn contains_lattice(&self, other: &Lattice, tol: f64) -> Result<bool> {
        let inv = self
            .basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidLattice("singular basis".into()))?;
        let coords = inv * other.basis();
        Ok(coords.iter().all(|c| (c - c.round()).abs() <= tol))
    }

    /// Serialisable exchange representation.
    pub fn to_file(&self, provenance: &str) -> LatticeFile {
        let n = self.dim_real();
        LatticeFile {
            dim_complex: self.dim_complex,
            basis: (0..n * n).map(|t| self.basis[(t / n, t % n)]).collect(),
            provenance: provenance.to_string(),
        }
    }

    /// Rebuilds a lattice from its exchange representation.
    pub fn from_file(file: &LatticeFile) -> Result<Self> {
        let n = 2 * file.dim_complex;
        if file.basis.len() != n * n {
            return Err(Error::Shape(format!(
                "basis has {} entries, expected {}",
                file.basis.len(),
                n * n
            )));
        }
        Self::new(RMat::from_row_slice(n, n, &file.basis))
    }
}

/// On-disk lattice exchange format (row-major real generator matrix, columns = basis vectors).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub dim_complex: usize,
    pub basis: Vec<f64>,
    pub provenance: String,
}

/// Minimum distance and a witness achieving it.
#[derive(Clone, Debug)]
pub struct MinDistance {
    pub lambda1: f64,
    /// Witness vector in real coordinates.
    pub witness: RVec,
    /// Witness coordinates in the lattice's own basis.
    pub coords: Vec<i64>,
}

fn check_enum_dim(lat: &Lattice, limit: usize) -> Result<()> {
    if lat.dim_real() > limit {
        return Err(Error::EnumerationLimit(format!(
            "real dimension {} exceeds the enumeration limit {limit}",
            lat.dim_real()
        )));
    }
    Ok(())
}

/// Exact minimum distance by enumeration.
///
/// `radius_hint` seeds the search radius; it is capped by the shortest reduced basis vector,
/// so any positive value is safe. Among all shortest vectors the witness with the
/// lexicographically smallest coordinate vector (in the lattice's basis) is returned.
pub fn min_distance(lat: &Lattice, radius_hint: f64) -> Result<MinDistance> {
    check_enum_dim(lat, MAX_ENUM_DIM)?;
    let en = Enumerator::new(lat)?;
    let shortest_basis = (0..lat.dim_real())
        .map(|j| lat.basis().column(j).norm_squared())
        .fold(f64::INFINITY, f64::min);
    let mut r2 = if radius_hint > 0.0 {
        (radius_hint * radius_hint).min(shortest_basis)
    } else {
        shortest_basis
    };
    let mut best = f64::INFINITY;
    // Expand the radius until some nonzero vector is found (only relevant for tiny hints).
    loop {
        en.shrinking_search(r2 * (1.0 + 1e-12), |_, _, d| {
            if d < best {
                best = d;
            }
            d * (1.0 + 1e-12)
        })?;
        if best.is_finite() {
            break;
        }
        r2 *= 4.0;
    }
    let tie = best * (1.0 + 1e-9);
    let mut cands: Vec<(Vec<i64>, f64)> = en
        .points_in_ball(None, tie)?
        .into_iter()
        .filter(|(z, _)| z.iter().any(|&x| x != 0))
        .collect();
    cands.sort_by(|a, b| a.0.cmp(&b.0));
    let (coords, _) = cands.into_iter().next().expect("shortest vector exists");
    let witness = lat.point(&coords);
    Ok(MinDistance {
        lambda1: witness.norm(),
        witness,
        coords,
    })
}

/// Pairing matrix `P_{ij} = Re(a_i† b_j)` between the bases of two lattices of equal dimension.
///
/// `a` is the dual of `b` exactly when `P` is integral and unimodular.
pub fn pairing_matrix(a: &Lattice, b: &Lattice) -> RMat {
    a.basis().transpose() * b.basis()
}

/// Hermite invariant `h(Λ) = λ1² / V^{1/k}`.
pub fn hermite_invariant(lat: &Lattice) -> Result<f64> {
    let md = min_distance(lat, f64::INFINITY)?;
    Ok(md.lambda1 * md.lambda1 / lat.volume().powf(1.0 / lat.dim_complex() as f64))
}

/// Enumerated product distance.
#[derive(Clone, Debug)]
pub struct ProductDistance {
    /// Minimum of `Π |x_i|` over enumerated nonzero vectors.
    pub p: f64,
    /// `p / V^{1/2}`.
    pub np: f64,
    /// Squared radius of the final search ball.
    pub radius2: f64,
    /// Witness coordinates in the lattice's basis.
    pub coords: Vec<i64>,
}

/// Product of complex coordinate moduli of a real-coordinate vector.
pub fn coordinate_product(x: &RVec) -> f64 {
    let k = x.len() / 2;
    (0..k).map(|i| x[i].hypot(x[i + k])).product()
}

/// Squared-radius multiplier of the product-distance search (see [`product_distance`]).
pub const PRODUCT_RADIUS_MULT: f64 = 4.0;

/// Product distance `p(Λ)` and its normalisation `Np = p/√V`, searched over nonzero vectors
/// with `‖x‖² ≤ PRODUCT_RADIUS_MULT·k·p^{2/k}` (the ball shrinks as smaller products are found).
///
/// AM–GM gives `‖x‖² ≥ k·Π|x_i|^{2/k}`, so the ball contains every vector whose product is
/// at most `p` *and* whose coordinate moduli are balanced within the multiplier. For ideal
/// lattices the product is invariant under units, which balance any vector up to a bounded
/// factor, and the minimum is attained at such balanced vectors (for example `ψ(1)` in a ring
/// of integers). For generic lattices the value is the minimum within the searched ball only;
/// use [`product_distance_in_ball`] for an explicit radius.
pub fn product_distance(lat: &Lattice) -> Result<ProductDistance> {
    product_distance_with(lat, PRODUCT_RADIUS_MULT)
}

/// [`product_distance`] with an explicit squared-radius multiplier `mult ≥ 1`.
pub fn product_distance_with(lat: &Lattice, mult: f64) -> Result<ProductDistance> {
    let k = lat.dim_complex();
    if k > 8 {
        return Err(Error::EnumerationLimit(format!(
            "complex dimension {k} exceeds 8"
        )));
    }
    if !(mult >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "radius multiplier must be ≥ 1, got {mult}"
        )));
    }
    let en = Enumerator::new(lat)?;
    let kf = k as f64;
    let radius_for = |t: f64| mult * kf * t.powf(2.0 / kf) * (1.0 + 1e-9) + 1e-300;
    // Initial bound from the basis vectors.
    let mut best = f64::INFINITY;
    let mut coords: Vec<i64> = Vec::new();
    for j in 0..lat.dim_real() {
        let mut z = vec![0i64; lat.dim_real()];
        z[j] = 1;
        let p = coordinate_product(&lat.point(&z));
        if p < best || coords.is_empty() {
            best = p;
            coords = z;
        }
    }
    if best > 0.0 {
        let r2 = radius_for(best);
        en.shrinking_search(r2, |z, x, _| {
            let p = coordinate_product(x);
            if p < 1e-12 * x.norm().max(1.0) {
                best = 0.0;
                coords = z.to_vec();
                return 0.0;
            }
            tie_better(z, p, &mut best, &mut coords);
            radius_for(best)
        })?;
    }
    let radius2 = if best > 0.0 { radius_for(best) } else { 0.0 };
    Ok(ProductDistance {
        p: best,
        np: best / lat.volume().sqrt(),
        radius2,
        coords,
    })
}

/// Minimum product over the nonzero vectors with `‖x‖² ≤ r2`; `None` if the ball holds none.
pub fn product_distance_in_ball(lat: &Lattice, r2: f64) -> Result<Option<ProductDistance>> {
    let en = Enumerator::new(lat)?;
    let mut best = f64::INFINITY;
    let mut coords: Vec<i64> = Vec::new();
    for (z, _) in en.points_in_ball(None, r2)? {
        if z.iter().all(|&c| c == 0) {
            continue;
        }
        let p = coordinate_product(&lat.point(&z));
        if coords.is_empty() {
            best = p;
            coords = z;
        } else {
            tie_better(&z, p, &mut best, &mut coords);
        }
    }
    Ok((!coords.is_empty()).then(|| ProductDistance {
        p: best,
        np: best / lat.volume().sqrt(),
        radius2: r2,
        coords,
    }))
}

/// Replaces the incumbent on a strictly smaller product, or on a tie with a
/// lexicographically smaller coordinate vector.
fn tie_better(z: &[i64], p: f64, best: &mut f64, coords: &mut Vec<i64>) {
    let tol = 1e-12 * best.max(1e-300);
    if p < *best - tol || ((p - *best).abs() <= tol && z < coords.as_slice()) {
        *best = p.min(*best);
        *coords = z.to_vec();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_lattice_is_self_dual() {
        let z2 = Lattice::integer(1);
        let d = z2.dual().unwrap();
        assert!((d.basis() - z2.basis()).norm() < 1e-15);
        assert!((z2.volume() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dual_of_scaled_lattice() {
        let l = Lattice::integer(1).scaled(2.0).unwrap();
        let d = l.dual().unwrap();
        assert!((d.volume() - 0.25).abs() < 1e-15);
        assert!((d.basis() - RMat::identity(2, 2) * 0.5).norm() < 1e-15);
    }

    #[test]
    fn min_distance_of_integer_lattices() {
        for k in 1..=4 {
            let md = min_distance(&Lattice::integer(k), 10.0).unwrap();
            assert!((md.lambda1 - 1.0).abs() < 1e-12);
        }
        let md = min_distance(&Lattice::integer(1).scaled(3.0).unwrap(), 1.0).unwrap();
        assert!((md.lambda1 - 3.0).abs() < 1e-12);
        // Lexicographic tie-break among the four unit vectors of Z².
        assert_eq!(md.coords, vec![-1, 0]);
    }

    #[test]
    fn product_distance_of_gaussian_integers() {
        let pd = product_distance(&Lattice::integer(1)).unwrap();
        assert!((pd.p - 1.0).abs() < 1e-12 && (pd.np - 1.0).abs() < 1e-12);
        let pd2 = product_distance(&Lattice::integer(1).scaled(2.0).unwrap()).unwrap();
        assert!((pd2.np - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exchange_roundtrip() {
        let l = Lattice::new(RMat::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 2.0])).unwrap();
        let f = l.to_file("explicit");
        let back = Lattice::from_file(&f).unwrap();
        assert_eq!(back.basis(), l.basis());
    }
}
