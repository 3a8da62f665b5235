//! Schnorr–Euchner / Fincke–Pohst enumeration of lattice points inside a ball.
//!
//! All searches run on an LLL-reduced basis and the upper Cholesky factor of its Gram
//! matrix; leaf coordinates are reported in the *original* basis of the lattice.

use super::lll::{lll_reduce, LLL_DELTA};
use super::Lattice;
use crate::error::{Error, Result};
use crate::linalg::{RMat, RVec};

/// Default budget of visited search-tree nodes.
pub const DEFAULT_NODE_LIMIT: u64 = 200_000_000;

/// Reusable enumeration context for one lattice.
#[derive(Clone, Debug)]
pub struct Enumerator {
    basis: RMat,
    reduced_inv: RMat,
    unimodular: Vec<Vec<i64>>,
    /// Upper-triangular Cholesky factor, row-major.
    r: Vec<Vec<f64>>,
    node_limit: u64,
}

impl Enumerator {
    /// Prepares the reduced basis and Cholesky factor of `lat`.
    pub fn new(lat: &Lattice) -> Result<Self> {
        let out = lll_reduce(lat.basis(), LLL_DELTA);
        let gram = out.reduced.transpose() * &out.reduced;
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::InvalidLattice("Gram matrix not positive definite".into()))?;
        let l = chol.l();
        let n = l.nrows();
        let r = (0..n)
            .map(|i| (0..n).map(|j| l[(j, i)]).collect())
            .collect();
        let reduced_inv = out
            .reduced
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidLattice("singular reduced basis".into()))?;
        Ok(Self {
            basis: lat.basis().clone(),
            reduced_inv,
            unimodular: out.unimodular,
            r,
            node_limit: DEFAULT_NODE_LIMIT,
        })
    }

    /// Overrides the node budget.
    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = limit;
        self
    }

    /// Real dimension.
    pub fn dim(&self) -> usize {
        self.r.len()
    }

    /// Converts reduced-basis coordinates to original-basis coordinates.
    fn to_original(&self, z: &[i64]) -> Vec<i64> {
        let n = z.len();
        let mut out = vec![0i64; n];
        for (j, &zj) in z.iter().enumerate() {
            if zj != 0 {
                for i in 0..n {
                    out[i] += self.unimodular[j][i] * zj;
                }
            }
        }
        out
    }

    /// Core depth-first search over reduced coordinates `z` with `‖R(z − u)‖² ≤ r2`.
    ///
    /// `leaf` receives each point (reduced coordinates, squared distance) and returns
    /// the possibly shrunk squared radius for the remaining search.
    fn search<F>(&self, u: &[f64], mut r2: f64, mut leaf: F) -> Result<()>
    where
        F: FnMut(&[i64], f64) -> f64,
    {
        let n = self.dim();
        let r = &self.r;
        let mut z = vec![0i64; n];
        let mut c = vec![0f64; n];
        let mut base = vec![0i64; n];
        let mut step = vec![0i64; n];
        let mut sgn = vec![1i64; n];
        let mut partial = vec![0f64; n + 1];
        let mut nodes: u64 = 0;

        let center = |i: usize, z: &[i64]| -> f64 {
            let mut s = 0.0;
            for j in i + 1..n {
                s += r[i][j] * (z[j] as f64 - u[j]);
            }
            u[i] - s / r[i][i]
        };
        let mut i = n - 1;
        c[i] = center(i, &z);
        base[i] = c[i].round() as i64;
        sgn[i] = if c[i] >= base[i] as f64 { 1 } else { -1 };
        step[i] = 0;
        z[i] = base[i];
        loop {
            nodes += 1;
            if nodes > self.node_limit {
                return Err(Error::EnumerationLimit(format!(
                    "more than {} nodes in dimension {n}",
                    self.node_limit
                )));
            }
            let diff = z[i] as f64 - c[i];
            let d = partial[i + 1] + r[i][i] * r[i][i] * diff * diff;
            if d <= r2 {
                if i == 0 {
                    r2 = leaf(&z, d);
                } else {
                    partial[i] = d;
                    i -= 1;
                    c[i] = center(i, &z);
                    base[i] = c[i].round() as i64;
                    sgn[i] = if c[i] >= base[i] as f64 { 1 } else { -1 };
                    step[i] = 0;
                    z[i] = base[i];
                    continue;
                }
            } else {
                i += 1;
                if i == n {
                    return Ok(());
                }
            }
            // Zig-zag to the next sibling at level i: base, base+s, base−s, base+2s, ...
            step[i] = if step[i] > 0 { -step[i] } else { -step[i] + 1 };
            z[i] = base[i] + sgn[i] * step[i];
        }
    }

    fn target_coords(&self, center: Option<&RVec>) -> Vec<f64> {
        match center {
            Some(y) => (&self.reduced_inv * y).iter().copied().collect(),
            None => vec![0.0; self.dim()],
        }
    }

    /// All lattice points `v` with `‖v − center‖² ≤ r2`, as (original coordinates, squared distance).
    pub fn points_in_ball(&self, center: Option<&RVec>, r2: f64) -> Result<Vec<(Vec<i64>, f64)>> {
        let u = self.target_coords(center);
        let mut out = Vec::new();
        self.search(&u, r2, |z, d| {
            out.push((self.to_original(z), d));
            r2
        })?;
        Ok(out)
    }

    /// Squared distances of all lattice points within `r2` of `center` (coordinates discarded).
    pub fn distances_in_ball(&self, center: Option<&RVec>, r2: f64) -> Result<Vec<f64>> {
        let u = self.target_coords(center);
        let mut out = Vec::new();
        self.search(&u, r2, |_, d| {
            out.push(d);
            r2
        })?;
        Ok(out)
    }

    /// Visits nonzero lattice vectors within `r2` of the origin; `visit` returns the new radius.
    pub fn shrinking_search<F>(&self, r2: f64, mut visit: F) -> Result<()>
    where
        F: FnMut(&[i64], &RVec, f64) -> f64,
    {
        let u = vec![0.0; self.dim()];
        self.search(&u, r2, |z, d| {
            if z.iter().all(|&x| x == 0) {
                return r2;
            }
            let orig = self.to_original(z);
            let p = self.point(&orig);
            visit(&orig, &p, d)
        })
    }

    /// Closest lattice point to `y`: original coordinates and squared distance.
    pub fn closest(&self, y: &RVec) -> Result<(Vec<i64>, f64)> {
        let u = self.target_coords(Some(y));
        // Babai rounding gives a finite initial radius.
        let zr: Vec<i64> = u.iter().map(|x| x.round() as i64).collect();
        let n = self.dim();
        let mut init = 0.0;
        for i in 0..n {
            let mut s = 0.0;
            for j in i..n {
                s += self.r[i][j] * (zr[j] as f64 - u[j]);
            }
            init += s * s;
        }
        let mut best: Option<(Vec<i64>, f64)> = None;
        self.search(&u, init * (1.0 + 1e-12) + 1e-300, |z, d| {
            if best.as_ref().is_none_or(|b| d < b.1) {
                best = Some((z.to_vec(), d));
            }
            d
        })?;
        let (z, d) =
            best.ok_or_else(|| Error::EnumerationLimit("closest point search empty".into()))?;
        Ok((self.to_original(&z), d))
    }

    /// Lattice point with the given original coordinates.
    pub fn point(&self, coords: &[i64]) -> RVec {
        let z = RVec::from_iterator(coords.len(), coords.iter().map(|&c| c as f64));
        &self.basis * z
    }
}
