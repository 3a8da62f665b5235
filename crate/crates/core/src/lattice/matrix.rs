//! Multi-block matrix lattices in `M_{nk×n}(C)` and the product determinant.
//!
//! A matrix `X` made of `k` stacked `n × n` blocks is vectorised by the row-major map
//! `ξ(X)_{r·n+c} = X_{r,c}`, so that `ξ(HX) = (H ⊗ I_n) ξ(X)` for any `nk × nk` matrix `H`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Enumerator, Lattice};
use crate::error::{Error, Result};
use crate::linalg::{complex_to_real, real_to_complex, CMat, CVec, RMat, RVec};

/// Where a lattice came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    NumberField,
    DivisionAlgebra,
    Explicit,
}

/// Row-major vectorisation `ξ` of an `nk × n` complex matrix.
pub fn vectorize(x: &CMat) -> CVec {
    let (r, c) = x.shape();
    CVec::from_fn(r * c, |t, _| x[(t / c, t % c)])
}

/// Inverse of [`vectorize`] for block size `n`.
pub fn devectorize(v: &CVec, n: usize) -> Result<CMat> {
    if n == 0 || v.len() % n != 0 || (v.len() / n) % n != 0 {
        return Err(Error::Shape(format!(
            "length {} is not n²k for n = {n}",
            v.len()
        )));
    }
    let rows = v.len() / n;
    Ok(CMat::from_fn(rows, n, |r, c| v[r * n + c]))
}

/// Blockwise conjugate transpose `X^h`: each `n × n` block `X_i` is replaced by `X_i†`.
pub fn block_hermitian(x: &CMat, n: usize) -> CMat {
    let mut out = x.clone();
    for i in 0..x.nrows() / n {
        let blk = x.view((i * n, 0), (n, n)).adjoint();
        out.view_mut((i * n, 0), (n, n)).copy_from(&blk);
    }
    out
}

/// Product determinant `Π_i det(X_i)` over the `n × n` blocks of `X`.
pub fn pdet(x: &CMat, n: usize) -> Complex64 {
    let k = x.nrows() / n;
    (0..k)
        .map(|i| x.view((i * n, 0), (n, n)).clone_owned().determinant())
        .product()
}

/// Lattice of `nk × n` complex matrices, stored via its vectorisation.
#[derive(Clone, Debug)]
pub struct MatrixLattice {
    block_rows: usize,
    block_size: usize,
    generators: Vec<CMat>,
    lattice: Lattice,
    provenance: Provenance,
}

/// Minimum product determinant and normalised minimum determinant.
#[derive(Clone, Debug)]
pub struct PdetMin {
    pub pdet: f64,
    pub delta: f64,
    /// Squared radius `nk·pdet^{2/nk}` of the certifying enumeration.
    pub radius2: f64,
    pub coords: Vec<i64>,
}

impl MatrixLattice {
    /// Builds the lattice spanned by `2n²k` generator matrices of shape `nk × n`.
    pub fn new(generators: Vec<CMat>, block_size: usize, provenance: Provenance) -> Result<Self> {
        let n = block_size;
        let first = generators
            .first()
            .ok_or_else(|| Error::Shape("no generators".into()))?;
        let rows = first.nrows();
        if n == 0 || rows % n != 0 || first.ncols() != n {
            return Err(Error::Shape(format!(
                "generator shape {}×{} incompatible with n = {n}",
                rows,
                first.ncols()
            )));
        }
        let k = rows / n;
        let dim = 2 * n * n * k;
        if generators.len() != dim || generators.iter().any(|g| g.shape() != (rows, n)) {
            return Err(Error::Shape(format!(
                "need {dim} generators of shape {rows}×{n}"
            )));
        }
        let mut basis = RMat::zeros(dim, dim);
        for (j, g) in generators.iter().enumerate() {
            basis.set_column(j, &complex_to_real(&vectorize(g)));
        }
        let lattice = Lattice::new(basis)?;
        Ok(Self {
            block_rows: k,
            block_size: n,
            generators,
            lattice,
            provenance,
        })
    }

    /// Number of stacked blocks `k`.
    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    /// Block size `n`.
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The underlying vectorised lattice of complex dimension `n²k`.
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Fundamental volume.
    pub fn volume(&self) -> f64 {
        self.lattice.volume()
    }

    /// Matrix `Σ_j z_j G_j` for integer coordinates `z`.
    pub fn element(&self, z: &[i64]) -> CMat {
        let mut out = CMat::zeros(self.generators[0].nrows(), self.block_size);
        for (g, &c) in self.generators.iter().zip(z) {
            if c != 0 {
                out += g * Complex64::new(c as f64, 0.0);
            }
        }
        out
    }

    /// Converts a real-coordinate vectorised point back into a matrix.
    pub fn matrix_of(&self, x: &RVec) -> CMat {
        devectorize(&real_to_complex(x), self.block_size).expect("consistent shape")
    }

    /// The scaled lattice `αL`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        let gens = self
            .generators
            .iter()
            .map(|g| g * Complex64::new(alpha, 0.0))
            .collect();
        Self::new(gens, self.block_size, self.provenance.clone())
    }

    /// Minimum `|pdet|` over nonzero lattice matrices and `δ(L) = pdet / V^{1/2n}`.
    ///
    /// Every `X` satisfies `‖X‖² ≥ nk·|pdet X|^{2/nk}`, so enumerating that ball around the
    /// current best value certifies the minimum.
    pub fn pdet_min(&self) -> Result<PdetMin> {
        let dim = self.lattice.dim_real();
        if dim > 16 {
            return Err(Error::EnumerationLimit(format!(
                "dimension {dim} exceeds 16"
            )));
        }
        let n = self.block_size;
        let nk = (n * self.block_rows) as f64;
        let radius_for = |t: f64| nk * t.powf(2.0 / nk) * (1.0 + 1e-9) + 1e-300;
        let mut best = f64::INFINITY;
        let mut coords = Vec::new();
        for j in 0..dim {
            let mut z = vec![0i64; dim];
            z[j] = 1;
            let p = pdet(&self.element(&z), n).norm();
            if p < best {
                best = p;
                coords = z;
            }
        }
        if best > 0.0 {
            let en = Enumerator::new(&self.lattice)?;
            en.shrinking_search(radius_for(best), |z, x, _| {
                let p = pdet(&self.matrix_of(x), n).norm();
                let tol = 1e-12 * best;
                if p < best - tol || ((p - best).abs() <= tol && z < coords.as_slice()) {
                    best = p.min(best);
                    coords = z.to_vec();
                }
                if best < 1e-12 {
                    best = 0.0;
                    return 0.0;
                }
                radius_for(best)
            })?;
        }
        let delta = best / self.volume().powf(1.0 / (2.0 * n as f64));
        let radius2 = if best > 0.0 { radius_for(best) } else { 0.0 };
        Ok(PdetMin {
            pdet: best,
            delta,
            radius2,
            coords,
        })
    }
}
