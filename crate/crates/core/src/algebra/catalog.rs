//! Fixed catalog of desk-scale number fields and cyclic algebras.
//!
//! The catalog is a JSON manifest compiled into the crate. Every entry is rebuilt and
//! verified (exact discriminant, total complexity, volume identity, order closure) each time
//! it is loaded.
//!
//! Lattice references understood by [`resolve`]:
//! * `z<N>` — the integer lattice `Z^N` (`N` even);
//! * `<field>` — `ψ(O_F)`; `<field>/dual` — `2·conj(ψ(O_F^∨))`; `<field>/<ideal>` — a
//!   catalogued principal ideal;
//! * `<algebra>` — `ψ(Γ)`; `<algebra>/dual` — `2ψ(Γ^∨)^h`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::cyclic::CyclicAlgebraCtx;
use super::field::{FieldElem, NumberFieldCtx};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, MatrixLattice};

const MANIFEST_JSON: &str = include_str!("../../catalog/catalog.json");

/// Manifest entry for a number field.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub name: String,
    pub description: String,
    /// Monic defining polynomial, coefficients low to high.
    pub polynomial: Vec<i64>,
    pub discriminant: i64,
    #[serde(default)]
    pub principal_ideals: Vec<IdealEntry>,
}

/// Principal ideal given by a generator in power-basis coordinates.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IdealEntry {
    pub name: String,
    pub generator: Vec<i64>,
}

/// Manifest entry for a cyclic algebra over a catalogued centre.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraEntry {
    pub name: String,
    pub description: String,
    pub center: String,
    /// `[c_0, …, c_{n−1}]` of `θ^n + Σ c_j θ^j`, each in power coordinates over the centre.
    pub relative_polynomial: Vec<Vec<i64>>,
    /// `σ(θ)` as coefficients over the centre of `1, θ, …`.
    pub sigma_theta: Vec<Vec<i64>>,
    pub gamma: Vec<i64>,
}

/// The whole manifest.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub fields: Vec<FieldEntry>,
    pub algebras: Vec<AlgebraEntry>,
}

/// The compiled-in manifest.
pub fn manifest() -> &'static Manifest {
    static M: OnceLock<Manifest> = OnceLock::new();
    M.get_or_init(|| serde_json::from_str(MANIFEST_JSON).expect("catalog manifest is valid JSON"))
}

/// Names of all catalogued fields.
pub fn field_names() -> Vec<&'static str> {
    manifest().fields.iter().map(|f| f.name.as_str()).collect()
}

/// Loads and verifies a catalogued field.
pub fn field(name: &str) -> Result<NumberFieldCtx> {
    let e = manifest()
        .fields
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))?;
    NumberFieldCtx::new(&e.name, &e.polynomial, None, e.discriminant)
}

/// Catalogued field of complex dimension `k` with the smallest `|d_F|`.
pub fn smallest_field(k: usize) -> Result<NumberFieldCtx> {
    let e = manifest()
        .fields
        .iter()
        .filter(|f| f.polynomial.len() == 2 * k + 1)
        .min_by_key(|f| f.discriminant.unsigned_abs())
        .ok_or_else(|| Error::UnknownEntry(format!("field of degree {}", 2 * k)))?;
    field(&e.name)
}

fn elem(f: &NumberFieldCtx, c: &[i64]) -> Result<FieldElem> {
    f.from_coeffs(c)
}

/// Loads and verifies a catalogued algebra.
pub fn algebra(name: &str) -> Result<CyclicAlgebraCtx> {
    let e = manifest()
        .algebras
        .iter()
        .find(|a| a.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))?;
    let center = field(&e.center)?;
    let rel = e
        .relative_polynomial
        .iter()
        .map(|c| elem(&center, c))
        .collect::<Result<_>>()?;
    let st = e
        .sigma_theta
        .iter()
        .map(|c| elem(&center, c))
        .collect::<Result<_>>()?;
    let gamma = elem(&center, &e.gamma)?;
    CyclicAlgebraCtx::new(&e.name, center, rel, st, gamma)
}

/// The Golden algebra.
pub fn golden() -> Result<CyclicAlgebraCtx> {
    algebra("golden")
}

/// A lattice resolved from a catalog reference.
#[derive(Clone, Debug)]
pub struct CatalogLattice {
    pub name: String,
    pub lattice: Lattice,
    /// Present for algebra lattices.
    pub matrix: Option<MatrixLattice>,
    /// Field providing `d_F` for the ideal-lattice bounds.
    pub field: Option<NumberFieldCtx>,
}

/// Resolves a lattice reference (see the module documentation).
pub fn resolve(reference: &str) -> Result<CatalogLattice> {
    let unknown = || Error::UnknownEntry(reference.to_string());
    if let Some(n) = reference
        .strip_prefix('z')
        .and_then(|s| s.parse::<usize>().ok())
    {
        if n == 0 || n % 2 != 0 {
            return Err(unknown());
        }
        return Ok(CatalogLattice {
            name: reference.into(),
            lattice: Lattice::integer(n / 2),
            matrix: None,
            field: None,
        });
    }
    let (base, suffix) = match reference.split_once('/') {
        Some((b, s)) => (b, Some(s)),
        None => (reference, None),
    };
    if let Some(fe) = manifest().fields.iter().find(|f| f.name == base) {
        let f = field(base)?;
        let lattice = match suffix {
            None => f.ideal_lattice(&f.ring_of_integers())?,
            Some("dual") => f.dual_via_codifferent()?,
            Some(s) => {
                let ie = fe
                    .principal_ideals
                    .iter()
                    .find(|i| i.name == s)
                    .ok_or_else(unknown)?;
                f.ideal_lattice(&f.principal_ideal(&f.from_coeffs(&ie.generator)?)?)?
            }
        };
        return Ok(CatalogLattice {
            name: reference.into(),
            lattice,
            matrix: None,
            field: Some(f),
        });
    }
    if manifest().algebras.iter().any(|a| a.name == base) {
        let a = algebra(base)?;
        let ml = match suffix {
            None => a.multiblock_embed()?,
            Some("dual") => a.algebra_codifferent()?,
            Some(_) => return Err(unknown()),
        };
        return Ok(CatalogLattice {
            name: reference.into(),
            lattice: ml.lattice().clone(),
            matrix: Some(ml),
            field: None,
        });
    }
    Err(unknown())
}
