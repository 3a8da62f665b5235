//! Totally complex number fields, their fractional ideals and canonical-embedding lattices.
//!
//! A field `F = Q[x]/(f)` of degree `2k` is stored through its monic integer defining
//! polynomial. Elements are exact rational coordinate vectors over the power basis
//! `1, x, …, x^{2k−1}`; the integral basis is given as a list of such vectors. Floating point
//! only enters when an element is embedded: `ψ(a) = (σ_1(a), …, σ_k(a))` with one embedding
//! chosen from each complex-conjugate pair (the root with positive imaginary part, ordered by
//! argument).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::exact::{self, q, q_to_f64, QMat, Q};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{CMat, CVec};

/// Field element as power-basis coordinates.
pub type FieldElem = Vec<Q>;

/// Totally complex number field with an integral basis and chosen embeddings.
#[derive(Clone, Debug)]
pub struct NumberFieldCtx {
    name: String,
    poly: Vec<BigInt>,
    integral_basis: QMat,
    integral_inverse: QMat,
    discriminant: BigInt,
    roots: Vec<Complex64>,
}

/// Fractional ideal given by an explicit `Z`-basis in integral-basis coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalIdealBasis {
    /// Rows are basis elements (coordinates over the integral basis).
    pub basis: QMat,
    /// Ideal norm `|det basis|`.
    pub norm: Q,
}

impl FractionalIdealBasis {
    /// Validates a module basis and computes its norm.
    pub fn new(field: &NumberFieldCtx, basis: QMat) -> Result<Self> {
        let d = field.degree();
        if basis.len() != d || basis.iter().any(|r| r.len() != d) {
            return Err(Error::Shape(format!("ideal basis must be {d}×{d}")));
        }
        let norm = exact::det(&basis).abs();
        if norm.is_zero() {
            return Err(Error::Consistency("ideal basis is not full rank".into()));
        }
        Ok(Self { basis, norm })
    }
}

impl NumberFieldCtx {
    /// Builds a field from a monic integer polynomial (coefficients low to high). When
    /// `integral_basis` is `None` the power basis is used. The discriminant of the integral
    /// basis is recomputed exactly and must equal `discriminant`.
    pub fn new(
        name: &str,
        poly: &[i64],
        integral_basis: Option<QMat>,
        discriminant: i64,
    ) -> Result<Self> {
        let d = poly.len().saturating_sub(1);
        if d < 2 || d % 2 != 0 || poly[d] != 1 {
            return Err(Error::Consistency(format!(
                "{name}: defining polynomial must be monic of even degree"
            )));
        }
        let ib = match integral_basis {
            Some(b) => b,
            None => (0..d)
                .map(|i| (0..d).map(|j| q((i == j) as i64)).collect())
                .collect(),
        };
        if ib.len() != d || ib.iter().any(|r| r.len() != d) {
            return Err(Error::Shape(format!(
                "{name}: integral basis must be {d}×{d}"
            )));
        }
        let integral_inverse = exact::inverse(&ib)?;
        let coeffs: Vec<Complex64> = poly
            .iter()
            .map(|&c| Complex64::new(c as f64, 0.0))
            .collect();
        let all = exact::poly_roots(&coeffs)?;
        if all.iter().any(|r| r.im.abs() < 1e-9) {
            return Err(Error::Consistency(format!(
                "{name}: field is not totally complex"
            )));
        }
        let mut roots: Vec<Complex64> = all.into_iter().filter(|r| r.im > 0.0).collect();
        roots.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        if roots.len() != d / 2 {
            return Err(Error::Consistency(format!(
                "{name}: roots do not come in conjugate pairs"
            )));
        }
        let ctx = Self {
            name: name.to_string(),
            poly: poly.iter().map(|&c| BigInt::from(c)).collect(),
            integral_basis: ib,
            integral_inverse,
            discriminant: BigInt::from(discriminant),
            roots,
        };
        let disc = exact::det(&ctx.trace_form());
        if disc != Q::from_integer(ctx.discriminant.clone()) {
            return Err(Error::Consistency(format!(
                "{name}: discriminant {disc} differs from the stated {discriminant}"
            )));
        }
        // Numerical discriminant identity: V(ψ(O_F)) = 2^{-k}√|d_F|.
        let v = ctx.ideal_lattice(&ctx.ring_of_integers())?.volume();
        let expect = ctx.volume_of_ring();
        if ((v - expect) / expect).abs() > 1e-6 {
            return Err(Error::Consistency(format!(
                "{name}: embedding volume {v} differs from {expect}"
            )));
        }
        Ok(ctx)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Absolute degree `2k`.
    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    /// Number of chosen complex embeddings `k`.
    pub fn dim_complex(&self) -> usize {
        self.degree() / 2
    }

    /// Defining polynomial coefficients (low to high).
    pub fn polynomial(&self) -> &[BigInt] {
        &self.poly
    }

    /// Field discriminant `d_F`.
    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// `|d_F|` as a float.
    pub fn abs_discriminant(&self) -> f64 {
        q_to_f64(&Q::from_integer(self.discriminant.abs()))
    }

    /// Root discriminant `|d_F|^{1/2k}`.
    pub fn root_discriminant(&self) -> f64 {
        self.abs_discriminant().powf(1.0 / self.degree() as f64)
    }

    /// Integral basis (rows in power coordinates).
    pub fn integral_basis(&self) -> &QMat {
        &self.integral_basis
    }

    /// The `k` chosen roots `σ_i(x)`.
    pub fn embedding_roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn zero(&self) -> FieldElem {
        vec![Q::zero(); self.degree()]
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        let mut e = self.zero();
        e[0] = q(n);
        e
    }

    /// Element from integer power-basis coordinates.
    pub fn from_coeffs(&self, c: &[i64]) -> Result<FieldElem> {
        if c.len() > self.degree() {
            return Err(Error::Shape(format!(
                "{} coefficients for a degree-{} field",
                c.len(),
                self.degree()
            )));
        }
        let mut e = self.zero();
        for (x, &v) in e.iter_mut().zip(c) {
            *x = q(v);
        }
        Ok(e)
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(&self, a: &FieldElem, s: &Q) -> FieldElem {
        a.iter().map(|x| x * s).collect()
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        a.iter().map(|x| -x).collect()
    }

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        a.iter().all(Zero::is_zero)
    }

    /// Product reduced modulo the defining polynomial.
    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let d = self.degree();
        let mut prod = vec![Q::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        // x^d = −Σ f_j x^j.
        for t in (d..prod.len()).rev() {
            let c = std::mem::replace(&mut prod[t], Q::zero());
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                if !self.poly[j].is_zero() {
                    prod[t - d + j] -= &c * Q::from_integer(self.poly[j].clone());
                }
            }
        }
        prod.truncate(d);
        prod
    }

    /// Matrix of multiplication by `a` on the power basis (column `j` = coordinates of `a·x^j`).
    pub fn mult_matrix(&self, a: &FieldElem) -> QMat {
        let d = self.degree();
        let cols: Vec<FieldElem> = (0..d)
            .map(|j| {
                let mut xj = self.zero();
                xj[j] = Q::one();
                self.mul(a, &xj)
            })
            .collect();
        (0..d)
            .map(|i| (0..d).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    /// Absolute trace `Tr_{F/Q}(a)`.
    pub fn trace(&self, a: &FieldElem) -> Q {
        let m = self.mult_matrix(a);
        (0..self.degree()).map(|i| m[i][i].clone()).sum()
    }

    /// Absolute norm `N_{F/Q}(a)`.
    pub fn norm(&self, a: &FieldElem) -> Q {
        exact::det(&self.mult_matrix(a))
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        let m = exact::inverse(&self.mult_matrix(a))
            .map_err(|_| Error::InvalidArgument("zero has no inverse".into()))?;
        Ok(m.iter().map(|row| row[0].clone()).collect())
    }

    /// `σ_i(a)` for `i < 2k`; indices `k..2k` are the conjugate embeddings.
    pub fn embed(&self, a: &FieldElem, i: usize) -> Complex64 {
        let k = self.dim_complex();
        let r = if i < k {
            self.roots[i]
        } else {
            self.roots[i - k].conj()
        };
        a.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * r + q_to_f64(c))
    }

    /// Canonical embedding `ψ(a) ∈ C^k`.
    pub fn psi(&self, a: &FieldElem) -> CVec {
        CVec::from_fn(self.dim_complex(), |i, _| self.embed(a, i))
    }

    /// Power coordinates of the element with the given integral-basis coordinates.
    pub fn integral_to_power(&self, c: &[Q]) -> FieldElem {
        let d = self.degree();
        (0..d)
            .map(|j| (0..d).map(|i| &c[i] * &self.integral_basis[i][j]).sum())
            .collect()
    }

    /// Integral-basis coordinates of an element.
    pub fn power_to_integral(&self, a: &FieldElem) -> Vec<Q> {
        let d = self.degree();
        (0..d)
            .map(|j| (0..d).map(|i| &a[i] * &self.integral_inverse[i][j]).sum())
            .collect()
    }

    /// Trace form `Tr(ω_i ω_j)` of the integral basis.
    pub fn trace_form(&self) -> QMat {
        let d = self.degree();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        self.trace(&self.mul(&self.integral_basis[i], &self.integral_basis[j]))
                    })
                    .collect()
            })
            .collect()
    }

    /// `O_F` itself.
    pub fn ring_of_integers(&self) -> FractionalIdealBasis {
        let d = self.degree();
        FractionalIdealBasis {
            basis: (0..d)
                .map(|i| (0..d).map(|j| q((i == j) as i64)).collect())
                .collect(),
            norm: Q::one(),
        }
    }

    /// Principal ideal `aO_F` with basis `a·ω_i`.
    pub fn principal_ideal(&self, a: &FieldElem) -> Result<FractionalIdealBasis> {
        let basis = self
            .integral_basis
            .iter()
            .map(|w| self.power_to_integral(&self.mul(a, w)))
            .collect();
        let ideal = FractionalIdealBasis::new(self, basis)?;
        debug_assert_eq!(ideal.norm, self.norm(a).abs());
        Ok(ideal)
    }

    /// Codifferent `O_F^∨`: the trace-dual basis `ω_i^∨ = Σ_j (T^{-1})_{ij} ω_j`.
    pub fn codifferent(&self) -> Result<FractionalIdealBasis> {
        let tinv = exact::inverse(&self.trace_form())
            .map_err(|_| Error::Consistency(format!("{}: singular trace form", self.name)))?;
        FractionalIdealBasis::new(self, tinv)
    }

    /// `ψ(I)` for a fractional ideal.
    pub fn ideal_lattice(&self, ideal: &FractionalIdealBasis) -> Result<Lattice> {
        let k = self.dim_complex();
        let d = self.degree();
        if ideal.basis.len() != d {
            return Err(Error::Shape(
                "ideal basis does not match the field degree".into(),
            ));
        }
        let mut gens = CMat::zeros(k, d);
        for (j, c) in ideal.basis.iter().enumerate() {
            gens.set_column(j, &self.psi(&self.integral_to_power(c)));
        }
        Lattice::from_complex_generators(&gens)
    }

    /// `V(ψ(O_F)) = 2^{-k}√|d_F|`.
    pub fn volume_of_ring(&self) -> f64 {
        2f64.powi(-(self.dim_complex() as i32)) * self.abs_discriminant().sqrt()
    }

    /// `ψ(O_F^∨)`, after checking `N(O_F^∨) = 1/|d_F|` and that `2·conj(ψ(O_F^∨))` is the dual
    /// of `ψ(O_F)` (unimodular identity pairing).
    pub fn codifferent_lattice(&self) -> Result<Lattice> {
        let co = self.codifferent()?;
        let expect = Q::new(BigInt::one(), self.discriminant.abs());
        if co.norm != expect {
            return Err(Error::Consistency(format!(
                "{}: N(O^∨) = {} ≠ 1/|d_F|",
                self.name, co.norm
            )));
        }
        let lat = self.ideal_lattice(&co)?;
        let primal = self.ideal_lattice(&self.ring_of_integers())?;
        let dual = conjugate_doubled(&lat)?;
        let p = crate::lattice::pairing_matrix(&dual, &primal);
        let id_err = (p - crate::linalg::RMat::identity(self.degree(), self.degree())).amax();
        if id_err > 1e-9 {
            return Err(Error::Consistency(format!(
                "{}: codifferent pairing deviates by {id_err:e}",
                self.name
            )));
        }
        Ok(lat)
    }

    /// `2·conj(ψ(O_F^∨))`, which equals `ψ(O_F)*`.
    pub fn dual_via_codifferent(&self) -> Result<Lattice> {
        conjugate_doubled(&self.codifferent_lattice()?)
    }
}

/// `2·conj(Λ)` in real coordinates.
fn conjugate_doubled(lat: &Lattice) -> Result<Lattice> {
    let k = lat.dim_complex();
    let mut b = lat.basis() * 2.0;
    for i in k..2 * k {
        b.row_mut(i).neg_mut();
    }
    Lattice::new(b)
}
