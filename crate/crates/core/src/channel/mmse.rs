//! MMSE-GDFE preprocessing and exact MAP decoding.
//!
//! For each block, the thin QR factorisation `[H_i; I/√ρ] = [Q1_i; Q2_i]·R_i` gives
//! `R_i†R_i = H_i†H_i + I/ρ` and
//!
//! `‖y − Hx‖² + ‖x‖²/ρ = ‖Q1†y − Rx‖² + const`,
//!
//! so the MAP estimate under the discrete Gaussian prior is the point of `RΛ_b` closest to
//! `Q1†y`, found exactly by sphere decoding.

use num_complex::Complex64;

use super::block_kron;
use crate::error::{Error, Result};
use crate::lattice::{Enumerator, Lattice};
use crate::linalg::{complex_to_real, CMat, CVec, RVec};
use crate::wiretap::secrecy::block_diag;
use crate::wiretap::WiretapCode;

/// Per-block MMSE-GDFE factors.
#[derive(Clone, Debug)]
pub struct MmseGdfe {
    pub r_blocks: Vec<CMat>,
    pub q1_blocks: Vec<CMat>,
    pub rho: f64,
}

impl MmseGdfe {
    /// `diag(R_1, …, R_k)`.
    pub fn r_full(&self) -> CMat {
        block_diag(&self.r_blocks)
    }

    /// Largest entrywise errors of `R†R = H†H + I/ρ` and `Q1†Q1 + (R^{-1})†R^{-1}/ρ = I`.
    pub fn identity_errors(&self, blocks: &[CMat]) -> Result<(f64, f64)> {
        let mut e1 = 0.0f64;
        let mut e2 = 0.0f64;
        for ((h, r), q1) in blocks.iter().zip(&self.r_blocks).zip(&self.q1_blocks) {
            let n = h.ncols();
            let eye = CMat::identity(n, n);
            let lhs = r.adjoint() * r;
            let rhs = h.adjoint() * h + &eye * Complex64::new(1.0 / self.rho, 0.0);
            e1 = e1.max((lhs - rhs).camax());
            let rinv = r
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Consistency("singular R".into()))?;
            let res = q1.adjoint() * q1
                + rinv.adjoint() * &rinv * Complex64::new(1.0 / self.rho, 0.0)
                - eye;
            e2 = e2.max(res.camax());
        }
        Ok((e1, e2))
    }
}

/// MMSE-GDFE factorisation of every block at SNR `ρ`.
pub fn mmse_gdfe(blocks: &[CMat], rho: f64) -> Result<MmseGdfe> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument("ρ must be positive".into()));
    }
    let mut r_blocks = Vec::with_capacity(blocks.len());
    let mut q1_blocks = Vec::with_capacity(blocks.len());
    for h in blocks {
        let (nr, n) = h.shape();
        let mut aug = CMat::zeros(nr + n, n);
        aug.view_mut((0, 0), (nr, n)).copy_from(h);
        for i in 0..n {
            aug[(nr + i, i)] = Complex64::new(1.0 / rho.sqrt(), 0.0);
        }
        let qr = aug.qr();
        let q = qr.q();
        r_blocks.push(qr.r());
        q1_blocks.push(q.rows(0, nr).clone_owned());
    }
    Ok(MmseGdfe {
        r_blocks,
        q1_blocks,
        rho,
    })
}

/// Exact MAP decoder for a fixed channel.
#[derive(Clone, Debug)]
pub struct Decoder<'a> {
    code: &'a WiretapCode,
    mmse: MmseGdfe,
    q1_adj: CMat,
    received: Lattice,
    enumerator: Enumerator,
}

impl<'a> Decoder<'a> {
    /// Prepares the decoder for channel blocks `H_i` (`n_rx × n`) at SNR `ρ_b = σ_s²/σ_b²`.
    pub fn new(code: &'a WiretapCode, blocks: &[CMat], rho: f64) -> Result<Self> {
        let n = code.antennas();
        if blocks.len() != code.blocks() || blocks.iter().any(|b| b.ncols() != n) {
            return Err(Error::Shape(format!(
                "need {} blocks with {n} columns",
                code.blocks()
            )));
        }
        let mmse = mmse_gdfe(blocks, rho)?;
        let q1_adj = block_kron(&mmse.q1_blocks, n).adjoint();
        let received = code
            .lambda_b()
            .transformed_complex(&block_kron(&mmse.r_blocks, n))?;
        let enumerator = Enumerator::new(&received)?;
        Ok(Self {
            code,
            mmse,
            q1_adj,
            received,
            enumerator,
        })
    }

    pub fn mmse(&self) -> &MmseGdfe {
        &self.mmse
    }

    /// The received lattice `(R ⊗ I_n)Λ_b`.
    pub fn received_lattice(&self) -> &Lattice {
        &self.received
    }

    /// Decodes a vectorised observation; returns the message and the estimated codeword.
    pub fn decode(&self, y: &CVec) -> Result<(usize, RVec)> {
        if y.len() != self.q1_adj.ncols() {
            return Err(Error::Shape(format!(
                "observation length {} ≠ {}",
                y.len(),
                self.q1_adj.ncols()
            )));
        }
        let target = complex_to_real(&(&self.q1_adj * y));
        let (coords, _) = self.enumerator.closest(&target)?;
        let x = self.code.lambda_b().point(&coords);
        Ok((self.code.coset_index(&x)?, x))
    }
}

/// One-shot MAP decoding of `y` (see [`Decoder`]).
pub fn decode_map(code: &WiretapCode, y: &CVec, blocks: &[CMat], rho: f64) -> Result<usize> {
    Ok(Decoder::new(code, blocks, rho)?.decode(y)?.0)
}
