//! Matrix product operators on qubit chains.
//!
//! An MPO site holds four `left-bond × right-bond` matrices indexed by the
//! (output, input) physical pair. The constructors cover the two operator
//! shapes the engine needs: `cos φ · 1 + i sin φ · P` for absorbing a phase
//! gate (bond dimension 2, or 1 when `P` is the identity), and a direct sum
//! over the terms of a Pauli-sum Hamiltonian (bond dimension = term count,
//! compressible by an SVD sweep).

use nalgebra::DMatrix;
use thiserror::Error;

use crate::mps::{site_letter_matrix, truncation_rank, Mps};
use crate::pauli::{PauliError, PauliString, DENSE_QUBIT_LIMIT};
use crate::scalar::{c_im, c_re, Cplx, Real};

#[derive(Debug, Error, PartialEq)]
pub enum MpoError {
    #[error("cannot build an operator on zero sites")]
    EmptySystem,

    #[error("operator acts on {op} sites but target has {target}")]
    SizeMismatch { op: usize, target: usize },

    #[error("refusing dense form for {n} sites (limit {limit})")]
    TooManySites { n: usize, limit: usize },

    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// One MPO site: `m[s_out][s_in]` is a `left-bond × right-bond` matrix.
#[derive(Debug, Clone)]
pub(crate) struct MpoTensor<T: Real> {
    pub m: [[DMatrix<Cplx<T>>; 2]; 2],
}

impl<T: Real> MpoTensor<T> {
    fn zeros(wl: usize, wr: usize) -> Self {
        Self {
            m: [
                [DMatrix::zeros(wl, wr), DMatrix::zeros(wl, wr)],
                [DMatrix::zeros(wl, wr), DMatrix::zeros(wl, wr)],
            ],
        }
    }

    fn left_dim(&self) -> usize {
        self.m[0][0].nrows()
    }

    fn right_dim(&self) -> usize {
        self.m[0][0].ncols()
    }

    /// Adds `op · weight` into the `(wl, wr)` operator slot.
    fn add_block(&mut self, wl: usize, wr: usize, op: &DMatrix<Cplx<T>>, weight: Cplx<T>) {
        for s_out in 0..2 {
            for s_in in 0..2 {
                self.m[s_out][s_in][(wl, wr)] += op[(s_out, s_in)] * weight;
            }
        }
    }

    /// Fuses `(wl, s_out, s_in)` into rows: `(4·wl) × wr`.
    fn fuse_left(&self) -> DMatrix<Cplx<T>> {
        let (wl, wr) = (self.left_dim(), self.right_dim());
        let mut out = DMatrix::zeros(4 * wl, wr);
        for s_out in 0..2 {
            for s_in in 0..2 {
                let block = 2 * s_out + s_in;
                out.view_mut((block * wl, 0), (wl, wr))
                    .copy_from(&self.m[s_out][s_in]);
            }
        }
        out
    }

    /// Fuses `(s_out, s_in, wr)` into columns: `wl × (4·wr)`.
    fn fuse_right(&self) -> DMatrix<Cplx<T>> {
        let (wl, wr) = (self.left_dim(), self.right_dim());
        let mut out = DMatrix::zeros(wl, 4 * wr);
        for s_out in 0..2 {
            for s_in in 0..2 {
                let block = 2 * s_out + s_in;
                out.view_mut((0, block * wr), (wl, wr))
                    .copy_from(&self.m[s_out][s_in]);
            }
        }
        out
    }

    fn unfuse_left(stacked: &DMatrix<Cplx<T>>) -> Self {
        let wl = stacked.nrows() / 4;
        let wr = stacked.ncols();
        let mut t = Self::zeros(wl, wr);
        for s_out in 0..2 {
            for s_in in 0..2 {
                let block = 2 * s_out + s_in;
                t.m[s_out][s_in] = stacked.view((block * wl, 0), (wl, wr)).into_owned();
            }
        }
        t
    }

    fn unfuse_right(stacked: &DMatrix<Cplx<T>>) -> Self {
        let wl = stacked.nrows();
        let wr = stacked.ncols() / 4;
        let mut t = Self::zeros(wl, wr);
        for s_out in 0..2 {
            for s_in in 0..2 {
                let block = 2 * s_out + s_in;
                t.m[s_out][s_in] = stacked.view((0, block * wr), (wl, wr)).into_owned();
            }
        }
        t
    }
}

/// Matrix product operator with open boundaries.
#[derive(Debug, Clone)]
pub struct Mpo<T: Real> {
    sites: Vec<MpoTensor<T>>,
}

impl<T: Real> Mpo<T> {
    pub fn identity(n: usize) -> Self {
        let sites = (0..n)
            .map(|_| {
                let mut t = MpoTensor::zeros(1, 1);
                t.add_block(0, 0, &crate::dense::identity_matrix(2), c_re(T::one()));
                t
            })
            .collect();
        Self { sites }
    }

    /// `cos φ · 1 + i sin φ · P` for a Hermitian Pauli string `P`.
    ///
    /// Bond dimension 2 across every internal cut, except bond dimension 1
    /// when `P` is (a sign times) the identity.
    pub fn phase_gate(phi: T, p: &PauliString) -> Result<Self, MpoError> {
        let n = p.num_qubits();
        if n == 0 {
            return Err(MpoError::EmptySystem);
        }
        let (sign, pos) = p.hermitian_parts()?;
        let alpha = c_re(phi.cos());
        let beta = c_im(phi.sin()) * c_re(T::of(sign as f64));
        let letter = |j: usize| site_letter_matrix::<T>(pos.x_bit(j), pos.z_bit(j));

        if p.is_identity_bits() {
            // Scalar (α + β)·1: a unit-modulus global factor.
            let mut sites = Vec::with_capacity(n);
            for j in 0..n {
                let mut t = MpoTensor::zeros(1, 1);
                let w = if j == 0 { alpha + beta } else { c_re(T::one()) };
                t.add_block(0, 0, &crate::dense::identity_matrix(2), w);
                sites.push(t);
            }
            return Ok(Self { sites });
        }
        if n == 1 {
            let mut t = MpoTensor::zeros(1, 1);
            t.add_block(0, 0, &crate::dense::identity_matrix(2), alpha);
            t.add_block(0, 0, &letter(0), beta);
            return Ok(Self { sites: vec![t] });
        }

        let mut sites = Vec::with_capacity(n);
        let id2 = crate::dense::identity_matrix(2);
        let mut first = MpoTensor::zeros(1, 2);
        first.add_block(0, 0, &id2, alpha);
        first.add_block(0, 1, &letter(0), beta);
        sites.push(first);
        for j in 1..n - 1 {
            let mut mid = MpoTensor::zeros(2, 2);
            mid.add_block(0, 0, &id2, c_re(T::one()));
            mid.add_block(1, 1, &letter(j), c_re(T::one()));
            sites.push(mid);
        }
        let mut last = MpoTensor::zeros(2, 1);
        last.add_block(0, 0, &id2, c_re(T::one()));
        last.add_block(1, 0, &letter(n - 1), c_re(T::one()));
        sites.push(last);
        Ok(Self { sites })
    }

    /// Direct sum over weighted Hermitian Pauli terms: internal bond
    /// dimension equals the term count until [`Self::compress`] is applied.
    pub fn from_pauli_terms(n: usize, terms: &[(T, PauliString)]) -> Result<Self, MpoError> {
        if n == 0 {
            return Err(MpoError::EmptySystem);
        }
        assert!(!terms.is_empty(), "empty Pauli sum");
        for (_, p) in terms {
            if p.num_qubits() != n {
                return Err(MpoError::SizeMismatch {
                    op: p.num_qubits(),
                    target: n,
                });
            }
        }
        let k = terms.len();
        let signed: Vec<(Cplx<T>, PauliString)> = terms
            .iter()
            .map(|(coeff, p)| {
                let (sign, pos) = p.hermitian_parts()?;
                Ok((c_re(*coeff * T::of(sign as f64)), pos))
            })
            .collect::<Result<_, PauliError>>()?;
        let mut sites = Vec::with_capacity(n);
        for j in 0..n {
            let (wl, wr) = (if j == 0 { 1 } else { k }, if j == n - 1 { 1 } else { k });
            let mut t = MpoTensor::zeros(wl, wr);
            for (c, (weight, pos)) in signed.iter().enumerate() {
                let op = site_letter_matrix::<T>(pos.x_bit(j), pos.z_bit(j));
                let w = if j == 0 { *weight } else { c_re(T::one()) };
                t.add_block(
                    if j == 0 { 0 } else { c },
                    if j == n - 1 { 0 } else { c },
                    &op,
                    w,
                );
            }
            sites.push(t);
        }
        Ok(Self { sites })
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        (0..self.num_sites() - 1)
            .map(|i| self.sites[i].right_dim())
            .collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    pub(crate) fn tensor(&self, i: usize) -> &MpoTensor<T> {
        &self.sites[i]
    }

    /// SVD compression sweep at the given relative discarded-weight cutoff.
    pub fn compress(&mut self, cutoff: T) {
        let n = self.num_sites();
        if n < 2 {
            return;
        }
        // Left-to-right QR pass.
        for i in 0..n - 1 {
            let stacked = self.sites[i].fuse_left();
            let qr = stacked.qr();
            let (q, r) = (qr.q(), qr.r());
            self.sites[i] = MpoTensor::unfuse_left(&q);
            let next = &self.sites[i + 1];
            let mut t = MpoTensor::zeros(r.nrows(), next.right_dim());
            for s_out in 0..2 {
                for s_in in 0..2 {
                    t.m[s_out][s_in] = &r * &next.m[s_out][s_in];
                }
            }
            self.sites[i + 1] = t;
        }
        // Right-to-left truncated SVD pass.
        for i in (1..n).rev() {
            let stacked = self.sites[i].fuse_right();
            let (u, svals, v_t) = crate::linalg::svd_checked(&stacked);
            let (kept, _) = truncation_rank(&svals, usize::MAX, cutoff);
            let u = u.columns(0, kept).into_owned();
            let v_t = v_t.rows(0, kept).into_owned();
            self.sites[i] = MpoTensor::unfuse_right(&v_t);
            let mut carry = u;
            for (mut ccol, s) in carry.column_iter_mut().zip(svals.iter()) {
                let f = c_re(*s);
                for x in ccol.iter_mut() {
                    *x *= f;
                }
            }
            let prev = &self.sites[i - 1];
            let mut t = MpoTensor::zeros(prev.left_dim(), carry.ncols());
            for s_out in 0..2 {
                for s_in in 0..2 {
                    t.m[s_out][s_in] = &prev.m[s_out][s_in] * &carry;
                }
            }
            self.sites[i - 1] = t;
        }
    }

    /// Dense `2^n × 2^n` matrix (little-endian), for oracle checks.
    pub fn to_dense(&self) -> Result<DMatrix<Cplx<T>>, MpoError> {
        let n = self.num_sites();
        if n > DENSE_QUBIT_LIMIT {
            return Err(MpoError::TooManySites {
                n,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        // acc[w]: operator on the sites contracted so far, per right bond.
        let mut acc: Vec<DMatrix<Cplx<T>>> = vec![DMatrix::identity(1, 1)];
        for t in &self.sites {
            let dim = acc[0].nrows();
            let mut next: Vec<DMatrix<Cplx<T>>> =
                vec![DMatrix::zeros(dim * 2, dim * 2); t.right_dim()];
            for (w, a) in acc.iter().enumerate() {
                for s_out in 0..2 {
                    for s_in in 0..2 {
                        let row = &t.m[s_out][s_in];
                        for w_next in 0..t.right_dim() {
                            let weight = row[(w, w_next)];
                            if weight.norm_sqr() > T::zero() {
                                let mut view =
                                    next[w_next].view_mut((s_out * dim, s_in * dim), (dim, dim));
                                view += a * weight;
                            }
                        }
                    }
                }
            }
            acc = next;
        }
        Ok(acc.pop().expect("boundary bond"))
    }

    /// `⟨ψ|W|ψ⟩` by transfer contraction.
    pub fn expectation(&self, mps: &Mps<T>) -> Result<Cplx<T>, MpoError> {
        let n = self.num_sites();
        if mps.num_sites() != n {
            return Err(MpoError::SizeMismatch {
                op: n,
                target: mps.num_sites(),
            });
        }
        let mut env: Vec<DMatrix<Cplx<T>>> = vec![DMatrix::identity(1, 1)];
        for i in 0..n {
            let w = &self.sites[i];
            let a = mps.tensor(i);
            let dr = a.m[0].ncols();
            let mut next: Vec<DMatrix<Cplx<T>>> = vec![DMatrix::zeros(dr, dr); w.right_dim()];
            for (wl, e) in env.iter().enumerate() {
                for s_out in 0..2 {
                    let bra = a.m[s_out].adjoint() * e;
                    for s_in in 0..2 {
                        let row = &w.m[s_out][s_in];
                        let bra_ket = &bra * &a.m[s_in];
                        for (wr, slot) in next.iter_mut().enumerate() {
                            let weight = row[(wl, wr)];
                            if weight.norm_sqr() > T::zero() {
                                *slot += &bra_ket * weight;
                            }
                        }
                    }
                }
            }
            env = next;
        }
        Ok(env[0][(0, 0)])
    }
}
