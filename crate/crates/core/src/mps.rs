//! Open-boundary matrix product states with physical dimension 2.
//!
//! Tensors are kept in mixed-canonical form around an orthogonality center:
//! everything left of the center is a left isometry, everything right of it a
//! right isometry. Each site holds two `left-bond × right-bond` matrices, one
//! per physical basis state, so gate application and canonicalization reduce
//! to ordinary matrix products, QR factorizations and SVDs.
//!
//! Truncation policy: singular values are dropped while the discarded
//! squared weight stays below `svd_cutoff` (relative to the total), then the
//! bond is capped at `chi_max`. Unitary operations renormalize the kept
//! spectrum, so the state norm stays at 1.
//!
//! Statevector dumps are little-endian: site 0 is the least significant bit
//! of the basis index.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::pauli::{PauliError, PauliString};
use crate::scalar::{c_re, Cplx, Real};

/// Largest site count for which full statevector contraction is allowed.
pub const STATEVECTOR_SITE_LIMIT: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum MpsError {
    #[error("cannot build a state on zero sites")]
    EmptySystem,

    #[error("site state is not normalized (|norm - 1| = {deviation:.3e})")]
    NotNormalizedSite { deviation: f64 },

    #[error("gate is not unitary (max |U†U - 1| entry = {deviation:.3e})")]
    NonUnitaryGate { deviation: f64 },

    #[error("site {site} out of range for {n} sites")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("cut {cut} out of range: valid cuts are 0..{max}")]
    CutOutOfRange { cut: usize, max: usize },

    #[error("operator acts on {op} sites but state has {state}")]
    SizeMismatch { op: usize, state: usize },

    #[error("gate matrix must be {expected}x{expected}, got {rows}x{cols}")]
    BadGateShape {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("refusing statevector contraction for {n} sites (limit {limit})")]
    TooManySites { n: usize, limit: usize },

    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// A normalized single-qubit state used to seed product states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteState<T: Real> {
    pub amplitudes: [Cplx<T>; 2],
}

impl<T: Real> SiteState<T> {
    pub fn from_amplitudes(a0: Cplx<T>, a1: Cplx<T>) -> Result<Self, MpsError> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        let deviation = (norm - T::one()).abs();
        if deviation > T::of(1e-8) {
            return Err(MpsError::NotNormalizedSite {
                deviation: deviation.to_f64_lossy(),
            });
        }
        Ok(Self {
            amplitudes: [a0, a1],
        })
    }

    pub fn zero() -> Self {
        Self {
            amplitudes: [c_re(T::one()), Cplx::new(T::zero(), T::zero())],
        }
    }

    pub fn one() -> Self {
        Self {
            amplitudes: [Cplx::new(T::zero(), T::zero()), c_re(T::one())],
        }
    }

    pub fn plus() -> Self {
        let h = c_re(T::of(std::f64::consts::FRAC_1_SQRT_2));
        Self { amplitudes: [h, h] }
    }

    /// `(|0⟩ + i|1⟩)/√2`, the +1 eigenstate of Y.
    pub fn y_plus() -> Self {
        let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            amplitudes: [c_re(h), Cplx::new(T::zero(), h)],
        }
    }

    /// `(|0⟩ + e^{iφ}|1⟩)/√2`.
    pub fn phase_plus(phi: T) -> Self {
        let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            amplitudes: [c_re(h), Cplx::new(h * phi.cos(), h * phi.sin())],
        }
    }

    /// The magic state `(|0⟩ + e^{iπ/4}|1⟩)/√2`.
    pub fn t_state() -> Self {
        Self::phase_plus(T::FRAC_PI_4())
    }
}

/// One MPS site: a `left-bond × right-bond` matrix per physical basis state.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SiteTensor<T: Real> {
    pub m: [DMatrix<Cplx<T>>; 2],
}

impl<T: Real> SiteTensor<T> {
    fn left_dim(&self) -> usize {
        self.m[0].nrows()
    }

    fn right_dim(&self) -> usize {
        self.m[0].ncols()
    }

    /// Stacks the physical index into the rows: `(2·dl) × dr`.
    fn fuse_left(&self) -> DMatrix<Cplx<T>> {
        let (dl, dr) = (self.left_dim(), self.right_dim());
        let mut out = DMatrix::zeros(2 * dl, dr);
        for s in 0..2 {
            out.view_mut((s * dl, 0), (dl, dr)).copy_from(&self.m[s]);
        }
        out
    }

    /// Stacks the physical index into the columns: `dl × (2·dr)`.
    fn fuse_right(&self) -> DMatrix<Cplx<T>> {
        let (dl, dr) = (self.left_dim(), self.right_dim());
        let mut out = DMatrix::zeros(dl, 2 * dr);
        for s in 0..2 {
            out.view_mut((0, s * dr), (dl, dr)).copy_from(&self.m[s]);
        }
        out
    }

    fn unfuse_left(stacked: &DMatrix<Cplx<T>>) -> Self {
        let dl = stacked.nrows() / 2;
        let dr = stacked.ncols();
        Self {
            m: [
                stacked.view((0, 0), (dl, dr)).into_owned(),
                stacked.view((dl, 0), (dl, dr)).into_owned(),
            ],
        }
    }

    fn unfuse_right(stacked: &DMatrix<Cplx<T>>) -> Self {
        let dl = stacked.nrows();
        let dr = stacked.ncols() / 2;
        Self {
            m: [
                stacked.view((0, 0), (dl, dr)).into_owned(),
                stacked.view((0, dr), (dl, dr)).into_owned(),
            ],
        }
    }
}

/// Per-operation truncation report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateStats<T: Real> {
    /// Relative squared weight removed by the truncation.
    pub discarded_weight: T,
    /// Bond dimension after the operation.
    pub bond_dim: usize,
}

/// Which side of a split bond keeps the singular values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CenterSide {
    Left,
    Right,
}

/// Open-boundary matrix product state.
#[derive(Debug, Clone)]
pub struct Mps<T: Real> {
    tensors: Vec<SiteTensor<T>>,
    center: usize,
    chi_max: usize,
    svd_cutoff: T,
}

impl<T: Real> Mps<T> {
    /// Builds a bond-dimension-1 product state.
    pub fn product_state(
        sites: &[SiteState<T>],
        chi_max: usize,
        svd_cutoff: T,
    ) -> Result<Self, MpsError> {
        if sites.is_empty() {
            return Err(MpsError::EmptySystem);
        }
        assert!(chi_max >= 1, "chi_max must be at least 1");
        let tensors = sites
            .iter()
            .map(|s| SiteTensor {
                m: [
                    DMatrix::from_element(1, 1, s.amplitudes[0]),
                    DMatrix::from_element(1, 1, s.amplitudes[1]),
                ],
            })
            .collect();
        Ok(Self {
            tensors,
            center: 0,
            chi_max,
            svd_cutoff,
        })
    }

    /// Compresses a dense statevector (little-endian, length `2^n`) into an
    /// MPS by cascaded SVDs under the given truncation policy.
    pub fn from_statevector(
        v: &DVector<Cplx<T>>,
        chi_max: usize,
        svd_cutoff: T,
    ) -> Result<Self, MpsError> {
        let dim = v.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(MpsError::EmptySystem);
        }
        let n = dim.trailing_zeros() as usize;
        if n > STATEVECTOR_SITE_LIMIT {
            return Err(MpsError::TooManySites {
                n,
                limit: STATEVECTOR_SITE_LIMIT,
            });
        }
        assert!(chi_max >= 1, "chi_max must be at least 1");
        // Peel sites off the right: remainder[b, r] over the leading basis
        // bits b and the already-split right factor r.
        let mut tensors: Vec<SiteTensor<T>> = Vec::with_capacity(n);
        let mut remainder = DMatrix::from_fn(dim, 1, |b, _| v[b]);
        for _ in (1..n).rev() {
            let rows = remainder.nrows() / 2;
            let cols = remainder.ncols();
            // Site bit is the most significant of the remaining block, so it
            // fuses with the split-off right part.
            let mut folded = DMatrix::zeros(rows, 2 * cols);
            for s in 0..2 {
                folded
                    .view_mut((0, s * cols), (rows, cols))
                    .copy_from(&remainder.view((s * rows, 0), (rows, cols)));
            }
            let (u, svals, v_t) = crate::linalg::svd_checked(&folded);
            let (kept, _) = truncation_rank(&svals, chi_max, svd_cutoff);
            let v_t = v_t.rows(0, kept).into_owned();
            tensors.push(SiteTensor::unfuse_right(&v_t));
            let mut carry = u.columns(0, kept).into_owned();
            for (mut c, s) in carry.column_iter_mut().zip(svals.iter()) {
                let f = c_re(*s);
                for x in c.iter_mut() {
                    *x *= f;
                }
            }
            remainder = carry;
        }
        tensors.push(SiteTensor {
            m: [
                remainder.view((0, 0), (1, remainder.ncols())).into_owned(),
                remainder.view((1, 0), (1, remainder.ncols())).into_owned(),
            ],
        });
        tensors.reverse();
        let mut mps = Self {
            tensors,
            center: 0,
            chi_max,
            svd_cutoff,
        };
        mps.normalize();
        Ok(mps)
    }

    pub fn num_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn chi_max(&self) -> usize {
        self.chi_max
    }

    pub fn svd_cutoff(&self) -> T {
        self.svd_cutoff
    }

    pub fn set_chi_max(&mut self, chi_max: usize) {
        assert!(chi_max >= 1);
        self.chi_max = chi_max;
    }

    pub fn set_svd_cutoff(&mut self, cutoff: T) {
        self.svd_cutoff = cutoff;
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// Bond dimensions across the `n - 1` internal cuts.
    pub fn bond_dims(&self) -> Vec<usize> {
        (0..self.num_sites() - 1)
            .map(|i| self.tensors[i].right_dim())
            .collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    pub fn norm(&self) -> T {
        let c = &self.tensors[self.center];
        (c.m[0].norm_squared() + c.m[1].norm_squared()).sqrt()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > T::zero() {
            let inv = c_re(T::one() / norm);
            for s in 0..2 {
                self.tensors[self.center].m[s] *= inv;
            }
        }
    }

    pub(crate) fn tensor(&self, i: usize) -> &SiteTensor<T> {
        &self.tensors[i]
    }

    pub(crate) fn tensor_mut(&mut self, i: usize) -> &mut SiteTensor<T> {
        &mut self.tensors[i]
    }

    /// Caller-managed canonical form (sweeping algorithms move the center by
    /// explicit factorizations and must record where they put it).
    pub(crate) fn set_center(&mut self, site: usize) {
        debug_assert!(site < self.num_sites());
        self.center = site;
    }

    /// Left-orthonormalizes the center site, returning the `R` factor on the
    /// bond to its right instead of absorbing it.
    pub(crate) fn extract_center_matrix_right(&mut self) -> DMatrix<Cplx<T>> {
        let i = self.center;
        let qr = self.tensors[i].fuse_left().qr();
        let (q, r) = (qr.q(), qr.r());
        self.tensors[i] = SiteTensor::unfuse_left(&q);
        r
    }

    /// Right-orthonormalizes the center site, returning the `L` factor on the
    /// bond to its left instead of absorbing it.
    pub(crate) fn extract_center_matrix_left(&mut self) -> DMatrix<Cplx<T>> {
        let i = self.center;
        let qr = self.tensors[i].fuse_right().adjoint().qr();
        let (q, r) = (qr.q(), qr.r());
        self.tensors[i] = SiteTensor::unfuse_right(&q.adjoint());
        r.adjoint()
    }

    /// `m[s] ← mat · m[s]` on one site.
    pub(crate) fn absorb_from_left(&mut self, site: usize, mat: &DMatrix<Cplx<T>>) {
        for s in 0..2 {
            self.tensors[site].m[s] = mat * &self.tensors[site].m[s];
        }
    }

    /// `m[s] ← m[s] · mat` on one site.
    pub(crate) fn absorb_from_right(&mut self, site: usize, mat: &DMatrix<Cplx<T>>) {
        for s in 0..2 {
            self.tensors[site].m[s] = &self.tensors[site].m[s] * mat;
        }
    }

    /// QR-orthonormalizes the center site and moves the center one step right.
    fn shift_center_right(&mut self) {
        let i = self.center;
        let stacked = self.tensors[i].fuse_left();
        let qr = stacked.qr();
        let (q, r) = (qr.q(), qr.r());
        self.tensors[i] = SiteTensor::unfuse_left(&q);
        for s in 0..2 {
            self.tensors[i + 1].m[s] = &r * &self.tensors[i + 1].m[s];
        }
        self.center = i + 1;
    }

    /// LQ-orthonormalizes the center site and moves the center one step left.
    fn shift_center_left(&mut self) {
        let i = self.center;
        let stacked = self.tensors[i].fuse_right();
        // LQ via QR of the adjoint: M = (Q·R)† = R†·Q†.
        let qr = stacked.adjoint().qr();
        let (q, r) = (qr.q(), qr.r());
        let l = r.adjoint();
        self.tensors[i] = SiteTensor::unfuse_right(&q.adjoint());
        for s in 0..2 {
            self.tensors[i - 1].m[s] = &self.tensors[i - 1].m[s] * &l;
        }
        self.center = i - 1;
    }

    pub fn move_center(&mut self, site: usize) {
        assert!(site < self.num_sites());
        while self.center < site {
            self.shift_center_right();
        }
        while self.center > site {
            self.shift_center_left();
        }
    }

    /// Applies a 2×2 unitary on one site. Canonical structure is preserved,
    /// so the center does not move.
    pub fn apply_one_site_gate(
        &mut self,
        site: usize,
        op: &DMatrix<Cplx<T>>,
    ) -> Result<(), MpsError> {
        let n = self.num_sites();
        if site >= n {
            return Err(MpsError::SiteOutOfRange { site, n });
        }
        check_gate(op, 2)?;
        let t = &self.tensors[site];
        let new = [
            &t.m[0] * op[(0, 0)] + &t.m[1] * op[(0, 1)],
            &t.m[0] * op[(1, 0)] + &t.m[1] * op[(1, 1)],
        ];
        self.tensors[site] = SiteTensor { m: new };
        Ok(())
    }

    /// Applies a 4×4 unitary on sites `(site, site + 1)` with SVD truncation.
    ///
    /// Gate pair index: `bit(site) + 2·bit(site + 1)`. The center ends on
    /// `site + 1`.
    pub fn apply_two_site_gate(
        &mut self,
        site: usize,
        op: &DMatrix<Cplx<T>>,
    ) -> Result<GateStats<T>, MpsError> {
        let n = self.num_sites();
        if site + 1 >= n {
            return Err(MpsError::SiteOutOfRange { site: site + 1, n });
        }
        check_gate(op, 4)?;
        if self.center < site {
            self.move_center(site);
        } else if self.center > site + 1 {
            self.move_center(site + 1);
        }
        let theta = apply_gate_to_theta(&self.two_site_theta(site), op, self.theta_dims(site));
        let stats = self.split_theta(site, &theta, CenterSide::Right, true);
        Ok(stats)
    }

    pub(crate) fn theta_dims(&self, site: usize) -> (usize, usize) {
        (
            self.tensors[site].left_dim(),
            self.tensors[site + 1].right_dim(),
        )
    }

    /// Merged two-site block as a `(2·dl) × (2·dr)` matrix; rows are
    /// `(s_left, left bond)`, columns `(s_right, right bond)`.
    pub(crate) fn two_site_theta(&self, site: usize) -> DMatrix<Cplx<T>> {
        debug_assert!(self.center == site || self.center == site + 1);
        let (a, b) = (&self.tensors[site], &self.tensors[site + 1]);
        let (dl, dr) = (a.left_dim(), b.right_dim());
        let mut theta = DMatrix::zeros(2 * dl, 2 * dr);
        for s in 0..2 {
            for t in 0..2 {
                theta
                    .view_mut((s * dl, t * dr), (dl, dr))
                    .copy_from(&(&a.m[s] * &b.m[t]));
            }
        }
        theta
    }

    /// SVD-splits a merged two-site block back into sites `site, site + 1`,
    /// truncating by the state's policy. Returns the truncation stats.
    pub(crate) fn split_theta(
        &mut self,
        site: usize,
        theta: &DMatrix<Cplx<T>>,
        center_side: CenterSide,
        renormalize: bool,
    ) -> GateStats<T> {
        let dl = theta.nrows() / 2;
        let dr = theta.ncols() / 2;
        let (u, mut svals, v_t) = crate::linalg::svd_checked(theta);
        let (kept, discarded) = truncation_rank(&svals, self.chi_max, self.svd_cutoff);
        let mut kept_weight = T::zero();
        for s in &svals[..kept] {
            kept_weight += *s * *s;
        }
        if renormalize && kept_weight > T::zero() {
            let scale = T::one() / kept_weight.sqrt();
            for s in &mut svals[..kept] {
                *s *= scale;
            }
        }

        // Rows of u are (s_left, left bond); fold the spectrum per side.
        let mut u = u.columns(0, kept).into_owned();
        let mut v_t = v_t.rows(0, kept).into_owned();
        match center_side {
            CenterSide::Left => {
                for (mut c, s) in u.column_iter_mut().zip(svals.iter()) {
                    let f = c_re(*s);
                    for x in c.iter_mut() {
                        *x *= f;
                    }
                }
            }
            CenterSide::Right => {
                for (mut r, s) in v_t.row_iter_mut().zip(svals.iter()) {
                    let f = c_re(*s);
                    for x in r.iter_mut() {
                        *x *= f;
                    }
                }
            }
        }
        self.tensors[site] = SiteTensor {
            m: [
                u.view((0, 0), (dl, kept)).into_owned(),
                u.view((dl, 0), (dl, kept)).into_owned(),
            ],
        };
        self.tensors[site + 1] = SiteTensor {
            m: [
                v_t.view((0, 0), (kept, dr)).into_owned(),
                v_t.view((0, dr), (kept, dr)).into_owned(),
            ],
        };
        self.center = match center_side {
            CenterSide::Left => site,
            CenterSide::Right => site + 1,
        };
        GateStats {
            discarded_weight: discarded,
            bond_dim: kept,
        }
    }

    /// Schmidt coefficients across the cut between `cut` and `cut + 1`.
    pub fn schmidt_values(&mut self, cut: usize) -> Result<Vec<T>, MpsError> {
        let n = self.num_sites();
        if cut + 1 >= n {
            return Err(MpsError::CutOutOfRange { cut, max: n - 1 });
        }
        self.move_center(cut);
        let stacked = self.tensors[cut].fuse_left();
        Ok(crate::linalg::singular_values_checked(&stacked))
    }

    /// Von Neumann entropy (bits) across the cut between `cut` and `cut + 1`.
    pub fn entanglement_entropy(&mut self, cut: usize) -> Result<T, MpsError> {
        let svals = self.schmidt_values(cut)?;
        Ok(entropy_from_singular_values(&svals))
    }

    /// Entropies across every internal cut.
    pub fn entropies(&mut self) -> Vec<T> {
        (0..self.num_sites() - 1)
            .map(|cut| self.entanglement_entropy(cut).expect("valid cut"))
            .collect()
    }

    /// Maximum entropy over all cuts; 0 for a single site.
    pub fn max_entanglement(&mut self) -> T {
        if self.num_sites() < 2 {
            return T::zero();
        }
        self.entropies()
            .into_iter()
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Full statevector contraction, little-endian basis order.
    pub fn to_statevector(&self) -> Result<DVector<Cplx<T>>, MpsError> {
        let n = self.num_sites();
        if n > STATEVECTOR_SITE_LIMIT {
            return Err(MpsError::TooManySites {
                n,
                limit: STATEVECTOR_SITE_LIMIT,
            });
        }
        // acc: (2^i basis states of sites 0..i) × right bond
        let mut acc = DMatrix::zeros(2, self.tensors[0].right_dim());
        acc.view_mut((0, 0), (1, acc.ncols()))
            .copy_from(&self.tensors[0].m[0]);
        acc.view_mut((1, 0), (1, acc.ncols()))
            .copy_from(&self.tensors[0].m[1]);
        for t in &self.tensors[1..] {
            let rows = acc.nrows();
            let mut next = DMatrix::zeros(rows * 2, t.right_dim());
            for s in 0..2 {
                next.view_mut((s * rows, 0), (rows, t.right_dim()))
                    .copy_from(&(&acc * &t.m[s]));
            }
            acc = next;
        }
        Ok(DVector::from_column_slice(acc.column(0).as_slice()))
    }

    /// `⟨ψ|P|ψ⟩` for a Hermitian Pauli string, by transfer contraction.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<T, MpsError> {
        let n = self.num_sites();
        if p.num_qubits() != n {
            return Err(MpsError::SizeMismatch {
                op: p.num_qubits(),
                state: n,
            });
        }
        let (sign, pos) = p.hermitian_parts()?;
        let mut env = DMatrix::from_element(1, 1, c_re(T::one()));
        for (i, t) in self.tensors.iter().enumerate() {
            let op = site_letter_matrix::<T>(pos.x_bit(i), pos.z_bit(i));
            let mut next = DMatrix::zeros(t.right_dim(), t.right_dim());
            for s_out in 0..2 {
                for s_in in 0..2 {
                    let w = op[(s_out, s_in)];
                    if w.norm_sqr() > T::zero() {
                        next += (t.m[s_out].adjoint() * &env * &t.m[s_in]) * w;
                    }
                }
            }
            env = next;
        }
        let val = env[(0, 0)] * c_re(T::of(sign as f64));
        Ok(val.re)
    }

    /// Contracts a matrix product operator into the state, then restores the
    /// canonical form with a full two-directional truncation sweep.
    pub fn apply_mpo(
        &mut self,
        op: &crate::mpo::Mpo<T>,
        renormalize: bool,
    ) -> Result<(), MpsError> {
        let n = self.num_sites();
        if op.num_sites() != n {
            return Err(MpsError::SizeMismatch {
                op: op.num_sites(),
                state: n,
            });
        }
        for i in 0..n {
            let w = op.tensor(i);
            let t = &self.tensors[i];
            let mut m = [DMatrix::zeros(0, 0), DMatrix::zeros(0, 0)];
            for (s_out, slot) in m.iter_mut().enumerate() {
                let mut acc: Option<DMatrix<Cplx<T>>> = None;
                for s_in in 0..2 {
                    let term = w.m[s_out][s_in].kronecker(&t.m[s_in]);
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a + term,
                    });
                }
                *slot = acc.expect("two physical states");
            }
            self.tensors[i] = SiteTensor { m };
        }
        self.recanonicalize(renormalize);
        Ok(())
    }

    /// Left-to-right orthonormalization followed by a right-to-left
    /// truncation sweep; ends with the center at site 0.
    pub(crate) fn recanonicalize(&mut self, renormalize: bool) {
        let n = self.num_sites();
        self.center = 0;
        for _ in 0..n - 1 {
            self.shift_center_right();
        }
        for i in (1..n).rev() {
            // Schmidt split across the bond (i-1, i).
            let stacked = self.tensors[i].fuse_right();
            let (u, svals, v_t) = crate::linalg::svd_checked(&stacked);
            let (kept, _) = truncation_rank(&svals, self.chi_max, self.svd_cutoff);
            let u = u.columns(0, kept).into_owned();
            let v_t = v_t.rows(0, kept).into_owned();
            self.tensors[i] = SiteTensor::unfuse_right(&v_t);
            let mut carry = u;
            for (mut c, s) in carry.column_iter_mut().zip(svals.iter()) {
                let f = c_re(*s);
                for x in c.iter_mut() {
                    *x *= f;
                }
            }
            for s in 0..2 {
                self.tensors[i - 1].m[s] = &self.tensors[i - 1].m[s] * &carry;
            }
            self.center = i - 1;
        }
        if renormalize {
            self.normalize();
        }
    }
}

/// Dense 2×2 letter for a site of a positive Pauli representative.
pub(crate) fn site_letter_matrix<T: Real>(x: bool, z: bool) -> DMatrix<Cplx<T>> {
    match (x, z) {
        (false, false) => crate::dense::identity_matrix(2),
        (true, false) => crate::dense::pauli_x(),
        (true, true) => crate::dense::pauli_y(),
        (false, true) => crate::dense::pauli_z(),
    }
}

fn check_gate<T: Real>(op: &DMatrix<Cplx<T>>, dim: usize) -> Result<(), MpsError> {
    if op.nrows() != dim || op.ncols() != dim {
        return Err(MpsError::BadGateShape {
            expected: dim,
            rows: op.nrows(),
            cols: op.ncols(),
        });
    }
    let tol = T::of(1e-10).max(T::default_epsilon() * T::of(64.0));
    let prod = op.adjoint() * op;
    let mut deviation = T::zero();
    for r in 0..dim {
        for c in 0..dim {
            let expect = if r == c { T::one() } else { T::zero() };
            let d = (prod[(r, c)] - c_re(expect)).norm_sqr().sqrt();
            if d > deviation {
                deviation = d;
            }
        }
    }
    if deviation > tol {
        return Err(MpsError::NonUnitaryGate {
            deviation: deviation.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Applies a 4×4 gate to a merged block without touching the MPS.
pub(crate) fn apply_gate_to_theta<T: Real>(
    theta: &DMatrix<Cplx<T>>,
    op: &DMatrix<Cplx<T>>,
    (dl, dr): (usize, usize),
) -> DMatrix<Cplx<T>> {
    let mut out = DMatrix::zeros(theta.nrows(), theta.ncols());
    for s_out in 0..2 {
        for t_out in 0..2 {
            let mut block = DMatrix::zeros(dl, dr);
            for s_in in 0..2 {
                for t_in in 0..2 {
                    let w = op[(s_out + 2 * t_out, s_in + 2 * t_in)];
                    if w.norm_sqr() > T::zero() {
                        block += theta.view((s_in * dl, t_in * dr), (dl, dr)) * w;
                    }
                }
            }
            out.view_mut((s_out * dl, t_out * dr), (dl, dr))
                .copy_from(&block);
        }
    }
    out
}

/// Keep/discard decision: singular values below the numerical-zero floor are
/// always dropped, then the smallest are discarded while the removed squared
/// weight stays within `cutoff` of the total, then the `chi_max` cap applies.
/// Returns `(kept, relative discarded weight)`.
pub(crate) fn truncation_rank<T: Real>(svals: &[T], chi_max: usize, cutoff: T) -> (usize, T) {
    let total: T = svals.iter().map(|s| *s * *s).fold(T::zero(), |a, b| a + b);
    if total == T::zero() {
        return (1.min(svals.len()), T::zero());
    }
    let zero_floor = svals[0] * T::default_epsilon() * T::of(100.0);
    let mut kept = svals.iter().filter(|s| **s > zero_floor).count().max(1);
    let budget = cutoff * total;
    let mut discarded: T = svals[kept..]
        .iter()
        .map(|s| *s * *s)
        .fold(T::zero(), |a, b| a + b);
    while kept > 1 {
        let next = svals[kept - 1] * svals[kept - 1];
        if discarded + next <= budget {
            discarded += next;
            kept -= 1;
        } else {
            break;
        }
    }
    while kept > chi_max {
        kept -= 1;
        discarded += svals[kept] * svals[kept];
    }
    (kept, discarded / total)
}

/// `-Σ p log₂ p` over the normalized squared spectrum, ignoring numerical
/// zeros below 1e-14.
pub(crate) fn entropy_from_singular_values<T: Real>(svals: &[T]) -> T {
    let total: T = svals.iter().map(|s| *s * *s).fold(T::zero(), |a, b| a + b);
    if total <= T::zero() {
        return T::zero();
    }
    let floor = T::of(1e-14);
    let mut e = T::zero();
    for s in svals {
        if *s > floor {
            let p = *s * *s / total;
            e -= p * p.log2();
        }
    }
    e
}
