//! Ising-chain quench dynamics in CAMPS form.
//!
//! `H = J Σ X_i X_{i+1} + h_x Σ X_i + h_z Σ Z_i` is kept as a list of
//! weighted Pauli strings. The Clifford factor of the state conjugates the
//! Hamiltonian term by term (`H̃ = C†HC`, same term count), the conjugated
//! sum compiles to an MPO, and a projector-splitting TDVP sweep evolves the
//! tensor factor by `exp(-i H̃ dt)`. After a step the greedy disentangler may
//! rotate entanglement back out of the tensor network.
//!
//! Two integrator variants: the one-site sweep keeps bond dimensions fixed;
//! the two-site sweep grows them with truncation, which the product initial
//! state needs. Local exponentials use a Lanczos Krylov method with full
//! reorthogonalization.
//!
//! A matchgate estimate runs alongside on a plain MPS: back-propagating the
//! evolved state with `exp(+i H̄ t)`, where `H̄` is the `h_x = 0` part of the
//! Hamiltonian, realized as second-order Trotter slices of commuting `XX` and
//! `Z` families.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::camps::{CampsError, CampsState, DISENTANGLE_TOL};
use crate::dense;
use crate::magic::sre2_camps;
use crate::mpo::{Mpo, MpoError, MpoTensor};
use crate::mps::{CenterSide, Mps, MpsError, SiteState, SiteTensor};
use crate::pauli::{PauliAxis, PauliError, PauliString, DENSE_QUBIT_LIMIT};
use crate::records::TrajectoryRecord;
use crate::scalar::{c_exp, c_re, Cplx, Real};
use crate::tableau::{CliffordTableau, Direction, TableauError};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("time step must be positive, got {dt}")]
    InvalidTimeStep { dt: f64 },

    #[error("horizon {t_max} shorter than one step {dt}")]
    InvalidHorizon { t_max: f64, dt: f64 },

    #[error("system needs at least {needed} sites, got {n}")]
    TooFewSites { needed: usize, n: usize },

    #[error("Hamiltonian term is not Hermitian")]
    NonHermitianTerm,

    #[error("operator on {op} qubits applied to {target}")]
    SizeMismatch { op: usize, target: usize },

    #[error("refusing dense evolution for {n} qubits (limit {limit})")]
    TooManyQubits { n: usize, limit: usize },

    #[error("Krylov exponentiation failed to converge within {max_dim} vectors")]
    LanczosNoConvergence { max_dim: usize },

    #[error(transparent)]
    Mps(#[from] MpsError),

    #[error(transparent)]
    Mpo(#[from] MpoError),

    #[error(transparent)]
    Tableau(#[from] TableauError),

    #[error(transparent)]
    Camps(#[from] CampsError),

    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// A Hermitian operator as a real-weighted sum of Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSumHamiltonian<T: Real> {
    n: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Real> PauliSumHamiltonian<T> {
    pub fn new(n: usize, terms: Vec<(T, PauliString)>) -> Result<Self, DynamicsError> {
        for (_, p) in &terms {
            if p.num_qubits() != n {
                return Err(DynamicsError::SizeMismatch {
                    op: p.num_qubits(),
                    target: n,
                });
            }
            if !p.is_hermitian() {
                return Err(DynamicsError::NonHermitianTerm);
            }
        }
        Ok(Self { n, terms })
    }

    /// Open-boundary Ising chain: `J Σ X_i X_{i+1} + h_x Σ X_i + h_z Σ Z_i`,
    /// exactly `3n - 1` terms.
    pub fn ising(n: usize, j_coupling: T, h_x: T, h_z: T) -> Result<Self, DynamicsError> {
        if n < 2 {
            return Err(DynamicsError::TooFewSites { needed: 2, n });
        }
        let mut terms = Vec::with_capacity(3 * n - 1);
        for i in 0..n - 1 {
            let mut p = PauliString::identity(n);
            p.set_x(i, true);
            p.set_x(i + 1, true);
            terms.push((j_coupling, p));
        }
        for i in 0..n {
            terms.push((h_x, PauliString::single(n, i, PauliAxis::X)?));
        }
        for i in 0..n {
            terms.push((h_z, PauliString::single(n, i, PauliAxis::Z)?));
        }
        Ok(Self { n, terms })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    /// `C†HC`, term by term through the tableau; term count is preserved and
    /// coefficients pick up the conjugation signs.
    pub fn conjugated(&self, tableau: &CliffordTableau) -> Result<Self, DynamicsError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (coeff, p) in &self.terms {
            let image = tableau.conjugate(p, Direction::Backward)?;
            let (sign, positive) = image.hermitian_parts()?;
            terms.push((*coeff * T::of(sign as f64), positive));
        }
        Ok(Self { n: self.n, terms })
    }

    /// Direct-sum MPO: internal bond dimension equals the term count; callers
    /// may [`Mpo::compress`] when the structure allows it.
    pub fn to_mpo(&self) -> Result<Mpo<T>, DynamicsError> {
        Ok(Mpo::from_pauli_terms(self.n, &self.terms)?)
    }

    pub fn to_dense(&self) -> Result<DMatrix<Cplx<T>>, DynamicsError> {
        if self.n > DENSE_QUBIT_LIMIT {
            return Err(DynamicsError::TooManyQubits {
                n: self.n,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let dim = 1usize << self.n;
        let mut acc = DMatrix::zeros(dim, dim);
        for (coeff, p) in &self.terms {
            acc += p.to_dense::<T>()? * c_re(*coeff);
        }
        Ok(acc)
    }

    /// `H·v` without forming the dense matrix.
    pub fn apply_to_vec(&self, v: &DVector<Cplx<T>>) -> Result<DVector<Cplx<T>>, DynamicsError> {
        let mut acc = DVector::from_element(v.len(), Cplx::new(T::zero(), T::zero()));
        for (coeff, p) in &self.terms {
            acc += p.apply(v)? * c_re(*coeff);
        }
        Ok(acc)
    }

    /// Triangle-inequality bound on the spectral norm.
    fn norm_bound(&self) -> T {
        self.terms
            .iter()
            .map(|(c, _)| c.abs())
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Parameters of one quench experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchConfig {
    pub n: usize,
    pub j_coupling: f64,
    pub h_x: f64,
    pub h_z: f64,
    pub dt: f64,
    pub t_max: f64,
    pub chi_max: usize,
    pub svd_cutoff: f64,
    /// Run the disentangler every this many steps (0 disables it).
    pub disentangle_every: usize,
    /// Trotter slice for the matchgate back-propagation.
    pub trotter_dt: f64,
    pub variant: TdvpVariant,
    /// Fill the `backprop_ee` column of the records.
    pub track_backprop: bool,
}

impl QuenchConfig {
    /// Ising quench defaults: `J = 1`, `h_z = 0.5`, `dt = 0.05`, two-site
    /// integrator, disentangle after every step.
    pub fn ising_quench(n: usize, h_x: f64, t_max: f64) -> Self {
        Self {
            n,
            j_coupling: 1.0,
            h_x,
            h_z: 0.5,
            dt: 0.05,
            t_max,
            chi_max: 256,
            svd_cutoff: 1e-10,
            disentangle_every: 1,
            trotter_dt: 0.0125,
            variant: TdvpVariant::TwoSite,
            track_backprop: false,
        }
    }

    fn validate(&self) -> Result<usize, DynamicsError> {
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(DynamicsError::InvalidTimeStep { dt: self.dt });
        }
        if self.t_max < self.dt {
            return Err(DynamicsError::InvalidHorizon {
                t_max: self.t_max,
                dt: self.dt,
            });
        }
        Ok((self.t_max / self.dt).round() as usize)
    }

    fn hamiltonian<T: Real>(&self) -> Result<PauliSumHamiltonian<T>, DynamicsError> {
        PauliSumHamiltonian::ising(
            self.n,
            T::of(self.j_coupling),
            T::of(self.h_x),
            T::of(self.h_z),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdvpVariant {
    /// Fixed bond dimensions; exact projector splitting on the manifold.
    OneSite,
    /// Grows bonds through two-site blocks with truncation.
    TwoSite,
}

/// Tolerances of the local Krylov exponentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdvpOptions<T: Real> {
    pub variant: TdvpVariant,
    pub lanczos_tol: T,
    pub max_krylov: usize,
}

impl<T: Real> TdvpOptions<T> {
    pub fn new(variant: TdvpVariant) -> Self {
        Self {
            variant,
            lanczos_tol: T::of(1e-12),
            max_krylov: 48,
        }
    }
}

type Env<T> = Vec<DMatrix<Cplx<T>>>;

fn boundary_env<T: Real>() -> Env<T> {
    vec![DMatrix::from_element(1, 1, c_re(T::one()))]
}

/// Absorbs one site into a left environment.
fn advance_left<T: Real>(env: &Env<T>, w: &MpoTensor<T>, a: &SiteTensor<T>) -> Env<T> {
    let wr = w.m[0][0].ncols();
    let dr = a.m[0].ncols();
    let mut next: Env<T> = vec![DMatrix::zeros(dr, dr); wr];
    for (wl, e) in env.iter().enumerate() {
        for s_out in 0..2 {
            let bra = a.m[s_out].adjoint() * e;
            for s_in in 0..2 {
                let bra_ket = &bra * &a.m[s_in];
                for (wr_i, slot) in next.iter_mut().enumerate() {
                    let weight = w.m[s_out][s_in][(wl, wr_i)];
                    if weight.norm_sqr() > T::zero() {
                        *slot += &bra_ket * weight;
                    }
                }
            }
        }
    }
    next
}

/// Absorbs one site into a right environment.
fn advance_right<T: Real>(env: &Env<T>, w: &MpoTensor<T>, a: &SiteTensor<T>) -> Env<T> {
    let wl = w.m[0][0].nrows();
    let dl = a.m[0].nrows();
    let mut next: Env<T> = vec![DMatrix::zeros(dl, dl); wl];
    for (wr, e) in env.iter().enumerate() {
        for s_out in 0..2 {
            let bra = a.m[s_out].conjugate() * e;
            for s_in in 0..2 {
                let bra_ket = &bra * &a.m[s_in].transpose();
                for (wl_i, slot) in next.iter_mut().enumerate() {
                    let weight = w.m[s_out][s_in][(wl_i, wr)];
                    if weight.norm_sqr() > T::zero() {
                        *slot += &bra_ket * weight;
                    }
                }
            }
        }
    }
    next
}

/// One-site effective Hamiltonian action on `x[s] = dl × dr` blocks.
fn apply_h1<T: Real>(
    left: &Env<T>,
    w: &MpoTensor<T>,
    right: &Env<T>,
    x: &[DMatrix<Cplx<T>>; 2],
) -> [DMatrix<Cplx<T>>; 2] {
    let (dl, dr) = (x[0].nrows(), x[0].ncols());
    let mut y = [DMatrix::zeros(dl, dr), DMatrix::zeros(dl, dr)];
    for (wl, l) in left.iter().enumerate() {
        for (s_in, x_in) in x.iter().enumerate() {
            let lx = l * x_in;
            for (wr, r) in right.iter().enumerate() {
                let mut lxr: Option<DMatrix<Cplx<T>>> = None;
                for (s_out, slot) in y.iter_mut().enumerate() {
                    let weight = w.m[s_out][s_in][(wl, wr)];
                    if weight.norm_sqr() > T::zero() {
                        let prod = lxr.get_or_insert_with(|| &lx * r.transpose());
                        *slot += &*prod * weight;
                    }
                }
            }
        }
    }
    y
}

/// Zero-site (bond) effective Hamiltonian action.
fn apply_h0<T: Real>(left: &Env<T>, right: &Env<T>, x: &DMatrix<Cplx<T>>) -> DMatrix<Cplx<T>> {
    let mut y = DMatrix::zeros(x.nrows(), x.ncols());
    for (l, r) in left.iter().zip(right.iter()) {
        y += l * x * r.transpose();
    }
    y
}

/// Two-site effective Hamiltonian action on a merged `(2·dl) × (2·dr)` block.
fn apply_h2<T: Real>(
    left: &Env<T>,
    w_a: &MpoTensor<T>,
    w_b: &MpoTensor<T>,
    right: &Env<T>,
    theta: &DMatrix<Cplx<T>>,
) -> DMatrix<Cplx<T>> {
    let dl = theta.nrows() / 2;
    let dr = theta.ncols() / 2;
    let mid = w_a.m[0][0].ncols();
    let mut y = DMatrix::zeros(theta.nrows(), theta.ncols());
    // xR[s][t][wr] = x[s][t] · R[wr]^T, then contract the site-b operator,
    // then the site-a operator with the left environment.
    for (wr, r) in right.iter().enumerate() {
        let rt = r.transpose();
        for t_in in 0..2 {
            let mut xr: [Option<DMatrix<Cplx<T>>>; 2] = [None, None];
            for v in 0..mid {
                for t_out in 0..2 {
                    let weight_b = w_b.m[t_out][t_in][(v, wr)];
                    if weight_b.norm_sqr() == T::zero() {
                        continue;
                    }
                    for (s_in, slot) in xr.iter_mut().enumerate() {
                        let block = slot.get_or_insert_with(|| {
                            theta.view((s_in * dl, t_in * dr), (dl, dr)) * &rt
                        });
                        for (wl, l) in left.iter().enumerate() {
                            for s_out in 0..2 {
                                let weight_a = w_a.m[s_out][s_in][(wl, v)];
                                if weight_a.norm_sqr() == T::zero() {
                                    continue;
                                }
                                let contrib = l * &*block * (weight_a * weight_b);
                                let mut view = y.view_mut((s_out * dl, t_out * dr), (dl, dr));
                                view += contrib;
                            }
                        }
                    }
                }
            }
        }
    }
    y
}

/// `exp(coeff · A) v` for Hermitian `A` by a Lanczos Krylov expansion with
/// full reorthogonalization. `apply` must be the action of `A`.
fn lanczos_expm<T: Real, F>(
    apply: F,
    v0: &DVector<Cplx<T>>,
    coeff: Cplx<T>,
    tol: T,
    max_dim: usize,
) -> Result<DVector<Cplx<T>>, DynamicsError>
where
    F: Fn(&DVector<Cplx<T>>) -> DVector<Cplx<T>>,
{
    let norm0 = v0.norm();
    if norm0 == T::zero() {
        return Ok(v0.clone());
    }
    let dim_cap = max_dim.min(v0.len());
    let mut basis: Vec<DVector<Cplx<T>>> = vec![v0 / c_re(norm0)];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();

    for k in 0..dim_cap {
        let mut w = apply(&basis[k]);
        let alpha = basis[k].dotc(&w).re;
        alphas.push(alpha);
        w -= &basis[k] * c_re(alpha);
        if k > 0 {
            let b = betas[k - 1];
            w -= &basis[k - 1] * c_re(b);
        }
        // Full reorthogonalization keeps the tridiagonal model honest.
        for q in &basis {
            let overlap = q.dotc(&w);
            w -= q * overlap;
        }
        let beta = w.norm();

        let y = tridiag_expm(&alphas, &betas, coeff);
        let estimate_err = beta * y[y.len() - 1].norm_sqr().sqrt();
        // β ≈ 0 is a happy breakdown: the Krylov space is invariant and the
        // tridiagonal model is exact.
        if beta <= T::of(1e-14) || estimate_err < tol {
            let mut out = DVector::from_element(v0.len(), Cplx::new(T::zero(), T::zero()));
            for (q, c) in basis.iter().zip(y.iter()) {
                out += q * (*c * c_re(norm0));
            }
            return Ok(out);
        }
        if k + 1 == dim_cap {
            break;
        }
        betas.push(beta);
        basis.push(w / c_re(beta));
    }
    // Out of space without convergence: callers retry with a larger subspace.
    Err(DynamicsError::LanczosNoConvergence { max_dim })
}

/// `exp(coeff · Tri) e₁` for the real symmetric tridiagonal Krylov matrix.
fn tridiag_expm<T: Real>(alphas: &[T], betas: &[T], coeff: Cplx<T>) -> DVector<Cplx<T>> {
    let k = alphas.len();
    let mut tri = DMatrix::zeros(k, k);
    for i in 0..k {
        tri[(i, i)] = alphas[i];
        if i + 1 < k {
            tri[(i, i + 1)] = betas[i];
            tri[(i + 1, i)] = betas[i];
        }
    }
    let eig = tri.symmetric_eigen();
    let mut y = DVector::from_element(k, Cplx::new(T::zero(), T::zero()));
    for m in 0..k {
        let lambda = eig.eigenvalues[m];
        let phase = c_exp(coeff * c_re(lambda));
        let head = c_re(eig.eigenvectors[(0, m)]);
        for j in 0..k {
            y[j] += c_re(eig.eigenvectors[(j, m)]) * phase * head;
        }
    }
    y
}

fn expm_local<T: Real, F>(
    apply: F,
    v: &DVector<Cplx<T>>,
    coeff: Cplx<T>,
    opts: &TdvpOptions<T>,
) -> Result<DVector<Cplx<T>>, DynamicsError>
where
    F: Fn(&DVector<Cplx<T>>) -> DVector<Cplx<T>> + Copy,
{
    match lanczos_expm(apply, v, coeff, opts.lanczos_tol, opts.max_krylov) {
        Err(DynamicsError::LanczosNoConvergence { .. }) => {
            lanczos_expm(apply, v, coeff, opts.lanczos_tol, opts.max_krylov * 2)
        }
        other => other,
    }
}

fn pack2<T: Real>(mats: &[DMatrix<Cplx<T>>; 2]) -> DVector<Cplx<T>> {
    let len = mats[0].len() + mats[1].len();
    let mut v = DVector::from_element(len, Cplx::new(T::zero(), T::zero()));
    v.as_mut_slice()[..mats[0].len()].copy_from_slice(mats[0].as_slice());
    v.as_mut_slice()[mats[0].len()..].copy_from_slice(mats[1].as_slice());
    v
}

fn unpack2<T: Real>(v: &DVector<Cplx<T>>, dl: usize, dr: usize) -> [DMatrix<Cplx<T>>; 2] {
    let half = dl * dr;
    [
        DMatrix::from_column_slice(dl, dr, &v.as_slice()[..half]),
        DMatrix::from_column_slice(dl, dr, &v.as_slice()[half..]),
    ]
}

/// One full TDVP step `exp(-i H dt)` (forward + backward half-sweeps).
pub fn tdvp_step<T: Real>(
    mps: &mut Mps<T>,
    op: &Mpo<T>,
    dt: T,
    opts: &TdvpOptions<T>,
) -> Result<(), DynamicsError> {
    let n = mps.num_sites();
    if op.num_sites() != n {
        return Err(DynamicsError::SizeMismatch {
            op: op.num_sites(),
            target: n,
        });
    }
    if n < 2 && opts.variant == TdvpVariant::TwoSite {
        return Err(DynamicsError::TooFewSites { needed: 2, n });
    }
    let half = Cplx::new(T::zero(), -dt * T::of(0.5));
    let anti_half = Cplx::new(T::zero(), dt * T::of(0.5));
    mps.move_center(0);

    // Right environments for every suffix; renvs[i] covers sites i..n.
    let mut renvs: Vec<Env<T>> = vec![boundary_env(); n + 1];
    for i in (1..=n - 1).rev() {
        renvs[i] = advance_right(&renvs[i + 1], op.tensor(i), mps.tensor(i));
    }
    let mut lenvs: Vec<Env<T>> = vec![boundary_env(); n + 1];

    match opts.variant {
        TdvpVariant::TwoSite => {
            // Forward half-sweep.
            for i in 0..n - 1 {
                let (dl, dr) = mps.theta_dims(i);
                let theta = mps.two_site_theta(i);
                let flat = DVector::from_column_slice(theta.as_slice());
                let apply = |x: &DVector<Cplx<T>>| {
                    let xm = DMatrix::from_column_slice(2 * dl, 2 * dr, x.as_slice());
                    let ym = apply_h2(
                        &lenvs[i],
                        op.tensor(i),
                        op.tensor(i + 1),
                        &renvs[i + 2],
                        &xm,
                    );
                    DVector::from_column_slice(ym.as_slice())
                };
                let evolved = expm_local(apply, &flat, half, opts)?;
                let theta = DMatrix::from_column_slice(2 * dl, 2 * dr, evolved.as_slice());
                mps.split_theta(i, &theta, CenterSide::Right, true);
                lenvs[i + 1] = advance_left(&lenvs[i], op.tensor(i), mps.tensor(i));
                if i < n - 2 {
                    let t = mps.tensor(i + 1);
                    let (sl, sr) = (t.m[0].nrows(), t.m[0].ncols());
                    let flat = pack2(&t.m);
                    let apply = |x: &DVector<Cplx<T>>| {
                        let xm = unpack2(x, sl, sr);
                        let ym = apply_h1(&lenvs[i + 1], op.tensor(i + 1), &renvs[i + 2], &xm);
                        pack2(&ym)
                    };
                    let back = expm_local(apply, &flat, anti_half, opts)?;
                    mps.tensor_mut(i + 1).m = unpack2(&back, sl, sr);
                }
            }
            // Backward half-sweep.
            for i in (0..n - 1).rev() {
                let (dl, dr) = mps.theta_dims(i);
                let theta = mps.two_site_theta(i);
                let flat = DVector::from_column_slice(theta.as_slice());
                let apply = |x: &DVector<Cplx<T>>| {
                    let xm = DMatrix::from_column_slice(2 * dl, 2 * dr, x.as_slice());
                    let ym = apply_h2(
                        &lenvs[i],
                        op.tensor(i),
                        op.tensor(i + 1),
                        &renvs[i + 2],
                        &xm,
                    );
                    DVector::from_column_slice(ym.as_slice())
                };
                let evolved = expm_local(apply, &flat, half, opts)?;
                let theta = DMatrix::from_column_slice(2 * dl, 2 * dr, evolved.as_slice());
                mps.split_theta(i, &theta, CenterSide::Left, true);
                renvs[i + 1] = advance_right(&renvs[i + 2], op.tensor(i + 1), mps.tensor(i + 1));
                if i > 0 {
                    let t = mps.tensor(i);
                    let (sl, sr) = (t.m[0].nrows(), t.m[0].ncols());
                    let flat = pack2(&t.m);
                    let apply = |x: &DVector<Cplx<T>>| {
                        let xm = unpack2(x, sl, sr);
                        let ym = apply_h1(&lenvs[i], op.tensor(i), &renvs[i + 1], &xm);
                        pack2(&ym)
                    };
                    let back = expm_local(apply, &flat, anti_half, opts)?;
                    mps.tensor_mut(i).m = unpack2(&back, sl, sr);
                }
            }
        }
        TdvpVariant::OneSite => {
            // Forward half-sweep.
            for i in 0..n {
                evolve_one_site(mps, op, &lenvs[i], &renvs[i + 1], i, half, opts)?;
                if i < n - 1 {
                    let carry = mps.extract_center_matrix_right();
                    lenvs[i + 1] = advance_left(&lenvs[i], op.tensor(i), mps.tensor(i));
                    let flat = DVector::from_column_slice(carry.as_slice());
                    let apply = |x: &DVector<Cplx<T>>| {
                        let xm =
                            DMatrix::from_column_slice(carry.nrows(), carry.ncols(), x.as_slice());
                        let ym = apply_h0(&lenvs[i + 1], &renvs[i + 1], &xm);
                        DVector::from_column_slice(ym.as_slice())
                    };
                    let evolved = expm_local(apply, &flat, anti_half, opts)?;
                    let cm = DMatrix::from_column_slice(
                        carry.nrows(),
                        carry.ncols(),
                        evolved.as_slice(),
                    );
                    mps.absorb_from_left(i + 1, &cm);
                    mps.set_center(i + 1);
                }
            }
            // Backward half-sweep.
            for i in (0..n).rev() {
                evolve_one_site(mps, op, &lenvs[i], &renvs[i + 1], i, half, opts)?;
                if i > 0 {
                    let carry = mps.extract_center_matrix_left();
                    renvs[i] = advance_right(&renvs[i + 1], op.tensor(i), mps.tensor(i));
                    let flat = DVector::from_column_slice(carry.as_slice());
                    let apply = |x: &DVector<Cplx<T>>| {
                        let xm =
                            DMatrix::from_column_slice(carry.nrows(), carry.ncols(), x.as_slice());
                        let ym = apply_h0(&lenvs[i], &renvs[i], &xm);
                        DVector::from_column_slice(ym.as_slice())
                    };
                    let evolved = expm_local(apply, &flat, anti_half, opts)?;
                    let cm = DMatrix::from_column_slice(
                        carry.nrows(),
                        carry.ncols(),
                        evolved.as_slice(),
                    );
                    mps.absorb_from_right(i - 1, &cm);
                    mps.set_center(i - 1);
                }
            }
        }
    }
    mps.normalize();
    Ok(())
}

fn evolve_one_site<T: Real>(
    mps: &mut Mps<T>,
    op: &Mpo<T>,
    left: &Env<T>,
    right: &Env<T>,
    i: usize,
    coeff: Cplx<T>,
    opts: &TdvpOptions<T>,
) -> Result<(), DynamicsError> {
    let t = mps.tensor(i);
    let (sl, sr) = (t.m[0].nrows(), t.m[0].ncols());
    let flat = pack2(&t.m);
    let apply = |x: &DVector<Cplx<T>>| {
        let xm = unpack2(x, sl, sr);
        let ym = apply_h1(left, op.tensor(i), right, &xm);
        pack2(&ym)
    };
    let evolved = expm_local(apply, &flat, coeff, opts)?;
    mps.tensor_mut(i).m = unpack2(&evolved, sl, sr);
    Ok(())
}

/// `exp(-i H t) v` by repeated Krylov steps; dense-oracle path.
pub fn exact_evolve<T: Real>(
    v: &DVector<Cplx<T>>,
    h: &PauliSumHamiltonian<T>,
    t: T,
) -> Result<DVector<Cplx<T>>, DynamicsError> {
    if h.n > DENSE_QUBIT_LIMIT {
        return Err(DynamicsError::TooManyQubits {
            n: h.n,
            limit: DENSE_QUBIT_LIMIT,
        });
    }
    if t == T::zero() {
        return Ok(v.clone());
    }
    // Keep each Krylov step's accuracy comfortable: ~5 units of ‖H‖·dt.
    let steps = (t.abs() * h.norm_bound() / T::of(5.0))
        .ceil()
        .to_f64_lossy()
        .max(1.0) as usize;
    let dt = t / T::of(steps as f64);
    let mut state = v.clone();
    for _ in 0..steps {
        let apply = |x: &DVector<Cplx<T>>| h.apply_to_vec(x).expect("matching sizes");
        state = match lanczos_expm(apply, &state, Cplx::new(T::zero(), -dt), T::of(1e-12), 64) {
            Err(DynamicsError::LanczosNoConvergence { .. }) => {
                lanczos_expm(apply, &state, Cplx::new(T::zero(), -dt), T::of(1e-12), 128)?
            }
            other => other?,
        };
    }
    Ok(state)
}

/// One recorded point of the matchgate back-propagation estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackpropPoint {
    pub time: f64,
    pub ee_raw: f64,
    pub ee_backprop: f64,
}

/// Applies second-order Trotterized `exp(+i H̄ t)` (the `h_x = 0` part of the
/// Ising chain) to a copy of the state and reports the residual entropy.
fn backprop_max_ee<T: Real>(
    mps: &Mps<T>,
    cfg: &QuenchConfig,
    t: f64,
) -> Result<f64, DynamicsError> {
    let mut copy = mps.clone();
    if t > 0.0 {
        let slices = (t / cfg.trotter_dt).round().max(1.0) as usize;
        let tau = T::of(t / slices as f64);
        let half_z = dense::z_rotation(T::of(cfg.h_z) * tau * T::of(0.5));
        let xx = dense::xx_rotation(T::of(cfg.j_coupling) * tau);
        for _ in 0..slices {
            for site in 0..cfg.n {
                copy.apply_one_site_gate(site, &half_z)?;
            }
            for site in 0..cfg.n - 1 {
                copy.apply_two_site_gate(site, &xx)?;
            }
            for site in 0..cfg.n {
                copy.apply_one_site_gate(site, &half_z)?;
            }
        }
    }
    Ok(copy.max_entanglement().to_f64_lossy())
}

/// Evolves a plain MPS (no Clifford factor) under the full Hamiltonian and
/// reports raw versus back-propagated entropies at every step.
pub fn matchgate_backprop_ee(cfg: &QuenchConfig) -> Result<Vec<BackpropPoint>, DynamicsError> {
    let steps = cfg.validate()?;
    let h = cfg.hamiltonian::<f64>()?;
    let mut mpo = h.to_mpo()?;
    mpo.compress(1e-12);
    let mut mps = Mps::<f64>::product_state(
        &vec![SiteState::y_plus(); cfg.n],
        cfg.chi_max,
        cfg.svd_cutoff,
    )?;
    let opts = TdvpOptions::new(cfg.variant);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(BackpropPoint {
        time: 0.0,
        ee_raw: 0.0,
        ee_backprop: backprop_max_ee(&mps, cfg, 0.0)?,
    });
    for step in 1..=steps {
        let t = step as f64 * cfg.dt;
        tdvp_step(&mut mps, &mpo, cfg.dt, &opts)?;
        out.push(BackpropPoint {
            time: t,
            ee_raw: mps.max_entanglement(),
            ee_backprop: backprop_max_ee(&mps, cfg, t)?,
        });
    }
    Ok(out)
}

/// Full quench output: per-step records plus the data the validation suites
/// compare against dense references.
#[derive(Debug)]
pub struct QuenchOutput<T: Real> {
    pub records: Vec<TrajectoryRecord>,
    /// `(t, ⟨H⟩)` along the trajectory, measured on the CAMPS branch.
    pub energies: Vec<(f64, f64)>,
    pub final_camps: CampsState<T>,
    pub final_plain: Mps<T>,
}

/// Quench from `|y+⟩^⊗n` in CAMPS form, with a plain-MPS reference branch.
///
/// Per step: re-conjugate the Hamiltonian through the current Clifford,
/// rebuild its MPO, TDVP-evolve the tensor factor, optionally disentangle,
/// and record entropies, bonds and the stabilizer-entropy density.
pub fn evolve_camps<T: Real>(cfg: &QuenchConfig) -> Result<QuenchOutput<T>, DynamicsError> {
    let steps = cfg.validate()?;
    if cfg.n < 2 {
        return Err(DynamicsError::TooFewSites {
            needed: 2,
            n: cfg.n,
        });
    }
    let h = cfg.hamiltonian::<T>()?;
    let opts = TdvpOptions::<T>::new(cfg.variant);

    let sites = vec![SiteState::<T>::y_plus(); cfg.n];
    let start = Mps::product_state(&sites, cfg.chi_max, T::of(cfg.svd_cutoff))?;
    let mut camps = if cfg.n <= DENSE_QUBIT_LIMIT {
        CampsState::with_history(start.clone())
    } else {
        CampsState::new(start.clone())
    };
    let mut plain = start;
    let mut plain_mpo = h.to_mpo()?;
    plain_mpo.compress(T::of(1e-12));

    let mut conjugated_mpo = plain_mpo.clone();
    let mut tableau_dirty = false;

    let mut records = Vec::with_capacity(steps + 1);
    let mut energies = Vec::with_capacity(steps + 1);
    let e0 = conjugated_mpo.expectation(camps.mps())?.re.to_f64_lossy();
    energies.push((0.0, e0));
    records.push(TrajectoryRecord {
        instance: 0,
        step: 0,
        time: Some(0.0),
        max_ee_mps: 0.0,
        max_ee_state: Some(0.0),
        sre_density: sre2_camps(&camps)
            .ok()
            .map(|r| r.value.to_f64_lossy() / cfg.n as f64),
        max_bond: 1,
        sweeps: None,
        backprop_ee: if cfg.track_backprop { Some(0.0) } else { None },
    });

    for step in 1..=steps {
        let t = step as f64 * cfg.dt;
        if tableau_dirty {
            let conjugated = h.conjugated(camps.tableau())?;
            conjugated_mpo = conjugated.to_mpo()?;
            tableau_dirty = false;
        }
        tdvp_step(camps.mps_mut(), &conjugated_mpo, T::of(cfg.dt), &opts)?;
        // Same physical state before and after disentangling: measure the
        // energy with the operator that was just applied.
        let energy = conjugated_mpo.expectation(camps.mps())?.re.to_f64_lossy();
        energies.push((t, energy));

        let sweeps = if cfg.disentangle_every > 0 && step % cfg.disentangle_every == 0 {
            let report = camps.greedy_disentangle(T::of(DISENTANGLE_TOL))?;
            if !report.gates_accepted.is_empty() {
                tableau_dirty = true;
            }
            Some(report.sweeps_used)
        } else {
            None
        };

        tdvp_step(&mut plain, &plain_mpo, T::of(cfg.dt), &opts)?;

        let backprop_ee = if cfg.track_backprop {
            // The estimate runs on the plain branch: matchgates do not stay
            // matchgates under Clifford conjugation.
            Some(backprop_f64(&plain, cfg, t)?)
        } else {
            None
        };
        records.push(TrajectoryRecord {
            instance: 0,
            step,
            time: Some(t),
            max_ee_mps: camps.max_entanglement().to_f64_lossy(),
            max_ee_state: Some(plain.max_entanglement().to_f64_lossy()),
            sre_density: sre2_camps(&camps)
                .ok()
                .map(|r| r.value.to_f64_lossy() / cfg.n as f64),
            max_bond: camps.mps().max_bond_dim(),
            sweeps,
            backprop_ee,
        });
    }
    Ok(QuenchOutput {
        records,
        energies,
        final_camps: camps,
        final_plain: plain,
    })
}

fn backprop_f64<T: Real>(plain: &Mps<T>, cfg: &QuenchConfig, t: f64) -> Result<f64, DynamicsError> {
    backprop_max_ee(plain, cfg, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::Gate;
    use nalgebra::DVector;
    use num_complex::Complex64 as C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn y_plus_vec(n: usize) -> DVector<C64> {
        let mut v = DVector::from_element(1 << n, C64::new(1.0, 0.0));
        let h = C64::new(0.5f64.sqrt(), 0.0);
        let ih = C64::new(0.0, 0.5f64.sqrt());
        for (b, x) in v.iter_mut().enumerate() {
            let mut amp = C64::new(1.0, 0.0);
            for site in 0..n {
                amp *= if b >> site & 1 == 1 { ih } else { h };
            }
            *x = amp;
        }
        v
    }

    #[test]
    fn ising_terms_for_two_sites() {
        let h = PauliSumHamiltonian::<f64>::ising(2, 1.0, 0.3, 0.5).unwrap();
        let rendered: Vec<(f64, String)> =
            h.terms().iter().map(|(c, p)| (*c, p.to_string())).collect();
        assert_eq!(
            rendered,
            vec![
                (1.0, "+XX".into()),
                (0.3, "+XI".into()),
                (0.3, "+IX".into()),
                (0.5, "+ZI".into()),
                (0.5, "+IZ".into()),
            ]
        );
    }

    #[test]
    fn ising_term_count() {
        let h = PauliSumHamiltonian::<f64>::ising(16, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(h.terms().len(), 47);
    }

    #[test]
    fn ising_dense_matches_kron_sum() {
        let h = PauliSumHamiltonian::<f64>::ising(3, 1.0, 0.3, 0.5).unwrap();
        let dense = h.to_dense().unwrap();
        let mut expected = DMatrix::<C64>::zeros(8, 8);
        for (c, p) in h.terms() {
            expected += p.to_dense::<f64>().unwrap() * C64::new(*c, 0.0);
        }
        for (a, b) in dense.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugation_by_identity_is_trivial() {
        let h = PauliSumHamiltonian::<f64>::ising(3, 1.0, 0.3, 0.5).unwrap();
        let tab = CliffordTableau::identity(3);
        assert_eq!(h.conjugated(&tab).unwrap(), h);
    }

    #[test]
    fn conjugation_by_hadamard_swaps_x_and_z() {
        let h = PauliSumHamiltonian::<f64>::ising(2, 1.0, 0.3, 0.5).unwrap();
        let mut tab = CliffordTableau::identity(2);
        tab.left_mul_gate(&Gate::H(0)).unwrap();
        let conj = h.conjugated(&tab).unwrap();
        let rendered: Vec<(f64, String)> = conj
            .terms()
            .iter()
            .map(|(c, p)| (*c, p.to_string()))
            .collect();
        assert_eq!(
            rendered,
            vec![
                (1.0, "+ZX".into()),
                (0.3, "+ZI".into()),
                (0.3, "+IX".into()),
                (0.5, "+XI".into()),
                (0.5, "+IZ".into()),
            ]
        );
    }

    #[test]
    fn conjugation_matches_dense_and_preserves_spectrum() {
        let n = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = PauliSumHamiltonian::<f64>::ising(n, 1.0, 0.3, 0.5).unwrap();
        let mut tab = CliffordTableau::identity(n);
        let mut word = Vec::new();
        for _ in 0..30 {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let id = crate::two_qubit_cliffords().sample(&mut rng);
            let g = Gate::TwoQubit(id, a, b);
            tab.left_mul_gate(&g).unwrap();
            word.push(g);
        }
        let conj = h.conjugated(&tab).unwrap();
        assert_eq!(conj.terms().len(), h.terms().len());

        // Dense oracle: C†HC from the same gate word.
        let dim = 1usize << n;
        let mut u = DMatrix::<C64>::identity(dim, dim);
        for g in &word {
            let mut m = DMatrix::<C64>::zeros(dim, dim);
            for col in 0..dim {
                let mut v = DVector::<C64>::zeros(dim);
                v[col] = C64::new(1.0, 0.0);
                let (a, b) = g.sites();
                crate::dense::apply_two_site(&mut v, a, b.unwrap(), &g.dense_matrix::<f64>());
                m.set_column(col, &v);
            }
            u = m * u;
        }
        let want = u.adjoint() * h.to_dense().unwrap() * &u;
        let got = conj.to_dense().unwrap();
        for (a, b) in got.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-9);
        }

        // Eigenvalue multiset is preserved.
        let mut ev_h: Vec<f64> = h
            .to_dense()
            .unwrap()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        let mut ev_c: Vec<f64> = got.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev_h.sort_by(f64::total_cmp);
        ev_c.sort_by(f64::total_cmp);
        for (a, b) in ev_h.iter().zip(ev_c.iter()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn mpo_bond_dimensions_and_compression() {
        let n = 8;
        let h = PauliSumHamiltonian::<f64>::ising(n, 1.0, 0.3, 0.5).unwrap();
        let raw = h.to_mpo().unwrap();
        assert!(raw.max_bond_dim() <= 3 * n);
        assert_eq!(raw.max_bond_dim(), 3 * n - 1);
        let mut compressed = raw.clone();
        compressed.compress(1e-12);
        // Nearest-neighbor structure compresses to a small ladder.
        assert!(
            compressed.max_bond_dim() <= 4,
            "{}",
            compressed.max_bond_dim()
        );
    }

    #[test]
    fn mpo_action_on_y_plus_matches_dense() {
        let n = 4;
        let h = PauliSumHamiltonian::<f64>::ising(n, 1.0, 0.3, 0.5).unwrap();
        let mut mpo = h.to_mpo().unwrap();
        mpo.compress(1e-12);
        let mut mps = Mps::<f64>::product_state(&vec![SiteState::y_plus(); n], 64, 0.0).unwrap();
        mps.apply_mpo(&mpo, false).unwrap();
        let got = mps.to_statevector().unwrap();
        let want = h.to_dense().unwrap() * y_plus_vec(n);
        for (a, b) in got.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn energy_of_y_plus_is_zero() {
        for n in [2usize, 4, 7] {
            let h = PauliSumHamiltonian::<f64>::ising(n, 1.3, 0.7, 0.5).unwrap();
            let v = y_plus_vec(n);
            let hv = h.apply_to_vec(&v).unwrap();
            assert!(v.dotc(&hv).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn exact_evolve_basics() {
        let n = 3;
        let h = PauliSumHamiltonian::<f64>::ising(n, 1.0, 0.3, 0.5).unwrap();
        let v = y_plus_vec(n);
        let same = exact_evolve(&v, &h, 0.0).unwrap();
        assert!(crate::dense::fidelity(&v, &same) > 1.0 - 1e-14);

        let w = exact_evolve(&v, &h, 1.3).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-10);

        // Semigroup property.
        let a = exact_evolve(&exact_evolve(&v, &h, 0.7).unwrap(), &h, 0.6).unwrap();
        for (x, y) in a.iter().zip(w.iter()) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn tdvp_is_idle_under_zero_hamiltonian() {
        let n = 4;
        let zero =
            PauliSumHamiltonian::<f64>::new(n, vec![(0.0, PauliString::identity(n))]).unwrap();
        let mpo = zero.to_mpo().unwrap();
        let mut mps = Mps::<f64>::product_state(&vec![SiteState::y_plus(); n], 16, 1e-12).unwrap();
        let before = mps.to_statevector().unwrap();
        for variant in [TdvpVariant::TwoSite, TdvpVariant::OneSite] {
            tdvp_step(&mut mps, &mpo, 0.05, &TdvpOptions::new(variant)).unwrap();
        }
        let after = mps.to_statevector().unwrap();
        assert!(crate::dense::fidelity(&before, &after) > 1.0 - 1e-12);
    }

    #[test]
    fn two_site_tdvp_tracks_exact_evolution() {
        let n = 5;
        let h = PauliSumHamiltonian::<f64>::ising(n, 1.0, 0.3, 0.5).unwrap();
        let mpo = h.to_mpo().unwrap();
        let mut mps =
            Mps::<f64>::product_state(&vec![SiteState::y_plus(); n], 1 << (n / 2), 0.0).unwrap();
        let opts = TdvpOptions::new(TdvpVariant::TwoSite);
        let steps = 10;
        let dt = 0.05;
        for _ in 0..steps {
            tdvp_step(&mut mps, &mpo, dt, &opts).unwrap();
        }
        let got = mps.to_statevector().unwrap();
        let want = exact_evolve(&y_plus_vec(n), &h, steps as f64 * dt).unwrap();
        assert!(
            crate::dense::fidelity(&got, &want) > 1.0 - 1e-6,
            "fidelity {}",
            crate::dense::fidelity(&got, &want)
        );
    }

    #[test]
    fn one_site_tdvp_tracks_exact_evolution_at_full_rank() {
        let n = 4;
        let h = PauliSumHamiltonian::<f64>::ising(n, 1.0, 0.3, 0.5).unwrap();
        let mpo = h.to_mpo().unwrap();
        let mut mps = Mps::<f64>::product_state(&vec![SiteState::y_plus(); n], 4, 0.0).unwrap();
        // Saturate the bonds first; then the one-site projector is trivial.
        let grow = TdvpOptions::new(TdvpVariant::TwoSite);
        for _ in 0..4 {
            tdvp_step(&mut mps, &mpo, 0.05, &grow).unwrap();
        }
        assert_eq!(mps.bond_dims(), vec![2, 4, 2]);
        let start = mps.to_statevector().unwrap();
        let one = TdvpOptions::new(TdvpVariant::OneSite);
        let steps = 10;
        for _ in 0..steps {
            tdvp_step(&mut mps, &mpo, 0.05, &one).unwrap();
        }
        let got = mps.to_statevector().unwrap();
        let want = exact_evolve(&start, &h, steps as f64 * 0.05).unwrap();
        let fidelity = crate::dense::fidelity(&got, &want);
        assert!(fidelity > 1.0 - 1e-8, "fidelity {fidelity}");
    }

    #[test]
    fn one_site_tdvp_preserves_bond_dimensions() {
        let n = 5;
        let h = PauliSumHamiltonian::<f64>::ising(n, 1.0, 0.3, 0.5).unwrap();
        let mpo = h.to_mpo().unwrap();
        let mut mps = Mps::<f64>::product_state(&vec![SiteState::y_plus(); n], 16, 0.0).unwrap();
        // Grow bonds first with a couple of two-site steps.
        let grow = TdvpOptions::new(TdvpVariant::TwoSite);
        tdvp_step(&mut mps, &mpo, 0.05, &grow).unwrap();
        let bonds = mps.bond_dims();
        let one = TdvpOptions::new(TdvpVariant::OneSite);
        tdvp_step(&mut mps, &mpo, 0.05, &one).unwrap();
        assert_eq!(mps.bond_dims(), bonds);
        assert!((mps.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn quench_records_start_clean_and_grow_entropy() {
        let mut cfg = QuenchConfig::ising_quench(6, 0.3, 0.25);
        cfg.chi_max = 8;
        let out = evolve_camps::<f64>(&cfg).unwrap();
        assert_eq!(out.records.len(), 6);
        let first = &out.records[0];
        assert_eq!(first.step, 0);
        assert_eq!(first.max_ee_mps, 0.0);
        assert!(first.sre_density.unwrap().abs() < 1e-12);
        assert!((out.energies[0].1).abs() < 1e-12);
        // After the first step the tensor factor is not fully disentangled.
        assert!(out.records[1].max_ee_mps > 1e-8);
        // The disentangler may lag the bare state by a small margin while its
        // accumulated Clifford goes stale, but never catastrophically.
        for r in &out.records[1..] {
            assert!(r.max_ee_mps <= r.max_ee_state.unwrap() + 0.1);
        }
    }

    #[test]
    fn backprop_is_trotter_converged() {
        // Halving the slice changes the reported entropies by less than 1e-3.
        let mut coarse_cfg = QuenchConfig::ising_quench(5, 0.3, 0.5);
        coarse_cfg.chi_max = 8;
        coarse_cfg.trotter_dt = 0.025;
        let mut fine_cfg = coarse_cfg.clone();
        fine_cfg.trotter_dt = 0.0125;
        let coarse = matchgate_backprop_ee(&coarse_cfg).unwrap();
        let fine = matchgate_backprop_ee(&fine_cfg).unwrap();
        for (a, b) in coarse.iter().zip(fine.iter()) {
            assert!(
                (a.ee_backprop - b.ee_backprop).abs() < 1e-3,
                "t = {}",
                a.time
            );
        }
    }

    #[test]
    fn physical_entropy_is_representation_independent() {
        // max EE of C·|mps⟩ equals that of the plain branch.
        let mut cfg = QuenchConfig::ising_quench(5, 0.3, 0.3);
        cfg.chi_max = 8;
        let out = evolve_camps::<f64>(&cfg).unwrap();
        let physical = out.final_camps.statevector().unwrap();
        let dense_ee = crate::dense::max_entanglement_entropy(&physical, 5);
        let mut plain = out.final_plain;
        let plain_ee = plain.max_entanglement();
        assert!(
            (dense_ee - plain_ee).abs() < 1e-3,
            "{dense_ee} vs {plain_ee}"
        );
    }

    #[test]
    fn single_precision_quench_step_runs() {
        let h = PauliSumHamiltonian::<f32>::ising(3, 1.0, 0.3, 0.5).unwrap();
        let mpo = h.to_mpo().unwrap();
        let mut mps = Mps::<f32>::product_state(&[SiteState::y_plus(); 3], 4, 1e-6).unwrap();
        let mut opts = TdvpOptions::<f32>::new(TdvpVariant::TwoSite);
        opts.lanczos_tol = 1e-6;
        tdvp_step(&mut mps, &mpo, 0.05, &opts).unwrap();
        assert!((mps.norm() - 1.0).abs() < 1e-4);
        let e = mpo.expectation(&mps).unwrap();
        assert!(e.re.abs() < 1e-3);
    }

    #[test]
    fn backprop_inverts_integrable_evolution() {
        let mut cfg = QuenchConfig::ising_quench(5, 0.0, 0.5);
        cfg.chi_max = 8;
        cfg.trotter_dt = 0.005;
        let points = matchgate_backprop_ee(&cfg).unwrap();
        assert_eq!(points.len(), 11);
        for p in &points {
            assert!(p.ee_backprop <= 1e-4, "t = {}: {}", p.time, p.ee_backprop);
        }
        // The raw state does entangle meanwhile.
        assert!(points.last().unwrap().ee_raw > 0.01);
    }
}
