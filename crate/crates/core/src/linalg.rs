//! Verified thin SVD.
//!
//! The implicit-shift bidiagonal SVD can silently return inaccurate factors
//! on matrices with strongly clustered or repeated singular values — exactly
//! the spectra stabilizer states and direct-sum operators produce. Every
//! factorization here is probe-checked (reconstruction and orthonormality on
//! deterministic test vectors); on failure it is redone with a one-sided
//! complex Jacobi iteration, which is slower but backward stable without
//! caveats.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{c_re, Cplx, Real};

/// Thin SVD `(u, σ, vᵗ)` with σ sorted in decreasing order.
pub(crate) fn svd_checked<T: Real>(
    mat: &DMatrix<Cplx<T>>,
) -> (DMatrix<Cplx<T>>, Vec<T>, DMatrix<Cplx<T>>) {
    let svd = mat.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let svals: Vec<T> = svd.singular_values.as_slice().to_vec();
    if factors_pass_probe(mat, &u, &svals, &v_t) {
        (u, svals, v_t)
    } else {
        svd_jacobi(mat)
    }
}

/// Singular values only, by the same verified path.
pub(crate) fn singular_values_checked<T: Real>(mat: &DMatrix<Cplx<T>>) -> Vec<T> {
    svd_checked(mat).1
}

fn factors_pass_probe<T: Real>(
    mat: &DMatrix<Cplx<T>>,
    u: &DMatrix<Cplx<T>>,
    svals: &[T],
    v_t: &DMatrix<Cplx<T>>,
) -> bool {
    let scale = svals.first().copied().unwrap_or(T::zero());
    if scale == T::zero() {
        return mat.iter().all(|x| x.norm_sqr() == T::zero());
    }
    let tol = scale * T::default_epsilon() * T::of(1e4);
    let mut state = 0x5A17_u64;
    for _ in 0..2 {
        // Reconstruction: ‖M x - U Σ Vᵗ x‖ small for pseudo-random x.
        let x = probe_vector::<T>(mat.ncols(), &mut state);
        let want = mat * &x;
        let mut mid = v_t * &x;
        for (i, m) in mid.iter_mut().enumerate() {
            *m *= c_re(svals[i]);
        }
        let got = u * mid;
        if (want - got).norm() > tol * T::of(mat.ncols() as f64).sqrt() {
            return false;
        }
        // Orthonormality of both factors: U†U x = x, Vᵗ(Vᵗ)† y = y.
        let y = probe_vector::<T>(u.ncols(), &mut state);
        if (u.adjoint() * (u * &y) - &y).norm() > T::default_epsilon() * T::of(1e4) * y.norm() {
            return false;
        }
        let z = probe_vector::<T>(v_t.nrows(), &mut state);
        if (v_t * (v_t.adjoint() * &z) - &z).norm() > T::default_epsilon() * T::of(1e4) * z.norm() {
            return false;
        }
    }
    // Ordering is part of the contract.
    svals.windows(2).all(|w| w[0] >= w[1])
}

fn probe_vector<T: Real>(len: usize, state: &mut u64) -> DVector<Cplx<T>> {
    DVector::from_fn(len, |_, _| {
        let re = splitmix_unit(state);
        let im = splitmix_unit(state);
        Cplx::new(T::of(re), T::of(im))
    })
}

fn splitmix_unit(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// One-sided complex Jacobi SVD (thin), backward stable for any spectrum.
pub(crate) fn svd_jacobi<T: Real>(
    mat: &DMatrix<Cplx<T>>,
) -> (DMatrix<Cplx<T>>, Vec<T>, DMatrix<Cplx<T>>) {
    if mat.nrows() < mat.ncols() {
        // Work on the adjoint so the iteration runs over the short side.
        let (u, s, v_t) = svd_jacobi(&mat.adjoint());
        return (v_t.adjoint(), s, u.adjoint());
    }
    let (m, n) = mat.shape();
    let mut a = mat.clone();
    let mut v = DMatrix::<Cplx<T>>::identity(n, n);
    let eps = T::default_epsilon();
    let max_sweeps = 60;

    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let col_p = a.column(p);
                let col_q = a.column(q);
                let app = col_p.norm_squared();
                let aqq = col_q.norm_squared();
                let apq = col_p.dotc(&col_q);
                let off = apq.norm_sqr().sqrt();
                if off <= eps * (app * aqq).sqrt() || off == T::zero() {
                    continue;
                }
                rotated = true;
                // Phase removal makes the 2×2 Gram block real symmetric.
                let phase = apq / c_re(off);
                let tau = (aqq - app) / (off * T::of(2.0));
                let sign = if tau >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let t = sign / (tau.abs() + (T::one() + tau * tau).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = t * cs;

                let e_pos = phase; // e^{iα}
                let e_neg = phase.conj();
                for r in 0..m {
                    let up = a[(r, p)];
                    let uq = a[(r, q)];
                    a[(r, p)] = up * c_re(cs) - uq * e_neg * c_re(sn);
                    a[(r, q)] = up * e_pos * c_re(sn) + uq * c_re(cs);
                }
                for r in 0..n {
                    let vp = v[(r, p)];
                    let vq = v[(r, q)];
                    v[(r, p)] = vp * c_re(cs) - vq * e_neg * c_re(sn);
                    v[(r, q)] = vp * e_pos * c_re(sn) + vq * c_re(cs);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort decreasing.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<T> = (0..n).map(|k| a.column(k).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let mut u = DMatrix::<Cplx<T>>::zeros(m, n);
    let mut v_t = DMatrix::<Cplx<T>>::zeros(n, n);
    let mut svals = Vec::with_capacity(n);
    for (k, &src) in order.iter().enumerate() {
        let s = norms[src];
        svals.push(s);
        if s > T::zero() {
            let inv = c_re(T::one() / s);
            for r in 0..m {
                u[(r, k)] = a[(r, src)] * inv;
            }
        }
        for c in 0..n {
            v_t[(k, c)] = v[(c, src)].conj();
        }
    }
    (u, svals, v_t)
}
