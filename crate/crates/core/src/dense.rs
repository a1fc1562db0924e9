//! Dense statevector machinery used as an independent reference path.
//!
//! Everything here scales exponentially and is guarded to small qubit counts;
//! the tensor-network and tableau code paths are validated against these
//! routines. Basis ordering is little-endian throughout: site 0 is the least
//! significant bit of the basis index, and a two-site gate on `(a, b)` uses
//! the pair index `bit(a) + 2·bit(b)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::scalar::{c_im, c_polar, c_re, Cplx, Real};

/// Kronecker product with the first factor on the most significant index.
pub fn kron<T: Real>(a: &DMatrix<Cplx<T>>, b: &DMatrix<Cplx<T>>) -> DMatrix<Cplx<T>> {
    a.kronecker(b)
}

pub fn identity_matrix<T: Real>(dim: usize) -> DMatrix<Cplx<T>> {
    DMatrix::identity(dim, dim)
}

pub fn hadamard<T: Real>() -> DMatrix<Cplx<T>> {
    let s = c_re(T::of(std::f64::consts::FRAC_1_SQRT_2));
    DMatrix::from_row_slice(2, 2, &[s, s, s, -s])
}

/// `diag(1, e^{i φ})`.
pub fn phase_gate<T: Real>(phi: T) -> DMatrix<Cplx<T>> {
    let zero = Cplx::new(T::zero(), T::zero());
    DMatrix::from_row_slice(2, 2, &[c_re(T::one()), zero, zero, c_polar(T::one(), phi)])
}

pub fn s_gate<T: Real>() -> DMatrix<Cplx<T>> {
    phase_gate(T::FRAC_PI_2())
}

pub fn sdg_gate<T: Real>() -> DMatrix<Cplx<T>> {
    phase_gate(-T::FRAC_PI_2())
}

pub fn t_gate<T: Real>() -> DMatrix<Cplx<T>> {
    phase_gate(T::FRAC_PI_4())
}

pub fn pauli_x<T: Real>() -> DMatrix<Cplx<T>> {
    let (o, z) = (c_re(T::one()), Cplx::new(T::zero(), T::zero()));
    DMatrix::from_row_slice(2, 2, &[z, o, o, z])
}

pub fn pauli_y<T: Real>() -> DMatrix<Cplx<T>> {
    let (i, z) = (c_im(T::one()), Cplx::new(T::zero(), T::zero()));
    DMatrix::from_row_slice(2, 2, &[z, -i, i, z])
}

pub fn pauli_z<T: Real>() -> DMatrix<Cplx<T>> {
    let (o, z) = (c_re(T::one()), Cplx::new(T::zero(), T::zero()));
    DMatrix::from_row_slice(2, 2, &[o, z, z, -o])
}

/// CNOT with the first pair slot as control, second as target.
pub fn cnot<T: Real>() -> DMatrix<Cplx<T>> {
    // Pair basis (b_ctrl + 2·b_tgt): |00>, |10>, |01>, |11>.
    let (o, z) = (c_re(T::one()), Cplx::new(T::zero(), T::zero()));
    DMatrix::from_row_slice(4, 4, &[o, z, z, z, z, z, z, o, z, z, o, z, z, o, z, z])
}

pub fn cz<T: Real>() -> DMatrix<Cplx<T>> {
    let (o, z) = (c_re(T::one()), Cplx::new(T::zero(), T::zero()));
    DMatrix::from_row_slice(4, 4, &[o, z, z, z, z, o, z, z, z, z, o, z, z, z, z, -o])
}

pub fn swap<T: Real>() -> DMatrix<Cplx<T>> {
    let (o, z) = (c_re(T::one()), Cplx::new(T::zero(), T::zero()));
    DMatrix::from_row_slice(4, 4, &[o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o])
}

/// `exp(i θ · XX)` as a two-site gate.
pub fn xx_rotation<T: Real>(theta: T) -> DMatrix<Cplx<T>> {
    let c = c_re(theta.cos());
    let is = c_im(theta.sin());
    let z = Cplx::new(T::zero(), T::zero());
    DMatrix::from_row_slice(4, 4, &[c, z, z, is, z, c, is, z, z, is, c, z, is, z, z, c])
}

/// `exp(i θ · Z)` as a one-site gate.
pub fn z_rotation<T: Real>(theta: T) -> DMatrix<Cplx<T>> {
    let z = Cplx::new(T::zero(), T::zero());
    DMatrix::from_row_slice(
        2,
        2,
        &[c_polar(T::one(), theta), z, z, c_polar(T::one(), -theta)],
    )
}

/// Basis state `|bits⟩` with `bits` interpreted little-endian.
pub fn basis_state<T: Real>(n: usize, bits: usize) -> DVector<Cplx<T>> {
    let mut v = DVector::from_element(1 << n, Cplx::new(T::zero(), T::zero()));
    v[bits] = c_re(T::one());
    v
}

/// Haar-ish random normalized state (Gaussian components).
pub fn random_state<T: Real, R: Rng>(n: usize, rng: &mut R) -> DVector<Cplx<T>> {
    let dim = 1usize << n;
    let mut v = DVector::from_fn(dim, |_, _| {
        Cplx::new(
            T::of(rng.random::<f64>() * 2.0 - 1.0),
            T::of(rng.random::<f64>() * 2.0 - 1.0),
        )
    });
    let norm = v.norm();
    v /= c_re(norm);
    v
}

/// Applies a 2×2 matrix to one site of a statevector.
pub fn apply_one_site<T: Real>(v: &mut DVector<Cplx<T>>, site: usize, op: &DMatrix<Cplx<T>>) {
    assert_eq!(op.nrows(), 2);
    let dim = v.len();
    let stride = 1usize << site;
    let mut b = 0;
    while b < dim {
        if b & stride == 0 {
            let (i0, i1) = (b, b | stride);
            let (a0, a1) = (v[i0], v[i1]);
            v[i0] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
            v[i1] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
        }
        b += 1;
    }
}

/// Applies a 4×4 matrix to two (not necessarily adjacent) sites.
///
/// The gate's pair index is `bit(a) + 2·bit(b)`.
pub fn apply_two_site<T: Real>(
    v: &mut DVector<Cplx<T>>,
    a: usize,
    b: usize,
    op: &DMatrix<Cplx<T>>,
) {
    assert_eq!(op.nrows(), 4);
    assert_ne!(a, b);
    let dim = v.len();
    let (ma, mb) = (1usize << a, 1usize << b);
    for base in 0..dim {
        if base & ma == 0 && base & mb == 0 {
            let idx = [base, base | ma, base | mb, base | ma | mb];
            let amps = [v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]];
            for r in 0..4 {
                let mut acc = Cplx::new(T::zero(), T::zero());
                for c in 0..4 {
                    acc += op[(r, c)] * amps[c];
                }
                v[idx[r]] = acc;
            }
        }
    }
}

/// `|⟨u|v⟩|²`.
pub fn fidelity<T: Real>(u: &DVector<Cplx<T>>, v: &DVector<Cplx<T>>) -> T {
    u.dotc(v).norm_sqr()
}

/// Von Neumann entropy (bits) of the reduced state of sites `0..=cut`.
pub fn entanglement_entropy<T: Real>(v: &DVector<Cplx<T>>, n: usize, cut: usize) -> T {
    assert!(cut + 1 < n, "cut must leave a nonempty right part");
    let dim_l = 1usize << (cut + 1);
    let dim_r = 1usize << (n - cut - 1);
    // M[l, r] = v[l + r·dim_l]; Schmidt values are its singular values.
    let m = DMatrix::from_fn(dim_l, dim_r, |l, r| v[l + r * dim_l]);
    let svals = crate::linalg::singular_values_checked(&m);
    let mut e = T::zero();
    for s in svals.iter() {
        if *s > T::of(1e-14) {
            let p = *s * *s;
            e -= p * p.log2();
        }
    }
    e
}

/// Largest single-cut entanglement entropy over all bipartitions.
pub fn max_entanglement_entropy<T: Real>(v: &DVector<Cplx<T>>, n: usize) -> T {
    let mut best = T::zero();
    for cut in 0..n - 1 {
        let e = entanglement_entropy(v, n, cut);
        if e > best {
            best = e;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn bell_state_entropy_is_one_bit() {
        let mut v = basis_state::<f64>(2, 0);
        apply_one_site(&mut v, 0, &hadamard());
        apply_two_site(&mut v, 0, 1, &cnot());
        let expected = DVector::from_vec(vec![
            C64::new(0.5f64.sqrt(), 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.5f64.sqrt(), 0.0),
        ]);
        assert!(fidelity(&v, &expected) > 1.0 - 1e-12);
        assert!((entanglement_entropy(&v, 2, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_site_gate_on_non_adjacent_pair() {
        // CNOT control site 2, target site 0 on |100> (bit 2 set).
        let mut v = basis_state::<f64>(3, 0b100);
        apply_two_site(&mut v, 2, 0, &cnot());
        assert!(fidelity(&v, &basis_state(3, 0b101)) > 1.0 - 1e-12);
    }

    #[test]
    fn xx_rotation_is_unitary() {
        let g = xx_rotation(0.37f64);
        let prod = g.adjoint() * &g;
        for (i, x) in prod.iter().enumerate() {
            let expect = if i % 5 == 0 { 1.0 } else { 0.0 };
            assert!((x - C64::new(expect, 0.0)).norm() < 1e-12);
        }
    }
}
