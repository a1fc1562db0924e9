//! Signed N-qubit Pauli strings in the symplectic bit representation.
//!
//! A Pauli string is stored as two packed bit vectors (X and Z components)
//! plus a global power of the imaginary unit, so that the operator value is
//!
//! ```text
//!     P = i^phase · ∏_j X_j^{x_j} Z_j^{z_j}
//! ```
//!
//! with the per-site factors in canonical X-before-Z order. A `Y` on site `j`
//! is `x_j = z_j = 1` together with one extra factor of `i` (`Y = iXZ`).
//! Products and commutation checks reduce to word-parallel XORs and popcounts
//! over the packed words, which is what makes tableau composition and
//! Hamiltonian conjugation cheap.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::scalar::{Cplx, Real};

/// Largest qubit count for which dense `2^n`-dimensional oracles are allowed.
pub const DENSE_QUBIT_LIMIT: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum PauliError {
    #[error("qubit-count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("refusing dense representation for {n} qubits (limit {limit})")]
    TooManyQubits { n: usize, limit: usize },

    #[error("operator is not Hermitian (phase power {phase} with {y_count} Y factors)")]
    NonHermitian { phase: u8, y_count: usize },

    #[error("state vector is not normalized (|norm - 1| = {deviation:.3e})")]
    NotNormalized { deviation: f64 },

    #[error("state dimension {dim} is not 2^{n}")]
    DimensionMismatch { dim: usize, n: usize },

    #[error("expectation value has imaginary residue {residue:.3e}")]
    ImaginaryResidue { residue: f64 },

    #[error("cannot parse Pauli string from {0:?}")]
    Parse(String),

    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },
}

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// A signed Pauli operator on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// Exponent of the global `i` factor, mod 4.
    phase: u8,
}

const WORD_BITS: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

fn parity_of_and(a: &[u64], b: &[u64]) -> u8 {
    let mut acc = 0u64;
    for (wa, wb) in a.iter().zip(b) {
        acc ^= wa & wb;
    }
    (acc.count_ones() & 1) as u8
}

impl PauliString {
    /// The identity operator on `n` qubits.
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: vec![0; words_for(n)],
            z: vec![0; words_for(n)],
            phase: 0,
        }
    }

    /// A single-site Pauli embedded in `n` qubits.
    pub fn single(n: usize, site: usize, axis: PauliAxis) -> Result<Self, PauliError> {
        if site >= n {
            return Err(PauliError::SiteOutOfRange { site, n });
        }
        let mut p = Self::identity(n);
        match axis {
            PauliAxis::X => p.set_x(site, true),
            PauliAxis::Z => p.set_z(site, true),
            PauliAxis::Y => {
                p.set_x(site, true);
                p.set_z(site, true);
                p.phase = 1; // Y = i·XZ
            }
        }
        Ok(p)
    }

    /// Builds from explicit bit vectors; `phase` is the letter-product
    /// power of `i` (see [`Self::phase_power`]).
    pub fn from_bits(n: usize, x_bits: &[bool], z_bits: &[bool], phase: u8) -> Self {
        assert_eq!(x_bits.len(), n);
        assert_eq!(z_bits.len(), n);
        let mut p = Self::identity(n);
        for j in 0..n {
            p.set_x(j, x_bits[j]);
            p.set_z(j, z_bits[j]);
        }
        p.set_phase_power(phase);
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Power of the global `i` factor in front of the letter product
    /// `∏_j σ_j` with `σ ∈ {I,X,Y,Z}`, in `{0,1,2,3}`. The `i` hidden in each
    /// `Y = iXZ` is reduced away, so Hermitian strings report 0 or 2.
    pub fn phase_power(&self) -> u8 {
        ((self.phase as usize + 4 * self.n - self.y_count()) % 4) as u8
    }

    /// Raw exponent in the internal `i^k ∏ X^x Z^z` form.
    pub(crate) fn xz_phase(&self) -> u8 {
        self.phase
    }

    pub(crate) fn set_xz_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    pub(crate) fn add_xz_phase(&mut self, delta: u8) {
        self.phase = (self.phase + delta) & 3;
    }

    pub fn x_bit(&self, site: usize) -> bool {
        self.x[site / WORD_BITS] >> (site % WORD_BITS) & 1 == 1
    }

    pub fn z_bit(&self, site: usize) -> bool {
        self.z[site / WORD_BITS] >> (site % WORD_BITS) & 1 == 1
    }

    pub fn set_x(&mut self, site: usize, value: bool) {
        let (w, b) = (site / WORD_BITS, site % WORD_BITS);
        if value {
            self.x[w] |= 1 << b;
        } else {
            self.x[w] &= !(1 << b);
        }
    }

    pub fn set_z(&mut self, site: usize, value: bool) {
        let (w, b) = (site / WORD_BITS, site % WORD_BITS);
        if value {
            self.z[w] |= 1 << b;
        } else {
            self.z[w] &= !(1 << b);
        }
    }

    /// Sets the letter-product phase power (see [`Self::phase_power`]).
    /// Call after the bit pattern is final: the Y bookkeeping depends on it.
    pub fn set_phase_power(&mut self, phase: u8) {
        self.phase = ((phase as usize + self.y_count()) % 4) as u8;
    }

    /// Number of sites carrying `X`, `Y` or `Z`.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Number of sites carrying `Y` (i.e. both bits set).
    pub fn y_count(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// True when both bit vectors are empty (the operator is `i^phase · 1`).
    pub fn is_identity_bits(&self) -> bool {
        self.x.iter().all(|w| *w == 0) && self.z.iter().all(|w| *w == 0)
    }

    /// Hermitian iff the `i` power matches the Y-count parity.
    pub fn is_hermitian(&self) -> bool {
        (self.phase as usize + self.y_count()).is_multiple_of(2)
    }

    /// For a Hermitian string, the sign in front of the plain `⊗σ_j` product.
    pub fn hermitian_sign(&self) -> Result<i8, PauliError> {
        if !self.is_hermitian() {
            return Err(PauliError::NonHermitian {
                phase: self.phase,
                y_count: self.y_count(),
            });
        }
        Ok(if self.phase_power() == 0 { 1 } else { -1 })
    }

    /// Splits a Hermitian string into `(sign, positive representative)`, where
    /// the representative has sign +1 in front of its `⊗σ_j` product.
    pub fn hermitian_parts(&self) -> Result<(i8, PauliString), PauliError> {
        let sign = self.hermitian_sign()?;
        let mut pos = self.clone();
        pos.phase = (self.y_count() % 4) as u8;
        Ok((sign, pos))
    }

    /// Multiplies in front of the sign bit: `self ← i^2 · self`.
    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) & 3;
    }

    /// Exact group product `self · other` with full phase tracking.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        // Reordering Z^a X^b across each site costs (-1)^(a·b).
        let swap_parity = parity_of_and(&self.z, &other.x);
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        let phase = (self.phase + other.phase + 2 * swap_parity) & 3;
        Ok(PauliString {
            n: self.n,
            x,
            z,
            phase,
        })
    }

    /// True iff the operators commute (parity of the symplectic product).
    pub fn commutes_with(&self, other: &PauliString) -> Result<bool, PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let par = parity_of_and(&self.x, &other.z) ^ parity_of_and(&self.z, &other.x);
        Ok(par == 0)
    }

    /// Applies the operator to a dense statevector in `O(2^n)`.
    ///
    /// Basis ordering is little-endian: site 0 is the least significant bit of
    /// the basis index.
    pub fn apply<T: Real>(&self, v: &DVector<Cplx<T>>) -> Result<DVector<Cplx<T>>, PauliError> {
        let dim = 1usize
            .checked_shl(self.n as u32)
            .filter(|d| *d == v.len())
            .ok_or(PauliError::DimensionMismatch {
                dim: v.len(),
                n: self.n,
            })?;
        let factor = phase_factor::<T>(self.phase);
        let mut out = DVector::from_element(dim, Cplx::new(T::zero(), T::zero()));
        let x_mask = self.low_mask(&self.x);
        let z_mask = self.low_mask(&self.z);
        for b in 0..dim {
            // X^x Z^z |b> = (-1)^(z·b) |b ⊕ x>
            let sign_bit = ((b as u64 & z_mask).count_ones() & 1) as u8;
            let mut amp = factor * v[b];
            if sign_bit == 1 {
                amp = -amp;
            }
            out[b ^ x_mask as usize] = amp;
        }
        Ok(out)
    }

    /// Dense `2^n × 2^n` matrix including the `i^phase` factor.
    pub fn to_dense<T: Real>(&self) -> Result<DMatrix<Cplx<T>>, PauliError> {
        if self.n > DENSE_QUBIT_LIMIT {
            return Err(PauliError::TooManyQubits {
                n: self.n,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let dim = 1usize << self.n;
        let factor = phase_factor::<T>(self.phase);
        let x_mask = self.low_mask(&self.x);
        let z_mask = self.low_mask(&self.z);
        let mut m = DMatrix::from_element(dim, dim, Cplx::new(T::zero(), T::zero()));
        for b in 0..dim {
            let sign_bit = ((b as u64 & z_mask).count_ones() & 1) as u8;
            let mut amp = factor;
            if sign_bit == 1 {
                amp = -amp;
            }
            m[(b ^ x_mask as usize, b)] = amp;
        }
        Ok(m)
    }

    /// `⟨v|P|v⟩` for a Hermitian operator and a normalized statevector.
    pub fn expectation<T: Real>(&self, v: &DVector<Cplx<T>>) -> Result<T, PauliError> {
        if !self.is_hermitian() {
            return Err(PauliError::NonHermitian {
                phase: self.phase,
                y_count: self.y_count(),
            });
        }
        let norm = v.norm();
        let deviation = (norm - T::one()).abs();
        if deviation > T::of(1e-8) {
            return Err(PauliError::NotNormalized {
                deviation: deviation.to_f64_lossy(),
            });
        }
        let w = self.apply(v)?;
        let val = v.dotc(&w);
        if val.im.abs() > T::of(1e-10) {
            return Err(PauliError::ImaginaryResidue {
                residue: val.im.abs().to_f64_lossy(),
            });
        }
        Ok(val.re)
    }

    // Only valid when n fits in one word; guarded by the dense limit.
    fn low_mask(&self, words: &[u64]) -> u64 {
        debug_assert!(self.n <= WORD_BITS);
        words.first().copied().unwrap_or(0)
    }
}

pub(crate) fn phase_factor<T: Real>(phase: u8) -> Cplx<T> {
    match phase & 3 {
        0 => Cplx::new(T::one(), T::zero()),
        1 => Cplx::new(T::zero(), T::one()),
        2 => Cplx::new(-T::one(), T::zero()),
        _ => Cplx::new(T::zero(), -T::one()),
    }
}

impl fmt::Display for PauliString {
    /// Text form: sign prefix among `+`, `-`, `+i`, `-i`, then one of
    /// `I X Y Z` per site with site 0 leftmost, e.g. `-iYI`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.phase_power() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })?;
        for j in 0..self.n {
            f.write_str(match (self.x_bit(j), self.z_bit(j)) {
                (false, false) => "I",
                (true, false) => "X",
                (true, true) => "Y",
                (false, true) => "Z",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PauliError::Parse(s.to_string());
        let rest = s
            .strip_prefix("+i")
            .map(|r| (1u8, r))
            .or_else(|| s.strip_prefix("-i").map(|r| (3u8, r)))
            .or_else(|| s.strip_prefix('+').map(|r| (0u8, r)))
            .or_else(|| s.strip_prefix('-').map(|r| (2u8, r)))
            .unwrap_or((0, s));
        let (front, letters) = rest;
        if letters.is_empty() {
            return Err(err());
        }
        let n = letters.chars().count();
        let mut p = PauliString::identity(n);
        let mut y = 0u8;
        for (j, c) in letters.chars().enumerate() {
            match c {
                'I' => {}
                'X' => p.set_x(j, true),
                'Z' => p.set_z(j, true),
                'Y' => {
                    p.set_x(j, true);
                    p.set_z(j, true);
                    y = (y + 1) & 3;
                }
                _ => return Err(err()),
            }
        }
        p.phase = (front + y) & 3;
        Ok(p)
    }
}
