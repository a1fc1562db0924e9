//! Enumeration of the two-qubit Clifford group (11 520 elements modulo global
//! phase) and of its 20 entanglement-distinct representatives.
//!
//! The table is built once, lazily, by breadth-first closure over the
//! generators `{H₀, H₁, S₀, S₁, CNOT₀₁}` and memoized behind a `OnceLock`.
//! Each element is keyed by the canonical form of its conjugation tableau
//! (the signed images of `X₀, Z₀, X₁, Z₁`), which identifies Cliffords up to
//! global phase. Element ids are assigned in canonical-key order so that the
//! numbering, the inverse map, and the representative list are identical
//! across runs and platforms.
//!
//! Multiplying on the left by a single-qubit Clifford pair `L₀⊗L₁` cannot
//! change how a gate entangles a product state, so gates in the same
//! left-multiplication orbit are interchangeable for disentangling searches.
//! There are `11 520 / (24·24) = 20` such orbits; `coset_representatives`
//! returns one deterministic member of each.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;

use crate::dense;
use crate::scalar::{Cplx, Real};

/// Index into the canonical enumeration of two-qubit Cliffords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoQubitCliffordId(pub u16);

/// Number of two-qubit Clifford unitaries modulo global phase.
pub const TWO_QUBIT_CLIFFORD_COUNT: usize = 11_520;

/// Number of single-qubit Clifford unitaries modulo global phase.
pub const SINGLE_QUBIT_CLIFFORD_COUNT: usize = 24;

/// Number of entanglement-distinct orbits under left-local multiplication.
pub const COSET_COUNT: usize = 20;

/// Compact signed two-qubit Pauli: two X bits, two Z bits, power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Pauli2 {
    pub x: u8,
    pub z: u8,
    pub phase: u8,
}

impl Pauli2 {
    pub(crate) const fn new(x: u8, z: u8, phase: u8) -> Self {
        Self {
            x: x & 3,
            z: z & 3,
            phase: phase & 3,
        }
    }

    pub(crate) const IDENTITY: Pauli2 = Pauli2 {
        x: 0,
        z: 0,
        phase: 0,
    };

    pub(crate) fn multiply(self, other: Pauli2) -> Pauli2 {
        let swap_parity = ((self.z & other.x).count_ones() & 1) as u8;
        Pauli2 {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: (self.phase + other.phase + 2 * swap_parity) & 3,
        }
    }

    fn y_count(self) -> u8 {
        (self.x & self.z).count_ones() as u8
    }

    /// 6-bit packing used for canonical keys.
    fn pack(self) -> u32 {
        (self.x as u32) | (self.z as u32) << 2 | (self.phase as u32) << 4
    }
}

/// Conjugation tableau of a two-qubit Clifford: images of `X₀, Z₀, X₁, Z₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Tab2 {
    pub imgs: [Pauli2; 4],
}

impl Tab2 {
    const IDENTITY: Tab2 = Tab2 {
        imgs: [
            Pauli2 {
                x: 1,
                z: 0,
                phase: 0,
            },
            Pauli2 {
                x: 0,
                z: 1,
                phase: 0,
            },
            Pauli2 {
                x: 2,
                z: 0,
                phase: 0,
            },
            Pauli2 {
                x: 0,
                z: 2,
                phase: 0,
            },
        ],
    };

    /// Image of an arbitrary signed Pauli under conjugation by this Clifford.
    pub(crate) fn conjugate(&self, p: Pauli2) -> Pauli2 {
        let mut acc = Pauli2 {
            x: 0,
            z: 0,
            phase: p.phase,
        };
        // Canonical factor order: X₀^x Z₀^z X₁^x Z₁^z.
        if p.x & 1 != 0 {
            acc = acc.multiply(self.imgs[0]);
        }
        if p.z & 1 != 0 {
            acc = acc.multiply(self.imgs[1]);
        }
        if p.x & 2 != 0 {
            acc = acc.multiply(self.imgs[2]);
        }
        if p.z & 2 != 0 {
            acc = acc.multiply(self.imgs[3]);
        }
        acc
    }

    /// Tableau of the product `self · other`.
    pub(crate) fn compose(&self, other: &Tab2) -> Tab2 {
        Tab2 {
            imgs: other.imgs.map(|img| self.conjugate(img)),
        }
    }

    /// Tableau of the inverse element.
    pub(crate) fn inverse(&self) -> Tab2 {
        // Symplectic part: S⁻¹ = Ω Sᵀ Ω with Ω the x↔z pairing.
        let coords = |p: Pauli2| -> [u8; 4] { [p.x & 1, p.z & 1, (p.x >> 1) & 1, (p.z >> 1) & 1] };
        let s: [[u8; 4]; 4] = self.imgs.map(coords);
        let omega = |i: usize| i ^ 1; // swaps (x_j, z_j) coordinate slots
        let mut inv_rows = [[0u8; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                inv_rows[i][j] = s[omega(j)][omega(i)];
            }
        }
        let mut imgs = [Pauli2::IDENTITY; 4];
        let generators = Tab2::IDENTITY.imgs;
        for (i, row) in inv_rows.iter().enumerate() {
            let mut cand = Pauli2::new(row[0] | row[2] << 1, row[1] | row[3] << 1, 0);
            cand.phase = cand.y_count() & 3; // Hermitian, sign +1
                                             // Fix the sign so that conjugating the candidate forward returns
                                             // the bare generator.
            let back = self.conjugate(cand);
            debug_assert_eq!((back.x, back.z), (generators[i].x, generators[i].z));
            if back.phase != generators[i].phase {
                cand.phase = (cand.phase + 2) & 3;
            }
            imgs[i] = cand;
        }
        Tab2 { imgs }
    }

    /// Canonical 24-bit key identifying the Clifford modulo global phase.
    pub(crate) fn key(&self) -> u32 {
        self.imgs
            .iter()
            .enumerate()
            .fold(0u32, |acc, (k, img)| acc | img.pack() << (6 * k))
    }
}

/// Generators used for the breadth-first closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Generator {
    H0,
    H1,
    S0,
    S1,
    Cnot01,
}

impl Generator {
    const ALL: [Generator; 5] = [
        Generator::H0,
        Generator::H1,
        Generator::S0,
        Generator::S1,
        Generator::Cnot01,
    ];

    fn tableau(self) -> Tab2 {
        let p = Pauli2::new;
        match self {
            // H: X→Z, Z→X on the acted slot.
            Generator::H0 => Tab2 {
                imgs: [p(0, 1, 0), p(1, 0, 0), p(2, 0, 0), p(0, 2, 0)],
            },
            Generator::H1 => Tab2 {
                imgs: [p(1, 0, 0), p(0, 1, 0), p(0, 2, 0), p(2, 0, 0)],
            },
            // S: X→Y, Z→Z.
            Generator::S0 => Tab2 {
                imgs: [p(1, 1, 1), p(0, 1, 0), p(2, 0, 0), p(0, 2, 0)],
            },
            Generator::S1 => Tab2 {
                imgs: [p(1, 0, 0), p(0, 1, 0), p(2, 2, 1), p(0, 2, 0)],
            },
            // CNOT control 0 → target 1: X₀→X₀X₁, Z₁→Z₀Z₁.
            Generator::Cnot01 => Tab2 {
                imgs: [p(3, 0, 0), p(0, 1, 0), p(2, 0, 0), p(0, 3, 0)],
            },
        }
    }

    fn dense<T: Real>(self) -> DMatrix<Cplx<T>> {
        match self {
            Generator::H0 => dense::kron(&dense::identity_matrix(2), &dense::hadamard()),
            Generator::H1 => dense::kron(&dense::hadamard(), &dense::identity_matrix(2)),
            Generator::S0 => dense::kron(&dense::identity_matrix(2), &dense::s_gate()),
            Generator::S1 => dense::kron(&dense::s_gate(), &dense::identity_matrix(2)),
            Generator::Cnot01 => dense::cnot(),
        }
    }
}

struct Entry {
    tab: Tab2,
    word: Vec<Generator>,
    inverse: u16,
}

/// The enumerated two-qubit Clifford group.
pub struct TwoQubitCliffordTable {
    entries: Vec<Entry>,
    cosets: Vec<TwoQubitCliffordId>,
}

impl TwoQubitCliffordTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Uniform draw over the whole group.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TwoQubitCliffordId {
        TwoQubitCliffordId(rng.random_range(0..self.entries.len() as u16))
    }

    /// One deterministic representative per left-local orbit (20 entries).
    pub fn coset_representatives(&self) -> &[TwoQubitCliffordId] {
        &self.cosets
    }

    pub fn inverse(&self, id: TwoQubitCliffordId) -> TwoQubitCliffordId {
        TwoQubitCliffordId(self.entries[id.0 as usize].inverse)
    }

    /// Dense 4×4 unitary (pair index `bit(slot0) + 2·bit(slot1)`), up to the
    /// global phase inherent in the tableau representation.
    pub fn dense_matrix<T: Real>(&self, id: TwoQubitCliffordId) -> DMatrix<Cplx<T>> {
        let mut u = dense::identity_matrix(4);
        for g in &self.entries[id.0 as usize].word {
            u = g.dense::<T>() * u;
        }
        u
    }

    pub(crate) fn tableau(&self, id: TwoQubitCliffordId) -> &Tab2 {
        &self.entries[id.0 as usize].tab
    }

    /// Entries are sorted by canonical key, so lookup is a binary search.
    #[cfg(test)]
    pub(crate) fn id_by_key(&self, key: u32) -> Option<TwoQubitCliffordId> {
        self.entries
            .binary_search_by_key(&key, |e| e.tab.key())
            .ok()
            .map(|i| TwoQubitCliffordId(i as u16))
    }
}

/// Returns the lazily built global table.
pub fn two_qubit_cliffords() -> &'static TwoQubitCliffordTable {
    static TABLE: OnceLock<TwoQubitCliffordTable> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

fn build_table() -> TwoQubitCliffordTable {
    // Breadth-first closure over the generators.
    let mut seen: HashMap<u32, (Tab2, Vec<Generator>)> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(Tab2::IDENTITY.key(), (Tab2::IDENTITY, Vec::new()));
    queue.push_back(Tab2::IDENTITY);
    while let Some(tab) = queue.pop_front() {
        let word = seen[&tab.key()].1.clone();
        for g in Generator::ALL {
            let next = g.tableau().compose(&tab);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(next.key()) {
                let mut next_word = word.clone();
                next_word.push(g);
                e.insert((next, next_word));
                queue.push_back(next);
            }
        }
    }
    assert_eq!(seen.len(), TWO_QUBIT_CLIFFORD_COUNT);

    // Canonical numbering: ascending key.
    let mut keys: Vec<u32> = seen.keys().copied().collect();
    keys.sort_unstable();
    let by_key: HashMap<u32, u16> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| (*k, i as u16))
        .collect();
    let mut entries: Vec<Entry> = keys
        .iter()
        .map(|k| {
            let (tab, word) = seen.remove(k).expect("key enumerated");
            Entry {
                tab,
                word,
                inverse: 0,
            }
        })
        .collect();
    for entry in &mut entries {
        let inv_key = entry.tab.inverse().key();
        entry.inverse = by_key[&inv_key];
    }

    // Left-local orbit representatives: the element whose canonical key is
    // minimal within its orbit under all 576 left single-qubit pairs.
    let locals = local_pairs();
    let mut reps: Vec<(u32, u16)> = Vec::new();
    for (i, entry) in entries.iter().enumerate() {
        let class_key = locals
            .iter()
            .map(|l| l.compose(&entry.tab).key())
            .min()
            .expect("nonempty local set");
        if class_key == entry.tab.key() {
            reps.push((class_key, i as u16));
        }
    }
    reps.sort_unstable();
    let cosets: Vec<TwoQubitCliffordId> = reps
        .into_iter()
        .map(|(_, i)| TwoQubitCliffordId(i))
        .collect();
    assert_eq!(cosets.len(), COSET_COUNT);

    TwoQubitCliffordTable { entries, cosets }
}

/// All 24 single-qubit Cliffords acting on one slot, as two-qubit tableaus.
fn single_qubit_closure(h: Generator, s: Generator) -> Vec<Tab2> {
    let mut seen: HashMap<u32, Tab2> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(Tab2::IDENTITY.key(), Tab2::IDENTITY);
    queue.push_back(Tab2::IDENTITY);
    while let Some(tab) = queue.pop_front() {
        for g in [h, s] {
            let next = g.tableau().compose(&tab);
            seen.entry(next.key()).or_insert_with(|| {
                queue.push_back(next);
                next
            });
        }
    }
    assert_eq!(seen.len(), SINGLE_QUBIT_CLIFFORD_COUNT);
    let mut out: Vec<(u32, Tab2)> = seen.into_iter().collect();
    out.sort_unstable_by_key(|(k, _)| *k);
    out.into_iter().map(|(_, t)| t).collect()
}

/// All 576 products `L₀ · L₁` of single-qubit Cliffords on the two slots.
fn local_pairs() -> Vec<Tab2> {
    let slot0 = single_qubit_closure(Generator::H0, Generator::S0);
    let slot1 = single_qubit_closure(Generator::H1, Generator::S1);
    let mut out = Vec::with_capacity(slot0.len() * slot1.len());
    for a in &slot0 {
        for b in &slot1 {
            out.push(a.compose(b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn group_order_is_11520() {
        assert_eq!(two_qubit_cliffords().len(), TWO_QUBIT_CLIFFORD_COUNT);
        assert_eq!(TWO_QUBIT_CLIFFORD_COUNT / (24 * 24), COSET_COUNT);
    }

    #[test]
    fn twenty_pairwise_inequivalent_representatives() {
        let table = two_qubit_cliffords();
        let reps = table.coset_representatives();
        assert_eq!(reps.len(), COSET_COUNT);
        // Brute force: no representative is a left-local multiple of another.
        let locals = local_pairs();
        for (i, a) in reps.iter().enumerate() {
            for b in reps.iter().skip(i + 1) {
                let tb_key = table.tableau(*b).key();
                for l in &locals {
                    assert_ne!(l.compose(table.tableau(*a)).key(), tb_key);
                }
            }
        }
    }

    #[test]
    fn representatives_cover_every_orbit() {
        let table = two_qubit_cliffords();
        let locals = local_pairs();
        // Every group element must be reachable from some representative.
        let mut covered = vec![false; table.len()];
        for rep in table.coset_representatives() {
            for l in &locals {
                let key = l.compose(table.tableau(*rep)).key();
                covered[table.id_by_key(key).unwrap().0 as usize] = true;
            }
        }
        assert!(covered.iter().all(|c| *c));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let table = two_qubit_cliffords();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let id = table.sample(&mut rng);
            let inv = table.inverse(id);
            let prod = table.tableau(id).compose(table.tableau(inv));
            assert_eq!(prod.key(), Tab2::IDENTITY.key());
        }
    }

    #[test]
    fn dense_matrices_are_unitary_and_match_tableau_conjugation() {
        let table = two_qubit_cliffords();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let paulis = [
            Pauli2::new(1, 0, 0), // X0
            Pauli2::new(0, 1, 0), // Z0
            Pauli2::new(2, 0, 0), // X1
            Pauli2::new(0, 2, 0), // Z1
            Pauli2::new(3, 1, 1), // i X0 Z0 X1 = Y0 X1
        ];
        for _ in 0..50 {
            let id = table.sample(&mut rng);
            let u = table.dense_matrix::<f64>(id);
            let uu = u.adjoint() * &u;
            for (k, v) in uu.iter().enumerate() {
                let expect = if k % 5 == 0 { 1.0 } else { 0.0 };
                assert!((v - C64::new(expect, 0.0)).norm() < 1e-12);
            }
            for p in paulis {
                let img = table.tableau(id).conjugate(p);
                let lhs = &u * pauli2_dense(p) * u.adjoint();
                let rhs = pauli2_dense(img);
                for (a, b) in lhs.iter().zip(rhs.iter()) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    fn pauli2_dense(p: Pauli2) -> DMatrix<C64> {
        use crate::pauli::PauliString;
        let mut ps = PauliString::identity(2);
        ps.set_x(0, p.x & 1 != 0);
        ps.set_x(1, p.x & 2 != 0);
        ps.set_z(0, p.z & 1 != 0);
        ps.set_z(1, p.z & 2 != 0);
        ps.set_xz_phase(p.phase);
        ps.to_dense().unwrap()
    }

    #[test]
    fn left_local_factors_do_not_change_entanglement() {
        // The defining property of the orbit quotient: for product states,
        // (L₀⊗L₁)·r entangles exactly as much as r.
        use crate::dense;
        let table = two_qubit_cliffords();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let rep = table.coset_representatives()
                [rng.random_range(0..table.coset_representatives().len())];
            let a = dense::random_state::<f64, _>(1, &mut rng);
            let b = dense::random_state::<f64, _>(1, &mut rng);
            let mut product = nalgebra::DVector::from_element(4, C64::new(0.0, 0.0));
            for (i, x) in product.iter_mut().enumerate() {
                *x = a[i & 1] * b[i >> 1];
            }
            let mut rotated = product.clone();
            dense::apply_two_site(&mut rotated, 0, 1, &table.dense_matrix::<f64>(rep));
            let base_ee = dense::entanglement_entropy(&rotated, 2, 0);

            // Random local pair from words over {H, S} on each slot.
            for site in 0..2 {
                for _ in 0..rng.random_range(1..6) {
                    let g = if rng.random() {
                        dense::hadamard()
                    } else {
                        dense::s_gate()
                    };
                    dense::apply_one_site(&mut rotated, site, &g);
                }
            }
            let local_ee = dense::entanglement_entropy(&rotated, 2, 0);
            assert!((base_ee - local_ee).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let table = two_qubit_cliffords();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..64).map(|_| table.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn sampling_is_uniform_by_chi_squared() {
        let table = two_qubit_cliffords();
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
        let draws = 1_000_000usize;
        let mut counts = vec![0u64; table.len()];
        for _ in 0..draws {
            counts[table.sample(&mut rng).0 as usize] += 1;
        }
        let expected = vec![1.0 / table.len() as f64; table.len()];
        let outcome = crate::analytics::chi_squared_test(&counts, &expected).unwrap();
        assert!(outcome.p_value > 0.001, "p = {}", outcome.p_value);
    }
}
