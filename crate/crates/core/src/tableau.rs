//! Clifford unitaries on `n` qubits as conjugation tableaus.
//!
//! A tableau stores the signed Pauli images `C X_j C†` and `C Z_j C†` for
//! every site, together with the images under the inverse conjugation
//! `C† X_j C`, `C† Z_j C`. Holding both directions makes Pauli transport
//! through the Clifford an `O(n)` lookup either way while keeping gate
//! composition (on the left *or* the right) an `O(n)` update; neither
//! direction ever requires a tableau inversion.
//!
//! Gates compose through their local conjugation action: a one- or two-site
//! gate rewrites the involved sites of each stored image, and rewrites the
//! stored images of the involved generators as products of the others. Exact
//! `i^k` phase bookkeeping comes from [`PauliString`].

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

use crate::dense;
use crate::pauli::{PauliAxis, PauliError, PauliString};
use crate::scalar::{Cplx, Real};
use crate::two_qubit_clifford::{two_qubit_cliffords, Pauli2, Tab2, TwoQubitCliffordId};

#[derive(Debug, Error, PartialEq)]
pub enum TableauError {
    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("two-qubit gate needs distinct sites, got {site} twice")]
    RepeatedSite { site: usize },

    #[error("operation needs at least {needed} qubits, tableau has {n}")]
    TooFewQubits { needed: usize, n: usize },

    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// A named Clifford gate, or an element of the enumerated two-qubit group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
    TwoQubit(TwoQubitCliffordId, usize, usize),
}

/// Which way a Pauli is transported through the Clifford.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `P ↦ C P C†`
    Forward,
    /// `P ↦ C† P C`
    Backward,
}

/// Local conjugation action of a gate, in the compact two-slot encoding.
#[derive(Clone, Copy)]
pub(crate) enum GateAction {
    One(usize, Tab2),
    Two(usize, usize, Tab2),
}

fn pauli1_tab(x_img: Pauli2, z_img: Pauli2) -> Tab2 {
    Tab2 {
        imgs: [x_img, z_img, Pauli2::new(2, 0, 0), Pauli2::new(0, 2, 0)],
    }
}

impl Gate {
    pub fn sites(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(a) | Gate::S(a) | Gate::Sdg(a) | Gate::X(a) | Gate::Y(a) | Gate::Z(a) => {
                (a, None)
            }
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) | Gate::TwoQubit(_, a, b) => {
                (a, Some(b))
            }
        }
    }

    fn validate(&self, n: usize) -> Result<(), TableauError> {
        let (a, b) = self.sites();
        if a >= n {
            return Err(TableauError::SiteOutOfRange { site: a, n });
        }
        if let Some(b) = b {
            if b >= n {
                return Err(TableauError::SiteOutOfRange { site: b, n });
            }
            if a == b {
                return Err(TableauError::RepeatedSite { site: a });
            }
        }
        Ok(())
    }

    /// The inverse gate.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(a) => Gate::Sdg(a),
            Gate::Sdg(a) => Gate::S(a),
            Gate::TwoQubit(id, a, b) => Gate::TwoQubit(two_qubit_cliffords().inverse(id), a, b),
            g => g,
        }
    }

    pub(crate) fn action(&self) -> GateAction {
        let p = Pauli2::new;
        match *self {
            Gate::H(a) => GateAction::One(a, pauli1_tab(p(0, 1, 0), p(1, 0, 0))),
            Gate::S(a) => GateAction::One(a, pauli1_tab(p(1, 1, 1), p(0, 1, 0))),
            Gate::Sdg(a) => GateAction::One(a, pauli1_tab(p(1, 1, 3), p(0, 1, 0))),
            Gate::X(a) => GateAction::One(a, pauli1_tab(p(1, 0, 0), p(0, 1, 2))),
            Gate::Y(a) => GateAction::One(a, pauli1_tab(p(1, 0, 2), p(0, 1, 2))),
            Gate::Z(a) => GateAction::One(a, pauli1_tab(p(1, 0, 2), p(0, 1, 0))),
            Gate::Cnot(a, b) => GateAction::Two(
                a,
                b,
                Tab2 {
                    imgs: [p(3, 0, 0), p(0, 1, 0), p(2, 0, 0), p(0, 3, 0)],
                },
            ),
            Gate::Cz(a, b) => GateAction::Two(
                a,
                b,
                Tab2 {
                    imgs: [p(1, 2, 0), p(0, 1, 0), p(2, 1, 0), p(0, 2, 0)],
                },
            ),
            Gate::Swap(a, b) => GateAction::Two(
                a,
                b,
                Tab2 {
                    imgs: [p(2, 0, 0), p(0, 2, 0), p(1, 0, 0), p(0, 1, 0)],
                },
            ),
            Gate::TwoQubit(id, a, b) => GateAction::Two(a, b, *two_qubit_cliffords().tableau(id)),
        }
    }

    /// Dense unitary of the gate on its local sites, first listed site on the
    /// least significant pair bit. Enumerated two-qubit gates carry the
    /// arbitrary-but-fixed global phase of their generator word.
    pub fn dense_matrix<T: Real>(&self) -> DMatrix<Cplx<T>> {
        match *self {
            Gate::H(_) => dense::hadamard(),
            Gate::S(_) => dense::s_gate(),
            Gate::Sdg(_) => dense::sdg_gate(),
            Gate::X(_) => {
                let mut p = PauliString::identity(1);
                p.set_x(0, true);
                p.to_dense().expect("1 qubit")
            }
            Gate::Y(_) => PauliString::single(1, 0, PauliAxis::Y)
                .unwrap()
                .to_dense()
                .unwrap(),
            Gate::Z(_) => PauliString::single(1, 0, PauliAxis::Z)
                .unwrap()
                .to_dense()
                .unwrap(),
            Gate::Cnot(..) => dense::cnot(),
            Gate::Cz(..) => dense::cz(),
            Gate::Swap(..) => dense::swap(),
            Gate::TwoQubit(id, ..) => two_qubit_cliffords().dense_matrix(id),
        }
    }
}

/// Conjugation tableau of a Clifford unitary on `n` qubits.
#[derive(Clone, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
    inv_x_images: Vec<PauliString>,
    inv_z_images: Vec<PauliString>,
}

impl CliffordTableau {
    /// The identity Clifford on `n ≥ 1` qubits.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "tableau needs at least one qubit");
        let xs: Vec<_> = (0..n)
            .map(|j| PauliString::single(n, j, PauliAxis::X).unwrap())
            .collect();
        let zs: Vec<_> = (0..n)
            .map(|j| PauliString::single(n, j, PauliAxis::Z).unwrap())
            .collect();
        Self {
            n,
            x_images: xs.clone(),
            z_images: zs.clone(),
            inv_x_images: xs,
            inv_z_images: zs,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn x_image(&self, j: usize) -> &PauliString {
        &self.x_images[j]
    }

    pub fn z_image(&self, j: usize) -> &PauliString {
        &self.z_images[j]
    }

    /// Transports a Pauli through the Clifford in either direction.
    pub fn conjugate(&self, p: &PauliString, dir: Direction) -> Result<PauliString, TableauError> {
        if p.num_qubits() != self.n {
            return Err(PauliError::SizeMismatch {
                left: p.num_qubits(),
                right: self.n,
            }
            .into());
        }
        let (xs, zs) = match dir {
            Direction::Forward => (&self.x_images, &self.z_images),
            Direction::Backward => (&self.inv_x_images, &self.inv_z_images),
        };
        Ok(expand_in_images(p, xs, zs))
    }

    /// Composes on the left: `C ← V · C`.
    pub fn left_mul_gate(&mut self, gate: &Gate) -> Result<(), TableauError> {
        gate.validate(self.n)?;
        let action = gate.action();
        let inv_action = gate.inverse().action();
        // Forward images conjugate locally by V.
        for img in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            conjugate_sites_in_place(img, &action);
        }
        // Inverse images of the touched generators become products of the
        // previous ones: (VC)† P (VC) = C† (V† P V) C.
        let mut updates = Vec::with_capacity(4);
        let (a, b) = gate.sites();
        for site in [Some(a), b].into_iter().flatten() {
            for axis in [PauliAxis::X, PauliAxis::Z] {
                let mut base = PauliString::single(self.n, site, axis).unwrap();
                conjugate_sites_in_place(&mut base, &inv_action);
                let img = expand_in_images(&base, &self.inv_x_images, &self.inv_z_images);
                updates.push((site, axis, img));
            }
        }
        for (site, axis, img) in updates {
            match axis {
                PauliAxis::X => self.inv_x_images[site] = img,
                PauliAxis::Z => self.inv_z_images[site] = img,
                PauliAxis::Y => unreachable!(),
            }
        }
        Ok(())
    }

    /// Composes on the right: `C ← C · W`.
    pub fn right_mul_gate(&mut self, gate: &Gate) -> Result<(), TableauError> {
        gate.validate(self.n)?;
        let action = gate.action();
        let inv_action = gate.inverse().action();
        // Forward images of the touched generators: (CW) P (CW)† expands
        // W P W† over the previous forward images.
        let mut updates = Vec::with_capacity(4);
        let (a, b) = gate.sites();
        for site in [Some(a), b].into_iter().flatten() {
            for axis in [PauliAxis::X, PauliAxis::Z] {
                let mut base = PauliString::single(self.n, site, axis).unwrap();
                conjugate_sites_in_place(&mut base, &action);
                let img = expand_in_images(&base, &self.x_images, &self.z_images);
                updates.push((site, axis, img));
            }
        }
        for (site, axis, img) in updates {
            match axis {
                PauliAxis::X => self.x_images[site] = img,
                PauliAxis::Z => self.z_images[site] = img,
                PauliAxis::Y => unreachable!(),
            }
        }
        // Inverse images conjugate locally by W†.
        for img in self
            .inv_x_images
            .iter_mut()
            .chain(self.inv_z_images.iter_mut())
        {
            conjugate_sites_in_place(img, &inv_action);
        }
        Ok(())
    }

    /// Composes a layer of `2n²` enumerated two-qubit Cliffords, each on a
    /// uniformly random unordered pair of distinct sites.
    pub fn apply_random_layer<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(), TableauError> {
        if self.n < 2 {
            return Err(TableauError::TooFewQubits {
                needed: 2,
                n: self.n,
            });
        }
        for gate in random_layer_gates(self.n, rng) {
            self.left_mul_gate(&gate)?;
        }
        Ok(())
    }

    /// Checks the symplectic commutation relations of both image sets.
    pub fn satisfies_commutation_relations(&self) -> bool {
        let check = |xs: &[PauliString], zs: &[PauliString]| -> bool {
            for j in 0..self.n {
                for k in 0..self.n {
                    let xx = xs[j].commutes_with(&xs[k]).unwrap();
                    let zz = zs[j].commutes_with(&zs[k]).unwrap();
                    let xz = xs[j].commutes_with(&zs[k]).unwrap();
                    if !xx || !zz || xz != (j != k) {
                        return false;
                    }
                }
            }
            true
        };
        check(&self.x_images, &self.z_images) && check(&self.inv_x_images, &self.inv_z_images)
    }

    /// Debug dump: `2n` lines of Pauli text, x images then z images.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for img in self.x_images.iter().chain(self.z_images.iter()) {
            out.push_str(&img.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CliffordTableau(n={})\n{}", self.n, self.dump())
    }
}

/// Draws the gate sequence of one deep random layer: `2n²` two-qubit
/// Cliffords, each uniform over the group and over unordered site pairs.
pub fn random_layer_gates<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Gate> {
    assert!(n >= 2);
    let table = two_qubit_cliffords();
    (0..2 * n * n)
        .map(|_| {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            Gate::TwoQubit(table.sample(rng), a.min(b), a.max(b))
        })
        .collect()
}

/// Rewrites the gate's sites of `p` under the local conjugation action,
/// leaving all other sites untouched.
pub(crate) fn conjugate_sites_in_place(p: &mut PauliString, action: &GateAction) {
    match *action {
        GateAction::One(a, tab) => {
            let local = Pauli2::new(p.x_bit(a) as u8, p.z_bit(a) as u8, 0);
            let img = tab.conjugate(local);
            p.set_x(a, img.x & 1 != 0);
            p.set_z(a, img.z & 1 != 0);
            p.add_xz_phase(img.phase);
        }
        GateAction::Two(a, b, tab) => {
            let local = Pauli2::new(
                p.x_bit(a) as u8 | (p.x_bit(b) as u8) << 1,
                p.z_bit(a) as u8 | (p.z_bit(b) as u8) << 1,
                0,
            );
            let img = tab.conjugate(local);
            p.set_x(a, img.x & 1 != 0);
            p.set_x(b, img.x & 2 != 0);
            p.set_z(a, img.z & 1 != 0);
            p.set_z(b, img.z & 2 != 0);
            p.add_xz_phase(img.phase);
        }
    }
}

/// Expands `P = i^k ∏_j X_j^{x_j} Z_j^{z_j}` over the given generator images,
/// multiplying in canonical order.
fn expand_in_images(p: &PauliString, xs: &[PauliString], zs: &[PauliString]) -> PauliString {
    let n = p.num_qubits();
    let mut acc = PauliString::identity(n);
    acc.set_xz_phase(p.xz_phase());
    for j in 0..n {
        if p.x_bit(j) {
            acc = acc.multiply(&xs[j]).expect("matching sizes");
        }
        if p.z_bit(j) {
            acc = acc.multiply(&zs[j]).expect("matching sizes");
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use num_complex::Complex64 as C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::dense::{apply_one_site, apply_two_site};

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn identity_tableau_images() {
        let tab = CliffordTableau::identity(3);
        assert_eq!(tab.x_image(0).to_string(), "+XII");
        assert_eq!(tab.x_image(2).to_string(), "+IIX");
        assert_eq!(tab.z_image(1).to_string(), "+IZI");
        assert!(tab.satisfies_commutation_relations());
    }

    #[test]
    fn identity_conjugation_is_trivial() {
        let tab = CliffordTableau::identity(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let q = random_pauli(4, &mut rng);
            assert_eq!(tab.conjugate(&q, Direction::Forward).unwrap(), q);
            assert_eq!(tab.conjugate(&q, Direction::Backward).unwrap(), q);
        }
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        let mut tab = CliffordTableau::identity(2);
        tab.left_mul_gate(&Gate::H(0)).unwrap();
        assert_eq!(tab.z_image(0), &p("XI"));
        assert_eq!(tab.x_image(0), &p("ZI"));
        assert_eq!(tab.x_image(1), &p("IX"));
    }

    #[test]
    fn cnot_spreads_x_from_control() {
        let mut tab = CliffordTableau::identity(2);
        tab.left_mul_gate(&Gate::Cnot(0, 1)).unwrap();
        assert_eq!(tab.x_image(0), &p("XX"));
        assert_eq!(tab.z_image(1), &p("ZZ"));
        assert_eq!(tab.x_image(1), &p("IX"));
        assert_eq!(tab.z_image(0), &p("ZI"));
    }

    #[test]
    fn s_gate_conjugation() {
        let mut tab = CliffordTableau::identity(1);
        tab.left_mul_gate(&Gate::S(0)).unwrap();
        let x = p("X");
        assert_eq!(tab.conjugate(&x, Direction::Forward).unwrap(), p("Y"));
        assert_eq!(tab.conjugate(&p("Y"), Direction::Forward).unwrap(), p("-X"));
        assert_eq!(tab.conjugate(&x, Direction::Backward).unwrap(), p("-Y"));
    }

    fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliString {
        let x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        let z: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        PauliString::from_bits(n, &x, &z, rng.random_range(0..4))
    }

    fn random_gate<R: Rng>(n: usize, rng: &mut R) -> Gate {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        match rng.random_range(0..10) {
            0 => Gate::H(a),
            1 => Gate::S(a),
            2 => Gate::Sdg(a),
            3 => Gate::X(a),
            4 => Gate::Y(a),
            5 => Gate::Z(a),
            6 => Gate::Cnot(a, b),
            7 => Gate::Cz(a, b),
            8 => Gate::Swap(a, b),
            _ => Gate::TwoQubit(two_qubit_cliffords().sample(rng), a, b),
        }
    }

    /// Dense unitary of a gate sequence, for oracle comparisons.
    fn dense_of_word(n: usize, word: &[Gate]) -> DMatrix<C64> {
        let dim = 1usize << n;
        let mut u = DMatrix::<C64>::identity(dim, dim);
        for g in word {
            u = embed_gate(n, g) * u;
        }
        u
    }

    fn embed_gate(n: usize, g: &Gate) -> DMatrix<C64> {
        let dim = 1usize << n;
        let local = g.dense_matrix::<f64>();
        let (a, b) = g.sites();
        let mut u = DMatrix::<C64>::zeros(dim, dim);
        for col in 0..dim {
            let mut v = DVector::<C64>::zeros(dim);
            v[col] = C64::new(1.0, 0.0);
            match b {
                None => apply_one_site(&mut v, a, &local),
                Some(b) => apply_two_site(&mut v, a, b, &local),
            }
            u.set_column(col, &v);
        }
        u
    }

    fn assert_proportional(a: &DMatrix<C64>, b: &DMatrix<C64>) {
        // Tableaus are phase-blind, so compare up to a global unit factor.
        let (mut phase, mut found) = (C64::new(1.0, 0.0), false);
        for (x, y) in a.iter().zip(b.iter()) {
            if x.norm() > 1e-8 {
                phase = y / x;
                found = true;
                break;
            }
        }
        assert!(found);
        assert!((phase.norm() - 1.0).abs() < 1e-8);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!(
                (x * phase - y).norm() < 1e-8,
                "matrices differ beyond phase"
            );
        }
    }

    #[test]
    fn composed_gates_match_dense_conjugation() {
        let n = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..8 {
            let word: Vec<Gate> = (0..50).map(|_| random_gate(n, &mut rng)).collect();
            let mut tab = CliffordTableau::identity(n);
            for g in &word {
                tab.left_mul_gate(g).unwrap();
            }
            assert!(tab.satisfies_commutation_relations());
            let u = dense_of_word(n, &word);
            for _ in 0..5 {
                let q = random_pauli(n, &mut rng);
                let img = tab.conjugate(&q, Direction::Forward).unwrap();
                let lhs = &u * q.to_dense::<f64>().unwrap() * u.adjoint();
                assert_proportional(&img.to_dense().unwrap(), &lhs);
                // Forward conjugation of a tableau is phase-exact, so the
                // proportionality factor is in fact 1; check one entry pair.
                let rhs = img.to_dense::<f64>().unwrap();
                for (x, y) in lhs.iter().zip(rhs.iter()) {
                    assert!((x - y).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn backward_is_inverse_of_forward() {
        let n = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let mut tab = CliffordTableau::identity(n);
            for _ in 0..30 {
                tab.left_mul_gate(&random_gate(n, &mut rng)).unwrap();
            }
            let q = random_pauli(n, &mut rng);
            let fwd = tab.conjugate(&q, Direction::Forward).unwrap();
            assert_eq!(tab.conjugate(&fwd, Direction::Backward).unwrap(), q);
        }
    }

    #[test]
    fn right_multiplication_matches_dense_product() {
        let n = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let left_word: Vec<Gate> = (0..10).map(|_| random_gate(n, &mut rng)).collect();
            let right_word: Vec<Gate> = (0..10).map(|_| random_gate(n, &mut rng)).collect();
            let mut tab = CliffordTableau::identity(n);
            for g in &left_word {
                tab.left_mul_gate(g).unwrap();
            }
            for g in &right_word {
                tab.right_mul_gate(g).unwrap();
            }
            assert!(tab.satisfies_commutation_relations());
            // C = (lefts, applied in order) · (rights, in order):
            // dense = L_k…L_1 · R_1…R_m.
            let mut u = dense_of_word(n, &left_word);
            for g in &right_word {
                u *= embed_gate(n, g);
            }
            let q = random_pauli(n, &mut rng);
            let img = tab.conjugate(&q, Direction::Forward).unwrap();
            let lhs = &u * q.to_dense::<f64>().unwrap() * u.adjoint();
            assert_proportional(&img.to_dense().unwrap(), &lhs);
        }
    }

    #[test]
    fn random_layer_composes_2n2_gates() {
        // n = 2: exactly 8 gates, all on the only pair (0, 1).
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gates = random_layer_gates(2, &mut rng);
        assert_eq!(gates.len(), 8);
        assert!(gates.iter().all(|g| g.sites() == (0, Some(1))));
        assert_eq!(random_layer_gates(4, &mut rng).len(), 32);

        let mut tab = CliffordTableau::identity(2);
        tab.apply_random_layer(&mut rng).unwrap();
        assert!(tab.satisfies_commutation_relations());

        let mut tab4 = CliffordTableau::identity(4);
        tab4.apply_random_layer(&mut rng).unwrap();
        assert!(tab4.satisfies_commutation_relations());

        let mut tab1 = CliffordTableau::identity(1);
        assert!(matches!(
            tab1.apply_random_layer(&mut rng),
            Err(TableauError::TooFewQubits { .. })
        ));
    }

    #[test]
    fn random_layer_matches_dense_action() {
        // Record the same draws through a seeded rng twice: once into the
        // tableau, once into a dense product.
        let n = 3;
        let table = two_qubit_cliffords();
        let mut draws: Vec<(TwoQubitCliffordId, usize, usize)> = Vec::new();
        {
            let mut rng = ChaCha8Rng::seed_from_u64(layer_seed());
            for _ in 0..2 * n * n {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                let (a, b) = (a.min(b), a.max(b));
                draws.push((table.sample(&mut rng), a, b));
            }
        }
        let mut tab = CliffordTableau::identity(n);
        let mut rng = ChaCha8Rng::seed_from_u64(layer_seed());
        tab.apply_random_layer(&mut rng).unwrap();
        let word: Vec<Gate> = draws
            .iter()
            .map(|(id, a, b)| Gate::TwoQubit(*id, *a, *b))
            .collect();
        let u = dense_of_word(n, &word);
        let mut rng2 = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let q = random_pauli(n, &mut rng2);
            let img = tab.conjugate(&q, Direction::Forward).unwrap();
            let lhs = &u * q.to_dense::<f64>().unwrap() * u.adjoint();
            assert_proportional(&img.to_dense().unwrap(), &lhs);
        }
    }

    fn layer_seed() -> u64 {
        314159
    }

    #[test]
    fn gate_site_validation() {
        let mut tab = CliffordTableau::identity(2);
        assert!(matches!(
            tab.left_mul_gate(&Gate::H(5)),
            Err(TableauError::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            tab.left_mul_gate(&Gate::Cnot(1, 1)),
            Err(TableauError::RepeatedSite { .. })
        ));
    }

    #[test]
    fn dump_has_2n_lines() {
        let tab = CliffordTableau::identity(3);
        assert_eq!(tab.dump().lines().count(), 6);
    }
}
