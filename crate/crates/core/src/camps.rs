//! The Clifford-augmented MPS state `|ψ⟩ = C ·|mps⟩`.
//!
//! Clifford gates are absorbed into the tableau (`C ← V·C`) without touching
//! the tensor network. A non-Clifford phase gate `exp(iφ P)` is transported
//! through the Clifford first — `exp(iφ P) C = C exp(iφ P̃)` with
//! `P̃ = C† P C` read from the tableau — and then contracted into the MPS as
//! a bond-dimension-2 operator `cos φ · 1 + i sin φ · P̃`.
//!
//! Because that contraction can double bond dimensions, a greedy sweep then
//! searches for a Clifford `Q` built from nearest-neighbor two-qubit gates
//! that lowers the entanglement of the tensor network. Only the 20
//! representatives of the left-local orbits need to be trialed per pair: a
//! left factor `L₀⊗L₁` cannot change the Schmidt spectrum. Accepted gates
//! update `|mps⟩ ← V·|mps⟩` immediately and fold into the tableau as
//! `C ← C·V†`, leaving the physical state unchanged.
//!
//! For small systems the state can mirror every tableau update into a gate
//! log, from which `C·v` and `C†·v` are replayed densely; this is the oracle
//! hook used by the validation suites.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::dense;
use crate::mpo::{Mpo, MpoError};
use crate::mps::{apply_gate_to_theta, entropy_from_singular_values, CenterSide, Mps, MpsError};
use crate::pauli::{PauliAxis, PauliError, PauliString};
use crate::scalar::{Cplx, Real};
use crate::tableau::{CliffordTableau, Direction, Gate, TableauError};
use crate::two_qubit_clifford::{two_qubit_cliffords, TwoQubitCliffordId};

/// Default improvement threshold (bits) for accepting a disentangling gate.
pub const DISENTANGLE_TOL: f64 = 1e-10;

/// Entropy below which a tensor network counts as fully disentangled.
pub const ZERO_EE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum CampsError {
    #[error("phase angle {phi} outside (-π, π]")]
    PhaseOutOfRange { phi: f64 },

    #[error("gate history tracking is disabled for this state")]
    HistoryDisabled,

    #[error(transparent)]
    Tableau(#[from] TableauError),

    #[error(transparent)]
    Mps(#[from] MpsError),

    #[error(transparent)]
    Mpo(#[from] MpoError),

    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// A non-Clifford rotation `exp(i φ σ)` about a single-site Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGateSpec<T: Real> {
    pub phi: T,
    pub axis: PauliAxis,
    pub site: usize,
}

impl<T: Real> PhaseGateSpec<T> {
    pub fn new(phi: T, axis: PauliAxis, site: usize) -> Result<Self, CampsError> {
        if phi <= -T::PI() || phi > T::PI() {
            return Err(CampsError::PhaseOutOfRange {
                phi: phi.to_f64_lossy(),
            });
        }
        Ok(Self { phi, axis, site })
    }

    /// `diag(1, e^{iπ/4})` up to global phase: `φ = -π/8` about Z.
    pub fn t_gate(site: usize) -> Self {
        Self {
            phi: -T::FRAC_PI_8(),
            axis: PauliAxis::Z,
            site,
        }
    }

    /// `diag(1, e^{iπ/8})` up to global phase: `φ = -π/16` about Z.
    pub fn sqrt_t_gate(site: usize) -> Self {
        Self {
            phi: -T::FRAC_PI_8() * T::of(0.5),
            axis: PauliAxis::Z,
            site,
        }
    }
}

/// Outcome of one greedy disentangling search.
#[derive(Debug, Clone, PartialEq)]
pub struct DisentangleReport<T: Real> {
    /// Full forward+backward passes performed, including the final one that
    /// accepted nothing.
    pub sweeps_used: usize,
    /// Accepted gates in application order, as (pair, group element).
    pub gates_accepted: Vec<((usize, usize), TwoQubitCliffordId)>,
    pub ee_before: T,
    pub ee_after: T,
}

#[derive(Debug, Clone, Default)]
struct GateLog {
    /// `C_left = L_k ⋯ L_1`, stored in application order `L_1, …, L_k`.
    left: Vec<Gate>,
    /// `C_right = R_1 ⋯ R_m`, stored in application order `R_1, …, R_m`.
    right: Vec<Gate>,
}

/// `|ψ⟩ = C ·|mps⟩` with `C` a stabilizer tableau.
#[derive(Debug, Clone)]
pub struct CampsState<T: Real> {
    tableau: CliffordTableau,
    mps: Mps<T>,
    history: Option<GateLog>,
}

impl<T: Real> CampsState<T> {
    /// Wraps a tensor-network state with the identity Clifford.
    pub fn new(mps: Mps<T>) -> Self {
        let tableau = CliffordTableau::identity(mps.num_sites());
        Self {
            tableau,
            mps,
            history: None,
        }
    }

    /// Like [`Self::new`], but mirrors every tableau update into a gate log
    /// so the dense `C·v` action can be replayed. Intended for small-system
    /// validation runs.
    pub fn with_history(mps: Mps<T>) -> Self {
        let mut state = Self::new(mps);
        state.history = Some(GateLog::default());
        state
    }

    pub fn from_parts(tableau: CliffordTableau, mps: Mps<T>) -> Self {
        assert_eq!(tableau.num_qubits(), mps.num_sites());
        Self {
            tableau,
            mps,
            history: None,
        }
    }

    pub fn num_sites(&self) -> usize {
        self.mps.num_sites()
    }

    pub fn tableau(&self) -> &CliffordTableau {
        &self.tableau
    }

    pub fn mps(&self) -> &Mps<T> {
        &self.mps
    }

    /// The time-evolution driver updates the tensor factor in place; pairing
    /// with the matching tableau updates is its responsibility.
    pub(crate) fn mps_mut(&mut self) -> &mut Mps<T> {
        &mut self.mps
    }

    /// Maximum entanglement entropy of the tensor-network factor.
    pub fn max_entanglement(&mut self) -> T {
        self.mps.max_entanglement()
    }

    /// Absorbs a Clifford gate: `C ← V·C`; the MPS is untouched.
    pub fn apply_clifford(&mut self, gate: &Gate) -> Result<(), CampsError> {
        self.tableau.left_mul_gate(gate)?;
        if let Some(log) = &mut self.history {
            log.left.push(*gate);
        }
        Ok(())
    }

    /// Absorbs a deep random layer: `2n²` uniformly drawn two-qubit Cliffords
    /// on uniformly random distinct pairs.
    pub fn apply_random_clifford_layer<R: rand::Rng + ?Sized>(
        &mut self,
        rng: &mut R,
    ) -> Result<(), CampsError> {
        let n = self.num_sites();
        if n < 2 {
            return Err(TableauError::TooFewQubits { needed: 2, n }.into());
        }
        for gate in crate::tableau::random_layer_gates(n, rng) {
            self.apply_clifford(&gate)?;
        }
        Ok(())
    }

    /// Applies `exp(i φ σ)` on one site by conjugating the axis through the
    /// tableau and contracting the resulting bond-2 operator into the MPS.
    /// Optionally runs the greedy disentangler afterwards.
    pub fn apply_phase_gate(
        &mut self,
        spec: &PhaseGateSpec<T>,
        disentangle_after: bool,
    ) -> Result<Option<DisentangleReport<T>>, CampsError> {
        let n = self.num_sites();
        let axis = PauliString::single(n, spec.site, spec.axis)?;
        let conjugated = self.tableau.conjugate(&axis, Direction::Backward)?;
        let op = Mpo::phase_gate(spec.phi, &conjugated)?;
        self.mps.apply_mpo(&op, true)?;
        if disentangle_after {
            Ok(Some(self.greedy_disentangle(T::of(DISENTANGLE_TOL))?))
        } else {
            Ok(None)
        }
    }

    /// Greedy sweep search for a disentangling Clifford.
    ///
    /// Pairs are visited `(0,1), (1,2), …, (n-2,n-1)` and back; on each pair
    /// all 20 orbit representatives are trialed and the best is accepted iff
    /// it lowers the entropy across the pair's bond by more than `tol` bits
    /// (ties break toward the lowest representative index). Accepted gates
    /// commit the SVD already computed and fold into the tableau as
    /// `C ← C·V†`. Passes repeat until one accepts nothing.
    pub fn greedy_disentangle(&mut self, tol: T) -> Result<DisentangleReport<T>, CampsError> {
        let n = self.num_sites();
        let ee_before = self.mps.max_entanglement();
        let mut report = DisentangleReport {
            sweeps_used: 0,
            gates_accepted: Vec::new(),
            ee_before,
            ee_after: ee_before,
        };
        if n < 2 {
            report.sweeps_used = 1;
            return Ok(report);
        }
        let table = two_qubit_cliffords();
        let reps = table.coset_representatives();
        let rep_dense: Vec<DMatrix<Cplx<T>>> =
            reps.iter().map(|id| table.dense_matrix::<T>(*id)).collect();

        loop {
            report.sweeps_used += 1;
            let mut accepted_in_pass = 0usize;
            let forward = 0..=(n - 2);
            let backward = (0..n.saturating_sub(2)).rev();
            let schedule: Vec<(usize, CenterSide)> = forward
                .map(|i| (i, CenterSide::Right))
                .chain(backward.map(|i| (i, CenterSide::Left)))
                .collect();
            for (pair, side) in schedule {
                if self.try_pair(pair, side, tol, reps, &rep_dense, &mut report)? {
                    accepted_in_pass += 1;
                }
            }
            if accepted_in_pass == 0 {
                break;
            }
        }
        report.ee_after = self.mps.max_entanglement();
        Ok(report)
    }

    /// Trials the representatives on `(pair, pair + 1)`; commits the best
    /// improvement. Returns whether a gate was accepted.
    fn try_pair(
        &mut self,
        pair: usize,
        side: CenterSide,
        tol: T,
        reps: &[TwoQubitCliffordId],
        rep_dense: &[DMatrix<Cplx<T>>],
        report: &mut DisentangleReport<T>,
    ) -> Result<bool, CampsError> {
        self.mps.move_center(pair);
        let dims = self.mps.theta_dims(pair);
        let theta = self.mps.two_site_theta(pair);
        let baseline =
            entropy_from_singular_values(&crate::linalg::singular_values_checked(&theta));
        let mut best: Option<(usize, T, DMatrix<Cplx<T>>)> = None;
        for (k, u) in rep_dense.iter().enumerate() {
            let trial = apply_gate_to_theta(&theta, u, dims);
            let entropy =
                entropy_from_singular_values(&crate::linalg::singular_values_checked(&trial));
            let better = match &best {
                None => entropy < baseline - tol,
                Some((_, e_best, _)) => entropy < *e_best - T::default_epsilon(),
            };
            if better {
                best = Some((k, entropy, trial));
            }
        }
        if let Some((k, _, theta_best)) = best {
            self.mps.split_theta(pair, &theta_best, side, true);
            let fold = Gate::TwoQubit(two_qubit_cliffords().inverse(reps[k]), pair, pair + 1);
            self.tableau.right_mul_gate(&fold)?;
            if let Some(log) = &mut self.history {
                log.right.push(fold);
            }
            report.gates_accepted.push(((pair, pair + 1), reps[k]));
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// `⟨ψ|P|ψ⟩ = ⟨mps|C†PC|mps⟩` for Hermitian `P`.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<T, CampsError> {
        let conjugated = self.tableau.conjugate(p, Direction::Backward)?;
        Ok(self.mps.expectation_pauli(&conjugated)?)
    }

    /// Replays `C` onto a dense vector. Needs history tracking.
    pub fn apply_clifford_to_vec(
        &self,
        v: &DVector<Cplx<T>>,
    ) -> Result<DVector<Cplx<T>>, CampsError> {
        let log = self.history.as_ref().ok_or(CampsError::HistoryDisabled)?;
        let mut out = v.clone();
        // C = L_k ⋯ L_1 · R_1 ⋯ R_m: rightmost factor acts first.
        for gate in log.right.iter().rev() {
            apply_gate_dense(&mut out, gate, false);
        }
        for gate in &log.left {
            apply_gate_dense(&mut out, gate, false);
        }
        Ok(out)
    }

    /// Replays `C†` onto a dense vector. Needs history tracking.
    pub fn apply_inverse_clifford_to_vec(
        &self,
        v: &DVector<Cplx<T>>,
    ) -> Result<DVector<Cplx<T>>, CampsError> {
        let log = self.history.as_ref().ok_or(CampsError::HistoryDisabled)?;
        let mut out = v.clone();
        // C† = R_m† ⋯ R_1† · L_1† ⋯ L_k†.
        for gate in log.left.iter().rev() {
            apply_gate_dense(&mut out, gate, true);
        }
        for gate in &log.right {
            apply_gate_dense(&mut out, gate, true);
        }
        Ok(out)
    }

    /// Dense statevector of the physical state `C·|mps⟩`, up to the global
    /// phase the tableau representation does not track.
    pub fn statevector(&self) -> Result<DVector<Cplx<T>>, CampsError> {
        let v = self.mps.to_statevector()?;
        self.apply_clifford_to_vec(&v)
    }
}

fn apply_gate_dense<T: Real>(v: &mut DVector<Cplx<T>>, gate: &Gate, dagger: bool) {
    let mut u = gate.dense_matrix::<T>();
    if dagger {
        u = u.adjoint();
    }
    let (a, b) = gate.sites();
    match b {
        None => dense::apply_one_site(v, a, &u),
        Some(b) => dense::apply_two_site(v, a, b, &u),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::SiteState;
    use crate::two_qubit_clifford::COSET_COUNT;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C64 = num_complex::Complex64;

    fn fresh(n: usize) -> CampsState<f64> {
        CampsState::with_history(
            Mps::product_state(&vec![SiteState::zero(); n], 64, 1e-12).unwrap(),
        )
    }

    #[test]
    fn clifford_gates_leave_mps_untouched() {
        let mut camps = fresh(4);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        camps.apply_random_clifford_layer(&mut rng).unwrap();
        assert_eq!(camps.mps().bond_dims(), vec![1, 1, 1]);
        assert!(camps.mps().to_statevector().unwrap()[0].norm() > 1.0 - 1e-12);
    }

    #[test]
    fn clifford_then_inverse_restores_identity_action() {
        let mut camps = fresh(3);
        let gates = [
            Gate::H(0),
            Gate::S(1),
            Gate::Cnot(0, 2),
            Gate::Cz(1, 2),
            Gate::Swap(0, 1),
        ];
        for g in &gates {
            camps.apply_clifford(g).unwrap();
        }
        for g in gates.iter().rev() {
            camps.apply_clifford(&g.inverse()).unwrap();
        }
        assert!(camps.tableau().is_identity());
    }

    #[test]
    fn phase_gate_on_fresh_state_yields_t_state() {
        // C = 1, |+>⊗|0…0>, then the φ = -π/8 Z-rotation on site 0.
        let mut sites = vec![SiteState::zero(); 4];
        sites[0] = SiteState::plus();
        let mps = Mps::product_state(&sites, 16, 1e-12).unwrap();
        let mut camps = CampsState::with_history(mps);
        camps
            .apply_phase_gate(&PhaseGateSpec::t_gate(0), false)
            .unwrap();
        assert!(camps.max_entanglement() < 1e-12);
        assert_eq!(camps.mps().bond_dims(), vec![1, 1, 1]);
        let v = camps.statevector().unwrap();
        let mut expected = crate::dense::basis_state::<f64>(4, 0);
        crate::dense::apply_one_site(&mut expected, 0, &crate::dense::hadamard());
        crate::dense::apply_one_site(&mut expected, 0, &crate::dense::t_gate());
        assert!(crate::dense::fidelity(&v, &expected) > 1.0 - 1e-10);
    }

    #[test]
    fn zero_angle_phase_gate_is_identity() {
        let mut camps = fresh(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        camps.apply_random_clifford_layer(&mut rng).unwrap();
        let before = camps.statevector().unwrap();
        let spec = PhaseGateSpec::new(0.0, PauliAxis::Z, 0).unwrap();
        camps.apply_phase_gate(&spec, false).unwrap();
        let after = camps.statevector().unwrap();
        assert!(crate::dense::fidelity(&before, &after) > 1.0 - 1e-12);
    }

    #[test]
    fn phase_spec_validation() {
        assert!(PhaseGateSpec::<f64>::new(4.0, PauliAxis::Z, 0).is_err());
        assert!(PhaseGateSpec::<f64>::new(-std::f64::consts::PI, PauliAxis::Z, 0).is_err());
        assert!(PhaseGateSpec::<f64>::new(std::f64::consts::PI, PauliAxis::Z, 0).is_ok());
    }

    #[test]
    fn disentangler_removes_bell_pair() {
        // |Bell>⊗|0>⊗|0> can always be disentangled by a two-qubit Clifford.
        let mut mps = Mps::<f64>::product_state(&[SiteState::zero(); 4], 16, 1e-12).unwrap();
        mps.apply_one_site_gate(0, &crate::dense::hadamard())
            .unwrap();
        mps.apply_two_site_gate(0, &crate::dense::cnot()).unwrap();
        let mut camps = CampsState::with_history(mps);
        let before = camps.statevector().unwrap();
        let report = camps.greedy_disentangle(1e-10).unwrap();
        assert!(report.ee_before > 0.99);
        assert!(report.ee_after < 1e-10);
        assert_eq!(camps.mps().bond_dims(), vec![1, 1, 1]);
        assert!(!report.gates_accepted.is_empty());
        // The physical state is exactly preserved (up to global phase).
        let after = camps.statevector().unwrap();
        assert!(crate::dense::fidelity(&before, &after) > 1.0 - 1e-10);
    }

    #[test]
    fn disentangler_is_idle_on_product_states() {
        let mut camps = fresh(4);
        let report = camps.greedy_disentangle(1e-10).unwrap();
        assert_eq!(report.sweeps_used, 1);
        assert!(report.gates_accepted.is_empty());
        assert_eq!(report.ee_before, 0.0);
    }

    #[test]
    fn disentangler_leaves_magic_product_states_alone() {
        let sites = vec![SiteState::<f64>::t_state(); 4];
        let mps = Mps::product_state(&sites, 16, 1e-12).unwrap();
        let mut camps = CampsState::new(mps);
        let report = camps.greedy_disentangle(1e-10).unwrap();
        assert!(report.gates_accepted.is_empty());
        assert!(report.ee_after < 1e-12);
    }

    #[test]
    fn disentangler_never_increases_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..10 {
            let n = 4 + (trial % 3);
            let mut mps =
                Mps::<f64>::product_state(&vec![SiteState::zero(); n], 32, 1e-12).unwrap();
            for _ in 0..6 {
                let site = rng.random_range(0..n - 1);
                let a = nalgebra::DMatrix::<C64>::from_fn(4, 4, |_, _| {
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                mps.apply_two_site_gate(site, &a.qr().q()).unwrap();
            }
            let mut camps = CampsState::new(mps);
            let report = camps.greedy_disentangle(1e-10).unwrap();
            assert!(report.ee_after <= report.ee_before + 1e-12);
        }
    }

    #[test]
    fn expectation_through_identity_tableau() {
        let camps = fresh(3);
        for site in 0..3 {
            let z = PauliString::single(3, site, PauliAxis::Z).unwrap();
            assert!((camps.expectation_pauli(&z).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_matches_dense_after_layer_and_phase_gate() {
        let n = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut camps = fresh(n);
        camps.apply_random_clifford_layer(&mut rng).unwrap();
        camps
            .apply_phase_gate(&PhaseGateSpec::t_gate(0), true)
            .unwrap();

        // Oracle state: replay the same operations densely.
        let v = camps.statevector().unwrap();
        for _ in 0..40 {
            let x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let z: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let p = PauliString::from_bits(n, &x, &z, if rng.random() { 0 } else { 2 });
            let got = camps.expectation_pauli(&p).unwrap();
            let want = p.expectation(&v).unwrap();
            assert!((got - want).abs() < 1e-10, "{p}");
        }
    }

    #[test]
    fn dense_replay_inverse_round_trips() {
        let n = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut camps = fresh(n);
        camps.apply_random_clifford_layer(&mut rng).unwrap();
        camps
            .apply_phase_gate(&PhaseGateSpec::t_gate(0), true)
            .unwrap();
        camps
            .apply_phase_gate(&PhaseGateSpec::sqrt_t_gate(0), true)
            .unwrap();
        let v = crate::dense::random_state::<f64, _>(n, &mut rng);
        let w = camps.apply_clifford_to_vec(&v).unwrap();
        let back = camps.apply_inverse_clifford_to_vec(&w).unwrap();
        assert!(crate::dense::fidelity(&v, &back) > 1.0 - 1e-12);
    }

    #[test]
    fn history_is_opt_in() {
        let n = 3;
        let camps = CampsState::new(
            Mps::<f64>::product_state(&vec![SiteState::zero(); n], 8, 0.0).unwrap(),
        );
        assert!(matches!(
            camps.statevector(),
            Err(CampsError::HistoryDisabled)
        ));
    }

    #[test]
    fn representative_set_has_expected_size() {
        assert_eq!(
            two_qubit_cliffords().coset_representatives().len(),
            COSET_COUNT
        );
    }
}
