//! The doped-circuit experiment: deep random Clifford layers alternating
//! with a single non-Clifford phase gate, simulated in CAMPS form.
//!
//! Each step absorbs one layer of `2n²` random two-qubit Cliffords into the
//! tableau, applies the phase gate on site 0 (any other placement is
//! equivalent up to Cliffords absorbed into the neighboring layers), and runs
//! the greedy disentangler. Per step the records capture the residual
//! entanglement of the tensor-network factor, its bond profile, the
//! stabilizer-entropy density when computable, and the disentangler effort.
//!
//! Instances are independent trajectories; every instance-step pair draws
//! from its own counter-derived random stream, so results are byte-identical
//! for any worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::camps::{CampsState, PhaseGateSpec, ZERO_EE_THRESHOLD};
use crate::magic::sre2_camps;
use crate::mps::{Mps, SiteState};
use crate::pauli::PauliAxis;
use crate::records::TrajectoryRecord;
use crate::scalar::Real;

/// Parameters of one doped-circuit batch.
#[derive(Debug, Clone, PartialEq)]
pub struct DopedCircuitConfig {
    pub n: usize,
    /// Number of layer+gate steps per instance; `n` suffices to observe the
    /// last fully disentanglable step.
    pub steps: usize,
    /// Rotation angle of the doping gate, `exp(iφ σ)`.
    pub phi: f64,
    pub axis: PauliAxis,
    pub instances: usize,
    pub seed: u64,
    pub chi_max: usize,
    pub svd_cutoff: f64,
}

impl DopedCircuitConfig {
    /// T-gate doping with the defaults used throughout the experiments.
    pub fn t_gates(n: usize, steps: usize, instances: usize, seed: u64) -> Self {
        Self {
            n,
            steps,
            phi: -std::f64::consts::FRAC_PI_8,
            axis: PauliAxis::Z,
            instances,
            seed,
            chi_max: 256,
            svd_cutoff: 1e-12,
        }
    }

    /// √T-gate doping (half the rotation angle).
    pub fn sqrt_t_gates(n: usize, steps: usize, instances: usize, seed: u64) -> Self {
        Self {
            phi: -std::f64::consts::FRAC_PI_8 / 2.0,
            ..Self::t_gates(n, steps, instances, seed)
        }
    }
}

/// Derives an independent ChaCha stream for one `(instance, step)` cell of a
/// seeded batch. SplitMix64 expansion of the key tuple; no draw order leaks
/// between cells, so parallel scheduling cannot change any trajectory.
pub fn stream_rng(master_seed: u64, instance: u64, step: u64) -> ChaCha8Rng {
    let mut state = master_seed
        ^ instance.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ step.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the batch, parallel over instances; records come back sorted by
/// `(instance, step)`.
pub fn run_doped_circuit<T: Real>(cfg: &DopedCircuitConfig) -> Vec<TrajectoryRecord> {
    assert!(cfg.n >= 2, "doped circuit needs at least two qubits");
    let mut records: Vec<TrajectoryRecord> = (0..cfg.instances)
        .into_par_iter()
        .flat_map_iter(|instance| run_instance::<T>(cfg, instance))
        .collect();
    records.sort_by_key(|r| (r.instance, r.step));
    records
}

fn run_instance<T: Real>(cfg: &DopedCircuitConfig, instance: usize) -> Vec<TrajectoryRecord> {
    let mps = Mps::<T>::product_state(
        &vec![SiteState::zero(); cfg.n],
        cfg.chi_max,
        T::of(cfg.svd_cutoff),
    )
    .expect("valid product state");
    let mut camps = CampsState::new(mps);
    let spec = PhaseGateSpec::<T>::new(T::of(cfg.phi), cfg.axis, 0).expect("angle in range");
    let mut records = Vec::with_capacity(cfg.steps);
    for step in 1..=cfg.steps {
        let mut rng = stream_rng(cfg.seed, instance as u64, step as u64);
        camps.apply_random_clifford_layer(&mut rng).expect("n >= 2");
        let report = camps
            .apply_phase_gate(&spec, true)
            .expect("phase gate absorbs")
            .expect("disentangle requested");
        let max_ee = camps.max_entanglement().to_f64_lossy();
        let sre_density = sre2_camps(&camps)
            .ok()
            .map(|r| r.value.to_f64_lossy() / cfg.n as f64);
        records.push(TrajectoryRecord {
            instance,
            step,
            time: None,
            max_ee_mps: max_ee,
            max_ee_state: None,
            sre_density,
            max_bond: camps.mps().max_bond_dim(),
            sweeps: Some(report.sweeps_used),
            backprop_ee: None,
        });
    }
    records
}

/// Last step of one instance whose whole prefix stayed fully disentangled
/// (entropy at most [`ZERO_EE_THRESHOLD`] and trivial bonds). Records must
/// belong to a single instance, sorted by step.
pub fn last_disentanglable_step(records: &[TrajectoryRecord]) -> usize {
    let mut t_star = 0;
    for r in records {
        if r.max_ee_mps <= ZERO_EE_THRESHOLD && r.max_bond == 1 {
            t_star = r.step;
        } else {
            break;
        }
    }
    t_star
}

/// Splits a record batch per instance and reports each `n - t*` shortfall.
pub fn shortfall_histogram(records: &[TrajectoryRecord], n: usize) -> Vec<usize> {
    let mut instances: Vec<usize> = records.iter().map(|r| r.instance).collect();
    instances.sort_unstable();
    instances.dedup();
    instances
        .into_iter()
        .map(|inst| {
            let per: Vec<TrajectoryRecord> = records
                .iter()
                .filter(|r| r.instance == inst)
                .cloned()
                .collect();
            n - last_disentanglable_step(&per)
        })
        .collect()
}
