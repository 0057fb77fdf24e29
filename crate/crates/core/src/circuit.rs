//! Dense state-vector simulator for the phase-comparator gate set.
//!
//! Registers are indexed with qubit 0 as the most significant bit of the
//! basis-state index. The QPE readout register is written little-endian by the
//! phase-gradient stage and converted at readout by the swap network inside
//! the inverse Fourier transform, matching the textbook analysis.
//!
//! Gate compilation error is modeled as a seeded unitary perturbation of
//! spectral norm at most `epsilon` per gate; only the existence of an
//! `epsilon`-accurate compilation enters the downstream bounds, so the
//! perturbation exercises the same lemmas.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{exp_i_hermitian, hermitize, spectral_norm, CMatrix};
use crate::{Error, Result};

/// Hard cap on simulated qubits; larger requests error out.
pub const MAX_QUBITS: usize = 24;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense state vector on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub num_qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        Self::basis_state(num_qubits, 0)
    }

    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(Error::CapExceeded { requested: num_qubits, cap: MAX_QUBITS });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= dim {dim}")));
        }
        let mut amplitudes = vec![C_ZERO; dim];
        amplitudes[index] = C_ONE;
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("dimension {dim} is not a power of two")));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::CapExceeded { requested: num_qubits, cap: MAX_QUBITS });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("state norm {norm} is not 1")));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Tensor product `self ⊗ other` (self occupies the high bits).
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::CapExceeded { requested: n, cap: MAX_QUBITS });
        }
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(StateVector { num_qubits: n, amplitudes })
    }

    /// Max-norm distance to another state.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// L2 distance to another state.
    pub fn l2_deviation(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Gate kinds of the comparator gate set.
#[derive(Debug, Clone)]
pub enum GateKind {
    Hadamard,
    CNot,
    T,
    /// `R_k = diag(1, e^{2πi/2^k})`.
    PhaseR(u32),
    /// `diag(1, e^{iθ})`.
    DiagonalPhase(f64),
    /// A dense unitary raised to an integer power, with the first target
    /// acting as control.
    ControlledUnitaryPower { matrix: CMatrix, power: u64 },
    /// A dense unitary on the listed targets.
    Unitary(CMatrix),
}

#[derive(Debug, Clone)]
pub struct Gate {
    pub kind: GateKind,
    /// Qubit indices the gate acts on; for controlled kinds the first entry
    /// is the control.
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn hadamard(q: usize) -> Self {
        Gate { kind: GateKind::Hadamard, targets: vec![q] }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::CNot, targets: vec![control, target] }
    }

    pub fn t_gate(q: usize) -> Self {
        Gate { kind: GateKind::T, targets: vec![q] }
    }

    pub fn phase_r(k: u32, q: usize) -> Self {
        Gate { kind: GateKind::PhaseR(k), targets: vec![q] }
    }

    pub fn diagonal_phase(angle: f64, q: usize) -> Self {
        Gate { kind: GateKind::DiagonalPhase(angle), targets: vec![q] }
    }

    pub fn controlled_power(matrix: CMatrix, power: u64, control: usize, system: &[usize]) -> Self {
        let mut targets = vec![control];
        targets.extend_from_slice(system);
        Gate { kind: GateKind::ControlledUnitaryPower { matrix, power }, targets }
    }

    /// The dense matrix of this gate on its target qubits.
    pub fn matrix(&self) -> Result<CMatrix> {
        Ok(match &self.kind {
            GateKind::Hadamard => {
                let h = 1.0 / 2f64.sqrt();
                CMatrix::from_row_slice(2, 2, &[
                    Complex64::new(h, 0.0),
                    Complex64::new(h, 0.0),
                    Complex64::new(h, 0.0),
                    Complex64::new(-h, 0.0),
                ])
            }
            GateKind::CNot => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = C_ONE;
                m[(1, 1)] = C_ONE;
                m[(2, 3)] = C_ONE;
                m[(3, 2)] = C_ONE;
                m
            }
            GateKind::T => diag2(Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
            GateKind::PhaseR(k) => diag2(Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI / 2f64.powi(*k as i32),
            )),
            GateKind::DiagonalPhase(angle) => diag2(Complex64::from_polar(1.0, *angle)),
            GateKind::ControlledUnitaryPower { matrix, power } => {
                let d = matrix.nrows();
                if !d.is_power_of_two() || matrix.ncols() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "controlled unitary payload must be square power-of-two, got {d}x{}",
                        matrix.ncols()
                    )));
                }
                let powered = matrix_power(matrix, *power);
                let mut m = CMatrix::identity(2 * d, 2 * d);
                m.view_mut((d, d), (d, d)).copy_from(&powered);
                m
            }
            GateKind::Unitary(m) => m.clone(),
        })
    }
}

fn diag2(phase: Complex64) -> CMatrix {
    let mut m = CMatrix::identity(2, 2);
    m[(1, 1)] = phase;
    m
}

/// `m^power` by binary exponentiation.
pub fn matrix_power(m: &CMatrix, power: u64) -> CMatrix {
    let n = m.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut base = m.clone();
    let mut p = power;
    while p > 0 {
        if p & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        p >>= 1;
    }
    result
}

/// Seeded per-gate perturbation budget.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Per-gate spectral-norm perturbation, `0 ≤ epsilon < 1`.
    pub epsilon: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside [0, 1)")));
        }
        Ok(Self { epsilon, seed })
    }

    fn sub_seed(&self, gate_index: u64) -> u64 {
        // splitmix64 step keyed on (seed, gate index)
        let mut z = self.seed ^ gate_index.wrapping_mul(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
}

/// A pseudorandom unitary within spectral distance `epsilon` of `u`:
/// `u · exp(iεG)` for a seeded Hermitian direction `G` of unit spectral norm.
pub fn perturbed_unitary(u: &CMatrix, epsilon: f64, seed: u64) -> CMatrix {
    if epsilon == 0.0 {
        return u.clone();
    }
    let n = u.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let herm = hermitize(&raw);
    let norm = spectral_norm(&herm);
    let direction = herm.scale(1.0 / norm.max(1e-300));
    let kick = exp_i_hermitian(&direction, epsilon).expect("direction is Hermitian");
    u * kick
}

fn apply_matrix(state: &mut StateVector, qubits: &[usize], m: &CMatrix) -> Result<()> {
    let n = state.num_qubits;
    let k = qubits.len();
    let d = 1usize << k;
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "gate matrix {}x{} does not act on {k} qubits",
            m.nrows(),
            m.ncols()
        )));
    }
    for &q in qubits {
        if q >= n {
            return Err(Error::InvalidArgument(format!("qubit index {q} out of range (n={n})")));
        }
    }
    // Bit position of qubit q within the basis index (qubit 0 = MSB).
    let bit_masks: Vec<usize> = qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
    let gate_mask: usize = bit_masks.iter().sum();
    if bit_masks.iter().copied().collect::<std::collections::HashSet<_>>().len() != k {
        return Err(Error::InvalidArgument("duplicate qubit in gate targets".into()));
    }

    let dim = state.dim();
    let free_masks: Vec<usize> = (0..n)
        .map(|b| 1usize << b)
        .filter(|mask| mask & gate_mask == 0)
        .collect();
    let mut sub = vec![C_ZERO; d];
    let mut addr = vec![0usize; d];
    for r in 0..(dim >> k) {
        let mut base = 0usize;
        for (j, mask) in free_masks.iter().enumerate() {
            if (r >> j) & 1 == 1 {
                base |= mask;
            }
        }
        for g in 0..d {
            let mut idx = base;
            for (j, mask) in bit_masks.iter().enumerate() {
                if (g >> (k - 1 - j)) & 1 == 1 {
                    idx |= mask;
                }
            }
            addr[g] = idx;
            sub[g] = state.amplitudes[idx];
        }
        for (row, &target) in addr.iter().enumerate() {
            let mut acc = C_ZERO;
            for col in 0..d {
                acc += m[(row, col)] * sub[col];
            }
            state.amplitudes[target] = acc;
        }
    }
    Ok(())
}

/// Apply a gate, preserving the norm.
pub fn apply(state: &mut StateVector, gate: &Gate) -> Result<()> {
    let m = gate.matrix()?;
    apply_matrix(state, &gate.targets, &m)
}

/// Apply a gate through the seeded perturbation of its unitary.
pub fn apply_noisy(state: &mut StateVector, gate: &Gate, noise: &NoiseSpec) -> Result<()> {
    let m = gate.matrix()?;
    let noisy = perturbed_unitary(&m, noise.epsilon, noise.seed);
    apply_matrix(state, &gate.targets, &noisy)
}

/// Gate sequence of the inverse Fourier transform on readout qubits
/// `offset..offset+t`, with qubit `offset` the most significant readout bit.
pub fn qft_inverse_gates(offset: usize, t: usize) -> Vec<Gate> {
    let mut gates = Vec::new();
    // Swap network reversing qubit order.
    for q in 0..t / 2 {
        let (a, b) = (offset + q, offset + t - 1 - q);
        gates.push(Gate::cnot(a, b));
        gates.push(Gate::cnot(b, a));
        gates.push(Gate::cnot(a, b));
    }
    // Reversed adjoint of the forward QFT ladder.
    for q in (0..t).rev() {
        for p in ((q + 1)..t).rev() {
            let k = (p - q + 1) as u32;
            let angle = -2.0 * std::f64::consts::PI / 2f64.powi(k as i32);
            let r = diag2(Complex64::from_polar(1.0, angle));
            gates.push(Gate::controlled_power(r, 1, offset + p, &[offset + q]));
        }
        gates.push(Gate::hadamard(offset + q));
    }
    gates
}

/// Which gates receive compilation noise: everything except the
/// phase-gradient controlled powers, which the comparator is given exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GateRole {
    Fixed,
    PhaseGradient,
}

struct Circuit {
    gates: Vec<(Gate, GateRole)>,
}

impl Circuit {
    fn run(&self, state: &mut StateVector, noise: Option<&NoiseSpec>) -> Result<()> {
        for (index, (gate, role)) in self.gates.iter().enumerate() {
            match (noise, role) {
                (Some(spec), GateRole::Fixed) if spec.epsilon > 0.0 => {
                    let per_gate = NoiseSpec {
                        epsilon: spec.epsilon,
                        seed: spec.sub_seed(index as u64),
                    };
                    apply_noisy(state, gate, &per_gate)?;
                }
                _ => apply(state, gate)?,
            }
        }
        Ok(())
    }

    fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

fn num_system_qubits(unitary: &CMatrix) -> Result<usize> {
    let d = unitary.nrows();
    if !d.is_power_of_two() || unitary.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "unitary must be square with power-of-two dimension, got {d}x{}",
            unitary.ncols()
        )));
    }
    Ok(d.trailing_zeros() as usize)
}

fn qpe_circuit_gates(unitary: &CMatrix, t: usize, system_offset: usize) -> Result<Circuit> {
    let n_sys = num_system_qubits(unitary)?;
    let system: Vec<usize> = (system_offset..system_offset + n_sys).collect();
    let mut gates = Vec::new();
    for q in 0..t {
        gates.push((Gate::hadamard(q), GateRole::Fixed));
    }
    // Qubit q controls U^(2^(t-1-q)): readout written little-endian.
    let mut power = unitary.clone();
    for q in (0..t).rev() {
        gates.push((
            Gate::controlled_power(power.clone(), 1, q, &system),
            GateRole::PhaseGradient,
        ));
        if q > 0 {
            power = &power * &power;
        }
    }
    for g in qft_inverse_gates(0, t) {
        gates.push((g, GateRole::Fixed));
    }
    Ok(Circuit { gates })
}

/// Textbook QPE: `t` readout qubits prepended to the eigenstate register.
pub fn qpe_circuit(unitary: &CMatrix, eigen_register: &StateVector, t: usize) -> Result<StateVector> {
    qpe_circuit_run(unitary, eigen_register, t, None)
}

pub fn qpe_circuit_run(
    unitary: &CMatrix,
    eigen_register: &StateVector,
    t: usize,
    noise: Option<&NoiseSpec>,
) -> Result<StateVector> {
    let n_sys = num_system_qubits(unitary)?;
    if eigen_register.dim() != unitary.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "eigen register dim {} vs unitary dim {}",
            eigen_register.dim(),
            unitary.nrows()
        )));
    }
    if t == 0 {
        return Err(Error::InvalidArgument("QPE needs t >= 1".into()));
    }
    let circuit = qpe_circuit_gates(unitary, t, t)?;
    let mut state = StateVector::zero_state(t)?.tensor(eigen_register)?;
    debug_assert_eq!(state.num_qubits, t + n_sys);
    circuit.run(&mut state, noise)?;
    Ok(state)
}

fn comparator_circuit(
    u_a: &CMatrix,
    u_b: &CMatrix,
    t: usize,
) -> Result<(Circuit, usize, usize)> {
    let n_a = num_system_qubits(u_a)?;
    let n_b = num_system_qubits(u_b)?;
    let mut gates = Vec::new();
    for q in 0..t {
        gates.push((Gate::hadamard(q), GateRole::Fixed));
    }
    let system_a: Vec<usize> = (t..t + n_a).collect();
    let system_b: Vec<usize> = (t + n_a..t + n_a + n_b).collect();
    let mut pow_a = u_a.clone();
    let mut pow_b = u_b.adjoint();
    for q in (0..t).rev() {
        gates.push((
            Gate::controlled_power(pow_a.clone(), 1, q, &system_a),
            GateRole::PhaseGradient,
        ));
        gates.push((
            Gate::controlled_power(pow_b.clone(), 1, q, &system_b),
            GateRole::PhaseGradient,
        ));
        if q > 0 {
            pow_a = &pow_a * &pow_a;
            pow_b = &pow_b * &pow_b;
        }
    }
    for g in qft_inverse_gates(0, t) {
        gates.push((g, GateRole::Fixed));
    }
    Ok((Circuit { gates }, n_a, n_b))
}

/// Number of gates in the comparator circuit, for error-accumulation budgets.
pub fn comparator_gate_count(u_a: &CMatrix, u_b: &CMatrix, t: usize) -> Result<usize> {
    Ok(comparator_circuit(u_a, u_b, t)?.0.gate_count())
}

/// Phase-comparator circuit: the readout register carries a `t`-bit
/// approximation to `λ_a − λ_b` (phase gradient of `u_a`, then of `u_b†`,
/// then the inverse Fourier transform).
pub fn phase_comparator(
    u_a: &CMatrix,
    u_b: &CMatrix,
    state_a: &StateVector,
    state_b: &StateVector,
    t: usize,
) -> Result<StateVector> {
    phase_comparator_run(u_a, u_b, state_a, state_b, t, None)
}

pub fn phase_comparator_run(
    u_a: &CMatrix,
    u_b: &CMatrix,
    state_a: &StateVector,
    state_b: &StateVector,
    t: usize,
    noise: Option<&NoiseSpec>,
) -> Result<StateVector> {
    if t == 0 {
        return Err(Error::InvalidArgument("comparator needs t >= 1".into()));
    }
    let (circuit, n_a, n_b) = comparator_circuit(u_a, u_b, t)?;
    if state_a.dim() != u_a.nrows() || state_b.dim() != u_b.nrows() {
        return Err(Error::DimensionMismatch(
            "eigenstate registers do not match the comparator unitaries".into(),
        ));
    }
    let mut state = StateVector::zero_state(t)?.tensor(state_a)?.tensor(state_b)?;
    debug_assert_eq!(state.num_qubits, t + n_a + n_b);
    circuit.run(&mut state, noise)?;
    Ok(state)
}

/// Marginal readout distribution over signed labels `L ∈ (−2^{t−1}, 2^{t−1}]`.
pub fn readout_distribution(state: &StateVector, t: usize) -> Vec<(i64, f64)> {
    let outcomes = 1usize << t;
    let rest = state.dim() >> t;
    let half = (outcomes / 2) as i64;
    let mut dist: Vec<(i64, f64)> = Vec::with_capacity(outcomes);
    for m in 0..outcomes {
        let mut p = 0.0;
        for s in 0..rest {
            p += state.amplitudes[m * rest + s].norm_sqr();
        }
        let label = if (m as i64) <= half { m as i64 } else { m as i64 - outcomes as i64 };
        dist.push((label, p));
    }
    dist.sort_by_key(|&(l, _)| l);
    dist
}

/// Joint amplitudes at a fixed system basis index, keyed by signed label.
pub fn readout_amplitudes(state: &StateVector, t: usize, system_index: usize) -> Vec<(i64, Complex64)> {
    let outcomes = 1usize << t;
    let rest = state.dim() >> t;
    let half = (outcomes / 2) as i64;
    let mut amps: Vec<(i64, Complex64)> = Vec::with_capacity(outcomes);
    for m in 0..outcomes {
        let label = if (m as i64) <= half { m as i64 } else { m as i64 - outcomes as i64 };
        amps.push((label, state.amplitudes[m * rest + system_index]));
    }
    amps.sort_by_key(|&(l, _)| l);
    amps
}

/// Probability of a non-positive readout.
pub fn low_half_probability(state: &StateVector, t: usize) -> f64 {
    readout_distribution(state, t)
        .into_iter()
        .filter(|&(l, _)| l <= 0)
        .map(|(_, p)| p)
        .sum()
}

/// Single-qubit phase unitary `diag(e^{2πi·phase}, 1)`: its `|0⟩` eigenstate
/// carries the phase, matching the encoding of parameters into local terms.
pub fn phase_unitary(phase: f64) -> CMatrix {
    let mut m = CMatrix::identity(2, 2);
    m[(0, 0)] = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase);
    m
}

/// Dense DFT matrix `F[j,k] = e^{2πijk/T}/√T`, for validating the gate-level
/// transform.
pub fn dft_matrix(t: usize) -> CMatrix {
    let dim = 1usize << t;
    let scale = 1.0 / (dim as f64).sqrt();
    DMatrix::from_fn(dim, dim, |j, k| {
        Complex64::from_polar(scale, 2.0 * std::f64::consts::PI * (j * k) as f64 / dim as f64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpe::{self, QpePoint};
    use approx::assert_abs_diff_eq;

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero_state(1).unwrap();
        apply(&mut s, &Gate::hadamard(0)).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((s.amplitudes[0] - Complex64::new(h, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes[1] - Complex64::new(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_flips_target() {
        let mut s = StateVector::basis_state(2, 0b10).unwrap();
        apply(&mut s, &Gate::cnot(0, 1)).unwrap();
        assert!((s.amplitudes[0b11] - C_ONE).norm() < 1e-15);
    }

    #[test]
    fn zero_angle_phase_is_identity() {
        let mut s = StateVector::basis_state(2, 0b01).unwrap();
        let before = s.clone();
        apply(&mut s, &Gate::diagonal_phase(0.0, 1)).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn norm_preserved_by_random_circuit() {
        let mut s = StateVector::zero_state(4).unwrap();
        let gates = [
            Gate::hadamard(0),
            Gate::cnot(0, 2),
            Gate::t_gate(2),
            Gate::phase_r(3, 1),
            Gate::hadamard(3),
            Gate::cnot(3, 1),
        ];
        for g in &gates {
            apply(&mut s, g).unwrap();
            assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn qft_inverse_matches_dense_dft() {
        let t = 4;
        let dim = 1usize << t;
        let f = dft_matrix(t);
        for j in [0usize, 3, 7, 12] {
            // Start from F|j⟩ and expect |j⟩ back.
            let col: Vec<Complex64> = (0..dim).map(|k| f[(k, j)]).collect();
            let mut s = StateVector::from_amplitudes(col).unwrap();
            for g in qft_inverse_gates(0, t) {
                apply(&mut s, &g).unwrap();
            }
            assert!((s.amplitudes[j] - C_ONE).norm() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn qpe_exact_phase_deterministic() {
        let t = 4;
        let k = 5u64;
        let u = phase_unitary(k as f64 / 16.0);
        let eigen = StateVector::basis_state(1, 0).unwrap();
        let out = qpe_circuit(&u, &eigen, t).unwrap();
        let dist = readout_distribution(&out, t);
        let peak = dist.iter().find(|&&(l, _)| l == k as i64).unwrap();
        assert_abs_diff_eq!(peak.1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn qpe_matches_closed_form_amplitudes() {
        let t = 3;
        let xi = 0.3;
        let u = phase_unitary(xi);
        let eigen = StateVector::basis_state(1, 0).unwrap();
        let out = qpe_circuit(&u, &eigen, t).unwrap();
        let amps = readout_amplitudes(&out, t, 0);
        let point = QpePoint::new(t as u32, xi).unwrap();
        for (label, amp) in amps {
            let expected = qpe::alpha(point, label).unwrap();
            assert!(
                (amp - expected).norm() < 1e-12,
                "label {label}: circuit {amp} vs closed form {expected}"
            );
        }
    }

    #[test]
    fn comparator_equal_phases_peak_at_zero() {
        let u = phase_unitary(0.2371);
        let e = StateVector::basis_state(1, 0).unwrap();
        let out = phase_comparator(&u, &u, &e, &e, 4).unwrap();
        let dist = readout_distribution(&out, 4);
        let zero = dist.iter().find(|&&(l, _)| l == 0).unwrap();
        assert_abs_diff_eq!(zero.1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn comparator_exact_fraction_deterministic() {
        let t = 5;
        let u_a = phase_unitary(0.40625); // 13/32
        let u_b = phase_unitary(0.25); // 8/32
        let e = StateVector::basis_state(1, 0).unwrap();
        let out = phase_comparator(&u_a, &u_b, &e, &e, t).unwrap();
        let dist = readout_distribution(&out, t);
        let peak = dist.iter().find(|&&(l, _)| l == 5).unwrap();
        assert_abs_diff_eq!(peak.1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn comparator_generic_matches_profile() {
        let t = 4;
        let (la, lb) = (0.3141, 0.2449);
        let u_a = phase_unitary(la);
        let u_b = phase_unitary(lb);
        let e = StateVector::basis_state(1, 0).unwrap();
        let out = phase_comparator(&u_a, &u_b, &e, &e, t).unwrap();
        let point = QpePoint::new(t as u32, la - lb).unwrap();
        let profile = qpe::profile(point).unwrap();
        for (label, p) in readout_distribution(&out, t) {
            assert!(
                (p - profile.mass_at(label)).abs() < 1e-12,
                "label {label}: circuit {p} vs profile {}",
                profile.mass_at(label)
            );
        }
    }

    #[test]
    fn noise_zero_is_exact() {
        let u = phase_unitary(0.1);
        let e = StateVector::basis_state(1, 0).unwrap();
        let noise = NoiseSpec::new(0.0, 7).unwrap();
        let a = phase_comparator_run(&u, &u, &e, &e, 3, Some(&noise)).unwrap();
        let b = phase_comparator(&u, &u, &e, &e, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perturbation_within_budget() {
        let g = Gate::hadamard(0).matrix().unwrap();
        for seed in 0..20u64 {
            let eps = 1e-3;
            let noisy = perturbed_unitary(&g, eps, seed);
            let dist = spectral_norm(&(&noisy - &g));
            assert!(dist <= eps + 1e-12, "seed {seed}: {dist} > {eps}");
            assert!(crate::linalg::unitarity_deviation(&noisy) < 1e-10);
        }
    }

    #[test]
    fn noise_accumulates_at_most_linearly() {
        let t = 4;
        let u = phase_unitary(0.171);
        let e = StateVector::basis_state(1, 0).unwrap();
        let eps = 1e-4;
        let gate_count = comparator_gate_count(&u, &u, t).unwrap();
        for seed in [1u64, 2, 3] {
            let noise = NoiseSpec::new(eps, seed).unwrap();
            let noisy = phase_comparator_run(&u, &u, &e, &e, t, Some(&noise)).unwrap();
            let exact = phase_comparator(&u, &u, &e, &e, t).unwrap();
            let dev = noisy.l2_deviation(&exact);
            assert!(
                dev <= gate_count as f64 * eps,
                "seed {seed}: deviation {dev} > {} * {eps}",
                gate_count
            );
        }
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            StateVector::zero_state(MAX_QUBITS + 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn out_of_range_target_rejected() {
        let mut s = StateVector::zero_state(2).unwrap();
        assert!(apply(&mut s, &Gate::hadamard(5)).is_err());
    }
}
