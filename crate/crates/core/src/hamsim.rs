//! Trotterized time evolution of translationally invariant nearest-neighbour
//! chains, with an exact-exponential oracle and effective-Hamiltonian
//! distance measurement.
//!
//! One product step applies every local term for time `δ/2` twice in the same
//! sweep order, so the per-step defect is `O(z δ²)` and the accumulated error
//! over `T/δ` steps is `O(T δ z)` — the rates the downstream gate-budget
//! arguments charge for.

use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::linalg::{
    check_hermitian, exp_i_hermitian, hermitize, identity, kron, spectral_norm,
    unitary_log_hermitian, CMatrix, HERMITICITY_TOL,
};
use crate::{Error, Result};

/// Dense cap on the assembled chain dimension.
pub const MAX_DENSE_DIM: usize = 1 << 12;

/// A translationally invariant nearest-neighbour chain given by its local
/// terms, with a lazily built eigendecomposition of the assembled matrix.
#[derive(Debug)]
pub struct ChainHamiltonian {
    pub local_dim: usize,
    pub length: usize,
    pub two_site_term: CMatrix,
    pub one_site_term: Option<CMatrix>,
    assembled: OnceLock<CMatrix>,
    eigen: OnceLock<(Vec<f64>, CMatrix)>,
}

impl Clone for ChainHamiltonian {
    fn clone(&self) -> Self {
        Self {
            local_dim: self.local_dim,
            length: self.length,
            two_site_term: self.two_site_term.clone(),
            one_site_term: self.one_site_term.clone(),
            assembled: OnceLock::new(),
            eigen: OnceLock::new(),
        }
    }
}

impl ChainHamiltonian {
    pub fn new(
        local_dim: usize,
        length: usize,
        two_site_term: CMatrix,
        one_site_term: Option<CMatrix>,
    ) -> Result<Self> {
        if local_dim < 2 {
            return Err(Error::InvalidArgument("local dimension must be at least 2".into()));
        }
        if length < 1 {
            return Err(Error::InvalidArgument("chain length must be at least 1".into()));
        }
        let d2 = local_dim * local_dim;
        if two_site_term.nrows() != d2 || two_site_term.ncols() != d2 {
            return Err(Error::DimensionMismatch(format!(
                "two-site term must be {d2}x{d2}, got {}x{}",
                two_site_term.nrows(),
                two_site_term.ncols()
            )));
        }
        check_hermitian(&two_site_term, HERMITICITY_TOL)?;
        let norm = spectral_norm(&two_site_term);
        if norm > 1.0 + 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "two-site term norm {norm} exceeds the unit normalization"
            )));
        }
        if let Some(h1) = &one_site_term {
            if h1.nrows() != local_dim || h1.ncols() != local_dim {
                return Err(Error::DimensionMismatch(format!(
                    "one-site term must be {local_dim}x{local_dim}, got {}x{}",
                    h1.nrows(),
                    h1.ncols()
                )));
            }
            check_hermitian(h1, HERMITICITY_TOL)?;
        }
        let dim = local_dim.checked_pow(length as u32).ok_or(Error::CapExceeded {
            requested: usize::MAX,
            cap: MAX_DENSE_DIM,
        })?;
        if dim > MAX_DENSE_DIM {
            return Err(Error::CapExceeded { requested: dim, cap: MAX_DENSE_DIM });
        }
        Ok(Self {
            local_dim,
            length,
            two_site_term,
            one_site_term,
            assembled: OnceLock::new(),
            eigen: OnceLock::new(),
        })
    }

    /// Same local terms on a chain of different length.
    pub fn with_length(&self, length: usize) -> Result<Self> {
        Self::new(self.local_dim, length, self.two_site_term.clone(), self.one_site_term.clone())
    }

    pub fn dim(&self) -> usize {
        self.local_dim.pow(self.length as u32)
    }

    /// Local terms embedded into the chain, in sweep order: one-site terms by
    /// site, then bond terms left to right.
    pub fn embedded_terms(&self) -> Vec<CMatrix> {
        let d = self.local_dim;
        let mut terms = Vec::new();
        if let Some(h1) = &self.one_site_term {
            for i in 0..self.length {
                terms.push(embed(h1, d, self.length, i, 1));
            }
        }
        if self.length >= 2 {
            for i in 0..self.length - 1 {
                terms.push(embed(&self.two_site_term, d, self.length, i, 2));
            }
        }
        terms
    }

    /// The assembled chain matrix, built once.
    pub fn assembled(&self) -> &CMatrix {
        self.assembled.get_or_init(|| {
            let dim = self.dim();
            let mut h = CMatrix::zeros(dim, dim);
            for term in self.embedded_terms() {
                h += term;
            }
            h
        })
    }

    /// Eigendecomposition of the assembled matrix, built once and shared.
    pub fn eigen(&self) -> &(Vec<f64>, CMatrix) {
        self.eigen.get_or_init(|| {
            crate::linalg::hermitian_eigen(self.assembled())
                .expect("assembled chain matrix is Hermitian")
        })
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigen().0[0]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen().0
    }
}

fn embed(term: &CMatrix, local_dim: usize, length: usize, site: usize, span: usize) -> CMatrix {
    let left = local_dim.pow(site as u32);
    let right = local_dim.pow((length - site - span) as u32);
    kron(&kron(&identity(left), term), &identity(right))
}

/// Step plan for the product-formula evolution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub total_time: f64,
    pub step: f64,
    /// Each local term is applied twice per step at half the step time.
    pub order: u32,
}

impl TrotterPlan {
    pub fn new(total_time: f64, step: f64) -> Result<Self> {
        if !(total_time > 0.0) || !(step > 0.0) {
            return Err(Error::InvalidArgument(
                "total time and step must be positive".into(),
            ));
        }
        Ok(Self { total_time, step, order: 2 })
    }

    /// Step count rounds `T/δ` up; the error bound is monotone in `δ`.
    pub fn steps(&self) -> usize {
        (self.total_time / self.step).ceil().max(1.0) as usize
    }

    /// The step actually taken after rounding.
    pub fn effective_step(&self) -> f64 {
        self.total_time / self.steps() as f64
    }
}

/// `U(T) = exp(iHT)` through the cached eigendecomposition.
pub fn exact_evolution(h: &ChainHamiltonian, time: f64) -> CMatrix {
    let (eigs, vecs) = h.eigen();
    let phases = nalgebra::DVector::from_iterator(
        eigs.len(),
        eigs.iter().map(|&e| num_complex::Complex64::from_polar(1.0, e * time)),
    );
    vecs * CMatrix::from_diagonal(&phases) * vecs.adjoint()
}

/// One product step at step size `delta`.
pub fn trotter_step(h: &ChainHamiltonian, delta: f64) -> CMatrix {
    let dim = h.dim();
    let mut half_sweep = identity(dim);
    for term in h.embedded_terms() {
        let u = exp_i_hermitian(&term, delta / 2.0).expect("embedded term is Hermitian");
        half_sweep = u * half_sweep;
    }
    &half_sweep * &half_sweep
}

/// The composed product-formula unitary `Ũ(T)`.
pub fn trotter2(h: &ChainHamiltonian, plan: &TrotterPlan) -> CMatrix {
    let step = trotter_step(h, plan.effective_step());
    crate::circuit::matrix_power(&step, plan.steps() as u64)
}

/// Outcome of an effective-Hamiltonian distance measurement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EffectiveHamiltonianDistance {
    /// `‖H' − H‖` where `approx_u = exp(iH's)`.
    pub distance: f64,
    /// `‖approx_u − exp(iHs)‖`, the unitary-level defect.
    pub epsilon: f64,
    /// Measured `κ = distance · s / ε`; `O(1)` for product-formula defects.
    pub kappa: f64,
}

/// Recover the generator of `approx_u` on the principal branch and measure
/// its distance to `h`. Requires `‖H‖·s ≤ π/4` so the branch is unambiguous.
pub fn effective_hamiltonian_distance(
    h: &ChainHamiltonian,
    approx_u: &CMatrix,
    s: f64,
) -> Result<EffectiveHamiltonianDistance> {
    if s <= 0.0 {
        return Err(Error::InvalidArgument("evolution time s must be positive".into()));
    }
    let assembled = h.assembled();
    let h_norm = spectral_norm(assembled);
    if h_norm * s > std::f64::consts::FRAC_PI_4 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "‖H‖·s = {:.6} exceeds π/4; principal branch not guaranteed",
            h_norm * s
        )));
    }
    let generator = unitary_log_hermitian(approx_u)?;
    let h_prime = generator.scale(1.0 / s);
    let distance = spectral_norm(&hermitize(&(&h_prime - assembled)));
    let exact = exact_evolution(h, s);
    let epsilon = spectral_norm(&(approx_u - exact));
    let kappa = if epsilon > 0.0 { distance * s / epsilon } else { 0.0 };
    Ok(EffectiveHamiltonianDistance { distance, epsilon, kappa })
}

/// Summary emitted by the `trotter` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrotterReport {
    pub sites: usize,
    pub total_time: f64,
    pub step: f64,
    pub steps: usize,
    /// `‖Ũ(T) − U(T)‖`.
    pub error: f64,
    pub kappa_estimate: Option<f64>,
}

/// Run the benchmark chain (see [`benchmark_chain`]) at one `(T, δ)` point.
pub fn trotter_report(sites: usize, total_time: f64, step: f64) -> Result<TrotterReport> {
    let h = benchmark_chain(sites)?;
    let plan = TrotterPlan::new(total_time, step)?;
    let approx = trotter2(&h, &plan);
    let exact = exact_evolution(&h, total_time);
    let error = spectral_norm(&(&approx - &exact));
    // κ is measured on a single short pulse where the principal branch holds.
    let kappa_estimate = {
        let h_norm = spectral_norm(h.assembled());
        let s = (std::f64::consts::FRAC_PI_4 / h_norm).min(plan.effective_step());
        let pulse_plan = TrotterPlan::new(s, s / 4.0)?;
        let pulse = trotter2(&h, &pulse_plan);
        effective_hamiltonian_distance(&h, &pulse, s).ok().map(|d| d.kappa)
    };
    Ok(TrotterReport {
        sites,
        total_time,
        step,
        steps: plan.steps(),
        error,
        kappa_estimate,
    })
}

/// The qubit chain used by the product-formula benchmarks: a non-commuting
/// mix of Ising-like coupling and a transverse field, unit-normalized.
pub fn benchmark_chain(sites: usize) -> Result<ChainHamiltonian> {
    use num_complex::Complex64;
    let zz = {
        let mut m = CMatrix::zeros(4, 4);
        for (i, sign) in [(0usize, 1.0), (1, -1.0), (2, -1.0), (3, 1.0)] {
            m[(i, i)] = Complex64::new(sign, 0.0);
        }
        m
    };
    let xi = {
        // X ⊗ 1 + 1 ⊗ X
        let x = CMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        kron(&x, &identity(2)) + kron(&identity(2), &x)
    };
    let term = (zz + xi.scale(0.45)).scale(0.5);
    let norm = spectral_norm(&term);
    ChainHamiltonian::new(2, sites, term.scale(1.0 / norm.max(1.0)), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn diagonal_chain(z: usize) -> ChainHamiltonian {
        let mut h2 = CMatrix::zeros(4, 4);
        for (i, v) in [(0usize, 0.1), (1, 0.35), (2, -0.2), (3, 0.6)] {
            h2[(i, i)] = Complex64::new(v, 0.0);
        }
        ChainHamiltonian::new(2, z, h2, None).unwrap()
    }

    #[test]
    fn evolution_at_time_zero_is_identity() {
        let h = benchmark_chain(3).unwrap();
        let u = exact_evolution(&h, 0.0);
        assert!(spectral_norm(&(u - identity(8))) < 1e-12);
    }

    #[test]
    fn diagonal_chain_evolves_elementwise() {
        let h = diagonal_chain(3);
        let t = 0.7;
        let u = exact_evolution(&h, t);
        let assembled = h.assembled();
        for i in 0..h.dim() {
            let expect = Complex64::from_polar(1.0, assembled[(i, i)].re * t);
            assert!((u[(i, i)] - expect).norm() < 1e-10, "entry {i}");
        }
    }

    #[test]
    fn evolution_group_property() {
        let h = benchmark_chain(3).unwrap();
        let u1 = exact_evolution(&h, 0.3);
        let u2 = exact_evolution(&h, 0.5);
        let u12 = exact_evolution(&h, 0.8);
        assert!(spectral_norm(&(u1 * u2 - u12)) < 1e-10);
    }

    #[test]
    fn trotter_exact_for_commuting_terms() {
        let h = diagonal_chain(4);
        let plan = TrotterPlan::new(1.3, 0.1).unwrap();
        let approx = trotter2(&h, &plan);
        let exact = exact_evolution(&h, 1.3);
        assert!(spectral_norm(&(approx - exact)) < 1e-10);
    }

    #[test]
    fn trotter_exact_for_single_bond() {
        let h = benchmark_chain(2).unwrap();
        for step in [0.5, 0.05] {
            let plan = TrotterPlan::new(1.0, step).unwrap();
            let approx = trotter2(&h, &plan);
            let exact = exact_evolution(&h, 1.0);
            assert!(spectral_norm(&(approx - exact)) < 1e-10, "step {step}");
        }
    }

    #[test]
    fn halving_step_halves_error() {
        let h = benchmark_chain(4).unwrap();
        let t = 1.0;
        let exact = exact_evolution(&h, t);
        let mut errors = Vec::new();
        for k in 0..4 {
            let step = 0.02 / 2f64.powi(k);
            let plan = TrotterPlan::new(t, step).unwrap();
            errors.push(spectral_norm(&(trotter2(&h, &plan) - &exact)));
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2.0).abs() < 0.3, "halving ratio {ratio}");
        }
    }

    #[test]
    fn per_step_defect_is_second_order() {
        let h = benchmark_chain(4).unwrap();
        let mut errs = Vec::new();
        let deltas = [0.08, 0.04, 0.02, 0.01];
        for &delta in &deltas {
            let one = trotter_step(&h, delta);
            let exact = exact_evolution(&h, delta);
            errs.push(spectral_norm(&(one - exact)));
        }
        for w in 0..errs.len() - 1 {
            let slope = (errs[w] / errs[w + 1]).log2();
            assert!((slope - 2.0).abs() < 0.2, "per-step slope {slope}");
        }
    }

    #[test]
    fn effective_hamiltonian_distance_zero_for_exact() {
        let h = benchmark_chain(3).unwrap();
        let s = 0.1;
        let u = exact_evolution(&h, s);
        let d = effective_hamiltonian_distance(&h, &u, s).unwrap();
        assert!(d.distance < 1e-9, "distance {}", d.distance);
    }

    #[test]
    fn effective_hamiltonian_kappa_order_one() {
        let h = benchmark_chain(4).unwrap();
        let s = 0.2;
        for step in [0.05, 0.02, 0.01] {
            let plan = TrotterPlan::new(s, step).unwrap();
            let approx = trotter2(&h, &plan);
            let d = effective_hamiltonian_distance(&h, &approx, s).unwrap();
            assert!(d.kappa < 10.0, "step {step}: kappa {}", d.kappa);
            assert!(d.distance <= d.kappa * d.epsilon / s + 1e-15);
        }
    }

    #[test]
    fn eigenvalue_drift_along_power_ladder() {
        let h = benchmark_chain(3).unwrap();
        let s = 0.15;
        let plan = TrotterPlan::new(s, 0.01).unwrap();
        let approx = trotter2(&h, &plan);
        let d = effective_hamiltonian_distance(&h, &approx, s).unwrap();
        let h_prime = unitary_log_hermitian(&approx).unwrap().scale(1.0 / s);
        let lam = h.ground_energy();
        let lam_prime = crate::linalg::hermitian_eigen(&h_prime).unwrap().0[0];
        for t_factor in [2.0, 4.0, 8.0] {
            let scale = std::f64::consts::PI * t_factor;
            let drift = (scale * lam - scale * lam_prime).abs();
            assert!(
                drift <= scale * d.distance + 1e-12,
                "T={t_factor}: drift {drift} vs {}",
                scale * d.distance
            );
        }
    }

    #[test]
    fn weyl_ground_energy_transfer() {
        let h = benchmark_chain(3).unwrap();
        let eps = 1e-3;
        let perturbation = crate::circuit::perturbed_unitary(&identity(h.dim()), eps, 11)
            - identity(h.dim());
        let perturbed = hermitize(&(h.assembled() + &perturbation));
        let shifted = crate::linalg::hermitian_eigen(&perturbed).unwrap().0[0];
        let size = spectral_norm(&hermitize(&perturbation));
        assert!((shifted - h.ground_energy()).abs() <= size + 1e-12);
    }

    #[test]
    fn branch_precondition_enforced() {
        let h = benchmark_chain(3).unwrap();
        let u = exact_evolution(&h, 50.0);
        assert!(effective_hamiltonian_distance(&h, &u, 50.0).is_err());
    }

    #[test]
    fn plan_rounds_step_count_up() {
        let plan = TrotterPlan::new(1.0, 0.3).unwrap();
        assert_eq!(plan.steps(), 4);
        assert_abs_diff_eq!(plan.effective_step(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn norm_cap_on_two_site_term() {
        let mut h2 = CMatrix::zeros(4, 4);
        h2[(0, 0)] = Complex64::new(3.0, 0.0);
        assert!(ChainHamiltonian::new(2, 3, h2, None).is_err());
    }
}
