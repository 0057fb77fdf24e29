//! Exact diagonalization, iterative extremal eigenvalues, the critical XY
//! chain in closed form, and gap classification under the finite-size
//! criterion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{check_hermitian, hermitian_eigen, CMatrix, HERMITICITY_TOL};
use crate::{Error, Result};

/// Dense diagonalization cap (matrix dimension).
pub const DENSE_CAP: usize = 1 << 14;
/// Matrix-free iterative cap (operator dimension).
pub const ITERATIVE_CAP: usize = 1 << 22;
/// Two eigenvalues closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// A sorted spectrum with its ground degeneracy and spectral gap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Ascending eigenvalues (possibly truncated to the low-lying part).
    pub eigenvalues: Vec<f64>,
    pub ground_degeneracy: usize,
    /// `λ₁ − λmin`, reported as 0 for a degenerate ground space.
    pub gap: f64,
}

impl SpectrumResult {
    pub fn from_sorted(eigenvalues: Vec<f64>) -> Self {
        let ground_degeneracy = match eigenvalues.first() {
            Some(&e0) => eigenvalues.iter().take_while(|&&e| e - e0 < DEGENERACY_TOL).count(),
            None => 0,
        };
        let gap = if eigenvalues.len() < 2 || ground_degeneracy > 1 {
            0.0
        } else {
            eigenvalues[1] - eigenvalues[0]
        };
        Self { eigenvalues, ground_degeneracy, gap }
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    /// Largest spacing between consecutive levels within `[λmin, λmin + c]`.
    pub fn max_low_spacing(&self, c: f64) -> f64 {
        let e0 = match self.eigenvalues.first() {
            Some(&e) => e,
            None => return f64::NAN,
        };
        let low: Vec<f64> =
            self.eigenvalues.iter().copied().take_while(|&e| e <= e0 + c).collect();
        low.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Full spectrum of an assembled Hermitian matrix.
pub fn diagonalize(h: &CMatrix) -> Result<SpectrumResult> {
    if h.nrows() > DENSE_CAP {
        return Err(Error::CapExceeded { requested: h.nrows(), cap: DENSE_CAP });
    }
    check_hermitian(h, HERMITICITY_TOL)?;
    // Real-symmetric fast path.
    let is_real = h.iter().all(|z| z.im.abs() < 1e-14);
    let mut eigs: Vec<f64> = if is_real {
        let hr = nalgebra::DMatrix::<f64>::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)].re);
        hr.symmetric_eigen().eigenvalues.iter().copied().collect()
    } else {
        hermitian_eigen(h)?.0
    };
    eigs.sort_by(f64::total_cmp);
    Ok(SpectrumResult::from_sorted(eigs))
}

/// Ground state (lowest eigenvector) of a dense Hermitian matrix.
pub fn ground_state(h: &CMatrix) -> Result<(f64, Vec<Complex64>)> {
    let (eigs, vecs) = hermitian_eigen(h)?;
    Ok((eigs[0], vecs.column(0).iter().copied().collect()))
}

/// A Hermitian operator given by its matrix-vector product.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]);
}

/// Dense matrix as a [`LinearOperator`].
pub struct DenseOp<'a>(pub &'a CMatrix);

impl LinearOperator for DenseOp<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.0[(i, j)] * v[j];
            }
            out[i] = acc;
        }
    }
}

/// Matrix-free open XX chain `H = (1/4) Σ (XᵢXᵢ₊₁ + YᵢYᵢ₊₁)`.
///
/// The prefactor makes the single-particle modes `cos(kπ/(L+1))`, so the
/// many-body gap decays as `Θ(1/L)` with constant near `π/2`.
pub struct XxChainOp {
    pub length: usize,
}

impl LinearOperator for XxChainOp {
    fn dim(&self) -> usize {
        1 << self.length
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        let l = self.length;
        for bond in 0..l - 1 {
            // (XX + YY)/4 maps |01⟩ ↔ |10⟩ with coefficient 1/2.
            let hi = 1usize << (l - 1 - bond);
            let lo = 1usize << (l - 2 - bond);
            let mask = hi | lo;
            for idx in 0..v.len() {
                let pair = idx & mask;
                if pair == hi || pair == lo {
                    out[idx ^ mask] += 0.5 * v[idx];
                }
            }
        }
    }
}

/// Lowest `k` eigenvalues by Lanczos iteration with full
/// reorthogonalization; deterministic for a fixed seed.
pub fn extremal_eigs(op: &dyn LinearOperator, k: usize, seed: u64) -> Result<Vec<f64>> {
    extremal_eigs_with(op, k, seed, 1e-10, 600)
}

pub fn extremal_eigs_with(
    op: &dyn LinearOperator,
    k: usize,
    seed: u64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    use rand::Rng;
    use rand::SeedableRng;

    let n = op.dim();
    if n > ITERATIVE_CAP {
        return Err(Error::CapExceeded { requested: n, cap: ITERATIVE_CAP });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k={k} outside 1..={n}")));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    normalize(&mut v);

    let mut basis: Vec<Vec<Complex64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut previous_ritz: Option<Vec<f64>> = None;

    let limit = max_iter.min(n);
    for j in 0..limit {
        op.apply(&basis[j], &mut w);
        if j > 0 {
            let beta = betas[j - 1];
            if beta > 0.0 {
                for i in 0..n {
                    w[i] -= beta * basis[j - 1][i];
                }
            }
        }
        let alpha = dot(&basis[j], &w).re;
        alphas.push(alpha);
        for i in 0..n {
            w[i] -= alpha * basis[j][i];
        }
        // Full reorthogonalization, twice for stability.
        for _ in 0..2 {
            for b in &basis {
                let overlap = dot(b, &w);
                for i in 0..n {
                    w[i] -= overlap * b[i];
                }
            }
        }
        let beta = norm(&w);
        if beta < 1e-12 {
            // Invariant subspace exhausted; restart in the complement or stop.
            if basis.len() >= n {
                break;
            }
            let mut fresh: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            for b in &basis {
                let overlap = dot(b, &fresh);
                for i in 0..n {
                    fresh[i] -= overlap * b[i];
                }
            }
            normalize(&mut fresh);
            betas.push(0.0);
            basis.push(fresh);
            continue;
        }
        betas.push(beta);
        let mut next = w.clone();
        for x in &mut next {
            *x /= beta;
        }
        basis.push(next);

        if alphas.len() >= k + 2 && alphas.len() % 5 == 0 {
            let ritz = tridiagonal_eigenvalues(&alphas, &betas);
            if converged(&previous_ritz, &ritz, k, tol) {
                return Ok(ritz.into_iter().take(k).collect());
            }
            previous_ritz = Some(ritz);
        }
    }
    let ritz = tridiagonal_eigenvalues(&alphas, &betas);
    if ritz.len() >= k {
        if converged(&previous_ritz, &ritz, k, tol) || alphas.len() >= n {
            return Ok(ritz.into_iter().take(k).collect());
        }
    }
    Err(Error::NoConvergence(format!(
        "Lanczos did not stabilize the lowest {k} values within {limit} iterations"
    )))
}

fn converged(previous: &Option<Vec<f64>>, ritz: &[f64], k: usize, tol: f64) -> bool {
    match previous {
        Some(prev) if prev.len() >= k && ritz.len() >= k => {
            (0..k).all(|i| (prev[i] - ritz[i]).abs() < tol)
        }
        _ => false,
    }
}

fn tridiagonal_eigenvalues(alphas: &[f64], betas: &[f64]) -> Vec<f64> {
    let m = alphas.len();
    let mut t = nalgebra::DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let mut eigs: Vec<f64> = t.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let n = norm(v);
    for x in v.iter_mut() {
        *x /= n;
    }
}

// ---------------------------------------------------------------------------
// Critical XY chain in closed form
// ---------------------------------------------------------------------------

/// Single-particle modes `cos(kπ/(L+1))`, `k = 1..L`, of the open XX chain
/// with coupling 1/4.
pub fn xy_single_particle_modes(length: usize) -> Vec<f64> {
    (1..=length)
        .map(|k| (k as f64 * std::f64::consts::PI / (length as f64 + 1.0)).cos())
        .collect()
}

/// Raw many-body ground energy: the filled Fermi sea.
pub fn xy_ground_energy(length: usize) -> f64 {
    xy_single_particle_modes(length).iter().filter(|&&e| e < 0.0).sum()
}

/// Lowest subset sums of nonnegative values, ascending, with repetitions.
fn smallest_subset_sums(mut values: Vec<f64>, max_levels: usize) -> Vec<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mut out = Vec::with_capacity(max_levels);
    out.push(0.0);
    if n == 0 || max_levels <= 1 {
        return out;
    }
    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
        }
    }
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(Entry(values[0], 0)));
    while let Some(Reverse(Entry(sum, last))) = heap.pop() {
        out.push(sum);
        if out.len() >= max_levels {
            break;
        }
        if last + 1 < n {
            heap.push(Reverse(Entry(sum + values[last + 1], last + 1)));
            heap.push(Reverse(Entry(sum - values[last] + values[last + 1], last + 1)));
        }
    }
    out
}

/// Shifted many-body spectrum of the critical XY chain (ground energy 0).
///
/// Full enumeration up to 16 sites; the lowest 4096 levels beyond that.
pub fn xy_spectrum(length: usize) -> Result<SpectrumResult> {
    if length < 2 {
        return Err(Error::InvalidArgument("XY chain needs length >= 2".into()));
    }
    let excitations: Vec<f64> = xy_single_particle_modes(length).iter().map(|e| e.abs()).collect();
    let levels = if length <= 16 {
        let mut all = Vec::with_capacity(1 << length);
        all.push(0.0);
        for &e in &excitations {
            let m = all.len();
            for i in 0..m {
                all.push(all[i] + e);
            }
        }
        all.sort_by(f64::total_cmp);
        all
    } else {
        smallest_subset_sums(excitations, 4096)
    };
    Ok(SpectrumResult::from_sorted(levels))
}

/// The raw (unshifted) low-lying XX-chain spectrum, for cross-checking the
/// iterative solver.
pub fn xy_raw_low_spectrum(length: usize, levels: usize) -> Result<Vec<f64>> {
    let shifted = xy_spectrum(length)?;
    let ground = xy_ground_energy(length);
    Ok(shifted.eigenvalues.into_iter().take(levels).map(|e| e + ground).collect())
}

// ---------------------------------------------------------------------------
// Gap classification
// ---------------------------------------------------------------------------

/// Polynomial with ascending coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }
}

/// Finite-size gap criterion: gapped when `Δ ≥ 1/p(L₀)`, gapless when
/// `Δ ≤ 1/q(L₀)`. The polynomials vary between Hamiltonian classes and are
/// instance inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapCriterion {
    pub p_poly: Poly,
    pub q_poly: Poly,
    pub l0: usize,
}

impl GapCriterion {
    pub fn new(p_poly: Poly, q_poly: Poly, l0: usize) -> Result<Self> {
        let c = Self { p_poly, q_poly, l0 };
        for l in [l0, 2 * l0, 4 * l0] {
            let (p, q) = (c.p_poly.eval(l as f64), c.q_poly.eval(l as f64));
            if !(p > 0.0 && q > 0.0 && 1.0 / p > 1.0 / q) {
                return Err(Error::InvalidArgument(format!(
                    "criterion thresholds must satisfy 1/p(L) > 1/q(L) > 0 at L={l}: p={p}, q={q}"
                )));
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapClass {
    Gapped,
    Gapless,
    /// Neither threshold met: the instance breaks the promise.
    Undetermined,
}

pub fn classify_gap(spectrum: &SpectrumResult, criterion: &GapCriterion, l0: usize) -> GapClass {
    let p = criterion.p_poly.eval(l0 as f64);
    let q = criterion.q_poly.eval(l0 as f64);
    if spectrum.gap >= 1.0 / p {
        GapClass::Gapped
    } else if spectrum.gap <= 1.0 / q {
        GapClass::Gapless
    } else {
        GapClass::Undetermined
    }
}

// ---------------------------------------------------------------------------
// Order parameter
// ---------------------------------------------------------------------------

/// Per-site projector averaged over a site set.
#[derive(Debug, Clone)]
pub struct OrderParameterSpec {
    pub sites: Vec<usize>,
    pub local_projector: CMatrix,
}

impl OrderParameterSpec {
    pub fn new(sites: Vec<usize>, local_projector: CMatrix) -> Result<Self> {
        check_hermitian(&local_projector, HERMITICITY_TOL)?;
        let idem = &local_projector * &local_projector - &local_projector;
        let dev = idem.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "local projector not idempotent (deviation {dev:.3e})"
            )));
        }
        if sites.is_empty() {
            return Err(Error::InvalidArgument("order parameter needs a nonempty site set".into()));
        }
        Ok(Self { sites, local_projector })
    }
}

/// `⟨ψ| O |ψ⟩` for the averaged per-site projector on a chain of `length`
/// sites with local dimension `local_dim`.
pub fn order_parameter_expectation(
    state: &[Complex64],
    local_dim: usize,
    length: usize,
    spec: &OrderParameterSpec,
) -> Result<f64> {
    let dim = local_dim.pow(length as u32);
    if state.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs lattice dim {dim}",
            state.len()
        )));
    }
    if spec.local_projector.nrows() != local_dim {
        return Err(Error::DimensionMismatch("projector does not match local dimension".into()));
    }
    let mut total = 0.0;
    for &site in &spec.sites {
        if site >= length {
            return Err(Error::InvalidArgument(format!("site {site} outside chain")));
        }
        let stride = local_dim.pow((length - 1 - site) as u32) as isize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, amp) in state.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let a = (idx / stride as usize) % local_dim;
            for b in 0..local_dim {
                let p = spec.local_projector[(a, b)];
                if p.norm_sqr() == 0.0 {
                    continue;
                }
                let j = (idx as isize + (b as isize - a as isize) * stride) as usize;
                acc += amp.conj() * p * state[j];
            }
        }
        total += acc.re;
    }
    Ok(total / spec.sites.len() as f64)
}

// ---------------------------------------------------------------------------
// Reference models
// ---------------------------------------------------------------------------

/// Diagonal chain with product ground state `|0…0⟩` and gap 1.
pub fn trivial_chain_matrix(length: usize) -> CMatrix {
    let dim = 1usize << length;
    let mut h = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        h[(idx, idx)] = Complex64::new(idx.count_ones() as f64, 0.0);
    }
    h
}

/// Dense XX chain matrix, for cross-checking the closed form at small sizes.
pub fn xx_chain_matrix(length: usize) -> Result<CMatrix> {
    let dim = 1usize << length;
    if dim > DENSE_CAP {
        return Err(Error::CapExceeded { requested: dim, cap: DENSE_CAP });
    }
    let op = XxChainOp { length };
    let mut h = CMatrix::zeros(dim, dim);
    let mut basis = vec![Complex64::new(0.0, 0.0); dim];
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        basis[j] = Complex64::new(1.0, 0.0);
        op.apply(&basis, &mut col);
        for i in 0..dim {
            h[(i, j)] = col[i];
        }
        basis[j] = Complex64::new(0.0, 0.0);
    }
    Ok(h)
}

/// Guard + trivial + dense composite on a chain with three states per site:
/// `{0,1}` span the dense sector, `2` the trivial sector.
///
/// * the all-trivial state carries energy 0;
/// * the all-dense sector carries `shift` plus the shifted (nonnegative)
///   XX spectrum;
/// * every mixed-sector neighbour pair is penalized by 2, so partial-sector
///   states sit at 1 or above.
///
/// `shift` stands in for the checkerboard block's ground energy, applied on
/// the all-dense sector: the spectrum is `{0} ∪ (shift + dense) ∪ G` with
/// `G ⊆ [1, ∞)` exactly.
pub fn guarded_chain_matrix(length: usize, shift: f64) -> Result<CMatrix> {
    if length < 2 || length > 7 {
        return Err(Error::CapExceeded { requested: length, cap: 7 });
    }
    let dim = 3usize.pow(length as u32);
    let digits = |idx: usize| -> Vec<u8> {
        let mut v = vec![0u8; length];
        let mut x = idx;
        for i in (0..length).rev() {
            v[i] = (x % 3) as u8;
            x /= 3;
        }
        v
    };
    // Per-bond corrective constant making the full dense island nonnegative;
    // shorter islands then sit strictly above their guard floor.
    let bond_shift = -xy_ground_energy(length) / (length as f64 - 1.0);
    let mut h = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let d = digits(idx);
        let mut diag = 0.0;
        for i in 0..length - 1 {
            let a = d[i] == 2;
            let b = d[i + 1] == 2;
            if a != b {
                diag += 2.0;
            }
            if !a && !b {
                diag += bond_shift;
                if d[i] != d[i + 1] {
                    let stride_i = 3isize.pow((length - 1 - i) as u32);
                    let stride_j = 3isize.pow((length - 2 - i) as u32);
                    let delta = d[i + 1] as isize - d[i] as isize;
                    let swapped = (idx as isize + delta * stride_i - delta * stride_j) as usize;
                    h[(swapped, idx)] += Complex64::new(0.5, 0.0);
                }
            }
        }
        if d.iter().all(|&x| x != 2) {
            diag += shift;
        }
        h[(idx, idx)] += Complex64::new(diag, 0.0);
    }
    Ok(h)
}

/// The order parameter of the guarded model: `0` on the dense sector,
/// `|2⟩⟨2|` on the trivial sector.
pub fn guarded_order_parameter(sites: Vec<usize>) -> Result<OrderParameterSpec> {
    let mut p = CMatrix::zeros(3, 3);
    p[(2, 2)] = Complex64::new(1.0, 0.0);
    OrderParameterSpec::new(sites, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_chain_has_gap_one() {
        let h = trivial_chain_matrix(4);
        let s = diagonalize(&h).unwrap();
        assert_abs_diff_eq!(s.ground_energy(), 0.0, epsilon = 1e-12);
        assert_eq!(s.ground_degeneracy, 1);
        assert_abs_diff_eq!(s.gap, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pauli_z_eigenvalues() {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = Complex64::new(1.0, 0.0);
        h[(1, 1)] = Complex64::new(-1.0, 0.0);
        let s = diagonalize(&h).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(diagonalize(&h).is_err());
    }

    #[test]
    fn lanczos_matches_known_tridiagonal_spectrum() {
        // Laplacian-like matrix with spectrum 2 - 2cos(kπ/(n+1)).
        let n = 64;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(2.0, 0.0);
            if i + 1 < n {
                m[(i, i + 1)] = Complex64::new(-1.0, 0.0);
                m[(i + 1, i)] = Complex64::new(-1.0, 0.0);
            }
        }
        let got = extremal_eigs(&DenseOp(&m), 3, 42).unwrap();
        for (k, val) in got.iter().enumerate() {
            let expect =
                2.0 - 2.0 * ((k as f64 + 1.0) * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((val - expect).abs() < 1e-8, "k={k}: {val} vs {expect}");
        }
    }

    #[test]
    fn lanczos_deterministic_for_fixed_seed() {
        let op = XxChainOp { length: 8 };
        let a = extremal_eigs(&op, 2, 7).unwrap();
        let b = extremal_eigs(&op, 2, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lanczos_matches_dense_on_xx_chain() {
        let length = 8;
        let h = xx_chain_matrix(length).unwrap();
        let dense = diagonalize(&h).unwrap();
        let lanczos = extremal_eigs(&XxChainOp { length }, 2, 3).unwrap();
        assert!((dense.eigenvalues[0] - lanczos[0]).abs() < 1e-8);
        assert!((dense.eigenvalues[1] - lanczos[1]).abs() < 1e-8);
    }

    #[test]
    fn xx_chain_closed_form_matches_dense() {
        for length in [4usize, 6, 8] {
            let dense = diagonalize(&xx_chain_matrix(length).unwrap()).unwrap();
            let closed = xy_raw_low_spectrum(length, 5).unwrap();
            for (i, e) in closed.iter().enumerate() {
                assert!(
                    (dense.eigenvalues[i] - e).abs() < 1e-10,
                    "L={length} level {i}: dense {} vs closed {e}",
                    dense.eigenvalues[i]
                );
            }
        }
    }

    #[test]
    fn xy_gap_scales_inverse_length() {
        for length in [8usize, 16, 32, 64] {
            let s = xy_spectrum(length).unwrap();
            let scaled = s.gap * length as f64;
            assert!((1.0..2.2).contains(&scaled), "L={length}: gap*L = {scaled}");
        }
    }

    #[test]
    fn xy_spectrum_nonnegative_and_spacing_shrinks() {
        let mut prev = f64::INFINITY;
        for length in [8usize, 16, 32] {
            let s = xy_spectrum(length).unwrap();
            assert!(s.eigenvalues.iter().all(|&e| e >= -1e-12));
            let spacing = s.max_low_spacing(1.0);
            assert!(spacing < prev, "L={length}: spacing {spacing} !< {prev}");
            prev = spacing;
        }
    }

    #[test]
    fn classify_trivial_and_xy() {
        let criterion = GapCriterion::new(Poly::constant(2.0), Poly(vec![0.0, 0.5]), 32).unwrap();
        let trivial = diagonalize(&trivial_chain_matrix(4)).unwrap();
        assert_eq!(classify_gap(&trivial, &criterion, 32), GapClass::Gapped);
        let xy = xy_spectrum(32).unwrap();
        assert_eq!(classify_gap(&xy, &criterion, 32), GapClass::Gapless);
        // A gap strictly between the thresholds breaks the promise.
        let mid = SpectrumResult::from_sorted(vec![0.0, 0.2]);
        assert_eq!(classify_gap(&mid, &criterion, 32), GapClass::Undetermined);
    }

    #[test]
    fn order_parameter_on_guarded_sectors() {
        let length = 3;
        let dim = 3usize.pow(length as u32);
        let spec = guarded_order_parameter(vec![0, 1, 2]).unwrap();
        let mut all_t = vec![Complex64::new(0.0, 0.0); dim];
        all_t[dim - 1] = Complex64::new(1.0, 0.0);
        assert_abs_diff_eq!(
            order_parameter_expectation(&all_t, 3, length, &spec).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let mut all_q = vec![Complex64::new(0.0, 0.0); dim];
        all_q[0] = Complex64::new(1.0, 0.0);
        assert_abs_diff_eq!(
            order_parameter_expectation(&all_q, 3, length, &spec).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let mut mix = vec![Complex64::new(0.0, 0.0); dim];
        mix[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        mix[dim - 1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert_abs_diff_eq!(
            order_parameter_expectation(&mix, 3, length, &spec).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn guarded_chain_realizes_direct_sum_spectrum() {
        let length = 5;
        let h = guarded_chain_matrix(length, 1.3).unwrap();
        let s = diagonalize(&h).unwrap();
        assert_abs_diff_eq!(s.ground_energy(), 0.0, epsilon = 1e-10);
        assert!(s.eigenvalues[1] >= 1.0 - 1e-10, "second level {}", s.eigenvalues[1]);

        // Negative shift pulls the dense sector below zero; the low-lying
        // spectrum is the shifted XX spectrum.
        let h2 = guarded_chain_matrix(length, -2.0).unwrap();
        let s2 = diagonalize(&h2).unwrap();
        assert_abs_diff_eq!(s2.ground_energy(), -2.0, epsilon = 1e-9);
        let xy = xy_spectrum(length).unwrap();
        for i in 0..4 {
            assert!(
                (s2.eigenvalues[i] - (-2.0 + xy.eigenvalues[i])).abs() < 1e-9,
                "level {i}: {} vs {}",
                s2.eigenvalues[i],
                -2.0 + xy.eigenvalues[i]
            );
        }
    }

    #[test]
    fn degenerate_ground_reports_zero_gap() {
        let s = SpectrumResult::from_sorted(vec![0.0, 1e-12, 0.5]);
        assert_eq!(s.ground_degeneracy, 2);
        assert_eq!(s.gap, 0.0);
    }
}
