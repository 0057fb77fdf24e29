//! Energy bookkeeping: history-state penalty brackets, marker bonuses,
//! checkerboard repetition, and the guard/trivial/dense composition.
//!
//! Energies are carried as intervals because the inputs are only ever
//! bracketed; a sign claim requires the whole interval to clear zero. The
//! history-state bracket for output penalty `k/256T` is
//! `[0.99k/256T², 1.05k/256T²]`, the marker bonus for falloff `f` lies in
//! `[−(9/4)·4^{−f}, −(9/4 − 9/4^f)·4^{−f}]`, and the falloff choice
//! `f(L) = 5 + log₄(L^b)` aligns the two so that the square energy changes
//! sign exactly where the acceptance functional crosses its calibrated value.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::qpe::PI_SQ_OVER_24;
use crate::spectral::SpectrumResult;
use crate::{Error, Result};

/// A closed real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] inverted");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn add(self, other: Interval) -> Interval {
        Interval::new(self.lo + other.lo, self.hi + other.hi)
    }

    pub fn scale(self, c: f64) -> Interval {
        if c >= 0.0 {
            Interval::new(self.lo * c, self.hi * c)
        } else {
            Interval::new(self.hi * c, self.lo * c)
        }
    }

    pub fn midpoint(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }
}

// ---------------------------------------------------------------------------
// History-state bracket
// ---------------------------------------------------------------------------

/// Ground-energy bracket of a standard-form clock Hamiltonian with output
/// penalty `k/256T` and runtime `T`: `[0.99k/256T², 1.05k/256T²]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HistoryEnergyBounds {
    pub k: f64,
    pub runtime: f64,
    pub lower: f64,
    pub upper: f64,
}

impl HistoryEnergyBounds {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lower, self.upper)
    }
}

pub fn history_bounds(k: f64, runtime: f64) -> Result<HistoryEnergyBounds> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidArgument(format!("penalty weight k={k} outside [0, 1]")));
    }
    if runtime < 1.0 {
        return Err(Error::InvalidArgument(format!("runtime T={runtime} must be >= 1")));
    }
    let unit = k / (256.0 * runtime * runtime);
    Ok(HistoryEnergyBounds { k, runtime, lower: 0.99 * unit, upper: 1.05 * unit })
}

/// A hand-built standard-form clock Hamiltonian: `T` clock states, one work
/// qubit rotated at the first step so the computation rejects with
/// probability `reject_prob`, and an output penalty `mu` on the rejecting
/// final state. Used as the independent oracle for the history bracket.
pub fn toy_clock_hamiltonian(t_steps: usize, reject_prob: f64, mu: f64) -> Result<CMatrix> {
    if t_steps < 2 {
        return Err(Error::InvalidArgument("clock needs at least 2 steps".into()));
    }
    if !(0.0..=1.0).contains(&reject_prob) {
        return Err(Error::InvalidArgument("reject probability outside [0, 1]".into()));
    }
    let dim = 2 * t_steps;
    let idx = |tau: usize, w: usize| tau * 2 + w;
    let mut h = CMatrix::zeros(dim, dim);
    // The first transition rotates the work qubit; later ones idle.
    let theta = (reject_prob.sqrt()).acos();
    for tau in 0..t_steps - 1 {
        for w in 0..2 {
            h[(idx(tau, w), idx(tau, w))] += Complex64::new(0.5, 0.0);
            h[(idx(tau + 1, w), idx(tau + 1, w))] += Complex64::new(0.5, 0.0);
        }
        let u: [[f64; 2]; 2] = if tau == 0 {
            [[theta.cos(), -theta.sin()], [theta.sin(), theta.cos()]]
        } else {
            [[1.0, 0.0], [0.0, 1.0]]
        };
        for a in 0..2 {
            for b in 0..2 {
                let amp = Complex64::new(-0.5 * u[a][b], 0.0);
                h[(idx(tau + 1, a), idx(tau, b))] += amp;
                h[(idx(tau, b), idx(tau + 1, a))] += amp;
            }
        }
    }
    // Input penalty: the work qubit must start in |0⟩.
    h[(idx(0, 1), idx(0, 1))] += Complex64::new(1.0, 0.0);
    // Output penalty on the rejecting branch |0⟩ at the final step.
    h[(idx(t_steps - 1, 0), idx(t_steps - 1, 0))] += Complex64::new(mu, 0.0);
    Ok(h)
}

// ---------------------------------------------------------------------------
// Marker bonus
// ---------------------------------------------------------------------------

/// Marker bonus bracket for integer falloff `f`:
/// `−(9/4)·4^{−f} ≤ λmin ≤ −(9/4 − 9/4^f)·4^{−f}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MarkerBounds {
    pub f_of_l: f64,
    pub lower: f64,
    pub upper: f64,
}

impl MarkerBounds {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lower, self.upper)
    }
}

/// `f(L) = 5 + b·log₄(L)`; the tiling counts in base 4, so `L` must be a
/// power of 4 (and `b` even) for the offset to be an integer.
pub fn marker_falloff(l: u64, b: u32) -> Result<u64> {
    if b == 0 || b % 2 != 0 {
        return Err(Error::InvalidArgument(format!("runtime exponent b={b} must be even positive")));
    }
    if l < 4 || (l & (l - 1)) != 0 || l.trailing_zeros() % 2 != 0 {
        return Err(Error::InvalidArgument(format!("marker falloff needs L a power of 4, got {l}")));
    }
    let log4 = (l.trailing_zeros() / 2) as u64;
    Ok(5 + b as u64 * log4)
}

/// The bracket at real-valued falloff, using `4^{−f(L)} = 1/(1024·L^b)`,
/// which holds identically for any `L`.
pub fn marker_bounds_for(l: u64, b: u32) -> MarkerBounds {
    let four_pow_neg_f = 1.0 / (1024.0 * (l as f64).powi(b as i32));
    marker_bounds_from_scale(5.0 + b as f64 * (l as f64).log(4.0), four_pow_neg_f)
}

pub fn marker_bounds(f: u64) -> MarkerBounds {
    marker_bounds_from_scale(f as f64, 4f64.powi(-(f as i64) as i32))
}

fn marker_bounds_from_scale(f: f64, four_pow_neg_f: f64) -> MarkerBounds {
    let lower = -(9.0 / 4.0) * four_pow_neg_f;
    let upper = -((9.0 / 4.0) - 9.0 * four_pow_neg_f) * four_pow_neg_f;
    MarkerBounds { f_of_l: f, lower, upper }
}

// ---------------------------------------------------------------------------
// Calibration inequalities
// ---------------------------------------------------------------------------

/// Slack report for the history/marker sandwich at one square size.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub l: u64,
    pub b: u32,
    /// Rejecting branch: `0.99(1−π²/24)/(256L^b) − (9/4)4^{−f}` (must be ≥ 0).
    pub reject_slack: f64,
    /// Accepting branch against the marker envelope:
    /// `(9/4 − 9/4^f)4^{−f} − 1.05(π²/24)/(256L^b)` (must be ≥ 0).
    pub accept_slack: f64,
    /// Accepting branch in the conservative displayed form with the
    /// `90/(4·2^L)` deduction; negative for small `L`, reported only.
    pub accept_slack_displayed: f64,
    pub holds: bool,
}

/// One-parameter sandwich: reject keeps the square nonnegative, accept pulls
/// it negative, using the marker envelope bracket.
pub fn calibration_1p(l: u64, b: u32) -> CalibrationReport {
    let unit = 1.0 / (256.0 * (l as f64).powi(b as i32));
    let four_pow_neg_f = 1.0 / (1024.0 * (l as f64).powi(b as i32));
    let reject_slack = 0.99 * unit * (1.0 - PI_SQ_OVER_24) - (9.0 / 4.0) * four_pow_neg_f;
    let accept_slack =
        (9.0 / 4.0 - 9.0 * four_pow_neg_f) * four_pow_neg_f - 1.05 * unit * PI_SQ_OVER_24;
    let accept_slack_displayed = (9.0 / 4.0 - 90.0 / (4.0 * 2f64.powi(l.min(1023) as i32)))
        * four_pow_neg_f
        - 1.05 * unit * PI_SQ_OVER_24;
    CalibrationReport {
        l,
        b,
        reject_slack,
        accept_slack,
        accept_slack_displayed,
        holds: reject_slack >= 0.0 && accept_slack >= 0.0,
    }
}

/// Two-parameter calibration pair around the `2/5 < 7/16 < 1/2` bracket:
/// `1.05/(256L^b)·(1/2) ≤ 4^{−f}(9/4 − 10/2^L)` and
/// `(9/4)4^{−f} ≤ 0.99/(256L^b)·(3/5)`. Holds for all `L ≥ 7`.
pub fn calibration_2p(l: u64, b: u32) -> CalibrationReport {
    let unit = 1.0 / (256.0 * (l as f64).powi(b as i32));
    let four_pow_neg_f = 1.0 / (1024.0 * (l as f64).powi(b as i32));
    let accept_slack =
        (9.0 / 4.0 - 10.0 / 2f64.powi(l.min(1023) as i32)) * four_pow_neg_f - 1.05 * unit * 0.5;
    let reject_slack = 0.99 * unit * (3.0 / 5.0) - (9.0 / 4.0) * four_pow_neg_f;
    CalibrationReport {
        l,
        b,
        reject_slack,
        accept_slack,
        accept_slack_displayed: accept_slack,
        holds: reject_slack >= 0.0 && accept_slack >= 0.0,
    }
}

// ---------------------------------------------------------------------------
// Square and lattice energy
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergySign {
    Negative,
    NonNegative,
}

/// Target square geometry and runtime exponent.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SquareMeta {
    pub l_n: u64,
    pub m_n: u64,
    pub b: u32,
}

/// Signed energy of one checkerboard square.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SquareEnergy {
    pub l: u64,
    pub m: u64,
    pub sign: EnergySign,
    pub value_interval: Interval,
}

/// One-parameter square energy: history penalty at weight `1 − η` plus the
/// marker bonus. Negative only on the target square with an accepting η.
pub fn square_energy_1p(eta_val: f64, l: u64, m: u64, meta: &SquareMeta) -> Result<SquareEnergy> {
    let calib = calibration_1p(l, meta.b);
    if !calib.holds {
        return Err(Error::CalibrationViolated(format!(
            "history/marker sandwich fails at L={l}, b={}: reject slack {:.3e}, accept slack {:.3e}",
            meta.b, calib.reject_slack, calib.accept_slack
        )));
    }
    let effective_eta = if (l, m) == (meta.l_n, meta.m_n) { eta_val } else { 0.0 };
    if !(0.0..=1.0).contains(&effective_eta) {
        return Err(Error::InvalidArgument(format!("eta {effective_eta} outside [0, 1]")));
    }
    let runtime = (l as f64).powf(meta.b as f64 / 2.0);
    let history = history_bounds(1.0 - effective_eta, runtime)?.interval();
    let marker = marker_bounds_for(l, meta.b).interval();
    let total = history.add(marker);
    let sign = if total.hi < 0.0 { EnergySign::Negative } else { EnergySign::NonNegative };
    Ok(SquareEnergy { l, m, sign, value_interval: total })
}

/// Observable thresholds for the two-parameter square energy.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwoParamThresholds {
    /// Concentrated observable eigenvalue `λ_{j*}(B) ∈ {1, 2}`.
    pub lambda_jstar: f64,
    /// Precision polynomial value `P₂(N)`.
    pub p2: f64,
}

impl TwoParamThresholds {
    /// θ below this keeps the square negative: `λ_{j*} − 1/2 − 1/P₂`.
    pub fn theta_negative(&self) -> f64 {
        self.lambda_jstar - 0.5 - 1.0 / self.p2
    }

    /// θ above this keeps the square nonnegative: `λ_{j*} − 2/5 + 1/P₂`.
    pub fn theta_nonnegative(&self) -> f64 {
        self.lambda_jstar - 0.4 + 1.0 / self.p2
    }
}

/// Two-parameter square energy from the observable-penalized acceptance
/// value. The penalty weight saturates at `[0, 1]`: the standard form keeps
/// the block nonnegative, so an acceptance value above 1 pins the history
/// contribution at zero.
pub fn square_energy_2p(
    eta_val: f64,
    l: u64,
    m: u64,
    meta: &SquareMeta,
    thresholds: &TwoParamThresholds,
) -> Result<SquareEnergy> {
    let calib = calibration_2p(l, meta.b);
    if !calib.holds {
        return Err(Error::CalibrationViolated(format!(
            "two-parameter calibration fails at L={l} (needs L >= 7): reject slack {:.3e}, accept slack {:.3e}",
            calib.reject_slack, calib.accept_slack
        )));
    }
    if thresholds.theta_negative() >= thresholds.theta_nonnegative() {
        return Err(Error::InvalidArgument(
            "two-parameter thresholds inverted: P2 too small for the 1/2 vs 2/5 bracket".into(),
        ));
    }
    let effective_eta = if (l, m) == (meta.l_n, meta.m_n) { eta_val } else { 0.0 };
    let k = (1.0 - effective_eta).clamp(0.0, 1.0);
    let runtime = (l as f64).powf(meta.b as f64 / 2.0);
    let history = history_bounds(k, runtime)?.interval();
    let marker = marker_bounds_for(l, meta.b).interval();
    let total = history.add(marker);
    let sign = if total.hi < 0.0 { EnergySign::Negative } else { EnergySign::NonNegative };
    Ok(SquareEnergy { l, m, sign, value_interval: total })
}

/// Total lattice energy after the +1 shift:
/// `1 + ⌊L/L_N⌋²·(square energy)` in the negative branch, `≥ 1` otherwise.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LatticeEnergy {
    pub lattice_size: u64,
    pub tiles: u64,
    pub total: f64,
    pub total_interval: Interval,
}

pub fn lattice_energy(square: &SquareEnergy, l: u64, l_n: u64) -> Result<LatticeEnergy> {
    if l < l_n {
        return Err(Error::InvalidArgument(format!("lattice size {l} below square size {l_n}")));
    }
    let tiles = (l / l_n) * (l / l_n);
    let (total_interval, total) = match square.sign {
        EnergySign::Negative => {
            let scaled = square.value_interval.scale(tiles as f64);
            let shifted = scaled.add(Interval::point(1.0));
            (shifted, shifted.midpoint())
        }
        EnergySign::NonNegative => (Interval::new(1.0, f64::INFINITY), 1.0),
    };
    Ok(LatticeEnergy { lattice_size: l, tiles, total, total_interval })
}

/// Bracket on the constant `c₁` in `|λmin(square)| = c₁/L^b` for an
/// accepting square, inherited from the history and marker envelopes.
pub fn c1_interval(l: u64, b: u32) -> Interval {
    let scale = (l as f64).powi(b as i32);
    let four_pow_neg_f = 1.0 / 1024.0;
    let lo = (9.0 / 4.0 - 9.0 * four_pow_neg_f / scale) * four_pow_neg_f
        - 1.05 * PI_SQ_OVER_24 / 256.0;
    let hi = (9.0 / 4.0) * four_pow_neg_f;
    Interval::new(lo, hi)
}

/// Smallest lattice size beyond which the tiled negative energy defeats the
/// +1 shift: `⌊L₀/L_N⌋² · c₁/L_N^b > 1`.
pub fn l0_threshold(l_n: u64, b: u32) -> u64 {
    let c1_lo = c1_interval(l_n, b).lo;
    let needed = ((l_n as f64).powi(b as i32) / c1_lo).sqrt();
    l_n * (needed.ceil() as u64 + 1)
}

/// Union spectrum `{0} ∪ (h'min + dense) ∪ G` with the guard floor at 1.
pub fn combined_spectrum(h_prime_min: f64, dense: &SpectrumResult) -> SpectrumResult {
    let mut levels = Vec::with_capacity(dense.eigenvalues.len() + 2);
    levels.push(0.0);
    levels.push(1.0);
    for &e in &dense.eigenvalues {
        levels.push(h_prime_min + e);
    }
    levels.sort_by(f64::total_cmp);
    SpectrumResult::from_sorted(levels)
}

// ---------------------------------------------------------------------------
// Phase rescaling
// ---------------------------------------------------------------------------

/// Map the raw parameter onto the comparator scale: the comparator then
/// compares `φ` against `2^{−x}·λ`, so critical features are magnified by
/// `2^x` in raw-parameter space.
pub fn rescale_phi(phi_raw: f64, scale_exponent: u32, t: u32) -> Result<f64> {
    if scale_exponent >= t {
        return Err(Error::InvalidArgument(format!(
            "scale exponent {scale_exponent} outside the 0 <= x < t budget (t={t})"
        )));
    }
    Ok(phi_raw / 2f64.powi(scale_exponent as i32))
}

/// Amplitude deviation budget of the rescaled fractional-power comparator:
/// `t` controlled rotations at precision `2^{-4t}`, each amplified by at most
/// `2^t`, stay below `2^{-2t}` in total.
pub fn rescale_deviation_bound(t: u32) -> f64 {
    t as f64 * 2f64.powi(-3 * (t as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::diagonalize;
    use approx::assert_abs_diff_eq;

    #[test]
    fn history_bounds_examples() {
        let b = history_bounds(0.0, 5.0).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let b = history_bounds(1.0, 10.0).unwrap();
        assert_abs_diff_eq!(b.lower, 0.99 / 25600.0, epsilon = 1e-18);
        assert_abs_diff_eq!(b.upper, 1.05 / 25600.0, epsilon = 1e-18);
        assert!(history_bounds(1.5, 10.0).is_err());
    }

    #[test]
    fn toy_clock_ground_energy_in_bracket() {
        // Full rejection with penalty k/256T, and partial rejection k with
        // penalty 1/256T, both bracket to [0.99, 1.05]·k/256T².
        for t_steps in [3usize, 10, 25] {
            let t = t_steps as f64;
            for k in [0.25, 1.0] {
                let mu_scaled = toy_clock_hamiltonian(t_steps, 1.0, k / (256.0 * t)).unwrap();
                let e1 = diagonalize(&mu_scaled).unwrap().ground_energy();
                let bracket = history_bounds(k, t).unwrap();
                assert!(
                    bracket.interval().contains(e1),
                    "T={t_steps} k={k} (scaled penalty): {e1} outside [{}, {}]",
                    bracket.lower,
                    bracket.upper
                );
                let partial = toy_clock_hamiltonian(t_steps, k, 1.0 / (256.0 * t)).unwrap();
                let e2 = diagonalize(&partial).unwrap().ground_energy();
                assert!(
                    bracket.interval().contains(e2),
                    "T={t_steps} k={k} (partial reject): {e2} outside [{}, {}]",
                    bracket.lower,
                    bracket.upper
                );
            }
        }
    }

    #[test]
    fn marker_falloff_examples() {
        assert_eq!(marker_falloff(4, 2).unwrap(), 7);
        assert!(marker_falloff(5, 2).is_err());
        assert!(marker_falloff(4, 3).is_err());
        // (9/4)·4^{-f(L)} = (9/16)/(256 L^b) exactly.
        for (l, b) in [(4u64, 2u32), (16, 4), (64, 2)] {
            let f = marker_falloff(l, b).unwrap();
            let lhs = (9.0 / 4.0) * 4f64.powi(-(f as i32));
            let rhs = (9.0 / 16.0) / (256.0 * (l as f64).powi(b as i32));
            assert_abs_diff_eq!(lhs, rhs, epsilon = lhs * 1e-14);
            // The real-valued form agrees with the integer form.
            let mb = marker_bounds_for(l, b);
            let mi = marker_bounds(f);
            assert_abs_diff_eq!(mb.lower, mi.lower, epsilon = mb.lower.abs() * 1e-12);
            assert_abs_diff_eq!(mb.upper, mi.upper, epsilon = mb.upper.abs() * 1e-12);
        }
    }

    #[test]
    fn one_param_sandwich_holds_at_all_sizes() {
        for l in [4u64, 16, 64, 256] {
            for b in [2u32, 4] {
                let c = calibration_1p(l, b);
                assert!(c.holds, "L={l} b={b}: {c:?}");
            }
        }
        // The conservative displayed form only kicks in from L=16 upward.
        assert!(calibration_1p(4, 4).accept_slack_displayed < 0.0);
        assert!(calibration_1p(16, 4).accept_slack_displayed >= 0.0);
    }

    #[test]
    fn two_param_calibration_from_seven() {
        assert!(!calibration_2p(6, 4).holds);
        for l in 7u64..=256 {
            assert!(calibration_2p(l, 4).holds, "L={l}");
        }
    }

    #[test]
    fn square_energy_signs_follow_eta() {
        let meta = SquareMeta { l_n: 16, m_n: 6, b: 4 };
        let accept = square_energy_1p(1.0 - PI_SQ_OVER_24, 16, 6, &meta).unwrap();
        assert_eq!(accept.sign, EnergySign::Negative);
        let reject = square_energy_1p(PI_SQ_OVER_24, 16, 6, &meta).unwrap();
        assert_eq!(reject.sign, EnergySign::NonNegative);
        assert!(reject.value_interval.lo >= 0.0);
        // Off-target squares are nonnegative regardless of eta.
        let off = square_energy_1p(1.0, 16, 7, &meta).unwrap();
        assert_eq!(off.sign, EnergySign::NonNegative);
        let off2 = square_energy_1p(1.0, 64, 6, &meta).unwrap();
        assert_eq!(off2.sign, EnergySign::NonNegative);
    }

    #[test]
    fn square_energy_2p_thresholds() {
        let meta = SquareMeta { l_n: 16, m_n: 6, b: 4 };
        let th = TwoParamThresholds { lambda_jstar: 2.0, p2: 32.0 };
        // Acceptance at the low-θ side: η ≥ 1/2.
        let neg = square_energy_2p(0.5, 16, 6, &meta, &th).unwrap();
        assert_eq!(neg.sign, EnergySign::Negative);
        // Rejection at the high-θ side: η ≤ 2/5.
        let pos = square_energy_2p(0.4, 16, 6, &meta, &th).unwrap();
        assert_eq!(pos.sign, EnergySign::NonNegative);
        assert!(pos.value_interval.lo >= 0.0);
        // Below the calibrated range the call aborts.
        assert!(square_energy_2p(0.5, 4, 6, &meta, &th).is_err());
        assert!(th.theta_negative() < th.theta_nonnegative());
    }

    #[test]
    fn lattice_energy_branches() {
        let meta = SquareMeta { l_n: 16, m_n: 6, b: 4 };
        let neg = square_energy_1p(0.95, 16, 6, &meta).unwrap();
        let le = lattice_energy(&neg, 32, 16).unwrap();
        assert_eq!(le.tiles, 4);
        let expect = 1.0 + 4.0 * neg.value_interval.midpoint();
        assert_abs_diff_eq!(le.total, expect, epsilon = 1e-18);
        let pos = square_energy_1p(0.1, 16, 6, &meta).unwrap();
        let le2 = lattice_energy(&pos, 64, 16).unwrap();
        assert!(le2.total >= 1.0);
        assert!(lattice_energy(&neg, 8, 16).is_err());
    }

    #[test]
    fn l0_threshold_defeats_the_shift() {
        let (l_n, b) = (16u64, 4u32);
        let l0 = l0_threshold(l_n, b);
        let tiles = (l0 / l_n) as f64;
        let c1_lo = c1_interval(l_n, b).lo;
        assert!(c1_lo > 0.0);
        assert!(
            tiles * tiles * c1_lo / (l_n as f64).powi(b as i32) > 1.0,
            "L0={l0} insufficient"
        );
    }

    #[test]
    fn combined_spectrum_branches() {
        let dense = crate::spectral::xy_spectrum(12).unwrap();
        // Gapped branch: shift at or above the guard floor.
        let gapped = combined_spectrum(1.4, &dense);
        assert_abs_diff_eq!(gapped.ground_energy(), 0.0, epsilon = 1e-15);
        assert!(gapped.gap >= 0.5, "gap {}", gapped.gap);
        // Gapless branch: large negative shift, dense levels below zero.
        let gapless = combined_spectrum(-50.0, &dense);
        assert_abs_diff_eq!(gapless.ground_energy(), -50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gapless.gap, dense.gap, epsilon = 1e-12);
        // Empty dense edge case: {0} ∪ G.
        let empty = SpectrumResult::from_sorted(vec![]);
        let s = combined_spectrum(5.0, &empty);
        assert_eq!(s.eigenvalues, vec![0.0, 1.0]);
    }

    #[test]
    fn rescale_identity_and_budget() {
        assert_abs_diff_eq!(rescale_phi(0.371, 0, 6).unwrap(), 0.371, epsilon = 0.0);
        assert_abs_diff_eq!(rescale_phi(0.5, 3, 6).unwrap(), 0.0625, epsilon = 1e-18);
        assert!(rescale_phi(0.5, 6, 6).is_err());
        for t in 1..=12u32 {
            assert!(rescale_deviation_bound(t) <= 2f64.powi(-2 * t as i32));
        }
    }

    #[test]
    fn rescaled_thresholds_separate_by_constant() {
        // Two stand-in eigenphases a promise gap 2^{-4} apart; after the
        // x = 4 rescale the φ-space crossing points separate by ~1.
        let t = 8u32;
        let x = 4u32;
        let lambda_no = 0.020;
        let lambda_yes = lambda_no + 2f64.powi(-4);
        let crossing = |lambda: f64| -> f64 {
            // Bisect the mass-1/2 crossing in raw-φ space.
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let xi = lambda - rescale_phi(mid, x, t).unwrap();
                let mass = crate::qpe::low_half_mass(crate::qpe::QpePoint::new(t, xi).unwrap());
                if mass < 0.5 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let sep = (crossing(lambda_yes) - crossing(lambda_no)).abs();
        assert!(sep >= 0.5, "separation {sep}");
    }
}
