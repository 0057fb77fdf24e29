//! Closed-form quantum-phase-estimation readout analytics.
//!
//! For a `t`-bit readout register and a phase offset `ξ` (in revolutions of
//! the estimated phase), the amplitude on the signed outcome label
//! `L ∈ (−2^{t−1}, 2^{t−1}]` is
//!
//! ```text
//! α_L = 2^{-t} · (1 − e^{2πi·2^t ξ}) / (1 − e^{2πi(ξ − 2^{-t}L)})
//!     = 2^{-t} · sin(2^t πξ) / sin(π(ξ − 2^{-t}L))   (in magnitude)
//! ```
//!
//! with the removable singularity at `ξ = 2^{-t}L` resolved to a deterministic
//! readout. The low-half mass `Σ_{L≤0}|α_L|²` is the building block of the
//! acceptance functional: it equals 1/2 exactly at `ξ = 2^{-t-1}`, is
//! antisymmetric about that midpoint, and is pinned below `π²/24` /
//! above `1 − π²/24` outside the monotonicity window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{digits_are_valid, integer_to_digits, EncodedString};
use crate::{Error, Result};

/// `π²/24`, the two-sided acceptance bound.
pub const PI_SQ_OVER_24: f64 = std::f64::consts::PI * std::f64::consts::PI / 24.0;

/// A readout-register size and phase offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpePoint {
    /// Readout register bit count, `t ≥ 1`.
    pub t: u32,
    /// Phase offset in `[-1/2, 1/2)`, revolutions.
    pub xi: f64,
}

impl QpePoint {
    pub fn new(t: u32, xi: f64) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("QPE register needs t >= 1".into()));
        }
        if !xi.is_finite() {
            return Err(Error::InvalidArgument("xi must be finite".into()));
        }
        Ok(Self { t, xi })
    }

    /// Outcome labels run over `(−2^{t−1}, 2^{t−1}]`.
    pub fn label_range(&self) -> std::ops::RangeInclusive<i64> {
        let half = 1i64 << (self.t - 1);
        (-half + 1)..=half
    }
}

/// `e^{2πix}` with argument reduction.
fn exp_2pi_i(x: f64) -> Complex64 {
    let r = x - x.round();
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r)
}

/// Generic QPE amplitude on outcome `m ∈ [0, outcomes)` for phase `x` in
/// revolutions, on a register with `outcomes` basis states.
pub fn readout_amplitude(x: f64, outcomes: u64, m: u64) -> Complex64 {
    let t_den = x - (m as f64) / (outcomes as f64);
    let denom = Complex64::new(1.0, 0.0) - exp_2pi_i(t_den);
    if denom.norm() == 0.0 {
        // Exact-phase branch: deterministic readout on this outcome. All
        // other outcomes then carry an exactly vanishing numerator.
        return Complex64::new(1.0, 0.0);
    }
    let num = Complex64::new(1.0, 0.0) - exp_2pi_i(x * outcomes as f64);
    num / denom / (outcomes as f64)
}

/// The complex amplitude `α_L` at a signed outcome label.
pub fn alpha(point: QpePoint, label: i64) -> Result<Complex64> {
    if !point.label_range().contains(&label) {
        return Err(Error::InvalidArgument(format!(
            "label {label} outside outcome range for t={}",
            point.t
        )));
    }
    let outcomes = 1u64 << point.t;
    let m = label.rem_euclid(outcomes as i64) as u64;
    Ok(readout_amplitude(point.xi.rem_euclid(1.0), outcomes, m))
}

/// Exact QPE output amplitudes for every outcome label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeProfile {
    pub t: u32,
    /// `(label, amplitude)` sorted by label ascending.
    pub amplitudes: Vec<(i64, Complex64)>,
}

impl AmplitudeProfile {
    pub fn total_mass(&self) -> f64 {
        self.amplitudes.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn mass_at(&self, label: i64) -> f64 {
        self.amplitudes
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, a)| a.norm_sqr())
            .unwrap_or(0.0)
    }
}

pub fn profile(point: QpePoint) -> Result<AmplitudeProfile> {
    let amplitudes = point
        .label_range()
        .map(|l| alpha(point, l).map(|a| (l, a)))
        .collect::<Result<Vec<_>>>()?;
    let prof = AmplitudeProfile { t: point.t, amplitudes };
    debug_assert!((prof.total_mass() - 1.0).abs() < 1e-10);
    Ok(prof)
}

/// `Σ_{L ≤ 0} |α_L|²`: probability of a non-positive readout.
pub fn low_half_mass(point: QpePoint) -> f64 {
    let outcomes = 1u64 << point.t;
    let x = point.xi.rem_euclid(1.0);
    let half = 1i64 << (point.t - 1);
    let mut mass = 0.0;
    for label in (-half + 1)..=0 {
        let m = label.rem_euclid(outcomes as i64) as u64;
        mass += readout_amplitude(x, outcomes, m).norm_sqr();
    }
    mass
}

/// The open interval of `φ = λ − ξ` on which the acceptance functional has
/// slope at least one, as offsets from the eigenphase `λ`:
/// `(−2^{-t} + 2^{-3t/2}, −2^{-3t/2})`.
pub fn monotonicity_window(t: u32) -> (f64, f64) {
    let lo = -(2f64.powi(-(t as i32))) + 2f64.powf(-1.5 * t as f64);
    let hi = -(2f64.powf(-1.5 * t as f64));
    (lo, hi)
}

/// Tail mass on valid strings for QPE of the diagonal unitary with phase
/// `0.y` (base 4) read out on `t` base-4 digits.
///
/// In the short regime `t < |y|` this is the self-certification bound
/// `< 2^{-t/2}`; at `t = |y|` the readout is deterministic on `y` itself.
pub fn valid_tail_mass(y: &EncodedString, t: usize) -> Result<f64> {
    if t == 0 || t % 2 != 0 {
        return Err(Error::InvalidArgument(format!("t must be even and positive, got {t}")));
    }
    if t > 31 {
        return Err(Error::CapExceeded { requested: t, cap: 31 });
    }
    let outcomes = 4u64.pow(t as u32);
    let x = y.phase_fraction();
    let mut mass = 0.0;
    for m in crate::encoding::valid_strings(t)? {
        mass += readout_amplitude(x, outcomes, m).norm_sqr();
    }
    Ok(mass)
}

/// The deterministic readout when `t ≥ |y|`: the exact `t`-digit expansion.
pub fn exact_readout(y: &EncodedString, t: usize) -> Option<u64> {
    if t < y.len() {
        return None;
    }
    Some(y.to_integer() << (2 * (t - y.len())))
}

/// Minimum distance from the truncated readout to any valid string, for the
/// self-certification argument. Returns `(b, min_m |b − m|)`.
pub fn nearest_valid_distance(y: &EncodedString, t: usize) -> Result<(u64, u64)> {
    if t >= y.len() {
        return Err(Error::InvalidArgument("distance argument needs t < |y|".into()));
    }
    let b = y.to_integer() >> (2 * (y.len() - t));
    debug_assert!(!digits_are_valid(&integer_to_digits(b, t)));
    let dist = crate::encoding::valid_strings(t)?
        .iter()
        .map(|&m| m.abs_diff(b))
        .min()
        .expect("valid string set is nonempty");
    Ok((b, dist))
}

/// Which side of the phase threshold a tail bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailSide {
    /// `φ ≤ λ − 1/f(t)`: upper bound on the low-half mass.
    Below,
    /// `φ ≥ λ + 1/f(t)`: lower bound on the low-half mass.
    Above,
}

/// Trigamma-difference tail bound for phase estimation `1/f(t)` away from the
/// eigenphase: `ψ⁽¹⁾(2^{t−1}/f(t)) − ψ⁽¹⁾(1 + 2^{t−1}) = O(f(t)/2^t)`.
///
/// For [`TailSide::Below`] the returned value upper-bounds `Σ_{x≤0}|α_x|²`;
/// for [`TailSide::Above`] the returned value lower-bounds it (as
/// `1 −` the same sum).
pub fn tech_tail_bound(t: u32, f_of_t: f64, side: TailSide) -> Result<f64> {
    if f_of_t <= 0.0 {
        return Err(Error::InvalidArgument(format!("f(t) must be positive, got {f_of_t}")));
    }
    let half = 2f64.powi(t as i32 - 1);
    let start = half / f_of_t;
    if start < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "tail bound needs 2^(t-1)/f(t) >= 1, got {start}"
        )));
    }
    let sum = trigamma(start) - trigamma(half + 1.0);
    Ok(match side {
        TailSide::Below => sum,
        TailSide::Above => 1.0 - sum,
    })
}

/// Trigamma `ψ⁽¹⁾(x)` for `x > 0`, by upward recurrence into the asymptotic
/// series. Absolute accuracy near 1e-14 on the arguments used here.
pub fn trigamma(mut x: f64) -> f64 {
    assert!(x > 0.0, "trigamma needs x > 0");
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/x + 1/2x² + Σ B_{2k}/x^{2k+1}
    let series = inv
        + 0.5 * inv2
        + inv * inv2 * (1.0 / 6.0 + inv2 * (-1.0 / 30.0 + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0))));
    acc + series
}
