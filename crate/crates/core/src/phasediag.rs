//! The decision layer: binary-search solvers for the one- and two-parameter
//! critical-point promise problems against pluggable ground-energy oracles,
//! plus the end-to-end oracle wiring the acceptance functional through the
//! energy bookkeeping into a gap classification.
//!
//! Labels follow the problem definitions: in the one-parameter problem the
//! system is in phase A below the critical point (the gapped, trivial side
//! here) and B above it; in the two-parameter problem phase A is the
//! small-θ side (gapless here) and B the large-θ side, and the decision asks
//! on which side of the rectangle the critical line runs.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::assembly::{
    combined_spectrum, l0_threshold, lattice_energy, rescale_phi, square_energy_1p,
    square_energy_2p, SquareMeta, TwoParamThresholds,
};
use crate::eta::{toy_comparator_oracle, toy_observable_oracle, EtaEngine, HardOracleSpec};
use crate::spectral::{classify_gap, xy_spectrum, GapClass, GapCriterion, Poly, SpectrumResult};
use crate::{Error, Result};

/// A point in parameter space; `theta` is ignored by one-parameter oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub phi: f64,
    pub theta: f64,
}

impl ParamPoint {
    pub fn phi_only(phi: f64) -> Self {
        Self { phi, theta: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseLabel {
    A,
    B,
}

/// Physics reported by an oracle at one parameter point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSample {
    pub energy_interval: crate::assembly::Interval,
    pub gap: f64,
    pub order_parameter: f64,
    pub gap_class: GapClass,
}

/// A pluggable stand-in for the hard ground-energy oracle. Implementations
/// must be safe for concurrent read-only queries; the query counter mirrors
/// the oracle-call accounting of the containment algorithm.
pub trait GroundEnergyOracle: Sync {
    fn classify(&self, point: &ParamPoint) -> Result<PhaseLabel>;
    fn sample(&self, point: &ParamPoint) -> Result<OracleSample>;
    fn queries(&self) -> usize;
    fn reset_queries(&self);
    /// The finite size at which the local-global criterion is evaluated.
    fn l0(&self) -> u64;
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrtMode {
    /// Decide whether the unique critical `φ*` lies at or below `alpha`
    /// (YES) or at or above `beta` (NO).
    One { alpha: f64, beta: f64 },
    /// Decide whether the critical line `θ*(φ)` clears `beta1` (YES) or
    /// stays below `alpha1` (NO) throughout `S_κ = [y+κ, y+2κ]`.
    Two { alpha1: f64, beta1: f64, alpha2: f64, beta2: f64, kappa: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleKind {
    /// Step classification with a planted one-parameter critical point.
    PlantedStep { phi_star: f64 },
    /// Planted two-parameter model: phase B for `φ ≤ y`, otherwise the
    /// critical line is the constant `theta_star`.
    PlantedSeparable { y: f64, theta_star: f64 },
    /// The end-to-end toy: acceptance functional → square energy → lattice
    /// energy → gap classification, one-parameter form.
    EtaOne { t: u32, b: u32 },
    /// Same wiring through the observable-penalized two-parameter form.
    EtaTwo { t: u32, b: u32 },
}

/// A critical-parameter problem instance as consumed by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrtPrmInstance {
    pub n: u64,
    pub mode: CrtMode,
    pub oracle: OracleKind,
    /// The φ range searched; eta-backed oracles need it inside the
    /// unambiguous comparator window.
    pub phi_window: (f64, f64),
    #[serde(default = "default_theta_window")]
    pub theta_window: (f64, f64),
}

fn default_theta_window() -> (f64, f64) {
    (0.0, 2.2)
}

impl CrtPrmInstance {
    pub fn build_oracle(&self) -> Result<Box<dyn GroundEnergyOracle>> {
        Ok(match &self.oracle {
            OracleKind::PlantedStep { phi_star } => {
                Box::new(PlantedOracle::one_param(*phi_star))
            }
            OracleKind::PlantedSeparable { y, theta_star } => {
                Box::new(PlantedOracle::two_param(*y, *theta_star))
            }
            OracleKind::EtaOne { t, b } => {
                Box::new(end_to_end_eta_oracle(toy_comparator_oracle()?, *t, *b, None)?)
            }
            OracleKind::EtaTwo { t, b } => {
                let spec = toy_observable_oracle()?;
                let thresholds =
                    TwoParamThresholds { lambda_jstar: 2.0, p2: spec.p2 };
                Box::new(end_to_end_eta_oracle(spec, *t, *b, Some(thresholds))?)
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Planted ground truth for solver validation.
pub struct PlantedOracle {
    phi_star: f64,
    theta_star: Option<f64>,
    queries: AtomicUsize,
}

impl PlantedOracle {
    pub fn one_param(phi_star: f64) -> Self {
        Self { phi_star, theta_star: None, queries: AtomicUsize::new(0) }
    }

    /// `y` is the offset below which everything is phase B; above it the
    /// critical line is constant.
    pub fn two_param(y: f64, theta_star: f64) -> Self {
        Self { phi_star: y, theta_star: Some(theta_star), queries: AtomicUsize::new(0) }
    }
}

impl GroundEnergyOracle for PlantedOracle {
    fn classify(&self, point: &ParamPoint) -> Result<PhaseLabel> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(match self.theta_star {
            None => {
                // Ties land on the gapless side by convention.
                if point.phi < self.phi_star {
                    PhaseLabel::A
                } else {
                    PhaseLabel::B
                }
            }
            Some(theta_star) => {
                if point.phi <= self.phi_star {
                    PhaseLabel::B
                } else if point.theta < theta_star {
                    PhaseLabel::A
                } else {
                    PhaseLabel::B
                }
            }
        })
    }

    fn sample(&self, point: &ParamPoint) -> Result<OracleSample> {
        let label = self.classify(point)?;
        // Fabricated physics consistent with the label.
        let gapped = match self.theta_star {
            None => label == PhaseLabel::A,
            Some(_) => label == PhaseLabel::B,
        };
        Ok(OracleSample {
            energy_interval: crate::assembly::Interval::point(if gapped { 1.0 } else { -1.0 }),
            gap: if gapped { 1.0 } else { 0.01 },
            order_parameter: if gapped { 1.0 } else { 0.0 },
            gap_class: if gapped { GapClass::Gapped } else { GapClass::Gapless },
        })
    }

    fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }

    fn reset_queries(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    fn l0(&self) -> u64 {
        1
    }
}

/// The end-to-end oracle: acceptance functional → history/marker square
/// energy → tiled lattice energy → union spectrum → gap classification.
pub struct EtaBackedOracle {
    engine: EtaEngine,
    t: u32,
    meta: SquareMeta,
    thresholds: Option<TwoParamThresholds>,
    criterion: GapCriterion,
    l0: u64,
    lattice: u64,
    rescale_exponent: u32,
    dense: SpectrumResult,
    queries: AtomicUsize,
}

/// Build the end-to-end toy oracle. The checkerboard square is `L_N = 16`
/// (a power of 4), the marker offset matches the register size, and the
/// classification size is the threshold where the tiled negative energy
/// defeats the +1 shift.
pub fn end_to_end_eta_oracle(
    spec: HardOracleSpec,
    t: u32,
    b: u32,
    thresholds: Option<TwoParamThresholds>,
) -> Result<EtaBackedOracle> {
    let engine = EtaEngine::new(spec)?;
    let meta = SquareMeta { l_n: 16, m_n: t as u64, b };
    let l0 = l0_threshold(meta.l_n, b);
    let lattice = 4 * l0;
    let criterion = GapCriterion::new(Poly::constant(2.0), Poly(vec![0.0, 0.5]), l0 as usize)?;
    // The dense spectrum at the classification size is parameter-independent.
    let dense = xy_spectrum(l0 as usize)?;
    Ok(EtaBackedOracle {
        engine,
        t,
        meta,
        thresholds,
        criterion,
        l0,
        lattice,
        rescale_exponent: 0,
        dense,
        queries: AtomicUsize::new(0),
    })
}

impl EtaBackedOracle {
    pub fn engine(&self) -> &EtaEngine {
        &self.engine
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// Raw-parameter → comparator-parameter map (identity at exponent 0).
    pub fn comparator_phi(&self, phi_raw: f64) -> Result<f64> {
        if self.rescale_exponent == 0 {
            return Ok(phi_raw);
        }
        rescale_phi(phi_raw, self.rescale_exponent, self.t)
    }

    pub fn with_rescale(mut self, exponent: u32) -> Result<Self> {
        if exponent >= self.t {
            return Err(Error::InvalidArgument("rescale exponent outside budget".into()));
        }
        self.rescale_exponent = exponent;
        Ok(self)
    }

    fn acceptance(&self, point: &ParamPoint) -> Result<f64> {
        let phi = self.comparator_phi(point.phi)?;
        Ok(match self.thresholds {
            None => self.engine.eta_one_max(phi, self.t)?.value,
            Some(_) => self.engine.eta_two_max(phi, point.theta, self.t)?.value,
        })
    }

    fn square(&self, point: &ParamPoint) -> Result<crate::assembly::SquareEnergy> {
        let eta = self.acceptance(point)?;
        match &self.thresholds {
            None => square_energy_1p(eta.clamp(0.0, 1.0), self.meta.l_n, self.meta.m_n, &self.meta),
            Some(th) => square_energy_2p(eta, self.meta.l_n, self.meta.m_n, &self.meta, th),
        }
    }

    /// The lattice-level ground-energy shift fed to the union spectrum: the
    /// +1-shifted tiled square energy at the oracle's lattice size, with the
    /// interval midpoint as the representative value.
    fn shift(&self, point: &ParamPoint) -> Result<f64> {
        let square = self.square(point)?;
        let mid = square.value_interval.midpoint();
        if mid <= 0.0 {
            let tiles = ((self.lattice / self.meta.l_n) * (self.lattice / self.meta.l_n)) as f64;
            Ok(1.0 + tiles * mid)
        } else {
            Ok(1.0)
        }
    }
}

impl GroundEnergyOracle for EtaBackedOracle {
    /// Classification by the sign of the square-energy interval midpoint,
    /// which is monotone along the acceptance functional and therefore
    /// single-crossing; a vanishing midpoint lands on the gapless side.
    fn classify(&self, point: &ParamPoint) -> Result<PhaseLabel> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let square = self.square(point)?;
        let accepting = square.value_interval.midpoint() <= 0.0;
        Ok(match self.thresholds {
            // One-parameter: A = gapped (below φ*), B = gapless.
            None => {
                if accepting {
                    PhaseLabel::B
                } else {
                    PhaseLabel::A
                }
            }
            // Two-parameter: A = gapless (below θ*), B = gapped.
            Some(_) => {
                if accepting {
                    PhaseLabel::A
                } else {
                    PhaseLabel::B
                }
            }
        })
    }

    fn sample(&self, point: &ParamPoint) -> Result<OracleSample> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let square = self.square(point)?;
        let shift = self.shift(point)?;
        let combined = combined_spectrum(shift, &self.dense);
        let gap_class = classify_gap(&combined, &self.criterion, self.l0 as usize);
        if gap_class == GapClass::Undetermined {
            return Err(Error::PromiseViolation(format!(
                "gap {} at (phi={}, theta={}) meets neither threshold",
                combined.gap, point.phi, point.theta
            )));
        }
        // The trivial state is the ground state exactly when the shift stays
        // at the guard floor.
        let order_parameter = if combined.ground_energy() >= 0.0 { 1.0 } else { 0.0 };
        let lattice = lattice_energy(&square, self.lattice, self.meta.l_n)?;
        Ok(OracleSample {
            energy_interval: lattice.total_interval,
            gap: combined.gap,
            order_parameter,
            gap_class,
        })
    }

    fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }

    fn reset_queries(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    fn l0(&self) -> u64 {
        self.l0
    }
}

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Yes,
    No,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPoint {
    pub phi: f64,
    pub theta: f64,
    pub label: PhaseLabel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CriticalEstimate {
    /// Bracketing interval for `φ*`.
    Point { lo: f64, hi: f64 },
    /// Per-φ bracketing intervals for `θ*(φ)`, preceded by the measured `y`.
    Line { y: (f64, f64), band: Vec<(f64, f64, f64)> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub grid: Vec<GridPoint>,
    pub critical_estimate: CriticalEstimate,
    pub decision: Decision,
    pub queries: usize,
}

fn bisect_phi(
    oracle: &dyn GroundEnergyOracle,
    window: (f64, f64),
    theta: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = window;
    if !(hi > lo) || !(tol > 0.0) {
        return Err(Error::InvalidArgument("bisection needs hi > lo and tol > 0".into()));
    }
    let la = oracle.classify(&ParamPoint { phi: lo, theta })?;
    let lb = oracle.classify(&ParamPoint { phi: hi, theta })?;
    if la == lb {
        return Err(Error::PromiseViolation(format!(
            "no classification change across the window [{lo}, {hi}] at theta={theta}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let lm = oracle.classify(&ParamPoint { phi: mid, theta })?;
        if lm == la {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

fn bisect_theta(
    oracle: &dyn GroundEnergyOracle,
    phi: f64,
    window: (f64, f64),
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = window;
    let la = oracle.classify(&ParamPoint { phi, theta: lo })?;
    let lb = oracle.classify(&ParamPoint { phi, theta: hi })?;
    if la == lb {
        return Err(Error::PromiseViolation(format!(
            "no classification change in theta across [{lo}, {hi}] at phi={phi}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let lm = oracle.classify(&ParamPoint { phi, theta: mid })?;
        if lm == la {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// One-parameter containment algorithm: classify the endpoints, bisect to
/// `tol`, decide by which side of the promised exclusion zone the bracket
/// falls on.
pub fn solve_1crt(
    instance: &CrtPrmInstance,
    oracle: &dyn GroundEnergyOracle,
    tol: f64,
) -> Result<PhaseDiagram> {
    let (alpha, beta) = match instance.mode {
        CrtMode::One { alpha, beta } => (alpha, beta),
        _ => return Err(Error::InvalidArgument("solve_1crt needs a one-parameter instance".into())),
    };
    oracle.reset_queries();
    let (lo, hi) = bisect_phi(oracle, instance.phi_window, 0.0, tol)?;
    let estimate = 0.5 * (lo + hi);
    let decision = if estimate <= 0.5 * (alpha + beta) { Decision::Yes } else { Decision::No };
    Ok(PhaseDiagram {
        grid: Vec::new(),
        critical_estimate: CriticalEstimate::Point { lo, hi },
        decision,
        queries: oracle.queries(),
    })
}

/// Two-parameter containment algorithm: locate the offset `y` on the θ = 0
/// axis, then test the critical line against the rectangle on sampled
/// `φ ∈ S_κ` (two classifications per sample decide the side; a θ-bisection
/// per sample brackets the line for reporting).
pub fn solve_2crt(
    instance: &CrtPrmInstance,
    oracle: &dyn GroundEnergyOracle,
    tol: f64,
) -> Result<PhaseDiagram> {
    let (alpha1, beta1, kappa) = match instance.mode {
        CrtMode::Two { alpha1, beta1, kappa, .. } => (alpha1, beta1, kappa),
        _ => return Err(Error::InvalidArgument("solve_2crt needs a two-parameter instance".into())),
    };
    oracle.reset_queries();
    // Stage 1: y on the θ = 0 axis (B below, A above).
    let (y_lo, y_hi) = bisect_phi(oracle, instance.phi_window, 0.0, tol)?;
    let y = 0.5 * (y_lo + y_hi);
    // Stage 2: sample S_κ with several φ values; hardens the single choice
    // against implementation error.
    let samples = crate::grid::linspace(y + kappa, y + 2.0 * kappa, 8);
    let mut above = 0usize;
    let mut below = 0usize;
    for &phi in &samples {
        // θ* > β₁ iff the point (φ, β₁) still lies below the critical line
        // (phase A); θ* < α₁ iff (φ, α₁) already lies above it (phase B).
        let at_beta = oracle.classify(&ParamPoint { phi, theta: beta1 })?;
        let at_alpha = oracle.classify(&ParamPoint { phi, theta: alpha1 })?;
        match (at_alpha, at_beta) {
            (PhaseLabel::A, PhaseLabel::A) => above += 1,
            (PhaseLabel::B, PhaseLabel::B) => below += 1,
            (PhaseLabel::A, PhaseLabel::B) => {
                return Err(Error::PromiseViolation(format!(
                    "critical line crosses the rectangle at phi={phi}"
                )))
            }
            (PhaseLabel::B, PhaseLabel::A) => {
                return Err(Error::PromiseViolation(format!(
                    "inverted classification at phi={phi}: not single-crossing"
                )))
            }
        }
    }
    let decision_queries = oracle.queries();
    if above != samples.len() && below != samples.len() {
        return Err(Error::PromiseViolation(
            "sampled S_κ mixes sides: the promise excludes this".into(),
        ));
    }
    let decision = if above == samples.len() { Decision::Yes } else { Decision::No };
    // Reporting stage: bracket θ*(φ) per sample.
    let mut band = Vec::with_capacity(samples.len());
    for &phi in &samples {
        let (lo, hi) = bisect_theta(oracle, phi, instance.theta_window, tol)?;
        band.push((phi, lo, hi));
    }
    Ok(PhaseDiagram {
        grid: Vec::new(),
        critical_estimate: CriticalEstimate::Line { y: (y_lo, y_hi), band },
        decision,
        queries: decision_queries,
    })
}

/// Exhaustive grid classification: the reference the solvers are checked
/// against, and the source of plot-ready phase diagrams.
pub fn brute_scan(
    instance: &CrtPrmInstance,
    oracle: &dyn GroundEnergyOracle,
    resolution: usize,
) -> Result<PhaseDiagram> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    oracle.reset_queries();
    let (phi_lo, phi_hi) = instance.phi_window;
    let phis = crate::grid::linspace(phi_lo, phi_hi, resolution);
    let mut grid = Vec::new();
    let decision;
    let critical_estimate;
    match instance.mode {
        CrtMode::One { alpha, beta } => {
            let labels = crate::grid::map_points(&phis, |&phi| {
                oracle.classify(&ParamPoint::phi_only(phi))
            });
            let mut flip: Option<usize> = None;
            let mut flips = 0usize;
            let mut prev: Option<PhaseLabel> = None;
            for (i, l) in labels.iter().enumerate() {
                let l = l.as_ref().map_err(clone_err)?;
                if let Some(p) = prev {
                    if p != *l {
                        flips += 1;
                        flip = Some(i);
                    }
                }
                prev = Some(*l);
                grid.push(GridPoint { phi: phis[i], theta: 0.0, label: *l });
            }
            if flips != 1 {
                return Err(Error::PromiseViolation(format!(
                    "grid scan found {flips} classification changes; promised exactly one"
                )));
            }
            let i = flip.unwrap();
            critical_estimate = CriticalEstimate::Point { lo: phis[i - 1], hi: phis[i] };
            let estimate = 0.5 * (phis[i - 1] + phis[i]);
            decision = if estimate <= 0.5 * (alpha + beta) { Decision::Yes } else { Decision::No };
        }
        CrtMode::Two { alpha1, beta1, alpha2, beta2, kappa } => {
            let (theta_lo, theta_hi) = instance.theta_window;
            let thetas = crate::grid::linspace(theta_lo, theta_hi, resolution);
            let mut points = Vec::with_capacity(resolution * resolution);
            for &phi in &phis {
                for &theta in &thetas {
                    points.push(ParamPoint { phi, theta });
                }
            }
            let labels = crate::grid::map_points(&points, |p| oracle.classify(p));
            for (p, l) in points.iter().zip(labels.iter()) {
                let l = l.as_ref().map_err(clone_err)?;
                grid.push(GridPoint { phi: p.phi, theta: p.theta, label: *l });
            }
            // Estimate the line on the sampled S_κ (needs y first).
            let (y_lo, y_hi) = bisect_phi(oracle, instance.phi_window, 0.0, 1e-6)?;
            let y = 0.5 * (y_lo + y_hi);
            let mut band = Vec::new();
            let mut above = 0usize;
            for &phi in crate::grid::linspace(y + kappa, y + 2.0 * kappa, 8).iter() {
                let (lo, hi) = bisect_theta(oracle, phi, instance.theta_window, 1e-6)?;
                if lo > beta1 {
                    above += 1;
                }
                band.push((phi, lo, hi));
            }
            let _ = (alpha1, alpha2, beta2);
            decision = if above == band.len() { Decision::Yes } else { Decision::No };
            critical_estimate = CriticalEstimate::Line { y: (y_lo, y_hi), band };
        }
    }
    Ok(PhaseDiagram { grid, critical_estimate, decision, queries: oracle.queries() })
}

fn clone_err(e: &Error) -> Error {
    Error::PromiseViolation(format!("oracle query failed: {e}"))
}

/// Ceiling on classifications used by `solve_1crt`:
/// two endpoints plus one per bisection halving.
pub fn bisection_query_ceiling(window: f64, tol: f64) -> usize {
    2 + (window / tol).log2().ceil().max(0.0) as usize
}
