//! Eigenvalue search: adaptive r-grid, sign-change brackets, trisection.
//!
//! Residuals `g_m(r)` are compared between consecutive grid points computed
//! with the same [`TruncationPlan`]; the plan is frozen while `M0` stays
//! constant so that `g` is a continuous function of `r`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hejhal::{normalize_coeffs, CoefficientVector, Hejhal, Symmetry, TruncationPlan};
use crate::math::{ceil, fabs};
use crate::modular_domain::Y0;
use crate::number_theory::{coefficient_bound_check, hecke_residuals, ramanujan_check, sato_tate_distance, PrimeCoefficientSet};
use crate::parallel::Parallel;

/// Desired `‖ã(r_new) − ã(r_old)‖²` per step.
pub const TARGET_DISTANCE: f64 = 0.04;
/// Steps with a larger distance are retried with half the step.
pub const MAX_DISTANCE: f64 = 0.16;

/// `‖u − v‖²`.
pub fn coeff_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    Ok(u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// `min(‖u − v‖², ‖u + v‖²)`: the distance between the lines spanned by `u`, `v`.
///
/// The walk uses this form because `ã` changes sign whenever the `a_1 = 1`
/// normalization passes through a pole of the linear system.
pub fn aligned_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    let d = coeff_distance(u, v)?;
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    // ‖u+v‖² = ‖u−v‖² + 4⟨u,v⟩
    Ok(d.min(d + 4.0 * dot))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub r_current: f64,
    /// Last accepted step.
    pub step: f64,
    pub a_tilde_current: Vec<f64>,
    pub g_current: Vec<f64>,
    /// Distance measured over the last accepted step, if any.
    pub last_distance: Option<f64>,
}

/// `h · 0.04 / d` clamped to `[h/8, 8h]`.
pub fn next_step(step: f64, last_distance: Option<f64>) -> f64 {
    match last_distance {
        None => step,
        Some(d) if d > 0.0 => (step * TARGET_DISTANCE / d).clamp(step / 8.0, 8.0 * step),
        Some(_) => 8.0 * step,
    }
}

pub fn predict_next_r(state: &GridState) -> f64 {
    state.r_current + next_step(state.step, state.last_distance)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepDecision {
    Accept,
    Retry { step: f64 },
}

/// Accepts `distance ≤ 0.16`, otherwise halves the step; a halved step below
/// `floor` is a stall at `r`.
pub fn accept_or_retry_step(distance: f64, step: f64, floor: f64, r: f64) -> Result<StepDecision> {
    if distance <= MAX_DISTANCE {
        return Ok(StepDecision::Accept);
    }
    let half = 0.5 * step;
    if half < floor {
        return Err(Error::Stall { r, step: half });
    }
    Ok(StepDecision::Retry { step: half })
}

/// Indices with `g_old[m] · g_new[m] < 0`.
pub fn count_sign_changes(g_old: &[f64], g_new: &[f64]) -> usize {
    g_old.iter().zip(g_new).filter(|(a, b)| **a * **b < 0.0).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub r_lo: f64,
    pub r_hi: f64,
    pub sign_changes: usize,
    pub g_lo: Vec<f64>,
    pub g_hi: Vec<f64>,
}

/// Minimum count for a bracket: `⌈M0/2⌉`.
pub fn bracket_threshold(m0: usize) -> usize {
    m0.div_ceil(2)
}

pub fn detect_bracket(g_old: &[f64], g_new: &[f64], r_old: f64, r_new: f64) -> Option<Bracket> {
    let count = count_sign_changes(g_old, g_new);
    if g_old.is_empty() || count < bracket_threshold(g_old.len()) {
        return None;
    }
    let (r_lo, r_hi, g_lo, g_hi) = if r_old <= r_new {
        (r_old, r_new, g_old.to_vec(), g_new.to_vec())
    } else {
        (r_new, r_old, g_new.to_vec(), g_old.to_vec())
    };
    Some(Bracket { r_lo, r_hi, sign_changes: count, g_lo, g_hi })
}

/// Anything that yields `g(r)` for trisection.
pub trait ResidualSource {
    fn residual(&self, r: f64) -> Result<Vec<f64>>;
}

impl<F: Fn(f64) -> Result<Vec<f64>>> ResidualSource for F {
    fn residual(&self, r: f64) -> Result<Vec<f64>> {
        self(r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrisectOutcome {
    Accepted { r: f64, width: f64, iterations: usize, counts: Vec<usize> },
    Rejected { reason: String, iterations: usize, counts: Vec<usize> },
    /// Iteration cap hit before the width reached `r_tol`.
    Inconclusive { r_lo: f64, r_hi: f64, iterations: usize, counts: Vec<usize> },
}

fn sup(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m, v| m.max(fabs(*v)))
}

/// Component with the largest swing `|g_hi − g_lo|` among those that change sign.
fn newton_component(g_lo: &[f64], g_hi: &[f64]) -> Option<usize> {
    let mut best = None;
    let mut swing = 0.0;
    for (k, (a, b)) in g_lo.iter().zip(g_hi).enumerate() {
        let s = fabs(b - a);
        if a * b < 0.0 && s > swing {
            swing = s;
            best = Some(k);
        }
    }
    best
}

/// Linear interpolation of component `k` to zero inside `(lo, hi)`.
fn secant_root(lo: f64, hi: f64, g_lo: &[f64], g_hi: &[f64], k: usize) -> Option<f64> {
    let (a, b) = (g_lo[k], g_hi[k]);
    if a * b >= 0.0 {
        return None;
    }
    let r = lo - a * (hi - lo) / (b - a);
    (r > lo && r < hi).then_some(r)
}

type Node = (f64, Vec<f64>);

enum Piece {
    /// A cut hit a point where every residual vanishes.
    Exact(f64),
    Range(Node, Node, usize),
}

/// Splits `[lo, hi]` at the interior points `cuts` (ascending) and keeps the
/// piece with the most sign changes, preferring the narrower one on ties.
fn pick_piece(source: &impl ResidualSource, lo: Node, hi: Node, cuts: &[f64]) -> Result<Piece> {
    let mut nodes = vec![lo];
    for &c in cuts {
        let g = source.residual(c)?;
        if sup(&g) == 0.0 {
            return Ok(Piece::Exact(c));
        }
        nodes.push((c, g));
    }
    nodes.push(hi);
    let mut best = 0;
    let mut best_count = 0;
    let mut best_width = f64::INFINITY;
    for i in 0..nodes.len() - 1 {
        let count = count_sign_changes(&nodes[i].1, &nodes[i + 1].1);
        let width = nodes[i + 1].0 - nodes[i].0;
        if count > best_count || (count == best_count && width < best_width) {
            best = i;
            best_count = count;
            best_width = width;
        }
    }
    let right = nodes.swap_remove(best + 1);
    let left = nodes.swap_remove(best);
    Ok(Piece::Range(left, right, best_count))
}

fn exact(r: f64, iterations: usize, counts: Vec<usize>) -> TrisectOutcome {
    TrisectOutcome::Accepted { r, width: 0.0, iterations, counts }
}

/// Refines a bracket by bisection plus a Newton (secant) cut on the
/// residual component with the largest swing.
///
/// Each iteration bisects, keeps the half with more sign changes, then cuts
/// that half at the secant root `s` and at `s ± δ` and again keeps the piece
/// with the most sign changes. The bracket is rejected when the count falls
/// on two consecutive iterations, or when `max|g|` at the final endpoints
/// exceeds its value at the starting endpoints (the flip came from a pole of
/// the system rather than a zero of `g`).
pub fn trisect(bracket: &Bracket, source: &impl ResidualSource, r_tol: f64, max_iterations: usize) -> Result<TrisectOutcome> {
    let m0 = bracket.g_lo.len();
    let threshold = bracket_threshold(m0);
    let start_size = sup(&bracket.g_lo).min(sup(&bracket.g_hi));
    let mut lo = (bracket.r_lo, bracket.g_lo.clone());
    let mut hi = (bracket.r_hi, bracket.g_hi.clone());
    let mut counts = vec![bracket.sign_changes];
    let mut falls = 0;
    let mut iterations = 0;
    while hi.0 - lo.0 > r_tol {
        if iterations == max_iterations {
            return Ok(TrisectOutcome::Inconclusive { r_lo: lo.0, r_hi: hi.0, iterations, counts });
        }
        iterations += 1;
        let mid = 0.5 * (lo.0 + hi.0);
        let (l, h, mut count) = match pick_piece(source, lo, hi, &[mid])? {
            Piece::Range(l, h, c) => (l, h, c),
            Piece::Exact(r) => return Ok(exact(r, iterations, counts)),
        };
        lo = l;
        hi = h;
        let width = hi.0 - lo.0;
        if width > r_tol {
            if let Some(s) = newton_component(&lo.1, &hi.1).and_then(|k| secant_root(lo.0, hi.0, &lo.1, &hi.1, k)) {
                let delta = (1e-3 * width).max(0.25 * r_tol);
                let mut cuts: Vec<f64> = [s - delta, s + delta].into_iter().filter(|c| *c > lo.0 && *c < hi.0).collect();
                cuts.dedup();
                if !cuts.is_empty() {
                    let (l, h, c) = match pick_piece(source, lo, hi, &cuts)? {
                        Piece::Range(l, h, c) => (l, h, c),
                        Piece::Exact(r) => return Ok(exact(r, iterations, counts)),
                    };
                    lo = l;
                    hi = h;
                    count = c;
                }
            }
        }
        let prev = *counts.last().unwrap_or(&0);
        falls = if count < prev { falls + 1 } else { 0 };
        counts.push(count);
        if falls >= 2 {
            return Ok(TrisectOutcome::Rejected {
                reason: "sign-change count fell on two consecutive iterations".into(),
                iterations,
                counts,
            });
        }
    }
    let final_count = count_sign_changes(&lo.1, &hi.1);
    if final_count < threshold {
        return Ok(TrisectOutcome::Rejected {
            reason: alloc::format!("final sign-change count {final_count} below {threshold}"),
            iterations,
            counts,
        });
    }
    if sup(&lo.1).min(sup(&hi.1)) > start_size {
        return Ok(TrisectOutcome::Rejected {
            reason: "residual grows towards the flip: pole of the linear system".into(),
            iterations,
            counts,
        });
    }
    let r = newton_component(&lo.1, &hi.1)
        .and_then(|k| secant_root(lo.0, hi.0, &lo.1, &hi.1, k))
        .unwrap_or(0.5 * (lo.0 + hi.0));
    Ok(TrisectOutcome::Accepted { r, width: hi.0 - lo.0, iterations, counts })
}

/// Acceptance thresholds applied to a trisected eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gates {
    pub hecke: f64,
    pub y_consistency: f64,
    /// Allowed excess over `|a_p| ≤ 2`.
    pub ramanujan_slack: f64,
    pub bound_ratio: f64,
}

impl Default for Gates {
    fn default() -> Self {
        Gates { hecke: 1e-6, y_consistency: 1e-5, ramanujan_slack: 1e-6, bound_ratio: 1.0 + 1e-12 }
    }
}

/// Results of the arithmetic checks stored with each record.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verification {
    pub hecke_worst_triple: [usize; 3],
    pub hecke_checked: usize,
    pub ramanujan_max_abs: f64,
    pub ramanujan_violations: Vec<usize>,
    pub bound_worst_ratio: f64,
    pub bound_worst_n: usize,
    /// `None` when `M0 < 2` leaves no prime coefficients.
    pub sato_tate_ks: Option<f64>,
    pub trisection_width: f64,
    pub trisection_iterations: usize,
}

/// One accepted eigenvalue. Coefficients are `a_1..a_{M0}` with `a_1 = 1`;
/// waveform values built from them carry the global factor `e^{πr/2}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenvalueRecord {
    pub r: f64,
    pub symmetry: Symmetry,
    pub eps: f64,
    pub m0: usize,
    pub q: usize,
    pub y1: f64,
    pub y2: f64,
    pub coefficients: Vec<f64>,
    pub hecke_max_residual: f64,
    pub y_consistency_max_delta: f64,
    pub verification: Verification,
}

impl EigenvalueRecord {
    pub fn coefficient_vector(&self) -> CoefficientVector {
        CoefficientVector::new(self.symmetry, self.r, self.coefficients.clone())
    }
}

/// Solves at `r` with both heights and fills in every check.
pub fn verify_eigenvalue<P: Parallel>(
    hejhal: &Hejhal<P>,
    r: f64,
    plan: &TruncationPlan,
    symmetry: Symmetry,
    width: f64,
    iterations: usize,
) -> Result<(EigenvalueRecord, CoefficientVector)> {
    let st = hejhal.step(r, plan, symmetry, true)?;
    let other = st.at_y2.as_ref().ok_or(Error::Degenerate("missing y2 solve"))?;
    let a = &st.coeffs.a;
    let dy = a.iter().zip(&other.a).fold(0.0f64, |m, (x, y)| m.max(fabs(x - y)));
    let hecke = hecke_residuals(a);
    let ram = ramanujan_check(a);
    let bound = coefficient_bound_check(a);
    let primes = PrimeCoefficientSet::from_coefficients(a);
    let verification = Verification {
        hecke_worst_triple: [hecke.worst_triple.0, hecke.worst_triple.1, hecke.worst_triple.2],
        hecke_checked: hecke.checked_count,
        ramanujan_max_abs: ram.max_abs,
        ramanujan_violations: ram.violations.iter().map(|v| v.0).collect(),
        bound_worst_ratio: bound.worst_ratio,
        bound_worst_n: bound.worst_n,
        sato_tate_ks: sato_tate_distance(&primes).ok(),
        trisection_width: width,
        trisection_iterations: iterations,
    };
    let record = EigenvalueRecord {
        r,
        symmetry,
        eps: plan.eps,
        m0: plan.m0,
        q: plan.q,
        y1: plan.y1,
        y2: plan.y2,
        coefficients: a.clone(),
        hecke_max_residual: hecke.max_residual,
        y_consistency_max_delta: dy,
        verification,
    };
    Ok((record, st.coeffs))
}

/// The first gate a record fails, if any.
pub fn gate_failure(record: &EigenvalueRecord, gates: &Gates) -> Option<String> {
    let v = &record.verification;
    if !(record.hecke_max_residual <= gates.hecke) {
        return Some(alloc::format!("Hecke residual {:e} above {:e}", record.hecke_max_residual, gates.hecke));
    }
    if !(record.y_consistency_max_delta <= gates.y_consistency) {
        return Some(alloc::format!(
            "y-consistency {:e} above {:e}",
            record.y_consistency_max_delta, gates.y_consistency
        ));
    }
    if !(v.ramanujan_max_abs <= 2.0 + gates.ramanujan_slack) {
        return Some(alloc::format!("|a_p| reaches {}", v.ramanujan_max_abs));
    }
    if !(v.bound_worst_ratio <= gates.bound_ratio) {
        return Some(alloc::format!("|a_n|/(d(n)n^(1/4)) reaches {} at n={}", v.bound_worst_ratio, v.bound_worst_n));
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub eps: f64,
    /// Trisection stops at width `r_tol · max(1, r)`.
    pub r_tol: f64,
    /// First step; default `0.01 · min(1, 100/r_min)`.
    pub initial_step: Option<f64>,
    /// Smallest step before the walk reports a stall.
    pub step_floor: f64,
    pub max_trisect_iterations: usize,
    pub gates: Gates,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            eps: 1e-7,
            r_tol: 1e-12,
            initial_step: None,
            step_floor: 1e-9,
            max_trisect_iterations: 60,
            gates: Gates::default(),
        }
    }
}

impl SearchConfig {
    pub fn initial_step_at(&self, r_min: f64) -> f64 {
        self.initial_step.unwrap_or(0.01 * (100.0 / r_min).min(1.0))
    }

    pub fn tolerance_at(&self, r: f64) -> f64 {
        self.r_tol * r.max(1.0)
    }

    fn validate(&self, r_min: f64, r_max: f64) -> Result<()> {
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(Error::Config(alloc::format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        for (name, v) in [("eps", self.eps), ("r_tol", self.r_tol), ("step_floor", self.step_floor)] {
            if !(v > 0.0) {
                return Err(Error::Config(alloc::format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0) {
                return Err(Error::Config(alloc::format!("initial step must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// One accepted point of the walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub r: f64,
    /// Step that led here (zero for the first point).
    pub step: f64,
    pub distance: Option<f64>,
    pub sign_changes: usize,
    pub m0: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectedBracket {
    pub r_lo: f64,
    pub r_hi: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    /// Ascending in `r`.
    pub eigenvalues: Vec<EigenvalueRecord>,
    pub rejected_brackets: Vec<RejectedBracket>,
    pub grid_points_used: usize,
}

/// Callbacks for progress logging.
pub trait SearchObserver {
    fn grid_point(&mut self, _point: &GridPoint) {}
    fn bracket(&mut self, _bracket: &Bracket) {}
    fn accepted(&mut self, _record: &EigenvalueRecord) {}
    fn rejected(&mut self, _rejected: &RejectedBracket) {}
}

impl SearchObserver for () {}

/// The plan in force; replaced when `M0` at the current `r` differs.
struct PlanSchedule {
    eps: f64,
    plan: Option<TruncationPlan>,
}

impl PlanSchedule {
    fn new(eps: f64) -> Self {
        PlanSchedule { eps, plan: None }
    }

    /// Plan for `r`, and whether it was just replaced.
    fn at<P: Parallel>(&mut self, hejhal: &Hejhal<P>, r: f64) -> Result<(TruncationPlan, bool)> {
        if let Some(p) = &self.plan {
            let m0 = hejhal.truncation_order_with_peak(self.eps, r, Y0, p.peak)?.max(2);
            if m0 == p.m0 {
                return Ok((p.clone(), false));
            }
        }
        let p = hejhal.make_plan(self.eps, r)?;
        self.plan = Some(p.clone());
        Ok((p, true))
    }
}

/// `g(r)` and `ã(r)` under a fixed plan.
fn residual_at<P: Parallel>(hejhal: &Hejhal<P>, r: f64, plan: &TruncationPlan, symmetry: Symmetry) -> Result<(Vec<f64>, Vec<f64>)> {
    let st = hejhal.step(r, plan, symmetry, false)?;
    Ok((st.residual.g, normalize_coeffs(&st.coeffs.a)?))
}

/// Trisects, verifies and gates one bracket.
fn resolve_bracket<P: Parallel>(
    hejhal: &Hejhal<P>,
    bracket: &Bracket,
    plan: &TruncationPlan,
    symmetry: Symmetry,
    config: &SearchConfig,
) -> Result<core::result::Result<EigenvalueRecord, RejectedBracket>> {
    let source = |r: f64| hejhal.step(r, plan, symmetry, false).map(|s| s.residual.g);
    let tol = config.tolerance_at(bracket.r_hi);
    let reject = |reason: String| Ok(Err(RejectedBracket { r_lo: bracket.r_lo, r_hi: bracket.r_hi, reason }));
    let outcome = match trisect(bracket, &source, tol, config.max_trisect_iterations) {
        Err(Error::IllConditioned { r, .. }) => {
            return reject(alloc::format!("singular system at r={r} inside the bracket: pole, not an eigenvalue"));
        }
        other => other?,
    };
    match outcome {
        TrisectOutcome::Accepted { r, width, iterations, .. } => {
            let (record, _) = verify_eigenvalue(hejhal, r, plan, symmetry, width, iterations)?;
            match gate_failure(&record, &config.gates) {
                None => Ok(Ok(record)),
                Some(why) => reject(alloc::format!("r={r}: {why}")),
            }
        }
        TrisectOutcome::Rejected { reason, .. } => reject(reason),
        TrisectOutcome::Inconclusive { r_lo, r_hi, iterations, .. } => {
            reject(alloc::format!("inconclusive after {iterations} iterations, interval [{r_lo}, {r_hi}]"))
        }
    }
}

/// Walks `[r_min, r_max]` with the adaptive step rule, trisecting every
/// bracket on the way. After a bracket the walk simply continues from its
/// upper end.
pub fn search_interval<P: Parallel>(
    hejhal: &Hejhal<P>,
    r_min: f64,
    r_max: f64,
    symmetry: Symmetry,
    config: &SearchConfig,
    observer: &mut dyn SearchObserver,
) -> Result<SearchReport> {
    config.validate(r_min, r_max)?;
    let mut schedule = PlanSchedule::new(config.eps);
    let (mut plan, _) = schedule.at(hejhal, r_min)?;
    let (g0, a0) = residual_at(hejhal, r_min, &plan, symmetry)?;
    let mut state = GridState {
        r_current: r_min,
        step: config.initial_step_at(r_min),
        a_tilde_current: a0,
        g_current: g0,
        last_distance: None,
    };
    let mut report = SearchReport { eigenvalues: Vec::new(), rejected_brackets: Vec::new(), grid_points_used: 1 };
    observer.grid_point(&GridPoint { r: r_min, step: 0.0, distance: None, sign_changes: 0, m0: plan.m0 });
    while state.r_current < r_max {
        let mut h = next_step(state.step, state.last_distance);
        loop {
            let r_new = (state.r_current + h).min(r_max);
            let h_used = r_new - state.r_current;
            let (p_new, replanned) = schedule.at(hejhal, r_new)?;
            if replanned {
                // re-express the current point under the new plan
                let (g, a) = residual_at(hejhal, state.r_current, &p_new, symmetry)?;
                state.g_current = g;
                state.a_tilde_current = a;
                report.grid_points_used += 1;
                plan = p_new.clone();
            }
            report.grid_points_used += 1;
            let (g_new, a_new) = match residual_at(hejhal, r_new, &plan, symmetry) {
                Ok(x) => x,
                // landed on a singular point of the system: step around it
                Err(Error::IllConditioned { .. }) => {
                    h = match accept_or_retry_step(f64::INFINITY, h_used, config.step_floor, state.r_current)? {
                        StepDecision::Retry { step } => step,
                        StepDecision::Accept => unreachable!(),
                    };
                    continue;
                }
                Err(e) => return Err(e),
            };
            let d = aligned_distance(&state.a_tilde_current, &a_new)?;
            match accept_or_retry_step(d, h_used, config.step_floor, state.r_current)? {
                StepDecision::Retry { step } => {
                    h = step;
                    continue;
                }
                StepDecision::Accept => {}
            }
            let changes = count_sign_changes(&state.g_current, &g_new);
            if let Some(b) = detect_bracket(&state.g_current, &g_new, state.r_current, r_new) {
                observer.bracket(&b);
                match resolve_bracket(hejhal, &b, &plan, symmetry, config)? {
                    Ok(rec) => {
                        observer.accepted(&rec);
                        report.eigenvalues.push(rec);
                    }
                    Err(rej) => {
                        observer.rejected(&rej);
                        report.rejected_brackets.push(rej);
                    }
                }
            }
            // logged after the bracket is settled, so a resumed walk may start here
            observer.grid_point(&GridPoint { r: r_new, step: h_used, distance: Some(d), sign_changes: changes, m0: plan.m0 });
            state = GridState {
                r_current: r_new,
                step: if r_new >= r_max { state.step } else { h_used },
                a_tilde_current: a_new,
                g_current: g_new,
                last_distance: Some(d),
            };
            break;
        }
    }
    report.eigenvalues.sort_by(|a, b| a.r.total_cmp(&b.r));
    Ok(report)
}

/// Uniform grid `r_min, r_min + step, …, r_max` with the plan in force at each point.
fn uniform_plans<P: Parallel>(
    hejhal: &Hejhal<P>,
    r_min: f64,
    r_max: f64,
    step: f64,
    config: &SearchConfig,
) -> Result<(Vec<f64>, Vec<TruncationPlan>, Vec<usize>)> {
    config.validate(r_min, r_max)?;
    if !(step > 0.0) {
        return Err(Error::Config(alloc::format!("grid step must be positive, got {step}")));
    }
    let n = ceil((r_max - r_min) / step) as usize;
    let rs: Vec<f64> = (0..=n).map(|i| (r_min + i as f64 * step).min(r_max)).collect();
    // plans are fixed in order so the result does not depend on scheduling
    let mut schedule = PlanSchedule::new(config.eps);
    let mut plan_of = Vec::with_capacity(rs.len());
    let mut plans: Vec<TruncationPlan> = Vec::new();
    for &r in &rs {
        let (p, replanned) = schedule.at(hejhal, r)?;
        if replanned {
            plans.push(p);
        }
        plan_of.push(plans.len() - 1);
    }
    Ok((rs, plans, plan_of))
}

/// Brackets and trisection over precomputed grid residuals; points whose
/// solve was singular are `None` and skipped.
fn scan_grid<P: Parallel>(
    hejhal: &Hejhal<P>,
    symmetry: Symmetry,
    config: &SearchConfig,
    rs: &[f64],
    plans: &[TruncationPlan],
    plan_of: &[usize],
    gs: Vec<Option<Vec<f64>>>,
) -> Result<SearchReport> {
    let mut report = SearchReport { eigenvalues: Vec::new(), rejected_brackets: Vec::new(), grid_points_used: rs.len() };
    let mut prev: Option<usize> = None;
    for i in 0..rs.len() {
        let Some(g_new) = &gs[i] else { continue };
        let Some(k) = prev.replace(i) else { continue };
        let plan = &plans[plan_of[i]];
        let g_old = if plan_of[k] == plan_of[i] {
            gs[k].clone().unwrap_or_default()
        } else {
            report.grid_points_used += 1;
            match residual_at(hejhal, rs[k], plan, symmetry) {
                Ok((g, _)) => g,
                Err(Error::IllConditioned { .. }) => continue,
                Err(e) => return Err(e),
            }
        };
        if let Some(b) = detect_bracket(&g_old, g_new, rs[k], rs[i]) {
            match resolve_bracket(hejhal, &b, plan, symmetry, config)? {
                Ok(rec) => report.eigenvalues.push(rec),
                Err(rej) => report.rejected_brackets.push(rej),
            }
        }
    }
    report.eigenvalues.sort_by(|a, b| a.r.total_cmp(&b.r));
    Ok(report)
}

fn singular_as_none(g: Result<Vec<f64>>) -> Result<Option<Vec<f64>>> {
    match g {
        Ok(g) => Ok(Some(g)),
        Err(Error::IllConditioned { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Brute-force variant: residuals on a uniform grid of the given step, then
/// the same trisection. Grid points are evaluated through `hejhal.parallel`.
pub fn uniform_grid_search<P: Parallel>(
    hejhal: &Hejhal<P>,
    r_min: f64,
    r_max: f64,
    symmetry: Symmetry,
    step: f64,
    config: &SearchConfig,
) -> Result<SearchReport> {
    let (rs, plans, plan_of) = uniform_plans(hejhal, r_min, r_max, step, config)?;
    let gs = hejhal.parallel.map(rs.len(), &|i| {
        singular_as_none(residual_at(hejhal, rs[i], &plans[plan_of[i]], symmetry).map(|x| x.0))
    });
    let gs = gs.into_iter().collect::<Result<Vec<_>>>()?;
    scan_grid(hejhal, symmetry, config, &rs, &plans, &plan_of, gs)
}

/// [`uniform_grid_search`] for both symmetries, sharing Bessel evaluations;
/// returns `(even, odd)`.
pub fn uniform_grid_search_both<P: Parallel>(
    hejhal: &Hejhal<P>,
    r_min: f64,
    r_max: f64,
    step: f64,
    config: &SearchConfig,
) -> Result<(SearchReport, SearchReport)> {
    let (rs, plans, plan_of) = uniform_plans(hejhal, r_min, r_max, step, config)?;
    let both = hejhal.parallel.map(rs.len(), &|i| -> Result<(Option<Vec<f64>>, Option<Vec<f64>>)> {
        let (even, odd) = hejhal.step_both(rs[i], &plans[plan_of[i]])?;
        Ok((singular_as_none(even.map(|s| s.residual.g))?, singular_as_none(odd.map(|s| s.residual.g))?))
    });
    let (mut ge, mut go) = (Vec::with_capacity(rs.len()), Vec::with_capacity(rs.len()));
    for b in both {
        let (e, o) = b?;
        ge.push(e);
        go.push(o);
    }
    let even = scan_grid(hejhal, Symmetry::Even, config, &rs, &plans, &plan_of, ge)?;
    let odd = scan_grid(hejhal, Symmetry::Odd, config, &rs, &plans, &plan_of, go)?;
    Ok((even, odd))
}
