//! Event-driven homotopy over the regularization value.
//!
//! Starting from the zero solution at `lambda_max = ||X^T y||_inf`, each
//! iteration computes the affine law `w_A(lambda) = a + lambda b` on the
//! current active set and scans two event families as lambda decreases:
//!
//!   1. an active coordinate's `w_i(lambda)` crossing zero, and
//!   2. an inactive coordinate's correlation `|X_j^T (X w - y)|` reaching
//!      the boundary `lambda`.
//!
//! The largest candidate strictly below the current lambda wins, the active
//! set and sign vector are updated, and a segment is appended. Candidates
//! that agree within the tie window are applied simultaneously and verified;
//! if verification fails they are applied singly in ascending coordinate
//! order, and if that fails too the solve aborts as a degenerate tie.
//!
//! Every finished segment is verified at its midpoint against the optimality
//! conditions; a midpoint violation above the mode's tolerance aborts the
//! solve, which on worst-case instances is the expected behavior of standard
//! precision rather than a bug.

use std::fmt;

use crate::error::{LinalgError, SolveFailure};
use crate::factor::ActiveSetFactor;
use crate::instance::ProblemInstance;
use crate::kkt::kkt_check_raw;
use crate::mat::{dot, inf_norm, promote, DenseMatrix};
use crate::path::{PathDiagnostics, PathSegment, RegularizationPath};
use crate::scalar::{PrecisionMode, Scalar};

/// Options for [`solve_path`]. Precision is chosen by the scalar type.
#[derive(Clone, Debug)]
pub struct SolveOpts {
    /// Stop once no event lies above this value (0 = trace the whole path).
    pub lambda_min: f64,
    /// Abort with the partial path after this many segments.
    pub max_segments: usize,
    /// Tie window multiplier: candidates within `mult * eps * lambda` of the
    /// winning event are treated as simultaneous.
    pub tie_tol_mult: f64,
    /// Midpoint optimality tolerance; `None` picks the mode default
    /// (1e-8 standard, 1e-10 extended).
    pub kkt_tol: Option<f64>,
    /// Verify each segment midpoint (disable only for throwaway solves).
    pub check_kkt: bool,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts {
            lambda_min: 0.0,
            max_segments: 1_000_000,
            tie_tol_mult: 100.0,
            kkt_tol: None,
            check_kkt: true,
        }
    }
}

/// Mode-default midpoint tolerance.
pub fn default_kkt_tol(mode: PrecisionMode) -> f64 {
    match mode {
        PrecisionMode::Standard => 1e-8,
        PrecisionMode::Extended => 1e-10,
    }
}

/// Solver failure; a budget overrun carries the partial path.
#[derive(Debug, Clone)]
pub enum SolveError<S> {
    Failure(SolveFailure),
    SegmentBudgetExceeded {
        partial: Box<RegularizationPath<S>>,
        lambda: f64,
    },
}

impl<S: Scalar> SolveError<S> {
    /// Drops any partial path, keeping the scalar-free failure description.
    pub fn into_failure(self) -> SolveFailure {
        match self {
            SolveError::Failure(f) => f,
            SolveError::SegmentBudgetExceeded { partial, lambda } => {
                SolveFailure::SegmentBudgetExceeded {
                    budget: partial.segments.len(),
                    lambda,
                }
            }
        }
    }
}

impl<S: Scalar> fmt::Display for SolveError<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Failure(e) => e.fmt(f),
            SolveError::SegmentBudgetExceeded { partial, lambda } => write!(
                f,
                "segment budget exceeded after {} segments at lambda {lambda:.6e}",
                partial.segments.len()
            ),
        }
    }
}

impl<S: Scalar + fmt::Debug> std::error::Error for SolveError<S> {}

impl<S> From<LinalgError> for SolveError<S> {
    fn from(e: LinalgError) -> Self {
        SolveError::Failure(SolveFailure::Singular(e))
    }
}

/// `lambda_max = ||X^T y||_inf`: the smallest lambda with `w = 0` optimal.
pub fn lambda_max(inst: &ProblemInstance) -> f64 {
    inf_norm(&inst.x.tr_matvec(&inst.y))
}

/// A path in whichever precision it was solved at; lets callers dispatch on
/// a runtime [`PrecisionMode`] without going generic themselves.
#[derive(Clone, Debug)]
pub enum AnyPath {
    Standard(RegularizationPath<f64>),
    Extended(RegularizationPath<crate::Dd>),
}

impl AnyPath {
    pub fn count(&self) -> usize {
        match self {
            AnyPath::Standard(p) => p.count(),
            AnyPath::Extended(p) => p.count(),
        }
    }

    pub fn breakpoints_f64(&self) -> Vec<f64> {
        match self {
            AnyPath::Standard(p) => p.breakpoints(),
            AnyPath::Extended(p) => p.breakpoints().iter().map(|v| v.to_f64()).collect(),
        }
    }

    pub fn sign_sequence(&self) -> Vec<Vec<i8>> {
        match self {
            AnyPath::Standard(p) => p.sign_sequence(),
            AnyPath::Extended(p) => p.sign_sequence(),
        }
    }

    pub fn diagnostics(&self) -> &PathDiagnostics {
        match self {
            AnyPath::Standard(p) => &p.diagnostics,
            AnyPath::Extended(p) => &p.diagnostics,
        }
    }

    pub fn lambda_max_f64(&self) -> f64 {
        match self {
            AnyPath::Standard(p) => p.lambda_max,
            AnyPath::Extended(p) => p.lambda_max.to_f64(),
        }
    }

    pub fn eval_f64(&self, lambda: f64) -> Result<Vec<f64>, crate::EvalError> {
        match self {
            AnyPath::Standard(p) => p.eval(lambda),
            AnyPath::Extended(p) => p
                .eval(crate::Dd::from_f64(lambda))
                .map(|w| w.iter().map(|v| v.to_f64()).collect()),
        }
    }
}

/// Solves in the given runtime precision; budget overruns drop the partial
/// path and report the scalar-free failure.
pub fn solve_path_any(
    inst: &ProblemInstance,
    mode: PrecisionMode,
    opts: &SolveOpts,
) -> Result<AnyPath, SolveFailure> {
    match mode {
        PrecisionMode::Standard => solve_path::<f64>(inst, opts)
            .map(AnyPath::Standard)
            .map_err(|e| e.into_failure()),
        PrecisionMode::Extended => solve_path::<crate::Dd>(inst, opts)
            .map(AnyPath::Extended)
            .map_err(|e| e.into_failure()),
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
enum EventKind {
    /// Active coordinate crosses zero; payload is the coordinate index.
    Leave(usize),
    /// Inactive coordinate’s correlation reaches the boundary, entering with
    /// the given sign.
    Enter(usize, i8),
}

#[derive(Copy, Clone, Debug)]
struct Event<S> {
    lambda: S,
    kind: EventKind,
}

impl<S> Event<S> {
    fn coord(&self) -> usize {
        match self.kind {
            EventKind::Leave(i) => i,
            EventKind::Enter(j, _) => j,
        }
    }
}

struct Law<S> {
    a: Vec<S>,
    b: Vec<S>,
    /// `p_j = X_j^T (X_A a - y)` for every coordinate.
    p: Vec<S>,
    /// `q_j = X_j^T X_A b` for every coordinate.
    q: Vec<S>,
}

fn compute_law<S: Scalar>(
    x: &DenseMatrix<S>,
    y: &[S],
    factor: &ActiveSetFactor<S>,
    signs: &[i8],
) -> Law<S> {
    let active = factor.active();
    let (a, b) = if active.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let xaty: Vec<S> = active.iter().map(|&j| dot(x.col(j), y)).collect();
        let s_a: Vec<S> = active
            .iter()
            .map(|&j| S::from_f64(signs[j] as f64))
            .collect();
        let a = factor.solve(&xaty);
        let mut b = factor.solve(&s_a);
        for v in b.iter_mut() {
            *v = -*v;
        }
        (a, b)
    };
    // Residual split: X w(lambda) - y = r_a + lambda r_b.
    let mut r_a = x.matvec_subset(active, &a);
    for (ri, &yi) in r_a.iter_mut().zip(y) {
        *ri -= yi;
    }
    let r_b = x.matvec_subset(active, &b);
    let p = x.tr_matvec(&r_a);
    let q = x.tr_matvec(&r_b);
    Law { a, b, p, q }
}

fn collect_events<S: Scalar>(
    factor: &ActiveSetFactor<S>,
    signs: &[i8],
    law: &Law<S>,
    lam_cur: S,
    lam_floor: S,
    pins: &[(usize, Pin)],
) -> Vec<Event<S>> {
    let mut events = Vec::new();
    // Strict upper guard: the event must sit below the current lambda by
    // more than the solve noise, or a just-fired event would re-fire.
    let guard_hi = if lam_cur.is_finite() {
        lam_cur - S::from_f64(REENTRY_GUARD_MULT * S::epsilon()) * lam_cur
    } else {
        S::infinity()
    };
    let valid = |l: S| l.is_finite() && l > lam_floor && l > S::zero() && l < guard_hi;
    let pin_of = |coord: usize| pins.iter().find(|(c, _)| *c == coord).map(|(_, p)| *p);

    for (pos, &i) in factor.active().iter().enumerate() {
        // A weight-pinned coordinate's only root under this law is lam_cur
        // itself; any computed offset is noise.
        if pin_of(i) == Some(Pin::Weight) {
            continue;
        }
        if law.b[pos] != S::zero() {
            let lam = -law.a[pos] / law.b[pos];
            if valid(lam) {
                events.push(Event {
                    lambda: lam,
                    kind: EventKind::Leave(i),
                });
            }
        }
    }
    for (j, &sj) in signs.iter().enumerate() {
        if sj != 0 {
            continue;
        }
        // u_j(lambda) = p_j + lambda q_j hits -lambda (enter +1) or +lambda
        // (enter -1). A correlation-pinned coordinate sits on one boundary
        // at lam_cur; only the opposite boundary can host a real event
        // under this law.
        let pinned_sign = match pin_of(j) {
            Some(Pin::Correlation(s)) => s,
            _ => 0,
        };
        let den_plus = S::one() + law.q[j];
        if pinned_sign != 1 && den_plus != S::zero() {
            let lam = -law.p[j] / den_plus;
            if valid(lam) {
                events.push(Event {
                    lambda: lam,
                    kind: EventKind::Enter(j, 1),
                });
            }
        }
        let den_minus = S::one() - law.q[j];
        if pinned_sign != -1 && den_minus != S::zero() {
            let lam = law.p[j] / den_minus;
            if valid(lam) {
                events.push(Event {
                    lambda: lam,
                    kind: EventKind::Enter(j, -1),
                });
            }
        }
    }
    events
}

/// Exclusion window below the current lambda, relative, in units of eps.
/// Candidate roots inside it are re-detections of the event that just fired
/// (their position is pure solve noise), so they are skipped. True
/// consecutive events on the worst-case instances stay several orders of
/// magnitude further apart than this window even at d = 12.
const REENTRY_GUARD_MULT: f64 = 1e6;

/// Where a coordinate sits exactly on its boundary at the current lambda.
///
/// Pins are bookkeeping, not measurements: a coordinate is pinned because
/// the event that just fired put it there, so no magnitude threshold is
/// involved. A pinned coordinate's own boundary root equals the current
/// lambda by construction — any computed offset is solve noise — and its
/// feasibility just below is decided by O(1)-margin slope tests.
#[derive(Copy, Clone, Debug, PartialEq)]
enum Pin {
    /// Active coordinate with `w_i(lam_cur) = 0` (it just entered or
    /// touched zero).
    Weight,
    /// Inactive coordinate with `u_j(lam_cur) = -s * lam_cur` (it just left
    /// or grazed); `s` is the sign it would enter with.
    Correlation(i8),
}

/// Decides whether a pinned coordinate's state is feasible just below the
/// current lambda, and returns the corrective event if not.
///
/// By the Schur identity, the slope of a coordinate entered with sign `s`
/// is `-(s + q)/pivot`, so:
///
/// * a weight-pinned coordinate moves consistently iff `s * b < 0`;
///   otherwise its zero touch is tangential and it must leave;
/// * a correlation-pinned coordinate may stay out iff `s * q <= -1`;
///   otherwise the boundary moves into it and it must enter with sign `s`.
///
/// The two conditions are exact complements, so repairs never cycle.
fn find_pin_repair<S: Scalar>(
    factor: &ActiveSetFactor<S>,
    law: &Law<S>,
    signs: &[i8],
    pins: &[(usize, Pin)],
) -> Option<Event<S>> {
    for &(coord, pin) in pins {
        match pin {
            Pin::Weight => {
                let Some(pos) = factor.active().iter().position(|&a| a == coord) else {
                    continue;
                };
                let s = S::from_f64(signs[coord] as f64);
                if s * law.b[pos] >= S::zero() {
                    return Some(Event {
                        lambda: S::zero(),
                        kind: EventKind::Leave(coord),
                    });
                }
            }
            Pin::Correlation(s) => {
                if S::from_f64(s as f64) * law.q[coord] > -S::one() {
                    return Some(Event {
                        lambda: S::zero(),
                        kind: EventKind::Enter(coord, s),
                    });
                }
            }
        }
    }
    None
}

fn apply_events<S: Scalar>(
    x: &DenseMatrix<S>,
    factor: &mut ActiveSetFactor<S>,
    signs: &mut [i8],
    group: &[Event<S>],
) -> Result<(), LinalgError> {
    // Removals first, by descending position, so positions stay valid.
    let mut removals: Vec<usize> = group
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::Leave(i) => factor.active().iter().position(|&a| a == i),
            EventKind::Enter(..) => None,
        })
        .collect();
    removals.sort_unstable_by(|a, b| b.cmp(a));
    for pos in removals {
        let coord = factor.active()[pos];
        factor.remove_column(x, pos)?;
        signs[coord] = 0;
    }
    for e in group {
        if let EventKind::Enter(j, s) = e.kind {
            factor.add_column(x, j)?;
            signs[j] = s;
        }
    }
    Ok(())
}

/// Traces the exact path from `lambda_max` down to `opts.lambda_min`.
pub fn solve_path<S: Scalar>(
    inst: &ProblemInstance,
    opts: &SolveOpts,
) -> Result<RegularizationPath<S>, SolveError<S>> {
    let x = inst.x.map_scalar::<S>();
    let y = promote::<S>(&inst.y);
    solve_path_promoted(&x, &y, opts)
}

/// Same as [`solve_path`] for data already in the working scalar.
pub fn solve_path_promoted<S: Scalar>(
    x: &DenseMatrix<S>,
    y: &[S],
    opts: &SolveOpts,
) -> Result<RegularizationPath<S>, SolveError<S>> {
    let d = x.cols();
    let kkt_tol = opts.kkt_tol.unwrap_or_else(|| default_kkt_tol(S::MODE));
    let lam_floor = S::from_f64(opts.lambda_min);
    let lam_max = inf_norm(&x.tr_matvec(y));

    let mut factor: ActiveSetFactor<S> = ActiveSetFactor::new();
    let mut signs = vec![0i8; d];
    let mut lam_cur = S::infinity();
    let mut segments: Vec<PathSegment<S>> = Vec::new();
    let mut max_kkt = 0.0f64;
    let mut tie_events = 0usize;
    // Coordinates placed exactly on a boundary by the event(s) at lam_cur.
    let mut pins: Vec<(usize, Pin)> = Vec::new();

    let finish =
        |segments: Vec<PathSegment<S>>, max_kkt: f64, tie_events: usize| RegularizationPath {
            segments,
            lambda_max: lam_max,
            lambda_min: opts.lambda_min,
            diagnostics: PathDiagnostics {
                precision: S::MODE,
                max_kkt_violation: max_kkt,
                tie_events,
            },
        };

    loop {
        // Recompute the law, then resolve the pinned coordinates: a weight
        // pin with a sign-inconsistent slope is a tangential zero touch and
        // must leave; a correlation pin whose boundary moves into it must
        // enter. Each repair flips the pin to its complementary kind, and
        // the complementarity of the slope tests rules out cycling.
        let mut law = compute_law(x, y, &factor, &signs);
        let mut repairs = 0usize;
        while let Some(fix) = find_pin_repair(&factor, &law, &signs, &pins) {
            repairs += 1;
            if repairs > 2 * d + 4 {
                return Err(SolveError::Failure(SolveFailure::DegenerateTie {
                    lambda: lam_cur.to_f64(),
                    coords: vec![fix.coord()],
                }));
            }
            let coord = fix.coord();
            let new_pin = match fix.kind {
                EventKind::Leave(i) => (i, Pin::Correlation(signs[i])),
                EventKind::Enter(j, _) => (j, Pin::Weight),
            };
            apply_events(x, &mut factor, &mut signs, &[fix])?;
            if let Some(slot) = pins.iter_mut().find(|(c, _)| *c == coord) {
                *slot = new_pin;
            }
            law = compute_law(x, y, &factor, &signs);
        }
        let events = collect_events(&factor, &signs, &law, lam_cur, lam_floor, &pins);

        let lam_next = events
            .iter()
            .map(|e| e.lambda)
            .fold(None::<S>, |acc, l| match acc {
                Some(m) if m >= l => Some(m),
                _ => Some(l),
            });

        let seg_lo = lam_next.unwrap_or(lam_floor);
        // A tangential zero touch leaves the sign vector unchanged across
        // the breakpoint; such intervals are one segment, so extend rather
        // than push.
        let same_pattern = segments
            .last()
            .map(|prev: &PathSegment<S>| prev.signs == signs)
            .unwrap_or(false);
        if same_pattern {
            let prev = segments.last_mut().unwrap();
            prev.lambda_lo = seg_lo;
            prev.a = law.a.clone();
            prev.b = law.b.clone();
        } else {
            let segment = PathSegment {
                lambda_hi: lam_cur,
                lambda_lo: seg_lo,
                signs: signs.clone(),
                active: factor.active().to_vec(),
                a: law.a.clone(),
                b: law.b.clone(),
            };
            if opts.check_kkt {
                let probe = segment.probe_lambda();
                let w = segment.eval(probe);
                let rep = kkt_check_raw(x, y, probe, &w, kkt_tol);
                max_kkt = max_kkt.max(rep.max_violation);
                if !rep.pass() {
                    return Err(SolveError::Failure(SolveFailure::KktViolation {
                        lambda: probe.to_f64(),
                        violation: rep.max_violation,
                        tol: kkt_tol,
                    }));
                }
            }
            segments.push(segment);
        }

        let Some(lam_next) = lam_next else {
            // No event above the floor: the last law extends to lambda_min
            // (to lambda -> 0+ this is the least-squares limit when the
            // active set is full).
            return Ok(finish(segments, max_kkt, tie_events));
        };

        if segments.len() >= opts.max_segments {
            let lambda = lam_next.to_f64();
            return Err(SolveError::SegmentBudgetExceeded {
                partial: Box::new(finish(segments, max_kkt, tie_events)),
                lambda,
            });
        }

        // Tie group: everything within the window below the winner.
        let window = S::from_f64(opts.tie_tol_mult * S::epsilon()) * lam_next;
        let mut group: Vec<Event<S>> = events
            .into_iter()
            .filter(|e| e.lambda >= lam_next - window)
            .collect();
        group.sort_by_key(|e| e.coord());
        group.dedup_by_key(|e| e.coord());

        let pins_of = |applied: &[Event<S>], signs: &[i8]| -> Vec<(usize, Pin)> {
            applied
                .iter()
                .map(|e| match e.kind {
                    EventKind::Leave(i) => (i, Pin::Correlation(signs[i])),
                    EventKind::Enter(j, _) => (j, Pin::Weight),
                })
                .collect()
        };
        if group.len() == 1 {
            pins = pins_of(&group, &signs);
            apply_events(x, &mut factor, &mut signs, &group)?;
        } else {
            tie_events += 1;
            // Simultaneous application, verified just below the tie.
            let saved_factor = factor.clone();
            let saved_signs = signs.clone();
            pins = pins_of(&group, &signs);
            apply_events(x, &mut factor, &mut signs, &group)?;
            let probe = lam_next * S::from_f64(1.0 - S::epsilon().sqrt());
            if !tie_state_ok(x, y, &factor, &signs, probe, kkt_tol) {
                // Retry one event at a time, ascending coordinate order.
                factor = saved_factor;
                signs = saved_signs;
                pins = pins_of(&group[..1], &signs);
                apply_events(x, &mut factor, &mut signs, &group[..1])?;
                if !tie_state_ok(x, y, &factor, &signs, probe, kkt_tol) {
                    return Err(SolveError::Failure(SolveFailure::DegenerateTie {
                        lambda: lam_next.to_f64(),
                        coords: group.iter().map(|e| e.coord()).collect(),
                    }));
                }
            }
        }
        lam_cur = lam_next;
    }
}

/// After a tie application, checks that the new law is optimal just below
/// the tie point with signs matching the stored sign vector.
fn tie_state_ok<S: Scalar>(
    x: &DenseMatrix<S>,
    y: &[S],
    factor: &ActiveSetFactor<S>,
    signs: &[i8],
    probe: S,
    kkt_tol: f64,
) -> bool {
    let law = compute_law(x, y, factor, signs);
    let mut w = vec![S::zero(); x.cols()];
    for (k, &j) in factor.active().iter().enumerate() {
        let v = law.a[k] + probe * law.b[k];
        if (signs[j] as f64) * v.to_f64() < 0.0 {
            return false;
        }
        w[j] = v;
    }
    kkt_check_raw(x, y, probe, &w, kkt_tol).pass()
}
