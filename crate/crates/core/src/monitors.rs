//! Runtime verification of the analytic statements along a trajectory:
//! conservation drift, slope lower bounds, the nonlocal-remainder bound, the
//! slope differential inequality, sign-pattern tracking, the Gronwall
//! envelope of certified breaking runs, and end-of-run classification.

use serde::{Deserialize, Serialize};

use crate::dynamics::{StopReason, Trajectory};
use crate::error::ModelError;
use crate::model::{norms, FieldState, ModelParams, NormBundle};
use crate::spectral::SpectralWorkspace;

/// Additive slack for asserting an analytic inequality against discrete
/// data: `max(1e-6, 1e-3 * error_estimate)`.
pub fn slack(error_estimate: f64) -> f64 {
    (1e-3 * error_estimate).max(1e-6)
}

/// Minimum of `u_x` at one output time, with sub-grid refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeSample {
    pub t: f64,
    /// Refined minimum slope `inf_x u_x`.
    pub y: f64,
    /// Refined argmin location.
    pub xi: f64,
}

/// Locates the minimum slope by parabolic interpolation through the grid
/// argmin and its neighbours.
pub fn min_slope(state: &FieldState, ws: &SpectralWorkspace) -> Result<SlopeSample, ModelError> {
    let ux = ws.dx(&state.u)?;
    let n = ux.len();
    let (j, &yj) = ux
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite slopes"))
        .expect("nonempty field");
    let a = ux[(j + n - 1) % n];
    let c = ux[(j + 1) % n];
    let dx = ws.dx_spacing();
    let x_j = -ws.half_length() + j as f64 * dx;
    let curvature = a - 2.0 * yj + c;
    let (y, xi) = if curvature > 0.0 {
        let delta = (a - c) / (2.0 * curvature);
        let y_ref = yj - (a - c) * (a - c) / (8.0 * curvature);
        (y_ref.min(yj), x_j + delta.clamp(-0.5, 0.5) * dx)
    } else {
        (yj, x_j)
    };
    Ok(SlopeSample { t: state.t, y, xi })
}

/// One recorded inequality failure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub kind: String,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Final verdict on a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    RanToHorizon,
    WaveBreaking,
    NumericalFailure,
}

/// Everything the monitors observed over one trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonitorReport {
    pub cons_drift: f64,
    pub mass_drift: f64,
    pub bound_violations: Vec<Violation>,
    pub classification: Classification,
    pub slope_series: Vec<SlopeSample>,
}

/// Checks `y(t) >= floor - slack` along the series.
pub fn check_lower_bounds(
    slope_series: &[SlopeSample],
    floor: f64,
    kind: &str,
) -> Vec<Violation> {
    let sl = slack(floor.abs());
    slope_series
        .iter()
        .filter(|s| s.y < floor - sl)
        .map(|s| Violation {
            kind: kind.to_string(),
            t: s.t,
            lhs: s.y,
            rhs: floor,
        })
        .collect()
}

/// The nonlocal remainder bound `|Lambda^{-2} h(u) - h(u)| <= 9 K h1(0)^p`.
///
/// With `K = 0` the right side is zero and the remainder must vanish
/// identically.
pub fn g_bound_check(
    state: &FieldState,
    params: &ModelParams,
    h1_0: f64,
    k: f64,
    p: i32,
    ws: &SpectralWorkspace,
) -> Result<(f64, f64, bool), ModelError> {
    let h = params.eval_h(&state.u);
    let smoothed = ws.helmholtz_invert(&h)?;
    let lhs = h
        .iter()
        .zip(&smoothed)
        .map(|(h, s)| (s - h).abs())
        .fold(0.0_f64, f64::max);
    let rhs = 9.0 * k * h1_0.powi(p);
    let ok = if k == 0.0 {
        lhs == 0.0
    } else {
        lhs <= rhs + slack(rhs)
    };
    Ok((lhs, rhs, ok))
}

/// Momentum sign patterns the global theorems hypothesize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignPattern {
    SingleSign,
    /// Nonpositive left of a split point, nonnegative right of it.
    NegThenPos,
}

/// Tests the discrete momentum field against a pattern; values within
/// `tol_sign` of zero are treated as zero.  Returns the split node for
/// `NegThenPos`.
pub fn sign_pattern(m: &[f64], pattern: SignPattern, tol_sign: f64) -> (bool, Option<usize>) {
    let sgn = |v: f64| {
        if v > tol_sign {
            1
        } else if v < -tol_sign {
            -1
        } else {
            0
        }
    };
    match pattern {
        SignPattern::SingleSign => {
            let mut seen = 0;
            for &v in m {
                let s = sgn(v);
                if s == 0 {
                    continue;
                }
                if seen == 0 {
                    seen = s;
                } else if s != seen {
                    return (false, None);
                }
            }
            (true, None)
        }
        SignPattern::NegThenPos => {
            // first nonnegative-only suffix after a nonpositive-only prefix
            let mut split = 0;
            let mut state = -1; // -1: in prefix, 1: in suffix
            for (j, &v) in m.iter().enumerate() {
                let s = sgn(v);
                if state == -1 {
                    if s > 0 {
                        split = j;
                        state = 1;
                    }
                } else if s < 0 {
                    return (false, None);
                }
            }
            (true, Some(split))
        }
    }
}

/// Exact forcing term of the slope equation at the slope minimum.
///
/// Differentiating the evolution form and following the spatial minimum of
/// `u_x` gives `y' + y^2/2 = e(xi)` with
/// `e = u^2 - h(u) - Lambda^{-2}(u^2 + u_x^2/2 - h(u))`, so the slope
/// differential inequality reduces to a pointwise bound on `e`.  Evaluating
/// `e` instead of differencing `y(t)` keeps the check free of sampling noise
/// through the blowup acceleration.
pub fn slope_forcing(
    state: &FieldState,
    sample: &SlopeSample,
    params: &ModelParams,
    ws: &SpectralWorkspace,
) -> Result<f64, ModelError> {
    let ux = ws.dx(&state.u)?;
    let h = params.eval_h(&state.u);
    let p: Vec<f64> = state
        .u
        .iter()
        .zip(&ux)
        .zip(&h)
        .map(|((&u, &v), &hh)| u * u + 0.5 * v * v - hh)
        .collect();
    let smoothed = ws.helmholtz_invert(&p)?;
    let e: Vec<f64> = state
        .u
        .iter()
        .zip(&h)
        .zip(&smoothed)
        .map(|((&u, &hh), &s)| u * u - hh - s)
        .collect();
    Ok(ws.interpolant(&e)?.value(sample.xi))
}

/// Checks the slope differential inequality
/// `y' + y^2/2 = e(xi) <= h1(0)^2/4 + 9 K h1(0)^p` at one sample.
pub fn slope_ode_check(forcing: f64, t: f64, h1_0: f64, k: f64, p: i32) -> Option<Violation> {
    let bound = h1_0 * h1_0 / 4.0 + 9.0 * k * h1_0.powi(p);
    if forcing > bound + slack(bound.abs()) {
        Some(Violation {
            kind: "slope_ode".into(),
            t,
            lhs: forcing,
            rhs: bound,
        })
    } else {
        None
    }
}

/// Gronwall envelope of a certified breaking run:
/// `1/y(t) >= 1/y(0) + (eps/4) t` while `y < 0`.
pub fn gronwall_check(slope_series: &[SlopeSample], eps: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let Some(first) = slope_series.first() else {
        return out;
    };
    if first.y >= 0.0 {
        return out;
    }
    let inv0 = 1.0 / first.y;
    for s in slope_series.iter().skip(1) {
        if s.y >= 0.0 {
            break;
        }
        let lhs = 1.0 / s.y;
        let rhs = inv0 + eps / 4.0 * (s.t - first.t);
        if lhs < rhs - slack(inv0.abs()) {
            out.push(Violation {
                kind: "gronwall".into(),
                t: s.t,
                lhs,
                rhs,
            });
        }
    }
    out
}

/// End-of-run classification.
///
/// Wave breaking is evidenced (never proven) by: an early stop, a velocity
/// that stayed bounded by its conserved H^1 ceiling, and a slope that
/// dove below `-y_max` while still accelerating downward.
pub fn classify(
    traj: &Trajectory,
    slope_series: &[SlopeSample],
    max_linf: f64,
    h1_0: f64,
    y_max: f64,
    violations_empty: bool,
) -> Classification {
    match traj.stop {
        StopReason::ReachedHorizon => {
            if violations_empty {
                Classification::RanToHorizon
            } else {
                Classification::NumericalFailure
            }
        }
        StopReason::SlopeDiverged | StopReason::DtUnderflow => {
            let bounded = max_linf <= h1_0 + slack(h1_0);
            let dove = slope_series.last().map(|s| s.y <= -y_max).unwrap_or(false);
            let tail: Vec<f64> = slope_series
                .iter()
                .rev()
                .take(4)
                .map(|s| s.y)
                .collect();
            let accelerating = tail.windows(2).all(|w| w[0] <= w[1]);
            if bounded && dove && accelerating {
                Classification::WaveBreaking
            } else {
                Classification::NumericalFailure
            }
        }
        StopReason::NonFinite | StopReason::BoundaryContamination => {
            Classification::NumericalFailure
        }
    }
}

/// Data the monitor pass needs about the certified hypotheses.
#[derive(Debug, Clone, Copy)]
pub struct MonitorContext {
    pub k: f64,
    pub p: i32,
    /// Slope floor from a global certificate, when one holds.
    pub slope_floor: Option<f64>,
    /// `eps` from a breaking certificate, when one holds.
    pub breaking_eps: Option<f64>,
    pub y_max: f64,
    pub tol_sign: f64,
    pub pattern: Option<SignPattern>,
}

/// Runs every monitor over a finished trajectory.
pub fn run_monitors(
    traj: &Trajectory,
    params: &ModelParams,
    ctx: &MonitorContext,
    ws: &SpectralWorkspace,
) -> Result<MonitorReport, ModelError> {
    let first = traj.states.first().expect("nonempty trajectory");
    let n0 = norms(first, ws)?;
    let mut slope_series = Vec::with_capacity(traj.states.len());
    let mut violations = Vec::new();
    let mut cons_drift = 0.0_f64;
    let mut mass_drift = 0.0_f64;
    let mut max_linf = 0.0_f64;
    let mut norm_series: Vec<NormBundle> = Vec::with_capacity(traj.states.len());
    for state in &traj.states {
        let nb = norms(state, ws)?;
        max_linf = max_linf.max(nb.linf_u);
        if n0.h1 > 0.0 {
            cons_drift = cons_drift.max(((nb.h1 - n0.h1) / n0.h1).abs());
        }
        mass_drift = mass_drift
            .max((nb.mass_u - n0.mass_u).abs() / (1.0 + n0.mass_u.abs()))
            .max((nb.mass_m - n0.mass_m).abs() / (1.0 + n0.mass_m.abs()));
        let sample = min_slope(state, ws)?;
        let forcing = slope_forcing(state, &sample, params, ws)?;
        if let Some(v) = slope_ode_check(forcing, state.t, n0.h1, ctx.k, ctx.p) {
            violations.push(v);
        }
        slope_series.push(sample);
        let (lhs, rhs, ok) = g_bound_check(state, params, n0.h1, ctx.k, ctx.p, ws)?;
        if !ok {
            violations.push(Violation {
                kind: "g_bound".into(),
                t: state.t,
                lhs,
                rhs,
            });
        }
        if let Some(pattern) = ctx.pattern {
            let (ok, _) = sign_pattern(&state.m, pattern, ctx.tol_sign);
            if !ok {
                violations.push(Violation {
                    kind: "sign_pattern".into(),
                    t: state.t,
                    lhs: f64::NAN,
                    rhs: f64::NAN,
                });
            }
        }
        norm_series.push(nb);
    }
    if let Some(floor) = ctx.slope_floor {
        violations.extend(check_lower_bounds(&slope_series, floor, "slope_floor"));
    }
    if let Some(eps) = ctx.breaking_eps {
        violations.extend(gronwall_check(&slope_series, eps));
    }
    let classification = classify(
        traj,
        &slope_series,
        max_linf,
        n0.h1,
        ctx.y_max,
        violations.is_empty(),
    );
    Ok(MonitorReport {
        cons_drift,
        mass_drift,
        bound_violations: violations,
        classification,
        slope_series,
    })
}
