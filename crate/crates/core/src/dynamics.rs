//! Time integration of the evolution form and the characteristics system.
//!
//! The momentum equation is advanced through its nonlocal velocity form
//!
//! ```text
//! u_t = -(u + Gamma) u_x - Lambda^{-2} d/dx ( u^2 + u_x^2/2 - h(u) ),
//! ```
//!
//! equivalent to the transport form after inverting the Helmholtz operator.
//! Characteristics obey `dq/dt = u(t,q) + Gamma` and
//! `d(q_x)/dt = u_x(t,q) q_x`, with off-grid values taken from the
//! trigonometric interpolant of the current field.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{FieldState, ModelParams};
use crate::spectral::SpectralWorkspace;

/// Integration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    pub t_end: f64,
    pub dt_max: f64,
    /// CFL number in `dt = min(dt_max, c_cfl dx / (max|u| + |Gamma| + eps))`.
    pub c_cfl: f64,
    /// Apply the 2/3 rule to the nonlinear products each stage.
    pub dealias: bool,
    /// Snapshot cadence in accepted steps.
    pub output_every: usize,
    /// Stop once the grid minimum of `u_x` falls below `-y_max`.
    pub y_max: f64,
    /// Stop when `|u|` near the boundary exceeds this fraction of the
    /// initial peak.
    pub boundary_fraction: f64,
}

impl Default for Controls {
    fn default() -> Controls {
        Controls {
            t_end: 1.0,
            dt_max: 1e-2,
            c_cfl: 0.3,
            dealias: true,
            output_every: 10,
            y_max: 1e3,
            boundary_fraction: 1e-4,
        }
    }
}

/// Guard in the CFL denominator for the zero state.
pub const CFL_DENOMINATOR_GUARD: f64 = 1e-14;

/// Smallest admissible step before the run is declared stalled.
pub const DT_UNDERFLOW: f64 = 1e-13;

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    ReachedHorizon,
    SlopeDiverged,
    NonFinite,
    DtUnderflow,
    BoundaryContamination,
}

/// Output snapshots plus step-size history of one run.
#[derive(Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FieldState>,
    pub dt_history: Vec<f64>,
    pub stop: StopReason,
}

/// `du/dt` of the evolution form.
pub fn rhs(
    u: &[f64],
    params: &ModelParams,
    ws: &SpectralWorkspace,
    dealias: bool,
) -> Result<Vec<f64>, ModelError> {
    let ux = ws.dx(u)?;
    let n = u.len();
    let mut convective = vec![0.0; n];
    let mut flux = vec![0.0; n];
    let h = params.eval_h(u);
    for j in 0..n {
        convective[j] = (u[j] + params.big_gamma) * ux[j];
        flux[j] = u[j] * u[j] + 0.5 * ux[j] * ux[j] - h[j];
    }
    if dealias {
        convective = ws.dealias(&convective)?;
        flux = ws.dealias(&flux)?;
    }
    let nonlocal = ws.helmholtz_invert(&ws.dx(&flux)?)?;
    let mut out = convective;
    for j in 0..n {
        out[j] = -out[j] - nonlocal[j];
    }
    Ok(out)
}

fn axpy(u: &[f64], k: &[f64], a: f64) -> Vec<f64> {
    u.iter().zip(k).map(|(&u, &k)| u + a * k).collect()
}

/// One classical RK4 step; refreshes the momentum from the new velocity.
pub fn step_rk4(
    state: &FieldState,
    dt: f64,
    params: &ModelParams,
    ws: &SpectralWorkspace,
    dealias: bool,
) -> Result<FieldState, ModelError> {
    let k1 = rhs(&state.u, params, ws, dealias)?;
    let k2 = rhs(&axpy(&state.u, &k1, dt / 2.0), params, ws, dealias)?;
    let k3 = rhs(&axpy(&state.u, &k2, dt / 2.0), params, ws, dealias)?;
    let k4 = rhs(&axpy(&state.u, &k3, dt), params, ws, dealias)?;
    let u: Vec<f64> = (0..state.u.len())
        .map(|j| state.u[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        .collect();
    FieldState::from_u(state.t + dt, u, ws)
}

fn linf(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Advances the field to `t_end` or to the first stop trigger.
pub fn integrate(
    initial: FieldState,
    params: &ModelParams,
    ws: &SpectralWorkspace,
    controls: &Controls,
) -> Result<Trajectory, ModelError> {
    params.validate()?;
    let n = ws.n();
    let peak0 = linf(&initial.u).max(CFL_DENOMINATOR_GUARD);
    let mut state = initial;
    let mut times = vec![state.t];
    let mut states = vec![state.clone()];
    let mut dt_history = Vec::new();
    let mut steps = 0usize;
    let stop;
    loop {
        if state.t >= controls.t_end - 1e-12 {
            stop = StopReason::ReachedHorizon;
            break;
        }
        let speed = linf(&state.u) + params.big_gamma.abs() + CFL_DENOMINATOR_GUARD;
        let mut dt = controls.dt_max.min(controls.c_cfl * ws.dx_spacing() / speed);
        dt = dt.min(controls.t_end - state.t);
        if dt < DT_UNDERFLOW {
            stop = StopReason::DtUnderflow;
            break;
        }
        let next = step_rk4(&state, dt, params, ws, controls.dealias)?;
        if next.u.iter().any(|v| !v.is_finite()) {
            stop = StopReason::NonFinite;
            break;
        }
        state = next;
        steps += 1;
        dt_history.push(dt);
        let record = steps % controls.output_every == 0;

        // boundary contamination: energy reaching the box edge invalidates
        // the whole-line approximation
        let edge = state.u[0]
            .abs()
            .max(state.u[n - 1].abs())
            .max(state.u[1].abs())
            .max(state.u[n - 2].abs());
        if edge > controls.boundary_fraction * peak0 {
            times.push(state.t);
            states.push(state.clone());
            stop = StopReason::BoundaryContamination;
            break;
        }
        // slope divergence trigger
        let ux = ws.dx(&state.u)?;
        let min_ux = ux.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if min_ux < -controls.y_max {
            times.push(state.t);
            states.push(state.clone());
            stop = StopReason::SlopeDiverged;
            break;
        }
        if record {
            times.push(state.t);
            states.push(state.clone());
        }
    }
    if *times.last().expect("nonempty") < state.t - 1e-15 {
        times.push(state.t);
        states.push(state.clone());
    }
    Ok(Trajectory {
        times,
        states,
        dt_history,
        stop,
    })
}

/// Particle markers advected by the flow.
#[derive(Debug, Clone)]
pub struct CharacteristicsState {
    /// Current positions.
    pub q: Vec<f64>,
    /// Jacobian `dq/dx` per marker.
    pub qx: Vec<f64>,
    /// Trapezoid accumulation of `int_0^t q_x^2 (d/dx h)(u)(q) ds`.
    pub accum: Vec<f64>,
    /// Last integrand value per marker (for the trapezoid rule).
    last_integrand: Vec<f64>,
    /// Number of period wraps per marker.
    pub wraps: Vec<i64>,
}

impl CharacteristicsState {
    /// Seeds markers at the given positions with unit Jacobian.
    pub fn seed(
        positions: &[f64],
        state: &FieldState,
        params: &ModelParams,
        ws: &SpectralWorkspace,
    ) -> Result<CharacteristicsState, ModelError> {
        let hx = ws.dx(&params.eval_h(&state.u))?;
        let hx_it = ws.interpolant(&hx)?;
        let last_integrand = positions.iter().map(|&x| hx_it.value(x)).collect();
        Ok(CharacteristicsState {
            q: positions.to_vec(),
            qx: vec![1.0; positions.len()],
            accum: vec![0.0; positions.len()],
            last_integrand,
            wraps: vec![0; positions.len()],
        })
    }
}

/// Advances the markers across one field step `[t, t+dt]` with RK4,
/// evaluating the velocity by linear interpolation in time between the two
/// bracketing fields.  Also extends the momentum-transport trapezoid accumulator.
pub fn advance_characteristics(
    chars: &mut CharacteristicsState,
    before: &FieldState,
    after: &FieldState,
    params: &ModelParams,
    ws: &SpectralWorkspace,
) -> Result<(), ModelError> {
    let dt = after.t - before.t;
    let u0 = ws.interpolant(&before.u)?;
    let u1 = ws.interpolant(&after.u)?;
    let l = ws.half_length();
    let big_gamma = params.big_gamma;

    let vel = |theta: f64, x: f64| -> (f64, f64) {
        let a = 1.0 - theta;
        let v = a * u0.value(x) + theta * u1.value(x);
        let vx = a * u0.derivative(x) + theta * u1.derivative(x);
        (v + big_gamma, vx)
    };

    for i in 0..chars.q.len() {
        let (q, qx) = (chars.q[i], chars.qx[i]);
        let (f1, g1) = vel(0.0, q);
        let (f2, g2) = vel(0.5, q + 0.5 * dt * f1);
        let (f3, g3) = vel(0.5, q + 0.5 * dt * f2);
        let (f4, g4) = vel(1.0, q + dt * f3);
        let mut qn = q + dt / 6.0 * (f1 + 2.0 * (f2 + f3) + f4);
        // q_x' = u_x(q) q_x integrated with the same stages
        let j1 = g1 * qx;
        let j2 = g2 * (qx + 0.5 * dt * j1);
        let j3 = g3 * (qx + 0.5 * dt * j2);
        let j4 = g4 * (qx + dt * j3);
        let qxn = qx + dt / 6.0 * (j1 + 2.0 * (j2 + j3) + j4);
        // wrap into [-L, L), counting crossings
        while qn >= l {
            qn -= 2.0 * l;
            chars.wraps[i] += 1;
        }
        while qn < -l {
            qn += 2.0 * l;
            chars.wraps[i] -= 1;
        }
        chars.q[i] = qn;
        chars.qx[i] = qxn;
    }
    // trapezoid extension of int q_x^2 (d/dx h)(q) ds
    let hx = ws.dx(&params.eval_h(&after.u))?;
    let hx_it = ws.interpolant(&hx)?;
    for i in 0..chars.q.len() {
        let now = chars.qx[i] * chars.qx[i] * hx_it.value(chars.q[i]);
        chars.accum[i] += 0.5 * dt * (chars.last_integrand[i] + now);
        chars.last_integrand[i] = now;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_grid, norms, InitialCondition};

    fn gaussian_ic(a: f64, w: f64, c: f64) -> InitialCondition {
        InitialCondition::Gaussian {
            amplitude: a,
            width: w,
            center: c,
        }
    }

    #[test]
    fn constants_are_equilibria() {
        let ws = SpectralWorkspace::new(10.0, 64).unwrap();
        let params = ModelParams {
            alpha: 0.3,
            beta: -0.7,
            gamma: 1.1,
            big_gamma: 0.5,
        };
        let u = vec![0.8; 64];
        let r = rhs(&u, &params, &ws, false).unwrap();
        assert!(r.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn rhs_matches_finite_difference_oracle() {
        // independent route: 8th-order central differences for both
        // derivatives and the kernel-quadrature inverse for Lambda^{-2}
        let n = 4096;
        let ws = SpectralWorkspace::new(20.0, n).unwrap();
        let g = make_grid(20.0, n).unwrap();
        let x = g.nodes();
        let params = ModelParams {
            alpha: 1.0,
            beta: 0.5,
            gamma: -0.25,
            big_gamma: 0.7,
        };
        let u: Vec<f64> = x.iter().map(|&x| 0.4 * (-x * x / 2.0).exp()).collect();

        let fd = |f: &[f64]| -> Vec<f64> {
            let c = [
                1.0 / 280.0,
                -4.0 / 105.0,
                1.0 / 5.0,
                -4.0 / 5.0,
                0.0,
                4.0 / 5.0,
                -1.0 / 5.0,
                4.0 / 105.0,
                -1.0 / 280.0,
            ];
            (0..n)
                .map(|j| {
                    let mut acc = 0.0;
                    for (o, &w) in c.iter().enumerate() {
                        acc += w * f[(j + n + o - 4) % n];
                    }
                    acc / g.dx
                })
                .collect()
        };

        let ux = fd(&u);
        let h = params.eval_h(&u);
        let flux: Vec<f64> = (0..n)
            .map(|j| u[j] * u[j] + 0.5 * ux[j] * ux[j] - h[j])
            .collect();
        let nonlocal = ws.green_convolve(&fd(&flux)).unwrap();
        let oracle: Vec<f64> = (0..n)
            .map(|j| -(u[j] + params.big_gamma) * ux[j] - nonlocal[j])
            .collect();

        let ours = rhs(&u, &params, &ws, false).unwrap();
        let diff = ours
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(diff < 1e-7, "rhs mismatch {diff}");
    }

    #[test]
    fn linear_dispersion_phase_speed() {
        // Gamma-only model, tiny amplitude: mode k travels at
        // Gamma k^2 / (1 + k^2)
        let n = 256;
        let l = 10.0;
        let ws = SpectralWorkspace::new(l, n).unwrap();
        let g = make_grid(l, n).unwrap();
        let x = g.nodes();
        let params = ModelParams {
            big_gamma: 0.8,
            ..ModelParams::ZERO
        };
        let k = 4.0 * std::f64::consts::PI / l;
        let a = 1e-6;
        let u0: Vec<f64> = x.iter().map(|&x| a * (k * x).sin()).collect();
        let state = FieldState::from_u(0.0, u0, &ws).unwrap();
        let controls = Controls {
            t_end: 0.5,
            dt_max: 1e-3,
            c_cfl: 10.0,
            dealias: false,
            output_every: 1000,
            y_max: 1e9,
            boundary_fraction: 1e9,
        };
        let traj = integrate(state, &params, &ws, &controls).unwrap();
        assert_eq!(traj.stop, StopReason::ReachedHorizon);
        let last = traj.states.last().unwrap();
        let cp = params.big_gamma * k * k / (1.0 + k * k);
        let expect: Vec<f64> = x.iter().map(|&x| a * (k * (x - cp * 0.5)).sin()).collect();
        let err = last
            .u
            .iter()
            .zip(&expect)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(err < 1e-4 * a, "dispersion error {err}");
    }

    #[test]
    fn rk4_self_convergence() {
        let n = 256;
        let ws = SpectralWorkspace::new(20.0, n).unwrap();
        let g = make_grid(20.0, n).unwrap();
        let params = ModelParams {
            alpha: 1.0,
            ..ModelParams::ZERO
        };
        let ic = gaussian_ic(1.0, 1.0, 0.0);
        let s0 = ic.build(&g, &ws).unwrap();
        let run = |dt: f64| -> Vec<f64> {
            let mut s = s0.clone();
            let steps = (0.5 / dt).round() as usize;
            for _ in 0..steps {
                s = step_rk4(&s, dt, &params, &ws, false).unwrap();
            }
            s.u
        };
        let coarse = run(5e-2);
        let medium = run(2.5e-2);
        let fine = run(3.125e-3);
        let err = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0_f64, f64::max)
        };
        let e1 = err(&coarse, &fine);
        let e2 = err(&medium, &fine);
        // e1 ~ C(dt^4 - dt_f^4), e2 ~ C((dt/2)^4 - dt_f^4): ratio ~ 16..17
        let ratio = e1 / e2;
        assert!(
            (12.0..24.0).contains(&ratio),
            "convergence ratio {ratio}, e1={e1}, e2={e2}"
        );
    }

    #[test]
    fn h1_conserved_on_smooth_run() {
        let n = 1024;
        let ws = SpectralWorkspace::new(20.0, n).unwrap();
        let g = make_grid(20.0, n).unwrap();
        let params = ModelParams {
            alpha: 1.0,
            ..ModelParams::ZERO
        };
        let s0 = gaussian_ic(0.2, 1.5, 0.0).build(&g, &ws).unwrap();
        let n0 = norms(&s0, &ws).unwrap();
        let controls = Controls {
            t_end: 1.0,
            dt_max: 1e-3,
            c_cfl: 10.0,
            dealias: true,
            output_every: 100,
            y_max: 1e9,
            boundary_fraction: 1e9,
        };
        let traj = integrate(s0, &params, &ws, &controls).unwrap();
        assert_eq!(traj.stop, StopReason::ReachedHorizon);
        for s in &traj.states {
            let nb = norms(s, &ws).unwrap();
            assert!(
                ((nb.h1 - n0.h1) / n0.h1).abs() < 1e-9,
                "H1 drift {} at t={}",
                ((nb.h1 - n0.h1) / n0.h1).abs(),
                s.t
            );
        }
    }

    #[test]
    fn zero_data_runs_to_horizon() {
        let ws = SpectralWorkspace::new(10.0, 64).unwrap();
        let s0 = FieldState::from_u(0.0, vec![0.0; 64], &ws).unwrap();
        let traj = integrate(s0, &ModelParams::ZERO, &ws, &Controls::default()).unwrap();
        assert_eq!(traj.stop, StopReason::ReachedHorizon);
        for s in &traj.states {
            assert!(s.u.iter().all(|&v| v == 0.0));
        }
        for w in traj.times.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn characteristics_free_stream() {
        let ws = SpectralWorkspace::new(10.0, 64).unwrap();
        let params = ModelParams {
            big_gamma: 1.0,
            ..ModelParams::ZERO
        };
        let s = FieldState::from_u(0.0, vec![0.0; 64], &ws).unwrap();
        let mut chars =
            CharacteristicsState::seed(&[-1.0, 0.0, 2.0], &s, &params, &ws).unwrap();
        let mut before = s.clone();
        for step in 0..100 {
            let mut after = before.clone();
            after.t = 0.01 * (step + 1) as f64;
            advance_characteristics(&mut chars, &before, &after, &params, &ws).unwrap();
            before = after;
        }
        for (q, x0) in chars.q.iter().zip([-1.0, 0.0, 2.0]) {
            assert!((q - (x0 + 1.0)).abs() < 1e-12);
        }
        assert!(chars.qx.iter().all(|&j| (j - 1.0).abs() < 1e-12));
    }

    #[test]
    fn jacobian_matches_exponential_identity_and_monotonicity() {
        let n = 512;
        let ws = SpectralWorkspace::new(20.0, n).unwrap();
        let g = make_grid(20.0, n).unwrap();
        let params = ModelParams {
            alpha: 1.0,
            ..ModelParams::ZERO
        };
        let s0 = gaussian_ic(0.3, 1.5, 0.0).build(&g, &ws).unwrap();
        let markers = [-3.0, -1.0, 0.0, 0.5, 2.0];
        let mut chars = CharacteristicsState::seed(&markers, &s0, &params, &ws).unwrap();
        // second route: accumulate int u_x(s, q) ds by trapezoid
        let mut expo = vec![0.0_f64; markers.len()];
        let it0 = ws.interpolant(&s0.u).unwrap();
        let mut last_ux: Vec<f64> = chars.q.iter().map(|&q| it0.derivative(q)).collect();

        let dt = 2e-3;
        let mut state = s0;
        for _ in 0..250 {
            let next = step_rk4(&state, dt, &params, &ws, true).unwrap();
            advance_characteristics(&mut chars, &state, &next, &params, &ws).unwrap();
            let it = ws.interpolant(&next.u).unwrap();
            for i in 0..markers.len() {
                let uxq = it.derivative(chars.q[i]);
                expo[i] += 0.5 * dt * (last_ux[i] + uxq);
                last_ux[i] = uxq;
            }
            state = next;
        }
        for i in 0..markers.len() {
            assert!(chars.qx[i] > 0.0);
            assert!(
                (chars.qx[i] - expo[i].exp()).abs() < 1e-5,
                "qx {} vs exp-route {}",
                chars.qx[i],
                expo[i].exp()
            );
        }
        for w in chars.q.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn momentum_characteristic_identity() {
        // discrete shadow of the momentum-transport identity:
        // m(t, q) qx^2 = m0(x) + int_0^t qx^2 (d/dx h)(q) ds
        let n = 512;
        let ws = SpectralWorkspace::new(20.0, n).unwrap();
        let g = make_grid(20.0, n).unwrap();
        let params = ModelParams {
            alpha: 0.8,
            beta: 0.3,
            gamma: 0.0,
            big_gamma: 0.2,
        };
        let s0 = gaussian_ic(0.25, 1.5, 0.0).build(&g, &ws).unwrap();
        let markers = [-2.0, -0.5, 0.0, 1.0, 3.0];
        let m0_it = ws.interpolant(&s0.m).unwrap();
        let m0_at: Vec<f64> = markers.iter().map(|&x| m0_it.value(x)).collect();
        let mut chars = CharacteristicsState::seed(&markers, &s0, &params, &ws).unwrap();
        let dt = 1e-3;
        let mut state = s0;
        for _ in 0..500 {
            let next = step_rk4(&state, dt, &params, &ws, true).unwrap();
            advance_characteristics(&mut chars, &state, &next, &params, &ws).unwrap();
            state = next;
        }
        let m_it = ws.interpolant(&state.m).unwrap();
        for i in 0..markers.len() {
            let lhs = m_it.value(chars.q[i]) * chars.qx[i] * chars.qx[i];
            let rhs = m0_at[i] + chars.accum[i];
            assert!(
                (lhs - rhs).abs() < 1e-6,
                "marker {i}: lhs={lhs}, rhs={rhs}"
            );
        }
    }
}
