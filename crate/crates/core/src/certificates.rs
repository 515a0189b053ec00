//! Pre-run decision procedures: checkable hypotheses guaranteeing either
//! global existence (single-signed or sign-split momentum) or finite-time
//! wave breaking, with every constant of the underlying estimates exposed.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{norms, FieldState, ModelParams};
use crate::monitors::{min_slope, sign_pattern, SignPattern};
use crate::spectral::SpectralWorkspace;

/// `K = 4 max{|alpha|, |beta|/3, |gamma|/4, |Gamma|}`.
pub fn k_of(params: &ModelParams) -> f64 {
    4.0 * params
        .alpha
        .abs()
        .max(params.beta.abs() / 3.0)
        .max(params.gamma.abs() / 4.0)
        .max(params.big_gamma.abs())
}

/// Maximal admissible `sigma = 1/(1+36K)`.
pub fn sigma_default(k: f64) -> f64 {
    1.0 / (1.0 + 36.0 * k)
}

/// Validates a configured override against `0 < sigma <= 1/(1+36K)`.
pub fn validate_sigma(sigma: f64, k: f64) -> Result<f64, ModelError> {
    let max = sigma_default(k);
    if sigma > 0.0 && sigma <= max {
        Ok(sigma)
    } else {
        Err(ModelError::SigmaOutOfRange { sigma, max })
    }
}

/// Exponent realizing `max{h1, h1^3, h1^4}`; ties broken to 4.
pub fn p_exponent(h1: f64) -> i32 {
    if h1 >= 1.0 {
        4
    } else {
        1
    }
}

/// Checkable wave-breaking hypothesis with the constants of its proof.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BreakingCertificate {
    pub k: f64,
    pub sigma: f64,
    pub p: i32,
    /// Refined minimum of the initial slope.
    pub y0: f64,
    /// Its location.
    pub x_star: f64,
    /// `sqrt(2 sigma) * y0`.
    pub lhs: f64,
    /// `min{-h1(0), -h1(0)^{p/2}}`.
    pub rhs: f64,
    pub holds: bool,
    /// Largest admissible `eps` in `(0,1)`, present iff the hypothesis holds.
    pub eps: Option<f64>,
    /// Breaking-time bound `4/(eps |y0|)`, present iff the hypothesis holds.
    pub t_bound: Option<f64>,
}

/// Evaluates the breaking hypothesis on initial data.
pub fn breaking_certificate(
    state: &FieldState,
    params: &ModelParams,
    ws: &SpectralWorkspace,
    sigma_override: Option<f64>,
) -> Result<BreakingCertificate, ModelError> {
    let k = k_of(params);
    let sigma = match sigma_override {
        Some(s) => validate_sigma(s, k)?,
        None => sigma_default(k),
    };
    let nb = norms(state, ws)?;
    let slope = min_slope(state, ws)?;
    let h1 = nb.h1;
    // zero data is degenerate: it cannot break and the inequality is vacuous
    if h1 == 0.0 {
        return Ok(BreakingCertificate {
            k,
            sigma,
            p: 4,
            y0: slope.y,
            x_star: slope.xi,
            lhs: 0.0,
            rhs: 0.0,
            holds: false,
            eps: None,
            t_bound: None,
        });
    }
    let p = p_exponent(h1);
    let lhs = (2.0 * sigma).sqrt() * slope.y;
    let rhs = (-h1).min(-h1.powf(p as f64 / 2.0));
    let holds = lhs < rhs;
    let (eps, t_bound) = if holds {
        let eps = 1.0 - rhs * rhs / (2.0 * sigma * slope.y * slope.y);
        (Some(eps), Some(4.0 / (eps * slope.y.abs())))
    } else {
        (None, None)
    };
    Ok(BreakingCertificate {
        k,
        sigma,
        p,
        y0: slope.y,
        x_star: slope.xi,
        lhs,
        rhs,
        holds,
        eps,
        t_bound,
    })
}

/// Checkable global-existence hypothesis on the initial momentum sign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlobalCertificate {
    pub kind: SignPattern,
    /// Sign-change location for the split pattern.
    pub x0: Option<f64>,
    pub l1_m0: f64,
    pub h1_u0: f64,
    pub holds: bool,
    /// Applicable lower bound for `u_x` while the hypothesis persists.
    pub slope_floor: f64,
}

/// Evaluates a global-existence hypothesis on initial data.
pub fn global_certificate(
    state: &FieldState,
    ws: &SpectralWorkspace,
    kind: SignPattern,
    tol_sign: f64,
) -> Result<GlobalCertificate, ModelError> {
    let nb = norms(state, ws)?;
    let dx = ws.dx_spacing();
    let l1_m0 = state.m.iter().map(|v| v.abs()).sum::<f64>() * dx;
    let (holds, split) = sign_pattern(&state.m, kind, tol_sign);
    let x0 = split.map(|j| -ws.half_length() + j as f64 * dx);
    let slope_floor = match kind {
        SignPattern::SingleSign => -l1_m0,
        SignPattern::NegThenPos => -nb.h1,
    };
    Ok(GlobalCertificate {
        kind,
        x0,
        l1_m0,
        h1_u0: nb.h1,
        holds,
        slope_floor,
    })
}
