//! Exact-rational check of the rotation (Coriolis) parameter mapping.
//!
//! The rotation equation
//! `m_t + u m_x + 2 u_x m + c u_x - (beta_0/beta_f) u_xxx
//!  + (omega_1/alpha_f^2) u^2 u_x + (omega_2/alpha_f^3) u^3 u_x = 0`
//! fits the general family through `alpha = -c`, `beta = -omega_1/alpha_f^2`,
//! `gamma = -omega_2/alpha_f^3`, `Gamma = beta_0/beta_f`.  At an exact
//! rational wave speed `c` all constants are rational, so both equations can
//! be compared term by term with no rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::JetPoly;
use crate::error::SymbolicError;

fn v(k: usize) -> JetPoly {
    JetPoly::jet(k)
}

fn int(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// The five model constants of the rotation equation at wave speed `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRotationConstants {
    pub alpha_f: BigRational,
    pub beta_0: BigRational,
    pub beta_f: BigRational,
    pub omega_1: BigRational,
    pub omega_2: BigRational,
}

/// Evaluates the closed-form constants at rational `c`.
pub fn constants_at(c: &BigRational) -> ExactRotationConstants {
    let c2 = c * c;
    let c4 = &c2 * &c2;
    let d = &c2 + int(1); // c^2 + 1
    let d2 = &d * &d;
    ExactRotationConstants {
        alpha_f: &c2 / &d,
        beta_0: c * (&c4 + int(6) * &c2 - int(1)) / (int(6) * &d2),
        beta_f: (int(3) * &c4 + int(8) * &c2 - int(1)) / (int(6) * &d2),
        omega_1: int(-3) * c * (&c2 - int(1)) * (&c2 - int(2)) / (int(2) * &d2 * &d),
        omega_2: (&c2 - int(1)) * (&c2 - int(1)) * (&c2 - int(2)) * (int(8) * &c2 - int(1))
            / (int(2) * &d2 * &d2 * &d),
    }
}

/// The mapped parameters `(alpha, beta, gamma, Gamma)` of the general family.
///
/// Fails when `beta_f` vanishes and the dispersion coefficient is undefined.
pub fn mapped_params(c: &BigRational) -> Result<[BigRational; 4], SymbolicError> {
    let k = constants_at(c);
    if k.beta_f.is_zero() || k.alpha_f.is_zero() {
        return Err(SymbolicError::UnsupportedShape(
            "degenerate constants at this wave speed".into(),
        ));
    }
    let af2 = &k.alpha_f * &k.alpha_f;
    let af3 = &af2 * &k.alpha_f;
    Ok([
        -c.clone(),
        -&k.omega_1 / af2,
        -&k.omega_2 / af3,
        &k.beta_0 / &k.beta_f,
    ])
}

fn transport() -> JetPoly {
    let m = v(0) - v(2);
    let m_x = m.total_x().expect("momentum derivative stays in range");
    -(v(0) * m_x) - (v(1) * m).scale_rat(2, 1)
}

/// `m_t` of the rotation equation, coefficients built from the closed-form
/// constants.
pub fn rotation_rhs(c: &BigRational) -> Result<JetPoly, SymbolicError> {
    let k = constants_at(c);
    if k.beta_f.is_zero() {
        return Err(SymbolicError::UnsupportedShape(
            "beta_f vanishes at this wave speed".into(),
        ));
    }
    let af2 = &k.alpha_f * &k.alpha_f;
    let af3 = &af2 * &k.alpha_f;
    Ok(transport()
        + v(1).scale(&-c.clone())
        + v(3).scale(&(&k.beta_0 / &k.beta_f))
        + (v(0).pow(2) * v(1)).scale(&(-&k.omega_1 / af2))
        + (v(0).pow(3) * v(1)).scale(&(-&k.omega_2 / af3)))
}

/// `m_t` of the general family at numeric parameters.
pub fn family_rhs(params: &[BigRational; 4]) -> JetPoly {
    let [alpha, beta, gamma, big_gamma] = params;
    transport()
        + v(1).scale(alpha)
        + (v(0).pow(2) * v(1)).scale(beta)
        + (v(0).pow(3) * v(1)).scale(gamma)
        + v(3).scale(big_gamma)
}

/// `rotation_rhs(c) - family_rhs(mapped_params(c))`; zero iff the mapping is
/// exact.
pub fn mapping_residual(c: &BigRational) -> Result<JetPoly, SymbolicError> {
    let params = mapped_params(c)?;
    Ok(&rotation_rhs(c)? - &family_rhs(&params))
}
