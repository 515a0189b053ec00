//! The two Hamiltonian representations of the momentum equation.
//!
//! Both sides are expanded into exact jet polynomials in `u` and compared
//! with the flow `m_t = -u m_x - 2 u_x m + alpha u_x + beta u^2 u_x
//! + gamma u^3 u_x + Gamma u_xxx`, `m = u - u_xx`.  The nonlocal pieces of
//! the second operator close on this argument: `D_x^{-1}(u u_x) = u^2/2` and
//! `D_x^{-1}(u^{3/2} u_x) = (2/5) u^{5/2}`, the latter exercising the
//! half-integer powers of the algebra.

use super::poly::{JetPoly, Param};
use crate::error::SymbolicError;

fn v(k: usize) -> JetPoly {
    JetPoly::jet(k)
}

fn momentum() -> JetPoly {
    v(0) - v(2)
}

/// Right-hand side of the momentum equation as a jet polynomial.
pub fn mt_rhs() -> JetPoly {
    let m = momentum();
    let m_x = m.total_x().expect("momentum derivative stays in range");
    -(v(0) * m_x) - (v(1) * m).scale_rat(2, 1)
        + JetPoly::param(Param::Alpha) * v(1)
        + JetPoly::param(Param::Beta) * v(0).pow(2) * v(1)
        + JetPoly::param(Param::Gamma) * v(0).pow(3) * v(1)
        + JetPoly::param(Param::BigGamma) * v(3)
}

/// Density whose variational derivative generates the flow through
/// `B_1 = D_x (1 - D_x^2)` acting on gradients in `m`:
/// `u^3/2 + u u_x^2/2 - (alpha/2) u^2 - (beta/12) u^4 - (gamma/20) u^5
/// + (Gamma/2) u_x^2`.
pub fn h2_density() -> JetPoly {
    v(0).pow(3).scale_rat(1, 2)
        + (v(0) * v(1).pow(2)).scale_rat(1, 2)
        - JetPoly::param(Param::Alpha) * v(0).pow(2).scale_rat(1, 2)
        - JetPoly::param(Param::Beta) * v(0).pow(4).scale_rat(1, 12)
        - JetPoly::param(Param::Gamma) * v(0).pow(5).scale_rat(1, 20)
        + JetPoly::param(Param::BigGamma) * v(1).pow(2).scale_rat(1, 2)
}

/// The variational gradient `E(h2_density)` written out:
/// `(3/2)u^2 - u u_xx - (1/2)u_x^2 - alpha u - (beta/3)u^3 - (gamma/4)u^4
/// - Gamma u_xx`.
pub fn h2_gradient_display() -> JetPoly {
    v(0).pow(2).scale_rat(3, 2)
        - v(0) * v(2)
        - v(1).pow(2).scale_rat(1, 2)
        - JetPoly::param(Param::Alpha) * v(0)
        - JetPoly::param(Param::Beta) * v(0).pow(3).scale_rat(1, 3)
        - JetPoly::param(Param::Gamma) * v(0).pow(4).scale_rat(1, 4)
        - JetPoly::param(Param::BigGamma) * v(2)
}

/// `B_2 u`, the second Hamiltonian operator applied to `u = delta H_1 /
/// delta m`, with the two nonlocal integrals replaced by their closed forms.
pub fn b2_applied_to_u() -> Result<JetPoly, SymbolicError> {
    let m = momentum();
    let local = (&m * &v(0)).total_x()? + &m * &v(1)
        - JetPoly::param(Param::Alpha) * v(1)
        - JetPoly::param(Param::BigGamma) * v(3);
    // -(2/3) beta D_x(u * u^2/2)
    let beta_part = JetPoly::param(Param::Beta)
        * (v(0) * v(0).pow(2).scale_rat(1, 2)).total_x()?.scale_rat(2, 3);
    // -(5/8) gamma D_x(u^{3/2} * (2/5) u^{5/2})
    let gamma_part = JetPoly::param(Param::Gamma)
        * (JetPoly::v0_half_pow(3) * JetPoly::v0_half_pow(5).scale_rat(2, 5))
            .total_x()?
            .scale_rat(5, 8);
    Ok(local - beta_part - gamma_part)
}

/// Residual of the first representation, `m_t + D_x E(h2_density)`.
pub fn first_representation_residual() -> Result<JetPoly, SymbolicError> {
    let grad = h2_density().euler_op()?;
    Ok(mt_rhs() + grad.total_x()?)
}

/// Residual of the second representation, `m_t + B_2 u`.
pub fn second_representation_residual() -> Result<JetPoly, SymbolicError> {
    Ok(mt_rhs() + b2_applied_to_u()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antiderivative_closures_hold() {
        // D_x(u^2/2) = u u_x
        let sq = v(0).pow(2).scale_rat(1, 2);
        assert_eq!(sq.total_x().unwrap(), v(0) * v(1));
        // D_x((2/5) u^{5/2}) = u^{3/2} u_x
        let p = JetPoly::v0_half_pow(5).scale_rat(2, 5);
        assert_eq!(p.total_x().unwrap(), JetPoly::v0_half_pow(3) * v(1));
    }

    #[test]
    fn gradient_matches_display() {
        let grad = h2_density().euler_op().unwrap();
        assert_eq!(grad, h2_gradient_display());
    }

    #[test]
    fn first_representation_closes() {
        let r = first_representation_residual().unwrap();
        assert!(r.is_zero(), "residual: {r}");
    }

    #[test]
    fn second_representation_closes() {
        let r = second_representation_residual().unwrap();
        assert!(r.is_zero(), "residual: {r}");
    }

    #[test]
    fn representations_need_every_term() {
        // dropping the quartic-density term leaves a gamma residual
        let pruned = h2_density() + JetPoly::param(Param::Gamma) * v(0).pow(5).scale_rat(1, 20);
        let grad = pruned.euler_op().unwrap();
        let r = mt_rhs() + grad.total_x().unwrap();
        assert!(!r.is_zero());
    }
}
