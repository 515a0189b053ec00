//! Differential 1- and 2-forms over jet polynomials and the
//! pseudo-spherical structure-equation check for the Dullin–Gottwald–Holm
//! triplet.
//!
//! Forms live on the two base coordinates `(chi, tau)` of the travelling
//! frame.  Coefficients are jet polynomials in `v` and its chi-derivatives;
//! the momentum is `n = v - v_chichi` and its tau-derivative enters only
//! through the opaque symbol `n_tau`, eliminated by the PDE rewrite rule.

use super::poly::{JetPoly, Param};
use crate::error::SymbolicError;

/// `A dχ + B dτ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    pub dchi: JetPoly,
    pub dtau: JetPoly,
}

/// `C dχ∧dτ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoForm {
    pub coeff: JetPoly,
}

impl TwoForm {
    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }
}

/// Wedge product, oriented as `dχ∧dτ`.
pub fn wedge(a: &OneForm, b: &OneForm) -> TwoForm {
    TwoForm {
        coeff: &(&a.dchi * &b.dtau) - &(&a.dtau * &b.dchi),
    }
}

/// Tau-total-derivative of a coefficient that is affine in `n = v0 - v2`:
/// `D_τ (λ n + const) = λ n_τ`.
fn total_tau_affine(p: &JetPoly) -> Result<JetPoly, SymbolicError> {
    let dv0 = p.partial_jet(0);
    let dv2 = p.partial_jet(2);
    for k in (1..super::poly::JET_VARS).filter(|&k| k != 2) {
        if !p.partial_jet(k).is_zero() {
            return Err(SymbolicError::TauOfNonAffine);
        }
    }
    // require dv0 = -dv2 = constant lambda
    if !(&dv0 + &dv2).is_zero() || !dv0.partial_jet(0).is_zero() {
        return Err(SymbolicError::TauOfNonAffine);
    }
    Ok(dv0 * JetPoly::ntau())
}

/// Exterior derivative `d(A dχ + B dτ) = (D_χ B - D_τ A) dχ∧dτ`.
pub fn exterior_d(theta: &OneForm) -> Result<TwoForm, SymbolicError> {
    let dchi_b = theta.dtau.total_x()?;
    let dtau_a = total_tau_affine(&theta.dchi)?;
    Ok(TwoForm {
        coeff: &dchi_b - &dtau_a,
    })
}

/// Sign choice of the triplet ("±" of the theorem statement).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignChoice {
    Upper,
    Lower,
}

impl SignChoice {
    fn s(self) -> i64 {
        match self {
            SignChoice::Upper => 1,
            SignChoice::Lower => -1,
        }
    }
}

fn v(k: usize) -> JetPoly {
    JetPoly::jet(k)
}

fn momentum() -> JetPoly {
    v(0) - v(2)
}

/// The transformed pseudo-spherical triplet of the DGH equation in the
/// travelling frame, with free constant `b` and connection parameter `eta`
/// subject to `eta^2 = 2 + 2b + alpha + Gamma`.
pub fn dgh_triplet(sign: SignChoice) -> [OneForm; 3] {
    let s = JetPoly::rat(sign.s(), 1);
    let n = momentum();
    let b = JetPoly::param(Param::B);
    let eta = JetPoly::param(Param::Eta);
    let big_gamma = JetPoly::param(Param::BigGamma);
    let one = JetPoly::one();

    let theta1 = OneForm {
        dchi: &n + &b,
        dtau: -(&(&v(0) + &big_gamma) * &n
            + (&b + &one) * v(0)
            + &b * &(&big_gamma + &one)
            - &s * &eta * v(1)),
    };
    let theta2 = OneForm {
        dchi: eta.clone(),
        dtau: -(&eta * &(&one + &(&v(0) + &big_gamma)) - &s * &v(1)),
    };
    let theta3 = OneForm {
        dchi: &s * &(&(&n + &b) + &one),
        dtau: &eta * &v(1)
            - &s * &(&(&v(0) + &big_gamma) * &(&n + &one)
                + (&v(0) + &one) * (&b + &one)
                + &big_gamma * &b),
    };
    [theta1, theta2, theta3]
}

/// Rewrite target for `n_τ`: the DGH equation in the travelling frame,
/// `n_τ = -v n_χ - 2 v_χ n + α v_χ + Γ v_χχχ`.
pub fn dgh_pde_rule() -> JetPoly {
    let n = momentum();
    let n_chi = n.total_x().expect("momentum derivative stays in range");
    -(&v(0) * &n_chi) - (&v(1) * &n).scale_rat(2, 1)
        + JetPoly::param(Param::Alpha) * v(1)
        + JetPoly::param(Param::BigGamma) * v(3)
}

/// `n_τ + v n_χ + 2 v_χ n - α v_χ - Γ v_χχχ`, the equation's left-minus-right
/// side as a polynomial.
pub fn dgh_pde_residual_poly() -> JetPoly {
    JetPoly::ntau() - dgh_pde_rule()
}

/// One structure-equation residual, before and after the PDE rewrite.
#[derive(Debug, Clone)]
pub struct PssResidual {
    /// `dθ_i - θ_j∧θ_k` with η² already normalized, `n_τ` kept opaque.
    pub raw: TwoForm,
    /// The same residual with `n_τ` rewritten via the PDE.
    pub reduced: TwoForm,
}

/// Residuals of the three structure equations
/// `dθ1 = θ3∧θ2`, `dθ2 = θ1∧θ3`, `dθ3 = θ1∧θ2`.
pub fn pss_residuals(sign: SignChoice) -> Result<[PssResidual; 3], SymbolicError> {
    let [t1, t2, t3] = dgh_triplet(sign);
    let rule = dgh_pde_rule();
    let pairs = [
        (exterior_d(&t1)?, wedge(&t3, &t2)),
        (exterior_d(&t2)?, wedge(&t1, &t3)),
        (exterior_d(&t3)?, wedge(&t1, &t2)),
    ];
    Ok(pairs.map(|(d, w)| {
        let raw = (&d.coeff - &w.coeff).eta_normalized();
        let reduced = raw.subst_ntau(&rule).eta_normalized();
        PssResidual {
            raw: TwoForm { coeff: raw },
            reduced: TwoForm { coeff: reduced },
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_antisymmetry() {
        let [t1, t2, t3] = dgh_triplet(SignChoice::Upper);
        for a in [&t1, &t2, &t3] {
            assert!(wedge(a, a).is_zero());
        }
        for (a, b) in [(&t1, &t2), (&t1, &t3), (&t2, &t3)] {
            let ab = wedge(a, b);
            let ba = wedge(b, a);
            assert!((&ab.coeff + &ba.coeff).is_zero());
        }
    }

    #[test]
    fn reduced_residuals_vanish_both_signs() {
        for sign in [SignChoice::Upper, SignChoice::Lower] {
            let res = pss_residuals(sign).unwrap();
            for (i, r) in res.iter().enumerate() {
                assert!(
                    r.reduced.is_zero(),
                    "structure equation {} residual nonzero for {:?}: {}",
                    i + 1,
                    sign,
                    r.reduced.coeff
                );
            }
        }
    }

    #[test]
    fn second_equation_holds_identically() {
        // dθ2 = θ1∧θ3 needs no PDE substitution at all.
        for sign in [SignChoice::Upper, SignChoice::Lower] {
            let res = pss_residuals(sign).unwrap();
            assert!(res[1].raw.is_zero());
        }
    }

    #[test]
    fn raw_third_residual_is_signed_pde_residual() {
        let pde = dgh_pde_residual_poly();
        let upper = pss_residuals(SignChoice::Upper).unwrap();
        assert_eq!(upper[2].raw.coeff, -&pde);
        let lower = pss_residuals(SignChoice::Lower).unwrap();
        assert_eq!(lower[2].raw.coeff, pde);
    }

    #[test]
    fn gamma_zero_recovers_untranslated_triplet() {
        // With Γ = 0 the triplet must match the flat-frame one:
        // θ1 = (m+b)dx - [um + (b+1)u + b ∓ η u_x]dt, etc.
        let [t1, t2, t3] = dgh_triplet(SignChoice::Upper);
        let drop = |p: &JetPoly| p.subst_param_zero(Param::BigGamma);
        let v = |k| JetPoly::jet(k);
        let n = v(0) - v(2);
        let b = JetPoly::param(Param::B);
        let eta = JetPoly::param(Param::Eta);
        let one = JetPoly::one();
        assert_eq!(drop(&t1.dchi), &n + &b);
        assert_eq!(
            drop(&t1.dtau),
            -(&(&v(0) * &n) + &((&b + &one) * v(0)) + b.clone() - &eta * &v(1))
        );
        assert_eq!(
            drop(&t2.dtau),
            -(&(&eta * &(&one + &v(0))) - &v(1))
        );
        assert_eq!(drop(&t3.dchi), &(&n + &b) + &one);
    }
}
