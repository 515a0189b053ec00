//! Perturbative bi-Hamiltonian deformation check.
//!
//! The rescaled equation is transformed into an evolution equation for
//! `v = (1 - eps^2 D^2)^{1/2} u`, expanded to order eps^4, and compared
//! order by order with the Hamiltonian flow `v_t + D_x E(h_f) = 0` for the
//! deformed density family `h_f(f, c, p, s)`.
//!
//! The order-eps^2 match is an overdetermined system for `c(v)` whose
//! exactness obstruction vanishes identically: `c = 12 A / f'''` satisfies
//! every coefficient equation for all parameter values.  The cubic and
//! quartic nonlinearities are instead obstructed at order eps^4, where the
//! coefficient equations for `p(v)` and `s(v)` become unsolvable unless
//! `beta = gamma = 0`; this is established by exact linear elimination over
//! the polynomial ansatz space at rational parameter branches on which
//! `c` stays polynomial.

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::{JetPoly, Param};
use crate::error::SymbolicError;

fn v(k: usize) -> JetPoly {
    JetPoly::jet(k)
}

fn eps2() -> JetPoly {
    JetPoly::param(Param::Eps).pow(2)
}

fn eps4() -> JetPoly {
    JetPoly::param(Param::Eps).pow(4)
}

/// k-th x-derivative of `u = (1 - eps^2 D^2)^{-1/2} v`, truncated at eps^4:
/// `u_k = v_k + (1/2) eps^2 v_{k+2} + (3/8) eps^4 v_{k+4}`.
fn u_jet(k: usize) -> JetPoly {
    v(k) + eps2() * v(k + 2).scale_rat(1, 2) + eps4() * v(k + 4).scale_rat(3, 8)
}

/// Applies `(1 - eps^2 D^2)^{-1/2}` to a truncated expansion.
fn smooth_half_inverse(p: &JetPoly) -> Result<JetPoly, SymbolicError> {
    // grades that would exceed eps^4 after the prefactor are dropped before
    // differentiating, which also keeps the jet order inside the table
    let d2 = p.truncate_eps(2).total_x_n(2)?;
    let d4 = p.truncate_eps(0).total_x_n(4)?;
    Ok(p.truncate_eps(4) + eps2() * d2.scale_rat(1, 2) + eps4() * d4.scale_rat(3, 8))
}

/// Right-hand side of the evolution equation for `v`, truncated at eps^4.
///
/// Built by direct substitution: the non-evolutionary terms are evaluated at
/// `u = (1 - eps^2 D^2)^{-1/2} v` and the operator is applied once more to
/// the whole right-hand side.  The overall sign follows the evolution-form
/// convention `v_t = -(F00 + H0) - eps^2 [..] - eps^4 [..]`.
pub fn expand_to_v() -> Result<JetPoly, SymbolicError> {
    let alpha = JetPoly::param(Param::Alpha);
    let beta = JetPoly::param(Param::Beta);
    let gamma = JetPoly::param(Param::Gamma);
    let big_gamma = JetPoly::param(Param::BigGamma);

    let u0 = u_jet(0);
    let u1 = u_jet(1);
    let u2 = u_jet(2);
    let u3 = u_jet(3);

    // N(u) = (3/2) u u_x + alpha u_x + beta u^2 u_x + gamma u^3 u_x
    //        - eps^2 (u_x u_xx + (1/2) u u_xxx - Gamma u_xxx)
    let convective = (&u0 * &u1).scale_rat(3, 2)
        + &alpha * &u1
        + &beta * &(&u0.pow(2) * &u1)
        + &gamma * &(&u0.pow(3) * &u1);
    let dispersive =
        &u1 * &u2 + (&u0 * &u3).scale_rat(1, 2) - &big_gamma * &u3;
    let n_of_u = (convective - eps2() * dispersive).truncate_eps(4);

    let rhs = smooth_half_inverse(&n_of_u)?;
    Ok(-rhs)
}

/// The deformed Hamiltonian density family.
///
/// `f`, `c`, `p`, `s` are polynomials in `v0` alone.  The quartic-gradient
/// correction carries `s`; its weight is fixed so that at `f''' = 3/2` the
/// eps^4 integrand reduces to `(3/2)(p v_xx^2 - s v_x^4)`.
pub fn hf_density(f: &JetPoly, c: &JetPoly, p: &JetPoly, s: &JetPoly) -> JetPoly {
    let d = |q: &JetPoly, n: usize| {
        let mut out = q.clone();
        for _ in 0..n {
            out = out.partial_jet(0);
        }
        out
    };
    let f3 = d(f, 3);
    let f4 = d(f, 4);
    let f5 = d(f, 5);
    let f6 = d(f, 6);
    let c1 = d(c, 1);
    let c2 = d(c, 2);
    let p1 = d(p, 1);

    let vx2 = v(1).pow(2);
    let vx4 = v(1).pow(4);
    let vxx2 = v(2).pow(2);

    let order2 = -(&(c * &f3) * &vx2).scale_rat(1, 24);
    let vxx_block = (p * &f3 + (c * &f4).scale_rat(1, 480)) * vxx2;
    let c_block = ((&(c * &c2) * &f4).scale_rat(1, 1152)
        + (&(c * &c1) * &f5).scale_rat(1, 1152)
        + (&c.pow(2) * &f6).scale_rat(1, 3456))
        * vx4.clone();
    let p_block = ((&p1 * &f4).scale_rat(1, 6) + (p * &f5).scale_rat(1, 6)) * vx4.clone();
    let s_block = (&(s * &f3) * &vx4).scale_rat(1, 1);
    let order4 = vxx_block - c_block + p_block - s_block;

    f.clone() + eps2() * order2 + eps4() * order4
}

/// `f(v)` forced by the order-eps^0 match, with symbolic parameters:
/// `v^3/4 + (alpha/2) v^2 + (beta/12) v^4 + (gamma/20) v^5`.
pub fn forced_f() -> JetPoly {
    v(0).pow(3).scale_rat(1, 4)
        + JetPoly::param(Param::Alpha) * v(0).pow(2).scale_rat(1, 2)
        + JetPoly::param(Param::Beta) * v(0).pow(4).scale_rat(1, 12)
        + JetPoly::param(Param::Gamma) * v(0).pow(5).scale_rat(1, 20)
}

/// `c(v) = 8(v + alpha + Gamma)` — the deformation forced once the
/// obstruction vanishes.
pub fn forced_c() -> JetPoly {
    (v(0) + JetPoly::param(Param::Alpha) + JetPoly::param(Param::BigGamma)).scale_rat(8, 1)
}

/// `p(v) = (v + alpha + Gamma)/3`.
pub fn forced_p() -> JetPoly {
    (v(0) + JetPoly::param(Param::Alpha) + JetPoly::param(Param::BigGamma)).scale_rat(1, 3)
}

/// Residuals of `v_t + D_x E(h_f) = 0` at orders eps^0, eps^2, eps^4.
pub fn residuals(
    f: &JetPoly,
    c: &JetPoly,
    p: &JetPoly,
    s: &JetPoly,
) -> Result<[JetPoly; 3], SymbolicError> {
    let flow = expand_to_v()?;
    let hf = hf_density(f, c, p, s);
    let grad = hf.euler_op()?.total_x()?.truncate_eps(4);
    let total = &flow + &grad;
    Ok([
        total.eps_coefficient(0),
        total.eps_coefficient(2),
        total.eps_coefficient(4),
    ])
}

/// The order-eps^2 coefficient system extracted from the expanded flow.
///
/// Writing the integrated eps^2 bracket as `A(v) v_xx + B(v) v_x^2`, the
/// match with `E(-(c/24) f''' v_x^2)` requires `(c f'''/12) = A` and
/// `(c f''')'/24 = B`; eliminating `c` leaves the obstruction `A' - 2B`.
#[derive(Debug, Clone)]
pub struct Eps2System {
    /// Coefficient of `v_xx` of the integrated bracket (polynomial in v).
    pub a_poly: JetPoly,
    /// Coefficient of `v_x^2`.
    pub b_poly: JetPoly,
    /// `A' - 2B`; vanishes iff a compatible (possibly rational) `c(v)`
    /// exists.  It is identically zero: the eps^2 order alone imposes no
    /// constraint on the nonlinearity coefficients.
    pub obstruction: JetPoly,
}

/// Extracts the eps^2 system from the expanded flow.
///
/// The eps^2 bracket of the flow is a total x-derivative of shape
/// `D_x(A v_xx + B v_x^2)`; the antiderivative is recovered by matching the
/// `v_xxx`, `v_x v_xx` and `v_x^3` coefficient families and checking the
/// exactness condition.
pub fn eps2_system() -> Result<Eps2System, SymbolicError> {
    let flow = expand_to_v()?;
    // the bracket is the eps^2 coefficient of -v_t
    let bracket = -flow.eps_coefficient(2);
    let a_of_v3 = bracket.coefficient_of_low_jets(0, 0, 1)?;
    let b_of_v1v2 = bracket.coefficient_of_low_jets(1, 1, 0)?;
    let e_of_v1cubed = bracket.coefficient_of_low_jets(3, 0, 0)?;
    let plain = bracket.coefficient_of_low_jets(0, 0, 0)?;
    let lone_v1 = bracket.coefficient_of_low_jets(1, 0, 0)?;
    let lone_v2 = bracket.coefficient_of_low_jets(0, 1, 0)?;
    if !plain.is_zero() || !lone_v1.is_zero() || !lone_v2.is_zero() {
        return Err(SymbolicError::UnsupportedShape(
            "eps^2 bracket has unexpected low-order terms".into(),
        ));
    }
    // D_x(A v2 + B v1^2) = A v3 + (A' + 2B) v1 v2 + B' v1^3
    let a_poly = a_of_v3;
    let a1 = a_poly.partial_jet(0);
    let b_poly = (&b_of_v1v2 - &a1).scale_rat(1, 2);
    let b1 = b_poly.partial_jet(0);
    if b1 != e_of_v1cubed {
        return Err(SymbolicError::UnsupportedShape(
            "eps^2 bracket is not an exact x-derivative".into(),
        ));
    }
    let obstruction = &a1 - &b_poly.scale_rat(2, 1);
    Ok(Eps2System {
        a_poly,
        b_poly,
        obstruction,
    })
}

/// Solves (4-term ansatz) for `c(v)` from the `v_xx` equation once the
/// obstruction vanishes: `c = 12 A / f'''` with `f''' = 3/2` at
/// `beta = gamma = 0`.
pub fn solve_c_at_dgh(system: &Eps2System) -> JetPoly {
    system
        .a_poly
        .subst_param_zero(Param::Beta)
        .subst_param_zero(Param::Gamma)
        .scale_rat(8, 1)
}

/// Numeric model parameters `(alpha, beta, gamma, Gamma)` as exact
/// rationals.
pub type RationalParams = [BigRational; 4];

fn at_params(q: &JetPoly, params: &RationalParams) -> JetPoly {
    q.subst_param(Param::Alpha, &params[0])
        .subst_param(Param::Beta, &params[1])
        .subst_param(Param::Gamma, &params[2])
        .subst_param(Param::BigGamma, &params[3])
}

/// Long division in Q[v]; returns the quotient when the remainder is zero.
fn exact_division(num: &[BigRational], den: &[BigRational]) -> Option<Vec<BigRational>> {
    let dd = den.iter().rposition(|c| !c.is_zero())?;
    let mut rem: Vec<BigRational> = num.to_vec();
    while rem.last().map(|c| c.is_zero()).unwrap_or(false) {
        rem.pop();
    }
    let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(dd) + 1];
    while rem.len() > dd {
        let lead = rem.last().expect("trimmed").clone() / den[dd].clone();
        let shift = rem.len() - 1 - dd;
        quot[shift] = lead.clone();
        for (i, d) in den[..=dd].iter().enumerate() {
            rem[shift + i] -= &lead * d;
        }
        while rem.last().map(|c| c.is_zero()).unwrap_or(false) {
            rem.pop();
        }
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

fn from_coeffs(coeffs: &[BigRational]) -> JetPoly {
    let mut out = JetPoly::zero();
    for (k, c) in coeffs.iter().enumerate() {
        out = out + v(0).pow(k as u32).scale(c);
    }
    out
}

/// The unique `c(v)` solving the eps^2 system at numeric parameters, when
/// it is a polynomial: the exact quotient `12 A / f'''`.  Returns `None`
/// when `f'''` does not divide `12 A` in `Q[v]`.
pub fn polynomial_c_at(params: &RationalParams) -> Result<Option<JetPoly>, SymbolicError> {
    let sys = eps2_system()?;
    let a = at_params(&sys.a_poly, params);
    let f = at_params(&forced_f(), params);
    let f3 = f.partial_jet(0).partial_jet(0).partial_jet(0);
    let num = a.scale_rat(12, 1).univariate_coeffs()?;
    let den = f3.univariate_coeffs()?;
    Ok(exact_division(&num, &den).map(|q| from_coeffs(&q)))
}

/// Solves the eps^4 coefficient equations for polynomial `p(v)`, `s(v)` of
/// degree at most `deg` at numeric parameters, by exact linear elimination
/// over the residual's monomial coefficients.  Returns the closing pair
/// when one exists.
pub fn solve_eps4_ansatz(
    params: &RationalParams,
    c: &JetPoly,
    deg: usize,
) -> Result<Option<(JetPoly, JetPoly)>, SymbolicError> {
    let f = at_params(&forced_f(), params);
    let flow = at_params(&expand_to_v()?, params);
    let residual = |p: &JetPoly, s: &JetPoly| -> Result<JetPoly, SymbolicError> {
        let hf = hf_density(&f, c, p, s);
        let grad = hf.euler_op()?.total_x()?.truncate_eps(4);
        Ok((&flow + &grad).eps_coefficient(4))
    };
    let zero = JetPoly::zero();
    let base = residual(&zero, &zero)?;
    // the residual is affine in (p, s); each ansatz coefficient contributes
    // one column of the linear system  cols · x = -base
    let nvars = 2 * (deg + 1);
    let mut cols = Vec::with_capacity(nvars);
    for k in 0..=deg {
        cols.push(&residual(&v(0).pow(k as u32), &zero)? - &base);
    }
    for k in 0..=deg {
        cols.push(&residual(&zero, &v(0).pow(k as u32))? - &base);
    }
    let mut keys: Vec<_> = base.terms().map(|(m, _)| *m).collect();
    for col in &cols {
        keys.extend(col.terms().map(|(m, _)| *m));
    }
    keys.sort();
    keys.dedup();
    let coeff = |p: &JetPoly, m| {
        p.terms()
            .find(|(k, _)| **k == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    };
    let mut rows: Vec<Vec<BigRational>> = keys
        .iter()
        .map(|&m| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| coeff(c, m)).collect();
            row.push(-coeff(&base, m));
            row
        })
        .collect();
    // Gaussian elimination with partial ordering by column
    let mut pivot_rows = Vec::new();
    let mut r0 = 0;
    for col in 0..nvars {
        let Some(pr) = (r0..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(r0, pr);
        let pivot = rows[r0][col].clone();
        for j in col..=nvars {
            let val = rows[r0][j].clone() / pivot.clone();
            rows[r0][j] = val;
        }
        for r in 0..rows.len() {
            if r != r0 && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for j in col..=nvars {
                    let sub = &factor * &rows[r0][j];
                    rows[r][j] -= sub;
                }
            }
        }
        pivot_rows.push((r0, col));
        r0 += 1;
    }
    // inconsistent system: a zero row with nonzero right-hand side
    if rows[r0..]
        .iter()
        .any(|row| row[..nvars].iter().all(|c| c.is_zero()) && !row[nvars].is_zero())
    {
        return Ok(None);
    }
    let mut x = vec![BigRational::zero(); nvars];
    for &(r, c) in &pivot_rows {
        x[c] = rows[r][nvars].clone();
    }
    let p = from_coeffs(&x[..=deg]);
    let s = from_coeffs(&x[deg + 1..]);
    debug_assert!(residual(&p, &s)?.is_zero());
    Ok(Some((p, s)))
}
