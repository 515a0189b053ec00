//! Differential polynomials in jet variables with exact rational coefficients.
//!
//! A [`JetPoly`] is a finite sum of monomials in the jet variables
//! `v = v0, v1 (= v_x), ..., v8` together with the commuting parameter
//! symbols `alpha, beta, gamma, Gamma, eta, b, eps, c` and the opaque
//! tau-derivative symbol `n_tau`.  Coefficients are `BigRational`; there is
//! no floating point anywhere in this module.
//!
//! Jet exponents are stored doubled so that half-integer powers of `v0`
//! (needed for the quartic-nonlinearity Hamiltonian check) live in the same
//! algebra as everything else.  Only `v0` ever carries an odd doubled
//! exponent.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::SymbolicError;

/// Number of jet variables `v0..v8`.
pub const JET_VARS: usize = 9;

/// Commuting parameter symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    /// Coefficient of the linear dispersion term.
    Alpha,
    /// Coefficient of the cubic nonlinearity.
    Beta,
    /// Coefficient of the quartic nonlinearity.
    Gamma,
    /// Coefficient of the third-derivative dispersion (written Γ).
    BigGamma,
    /// Connection-form parameter subject to the rewrite η² → 2 + 2b + α + Γ.
    Eta,
    /// Free constant of the pseudo-spherical triplet.
    B,
    /// Perturbation bookkeeping symbol; its exponent is the grading weight.
    Eps,
    /// Wave-speed symbol of the rotation preset mapping.
    C,
}

pub const N_PARAMS: usize = 8;

const PARAM_NAMES: [&str; N_PARAMS] = ["alpha", "beta", "gamma", "Gamma", "eta", "b", "eps", "c"];

impl Param {
    fn index(self) -> usize {
        match self {
            Param::Alpha => 0,
            Param::Beta => 1,
            Param::Gamma => 2,
            Param::BigGamma => 3,
            Param::Eta => 4,
            Param::B => 5,
            Param::Eps => 6,
            Param::C => 7,
        }
    }
}

/// Exponent vector of a single monomial.
///
/// `jets[k]` is twice the exponent of `v_k`; `params[i]` is the plain
/// exponent of the i-th parameter symbol; `ntau` is the plain exponent of
/// the opaque symbol `n_tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    jets: [u16; JET_VARS],
    ntau: u16,
    params: [u16; N_PARAMS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        jets: [0; JET_VARS],
        ntau: 0,
        params: [0; N_PARAMS],
    };

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for k in 0..JET_VARS {
            out.jets[k] += other.jets[k];
        }
        for i in 0..N_PARAMS {
            out.params[i] += other.params[i];
        }
        out.ntau += other.ntau;
        out
    }

    /// Highest jet index with nonzero exponent, or `None` for jet-free terms.
    pub fn max_jet(&self) -> Option<usize> {
        (0..JET_VARS).rev().find(|&k| self.jets[k] != 0)
    }

    pub fn eps_order(&self) -> u16 {
        self.params[Param::Eps.index()]
    }
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Sparse differential polynomial in canonical form: no zero coefficients
/// are stored and monomial keys are total-ordered.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JetPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl JetPoly {
    pub fn zero() -> JetPoly {
        JetPoly::default()
    }

    pub fn one() -> JetPoly {
        JetPoly::constant(rational(1, 1))
    }

    pub fn constant(c: BigRational) -> JetPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::ONE, c);
        }
        JetPoly { terms }
    }

    /// The rational constant `num/den`.
    pub fn rat(num: i64, den: i64) -> JetPoly {
        JetPoly::constant(rational(num, den))
    }

    /// The jet variable `v_k`.
    pub fn jet(k: usize) -> JetPoly {
        assert!(k < JET_VARS, "jet index out of range");
        let mut m = Monomial::ONE;
        m.jets[k] = 2;
        JetPoly::monomial(m)
    }

    /// `v0^(half/2)` — half-integer powers of the undifferentiated variable.
    pub fn v0_half_pow(half: u16) -> JetPoly {
        let mut m = Monomial::ONE;
        m.jets[0] = half;
        JetPoly::monomial(m)
    }

    pub fn param(p: Param) -> JetPoly {
        let mut m = Monomial::ONE;
        m.params[p.index()] = 1;
        JetPoly::monomial(m)
    }

    /// The opaque symbol standing for the tau-derivative of `n = v0 - v2`.
    pub fn ntau() -> JetPoly {
        let mut m = Monomial::ONE;
        m.ntau = 1;
        JetPoly::monomial(m)
    }

    fn monomial(m: Monomial) -> JetPoly {
        let mut terms = BTreeMap::new();
        terms.insert(m, rational(1, 1));
        JetPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    fn insert(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> JetPoly {
        if c.is_zero() {
            return JetPoly::zero();
        }
        JetPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (*m, x.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn scale_rat(&self, num: i64, den: i64) -> JetPoly {
        self.scale(&rational(num, den))
    }

    pub fn pow(&self, e: u32) -> JetPoly {
        let mut out = JetPoly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to the jet variable `v_k`.
    ///
    /// Half-integer exponents differentiate through the same rule:
    /// d/dv (v^{e/2}) = (e/2) v^{e/2-1}.
    pub fn partial_jet(&self, k: usize) -> JetPoly {
        assert!(k < JET_VARS);
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            let e = m.jets[k];
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2.jets[k] = e - 2;
            out.insert(m2, c.clone() * rational(i64::from(e), 2));
        }
        out
    }

    pub fn partial_param(&self, p: Param) -> JetPoly {
        let i = p.index();
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            let e = m.params[i];
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2.params[i] = e - 1;
            out.insert(m2, c.clone() * rational(i64::from(e), 1));
        }
        out
    }

    /// Total x-derivative: each `v_k` contributes `∂/∂v_k · v_{k+1}`.
    ///
    /// Fails with a jet-order overflow when a term already involves the
    /// highest supported jet.
    pub fn total_x(&self) -> Result<JetPoly, SymbolicError> {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            if m.ntau != 0 {
                return Err(SymbolicError::TauInTotalX);
            }
            for k in 0..JET_VARS {
                let e = m.jets[k];
                if e == 0 {
                    continue;
                }
                if k + 1 >= JET_VARS {
                    return Err(SymbolicError::JetOrderOverflow);
                }
                let mut m2 = *m;
                m2.jets[k] = e - 2;
                m2.jets[k + 1] += 2;
                out.insert(m2, c.clone() * rational(i64::from(e), 2));
            }
        }
        Ok(out)
    }

    pub fn total_x_n(&self, n: usize) -> Result<JetPoly, SymbolicError> {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.total_x()?;
        }
        Ok(out)
    }

    /// Variational (Euler–Lagrange) derivative `Σ_k (-1)^k D_x^k ∂/∂v_k`.
    pub fn euler_op(&self) -> Result<JetPoly, SymbolicError> {
        let mut out = JetPoly::zero();
        for k in 0..JET_VARS {
            let p = self.partial_jet(k);
            if p.is_zero() {
                continue;
            }
            let d = p.total_x_n(k)?;
            out = if k % 2 == 0 { &out + &d } else { &out - &d };
        }
        Ok(out)
    }

    /// Normalizes powers of η by the rewrite η² → 2 + 2b + α + Γ.
    pub fn eta_normalized(&self) -> JetPoly {
        let idx = Param::Eta.index();
        let needs = self.terms.keys().any(|m| m.params[idx] >= 2);
        if !needs {
            return self.clone();
        }
        let eta_sq = JetPoly::rat(2, 1)
            + JetPoly::param(Param::B).scale_rat(2, 1)
            + JetPoly::param(Param::Alpha)
            + JetPoly::param(Param::BigGamma);
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            let e = m.params[idx];
            if e < 2 {
                out.insert(*m, c.clone());
                continue;
            }
            let mut m2 = *m;
            m2.params[idx] = e % 2;
            let replaced = JetPoly::monomial(m2).scale(c) * eta_sq.pow(u32::from(e / 2));
            out = &out + &replaced;
        }
        // A single pass suffices: the replacement is eta-free.
        out
    }

    /// Replaces every occurrence of the `n_tau` symbol by `rule`.
    pub fn subst_ntau(&self, rule: &JetPoly) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            if m.ntau == 0 {
                out.insert(*m, c.clone());
            } else {
                let mut m2 = *m;
                let e = m2.ntau;
                m2.ntau = 0;
                let replaced = JetPoly::monomial(m2).scale(c) * rule.pow(u32::from(e));
                out = &out + &replaced;
            }
        }
        out
    }

    /// Drops every term whose ε-grade exceeds `order`.
    pub fn truncate_eps(&self, order: u16) -> JetPoly {
        JetPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.eps_order() <= order)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Coefficient polynomial of `eps^order` (with the ε factor removed).
    pub fn eps_coefficient(&self, order: u16) -> JetPoly {
        let idx = Param::Eps.index();
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            if m.params[idx] == order {
                let mut m2 = *m;
                m2.params[idx] = 0;
                out.insert(m2, c.clone());
            }
        }
        out
    }

    /// Drops every term containing the given parameter (substitutes it by 0).
    pub fn subst_param_zero(&self, p: Param) -> JetPoly {
        let idx = p.index();
        JetPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.params[idx] == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Substitutes an exact rational value for a parameter symbol.
    pub fn subst_param(&self, p: Param, value: &BigRational) -> JetPoly {
        let idx = p.index();
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            let mut m2 = *m;
            m2.params[idx] = 0;
            let mut coeff = c.clone();
            for _ in 0..m.params[idx] {
                coeff *= value;
            }
            out.insert(m2, coeff);
        }
        out
    }

    /// Coefficient vector of a numeric polynomial in `v0` alone: entry `k`
    /// is the coefficient of `v0^k`.  Fails on higher jets, half powers of
    /// `v0`, `n_tau` or any remaining symbol.
    pub fn univariate_coeffs(&self) -> Result<Vec<BigRational>, SymbolicError> {
        let mut out: Vec<BigRational> = Vec::new();
        for (m, c) in &self.terms {
            if m.ntau != 0
                || m.jets[1..].iter().any(|&e| e != 0)
                || m.params.iter().any(|&e| e != 0)
                || m.jets[0] % 2 != 0
            {
                return Err(SymbolicError::UnsupportedShape(
                    "expected a numeric polynomial in v0".into(),
                ));
            }
            let k = (m.jets[0] / 2) as usize;
            if out.len() <= k {
                out.resize(k + 1, BigRational::zero());
            }
            out[k] = c.clone();
        }
        Ok(out)
    }

    pub fn max_jet_order(&self) -> Option<usize> {
        self.terms.keys().filter_map(Monomial::max_jet).max()
    }

    /// Coefficient of the monomial `v1^a1 · v2^a2 · v3^a3` viewed as a
    /// polynomial in `v0` and the parameters.  Terms involving jets above
    /// `v3` or `n_tau` make the extraction fail.
    pub fn coefficient_of_low_jets(&self, a1: u16, a2: u16, a3: u16) -> Result<JetPoly, SymbolicError> {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            if m.ntau != 0 || m.jets[4..].iter().any(|&e| e != 0) {
                return Err(SymbolicError::UnsupportedShape(
                    "expected a polynomial in v0..v3".into(),
                ));
            }
            if m.jets[1] == 2 * a1 && m.jets[2] == 2 * a2 && m.jets[3] == 2 * a3 {
                let mut m2 = *m;
                m2.jets[1] = 0;
                m2.jets[2] = 0;
                m2.jets[3] = 0;
                out.insert(m2, c.clone());
            }
        }
        Ok(out)
    }

    /// Exact division by a constant polynomial (single jet-free, param-free
    /// monomial up to rational coefficient is not required; only a true
    /// rational constant is accepted).
    pub fn div_constant(&self, c: &BigRational) -> JetPoly {
        assert!(!c.is_zero());
        self.scale(&(BigRational::one() / c.clone()))
    }
}

impl Add for &JetPoly {
    type Output = JetPoly;
    fn add(self, rhs: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(*m, c.clone());
        }
        out
    }
}

impl Sub for &JetPoly {
    type Output = JetPoly;
    fn sub(self, rhs: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(*m, -c.clone());
        }
        out
    }
}

impl Neg for &JetPoly {
    type Output = JetPoly;
    fn neg(self) -> JetPoly {
        JetPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Mul for &JetPoly {
    type Output = JetPoly;
    fn mul(self, rhs: &JetPoly) -> JetPoly {
        let mut out = JetPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for JetPoly {
            type Output = JetPoly;
            fn $method(self, rhs: JetPoly) -> JetPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for JetPoly {
    type Output = JetPoly;
    fn neg(self) -> JetPoly {
        -&self
    }
}

impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (k, &e) in m.jets.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if e == 2 {
                    write!(f, "*v{k}")?;
                } else if e % 2 == 0 {
                    write!(f, "*v{k}^{}", e / 2)?;
                } else {
                    write!(f, "*v{k}^({e}/2)")?;
                }
            }
            for (i, &e) in m.params.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if e == 1 {
                    write!(f, "*{}", PARAM_NAMES[i])?;
                } else {
                    write!(f, "*{}^{e}", PARAM_NAMES[i])?;
                }
            }
            if m.ntau == 1 {
                write!(f, "*n_tau")?;
            } else if m.ntau > 1 {
                write!(f, "*n_tau^{}", m.ntau)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(k: usize) -> JetPoly {
        JetPoly::jet(k)
    }

    #[test]
    fn total_x_of_v_squared() {
        // D_x(v^2) = 2 v v1
        let p = v(0).pow(2);
        let d = p.total_x().unwrap();
        let expect = (v(0) * v(1)).scale_rat(2, 1);
        assert_eq!(d, expect);
    }

    #[test]
    fn total_x_of_v_v1() {
        // D_x(v v1) = v1^2 + v v2
        let p = v(0) * v(1);
        let d = p.total_x().unwrap();
        let expect = v(1).pow(2) + v(0) * v(2);
        assert_eq!(d, expect);
    }

    #[test]
    fn total_x_raises_order_by_one() {
        let p = v(0).pow(3) + v(2) * v(1);
        let mut q = p.clone();
        for step in 1..=4usize {
            q = q.total_x().unwrap();
            assert_eq!(q.max_jet_order(), Some(2 + step));
        }
    }

    #[test]
    fn euler_of_h1_density_is_momentum() {
        // E(v^2/2 + v1^2/2) = v - v2
        let density = v(0).pow(2).scale_rat(1, 2) + v(1).pow(2).scale_rat(1, 2);
        let e = density.euler_op().unwrap();
        assert_eq!(e, v(0) - v(2));
    }

    #[test]
    fn euler_of_v_cubed() {
        let e = v(0).pow(3).euler_op().unwrap();
        assert_eq!(e, v(0).pow(2).scale_rat(3, 1));
    }

    #[test]
    fn euler_annihilates_total_derivatives() {
        let samples = [
            v(0).pow(4),
            v(0) * v(1).pow(2),
            v(0).pow(2) * v(2),
            v(1) * v(2) + v(0).pow(5).scale_rat(7, 3),
            v(0) * v(1) * v(2) + JetPoly::param(Param::Alpha) * v(0).pow(2),
        ];
        for p in samples {
            let d = p.total_x().unwrap();
            assert!(d.euler_op().unwrap().is_zero(), "E(D_x p) != 0 for {p}");
        }
    }

    #[test]
    fn half_power_derivative() {
        // D_x(v^{5/2}) = (5/2) v^{3/2} v1
        let p = JetPoly::v0_half_pow(5);
        let d = p.total_x().unwrap();
        let expect = (JetPoly::v0_half_pow(3) * v(1)).scale_rat(5, 2);
        assert_eq!(d, expect);
    }

    #[test]
    fn eta_rewrite() {
        let p = JetPoly::param(Param::Eta).pow(2);
        let expect = JetPoly::rat(2, 1)
            + JetPoly::param(Param::B).scale_rat(2, 1)
            + JetPoly::param(Param::Alpha)
            + JetPoly::param(Param::BigGamma);
        assert_eq!(p.eta_normalized(), expect);
        // odd power keeps one eta
        let p3 = JetPoly::param(Param::Eta).pow(3);
        assert_eq!(p3.eta_normalized(), expect * JetPoly::param(Param::Eta));
    }

    #[test]
    fn eps_truncation_and_extraction() {
        let eps = JetPoly::param(Param::Eps);
        let p = v(0) + eps.pow(2) * v(1) + eps.pow(6) * v(2);
        let t = p.truncate_eps(4);
        assert_eq!(t, v(0) + eps.pow(2) * v(1));
        assert_eq!(p.eps_coefficient(2), v(1));
        assert_eq!(p.eps_coefficient(0), v(0));
    }

    #[test]
    fn ntau_substitution_is_idempotent() {
        let rule = v(1).scale_rat(-3, 1) + v(3);
        let p = JetPoly::ntau() * v(0) + v(1);
        let q = p.subst_ntau(&rule);
        assert_eq!(q, v(0) * (v(1).scale_rat(-3, 1) + v(3)) + v(1));
        assert_eq!(q.subst_ntau(&rule), q);
    }

    #[test]
    fn jet_order_overflow_detected() {
        let p = v(8);
        assert!(matches!(
            p.total_x(),
            Err(SymbolicError::JetOrderOverflow)
        ));
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let p = v(0) - v(0);
        assert!(p.is_zero());
        assert_eq!(p.term_count(), 0);
    }
}
