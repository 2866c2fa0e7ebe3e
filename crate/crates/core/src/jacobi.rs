//! Jacobi polynomials with exact rational coefficients, restricted to the
//! integer parameter pairs the constructions use, plus the endpoint quantity
//! `rho_k = C(k + d - 2, k)`.
//!
//! Two independent generation routes exist: the three-term recurrence for a
//! general integer pair `(alpha, beta)`, and the explicit binomial sum for
//! `P_k^{(0, d-2)}(1 - 2s)`, which is the form entering every non-conforming
//! shape function. The test suite cross-checks them against each other and
//! against the defining orthogonality and endpoint identities.

use crate::num::{binomial, pochhammer, rat_int, Rational};
use crate::poly::UniPoly;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::One;

/// Degree and integer weight exponents of a Jacobi polynomial
/// `P_n^{(alpha, beta)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JacobiParams {
    pub n: usize,
    pub alpha: usize,
    pub beta: usize,
}

impl JacobiParams {
    pub fn new(n: usize, alpha: usize, beta: usize) -> Self {
        JacobiParams { n, alpha, beta }
    }
}

/// `P_n^{(alpha, beta)}` on `[-1, 1]` by the three-term recurrence, exact.
pub fn jacobi_poly(p: JacobiParams) -> UniPoly {
    let (a, b) = (p.alpha as i64, p.beta as i64);
    let x = UniPoly::from_coeffs(alloc::vec![rat_int(0), rat_int(1)]);
    let mut prev = UniPoly::constant(rat_int(1));
    if p.n == 0 {
        return prev;
    }
    // P_1 = (alpha - beta)/2 + (alpha + beta + 2)/2 * x
    let mut cur = UniPoly::from_coeffs(alloc::vec![
        Rational::new(BigInt::from(a - b), BigInt::from(2)),
        Rational::new(BigInt::from(a + b + 2), BigInt::from(2)),
    ]);
    for n in 2..=p.n as i64 {
        let c1 = rat_int(2 * n * (n + a + b) * (2 * n + a + b - 2));
        let c2 = rat_int((2 * n + a + b - 1) * (a * a - b * b));
        let c3 = rat_int((2 * n + a + b - 1) * (2 * n + a + b) * (2 * n + a + b - 2));
        let c4 = rat_int(2 * (n + a - 1) * (n + b - 1) * (2 * n + a + b));
        let next = cur
            .mul(&x.scale(&c3).add(&UniPoly::constant(c2)))
            .sub(&prev.scale(&c4))
            .scale(&c1.recip());
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_k^{(0, d-2)}(1 - 2s)` as a polynomial in `s`, by the explicit sum
/// `sum_l (-1)^l C(k + l + d - 2, l) C(k, l) s^l`.
///
/// Substituting a barycentric coordinate for `s` yields the building block of
/// the non-conforming simplex and facet functions.
pub fn jacobi_shifted(k: usize, d: usize) -> UniPoly {
    let mut coeffs = Vec::with_capacity(k + 1);
    for l in 0..=k {
        let mut c = Rational::from_integer(binomial(k + l + d - 2, l) * binomial(k, l));
        if l % 2 == 1 {
            c = -c;
        }
        coeffs.push(c);
    }
    UniPoly::from_coeffs(coeffs)
}

/// `rho_k = C(k + d - 2, k)`, the magnitude of `P_k^{(0, d-2)}(-1)`.
pub fn rho(k: usize, d: usize) -> Rational {
    Rational::from_integer(binomial(k + d - 2, k))
}

/// Endpoint value `P_n^{(alpha, beta)}(1) = (alpha + 1)_n / n!`.
pub fn endpoint_plus(p: JacobiParams) -> Rational {
    Rational::new(
        pochhammer(p.alpha as i64 + 1, p.n),
        crate::num::factorial(p.n),
    )
}

/// Endpoint value `P_n^{(alpha, beta)}(-1) = (-1)^n (beta + 1)_n / n!`.
pub fn endpoint_minus(p: JacobiParams) -> Rational {
    let mut v = Rational::new(
        pochhammer(p.beta as i64 + 1, p.n),
        crate::num::factorial(p.n),
    );
    if p.n % 2 == 1 {
        v = -v;
    }
    v
}

/// Exact integral `int_{-1}^{1} q(x) (1-x)^alpha (1+x)^beta dx`.
pub fn weighted_integral_sym(q: &UniPoly, alpha: usize, beta: usize) -> Rational {
    let one = UniPoly::constant(Rational::one());
    let x = UniPoly::from_coeffs(alloc::vec![rat_int(0), rat_int(1)]);
    let mut w = UniPoly::constant(Rational::one());
    for _ in 0..alpha {
        w = w.mul(&one.sub(&x));
    }
    for _ in 0..beta {
        w = w.mul(&one.add(&x));
    }
    q.mul(&w).integrate_sym()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn degree_zero_is_one() {
        for (a, b) in [(0, 0), (0, 3), (1, 1), (5, 1)] {
            let p = jacobi_poly(JacobiParams::new(0, a, b));
            assert_eq!(p.coeffs(), &[rat_int(1)]);
        }
    }

    #[test]
    fn endpoints_match_shifted_factorials() {
        for n in 0..=8 {
            for alpha in 0..=6 {
                for beta in 0..=6 {
                    let p = jacobi_poly(JacobiParams::new(n, alpha, beta));
                    assert_eq!(
                        p.eval(&rat_int(1)),
                        endpoint_plus(JacobiParams::new(n, alpha, beta)),
                        "P_{n}^{{({alpha},{beta})}}(1)"
                    );
                    assert_eq!(
                        p.eval(&rat_int(-1)),
                        endpoint_minus(JacobiParams::new(n, alpha, beta)),
                        "P_{n}^{{({alpha},{beta})}}(-1)"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_dminus2_endpoint_examples() {
        // n=1, (0, d-2): value 1 at +1 and -(d-1) at -1
        for d in 2..=6 {
            let p = jacobi_poly(JacobiParams::new(1, 0, d - 2));
            assert_eq!(p.eval(&rat_int(1)), rat_int(1));
            assert_eq!(p.eval(&rat_int(-1)), rat_int(-(d as i64 - 1)));
        }
        // n=2, (0,1): value at -1 is rho_2 = C(3,2) = 3
        let p = jacobi_poly(JacobiParams::new(2, 0, 1));
        assert_eq!(p.eval(&rat_int(-1)), rat_int(3));
        assert_eq!(rho(2, 3), rat_int(3));
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(1, 3), rat_int(2));
        assert_eq!(rho(3, 2), rat_int(1));
        assert_eq!(rho(2, 4), rat_int(6));
    }

    #[test]
    fn orthogonality_against_lower_monomials() {
        for n in 0..=6usize {
            for (alpha, beta) in [(0, 0), (0, 2), (2, 0), (1, 1), (3, 1), (5, 1)] {
                let p = jacobi_poly(JacobiParams::new(n, alpha, beta));
                for m in 0..n {
                    let mut mono = alloc::vec![rat_int(0); m + 1];
                    mono[m] = rat_int(1);
                    let q = p.mul(&UniPoly::from_coeffs(mono));
                    assert_eq!(
                        weighted_integral_sym(&q, alpha, beta),
                        rat_int(0),
                        "n={n} m={m} ({alpha},{beta})"
                    );
                }
                // and not orthogonal to itself
                let sq = p.mul(&p);
                assert_ne!(weighted_integral_sym(&sq, alpha, beta), rat_int(0));
            }
        }
    }

    #[test]
    fn shifted_form_matches_recurrence() {
        // P_k^{(0,d-2)}(1-2s): substitute x = 1-2s into the recurrence output
        for d in 2..=5 {
            for k in 0..=6 {
                let direct = jacobi_shifted(k, d);
                let p = jacobi_poly(JacobiParams::new(k, 0, d - 2));
                // compose p with (1 - 2s)
                let s_sub = UniPoly::from_coeffs(alloc::vec![rat_int(1), rat_int(-2)]);
                let mut acc = UniPoly::zero();
                for (i, c) in p.coeffs().iter().enumerate().rev() {
                    let _ = i;
                    acc = acc.mul(&s_sub).add(&UniPoly::constant(c.clone()));
                }
                assert_eq!(acc, direct, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn shifted_k1_is_one_minus_ds() {
        for d in 2..=6 {
            let p = jacobi_shifted(1, d);
            assert_eq!(p.coeffs(), &[rat_int(1), rat_int(-(d as i64))]);
        }
    }

    #[test]
    fn gamma_normalization_footnote() {
        // int (1-x)(1+x) (P_nu^{(1,1)})^2 = 1/gamma_nu with
        // gamma_nu = (2nu+3)(nu+2) / (8(nu+1))
        for nu in 0..=5i64 {
            let p = jacobi_poly(JacobiParams::new(nu as usize, 1, 1));
            let gamma = rat((2 * nu + 3) * (nu + 2), 8 * (nu + 1));
            assert_eq!(
                weighted_integral_sym(&p.mul(&p), 1, 1),
                gamma.recip(),
                "nu={nu}"
            );
        }
    }
}
