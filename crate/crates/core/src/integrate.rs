//! Exact integration of barycentric polynomials over simplices.
//!
//! The single identity doing all the work: on an `l`-simplex `tau` of volume
//! `|tau|`, the monomial in barycentric coordinates integrates to
//! `int prod lambda_i^{b_i} = l! |tau| prod(b_i!) / (|b| + l)!`.
//! The identity holds termwise for any representation of a polynomial, so no
//! canonicalization is needed before integrating.

use crate::num::{factorial, Rational};
use crate::poly::MultiPoly;
use num_bigint::BigInt;
use num_traits::Zero;

/// Exact integral of `p` over an `l`-simplex of the given volume, where `p`
/// is written in the `l + 1` barycentric variables of the simplex.
pub fn integral_over_simplex(p: &MultiPoly, volume: &Rational) -> Rational {
    let ell = p.nvars() - 1;
    let lfac = factorial(ell);
    let mut acc = Rational::zero();
    for (exps, c) in p.terms() {
        let total: usize = exps.iter().map(|&e| e as usize).sum();
        let mut num = lfac.clone();
        for &e in exps {
            num *= factorial(e as usize);
        }
        acc += c * Rational::new(num, factorial(total + ell));
    }
    acc * volume
}

/// Integral over the simplex normalized to unit measure, i.e. the mean value
/// times 1. Facet pairings use this form so that no (possibly irrational)
/// facet measure ever enters the arithmetic; the true integral is `|F|` times
/// this value.
pub fn integral_normalized(p: &MultiPoly) -> Rational {
    integral_over_simplex(p, &Rational::new(BigInt::from(1), BigInt::from(1)))
}

/// `L^2` product `int_tau p q` over a simplex of the given volume.
pub fn l2_product(p: &MultiPoly, q: &MultiPoly, volume: &Rational) -> Rational {
    integral_over_simplex(&(p * q), volume)
}

/// Measure-normalized `L^2` pairing `(1/|tau|) int_tau p q`.
pub fn l2_normalized(p: &MultiPoly, q: &MultiPoly) -> Rational {
    integral_normalized(&(p * q))
}

/// Integrates the trailing affine variables of a monomial over the simplex
/// slice `{x_{from+1}, ..., x_m >= 0, sum <= 1 - t}` as a function of the
/// leading variables, by repeated exact univariate integration with
/// polynomial bounds. Variables here are affine simplex coordinates
/// `x_1..x_m` (poly arity `m`), not barycentric.
///
/// Used to reproduce the facet-moment reduction `G(x_1)` independently of
/// the closed-form factorial identity.
pub fn integrate_out_trailing(p: &MultiPoly, keep: usize) -> MultiPoly {
    let m = p.nvars();
    let mut cur = p.clone();
    for var in (keep..m).rev() {
        cur = integrate_var_over_slice(&cur, var);
    }
    cur
}

/// Integrates variable `var` from 0 to `1 - x_1 - ... - x_{var-1}` (affine
/// coordinates; earlier variables only).
fn integrate_var_over_slice(p: &MultiPoly, var: usize) -> MultiPoly {
    let n = p.nvars();
    // antiderivative in var: x^e -> x^{e+1}/(e+1)
    let mut anti = MultiPoly::zero(n);
    for (exps, c) in p.terms() {
        let mut e = exps.clone();
        e[var] += 1;
        anti.add_term(&e, c * Rational::new(BigInt::from(1), BigInt::from(e[var])));
    }
    // upper bound 1 - x_0 - ... - x_{var-1}
    let mut upper = MultiPoly::one(n);
    for i in 0..var {
        upper = &upper - &MultiPoly::var(n, i);
    }
    // lower bound 0 contributes nothing since the antiderivative has no
    // var-free terms
    anti.substitute_var(var, &upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};

    #[test]
    fn constants_scale_with_volume() {
        // p = 1 over the reference triangle, volume 1/2
        let p = MultiPoly::one(3);
        assert_eq!(integral_over_simplex(&p, &rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn bary_product_reference_triangle() {
        // p = l0 * l1 over the reference triangle: 2! * 1/2 * 1*1/4! = 1/24
        let p = &MultiPoly::var(3, 0) * &MultiPoly::var(3, 1);
        assert_eq!(integral_over_simplex(&p, &rat(1, 2)), rat(1, 24));
    }

    #[test]
    fn agrees_with_iterated_integral_oracle() {
        // independent oracle: write the barycentric monomial on the reference
        // triangle in affine coordinates (l0 = 1 - x - y, l1 = x, l2 = y) and
        // integrate by iterated univariate integration.
        for (b0, b1, b2) in [(0, 0, 0), (1, 1, 0), (2, 0, 1), (1, 2, 3), (0, 3, 3)] {
            let p = {
                let mut q = MultiPoly::one(3);
                for _ in 0..b0 {
                    q = &q * &MultiPoly::var(3, 0);
                }
                for _ in 0..b1 {
                    q = &q * &MultiPoly::var(3, 1);
                }
                for _ in 0..b2 {
                    q = &q * &MultiPoly::var(3, 2);
                }
                q
            };
            // affine form in 2 variables x, y
            let n = 2;
            let x = MultiPoly::var(n, 0);
            let y = MultiPoly::var(n, 1);
            let l0 = &(&MultiPoly::one(n) - &x) - &y;
            let mut affine = MultiPoly::one(n);
            for _ in 0..b0 {
                affine = &affine * &l0;
            }
            for _ in 0..b1 {
                affine = &affine * &x;
            }
            for _ in 0..b2 {
                affine = &affine * &y;
            }
            let reduced = integrate_out_trailing(&affine, 0);
            assert_eq!(reduced.nvars(), 2);
            let oracle = reduced.eval(&[rat_int(0), rat_int(0)]);
            assert_eq!(
                integral_over_simplex(&p, &rat(1, 2)),
                oracle,
                "monomial ({b0},{b1},{b2})"
            );
        }
    }

    #[test]
    fn trailing_integration_slice() {
        // int_0^{1-x} 1 dy = 1 - x
        let p = MultiPoly::one(2);
        let g = integrate_out_trailing(&p, 1);
        let expect = &MultiPoly::one(2) - &MultiPoly::var(2, 0);
        assert_eq!(g, expect);
    }
}
