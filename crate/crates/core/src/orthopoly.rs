//! Orthogonal polynomials on the reference simplex, in barycentric form.
//!
//! For a face dimension `l >= 1` and a multi-index `alpha` in `N_0^l`, the
//! polynomial is the product over `j = 1..=l` of
//! `D_j^{alpha_j} P_{alpha_j}^{(s_j, 1)}(2 y_j / D_j - 1)` with
//! `D_j = y_0 + sum_{m=j..l} y_m` and
//! `s_j = 2 (sum_{m>j} alpha_m) + 2 (l - j) + 1`.
//! Each factor is a genuine polynomial of degree `alpha_j` in the `l + 1`
//! barycentric variables: homogenizing `P(t)` at `t = 2y/D - 1` against
//! `D^alpha` clears every denominator. The family is orthogonal on the
//! reference simplex for the weight `prod_i lambda_i`.

use crate::error::Error;
use crate::jacobi::{jacobi_poly, JacobiParams};
use crate::num::Rational;
use crate::poly::MultiPoly;
use alloc::vec::Vec;
use num_traits::One;

/// Index of a simplex orthogonal polynomial: face dimension and multi-index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthoIndex {
    pub ell: usize,
    pub alpha: Vec<usize>,
}

impl OrthoIndex {
    pub fn new(ell: usize, alpha: Vec<usize>) -> Self {
        assert_eq!(alpha.len(), ell, "multi-index arity must equal ell");
        OrthoIndex { ell, alpha }
    }
}

/// The Jacobi weight exponent `s_j` for position `j` (1-based) of `alpha`.
pub fn s_exponent(j: usize, ell: usize, alpha: &[usize]) -> usize {
    let tail: usize = alpha[j..].iter().sum();
    2 * tail + 2 * (ell - j) + 1
}

/// `D^deg * P(2 y / D - 1)` for a univariate `P` of degree `deg`: the
/// homogenized Jacobi factor, a polynomial in the barycentric variables.
fn homogenized_factor(p: &crate::poly::UniPoly, deg: usize, y: &MultiPoly, d_lin: &MultiPoly) -> MultiPoly {
    let n = y.nvars();
    let two_y_minus_d = &y.scale(&crate::num::rat_int(2)) - d_lin;
    let mut acc = MultiPoly::zero(n);
    for (i, c) in p.coeffs().iter().enumerate() {
        let term = &two_y_minus_d.pow(i as u32) * &d_lin.pow((deg - i) as u32);
        acc = &acc + &term.scale(c);
    }
    acc
}

/// The simplex orthogonal polynomial `P_alpha` on the reference `l`-simplex,
/// as a polynomial in the `l + 1` barycentric variables.
pub fn simplex_orthopoly(idx: &OrthoIndex) -> Result<MultiPoly, Error> {
    let ell = idx.ell;
    if ell == 0 {
        return Err(Error::BadFaceDimension {
            expected: alloc::string::String::from("ell >= 1"),
            got: 0,
        });
    }
    let nvars = ell + 1;
    let mut acc = MultiPoly::one(nvars);
    for j in 1..=ell {
        let aj = idx.alpha[j - 1];
        let sj = s_exponent(j, ell, &idx.alpha);
        let pj = jacobi_poly(JacobiParams::new(aj, sj, 1));
        // D_j = y_0 + y_j + y_{j+1} + ... + y_l
        let mut d_lin = MultiPoly::var(nvars, 0);
        for m in j..=ell {
            d_lin = &d_lin + &MultiPoly::var(nvars, m);
        }
        let y_j = MultiPoly::var(nvars, j);
        acc = &acc * &homogenized_factor(&pj, aj, &y_j, &d_lin);
    }
    Ok(acc)
}

/// The orthogonality weight `prod_{i=0..l} lambda_i` on the reference
/// `l`-simplex.
pub fn simplex_weight(ell: usize) -> MultiPoly {
    let nvars = ell + 1;
    let mut w = MultiPoly::one(nvars);
    for i in 0..nvars {
        w = &w * &MultiPoly::var(nvars, i);
    }
    w
}

/// Weighted inner product `(u, v)` on the reference `l`-simplex:
/// `int W u v` with `W = prod lambda_i`.
pub fn weighted_inner(ell: usize, u: &MultiPoly, v: &MultiPoly) -> Rational {
    let w = simplex_weight(ell);
    let integrand = &(&w * u) * v;
    crate::integrate::integral_over_simplex(
        &integrand,
        &Rational::new(num_bigint::BigInt::one(), crate::num::factorial(ell)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::jacobi_poly;
    use crate::num::{multi_indices, rat_int};

    #[test]
    fn rejects_vertices() {
        assert!(simplex_orthopoly(&OrthoIndex::new(0, alloc::vec![])).is_err());
    }

    #[test]
    fn ell1_closed_form() {
        // P_alpha(x) = P_alpha^{(1,1)}(2 lambda_1 - 1)
        for a in 0..=4usize {
            let p = simplex_orthopoly(&OrthoIndex::new(1, alloc::vec![a])).unwrap();
            let jac = jacobi_poly(JacobiParams::new(a, 1, 1));
            let arg = &MultiPoly::var(2, 1).scale(&rat_int(2)) - &MultiPoly::one(2);
            let expect = jac.compose_multi(&arg);
            assert!(p.bary_eq(&expect), "alpha = {a}");
        }
    }

    #[test]
    fn ell2_closed_form() {
        // P_(a1,a2) = P_{a1}^{(2a2+3,1)}(2l1-1) (1-l1)^{a2} P_{a2}^{(1,1)}(2l2/(1-l1)-1)
        // expanded to a polynomial; check with cleared denominators:
        // (1-l1)^{a2} P_{a2}^{(1,1)}(2l2/(1-l1)-1) is the homogenized factor
        // at D = 1 - l1 = l0 + l2 (modulo the barycentric relation).
        let n = 3;
        for a1 in 0..=2usize {
            for a2 in 0..=2usize {
                let p = simplex_orthopoly(&OrthoIndex::new(2, alloc::vec![a1, a2])).unwrap();

                let l1 = MultiPoly::var(n, 1);
                let l2 = MultiPoly::var(n, 2);
                let one = MultiPoly::one(n);
                let d2 = &one - &l1; // = l0 + l2 on the simplex

                let jac1 = jacobi_poly(JacobiParams::new(a1, 2 * a2 + 3, 1));
                let f1 = jac1.compose_multi(&(&l1.scale(&rat_int(2)) - &one));

                let jac2 = jacobi_poly(JacobiParams::new(a2, 1, 1));
                let mut f2 = MultiPoly::zero(n);
                for (i, c) in jac2.coeffs().iter().enumerate() {
                    let term = &(&l2.scale(&rat_int(2)) - &d2).pow(i as u32)
                        * &d2.pow((a2 - i) as u32);
                    f2 = &f2 + &term.scale(c);
                }
                let expect = &f1 * &f2;
                assert!(p.bary_eq(&expect), "alpha = ({a1},{a2})");
            }
        }
    }

    #[test]
    fn orthogonality_small() {
        for ell in 1..=2usize {
            let idxs = multi_indices(ell, 3);
            for a in &idxs {
                let pa = simplex_orthopoly(&OrthoIndex::new(ell, a.clone())).unwrap();
                for b in &idxs {
                    let pb = simplex_orthopoly(&OrthoIndex::new(ell, b.clone())).unwrap();
                    let ip = weighted_inner(ell, &pa, &pb);
                    if a == b {
                        assert_ne!(ip, rat_int(0), "ell={ell} a={a:?}");
                    } else {
                        assert_eq!(ip, rat_int(0), "ell={ell} a={a:?} b={b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_pair_example() {
        // (P_(1,0), P_(0,1)) on the reference triangle is exactly zero
        let p10 = simplex_orthopoly(&OrthoIndex::new(2, alloc::vec![1, 0])).unwrap();
        let p01 = simplex_orthopoly(&OrthoIndex::new(2, alloc::vec![0, 1])).unwrap();
        assert_eq!(weighted_inner(2, &p10, &p01), rat_int(0));
    }
}
