//! Sparse multivariate polynomials over the rationals.
//!
//! `MultiPoly` is the workhorse for everything written in barycentric
//! variables: a polynomial in `nvars` variables stored as a map from exponent
//! vectors to nonzero rational coefficients. On a face of dimension `l` the
//! variables are the `l + 1` barycentric coordinates, ordered by ascending
//! global vertex id of the face.
//!
//! Barycentric representations are only unique modulo the relation
//! `sum_i lambda_i = 1`. Equality testing and degree computation therefore go
//! through [`MultiPoly::canonical_bary`], which eliminates variable 0 via
//! `lambda_0 = 1 - sum_{i>=1} lambda_i`; integration works directly on the
//! stored (symmetric) form, which is exact for any representative.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::num::{render, Rational};

/// Sparse polynomial in a fixed number of variables with rational
/// coefficients. No zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(alloc::vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The monomial `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut exps = alloc::vec![0u32; nvars];
        exps[i] = 1;
        let mut p = MultiPoly::zero(nvars);
        p.terms.insert(exps, Rational::one());
        p
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = MultiPoly::zero(nvars);
        for (e, c) in it {
            p.add_term(&e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree of the stored representation (0 for the zero polynomial).
    pub fn stored_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: &[u32], c: Rational) {
        assert_eq!(exps.len(), self.nvars, "exponent arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(exps) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(exps);
                }
            }
            None => {
                self.terms.insert(exps.to_vec(), c);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = MultiPoly::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at a point given by one rational per variable.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(exps.iter()) {
                for _ in 0..e {
                    term *= x;
                }
            }
            acc += term;
        }
        acc
    }

    /// Binary64 evaluation, for tabulation only.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        let mut acc = 0.0;
        for (exps, c) in &self.terms {
            let mut term = c.to_f64().unwrap_or(f64::NAN);
            for (x, &e) in point.iter().zip(exps.iter()) {
                // f64::powi lives in std, not core
                for _ in 0..e {
                    term *= x;
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitutes polynomial `q` for variable `i`. `q` must have the same
    /// arity as `self`.
    pub fn substitute_var(&self, i: usize, q: &MultiPoly) -> MultiPoly {
        assert!(i < self.nvars);
        assert_eq!(q.nvars, self.nvars);
        // group terms by the exponent of variable i, so each power of q is
        // computed once
        let mut by_exp: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (exps, c) in &self.terms {
            let e = exps[i];
            let mut rest = exps.clone();
            rest[i] = 0;
            by_exp
                .entry(e)
                .or_insert_with(|| MultiPoly::zero(self.nvars))
                .add_term(&rest, c.clone());
        }
        let mut out = MultiPoly::zero(self.nvars);
        let mut qpow = MultiPoly::one(self.nvars);
        let mut cur = 0u32;
        for (e, part) in by_exp {
            while cur < e {
                qpow = &qpow * q;
                cur += 1;
            }
            out = &out + &(&part * &qpow);
        }
        out
    }

    /// Remaps variables into a new arity. `map[i] = Some(j)` renames variable
    /// `i` to `j`; `map[i] = None` substitutes zero for variable `i` (killing
    /// every term that uses it). This is exactly the trace operation onto a
    /// sub-face in barycentric coordinates.
    pub fn remap_vars(&self, map: &[Option<usize>], new_nvars: usize) -> MultiPoly {
        assert_eq!(map.len(), self.nvars);
        let mut out = MultiPoly::zero(new_nvars);
        'terms: for (exps, c) in &self.terms {
            let mut new_exps = alloc::vec![0u32; new_nvars];
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => new_exps[j] += e,
                    None => continue 'terms,
                }
            }
            out.add_term(&new_exps, c.clone());
        }
        out
    }

    /// Canonical form modulo the barycentric relation: eliminates variable 0
    /// via `x_0 = 1 - sum_{i>=1} x_i`. Two representations of the same
    /// function on the simplex have equal canonical forms.
    pub fn canonical_bary(&self) -> MultiPoly {
        let n = self.nvars;
        let mut repl = MultiPoly::one(n);
        for i in 1..n {
            repl = &repl - &MultiPoly::var(n, i);
        }
        self.substitute_var(0, &repl)
    }

    /// Degree of the underlying function on the simplex (degree of the
    /// canonical form).
    pub fn bary_degree(&self) -> usize {
        self.canonical_bary().stored_degree()
    }

    /// Equality as functions on the simplex.
    pub fn bary_eq(&self, other: &MultiPoly) -> bool {
        assert_eq!(self.nvars, other.nvars);
        (self - other).canonical_bary().is_zero()
    }

    /// Renders as text with variables `<prefix>0, <prefix>1, ...`, terms in
    /// the deterministic stored order.
    pub fn render_with(&self, prefix: char) -> String {
        use alloc::format;
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut out = String::new();
        for (exps, c) in &self.terms {
            let mono: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("{prefix}{i}")
                    } else {
                        format!("{prefix}{i}^{e}")
                    }
                })
                .collect();
            let coef = render(c);
            let piece = if mono.is_empty() {
                coef
            } else if c.is_one() {
                mono.join("*")
            } else if (-c.clone()).is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", coef, mono.join("*"))
            };
            if out.is_empty() {
                out = piece;
            } else if let Some(stripped) = piece.strip_prefix('-') {
                out = format!("{out} - {stripped}");
            } else {
                out = format!("{out} + {piece}");
            }
        }
        out
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.nvars, self.render_with('x'))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        let mut buf = alloc::vec![0u32; self.nvars];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                for i in 0..self.nvars {
                    buf[i] = ea[i] + eb[i];
                }
                out.add_term(&buf, ca * cb);
            }
        }
        out
    }
}

/// Dense univariate polynomial, coefficients in ascending degree order.
/// No trailing zero coefficient is stored.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = UniPoly { coeffs: alloc::vec![c] };
        p.trim();
        p
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, rhs: &UniPoly) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + rhs.coeff(i));
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &UniPoly) -> Self {
        self.add(&rhs.scale(&-Rational::one()))
    }

    pub fn mul(&self, rhs: &UniPoly) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = alloc::vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    /// Exact integral over `[-1, 1]`.
    pub fn integrate_sym(&self) -> Rational {
        let mut acc = Rational::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j % 2 == 0 {
                acc += c * crate::num::rat(2, (j + 1) as i64);
            }
        }
        acc
    }

    /// Composes with a multivariate argument: returns `self(arg)` by Horner
    /// evaluation in the polynomial ring.
    pub fn compose_multi(&self, arg: &MultiPoly) -> MultiPoly {
        let n = arg.nvars();
        let mut acc = MultiPoly::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * arg) + &MultiPoly::constant(n, c.clone());
        }
        acc
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| alloc::format!("{}*x^{}", render(c), i))
            .collect();
        write!(f, "UniPoly({})", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};

    fn lam(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    #[test]
    fn arithmetic_roundtrip() {
        let p = &lam(3, 0) + &lam(3, 1).scale(&rat(2, 1));
        let q = &lam(3, 2) * &lam(3, 2);
        assert_eq!(&(&p + &q) - &q, p);
        assert_eq!(&p * &q, &q * &p);
    }

    #[test]
    fn canonicalization() {
        // 1 - l1 - l2 == l0 modulo the relation on a triangle
        let n = 3;
        let sum_relation = &(&MultiPoly::one(n) - &lam(n, 1)) - &lam(n, 2);
        assert!(sum_relation.bary_eq(&lam(n, 0)));
        assert!(!sum_relation.bary_eq(&lam(n, 1)));
        // canonicalization is idempotent
        let c = sum_relation.canonical_bary();
        assert_eq!(c.canonical_bary(), c);
        // degree drops: l0 + l1 + l2 is the constant 1
        let s = &(&lam(n, 0) + &lam(n, 1)) + &lam(n, 2);
        assert_eq!(s.bary_degree(), 0);
        assert_eq!(s.stored_degree(), 1);
    }

    #[test]
    fn substitution_and_remap() {
        let n = 2;
        // p = x0^2 x1, substitute x0 <- x1 + 1
        let p = &(&lam(n, 0) * &lam(n, 0)) * &lam(n, 1);
        let repl = &lam(n, 1) + &MultiPoly::one(n);
        let q = p.substitute_var(0, &repl);
        // (x1+1)^2 x1 = x1^3 + 2 x1^2 + x1
        let x1 = lam(n, 1);
        let expect = &(&(&x1 * &x1) * &x1) + &(&(&x1 * &x1).scale(&rat_int(2)) + &x1);
        assert_eq!(q, expect);

        // trace: drop var 1, rename var 0 -> var 0 in a 1-var poly
        let tr = p.remap_vars(&[Some(0), None], 1);
        assert!(tr.is_zero());
        let p2 = &lam(n, 0) + &MultiPoly::one(n);
        let tr2 = p2.remap_vars(&[Some(0), None], 1);
        assert_eq!(tr2.render_with('t'), "1 + t0");
    }

    #[test]
    fn eval_matches_structure() {
        let n = 3;
        let p = &(&lam(n, 0) * &lam(n, 1)).scale(&rat(3, 2)) + &MultiPoly::one(n);
        let v = p.eval(&[rat(1, 2), rat(1, 3), rat(1, 6)]);
        assert_eq!(v, rat(5, 4));
        let vf = p.eval_f64(&[0.5, 1.0 / 3.0, 1.0 / 6.0]);
        assert!((vf - 1.25).abs() < 1e-14);
    }

    #[test]
    fn unipoly_basics() {
        // (1 + x)^2 = 1 + 2x + x^2
        let p = UniPoly::from_coeffs(alloc::vec![rat_int(1), rat_int(1)]);
        let sq = p.mul(&p);
        assert_eq!(sq.coeffs(), &[rat_int(1), rat_int(2), rat_int(1)]);
        assert_eq!(sq.eval(&rat_int(2)), rat_int(9));
        // int_{-1}^{1} (1 + 2x + x^2) dx = 2 + 0 + 2/3
        assert_eq!(sq.integrate_sym(), rat(8, 3));
        // compose into multivariate
        let arg = &MultiPoly::var(2, 0) + &MultiPoly::var(2, 1);
        let comp = sq.compose_multi(&arg);
        assert_eq!(comp.eval(&[rat_int(1), rat_int(1)]), rat_int(9));
    }
}
