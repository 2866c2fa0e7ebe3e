//! Parser for polynomial literals in global coordinates, e.g.
//! `1 - 2*x0 + 3/2*x0*x1^2`, and exact conversion to a piecewise
//! barycentric representation on a mesh.

use anyhow::{anyhow, bail, Result};
use crspace_core::complex::SimplicialComplex;
use crspace_core::fe::FeFunction;
use crspace_core::num::rat_int;
use crspace_core::poly::MultiPoly;
use num_traits::Zero;

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    nvars: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, nvars: usize) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
            nvars,
            src,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        self.skip_ws();
        let c = self.chars.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.bump();
                let t = self.term()?;
                -&t
            }
            _ => self.term()?,
        };
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                // implicit multiplication for forms like `2x0` or `x0 x1`
                Some(c) if c == 'x' || c == '(' => {
                    acc = &acc * &self.factor()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.bump();
            let e = self.unsigned()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn unsigned(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            bail!("expected a number at position {start} in '{}'", self.src);
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse()?)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                if self.bump() != Some(')') {
                    bail!("missing ')' in '{}'", self.src);
                }
                Ok(inner)
            }
            Some('-') => {
                self.bump();
                Ok(-&self.factor()?)
            }
            Some('x') => {
                self.bump();
                let i = self.unsigned()? as usize;
                if i >= self.nvars {
                    bail!("variable x{i} out of range (d = {})", self.nvars);
                }
                Ok(MultiPoly::var(self.nvars, i))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.unsigned()? as i64;
                if self.peek() == Some('/') {
                    self.bump();
                    let den = self.unsigned()? as i64;
                    if den == 0 {
                        bail!("zero denominator in '{}'", self.src);
                    }
                    Ok(MultiPoly::constant(
                        self.nvars,
                        crspace_core::num::rat(num, den),
                    ))
                } else {
                    Ok(MultiPoly::constant(self.nvars, rat_int(num)))
                }
            }
            other => bail!("unexpected token {other:?} in '{}'", self.src),
        }
    }
}

/// Parses a polynomial in the global coordinates `x0..x{d-1}`.
pub fn parse_poly(src: &str, dim: usize) -> Result<MultiPoly> {
    let mut p = Parser::new(src, dim);
    let out = p.expr()?;
    if p.peek().is_some() {
        return Err(anyhow!(
            "trailing characters at position {} in '{src}'",
            p.pos
        ));
    }
    Ok(out)
}

/// Converts a global polynomial into its exact piecewise barycentric form:
/// on each simplex, `x_i = sum_z coord_i(z) lambda_{K,z}`.
pub fn global_poly_to_fe(cx: &SimplicialComplex, p: &MultiPoly) -> FeFunction {
    let d = cx.dim();
    assert_eq!(p.nvars(), d);
    let mut parts = Vec::new();
    for k in 0..cx.mesh().num_simplices() {
        let s = cx.mesh().simplex(k);
        // linear barycentric form for every global coordinate
        let coord_forms: Vec<MultiPoly> = (0..d)
            .map(|i| {
                let mut f = MultiPoly::zero(d + 1);
                for (pos, &z) in s.iter().enumerate() {
                    let c = cx.mesh().vertex(z)[i].clone();
                    if !c.is_zero() {
                        f = &f + &MultiPoly::var(d + 1, pos).scale(&c);
                    }
                }
                f
            })
            .collect();
        let mut local = MultiPoly::zero(d + 1);
        for (exps, c) in p.terms() {
            let mut term = MultiPoly::constant(d + 1, c.clone());
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term = &term * &coord_forms[i];
                }
            }
            local = &local + &term;
        }
        parts.push((k, local));
    }
    FeFunction::from_parts(d, parts)
}

/// Evaluates a global polynomial at a float point (demo sampling).
pub fn eval_poly_f64(p: &MultiPoly, x: &[f64]) -> f64 {
    p.eval_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crspace_core::mesh;
    use crspace_core::num::rat;

    #[test]
    fn parses_arithmetic() {
        let p = parse_poly("1 - 2*x0 + 3/2*x0*x1^2", 2).unwrap();
        let v = p.eval(&[rat(1, 2), rat(2, 1)]);
        // 1 - 1 + 3/2 * 1/2 * 4 = 3
        assert_eq!(v, rat(3, 1));
        assert!(parse_poly("x5", 2).is_err());
        assert!(parse_poly("1 +", 2).is_err());
        assert!(parse_poly("(1", 2).is_err());
    }

    #[test]
    fn piecewise_form_is_exact() {
        let cx = SimplicialComplex::build(mesh::two_simplex(2).unwrap());
        let p = parse_poly("x0^2 - x1 + 1/3", 2).unwrap();
        let fe = global_poly_to_fe(&cx, &p);
        // evaluate both at barycenters
        for k in 0..2 {
            let bc = cx.mesh().barycenter(k);
            let lam = cx.mesh().barycentric_of_point(k, &bc);
            assert_eq!(fe.eval_bary(k, &lam), p.eval(&bc));
        }
        // continuity across the interior edge
        let interior = cx.faces(1).iter().find(|f| !f.on_boundary).unwrap().id;
        assert!(fe
            .jump(&cx, interior)
            .unwrap()
            .canonical_bary()
            .is_zero());
    }
}
