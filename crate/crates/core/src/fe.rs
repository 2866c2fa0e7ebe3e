//! Piecewise polynomial functions over a mesh.
//!
//! An `FeFunction` carries one barycentric polynomial per simplex of its
//! support; simplices absent from the map are exactly zero. No continuity is
//! implied by the data structure: traces and jumps are computed on demand and
//! checked where a construction claims them.

use crate::complex::SimplicialComplex;
use crate::error::Error;
use crate::num::Rational;
use crate::poly::MultiPoly;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use num_traits::Zero;

/// A member of `P_k(T)`: per-simplex polynomials in the simplex's `d + 1`
/// barycentric variables (ascending vertex order).
#[derive(Debug, Clone)]
pub struct FeFunction {
    dim: usize,
    parts: BTreeMap<usize, MultiPoly>,
}

impl FeFunction {
    pub fn zero(dim: usize) -> Self {
        FeFunction {
            dim,
            parts: BTreeMap::new(),
        }
    }

    pub fn from_parts(dim: usize, parts: impl IntoIterator<Item = (usize, MultiPoly)>) -> Self {
        let mut f = FeFunction::zero(dim);
        for (k, p) in parts {
            f.set_part(k, p);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Simplex ids of the (structural) support, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts.keys().copied()
    }

    pub fn support_set(&self) -> Vec<usize> {
        self.parts.keys().copied().collect()
    }

    /// The polynomial on simplex `k`; exact zero when absent.
    pub fn part(&self, k: usize) -> MultiPoly {
        self.parts
            .get(&k)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(self.dim + 1))
    }

    pub fn part_ref(&self, k: usize) -> Option<&MultiPoly> {
        self.parts.get(&k)
    }

    /// Sets the part on a simplex, dropping it if exactly zero as a function.
    pub fn set_part(&mut self, k: usize, p: MultiPoly) {
        assert_eq!(p.nvars(), self.dim + 1, "part arity mismatch");
        if p.canonical_bary().is_zero() {
            self.parts.remove(&k);
        } else {
            self.parts.insert(k, p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn add(&self, rhs: &FeFunction) -> FeFunction {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (&k, p) in &rhs.parts {
            let sum = &out.part(k) + p;
            out.set_part(k, sum);
        }
        out
    }

    pub fn sub(&self, rhs: &FeFunction) -> FeFunction {
        self.add(&rhs.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, c: &Rational) -> FeFunction {
        if c.is_zero() {
            return FeFunction::zero(self.dim);
        }
        FeFunction {
            dim: self.dim,
            parts: self
                .parts
                .iter()
                .map(|(&k, p)| (k, p.scale(c)))
                .collect(),
        }
    }

    /// Equality as piecewise functions (canonical per-simplex comparison).
    pub fn fe_eq(&self, rhs: &FeFunction) -> bool {
        self.sub(rhs).is_zero()
    }

    /// Max polynomial degree over the support.
    pub fn degree(&self) -> usize {
        self.parts.values().map(|p| p.bary_degree()).max().unwrap_or(0)
    }

    /// Trace on a face from the side of simplex `k`, in the face's
    /// barycentric variables.
    pub fn trace(&self, cx: &SimplicialComplex, k: usize, ell: usize, face_id: usize) -> MultiPoly {
        let map = cx.trace_map(k, ell, face_id);
        self.part(k).remap_vars(&map, ell + 1)
    }

    /// Jump across an interior facet: trace from the lower adjacent simplex
    /// id minus trace from the higher.
    pub fn jump(&self, cx: &SimplicialComplex, facet_id: usize) -> Result<MultiPoly, Error> {
        let d = cx.dim();
        let facet = cx.face(d - 1, facet_id);
        if facet.on_boundary {
            return Err(Error::UnknownEntity(format!(
                "facet {facet_id} is on the boundary; jumps need an interior facet"
            )));
        }
        let (k0, k1) = (facet.patch[0], facet.patch[1]);
        let t0 = self.trace(cx, k0, d - 1, facet_id);
        let t1 = self.trace(cx, k1, d - 1, facet_id);
        Ok(&t0 - &t1)
    }

    /// Value at mesh vertex `z` as seen from simplex `k` (which must contain
    /// `z`).
    pub fn vertex_value(&self, cx: &SimplicialComplex, k: usize, z: usize) -> Rational {
        let pos = cx
            .vertex_position(k, z)
            .expect("vertex must belong to the simplex");
        let mut point = alloc::vec![Rational::zero(); self.dim + 1];
        point[pos] = Rational::from_integer(1.into());
        self.part(k).eval(&point)
    }

    /// Evaluates at barycentric coordinates within simplex `k`.
    pub fn eval_bary(&self, k: usize, lambda: &[Rational]) -> Rational {
        self.part(k).eval(lambda)
    }

    /// Binary64 evaluation at a euclidean point (tabulation only): locates
    /// the first simplex containing the point exactly, then evaluates.
    pub fn eval_point_f64(&self, cx: &SimplicialComplex, p: &crate::mesh::Point) -> Option<f64> {
        use num_traits::{Signed, ToPrimitive};
        for k in 0..cx.mesh().num_simplices() {
            let lam = cx.mesh().barycentric_of_point(k, p);
            if lam.iter().all(|c| !c.is_negative()) {
                let lf: Vec<f64> = lam.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
                return Some(self.part(k).eval_f64(&lf));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh;
    use crate::num::{rat, rat_int};

    #[test]
    fn zero_parts_are_dropped() {
        let mut f = FeFunction::zero(2);
        // l0 + l1 + l2 - 1 is the zero function on the simplex
        let n = 3;
        let mut p = MultiPoly::constant(n, rat_int(-1));
        for i in 0..n {
            p = &p + &MultiPoly::var(n, i);
        }
        f.set_part(0, p);
        assert!(f.is_zero());
    }

    #[test]
    fn jump_of_continuous_function_vanishes() {
        let m = mesh::two_simplex(2).unwrap();
        let cx = SimplicialComplex::build(m);
        // the global affine function x + y expressed per simplex:
        // on each K, x + y = sum_z (x_z + y_z) lambda_{K,z}
        let mut f = FeFunction::zero(2);
        for k in 0..2 {
            let s = cx.mesh().simplex(k).to_vec();
            let mut p = MultiPoly::zero(3);
            for (pos, &z) in s.iter().enumerate() {
                let v = cx.mesh().vertex(z);
                let c = &v[0] + &v[1];
                p = &p + &MultiPoly::var(3, pos).scale(&c);
            }
            f.set_part(k, p);
        }
        let interior = cx.faces(1).iter().find(|f| !f.on_boundary).unwrap().id;
        let j = f.jump(&cx, interior).unwrap();
        assert!(j.canonical_bary().is_zero());
        // boundary facet rejected
        let boundary = cx.faces(1).iter().find(|f| f.on_boundary).unwrap().id;
        assert!(f.jump(&cx, boundary).is_err());
    }

    #[test]
    fn vertex_values_and_trace() {
        let m = mesh::two_simplex(2).unwrap();
        let cx = SimplicialComplex::build(m);
        // lambda of vertex 1 on simplex 0
        let mut f = FeFunction::zero(2);
        f.set_part(0, cx.lambda(0, 1).unwrap());
        assert_eq!(f.vertex_value(&cx, 0, 1), rat_int(1));
        assert_eq!(f.vertex_value(&cx, 0, 0), rat_int(0));
        // trace on the interior edge {1,2}: lambda_{K,1} restricts to the
        // edge's own barycentric coordinate of vertex 1
        let interior = cx.faces(1).iter().find(|f| !f.on_boundary).unwrap().id;
        let t = f.trace(&cx, 0, 1, interior);
        assert_eq!(t.eval(&[rat_int(1), rat_int(0)]), rat_int(1));
        assert_eq!(t.eval(&[rat_int(0), rat_int(1)]), rat_int(0));
        assert_eq!(t.eval(&[rat(1, 2), rat(1, 2)]), rat(1, 2));
    }
}
