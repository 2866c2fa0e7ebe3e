//! Construction of the Crouzeix-Raviart basis: hat functions, face bubbles,
//! conforming face functions (bubble times simplex orthogonal polynomial),
//! the non-conforming simplex/facet functions built from Jacobi polynomials,
//! the auxiliary sums `psi_k^z` and `Psi_k`, and the assembled basis sets
//! with their exact dimension accounting.

use crate::complex::SimplicialComplex;
use crate::error::Error;
use crate::fe::FeFunction;
use crate::integrate::{l2_normalized, l2_product};
use crate::jacobi::jacobi_shifted;
use crate::linalg::{solve, Matrix};
use crate::num::{binomial, rat_int, Rational};
use crate::orthopoly::{simplex_orthopoly, OrthoIndex};
use crate::poly::MultiPoly;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::{ToPrimitive, Zero};

/// Boundary-condition variant of an assembled space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bc {
    Full,
    Zero,
}

impl Bc {
    pub fn as_str(self) -> &'static str {
        match self {
            Bc::Full => "full",
            Bc::Zero => "zero",
        }
    }
}

/// Identity of a basis member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BasisTag {
    /// Hat function of a global vertex id (even-order bases only).
    Vertex(usize),
    /// Conforming face function `B_{tau, alpha}`.
    Face {
        ell: usize,
        face: usize,
        alpha: Vec<usize>,
    },
    /// Non-conforming facet function `B_k^{CR,F}` (odd orders).
    NcFacet(usize),
    /// Non-conforming simplex function `B_k^{CR,K}` (even orders).
    NcSimplex(usize),
}

impl BasisTag {
    pub fn render(&self) -> String {
        match self {
            BasisTag::Vertex(z) => format!("vertex:{z}"),
            BasisTag::Face { ell, face, alpha } => {
                let a: Vec<String> = alpha.iter().map(|x| format!("{x}")).collect();
                format!("face:{ell}:{face}:[{}]", a.join(","))
            }
            BasisTag::NcFacet(f) => format!("nc-facet:{f}"),
            BasisTag::NcSimplex(k) => format!("nc-simplex:{k}"),
        }
    }
}

/// The hat function of vertex `z`: continuous, piecewise affine, Kronecker
/// on the mesh vertices, supported on the vertex patch.
pub fn hat_function(cx: &SimplicialComplex, z: usize) -> FeFunction {
    let d = cx.dim();
    let vertex_face = cx
        .face_id(0, &[z])
        .expect("vertex id out of range");
    let patch = &cx.face(0, vertex_face).patch;
    FeFunction::from_parts(
        d,
        patch.iter().map(|&k| {
            let pos = cx.vertex_position(k, z).unwrap();
            (k, MultiPoly::var(d + 1, pos))
        }),
    )
}

/// The face bubble `W_tau`: product of the hat functions of the face's
/// vertices. Requires `ell >= 1`.
pub fn face_bubble(cx: &SimplicialComplex, ell: usize, face_id: usize) -> Result<FeFunction, Error> {
    if ell == 0 {
        return Err(Error::BadFaceDimension {
            expected: String::from("ell >= 1 for face bubbles"),
            got: 0,
        });
    }
    let d = cx.dim();
    let face = cx.face(ell, face_id);
    Ok(FeFunction::from_parts(
        d,
        face.patch.iter().map(|&k| {
            let mut p = MultiPoly::one(d + 1);
            for &z in &face.vertices {
                let pos = cx.vertex_position(k, z).unwrap();
                p = &p * &MultiPoly::var(d + 1, pos);
            }
            (k, p)
        }),
    ))
}

/// The conforming face function `B_{tau, alpha} = W_tau P_alpha(hat
/// functions of tau's numbered vertices)`, for `|alpha| <= k - (ell + 1)`.
pub fn conforming_face_fn(
    cx: &SimplicialComplex,
    k: usize,
    ell: usize,
    face_id: usize,
    alpha: &[usize],
) -> Result<FeFunction, Error> {
    if ell == 0 {
        // by definition the ell = 0 member is the hat function itself
        let z = cx.face(0, face_id).vertices[0];
        return Ok(hat_function(cx, z));
    }
    let total: usize = alpha.iter().sum();
    if ell + 1 + total > k {
        return Err(Error::UnknownEntity(format!(
            "multi-index {alpha:?} too large for order {k} on an {ell}-face"
        )));
    }
    let d = cx.dim();
    let face = cx.face(ell, face_id);
    let ortho = simplex_orthopoly(&OrthoIndex::new(ell, alpha.to_vec()))?;
    Ok(FeFunction::from_parts(
        d,
        face.patch.iter().map(|&k_id| {
            // remap the ell+1 orthopoly variables onto K's barycentric slots
            let map: Vec<Option<usize>> = face
                .vertices
                .iter()
                .map(|&z| cx.vertex_position(k_id, z))
                .collect();
            let ortho_on_k = ortho.remap_vars(&map, d + 1);
            let mut bubble = MultiPoly::one(d + 1);
            for m in map.iter() {
                bubble = &bubble * &MultiPoly::var(d + 1, m.unwrap());
            }
            (k_id, &bubble * &ortho_on_k)
        }),
    ))
}

/// The trace of `B_{tau, alpha}` on its own face `tau`, in `tau`'s
/// barycentric variables: `(prod of all coordinates) * P_alpha`.
pub fn conforming_trace_on_own_face(ell: usize, alpha: &[usize]) -> Result<MultiPoly, Error> {
    let ortho = simplex_orthopoly(&OrthoIndex::new(ell, alpha.to_vec()))?;
    let mut bubble = MultiPoly::one(ell + 1);
    for i in 0..=ell {
        bubble = &bubble * &MultiPoly::var(ell + 1, i);
    }
    Ok(&bubble * &ortho)
}

/// The non-conforming simplex function `B_k^{CR,K}`: supported on `K`,
/// `(1/d) (-1 + sum_z P_k^{(0,d-2)}(1 - 2 lambda_{K,z}))`. Identically zero
/// for `k = 1`.
pub fn nc_simplex_fn(cx: &SimplicialComplex, k: usize, simplex: usize) -> FeFunction {
    let d = cx.dim();
    let shifted = jacobi_shifted(k, d);
    let mut p = MultiPoly::constant(d + 1, rat_int(-1));
    for pos in 0..=d {
        p = &p + &shifted.compose_multi(&MultiPoly::var(d + 1, pos));
    }
    let p = p.scale(&Rational::new(1.into(), (d as i64).into()));
    FeFunction::from_parts(d, [(simplex, p)])
}

/// The non-conforming facet function `B_k^{CR,F}`: on each adjacent simplex,
/// `P_k^{(0,d-2)}(1 - 2 lambda_{K,F}) - B_k^{CR,K}` with `lambda_{K,F}` the
/// barycentric coordinate opposite `F`.
pub fn nc_facet_fn(cx: &SimplicialComplex, k: usize, facet_id: usize) -> FeFunction {
    let d = cx.dim();
    let shifted = jacobi_shifted(k, d);
    let facet = cx.face(d - 1, facet_id);
    FeFunction::from_parts(
        d,
        facet.patch.iter().map(|&k_id| {
            let opp = cx.opposite_vertex(k_id, facet_id);
            let pos = cx.vertex_position(k_id, opp).unwrap();
            let jac = shifted.compose_multi(&MultiPoly::var(d + 1, pos));
            let nc_k = nc_simplex_fn(cx, k, k_id).part(k_id);
            (k_id, &jac - &nc_k)
        }),
    )
}

/// `psi_k^z`: the sum of the non-conforming facet functions over all facets
/// containing `z`. Continuous, supported on the vertex patch, with vertex
/// values `(1 + (-1)^{k+1} rho_k) delta_{y,z}`.
pub fn psi_z(cx: &SimplicialComplex, k: usize, z: usize) -> FeFunction {
    let d = cx.dim();
    let mut acc = FeFunction::zero(d);
    for facet in cx.facets() {
        if facet.vertices.contains(&z) {
            acc = acc.add(&nc_facet_fn(cx, k, facet.id));
        }
    }
    acc
}

/// `Psi_k` for even `k`: the sum of all non-conforming simplex functions,
/// which is globally continuous.
pub fn psi_big(cx: &SimplicialComplex, k: usize) -> Result<FeFunction, Error> {
    if k % 2 != 0 {
        return Err(Error::UnknownEntity(format!(
            "Psi_k is defined for even k, got k = {k}"
        )));
    }
    let mut acc = FeFunction::zero(cx.dim());
    for simplex in 0..cx.mesh().num_simplices() {
        acc = acc.add(&nc_simplex_fn(cx, k, simplex));
    }
    Ok(acc)
}

/// An assembled Crouzeix-Raviart basis: ordered `(tag, function)` pairs.
///
/// Ordering: conforming members by `(ell, face id, lexicographic alpha)`,
/// then non-conforming members by entity id. For even `k` with `Bc::Full`,
/// the simplex with the largest id is dropped from the non-conforming family
/// (the sum of all simplex functions is continuous, so keeping all of them
/// would introduce exactly one linear dependency).
#[derive(Debug, Clone)]
pub struct CrBasis {
    pub k: usize,
    pub bc: Bc,
    pub entries: Vec<(BasisTag, FeFunction)>,
    pub dropped_simplex: Option<usize>,
    index: BTreeMap<BasisTag, usize>,
}

impl CrBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, tag: &BasisTag) -> Option<usize> {
        self.index.get(tag).copied()
    }

    pub fn tags(&self) -> impl Iterator<Item = &BasisTag> {
        self.entries.iter().map(|(t, _)| t)
    }

    pub fn functions(&self) -> impl Iterator<Item = &FeFunction> {
        self.entries.iter().map(|(_, f)| f)
    }

    /// Linear combination with one coefficient per basis member.
    pub fn combine(&self, coeffs: &[Rational]) -> FeFunction {
        assert_eq!(coeffs.len(), self.entries.len());
        let dim = self
            .entries
            .first()
            .map(|(_, f)| f.dim())
            .unwrap_or(2);
        let mut acc = FeFunction::zero(dim);
        for ((_, f), c) in self.entries.iter().zip(coeffs) {
            if !c.is_zero() {
                acc = acc.add(&f.scale(c));
            }
        }
        acc
    }
}

/// Range of conforming face dimensions entering the basis of order `k`:
/// `[1, min(k-1, d)]` for odd `k`, `[0, min(k-1, d)]` for even `k`.
fn conforming_levels(k: usize, d: usize) -> (usize, usize) {
    let lo = if k % 2 == 0 { 0 } else { 1 };
    let hi = (k - 1).min(d);
    (lo, hi)
}

/// Builds the Crouzeix-Raviart basis of order `k >= 1`.
pub fn build_basis(cx: &SimplicialComplex, k: usize, bc: Bc) -> Result<CrBasis, Error> {
    if k == 0 {
        return Err(Error::UnknownEntity(String::from("order k must be >= 1")));
    }
    let d = cx.dim();
    let mut entries: Vec<(BasisTag, FeFunction)> = Vec::new();
    let (lo, hi) = conforming_levels(k, d);
    for ell in lo..=hi.min(d) {
        if ell > hi {
            break;
        }
        let idxs = crate::num::multi_indices(ell, k - 1 - ell);
        for face in cx.faces(ell) {
            if bc == Bc::Zero && face.on_boundary {
                continue;
            }
            for alpha in &idxs {
                let f = conforming_face_fn(cx, k, ell, face.id, alpha)?;
                let tag = if ell == 0 {
                    BasisTag::Vertex(face.vertices[0])
                } else {
                    BasisTag::Face {
                        ell,
                        face: face.id,
                        alpha: alpha.clone(),
                    }
                };
                entries.push((tag, f));
            }
        }
    }
    let mut dropped = None;
    if k % 2 == 1 {
        for facet in cx.facets() {
            if bc == Bc::Zero && facet.on_boundary {
                continue;
            }
            entries.push((BasisTag::NcFacet(facet.id), nc_facet_fn(cx, k, facet.id)));
        }
    } else {
        let n = cx.mesh().num_simplices();
        let keep = if bc == Bc::Full && n > 0 {
            dropped = Some(n - 1);
            n - 1
        } else {
            n
        };
        for simplex in 0..keep {
            entries.push((
                BasisTag::NcSimplex(simplex),
                nc_simplex_fn(cx, k, simplex),
            ));
        }
    }
    let index = entries
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.clone(), i))
        .collect();
    Ok(CrBasis {
        k,
        bc,
        entries,
        dropped_simplex: dropped,
        index,
    })
}

/// The expected dimension of the assembled space:
/// `sum_l |S_l| C(k-1, l)` over the conforming levels plus the
/// non-conforming count (`|F|` resp. `|F_Omega|` for odd `k`; `|T|` for even
/// `k` with zero boundary conditions, `|T| - 1` for the full space).
pub fn dim_formula(cx: &SimplicialComplex, k: usize, bc: Bc) -> usize {
    let d = cx.dim();
    let (lo, hi) = conforming_levels(k, d);
    let mut total = 0usize;
    for ell in lo..=hi {
        let faces = if bc == Bc::Zero {
            cx.num_interior_faces(ell)
        } else {
            cx.num_faces(ell)
        };
        total += faces * binomial(k - 1, ell).to_usize().expect("small count");
    }
    if k % 2 == 1 {
        total += if bc == Bc::Zero {
            cx.num_interior_faces(d - 1)
        } else {
            cx.num_faces(d - 1)
        };
    } else {
        let t = cx.mesh().num_simplices();
        total += if bc == Bc::Zero { t } else { t - 1 };
    }
    total
}

/// Exact `L^2(Omega)` Gram matrix of a list of functions.
pub fn gram_matrix(cx: &SimplicialComplex, funcs: &[&FeFunction]) -> Matrix {
    let n = funcs.len();
    let mut g = Matrix::zeros(n, n);
    // group by simplex so only genuinely overlapping supports multiply
    let mut by_simplex: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, f) in funcs.iter().enumerate() {
        for k in f.support() {
            by_simplex.entry(k).or_default().push(i);
        }
    }
    for (k, members) in by_simplex {
        let vol = cx.mesh().volume(k);
        for (a, &i) in members.iter().enumerate() {
            let pi = funcs[i].part(k);
            for &j in &members[a..] {
                let pj = funcs[j].part(k);
                let v = l2_product(&pi, &pj, vol);
                if !v.is_zero() {
                    *g.at_mut(i, j) += v.clone();
                    if i != j {
                        *g.at_mut(j, i) += v;
                    }
                }
            }
        }
    }
    g
}

/// Expands a continuous piecewise polynomial in the hierarchical conforming
/// family by peeling face dimensions from `start_ell` up: vertex values
/// first (when `start_ell = 0`), then per-face trace projections. Returns
/// the coefficients together with the residual; the expansion is exact iff
/// the residual is the zero function.
pub fn expand_conforming(
    cx: &SimplicialComplex,
    k: usize,
    u: &FeFunction,
    start_ell: usize,
) -> Result<(Vec<(BasisTag, Rational)>, FeFunction), Error> {
    let d = cx.dim();
    let mut coeffs: Vec<(BasisTag, Rational)> = Vec::new();
    let mut work = u.clone();
    let hi = (k.saturating_sub(1)).min(d);
    if start_ell == 0 && k >= 1 {
        for face in cx.faces(0) {
            let z = face.vertices[0];
            let c = work.vertex_value(cx, face.patch[0], z);
            if !c.is_zero() {
                work = work.sub(&hat_function(cx, z).scale(&c));
                coeffs.push((BasisTag::Vertex(z), c));
            }
        }
    }
    for ell in start_ell.max(1)..=hi.max(0) {
        if ell > hi {
            break;
        }
        let idxs = crate::num::multi_indices(ell, k - 1 - ell);
        if idxs.is_empty() {
            continue;
        }
        // per-face normalized Gram of the own-face traces
        let traces: Vec<MultiPoly> = idxs
            .iter()
            .map(|a| conforming_trace_on_own_face(ell, a))
            .collect::<Result<_, _>>()?;
        let g = Matrix::from_fn(traces.len(), traces.len(), |i, j| {
            l2_normalized(&traces[i], &traces[j])
        });
        for face in cx.faces(ell) {
            let t = work.trace(cx, face.patch[0], ell, face.id);
            if t.canonical_bary().is_zero() {
                continue;
            }
            let rhs = Matrix::from_fn(traces.len(), 1, |i, _| l2_normalized(&traces[i], &t));
            let sol = solve(&g, &rhs)?;
            for (i, alpha) in idxs.iter().enumerate() {
                let c = sol.at(i, 0).clone();
                if !c.is_zero() {
                    let f = conforming_face_fn(cx, k, ell, face.id, alpha)?;
                    work = work.sub(&f.scale(&c));
                    coeffs.push((
                        BasisTag::Face {
                            ell,
                            face: face.id,
                            alpha: alpha.clone(),
                        },
                        c,
                    ));
                }
            }
        }
    }
    Ok((coeffs, work))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::rho;
    use crate::mesh;
    use crate::num::{rat, rat_int};

    fn complex(m: crate::mesh::Mesh) -> SimplicialComplex {
        SimplicialComplex::build(m)
    }

    #[test]
    fn hat_is_kronecker() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        for z in 0..cx.mesh().num_vertices() {
            let h = hat_function(&cx, z);
            for y in 0..cx.mesh().num_vertices() {
                for k in 0..cx.mesh().num_simplices() {
                    if cx.vertex_position(k, y).is_none() {
                        continue;
                    }
                    let want = if y == z { rat_int(1) } else { rat_int(0) };
                    assert_eq!(h.vertex_value(&cx, k, y), want);
                }
            }
        }
    }

    #[test]
    fn hat_on_reference_simplex_is_one_minus_sum() {
        let cx = complex(mesh::reference_simplex(3).unwrap());
        let h = hat_function(&cx, 0);
        // lambda_0 = 1 - x1 - x2 - x3 at barycentric (1,0,0,0) is 1
        assert_eq!(h.vertex_value(&cx, 0, 0), rat_int(1));
        assert_eq!(h.vertex_value(&cx, 0, 2), rat_int(0));
    }

    #[test]
    fn edge_bubble_midpoint_value() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        let interior = cx.faces(1).iter().find(|f| !f.on_boundary).unwrap().id;
        let b = face_bubble(&cx, 1, interior).unwrap();
        // value 1/4 at the edge midpoint, from either side
        let face = cx.face(1, interior).clone();
        for &k in &face.patch {
            let mut lam = alloc::vec![rat_int(0); 3];
            for &z in &face.vertices {
                lam[cx.vertex_position(k, z).unwrap()] = rat(1, 2);
            }
            assert_eq!(b.eval_bary(k, &lam), rat(1, 4));
        }
        // support equals the patch
        assert_eq!(b.support_set(), face.patch);
        assert!(face_bubble(&cx, 0, 0).is_err());
    }

    #[test]
    fn simplex_bubble_vanishes_on_boundary_faces() {
        let cx = complex(mesh::reference_simplex(2).unwrap());
        let w = face_bubble(&cx, 2, 0).unwrap();
        for facet in cx.facets() {
            let t = w.trace(&cx, 0, 1, facet.id);
            assert!(t.canonical_bary().is_zero());
        }
        assert_eq!(w.degree(), 3);
    }

    #[test]
    fn conforming_face_fn_agrees_on_shared_trace() {
        let cx = complex(mesh::two_simplex(3).unwrap());
        let shared = cx.facets().iter().find(|f| !f.on_boundary).unwrap().clone();
        let f = conforming_face_fn(&cx, 4, 2, shared.id, &[1, 0]).unwrap();
        let t0 = f.trace(&cx, shared.patch[0], 2, shared.id);
        let t1 = f.trace(&cx, shared.patch[1], 2, shared.id);
        assert!((&t0 - &t1).canonical_bary().is_zero());
        // vanishes at all mesh vertices
        for k in 0..2 {
            for &z in cx.mesh().simplex(k) {
                assert_eq!(f.vertex_value(&cx, k, z), rat_int(0));
            }
        }
        // too-large multi-index rejected
        assert!(conforming_face_fn(&cx, 3, 2, shared.id, &[1, 0]).is_err());
    }

    #[test]
    fn nc_simplex_k1_vanishes() {
        for d in 2..=4 {
            let cx = complex(mesh::two_simplex(d).unwrap());
            assert!(nc_simplex_fn(&cx, 1, 0).is_zero());
        }
    }

    #[test]
    fn nc_vertex_values() {
        // B_k^{CR,K} at vertices: (d - 1 + (-1)^k rho_k)/d
        for d in 2..=4 {
            let cx = complex(mesh::two_simplex(d).unwrap());
            for k in 1..=4usize {
                let f = nc_simplex_fn(&cx, k, 0);
                let sign = crate::num::sign_pow(k);
                let expect =
                    (rat_int(d as i64 - 1) + sign * rho(k, d)) / rat_int(d as i64);
                for &z in cx.mesh().simplex(0) {
                    assert_eq!(f.vertex_value(&cx, 0, z), expect, "d={d} k={k}");
                }
            }
        }
        // spec example: d=4, k=2 simplex value (3 + rho_2)/4 = 9/4
        let cx = complex(mesh::two_simplex(4).unwrap());
        let f = nc_simplex_fn(&cx, 2, 0);
        assert_eq!(f.vertex_value(&cx, 0, 0), rat(9, 4));
    }

    #[test]
    fn nc_facet_k1_is_one_minus_d_lambda() {
        for d in 2..=4 {
            let cx = complex(mesh::two_simplex(d).unwrap());
            let facet = cx.facets().iter().find(|f| !f.on_boundary).unwrap().clone();
            let f = nc_facet_fn(&cx, 1, facet.id);
            for &k in &facet.patch {
                let opp = cx.opposite_vertex(k, facet.id);
                let pos = cx.vertex_position(k, opp).unwrap();
                let expect = &MultiPoly::one(d + 1)
                    - &MultiPoly::var(d + 1, pos).scale(&rat_int(d as i64));
                assert!(f.part(k).bary_eq(&expect));
            }
        }
    }

    #[test]
    fn nc_facet_vertex_values() {
        // (1 + (-1)^{k+1} rho_k)/d on F's vertices; times (1-d) opposite
        for d in 2..=4 {
            let cx = complex(mesh::two_simplex(d).unwrap());
            let facet = cx.facets().iter().find(|f| !f.on_boundary).unwrap().clone();
            for k in 1..=5usize {
                let f = nc_facet_fn(&cx, k, facet.id);
                let sign = crate::num::sign_pow(k + 1);
                let base = (rat_int(1) + sign * rho(k, d)) / rat_int(d as i64);
                for &kk in &facet.patch {
                    for &z in cx.mesh().simplex(kk) {
                        let got = f.vertex_value(&cx, kk, z);
                        if facet.vertices.contains(&z) {
                            assert_eq!(got, base, "d={d} k={k} facet vertex");
                        } else {
                            assert_eq!(
                                got,
                                base.clone() * rat_int(1 - d as i64),
                                "d={d} k={k} opposite vertex"
                            );
                        }
                    }
                }
            }
        }
        // d=3, k=1: value 1 on facet vertices, -2 opposite
        let cx = complex(mesh::two_simplex(3).unwrap());
        let facet = cx.facets().iter().find(|f| !f.on_boundary).unwrap().clone();
        let f = nc_facet_fn(&cx, 1, facet.id);
        let z_on = facet.vertices[0];
        let opp = cx.opposite_vertex(facet.patch[0], facet.id);
        assert_eq!(f.vertex_value(&cx, facet.patch[0], z_on), rat_int(1));
        assert_eq!(f.vertex_value(&cx, facet.patch[0], opp), rat_int(-2));
    }

    #[test]
    fn bk_continuous_for_d2_odd() {
        // d=2, odd k: B_k^{CR,K} has zero trace on every edge of K
        let cx = complex(mesh::reference_simplex(2).unwrap());
        for k in [1usize, 3, 5] {
            let f = nc_simplex_fn(&cx, k, 0);
            for facet in cx.facets() {
                let t = f.trace(&cx, 0, 1, facet.id);
                assert!(t.canonical_bary().is_zero(), "k={k}");
            }
        }
    }

    #[test]
    fn psi_z_lagrange_property() {
        for d in 2..=3 {
            let cx = complex(mesh::two_simplex(d).unwrap());
            for k in 1..=3usize {
                let scale = rat_int(1) + crate::num::sign_pow(k + 1) * rho(k, d);
                for z in 0..cx.mesh().num_vertices() {
                    let psi = psi_z(&cx, k, z);
                    // continuity across every interior facet
                    for facet in cx.facets() {
                        if !facet.on_boundary {
                            assert!(psi
                                .jump(&cx, facet.id)
                                .unwrap()
                                .canonical_bary()
                                .is_zero());
                        }
                    }
                    // vertex values
                    for y in 0..cx.mesh().num_vertices() {
                        for kk in 0..cx.mesh().num_simplices() {
                            if cx.vertex_position(kk, y).is_none() {
                                continue;
                            }
                            let want = if y == z { scale.clone() } else { rat_int(0) };
                            assert_eq!(psi.vertex_value(&cx, kk, y), want, "d={d} k={k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn psi_big_is_continuous() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        let psi = psi_big(&cx, 2).unwrap();
        for facet in cx.facets() {
            if !facet.on_boundary {
                assert!(psi.jump(&cx, facet.id).unwrap().canonical_bary().is_zero());
            }
        }
        assert!(psi_big(&cx, 3).is_err());
        // single-simplex mesh: Psi_k = B_k^{CR,K}
        let cx1 = complex(mesh::reference_simplex(2).unwrap());
        assert!(psi_big(&cx1, 2)
            .unwrap()
            .fe_eq(&nc_simplex_fn(&cx1, 2, 0)));
    }

    #[test]
    fn basis_counts_match_formula() {
        let meshes: Vec<(&str, crate::mesh::Mesh)> = alloc::vec![
            ("two2", mesh::two_simplex(2).unwrap()),
            ("grid", mesh::grid2d(2).unwrap()),
            ("two3", mesh::two_simplex(3).unwrap()),
        ];
        for (name, m) in meshes {
            let cx = complex(m);
            for k in 1..=4 {
                for bc in [Bc::Full, Bc::Zero] {
                    let b = build_basis(&cx, k, bc).unwrap();
                    assert_eq!(
                        b.len(),
                        dim_formula(&cx, k, bc),
                        "{name} k={k} bc={bc:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn two_triangle_counts_examples() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        // k=1 zero: just the interior-edge nc function
        let b = build_basis(&cx, 1, Bc::Zero).unwrap();
        assert_eq!(b.len(), 1);
        assert!(matches!(b.entries[0].0, BasisTag::NcFacet(_)));
        // k=3 zero: 2 edge fns + 2 triangle bubbles + 1 nc edge fn
        let b3 = build_basis(&cx, 3, Bc::Zero).unwrap();
        assert_eq!(b3.len(), 5);
        // single simplex, even k, full: pure conforming of size C(k+d, d)
        let cx1 = complex(mesh::reference_simplex(2).unwrap());
        let b2 = build_basis(&cx1, 2, Bc::Full).unwrap();
        assert_eq!(b2.len(), 6);
        assert!(b2.tags().all(|t| !matches!(t, BasisTag::NcSimplex(_))));
        assert_eq!(b2.dropped_simplex, Some(0));
    }

    #[test]
    fn expand_conforming_recovers_hat_combination() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        let u = hat_function(&cx, 1)
            .scale(&rat(3, 2))
            .add(&hat_function(&cx, 0).scale(&rat(-1, 3)));
        let (coeffs, residual) = expand_conforming(&cx, 2, &u, 0).unwrap();
        assert!(residual.is_zero());
        let mut rebuilt = FeFunction::zero(2);
        for (tag, c) in &coeffs {
            if let BasisTag::Vertex(z) = tag {
                rebuilt = rebuilt.add(&hat_function(&cx, *z).scale(c));
            } else {
                panic!("affine input needs only vertex terms");
            }
        }
        assert!(rebuilt.fe_eq(&u));
    }
}
