//! Degrees of freedom bidual to the Crouzeix-Raviart basis, and the
//! interpolation operators they induce.
//!
//! Three constructions live here:
//! - the general-dimension family for odd `k`: per-simplex weights obtained
//!   from an exact `L^2(K)` Gram solve against the local basis restrictions,
//!   plus boundary-facet weights obtained from an exact `L^2(F)` trace
//!   system (see below);
//! - the explicit 2-D edge functionals with the `gamma_nu` / `c_{nu,k}`
//!   constants;
//! - the order-one facet means, valid in every dimension.
//!
//! Facet-carried pairings are measure-normalized, `(1/|F|) int_F g u`: facet
//! volumes of rational meshes are square roots in general, and normalizing
//! them away keeps the whole construction inside the rationals without
//! changing any biduality statement.
//!
//! Boundary weights: the trace system on a boundary facet `F` of `K` is
//! assembled against the traces of *all* local members with nonzero trace on
//! `F` (the conforming members indexed inside `F` and all `d + 1` facet
//! functions of `K`), prescribing Kronecker values on the conforming traces
//! and on the facet function of `F` itself, and zero on the others. The
//! trace family carries exactly one linear relation (the facet functions of
//! `K` other than `F` sum to zero on `F`), against which every prescription
//! is consistent, so the weight exists and is unique in `P_k(F)`. This pins
//! down the abstract "a bidual basis exists" argument constructively and
//! makes the full biduality Gram exactly the identity.

use crate::basis::{conforming_face_fn, face_bubble, nc_facet_fn, BasisTag, Bc, CrBasis};
use crate::complex::SimplicialComplex;
use crate::error::Error;
use crate::fe::FeFunction;
use crate::integrate::{l2_normalized, l2_product};
use crate::jacobi::{jacobi_poly, JacobiParams};
use crate::linalg::{inverse, solve, solve_consistent, Matrix};
use crate::num::{multi_indices, rat, rat_int, Rational};
use crate::poly::MultiPoly;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::{One, Zero};

/// Where a face's degree of freedom is carried.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkTarget {
    Simplex(usize),
    BoundaryFacet(usize),
}

/// Policy for picking among admissible mark targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkPolicy {
    SmallestId,
    LargestId,
}

/// Assignment of every face to an adjacent simplex (interior faces) or a
/// containing boundary facet (boundary faces).
#[derive(Debug, Clone)]
pub struct MarkAssignment {
    map: BTreeMap<(usize, usize), MarkTarget>,
}

impl MarkAssignment {
    pub fn get(&self, ell: usize, face_id: usize) -> MarkTarget {
        self.map[&(ell, face_id)]
    }
}

/// Builds the mark assignment. Interior faces map to an adjacent simplex,
/// boundary faces to a boundary facet containing them; simplices map to
/// themselves.
pub fn make_mark(cx: &SimplicialComplex, policy: MarkPolicy) -> MarkAssignment {
    let d = cx.dim();
    let mut map = BTreeMap::new();
    for ell in 0..=d {
        for face in cx.faces(ell) {
            let target = if face.on_boundary {
                let mut candidates: Vec<usize> = cx
                    .facets()
                    .iter()
                    .filter(|f| {
                        f.on_boundary && face.vertices.iter().all(|v| f.vertices.contains(v))
                    })
                    .map(|f| f.id)
                    .collect();
                candidates.sort_unstable();
                let id = match policy {
                    MarkPolicy::SmallestId => candidates[0],
                    MarkPolicy::LargestId => *candidates.last().unwrap(),
                };
                MarkTarget::BoundaryFacet(id)
            } else {
                let id = match policy {
                    MarkPolicy::SmallestId => face.patch[0],
                    MarkPolicy::LargestId => *face.patch.last().unwrap(),
                };
                MarkTarget::Simplex(id)
            };
            map.insert((ell, face.id), target);
        }
    }
    MarkAssignment { map }
}

/// Carrier of a functional's weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carrier {
    /// True `L^2(K)` pairing over a simplex.
    Simplex(usize),
    /// Measure-normalized pairing `(1/|F|) int_F` over a facet, with the
    /// trace taken from `side`.
    Facet { facet: usize, side: usize },
}

/// A degree of freedom: an exact weighted integral over one simplex or one
/// facet, scaled by a rational factor.
#[derive(Debug, Clone)]
pub struct Functional {
    /// The basis member this functional is dual to.
    pub tag: BasisTag,
    pub carrier: Carrier,
    pub weight: MultiPoly,
    pub scale: Rational,
}

impl Functional {
    pub fn eval(&self, cx: &SimplicialComplex, u: &FeFunction) -> Rational {
        match self.carrier {
            Carrier::Simplex(k) => {
                let part = u.part(k);
                if part.is_zero() {
                    return Rational::zero();
                }
                l2_product(&self.weight, &part, cx.mesh().volume(k)) * &self.scale
            }
            Carrier::Facet { facet, side } => {
                let d = cx.dim();
                let tr = u.trace(cx, side, d - 1, facet);
                if tr.is_zero() {
                    return Rational::zero();
                }
                l2_normalized(&self.weight, &tr) * &self.scale
            }
        }
    }

    /// For facet carriers on interior facets: evaluates from the other side.
    /// Well-definedness checks compare this with `eval`.
    pub fn eval_other_side(&self, cx: &SimplicialComplex, u: &FeFunction) -> Option<Rational> {
        let Carrier::Facet { facet, side } = self.carrier else {
            return None;
        };
        let d = cx.dim();
        let face = cx.face(d - 1, facet);
        if face.on_boundary {
            return None;
        }
        let other = *face.patch.iter().find(|&&k| k != side)?;
        let tr = u.trace(cx, other, d - 1, facet);
        Some(l2_normalized(&self.weight, &tr) * &self.scale)
    }

    /// Degree of the weight polynomial on its carrier.
    pub fn weight_degree(&self) -> usize {
        self.weight.bary_degree()
    }
}

/// The ordered local tags of `B_k^{CR}(K)`: conforming members for every
/// face of `K` of dimension `1..=min(k-1,d)`, then the `d + 1` facet
/// functions. Spans `P_k(K)` for odd `k`.
pub fn local_tags(cx: &SimplicialComplex, k: usize, simplex: usize) -> Vec<BasisTag> {
    let d = cx.dim();
    let mut tags = Vec::new();
    let hi = (k - 1).min(d);
    for ell in 1..=hi.max(0) {
        if ell > hi {
            break;
        }
        for face_id in cx.faces_of_simplex(simplex, ell) {
            for alpha in multi_indices(ell, k - 1 - ell) {
                tags.push(BasisTag::Face {
                    ell,
                    face: face_id,
                    alpha,
                });
            }
        }
    }
    for facet_id in cx.faces_of_simplex(simplex, d - 1) {
        tags.push(BasisTag::NcFacet(facet_id));
    }
    tags
}

fn local_restriction(
    cx: &SimplicialComplex,
    k: usize,
    simplex: usize,
    tag: &BasisTag,
) -> Result<MultiPoly, Error> {
    match tag {
        BasisTag::Face { ell, face, alpha } => {
            Ok(conforming_face_fn(cx, k, *ell, *face, alpha)?.part(simplex))
        }
        BasisTag::NcFacet(f) => Ok(nc_facet_fn(cx, k, *f).part(simplex)),
        _ => Err(Error::Internal(String::from(
            "local set contains only face and facet tags",
        ))),
    }
}

/// Bidual functionals carried on simplex `K` for every member of the local
/// set `B_k^{CR}(K)`, by an exact `L^2(K)` Gram solve. Odd `k` only.
pub fn local_simplex_dofs(
    cx: &SimplicialComplex,
    k: usize,
    simplex: usize,
) -> Result<Vec<Functional>, Error> {
    if k % 2 == 0 {
        return Err(Error::EvenOrderDofs { k });
    }
    let tags = local_tags(cx, k, simplex);
    let polys: Vec<MultiPoly> = tags
        .iter()
        .map(|t| local_restriction(cx, k, simplex, t))
        .collect::<Result<_, _>>()?;
    let vol = cx.mesh().volume(simplex);
    let n = polys.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = l2_product(&polys[i], &polys[j], vol);
            *g.at_mut(i, j) = v.clone();
            if i != j {
                *g.at_mut(j, i) = v;
            }
        }
    }
    let inv = inverse(&g).map_err(|e| match e {
        Error::SingularMatrix { rank } => Error::Internal(format!(
            "local Gram on simplex {simplex} is singular (rank {rank}); the local set must span P_k(K)"
        )),
        other => other,
    })?;
    Ok(tags
        .into_iter()
        .enumerate()
        .map(|(j, tag)| {
            let mut w = MultiPoly::zero(cx.dim() + 1);
            for (m, p) in polys.iter().enumerate() {
                let c = inv.at(m, j);
                if !c.is_zero() {
                    w = &w + &p.scale(c);
                }
            }
            Functional {
                tag,
                carrier: Carrier::Simplex(simplex),
                weight: w,
                scale: Rational::one(),
            }
        })
        .collect())
}

/// The conforming index set `I_k(F)` of a facet: faces of `F` of dimension
/// `1..=min(k-1, d-1)` with their admissible multi-indices, in
/// `(ell, face id, alpha)` order.
pub fn facet_conforming_tags(cx: &SimplicialComplex, k: usize, facet_id: usize) -> Vec<BasisTag> {
    let d = cx.dim();
    let fv = cx.face(d - 1, facet_id).vertices.clone();
    let mut tags = Vec::new();
    let hi = (k - 1).min(d - 1);
    for ell in 1..=hi.max(0) {
        if ell > hi {
            break;
        }
        let mut ids: Vec<usize> = combinations(&fv, ell + 1)
            .into_iter()
            .map(|sub| cx.face_id(ell, &sub).expect("closed complex"))
            .collect();
        ids.sort_unstable();
        for face_id in ids {
            for alpha in multi_indices(ell, k - 1 - ell) {
                tags.push(BasisTag::Face {
                    ell,
                    face: face_id,
                    alpha,
                });
            }
        }
    }
    tags
}

fn combinations(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(items: &[usize], r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, r, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, r, 0, &mut cur, &mut out);
    out
}

/// Bidual functionals carried on a boundary facet `F`: one per conforming
/// tag in `I_k(F)` plus one dual to `B_k^{CR,F}`. Odd `k`; requires a mesh
/// with more than one simplex.
pub fn boundary_facet_dofs(
    cx: &SimplicialComplex,
    k: usize,
    facet_id: usize,
) -> Result<Vec<Functional>, Error> {
    if k % 2 == 0 {
        return Err(Error::EvenOrderDofs { k });
    }
    let d = cx.dim();
    if cx.mesh().num_simplices() < 2 {
        return Err(Error::SingleSimplexMesh);
    }
    let face = cx.face(d - 1, facet_id);
    if !face.on_boundary {
        return Err(Error::UnknownEntity(format!(
            "facet {facet_id} is interior; boundary functionals need a boundary facet"
        )));
    }
    let side = face.patch[0];

    // trace list: conforming tags inside F, then all facet functions of K
    let conf_tags = facet_conforming_tags(cx, k, facet_id);
    let facets_of_k = cx.faces_of_simplex(side, d - 1);
    let mut traces: Vec<MultiPoly> = Vec::new();
    for tag in &conf_tags {
        let BasisTag::Face { ell, face, alpha } = tag else {
            unreachable!()
        };
        let f = conforming_face_fn(cx, k, *ell, *face, alpha)?;
        traces.push(f.trace(cx, side, d - 1, facet_id));
    }
    for &fp in &facets_of_k {
        let f = nc_facet_fn(cx, k, fp);
        traces.push(f.trace(cx, side, d - 1, facet_id));
    }

    let n = traces.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = l2_normalized(&traces[i], &traces[j]);
            *m.at_mut(i, j) = v.clone();
            if i != j {
                *m.at_mut(j, i) = v;
            }
        }
    }

    // prescriptions: Kronecker on the conforming traces and on F's own facet
    // function; zero on every other facet trace
    let own_pos = conf_tags.len()
        + facets_of_k
            .iter()
            .position(|&f| f == facet_id)
            .expect("facet belongs to its simplex");
    let n_targets = conf_tags.len() + 1;
    let rhs = Matrix::from_fn(n, n_targets, |i, t| {
        let hit = if t < conf_tags.len() {
            i == t
        } else {
            i == own_pos
        };
        if hit {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let sol = solve_consistent(&m, &rhs).map_err(|e| match e {
        Error::InconsistentSystem => Error::Internal(format!(
            "boundary trace system on facet {facet_id} is inconsistent"
        )),
        other => other,
    })?;

    let mut out = Vec::with_capacity(n_targets);
    for (t, tag) in conf_tags
        .iter()
        .cloned()
        .chain([BasisTag::NcFacet(facet_id)])
        .enumerate()
    {
        let mut w = MultiPoly::zero(d);
        for i in 0..n {
            let c = sol.at(i, t);
            if !c.is_zero() {
                w = &w + &traces[i].scale(c);
            }
        }
        out.push(Functional {
            tag,
            carrier: Carrier::Facet {
                facet: facet_id,
                side,
            },
            weight: w,
            scale: Rational::one(),
        });
    }
    Ok(out)
}

/// A set of functionals aligned index-by-index with a basis.
#[derive(Debug, Clone)]
pub struct DofSet {
    pub k: usize,
    pub bc: Bc,
    pub functionals: Vec<Functional>,
}

impl DofSet {
    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }

    pub fn evaluate_all(&self, cx: &SimplicialComplex, u: &FeFunction) -> Vec<Rational> {
        self.functionals.iter().map(|j| j.eval(cx, u)).collect()
    }

    /// The biduality Gram `[J_i(b_j)]`.
    pub fn gram_against(&self, cx: &SimplicialComplex, basis: &CrBasis) -> Matrix {
        Matrix::from_fn(self.functionals.len(), basis.len(), |i, j| {
            self.functionals[i].eval(cx, &basis.entries[j].1)
        })
    }
}

/// Assembles the degrees of freedom dual to an odd-order basis, one
/// functional per basis member, carried per the mark assignment.
pub fn assemble_dofs(
    cx: &SimplicialComplex,
    basis: &CrBasis,
    mark: &MarkAssignment,
) -> Result<DofSet, Error> {
    let k = basis.k;
    if k % 2 == 0 {
        return Err(Error::EvenOrderDofs { k });
    }
    let d = cx.dim();
    let mut local_cache: BTreeMap<usize, Vec<Functional>> = BTreeMap::new();
    let mut boundary_cache: BTreeMap<usize, Vec<Functional>> = BTreeMap::new();
    let mut out = Vec::with_capacity(basis.len());
    for (tag, _) in &basis.entries {
        let (ell, face_id) = match tag {
            BasisTag::Face { ell, face, .. } => (*ell, *face),
            BasisTag::NcFacet(f) => (d - 1, *f),
            BasisTag::Vertex(_) | BasisTag::NcSimplex(_) => {
                return Err(Error::EvenOrderDofs { k })
            }
        };
        let functional = match mark.get(ell, face_id) {
            MarkTarget::Simplex(s) => {
                if !local_cache.contains_key(&s) {
                    local_cache.insert(s, local_simplex_dofs(cx, k, s)?);
                }
                local_cache[&s]
                    .iter()
                    .find(|f| f.tag == *tag)
                    .cloned()
                    .ok_or_else(|| {
                        Error::Internal(format!("missing local functional for {}", tag.render()))
                    })?
            }
            MarkTarget::BoundaryFacet(bf) => {
                if !boundary_cache.contains_key(&bf) {
                    boundary_cache.insert(bf, boundary_facet_dofs(cx, k, bf)?);
                }
                boundary_cache[&bf]
                    .iter()
                    .find(|f| f.tag == *tag)
                    .cloned()
                    .ok_or_else(|| {
                        Error::Internal(format!(
                            "missing boundary functional for {}",
                            tag.render()
                        ))
                    })?
            }
        };
        out.push(functional);
    }
    Ok(DofSet {
        k,
        bc: basis.bc,
        functionals: out,
    })
}

/// Interpolation induced by a dof set: evaluates every functional and
/// re-expands in the basis. Returns the coefficient vector and the result.
pub fn interpolate(
    cx: &SimplicialComplex,
    basis: &CrBasis,
    dofs: &DofSet,
    u: &FeFunction,
) -> (Vec<Rational>, FeFunction) {
    assert_eq!(basis.len(), dofs.len(), "dofs must align with the basis");
    let coeffs = dofs.evaluate_all(cx, u);
    let result = basis.combine(&coeffs);
    (coeffs, result)
}

/// `gamma_nu = (2 nu + 3)(nu + 2) / (8 (nu + 1))`.
pub fn gamma_nu(nu: usize) -> Rational {
    let nu = nu as i64;
    rat((2 * nu + 3) * (nu + 2), 8 * (nu + 1))
}

/// `c_{nu,k}`: `(1 - (-1)^{nu+1})/2 * (k+1)/(nu+2)` for `nu <= k-2` and
/// `1/(2k+1)` for `nu = k-1`.
pub fn c_nu_k(nu: usize, k: usize) -> Rational {
    if nu + 1 == k {
        rat(1, 2 * k as i64 + 1)
    } else if nu % 2 == 0 {
        rat(k as i64 + 1, nu as i64 + 2)
    } else {
        Rational::zero()
    }
}

fn require_2d_odd(cx: &SimplicialComplex, k: usize) -> Result<(), Error> {
    if cx.dim() != 2 {
        return Err(Error::NotTwoDimensional { d: cx.dim() });
    }
    if k % 2 == 0 {
        return Err(Error::EvenOrder { k });
    }
    Ok(())
}

/// The 2-D edge basis of an edge `E`: `b_E P_mu^{(1,1)}(2 phi_{A2} - 1)` for
/// `mu <= k - 2` and the non-conforming edge function for `mu = k - 1`.
pub fn edge_basis_2d(
    cx: &SimplicialComplex,
    k: usize,
    edge_id: usize,
) -> Result<Vec<FeFunction>, Error> {
    require_2d_odd(cx, k)?;
    let face = cx.face(1, edge_id).clone();
    let a2 = face.vertices[1];
    let bubble = face_bubble(cx, 1, edge_id)?;
    let mut out = Vec::with_capacity(k);
    for mu in 0..k.saturating_sub(1) {
        let jac = jacobi_poly(JacobiParams::new(mu, 1, 1));
        let f = FeFunction::from_parts(
            2,
            face.patch.iter().map(|&kk| {
                let pos = cx.vertex_position(kk, a2).unwrap();
                let arg = &MultiPoly::var(3, pos).scale(&rat_int(2)) - &MultiPoly::one(3);
                (kk, &bubble.part(kk) * &jac.compose_multi(&arg))
            }),
        );
        out.push(f);
    }
    out.push(nc_facet_fn(cx, k, edge_id));
    Ok(out)
}

/// The 2-D edge functionals with weight
/// `g_nu^E = gamma_nu (P_nu^{(1,1)} - c_{nu,k} P_{k-1}^{(1,1)})` evaluated at
/// `2 phi_{A2(E)} - 1`.
///
/// Pairing prefactor: `2/|E|` for the functional dual to the non-conforming
/// edge function (`nu = k - 1`) and `8/|E|` for the bubble-dual ones
/// (`nu <= k - 2`). The bubble block needs the extra factor 4 because the
/// pullback of `b_E` to `[-1, 1]` is `(1-x)(1+x)/4` while `gamma_nu`
/// normalizes the weight `(1-x)(1+x)`; with it, the edge functionals are
/// exactly bidual to the edge basis.
pub fn edge_dofs_2d(
    cx: &SimplicialComplex,
    k: usize,
    edge_id: usize,
) -> Result<Vec<Functional>, Error> {
    require_2d_odd(cx, k)?;
    let face = cx.face(1, edge_id);
    let side = face.patch[0];
    // on E's own coordinates, 2 phi_{A2} - 1 = 2 t1 - 1
    let arg = &MultiPoly::var(2, 1).scale(&rat_int(2)) - &MultiPoly::one(2);
    let p_top = jacobi_poly(JacobiParams::new(k - 1, 1, 1)).compose_multi(&arg);
    let mut out = Vec::with_capacity(k);
    for nu in 0..k {
        let p_nu = jacobi_poly(JacobiParams::new(nu, 1, 1)).compose_multi(&arg);
        let w = (&p_nu - &p_top.scale(&c_nu_k(nu, k))).scale(&gamma_nu(nu));
        let (tag, scale) = if nu + 1 == k {
            (BasisTag::NcFacet(edge_id), rat_int(2))
        } else {
            (
                BasisTag::Face {
                    ell: 1,
                    face: edge_id,
                    alpha: alloc::vec![nu],
                },
                rat_int(8),
            )
        };
        out.push(Functional {
            tag,
            carrier: Carrier::Facet {
                facet: edge_id,
                side,
            },
            weight: w,
            scale,
        });
    }
    Ok(out)
}

/// The order-one facet mean `J_0^F u = (1/|F|) int_F u`, bidual to
/// `{B_1^{CR,F}}` in every dimension.
pub fn facet_mean_dof_k1(cx: &SimplicialComplex, facet_id: usize) -> Functional {
    let d = cx.dim();
    let face = cx.face(d - 1, facet_id);
    Functional {
        tag: BasisTag::NcFacet(facet_id),
        carrier: Carrier::Facet {
            facet: facet_id,
            side: face.patch[0],
        },
        weight: MultiPoly::one(d),
        scale: Rational::one(),
    }
}

/// The 2-D edge interpolation `sum_E sum_nu (J_nu^E u) B_nu^E` over interior
/// edges (zero-boundary variant) or all edges.
pub fn edge_interpolation_2d(
    cx: &SimplicialComplex,
    k: usize,
    u: &FeFunction,
    bc: Bc,
) -> Result<FeFunction, Error> {
    require_2d_odd(cx, k)?;
    let mut acc = FeFunction::zero(2);
    for edge in cx.faces(1) {
        if bc == Bc::Zero && edge.on_boundary {
            continue;
        }
        let dofs = edge_dofs_2d(cx, k, edge.id)?;
        let funcs = edge_basis_2d(cx, k, edge.id)?;
        for (j, b) in dofs.iter().zip(&funcs) {
            let c = j.eval(cx, u);
            if !c.is_zero() {
                acc = acc.add(&b.scale(&c));
            }
        }
    }
    Ok(acc)
}

/// The 2-D approximation operator: edge interpolation followed by the
/// per-triangle `L^2` projection of the remainder onto the interior bubble
/// space `span{W_K P_alpha : |alpha| <= k - 3}`.
pub fn approx_op_2d(
    cx: &SimplicialComplex,
    k: usize,
    u: &FeFunction,
    bc: Bc,
) -> Result<FeFunction, Error> {
    require_2d_odd(cx, k)?;
    let edge_part = edge_interpolation_2d(cx, k, u, bc)?;
    let mut acc = edge_part.clone();
    if k < 3 {
        return Ok(acc);
    }
    let remainder = u.sub(&edge_part);
    let idxs = multi_indices(2, k - 3);
    for simplex in 0..cx.mesh().num_simplices() {
        let r = remainder.part(simplex);
        if r.is_zero() {
            continue;
        }
        let cell_face = cx
            .face_id(2, cx.mesh().simplex(simplex))
            .expect("cell face present");
        let bubbles: Vec<FeFunction> = idxs
            .iter()
            .map(|a| conforming_face_fn(cx, k, 2, cell_face, a))
            .collect::<Result<_, _>>()?;
        let vol = cx.mesh().volume(simplex);
        let n = bubbles.len();
        let g = Matrix::from_fn(n, n, |i, j| {
            l2_product(&bubbles[i].part(simplex), &bubbles[j].part(simplex), vol)
        });
        let rhs = Matrix::from_fn(n, 1, |i, _| {
            l2_product(&bubbles[i].part(simplex), &r, vol)
        });
        let sol = solve(&g, &rhs)?;
        for (i, b) in bubbles.iter().enumerate() {
            let c = sol.at(i, 0);
            if !c.is_zero() {
                acc = acc.add(&b.scale(c));
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_basis;
    use crate::mesh;
    use crate::num::rat;

    fn complex(m: crate::mesh::Mesh) -> SimplicialComplex {
        SimplicialComplex::build(m)
    }

    #[test]
    fn mark_containment() {
        let cx = complex(mesh::kuhn_cube(3).unwrap());
        for policy in [MarkPolicy::SmallestId, MarkPolicy::LargestId] {
            let mark = make_mark(&cx, policy);
            for ell in 0..=3 {
                for face in cx.faces(ell) {
                    match mark.get(ell, face.id) {
                        MarkTarget::Simplex(s) => {
                            assert!(!face.on_boundary);
                            assert!(face.patch.contains(&s));
                        }
                        MarkTarget::BoundaryFacet(bf) => {
                            assert!(face.on_boundary);
                            let bface = cx.face(2, bf);
                            assert!(bface.on_boundary);
                            assert!(face.vertices.iter().all(|v| bface.vertices.contains(v)));
                        }
                    }
                }
            }
            // simplices map to themselves
            for k in 0..cx.mesh().num_simplices() {
                let cell = cx.face_id(3, cx.mesh().simplex(k)).unwrap();
                assert_eq!(mark.get(3, cell), MarkTarget::Simplex(k));
            }
        }
    }

    #[test]
    fn local_set_size_is_dim_pk() {
        // |B_k^{CR}(K)| = C(k + d, d)
        for (d, k) in [(2usize, 1usize), (2, 3), (3, 3), (4, 3)] {
            let cx = complex(mesh::two_simplex(d).unwrap());
            let tags = local_tags(&cx, k, 0);
            let expect = crate::num::binomial(k + d, d);
            assert_eq!(
                Rational::from_integer((tags.len() as i64).into()),
                Rational::from_integer(expect),
                "d={d} k={k}"
            );
        }
    }

    #[test]
    fn local_dofs_bidual_on_reference_triangle() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        let k = 3;
        let dofs = local_simplex_dofs(&cx, k, 0).unwrap();
        let tags = local_tags(&cx, k, 0);
        // re-integration oracle: evaluate each functional on each local
        // restriction as a fresh FeFunction
        for (i, j_fn) in dofs.iter().enumerate() {
            for (jj, tag) in tags.iter().enumerate() {
                let f = match tag {
                    BasisTag::Face { ell, face, alpha } => {
                        conforming_face_fn(&cx, k, *ell, *face, alpha).unwrap()
                    }
                    BasisTag::NcFacet(f) => nc_facet_fn(&cx, k, *f),
                    _ => unreachable!(),
                };
                let v = j_fn.eval(&cx, &f);
                let want = if i == jj { rat(1, 1) } else { rat(0, 1) };
                assert_eq!(v, want, "J_{i}(b_{jj})");
            }
        }
    }

    #[test]
    fn even_k_dofs_rejected() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        assert!(matches!(
            local_simplex_dofs(&cx, 2, 0),
            Err(Error::EvenOrderDofs { k: 2 })
        ));
        let basis = build_basis(&cx, 2, Bc::Zero).unwrap();
        let mark = make_mark(&cx, MarkPolicy::SmallestId);
        assert!(matches!(
            assemble_dofs(&cx, &basis, &mark),
            Err(Error::EvenOrderDofs { k: 2 })
        ));
    }

    #[test]
    fn single_simplex_boundary_dofs_rejected() {
        let cx = complex(mesh::reference_simplex(2).unwrap());
        let err = boundary_facet_dofs(&cx, 3, 0).unwrap_err();
        assert_eq!(err, Error::SingleSimplexMesh);
    }

    #[test]
    fn assemble_dofs_identity_two_triangles_k1() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        let mark = make_mark(&cx, MarkPolicy::SmallestId);
        for bc in [Bc::Zero, Bc::Full] {
            let basis = build_basis(&cx, 1, bc).unwrap();
            let dofs = assemble_dofs(&cx, &basis, &mark).unwrap();
            assert_eq!(dofs.len(), basis.len());
            let g = dofs.gram_against(&cx, &basis);
            assert!(g.is_identity(), "bc={bc:?}: {:?}", g.identity_defect());
        }
    }

    #[test]
    fn assemble_dofs_identity_two_tets_k3() {
        let cx = complex(mesh::two_simplex(3).unwrap());
        let mark = make_mark(&cx, MarkPolicy::SmallestId);
        for bc in [Bc::Zero, Bc::Full] {
            let basis = build_basis(&cx, 3, bc).unwrap();
            let dofs = assemble_dofs(&cx, &basis, &mark).unwrap();
            let g = dofs.gram_against(&cx, &basis);
            assert!(g.is_identity(), "bc={bc:?}: {:?}", g.identity_defect());
        }
    }

    #[test]
    fn edge_constants() {
        assert_eq!(gamma_nu(0), rat(3, 4));
        assert_eq!(gamma_nu(1), rat(15, 16));
        assert_eq!(c_nu_k(0, 3), rat(2, 1));
        assert_eq!(c_nu_k(2, 3), rat(1, 7));
        assert_eq!(c_nu_k(0, 1), rat(1, 3));
        assert_eq!(c_nu_k(1, 3), rat(0, 1));
    }

    #[test]
    fn edge_dofs_bidual_k3() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        let k = 3;
        let edges: Vec<usize> = cx.faces(1).iter().map(|f| f.id).collect();
        for &e in &edges {
            let dofs = edge_dofs_2d(&cx, k, e).unwrap();
            for &ep in &edges {
                let funcs = edge_basis_2d(&cx, k, ep).unwrap();
                for (nu, j_fn) in dofs.iter().enumerate() {
                    for (mu, b) in funcs.iter().enumerate() {
                        let v = j_fn.eval(&cx, b);
                        let want = if e == ep && nu == mu {
                            rat(1, 1)
                        } else {
                            rat(0, 1)
                        };
                        assert_eq!(v, want, "E={e} E'={ep} nu={nu} mu={mu}");
                    }
                }
            }
        }
    }

    #[test]
    fn edge_dofs_k1_reduce_to_means() {
        // g_0 with k = 1 makes J the plain mean: 2 * gamma_0 (1 - 1/3) = 1
        let cx = complex(mesh::two_simplex(2).unwrap());
        let dofs = edge_dofs_2d(&cx, 1, 0).unwrap();
        assert_eq!(dofs.len(), 1);
        let one = FeFunction::from_parts(2, (0..2).map(|k| (k, MultiPoly::one(3))));
        assert_eq!(dofs[0].eval(&cx, &one), rat(1, 1));
    }

    #[test]
    fn facet_means_bidual_k1() {
        for d in 2..=4 {
            let cx = complex(mesh::two_simplex(d).unwrap());
            let facets: Vec<usize> = cx.facets().iter().map(|f| f.id).collect();
            for &f in &facets {
                let j0 = facet_mean_dof_k1(&cx, f);
                for &fp in &facets {
                    let b = nc_facet_fn(&cx, 1, fp);
                    let want = if f == fp { rat(1, 1) } else { rat(0, 1) };
                    assert_eq!(j0.eval(&cx, &b), want, "d={d} F={f} F'={fp}");
                }
                // J_0^F(c) = c
                let c = FeFunction::from_parts(
                    d,
                    (0..2).map(|k| (k, MultiPoly::constant(d + 1, rat(7, 3)))),
                );
                assert_eq!(j0.eval(&cx, &c), rat(7, 3));
            }
        }
    }

    #[test]
    fn interpolate_reproduces_basis_members() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        let mark = make_mark(&cx, MarkPolicy::SmallestId);
        let basis = build_basis(&cx, 3, Bc::Zero).unwrap();
        let dofs = assemble_dofs(&cx, &basis, &mark).unwrap();
        for (i, (_, b)) in basis.entries.iter().enumerate() {
            let (coeffs, result) = interpolate(&cx, &basis, &dofs, b);
            for (j, c) in coeffs.iter().enumerate() {
                let want = if i == j { rat(1, 1) } else { rat(0, 1) };
                assert_eq!(*c, want);
            }
            assert!(result.fe_eq(b));
        }
    }

    #[test]
    fn approx_op_reproduces_cr_members() {
        let cx = complex(mesh::two_simplex(2).unwrap());
        for k in [1usize, 3] {
            let basis = build_basis(&cx, k, Bc::Zero).unwrap();
            for (_, b) in &basis.entries {
                let out = approx_op_2d(&cx, k, b, Bc::Zero).unwrap();
                assert!(out.fe_eq(b), "k={k}");
            }
        }
    }

    #[test]
    fn edge_dofs_annihilate_interior_bubbles() {
        // J_nu^E(W_K P_alpha) = 0
        let cx = complex(mesh::two_simplex(2).unwrap());
        let k = 3;
        let cell = cx.face_id(2, cx.mesh().simplex(0)).unwrap();
        let bubble = conforming_face_fn(&cx, k, 2, cell, &[0, 0]).unwrap();
        for edge in cx.faces(1) {
            for j_fn in edge_dofs_2d(&cx, k, edge.id).unwrap() {
                assert_eq!(j_fn.eval(&cx, &bubble), rat(0, 1));
            }
        }
        // and the approximation operator returns the bubble unchanged
        let out = approx_op_2d(&cx, k, &bubble, Bc::Zero).unwrap();
        assert!(out.fe_eq(&bubble));
    }
}
