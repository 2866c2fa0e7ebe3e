//! The full simplicial complex of a mesh: faces of every dimension with
//! deterministic global ids, boundary classification, adjacent-simplex
//! patches, and the fixed vertex numbering that makes every face be
//! parametrized identically from all of its adjacent simplices.
//!
//! Conventions fixed here and relied on crate-wide:
//! - a face's vertex numbering `A_0, ..., A_l` is its ascending global
//!   vertex id order;
//! - global face ids within a dimension are the lexicographic order of the
//!   sorted vertex tuples;
//! - jumps across an interior facet are "trace from the lower simplex id
//!   minus trace from the higher".

use crate::error::Error;
use crate::mesh::{Mesh, Point};
use crate::num::Rational;
use crate::poly::MultiPoly;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

/// One face of the complex.
#[derive(Debug, Clone)]
pub struct Face {
    pub ell: usize,
    pub id: usize,
    /// Ascending global vertex ids; also the fixed numbering
    /// `A_0(tau), ..., A_l(tau)`.
    pub vertices: Vec<usize>,
    pub on_boundary: bool,
    /// Ids of adjacent simplices (every `K` with `tau` a subset of `K`),
    /// ascending.
    pub patch: Vec<usize>,
}

/// The simplicial complex of a validated mesh. Immutable once built.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    mesh: Mesh,
    levels: Vec<Vec<Face>>,
    lookup: Vec<BTreeMap<Vec<usize>, usize>>,
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

impl SimplicialComplex {
    /// Enumerates every face of every simplex, exactly once per dimension.
    pub fn build(mesh: Mesh) -> Self {
        let d = mesh.dim();
        let mut lookup: Vec<BTreeMap<Vec<usize>, usize>> = alloc::vec![BTreeMap::new(); d + 1];
        let mut patches: Vec<BTreeMap<Vec<usize>, Vec<usize>>> =
            alloc::vec![BTreeMap::new(); d + 1];
        for (k, s) in mesh.simplices().iter().enumerate() {
            for ell in 0..=d {
                for f in combinations(s, ell + 1) {
                    patches[ell].entry(f).or_default().push(k);
                }
            }
        }
        // lexicographic ids from the BTreeMap order of sorted tuples
        let mut levels: Vec<Vec<Face>> = Vec::with_capacity(d + 1);
        for ell in 0..=d {
            let mut faces = Vec::with_capacity(patches[ell].len());
            for (id, (verts, patch)) in patches[ell].iter().enumerate() {
                lookup[ell].insert(verts.clone(), id);
                faces.push(Face {
                    ell,
                    id,
                    vertices: verts.clone(),
                    on_boundary: false,
                    patch: patch.clone(),
                });
            }
            levels.push(faces);
        }
        // boundary facets: exactly one adjacent simplex; lower faces are
        // boundary iff contained in a boundary facet
        let mut boundary_facets = Vec::new();
        for f in &mut levels[d - 1] {
            if f.patch.len() == 1 {
                f.on_boundary = true;
                boundary_facets.push(f.vertices.clone());
            }
        }
        for bf in &boundary_facets {
            for ell in 0..d - 1 {
                for sub in combinations(bf, ell + 1) {
                    let id = lookup[ell][&sub];
                    levels[ell][id].on_boundary = true;
                }
            }
        }
        SimplicialComplex {
            mesh,
            levels,
            lookup,
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    /// All `l`-faces, ordered by id.
    pub fn faces(&self, ell: usize) -> &[Face] {
        &self.levels[ell]
    }

    pub fn face(&self, ell: usize, id: usize) -> &Face {
        &self.levels[ell][id]
    }

    pub fn face_id(&self, ell: usize, sorted_vertices: &[usize]) -> Option<usize> {
        self.lookup[ell].get(sorted_vertices).copied()
    }

    pub fn num_faces(&self, ell: usize) -> usize {
        self.levels[ell].len()
    }

    pub fn num_interior_faces(&self, ell: usize) -> usize {
        self.levels[ell].iter().filter(|f| !f.on_boundary).count()
    }

    /// Facet level shorthand (`l = d - 1`).
    pub fn facets(&self) -> &[Face] {
        &self.levels[self.mesh.dim() - 1]
    }

    /// Ids of the `l`-faces of simplex `k`, ascending.
    pub fn faces_of_simplex(&self, k: usize, ell: usize) -> Vec<usize> {
        let mut ids: Vec<usize> = combinations(self.mesh.simplex(k), ell + 1)
            .into_iter()
            .map(|c| self.lookup[ell][&c])
            .collect();
        ids.sort_unstable();
        ids
    }

    /// The global vertex id opposite facet `f` within simplex `k`.
    pub fn opposite_vertex(&self, k: usize, facet_id: usize) -> usize {
        let fv = &self.levels[self.mesh.dim() - 1][facet_id].vertices;
        *self
            .mesh
            .simplex(k)
            .iter()
            .find(|v| !fv.contains(v))
            .expect("facet must belong to the simplex")
    }

    /// Position of global vertex `z` in simplex `k`'s ascending vertex list;
    /// this is the barycentric variable index of `lambda_{K,z}`.
    pub fn vertex_position(&self, k: usize, z: usize) -> Option<usize> {
        self.mesh.simplex(k).iter().position(|&v| v == z)
    }

    /// The barycentric coordinate `lambda_{K,z}` as a polynomial on `K`.
    pub fn lambda(&self, k: usize, z: usize) -> Result<MultiPoly, Error> {
        let pos = self.vertex_position(k, z).ok_or_else(|| {
            Error::UnknownEntity(format!("vertex {z} is not a vertex of simplex {k}"))
        })?;
        Ok(MultiPoly::var(self.mesh.dim() + 1, pos))
    }

    /// Variable remap taking a polynomial on `K` (arity `d + 1`) to its trace
    /// on a face (arity `l + 1`): face vertices keep their slots, all other
    /// barycentric variables are set to zero.
    pub fn trace_map(&self, k: usize, ell: usize, face_id: usize) -> Vec<Option<usize>> {
        let fv = &self.levels[ell][face_id].vertices;
        self.mesh
            .simplex(k)
            .iter()
            .map(|v| fv.iter().position(|w| w == v))
            .collect()
    }

    /// The affine parametrization `chi_K` restricted to the face: reference
    /// vertex `j` maps to `A_j(tau)` for `j <= l`, and the remaining
    /// reference vertices to `K`'s leftover vertices in ascending order.
    pub fn ref_map(&self, k: usize, ell: usize, face_id: usize) -> AffineMap {
        let fv = &self.levels[ell][face_id].vertices;
        let mut order: Vec<usize> = fv.clone();
        for &v in self.mesh.simplex(k) {
            if !fv.contains(&v) {
                order.push(v);
            }
        }
        AffineMap {
            images: order
                .iter()
                .map(|&v| self.mesh.vertex(v).clone())
                .collect(),
        }
    }
}

/// Affine map from the reference simplex, given by the images of the
/// reference vertices `zhat_0 = 0, zhat_j = e_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub images: Vec<Point>,
}

impl AffineMap {
    /// Applies the map to reference coordinates `(x_1, ..., x_m)` with
    /// `m <= images.len() - 1`; trailing reference coordinates are zero.
    pub fn apply(&self, x: &[Rational]) -> Point {
        let dim = self.images[0].len();
        let mut out = self.images[0].clone();
        for (j, xj) in x.iter().enumerate() {
            for i in 0..dim {
                let delta = &self.images[j + 1][i] - &self.images[0][i];
                out[i] += xj * &delta;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh;
    use crate::num::{rat, rat_int};

    #[test]
    fn single_tet_counts() {
        let cx = SimplicialComplex::build(mesh::reference_simplex(3).unwrap());
        assert_eq!(cx.num_faces(0), 4);
        assert_eq!(cx.num_faces(1), 6);
        assert_eq!(cx.num_faces(2), 4);
        assert_eq!(cx.num_faces(3), 1);
        // everything below the cell is boundary
        assert!(cx.faces(2).iter().all(|f| f.on_boundary));
        assert!(cx.faces(0).iter().all(|f| f.on_boundary));
        assert!(!cx.faces(3)[0].on_boundary);
    }

    #[test]
    fn two_triangles_interior_edge() {
        let cx = SimplicialComplex::build(mesh::two_simplex(2).unwrap());
        assert_eq!(cx.num_faces(1), 5);
        assert_eq!(cx.num_interior_faces(1), 1);
        let interior: Vec<_> = cx.faces(1).iter().filter(|f| !f.on_boundary).collect();
        assert_eq!(interior[0].vertices, alloc::vec![1, 2]);
        assert_eq!(interior[0].patch, alloc::vec![0, 1]);
    }

    #[test]
    fn kuhn_cube_adjacency() {
        let cx = SimplicialComplex::build(mesh::kuhn_cube(3).unwrap());
        assert_eq!(cx.num_faces(3), 6);
        for f in cx.facets() {
            match f.patch.len() {
                1 => assert!(f.on_boundary),
                2 => assert!(!f.on_boundary),
                n => panic!("facet with {n} adjacent simplices"),
            }
        }
        assert_eq!(cx.num_interior_faces(2), 6);
        assert_eq!(cx.num_faces(2), 18);
        assert_eq!(cx.num_faces(1), 19);
        assert_eq!(cx.num_faces(0), 8);
    }

    #[test]
    fn closure_property() {
        // every (l-1)-face of every l-face is present
        let cx = SimplicialComplex::build(mesh::kuhn_cube(3).unwrap());
        for ell in 1..=3 {
            for f in cx.faces(ell) {
                for sub in combinations(&f.vertices, ell) {
                    assert!(cx.face_id(ell - 1, &sub).is_some());
                }
            }
        }
    }

    #[test]
    fn boundary_classification_is_order_independent() {
        // relabeling the simplex order must not change boundary flags
        let m = mesh::grid2d(2).unwrap();
        let mut simplices = m.simplices().to_vec();
        simplices.reverse();
        let m2 = Mesh::new(2, m.vertices().to_vec(), simplices).unwrap();
        let cx = SimplicialComplex::build(m);
        let cx2 = SimplicialComplex::build(m2);
        for ell in 0..=2 {
            for (f, g) in cx.faces(ell).iter().zip(cx2.faces(ell)) {
                assert_eq!(f.vertices, g.vertices);
                assert_eq!(f.on_boundary, g.on_boundary);
            }
        }
    }

    #[test]
    fn ref_map_face_restriction_is_simplex_independent() {
        let cx = SimplicialComplex::build(mesh::two_simplex(3).unwrap());
        // take the shared facet
        let shared = cx
            .facets()
            .iter()
            .find(|f| !f.on_boundary)
            .expect("interior facet");
        let maps: Vec<AffineMap> = shared
            .patch
            .iter()
            .map(|&k| cx.ref_map(k, 2, shared.id))
            .collect();
        // restriction to the facet's reference coordinates agrees
        let probe = [
            alloc::vec![rat_int(0), rat_int(0)],
            alloc::vec![rat_int(1), rat_int(0)],
            alloc::vec![rat(1, 3), rat(1, 2)],
        ];
        for x in &probe {
            assert_eq!(maps[0].apply(x), maps[1].apply(x));
        }
    }

    #[test]
    fn lambda_at_vertices() {
        let cx = SimplicialComplex::build(mesh::reference_simplex(2).unwrap());
        let l = cx.lambda(0, 1).unwrap();
        // lambda_{K, z1} is 1 at z1, 0 at others
        assert_eq!(l.eval(&[rat_int(0), rat_int(1), rat_int(0)]), rat_int(1));
        assert_eq!(l.eval(&[rat_int(1), rat_int(0), rat_int(0)]), rat_int(0));
        assert!(cx.lambda(0, 7).is_err());
    }
}
