//! Meshes: rational vertex coordinates, simplices as sorted vertex tuples,
//! exact validation on construction, and the built-in generators.
//!
//! Validation is entirely in rational predicates (no tolerances):
//! well-formed indices, no duplicate vertices or simplices, positive volumes,
//! at most two simplices per facet with their opposite vertices strictly on
//! opposite sides, no vertex inside a non-owning simplex (hanging nodes,
//! containment overlaps), no mesh edge crossing a simplex it is not a face
//! of, and facet-connectivity of the simplex graph.

use crate::error::Error;
use crate::linalg::{inverse, Matrix};
use crate::num::{rat, rat_int, Rational};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

/// A point with exact rational coordinates.
pub type Point = Vec<Rational>;

/// A conforming simplicial mesh. Simplices store their vertex ids in
/// ascending order; that order fixes the local barycentric variable order
/// everywhere else in the crate.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Point>,
    simplices: Vec<Vec<usize>>,
    volumes: Vec<Rational>,
    // per simplex: inverse of the edge matrix, for exact barycentric
    // coordinates of arbitrary points
    inv_edge: Vec<Matrix>,
}

impl Mesh {
    /// Validates and builds a mesh. See the module docs for the exact checks.
    pub fn new(
        dim: usize,
        vertices: Vec<Point>,
        simplices: Vec<Vec<usize>>,
    ) -> Result<Self, Error> {
        if dim < 2 {
            return Err(Error::InvalidMesh(format!("dimension must be >= 2, got {dim}")));
        }
        if simplices.is_empty() {
            return Err(Error::InvalidMesh(String::from("mesh has no simplices")));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidMesh(format!(
                    "vertex {i} has {} coordinates, expected {dim}",
                    v.len()
                )));
            }
        }
        // duplicate vertices
        let mut seen: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            let key: Vec<String> = v.iter().map(crate::num::render).collect();
            if let Some(&j) = seen.get(&key) {
                return Err(Error::InvalidMesh(format!(
                    "vertices {j} and {i} have identical coordinates"
                )));
            }
            seen.insert(key, i);
        }

        let mut sorted_simplices = Vec::with_capacity(simplices.len());
        let mut simplex_set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for (k, s) in simplices.iter().enumerate() {
            if s.len() != dim + 1 {
                return Err(Error::InvalidMesh(format!(
                    "simplex {k} has {} vertices, expected {}",
                    s.len(),
                    dim + 1
                )));
            }
            let mut t = s.clone();
            t.sort_unstable();
            t.dedup();
            if t.len() != dim + 1 {
                return Err(Error::InvalidMesh(format!("simplex {k} repeats a vertex")));
            }
            if *t.last().unwrap() >= vertices.len() {
                return Err(Error::InvalidMesh(format!(
                    "simplex {k} references vertex {} out of range",
                    t.last().unwrap()
                )));
            }
            if !simplex_set.insert(t.clone()) {
                return Err(Error::InvalidMesh(format!("simplex {k} is a duplicate")));
            }
            sorted_simplices.push(t);
        }

        // unused vertices
        let mut used = alloc::vec![false; vertices.len()];
        for s in &sorted_simplices {
            for &v in s {
                used[v] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {i} is not used by any simplex")));
        }

        // volumes and barycentric maps
        let mut volumes = Vec::with_capacity(sorted_simplices.len());
        let mut inv_edge = Vec::with_capacity(sorted_simplices.len());
        for (k, s) in sorted_simplices.iter().enumerate() {
            let edge = Matrix::from_fn(dim, dim, |i, j| {
                &vertices[s[j + 1]][i] - &vertices[s[0]][i]
            });
            let d = crate::linalg::det(&edge);
            if d.is_zero() {
                return Err(Error::InvalidMesh(format!("simplex {k} is degenerate")));
            }
            volumes.push(d.abs() / Rational::from_integer(crate::num::factorial(dim)));
            inv_edge.push(inverse(&edge).expect("nonzero determinant"));
        }

        let mesh = Mesh {
            dim,
            vertices,
            simplices: sorted_simplices,
            volumes,
            inv_edge,
        };
        mesh.check_conformity()?;
        Ok(mesh)
    }

    fn check_conformity(&self) -> Result<(), Error> {
        let d = self.dim;
        // facet adjacency
        let mut facet_adj: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (k, s) in self.simplices.iter().enumerate() {
            for omit in 0..=d {
                let mut f: Vec<usize> = s.clone();
                f.remove(omit);
                facet_adj.entry(f).or_default().push(k);
            }
        }
        for (f, adj) in &facet_adj {
            if adj.len() > 2 {
                return Err(Error::InvalidMesh(format!(
                    "facet {f:?} is shared by {} simplices",
                    adj.len()
                )));
            }
            if adj.len() == 2 {
                // the two opposite vertices must be strictly on opposite
                // sides of the facet hyperplane: in k0's barycentric
                // coordinates, the slot of k0's own opposite vertex must be
                // negative at k1's opposite vertex
                let (k0, k1) = (adj[0], adj[1]);
                let s0 = &self.simplices[k0];
                let opp1 = *self.simplices[k1].iter().find(|v| !f.contains(v)).unwrap();
                let lam = self.barycentric_of_point(k0, &self.vertices[opp1]);
                let pos0 = s0
                    .iter()
                    .position(|&v| !f.contains(&v))
                    .expect("opposite vertex in simplex");
                if lam[pos0].is_positive() {
                    return Err(Error::InvalidMesh(format!(
                        "simplices {k0} and {k1} overlap across facet {f:?}"
                    )));
                }
            }
        }

        // vertex containment: a vertex inside a simplex it does not belong to
        for (z, p) in self.vertices.iter().enumerate() {
            for (k, s) in self.simplices.iter().enumerate() {
                if s.contains(&z) {
                    continue;
                }
                let lam = self.barycentric_of_point(k, p);
                if lam.iter().all(|c| !c.is_negative()) {
                    return Err(Error::InvalidMesh(format!(
                        "vertex {z} lies inside simplex {k} (hanging node or overlap)"
                    )));
                }
            }
        }

        // edge piercing: a mesh edge meeting a simplex in more than a point
        // although it is not a face of it
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for s in &self.simplices {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    edges.insert((s[i], s[j]));
                }
            }
        }
        for &(a, b) in &edges {
            for (k, s) in self.simplices.iter().enumerate() {
                if s.contains(&a) && s.contains(&b) {
                    continue;
                }
                let la = self.barycentric_of_point(k, &self.vertices[a]);
                let lb = self.barycentric_of_point(k, &self.vertices[b]);
                // interval of t in [0,1] with all coordinates of
                // (1-t) la + t lb nonnegative
                let mut lo = Rational::zero();
                let mut hi = Rational::one();
                let mut empty = false;
                for i in 0..=self.dim {
                    let c0 = la[i].clone();
                    let c1 = &lb[i] - &la[i];
                    if c1.is_zero() {
                        if c0.is_negative() {
                            empty = true;
                            break;
                        }
                    } else {
                        let bound = -c0 / c1.clone();
                        if c1.is_positive() {
                            if bound > lo {
                                lo = bound;
                            }
                        } else if bound < hi {
                            hi = bound;
                        }
                    }
                }
                if !empty && lo < hi {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({a},{b}) crosses simplex {k}"
                    )));
                }
            }
        }

        // connectivity through shared facets
        let mut adj_list: Vec<Vec<usize>> = alloc::vec![Vec::new(); self.simplices.len()];
        for adj in facet_adj.values() {
            if adj.len() == 2 {
                adj_list[adj[0]].push(adj[1]);
                adj_list[adj[1]].push(adj[0]);
            }
        }
        let mut visited = alloc::vec![false; self.simplices.len()];
        let mut stack = alloc::vec![0usize];
        visited[0] = true;
        while let Some(k) = stack.pop() {
            for &n in &adj_list[k] {
                if !visited[n] {
                    visited[n] = true;
                    stack.push(n);
                }
            }
        }
        if visited.iter().any(|v| !v) {
            return Err(Error::InvalidMesh(String::from(
                "domain is not facet-connected",
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Vertex ids of simplex `k`, ascending.
    pub fn simplex(&self, k: usize) -> &[usize] {
        &self.simplices[k]
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    /// Exact `d`-volume of simplex `k`.
    pub fn volume(&self, k: usize) -> &Rational {
        &self.volumes[k]
    }

    /// Exact barycentric coordinates of a point with respect to simplex `k`,
    /// ordered like the simplex's (ascending) vertex list.
    pub fn barycentric_of_point(&self, k: usize, p: &Point) -> Vec<Rational> {
        let s = &self.simplices[k];
        let inv = &self.inv_edge[k];
        let mut lam = alloc::vec![Rational::zero(); self.dim + 1];
        let mut rest = Rational::one();
        for i in 1..=self.dim {
            let mut acc = Rational::zero();
            for j in 0..self.dim {
                acc += inv.at(i - 1, j) * &(&p[j] - &self.vertices[s[0]][j]);
            }
            rest -= &acc;
            lam[i] = acc;
        }
        lam[0] = rest;
        lam
    }

    /// The barycenter of simplex `k`.
    pub fn barycenter(&self, k: usize) -> Point {
        let s = &self.simplices[k];
        let n = rat_int(s.len() as i64);
        (0..self.dim)
            .map(|j| {
                let mut acc = Rational::zero();
                for &v in s {
                    acc += &self.vertices[v][j];
                }
                acc / n.clone()
            })
            .collect()
    }
}

/// Built-in mesh generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// The reference simplex in dimension `d`.
    Reference { d: usize },
    /// Two congruent `d`-simplices sharing one facet.
    TwoSimplex { d: usize },
    /// Kuhn triangulation of the unit cube, `d` in `{3, 4}`.
    KuhnCube { d: usize },
    /// Structured `n x n` criss-cross triangle grid on the unit square.
    Grid2d { n: usize },
}

impl Generator {
    /// Parses a generator name as used by the CLI (`reference`,
    /// `two-simplex`, `kuhn-cube`, `grid2d`).
    pub fn parse(name: &str, d: usize, n: usize) -> Result<Generator, Error> {
        match name {
            "reference" => Ok(Generator::Reference { d }),
            "two-simplex" => Ok(Generator::TwoSimplex { d }),
            "kuhn-cube" => Ok(Generator::KuhnCube { d }),
            "grid2d" => Ok(Generator::Grid2d { n }),
            other => Err(Error::UnsupportedGenerator(format!(
                "unknown generator '{other}'"
            ))),
        }
    }

    pub fn build(self) -> Result<Mesh, Error> {
        match self {
            Generator::Reference { d } => reference_simplex(d),
            Generator::TwoSimplex { d } => two_simplex(d),
            Generator::KuhnCube { d } => kuhn_cube(d),
            Generator::Grid2d { n } => grid2d(n),
        }
    }

    pub fn describe(self) -> String {
        match self {
            Generator::Reference { d } => format!("reference-simplex-d{d}"),
            Generator::TwoSimplex { d } => format!("two-simplex-d{d}"),
            Generator::KuhnCube { d } => format!("kuhn-cube-d{d}"),
            Generator::Grid2d { n } => format!("grid2d-n{n}"),
        }
    }
}

/// The reference `d`-simplex: vertices `0, e_1, ..., e_d`.
pub fn reference_simplex(d: usize) -> Result<Mesh, Error> {
    if d < 2 {
        return Err(Error::UnsupportedGenerator(format!(
            "reference simplex needs d >= 2, got {d}"
        )));
    }
    let mut vertices = alloc::vec![alloc::vec![Rational::zero(); d]];
    for i in 0..d {
        let mut v = alloc::vec![Rational::zero(); d];
        v[i] = Rational::one();
        vertices.push(v);
    }
    Mesh::new(d, vertices, alloc::vec![(0..=d).collect()])
}

/// Two congruent `d`-simplices sharing the facet `{e_1, ..., e_d}`: apexes at
/// the origin and at its mirror image `(2/d, ..., 2/d)`.
pub fn two_simplex(d: usize) -> Result<Mesh, Error> {
    if d < 2 {
        return Err(Error::UnsupportedGenerator(format!(
            "two-simplex needs d >= 2, got {d}"
        )));
    }
    let mut vertices = alloc::vec![alloc::vec![Rational::zero(); d]];
    for i in 0..d {
        let mut v = alloc::vec![Rational::zero(); d];
        v[i] = Rational::one();
        vertices.push(v);
    }
    vertices.push(alloc::vec![rat(2, d as i64); d]);
    let first: Vec<usize> = (0..=d).collect();
    let second: Vec<usize> = (1..=d + 1).collect();
    Mesh::new(d, vertices, alloc::vec![first, second])
}

/// Kuhn triangulation of the unit `d`-cube into `d!` simplices, all sharing
/// the diagonal from the origin to the all-ones corner. Supported for
/// `d in {3, 4}`.
pub fn kuhn_cube(d: usize) -> Result<Mesh, Error> {
    if !(d == 3 || d == 4) {
        return Err(Error::UnsupportedGenerator(format!(
            "kuhn-cube supports d in {{3, 4}}, got {d}"
        )));
    }
    // corners indexed by bitmask
    let corner = |mask: usize| -> Point {
        (0..d)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    };
    let vertices: Vec<Point> = (0..1usize << d).map(corner).collect();
    let mut simplices = Vec::new();
    let mut perm: Vec<usize> = (0..d).collect();
    permutations(&mut perm, 0, &mut |p| {
        let mut mask = 0usize;
        let mut simplex = alloc::vec![0usize];
        for &axis in p {
            mask |= 1 << axis;
            simplex.push(mask);
        }
        simplices.push(simplex);
    });
    Mesh::new(d, vertices, simplices)
}

fn permutations(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Structured `n x n` grid of the unit square, each cell split along the
/// lower-left to upper-right diagonal: `2 n^2` triangles.
pub fn grid2d(n: usize) -> Result<Mesh, Error> {
    if n == 0 {
        return Err(Error::UnsupportedGenerator(String::from(
            "grid2d needs n >= 1",
        )));
    }
    let idx = |i: usize, j: usize| i * (n + 1) + j;
    let mut vertices = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            vertices.push(alloc::vec![
                rat(i as i64, n as i64),
                rat(j as i64, n as i64)
            ]);
        }
    }
    let mut simplices = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let e = idx(i, j + 1);
            simplices.push(alloc::vec![a, b, c]);
            simplices.push(alloc::vec![a, c, e]);
        }
    }
    Mesh::new(2, vertices, simplices)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_simplex_counts() {
        for d in 2..=4 {
            let m = reference_simplex(d).unwrap();
            assert_eq!(m.num_vertices(), d + 1);
            assert_eq!(m.num_simplices(), 1);
            assert_eq!(
                m.volume(0),
                &Rational::new(1.into(), crate::num::factorial(d))
            );
        }
    }

    #[test]
    fn two_simplex_is_conforming() {
        for d in 2..=4 {
            let m = two_simplex(d).unwrap();
            assert_eq!(m.num_simplices(), 2);
            assert_eq!(m.volume(0), m.volume(1));
        }
    }

    #[test]
    fn kuhn_cube_counts() {
        let m = kuhn_cube(3).unwrap();
        assert_eq!(m.num_simplices(), 6);
        assert_eq!(m.num_vertices(), 8);
        // all simplices share the space diagonal 0 -- (1,1,1)
        for k in 0..6 {
            let s = m.simplex(k);
            assert!(s.contains(&0) && s.contains(&7));
        }
        // volumes sum to 1
        let total: Rational = (0..6).map(|k| m.volume(k).clone()).sum();
        assert_eq!(total, rat_int(1));
    }

    #[test]
    fn grid_counts() {
        let m = grid2d(2).unwrap();
        assert_eq!(m.num_simplices(), 8);
        assert_eq!(m.num_vertices(), 9);
    }

    #[test]
    fn barycentric_of_barycenter() {
        let m = two_simplex(3).unwrap();
        let lam = m.barycentric_of_point(0, &m.barycenter(0));
        for c in lam {
            assert_eq!(c, rat(1, 4));
        }
    }

    #[test]
    fn rejects_degenerate() {
        // three collinear points in 2d
        let verts = alloc::vec![
            alloc::vec![rat_int(0), rat_int(0)],
            alloc::vec![rat_int(1), rat_int(1)],
            alloc::vec![rat_int(2), rat_int(2)],
        ];
        let err = Mesh::new(2, verts, alloc::vec![alloc::vec![0, 1, 2]]).unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)));
    }

    #[test]
    fn rejects_hanging_node() {
        // second triangle's apex sits at the midpoint of the first's edge
        let verts = alloc::vec![
            alloc::vec![rat_int(0), rat_int(0)],
            alloc::vec![rat_int(2), rat_int(0)],
            alloc::vec![rat_int(0), rat_int(2)],
            alloc::vec![rat_int(1), rat_int(1)], // midpoint of hypotenuse
            alloc::vec![rat_int(2), rat_int(2)],
        ];
        let err = Mesh::new(
            2,
            verts,
            alloc::vec![alloc::vec![0, 1, 2], alloc::vec![1, 3, 4]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)));
    }

    #[test]
    fn rejects_overlap_across_facet() {
        // two triangles on the same side of their shared edge
        let verts = alloc::vec![
            alloc::vec![rat_int(0), rat_int(0)],
            alloc::vec![rat_int(1), rat_int(0)],
            alloc::vec![rat_int(0), rat_int(1)],
            alloc::vec![rat(1, 3), rat(1, 3)],
        ];
        let err = Mesh::new(
            2,
            verts,
            alloc::vec![alloc::vec![0, 1, 2], alloc::vec![0, 1, 3]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)));
    }

    #[test]
    fn rejects_disconnected() {
        let verts = alloc::vec![
            alloc::vec![rat_int(0), rat_int(0)],
            alloc::vec![rat_int(1), rat_int(0)],
            alloc::vec![rat_int(0), rat_int(1)],
            alloc::vec![rat_int(5), rat_int(5)],
            alloc::vec![rat_int(6), rat_int(5)],
            alloc::vec![rat_int(5), rat_int(6)],
        ];
        let err = Mesh::new(
            2,
            verts,
            alloc::vec![alloc::vec![0, 1, 2], alloc::vec![3, 4, 5]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)));
    }

    #[test]
    fn kuhn_4d_builds() {
        let m = kuhn_cube(4).unwrap();
        assert_eq!(m.num_simplices(), 24);
        let total: Rational = (0..24).map(|k| m.volume(k).clone()).sum();
        assert_eq!(total, rat_int(1));
    }
}
